use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sge_crack::study::{run_convergence, run_single, run_size_effect, with_threads, RunConfig, Study};
use sge_crack::{generate_quarter_mesh, Error};

#[derive(Parser)]
#[command(name = "sge-crack", version, about = "Enriched Bell-triangle solver for cracks in strain gradient elasticity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured case and write summary, profiles and plots
    Run(Common),
    /// Sweep fan radius, fan count and quadrature
    Converge(Common),
    /// Sweep crack size and length scale
    SizeEffect(Common),
    /// Write the generated mesh as text
    MeshDump(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's "output")
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (0 = all cores)
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Reserved; meshing and solving are deterministic
    #[arg(long, default_value_t = 0)]
    #[allow(dead_code)]
    seed: u64,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Json(_) | Error::InvalidParameter(_) => 2,
        _ => 3,
    }
}

fn load(c: &Common) -> Result<(RunConfig, PathBuf), Error> {
    let text = std::fs::read_to_string(&c.config).map_err(|e| Error::Config(format!("{}: {e}", c.config.display())))?;
    let cfg = RunConfig::from_json(&text)?;
    let out = c.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg, out))
}

fn execute(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Run(c) => {
            let (cfg, out) = load(&c)?;
            let s = with_threads(c.threads, || run_single(&cfg, Some(&out)))??;
            println!("{}", serde_json::to_string_pretty(&s)?);
        }
        Command::Converge(c) => {
            let (cfg, out) = load(&c)?;
            let sweep = match &cfg.study {
                Study::Convergence(s) => s.clone(),
                _ => Default::default(),
            };
            let rep = with_threads(c.threads, || run_convergence(&cfg, &sweep, Some(&out)))??;
            for row in &rep.radius {
                let fmt = |s: &Option<sge_crack::postprocess::CaseSummary>| s.as_ref().map_or("failed".to_string(), |s| format!("{:.5}", s.kt));
                println!("R/ell = {:<7} kt enriched = {}  conventional = {}", row.r_over_ell, fmt(&row.enriched), fmt(&row.conventional));
            }
            report_failures(&rep.failures, &out);
        }
        Command::SizeEffect(c) => {
            let (cfg, out) = load(&c)?;
            let sweep = match &cfg.study {
                Study::SizeEffect(s) => s.clone(),
                _ => Default::default(),
            };
            let rep = with_threads(c.threads, || run_size_effect(&cfg, &sweep, Some(&out)))??;
            for r in &rep.rows {
                println!(
                    "ell/L = {:<6} d/L = {:<8.5} J/J0 = {:.4}  classical = {:.4}  1/kt = {:.4}",
                    r.ell_over_l,
                    r.d_over_l,
                    r.summary.j_normalized.unwrap_or(f64::NAN),
                    r.j_classical_normalized,
                    r.summary.inverse_kt
                );
            }
            report_failures(&rep.failures, &out);
        }
        Command::MeshDump(c) => {
            let (cfg, out) = load(&c)?;
            let mesh = generate_quarter_mesh(&cfg.geometry)?;
            std::fs::create_dir_all(&out)?;
            let path = out.join("mesh.txt");
            mesh.write_text(std::io::BufWriter::new(std::fs::File::create(&path)?))?;
            let st = mesh.stats();
            println!("{} nodes, {} elements -> {}", st.nodes, st.elements, path.display());
        }
    }
    Ok(())
}

fn report_failures(failures: &[sge_crack::study::SweepFailure], out: &Path) {
    for f in failures {
        eprintln!("sweep point {} failed: {}", f.label, f.error);
    }
    println!("results in {}", out.display());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
