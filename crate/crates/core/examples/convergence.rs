//! Convergence of the tip stress concentration with fan radius, fan count
//! and quadrature rule (mode I, d/L = 1/5, ℓ = d/10, M = 5).
//!
//! Writes CSV/SVG/JSON into the directory given as the first argument
//! (default `out/convergence`).

use sge_crack::asymptotics::Mode;
use sge_crack::study::{run_convergence, ConvergenceSweep, RunConfig};
use std::path::PathBuf;

fn main() -> sge_crack::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/convergence".into()));
    let cfg = RunConfig::baseline(Mode::I);
    let rep = run_convergence(&cfg, &ConvergenceSweep::default(), Some(&out))?;
    let reference = rep.reference.as_ref().map(|s| s.kt);
    println!("reference kt (R/ℓ = 0.005, enriched) = {reference:?}");
    println!("{:>8} {:>12} {:>9} {:>12} {:>9}", "R/ℓ", "kt enr", "err", "kt conv", "err");
    for row in &rep.radius {
        let col = |s: &Option<_>| match s {
            Some(s) => (s_kt(s), rep.kt_error(s).unwrap_or(f64::NAN)),
            None => (f64::NAN, f64::NAN),
        };
        let (a, ea) = col(&row.enriched);
        let (b, eb) = col(&row.conventional);
        println!("{:>8} {a:>12.6} {ea:>9.2e} {b:>12.6} {eb:>9.2e}", row.r_over_ell);
    }
    for (m, s) in &rep.fan {
        println!("M = {m}: kt = {:?}", s.as_ref().map(s_kt));
    }
    for (q, s) in &rep.quadrature {
        println!("{q:?}: kt = {:?}", s.as_ref().map(s_kt));
    }
    println!("{} failed points; output in {}", rep.failures.len(), out.display());
    Ok(())
}

fn s_kt(s: &sge_crack::postprocess::CaseSummary) -> f64 {
    s.kt
}
