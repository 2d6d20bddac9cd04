//! Configuration-driven runs: single cases, convergence sweeps and
//! size-effect sweeps, with CSV/SVG/JSON artifacts.

mod config;
pub mod svg;

pub use config::{ConvergenceSweep, RunConfig, SizeEffectSweep, Study};

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::assembly::{solve_model, Model, Solution};
use crate::asymptotics::{reference_j, Mode};
use crate::bell::RuleId;
use crate::error::{Error, Result};
use crate::mesh::generate_quarter_mesh;
use crate::postprocess::{crack_opening_profile, domain_j, graded_samples, stress_profile, summarize, write_csv, CaseSummary};
use svg::{LinePlot, Series};

pub fn build_model(cfg: &RunConfig) -> Result<Model> {
    Ok(Model {
        mesh: generate_quarter_mesh(&cfg.geometry)?,
        material: cfg.material()?,
        mode: cfg.mode,
        enriched: cfg.enrichment,
        rule: cfg.quadrature,
        load: cfg.load,
    })
}

/// Solve one configuration and summarize it.
pub fn run_case(cfg: &RunConfig) -> Result<(Solution, CaseSummary)> {
    let sol = solve_model(&build_model(cfg)?)?;
    let summary = summarize(&sol)?;
    Ok((sol, summary))
}

/// Write via a temporary sibling and rename, so readers never see a
/// partially written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn csv_bytes(header: &[&str], rows: &[Vec<f64>]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(&mut buf, header, rows).expect("writing to memory");
    buf
}

/// Profiles sampled on y = 0 for reports: crack opening on the face and
/// Cauchy stress on both sides of the tip.
pub struct Profiles {
    pub opening: Vec<(f64, f64)>,
    pub stress: Vec<(f64, [f64; 3])>,
}

pub fn profiles(sol: &Solution) -> Result<Profiles> {
    let spec = &sol.model.mesh.spec;
    let near = 1e-3 * spec.r;
    let mut face = graded_samples(-spec.d, near, 60);
    face.reverse();
    let opening = crack_opening_profile(sol, &face)?;
    let mut xs = face.clone();
    xs.extend(graded_samples(spec.ligament(), near, 60));
    let stress = stress_profile(sol, &xs)?;
    Ok(Profiles { opening, stress })
}

/// Single case: summary.json, crack_opening.csv/.svg, stress_profile.csv/.svg.
pub fn run_single(cfg: &RunConfig, out: Option<&Path>) -> Result<CaseSummary> {
    let (sol, summary) = run_case(cfg)?;
    if let Some(dir) = out {
        write_atomic(&dir.join("summary.json"), serde_json::to_string_pretty(&summary)?.as_bytes())?;
        let p = profiles(&sol)?;
        let rows: Vec<Vec<f64>> = p.opening.iter().map(|&(x, v)| vec![x, v]).collect();
        write_atomic(&dir.join("crack_opening.csv"), &csv_bytes(&["x", "v"], &rows))?;
        let plot = LinePlot {
            title: "Crack opening".into(),
            x_label: "|x| [m]".into(),
            y_label: "v [m]".into(),
            log_x: true,
            series: vec![Series { name: "v".into(), points: p.opening.iter().map(|&(x, v)| (-x, v)).collect() }],
        };
        write_atomic(&dir.join("crack_opening.svg"), plot.render().as_bytes())?;
        let t = cfg.load;
        let rows: Vec<Vec<f64>> = p.stress.iter().map(|(x, s)| vec![*x, s[0] / t, s[1] / t, s[2] / t]).collect();
        write_atomic(&dir.join("stress_profile.csv"), &csv_bytes(&["x", "tau11_over_t", "tau22_over_t", "tau12_over_t"], &rows))?;
        let names = ["tau11/t", "tau22/t", "tau12/t"];
        let plot = LinePlot {
            title: "Cauchy stress on y = 0".into(),
            x_label: "x [m]".into(),
            y_label: "stress / t".into(),
            log_x: false,
            series: (0..3).map(|k| Series { name: names[k].into(), points: p.stress.iter().map(|(x, s)| (*x, s[k] / t)).collect() }).collect(),
        };
        write_atomic(&dir.join("stress_profile.svg"), plot.render().as_bytes())?;
    }
    Ok(summary)
}

/// A sweep point that did not solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepFailure {
    pub label: String,
    pub error: String,
}

/// Run labelled configurations on the current rayon pool, preserving order.
pub fn run_points(points: &[(String, RunConfig)]) -> Vec<std::result::Result<CaseSummary, SweepFailure>> {
    points
        .par_iter()
        .map(|(label, cfg)| {
            cfg.validate()
                .and_then(|_| run_case(cfg))
                .map(|(_, s)| s)
                .map_err(|e| SweepFailure { label: label.clone(), error: e.to_string() })
        })
        .collect()
}

fn with_radius(cfg: &RunConfig, r_over_ell: f64) -> RunConfig {
    let mut c = cfg.clone();
    c.geometry.r = r_over_ell * cfg.material.ell;
    c.study = Study::Single;
    c
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusRow {
    pub r_over_ell: f64,
    pub enriched: Option<CaseSummary>,
    pub conventional: Option<CaseSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub reference: Option<CaseSummary>,
    pub radius: Vec<RadiusRow>,
    pub fan: Vec<(usize, Option<CaseSummary>)>,
    pub quadrature: Vec<(RuleId, Option<CaseSummary>)>,
    pub failures: Vec<SweepFailure>,
}

impl ConvergenceReport {
    /// Relative kt error against the enriched reference.
    pub fn kt_error(&self, s: &CaseSummary) -> Option<f64> {
        self.reference.as_ref().map(|r| ((s.kt - r.kt) / r.kt).abs())
    }
}

/// Sweep R/ℓ for both element types, then M and the quadrature rule at the
/// probe radius. Failed points are recorded and skipped.
pub fn run_convergence(cfg: &RunConfig, sweep: &ConvergenceSweep, out: Option<&Path>) -> Result<ConvergenceReport> {
    let mut points: Vec<(String, RunConfig)> = Vec::new();
    let mut reference = with_radius(cfg, sweep.reference_r_over_ell);
    reference.enrichment = true;
    points.push(("reference".into(), reference));
    for &r in &sweep.r_over_ell {
        for enriched in [true, false] {
            let mut c = with_radius(cfg, r);
            c.enrichment = enriched;
            points.push((format!("R/ell={r} enriched={enriched}"), c));
        }
    }
    for &m in &sweep.fan_counts {
        let mut c = with_radius(cfg, sweep.probe_r_over_ell);
        c.enrichment = true;
        c.geometry.m = m;
        points.push((format!("M={m}"), c));
    }
    for &q in &sweep.quadratures {
        let mut c = with_radius(cfg, sweep.probe_r_over_ell);
        c.enrichment = true;
        c.quadrature = q;
        points.push((format!("quadrature={}", q.points()), c));
    }
    let results = run_points(&points);
    let mut failures = Vec::new();
    let mut it = results.into_iter().map(|r| match r {
        Ok(s) => Some(s),
        Err(f) => {
            failures.push(f);
            None
        }
    });
    let reference = it.next().flatten();
    let radius: Vec<RadiusRow> = sweep
        .r_over_ell
        .iter()
        .map(|&r| RadiusRow { r_over_ell: r, enriched: it.next().flatten(), conventional: it.next().flatten() })
        .collect();
    let fan: Vec<_> = sweep.fan_counts.iter().map(|&m| (m, it.next().flatten())).collect();
    let quadrature: Vec<_> = sweep.quadratures.iter().map(|&q| (q, it.next().flatten())).collect();
    drop(it);
    let report = ConvergenceReport { reference, radius, fan, quadrature, failures };
    if let Some(dir) = out {
        write_convergence(dir, &report)?;
    }
    Ok(report)
}

fn write_convergence(dir: &Path, rep: &ConvergenceReport) -> Result<()> {
    let header = ["r_over_ell", "enriched", "kt", "kt_error", "k1", "k2", "k3", "k4", "j", "dofs"];
    let mut rows = Vec::new();
    for row in &rep.radius {
        for s in [&row.enriched, &row.conventional].into_iter().flatten() {
            let k = s.amplitudes.0;
            rows.push(vec![
                row.r_over_ell,
                f64::from(u8::from(s.enriched)),
                s.kt,
                rep.kt_error(s).unwrap_or(f64::NAN),
                k[0],
                k[1],
                k[2],
                k[3],
                s.j.unwrap_or(f64::NAN),
                s.dofs as f64,
            ]);
        }
    }
    write_atomic(&dir.join("convergence_radius.csv"), &csv_bytes(&header, &rows))?;
    let rows: Vec<Vec<f64>> = rep.fan.iter().filter_map(|(m, s)| s.as_ref().map(|s| vec![*m as f64, s.kt, s.j.unwrap_or(f64::NAN)])).collect();
    write_atomic(&dir.join("convergence_fan.csv"), &csv_bytes(&["m", "kt", "j"], &rows))?;
    let rows: Vec<Vec<f64>> =
        rep.quadrature.iter().filter_map(|(q, s)| s.as_ref().map(|s| vec![q.points() as f64, s.kt, s.j.unwrap_or(f64::NAN)])).collect();
    write_atomic(&dir.join("convergence_quadrature.csv"), &csv_bytes(&["points", "kt", "j"], &rows))?;
    let series = |enriched: bool, name: &str| Series {
        name: name.into(),
        points: rep
            .radius
            .iter()
            .filter_map(|r| if enriched { r.enriched.as_ref() } else { r.conventional.as_ref() }.map(|s| (r.r_over_ell, s.kt)))
            .collect(),
    };
    let plot = LinePlot {
        title: "Tip stress concentration vs fan radius".into(),
        x_label: "R / ell".into(),
        y_label: "kt".into(),
        log_x: true,
        series: vec![series(true, "enriched"), series(false, "conventional")],
    };
    write_atomic(&dir.join("convergence.svg"), plot.render().as_bytes())?;
    write_atomic(&dir.join("convergence.json"), serde_json::to_string_pretty(rep)?.as_bytes())?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeEffectRow {
    pub ell_over_l: f64,
    pub d_over_l: f64,
    pub summary: CaseSummary,
    /// Classical J̄ of the same geometry (ℓ = 0, domain integral).
    pub j_classical_normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeEffectReport {
    pub rows: Vec<SizeEffectRow>,
    pub failures: Vec<SweepFailure>,
}

impl SizeEffectReport {
    /// Rows of one length scale, ordered by d/L as in the sweep.
    pub fn series(&self, ell_over_l: f64) -> Vec<&SizeEffectRow> {
        self.rows.iter().filter(|r| r.ell_over_l == ell_over_l).collect()
    }
}

/// Classical (ℓ = 0) energy release rate of the same geometry and load,
/// from a conventional solve and the domain integral on a ring of radii
/// 0.2 and 0.5 times the distance to the nearest wall.
pub fn classical_j(cfg: &RunConfig) -> Result<f64> {
    let mut c = cfg.clone();
    c.study = Study::Single;
    c.enrichment = false;
    c.material.ell = 0.0;
    let room = c.geometry.d.min(c.geometry.ligament());
    c.geometry.r = 0.02 * room;
    let sol = solve_model(&build_model(&c)?)?;
    domain_j(&sol, 0.2 * room, 0.5 * room)
}

/// Sweep d/L for each ℓ/L with R = r_over_ell·ℓ (enriched), plus one
/// classical reference per crack length.
pub fn run_size_effect(cfg: &RunConfig, sweep: &SizeEffectSweep, out: Option<&Path>) -> Result<SizeEffectReport> {
    let l = cfg.geometry.l;
    let mut keys = Vec::new();
    let mut points = Vec::new();
    for &el in &sweep.ell_over_l {
        for &dl in &sweep.d_over_l {
            let mut c = cfg.clone();
            c.study = Study::Single;
            c.enrichment = true;
            c.material.ell = el * l;
            c.geometry.d = dl * l;
            c.geometry.r = sweep.r_over_ell * el * l;
            keys.push((el, dl));
            points.push((format!("ell/L={el} d/L={dl}"), c));
        }
    }
    let m = cfg.material()?;
    let j0 = reference_j(&m, cfg.load, l / 40.0);
    let classical: Vec<std::result::Result<f64, String>> = sweep
        .d_over_l
        .par_iter()
        .map(|&dl| {
            let mut c = cfg.clone();
            c.geometry.d = dl * l;
            classical_j(&c).map(|j| j / j0).map_err(|e| e.to_string())
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (dl, r) in sweep.d_over_l.iter().zip(&classical) {
        if let Err(e) = r {
            failures.push(SweepFailure { label: format!("classical d/L={dl}"), error: e.clone() });
        }
    }
    for ((el, dl), r) in keys.into_iter().zip(run_points(&points)) {
        let jc = sweep.d_over_l.iter().position(|&x| x == dl).and_then(|i| classical[i].as_ref().ok().copied());
        match (r, jc) {
            (Ok(summary), Some(jc)) => rows.push(SizeEffectRow { ell_over_l: el, d_over_l: dl, summary, j_classical_normalized: jc }),
            (Ok(_), None) => {}
            (Err(f), _) => failures.push(f),
        }
    }
    let report = SizeEffectReport { rows, failures };
    if let Some(dir) = out {
        write_size_effect(dir, cfg.mode, sweep, &report)?;
    }
    Ok(report)
}

fn write_size_effect(dir: &Path, mode: Mode, sweep: &SizeEffectSweep, rep: &SizeEffectReport) -> Result<()> {
    let header = [
        "ell_over_l", "d_over_l", "k1n", "k2n", "k3n", "k4n", "j", "j_bar", "j_bar_classical", "kt", "inverse_kt", "d_over_ell",
    ];
    let rows: Vec<Vec<f64>> = rep
        .rows
        .iter()
        .map(|r| {
            let s = &r.summary;
            let k = s.amplitudes_normalized;
            vec![
                r.ell_over_l,
                r.d_over_l,
                k[0],
                k[1],
                k[2],
                k[3],
                s.j.unwrap_or(f64::NAN),
                s.j_normalized.unwrap_or(f64::NAN),
                r.j_classical_normalized,
                s.kt,
                s.inverse_kt,
                r.d_over_l / r.ell_over_l,
            ]
        })
        .collect();
    write_atomic(&dir.join("size_effect.csv"), &csv_bytes(&header, &rows))?;
    let ks = mode.amplitude_indices();
    let mut series = Vec::new();
    for &el in &sweep.ell_over_l {
        for k in ks {
            series.push(Series {
                name: format!("K{} l/L={el}", k + 1),
                points: rep.series(el).iter().map(|r| (r.d_over_l, r.summary.amplitudes_normalized[k])).collect(),
            });
        }
    }
    let plot = LinePlot { title: "Normalized amplitude factors".into(), x_label: "d / L".into(), y_label: "K sqrt(ell) / t".into(), log_x: false, series };
    write_atomic(&dir.join("size_effect_amplitudes.svg"), plot.render().as_bytes())?;
    let mut series = Vec::new();
    for &el in &sweep.ell_over_l {
        series.push(Series {
            name: format!("SGE l/L={el}"),
            points: rep.series(el).iter().map(|r| (r.d_over_l, r.summary.j_normalized.unwrap_or(f64::NAN))).collect(),
        });
    }
    if let Some(&el) = sweep.ell_over_l.first() {
        series.push(Series { name: "classical".into(), points: rep.series(el).iter().map(|r| (r.d_over_l, r.j_classical_normalized)).collect() });
    }
    let plot = LinePlot { title: "Normalized J-integral".into(), x_label: "d / L".into(), y_label: "J / J0".into(), log_x: false, series };
    write_atomic(&dir.join("size_effect_j.svg"), plot.render().as_bytes())?;
    let series = sweep
        .ell_over_l
        .iter()
        .map(|&el| Series {
            name: format!("l/L={el}"),
            points: rep.series(el).iter().map(|r| (r.d_over_l / r.ell_over_l, r.summary.inverse_kt)).collect(),
        })
        .collect();
    let plot = LinePlot { title: "Inverse stress concentration".into(), x_label: "d / ell".into(), y_label: "1 / kt".into(), log_x: true, series };
    write_atomic(&dir.join("size_effect_kt.svg"), plot.render().as_bytes())?;
    write_atomic(&dir.join("size_effect.json"), serde_json::to_string_pretty(rep)?.as_bytes())?;
    Ok(())
}

/// Run `f` on a dedicated pool of `threads` workers (0 = rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| Error::Config(e.to_string()))?;
    Ok(pool.install(f))
}
