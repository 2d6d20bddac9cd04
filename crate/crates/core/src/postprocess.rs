//! Field evaluation and derived quantities of a solved case.

use std::io::Write;

use serde::Serialize;

use crate::assembly::Solution;
use crate::asymptotics::{j_integral, normalized_j, AmplitudeFactors, Mode};
use crate::bell::{Point, ScalarField};
use crate::enrichment::{enriched_interpolation, DisplacementJet};
use crate::error::{Error, Result};
use crate::mesh::MeshStats;

/// Displacements, strains and stresses at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    pub point: Point,
    pub u: f64,
    pub v: f64,
    /// (ε11, ε22, 2ε12)
    pub strain: [f64; 3],
    /// (ε11,1, ε11,2, ε22,1, ε22,2, 2ε12,1, 2ε12,2)
    pub strain_gradient: [f64; 6],
    /// Cauchy stress (τ11, τ22, τ12) [Pa]
    pub stress: [f64; 3],
    /// (μ111, μ112, μ221, μ222, μ121, μ122) [Pa·m]
    pub double_stress: [f64; 6],
}

const LOCATE_TOL: f64 = 1e-12;

/// Element containing `p` and the areal coordinates there; on shared edges
/// the lowest element id wins.
pub fn locate(sol: &Solution, p: Point) -> Result<(usize, [f64; 3])> {
    let mesh = &sol.model.mesh;
    for e in 0..mesh.elements.len() {
        let [a, b, c] = mesh.element_nodes(e);
        let (xmin, xmax) = (a[0].min(b[0]).min(c[0]), a[0].max(b[0]).max(c[0]));
        let (ymin, ymax) = (a[1].min(b[1]).min(c[1]), a[1].max(b[1]).max(c[1]));
        let pad = LOCATE_TOL * (xmax - xmin).max(ymax - ymin);
        if p[0] < xmin - pad || p[0] > xmax + pad || p[1] < ymin - pad || p[1] > ymax + pad {
            continue;
        }
        let g = sol.model.geometry(e)?;
        let l = g.areal_coords(p);
        if l.iter().all(|&v| v >= -LOCATE_TOL && v <= 1.0 + LOCATE_TOL) {
            return Ok((e, l));
        }
    }
    Err(Error::PointOutsideMesh { x: p[0], y: p[1] })
}

fn sample_from_jet(sol: &Solution, p: Point, jet: &DisplacementJet) -> FieldSample {
    let cm = sol.model.constitutive();
    let strain = jet.strain();
    let strain_gradient = jet.strain_gradient();
    FieldSample {
        point: p,
        u: jet.u.value,
        v: jet.v.value,
        strain,
        strain_gradient,
        stress: cm.stress(&strain),
        double_stress: cm.double_stress(&strain_gradient),
    }
}

/// Field at the node, read straight from its DOFs. Because Q* and ∇Q*
/// vanish at nodes this is exact for values and first derivatives; the
/// second derivatives exclude the (singular at the tip) enrichment part.
pub fn evaluate_node(sol: &Solution, node: usize) -> FieldSample {
    let d = sol.node_dofs(node);
    let f = |o: usize| ScalarField { value: d[o], grad: [d[o + 1], d[o + 2]], hess: [d[o + 3], d[o + 4], d[o + 5]] };
    let jet = DisplacementJet { u: f(0), v: f(6) };
    sample_from_jet(sol, sol.model.mesh.nodes[node], &jet)
}

/// Field at an arbitrary point of the mesh.
pub fn evaluate(sol: &Solution, p: Point) -> Result<FieldSample> {
    let mesh = &sol.model.mesh;
    if p == mesh.nodes[mesh.tip_node] {
        return Ok(evaluate_node(sol, mesh.tip_node));
    }
    let (e, l) = locate(sol, p)?;
    let g = sol.model.geometry(e)?;
    let s = g.shape_eval(&l);
    let nodal = sol.element_dofs(e);
    let jet = match sol.model.enrichment(e, &g)? {
        Some(el) => {
            let ee = el.eval(p, &s)?;
            enriched_interpolation(&nodal, &sol.amplitudes, Some(&ee), &s, sol.model.material.mu)
        }
        None => enriched_interpolation(&nodal, &AmplitudeFactors::ZERO, None, &s, sol.model.material.mu),
    };
    Ok(sample_from_jet(sol, p, &jet))
}

/// Tip stress concentration: τ22/t in mode I, τ12/t in mode II, from the
/// tip node DOFs.
pub fn tip_kt(sol: &Solution) -> f64 {
    let s = evaluate_node(sol, sol.model.mesh.tip_node);
    let tau = match sol.model.mode {
        Mode::I => s.stress[1],
        Mode::II => s.stress[2],
    };
    tau / sol.model.load
}

/// Classical energy release rate from the equivalent domain integral
/// ∫ (τ_ij u_i,1 − W δ_1j) q_,j dA over the ring r1 < r < r2 around the tip,
/// with a smooth cosine ramp for q. The modelled upper half is doubled.
///
/// Only meaningful for ℓ = 0: the double-stress terms are not included.
pub fn domain_j(sol: &Solution, r1: f64, r2: f64) -> Result<f64> {
    let model = &sol.model;
    if model.material.ell != 0.0 {
        return Err(Error::InvalidParameter("domain J needs a classical (ℓ = 0) solution".into()));
    }
    if !(0.0 < r1 && r1 < r2) {
        return Err(Error::InvalidParameter(format!("domain J ring needs 0 < r1 < r2, got {r1}, {r2}")));
    }
    let cm = model.constitutive();
    let rule = crate::bell::quadrature(crate::bell::RuleId::P30);
    let tip = model.mesh.nodes[model.mesh.tip_node];
    let dq = |p: Point| -> [f64; 2] {
        let (x, y) = (p[0] - tip[0], p[1] - tip[1]);
        let r = x.hypot(y);
        if r <= r1 || r >= r2 {
            return [0.0; 2];
        }
        let w = std::f64::consts::PI / (r2 - r1);
        // q = ½(1 + cos(w (r − r1)))
        let dr = -0.5 * w * (w * (r - r1)).sin();
        [dr * x / r, dr * y / r]
    };
    let mut j = 0.0;
    for e in 0..model.mesh.elements.len() {
        let ps = model.mesh.element_nodes(e);
        let rs = ps.map(|p| (p[0] - tip[0]).hypot(p[1] - tip[1]));
        let g = model.geometry(e)?;
        let h = g.diameter();
        if rs.iter().all(|&r| r + h < r1) || rs.iter().all(|&r| r - h > r2) {
            continue;
        }
        let nodal = sol.element_dofs(e);
        for (l, w) in rule.iter() {
            let p = g.point(l);
            let gq = dq(p);
            if gq == [0.0; 2] {
                continue;
            }
            let jet = enriched_interpolation(&nodal, &AmplitudeFactors::ZERO, None, &g.shape_eval(l), model.material.mu);
            let eps = jet.strain();
            let tau = cm.stress(&eps);
            let wd = 0.5 * (tau[0] * eps[0] + tau[1] * eps[1] + tau[2] * eps[2]);
            let (u1, v1) = (jet.u.grad[0], jet.v.grad[0]);
            let f = (tau[0] * u1 + tau[2] * v1 - wd) * gq[0] + (tau[2] * u1 + tau[1] * v1) * gq[1];
            j += w * g.area() * f;
        }
    }
    Ok(2.0 * j)
}

/// Crack opening v(x) on the upper crack face at the given x < 0.
pub fn crack_opening_profile(sol: &Solution, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
    let d = sol.model.mesh.spec.d;
    xs.iter()
        .map(|&x| {
            if !(x < 0.0 && x >= -d) {
                return Err(Error::InvalidParameter(format!("crack face sample x = {x} outside [-{d}, 0)")));
            }
            Ok((x, evaluate(sol, [x, 0.0])?.v))
        })
        .collect()
}

/// Cauchy stress along y = 0 (crack face and ligament): (x, τ11, τ22, τ12).
pub fn stress_profile(sol: &Solution, xs: &[f64]) -> Result<Vec<(f64, [f64; 3])>> {
    xs.iter().map(|&x| Ok((x, evaluate(sol, [x, 0.0])?.stress))).collect()
}

/// Sample positions clustered toward the tip: `n` points on (−extent, 0)
/// or (0, extent) depending on the sign, geometric in |x|.
pub fn graded_samples(extent: f64, smallest: f64, n: usize) -> Vec<f64> {
    let (a, b) = (smallest.abs().ln(), extent.abs().ln());
    let sign = extent.signum();
    let last = (n - 1).max(1);
    (0..n)
        .map(|i| match i {
            0 => sign * smallest.abs(),
            _ if i == last => extent,
            _ => sign * (a + (b - a) * i as f64 / last as f64).exp(),
        })
        .collect()
}

/// Scalar results of one solved case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseSummary {
    pub mode: Mode,
    pub enriched: bool,
    pub amplitudes: AmplitudeFactors,
    /// Amplitudes divided by t/√ℓ.
    pub amplitudes_normalized: [f64; 4],
    /// Energy release rate of the active mode from the amplitudes [Pa·m];
    /// absent without enrichment.
    pub j: Option<f64>,
    /// J normalized by the classical value at d_min = L/40.
    pub j_normalized: Option<f64>,
    pub kt: f64,
    pub inverse_kt: f64,
    pub residual_norm: f64,
    /// Double-precision floor of the residual for this solve.
    pub residual_floor: f64,
    pub equilibrium_error: f64,
    pub symmetry_error: f64,
    pub out_of_balance: f64,
    pub strain_energy: f64,
    pub dofs: usize,
    pub mesh: MeshStats,
}

pub fn summarize(sol: &Solution) -> Result<CaseSummary> {
    let m = &sol.model;
    let t = m.load;
    let kt = tip_kt(sol);
    let (j, jn) = if m.enriched {
        let (ji, jii) = j_integral(&sol.amplitudes, &m.material)?;
        let j = match m.mode {
            Mode::I => ji,
            Mode::II => jii,
        };
        (Some(j), Some(normalized_j(j, &m.material, t, m.mesh.spec.l / 40.0)))
    } else {
        (None, None)
    };
    let kscale = m.material.ell.sqrt() / t;
    Ok(CaseSummary {
        mode: m.mode,
        enriched: m.enriched,
        amplitudes: sol.amplitudes,
        amplitudes_normalized: sol.amplitudes.0.map(|k| k * kscale),
        j,
        j_normalized: jn,
        kt,
        inverse_kt: 1.0 / kt,
        residual_norm: sol.report.residual_norm,
        residual_floor: sol.report.residual_floor,
        equilibrium_error: sol.report.equilibrium_error,
        symmetry_error: sol.report.symmetry_error,
        out_of_balance: sol.report.out_of_balance,
        strain_energy: sol.report.strain_energy,
        dofs: sol.report.dofs,
        mesh: m.mesh.stats(),
    })
}

/// Write rows as CSV with the given header.
pub fn write_csv<W: Write>(mut w: W, header: &[&str], rows: &[Vec<f64>]) -> std::io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for r in rows {
        let line: Vec<String> = r.iter().map(|v| format!("{v:.12e}")).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}
