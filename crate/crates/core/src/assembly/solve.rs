//! Sparse symmetric solve with elimination of constrained DOFs.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Par, Side};
use rayon::prelude::*;
use serde::Serialize;

use super::{BMatrices, DofMap, Model, NODE_DOFS};
use crate::asymptotics::AmplitudeFactors;
use crate::bell::quadrature;
use crate::error::{Error, Result};

/// Compressed-row sparse matrix with summed duplicates.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_triplets(n: usize, mut trip: Vec<(usize, usize, f64)>) -> Self {
        trip.sort_unstable_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0; n + 1];
        let mut col = Vec::with_capacity(trip.len() / 2);
        let mut val: Vec<f64> = Vec::with_capacity(trip.len() / 2);
        let mut last = None;
        for (r, c, v) in trip {
            if last == Some((r, c)) {
                *val.last_mut().unwrap() += v;
            } else {
                col.push(c);
                val.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, col, val }
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col[r.clone()].iter().copied().zip(self.val[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col[r.clone()].binary_search(&j) {
            Ok(k) => self.val[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.val.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// max |K_ij − K_ji| / max |K|.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if j > i {
                    worst = worst.max((v - self.get(j, i)).abs());
                }
            }
        }
        worst / self.max_abs().max(f64::MIN_POSITIVE)
    }
}

/// A symmetric system K x = f.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub k: CsrMatrix,
    pub f: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

const CG_STEPS: usize = 40;

/// f − Kx with error-free products and compensated summation per row.
fn residual(k: &CsrMatrix, x: &[f64], f: &[f64]) -> Vec<f64> {
    (0..k.n)
        .map(|i| {
            let (mut s, mut c) = (f[i], 0.0);
            let mut add = |t: f64| {
                let u = s + t;
                c += if s.abs() >= t.abs() { (s - u) + t } else { (t - u) + s };
                s = u;
            };
            for (j, v) in k.row(i) {
                let p = v * x[j];
                add(-p);
                add(-v.mul_add(x[j], -p));
            }
            s + c
        })
        .collect()
}

/// ε‖|K||x|‖/‖f‖: the relative residual that rounding x to doubles alone
/// can produce. No floating-point solution is reliably below it.
pub fn rounding_floor(k: &CsrMatrix, x: &[f64], f: &[f64]) -> f64 {
    let floor: Vec<f64> = (0..k.n).map(|i| k.row(i).map(|(j, v)| (v * x[j]).abs()).sum::<f64>() * f64::EPSILON).collect();
    norm(&floor) / norm(f).max(f64::MIN_POSITIVE)
}

/// Solve an SPD system by sparse Cholesky on the Jacobi-scaled matrix with
/// factorization-preconditioned conjugate gradients. Returns the solution and the relative
/// residual ‖Kx − f‖/‖f‖.
pub fn solve(system: &LinearSystem) -> Result<(Vec<f64>, f64)> {
    let n = system.k.n;
    let mut d = vec![0.0; n];
    for (i, di) in d.iter_mut().enumerate() {
        let kii = system.k.get(i, i);
        if !(kii > 0.0) {
            return Err(Error::Solver(format!("non-positive diagonal {kii:e} at reduced DOF {i}")));
        }
        *di = 1.0 / kii.sqrt();
    }
    let mut trip = Vec::with_capacity(system.k.nnz() / 2 + n);
    for i in 0..n {
        for (j, v) in system.k.row(i) {
            if j <= i {
                trip.push(Triplet::new(i, j, v * d[i] * d[j]));
            }
        }
    }
    faer::set_global_parallelism(Par::Seq);
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trip).map_err(|e| Error::Solver(format!("{e:?}")))?;
    let llt = a.sp_cholesky(Side::Lower).map_err(|e| Error::Solver(format!("Cholesky factorization failed: {e:?}")))?;
    let scaled_solve = |rhs: &[f64]| -> Vec<f64> {
        let b = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i] * d[i]);
        let y = llt.solve(&b);
        (0..n).map(|i| y[(i, 0)] * d[i]).collect()
    };
    let fnorm = norm(&system.f);
    let mut x = scaled_solve(&system.f);
    let mut r = residual(&system.k, &x, &system.f);
    let mut res = norm(&r);
    // Conjugate gradients preconditioned by the factorization. Plain
    // refinement stalls once κ·ε approaches one, which fourth-order
    // operators on strongly graded meshes reach; CG still converges.
    let (mut best, mut best_res) = (x.clone(), res);
    let mut z = scaled_solve(&r);
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut stalled = 0;
    for _ in 0..CG_STEPS {
        if best_res <= 1e-14 * fnorm || rz <= 0.0 {
            break;
        }
        let kp = system.k.mul_vec(&p);
        let pkp: f64 = p.iter().zip(&kp).map(|(a, b)| a * b).sum();
        if !(pkp > 0.0) {
            break;
        }
        let alpha = rz / pkp;
        x.iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
        // true residual each step: cheap next to the solves and keeps the
        // recurrence from drifting
        r = residual(&system.k, &x, &system.f);
        res = norm(&r);
        if res < best_res {
            if res > 0.5 * best_res {
                stalled += 1;
            }
            best.clone_from(&x);
            best_res = res;
        } else {
            stalled += 1;
        }
        if stalled >= 3 {
            break;
        }
        z = scaled_solve(&r);
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
    }
    let (x, res) = (best, best_res);
    let rel = if fnorm > 0.0 { res / fnorm } else { res };
    if !rel.is_finite() || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solver("non-finite solution".into()));
    }
    Ok((x, rel))
}

/// Health numbers recorded for every solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveReport {
    pub dofs: usize,
    pub free_dofs: usize,
    pub nonzeros: usize,
    /// ‖K û − f‖ / ‖f‖ on the free DOFs.
    pub residual_norm: f64,
    /// Double-precision floor of `residual_norm` (see [`rounding_floor`]).
    pub residual_floor: f64,
    /// max_ij |K_ij − K_ji| / max |K| before constraints.
    pub symmetry_error: f64,
    /// Relative mismatch between support reactions and applied load.
    pub equilibrium_error: f64,
    /// ‖∫(B₁ᵀτ + B₂ᵀμ) − f‖ / ‖f‖ on the free DOFs, from recomputed stresses.
    pub out_of_balance: f64,
    /// ½ fᵀû [J/m].
    pub strain_energy: f64,
}

/// Solved model: full DOF vector (constrained entries zero) and amplitudes.
#[derive(Debug, Clone)]
pub struct Solution {
    pub model: Model,
    pub dofs: Vec<f64>,
    pub amplitudes: AmplitudeFactors,
    pub report: SolveReport,
}

impl Solution {
    pub fn node_dofs(&self, node: usize) -> &[f64] {
        &self.dofs[NODE_DOFS * node..NODE_DOFS * (node + 1)]
    }

    /// Element DOFs in element order.
    pub fn element_dofs(&self, e: usize) -> [f64; 36] {
        let tri = self.model.mesh.elements[e];
        std::array::from_fn(|i| self.dofs[NODE_DOFS * tri[i / 12] + i % 12])
    }
}

/// Rigid motions (x-translation, y-translation, rotation) as global vectors.
fn rigid_modes(model: &Model, dofs: &DofMap) -> [(&'static str, Vec<f64>); 3] {
    let n = dofs.total();
    let mut tx = vec![0.0; n];
    let mut ty = vec![0.0; n];
    let mut rot = vec![0.0; n];
    for (a, p) in model.mesh.nodes.iter().enumerate() {
        tx[dofs.node_dof(a, 0)] = 1.0;
        ty[dofs.node_dof(a, 6)] = 1.0;
        rot[dofs.node_dof(a, 0)] = -p[1];
        rot[dofs.node_dof(a, 2)] = -1.0;
        rot[dofs.node_dof(a, 6)] = p[0];
        rot[dofs.node_dof(a, 7)] = 1.0;
    }
    [("x-translation", tx), ("y-translation", ty), ("rotation", rot)]
}

/// Rigid modes (or combinations of them) that no constraint touches.
///
/// Gram–Schmidt on the constrained-DOF restrictions: a mode whose
/// restriction lies in the span of the earlier ones is reported.
fn unconstrained_modes(model: &Model, dofs: &DofMap) -> Vec<String> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut out = Vec::new();
    for (name, v) in rigid_modes(model, dofs) {
        let mut r: Vec<f64> = v.iter().enumerate().map(|(i, x)| if dofs.is_constrained(i) { *x } else { 0.0 }).collect();
        let size = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for b in &basis {
            let c: f64 = r.iter().zip(b).map(|(x, y)| x * y).sum();
            r.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 1e-10 * size {
            out.push(name.to_string());
        } else {
            basis.push(r.into_iter().map(|x| x / norm).collect());
        }
    }
    out
}

/// ∫(B₁ᵀ C ε + B₂ᵀ A κ) dv assembled from the solution, element by element.
fn internal_forces(model: &Model, dofs: &DofMap, u: &[f64]) -> Result<Vec<f64>> {
    let cm = model.constitutive();
    let rule = quadrature(model.rule);
    let scale = model.amplitude_scale();
    let parts: Vec<Result<(Vec<usize>, Vec<f64>)>> = (0..model.mesh.elements.len())
        .into_par_iter()
        .map(|e| {
            let g = model.geometry(e)?;
            let en = model.enrichment(e, &g)?;
            let idx = model.element_dofs(e, dofs);
            let ue: Vec<f64> = idx.iter().map(|&i| u[i]).collect();
            let mut fe = vec![0.0; idx.len()];
            for (l, w) in rule.iter() {
                let s = g.shape_eval(l);
                let ee = match &en {
                    Some(el) => Some(el.eval(g.point(l), &s)?),
                    None => None,
                };
                let b = BMatrices::new(&s, ee.as_ref().map(|e| (e, scale)));
                let (eps, kap) = b.apply(&ue);
                let tau = cm.stress(&eps);
                let mu = cm.double_stress(&kap);
                let wq = w * g.area();
                for j in 0..b.n {
                    let v: f64 = (0..3).map(|r| b.b1[j][r] * tau[r]).sum::<f64>() + (0..6).map(|r| b.b2[j][r] * mu[r]).sum::<f64>();
                    fe[j] += wq * v;
                }
            }
            Ok((idx, fe))
        })
        .collect();
    let mut out = vec![0.0; dofs.total()];
    for p in parts {
        let (idx, fe) = p?;
        for (i, v) in idx.into_iter().zip(fe) {
            out[i] += v;
        }
    }
    Ok(out)
}

/// Assemble, constrain, solve and check one model.
pub fn solve_model(model: &Model) -> Result<Solution> {
    let dofs = model.dof_map()?;
    let free_modes = unconstrained_modes(model, &dofs);
    if !free_modes.is_empty() {
        return Err(Error::ConstraintDeficiency { modes: free_modes });
    }
    let (trip, f) = model.assemble(&dofs)?;
    let total = dofs.total();
    let k = CsrMatrix::from_triplets(total, trip);
    let symmetry_error = k.asymmetry();

    let (map, nfree) = dofs.free_numbering();
    let mut red = Vec::with_capacity(k.nnz());
    for i in 0..total {
        let Some(ri) = map[i] else { continue };
        for (j, v) in k.row(i) {
            if let Some(rj) = map[j] {
                red.push((ri, rj, v));
            }
        }
    }
    let mut fr = vec![0.0; nfree];
    for i in 0..total {
        if let Some(ri) = map[i] {
            fr[ri] = f[i];
        }
    }
    let system = LinearSystem { k: CsrMatrix::from_triplets(nfree, red), f: fr };
    let (x, residual_norm) = solve(&system).map_err(|e| match e {
        Error::Solver(msg) if msg.contains("Cholesky") => {
            let modes = unconstrained_modes(model, &dofs);
            if modes.is_empty() {
                Error::Solver(msg)
            } else {
                Error::ConstraintDeficiency { modes }
            }
        }
        other => other,
    })?;
    let residual_floor = rounding_floor(&system.k, &x, &system.f);

    let mut u = vec![0.0; total];
    for i in 0..total {
        if let Some(ri) = map[i] {
            u[i] = x[ri];
        }
    }

    // support reactions balance the applied load in each direction
    let ku = k.mul_vec(&u);
    let mut equilibrium_error = 0.0f64;
    for comp in [0, 6] {
        let applied: f64 = (0..dofs.nodes).map(|a| f[dofs.node_dof(a, comp)]).sum();
        if applied == 0.0 {
            continue;
        }
        let reaction: f64 = (0..dofs.nodes)
            .map(|a| dofs.node_dof(a, comp))
            .filter(|&i| dofs.is_constrained(i))
            .map(|i| ku[i] - f[i])
            .sum();
        equilibrium_error = equilibrium_error.max(((reaction + applied) / applied).abs());
    }

    let fint = internal_forces(model, &dofs, &u)?;
    let oob: Vec<f64> = (0..total).filter(|&i| !dofs.is_constrained(i)).map(|i| fint[i] - f[i]).collect();
    let fnorm = norm(&system.f);
    let out_of_balance = norm(&oob) / fnorm.max(f64::MIN_POSITIVE);
    let strain_energy = 0.5 * f.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>();
    let amplitudes = AmplitudeFactors(std::array::from_fn(|n| u[dofs.amplitude(n)]));

    Ok(Solution {
        model: model.clone(),
        amplitudes,
        report: SolveReport {
            dofs: total,
            free_dofs: nfree,
            nonzeros: k.nnz(),
            residual_norm,
            residual_floor,
            symmetry_error,
            equilibrium_error,
            out_of_balance,
            strain_energy,
        },
        dofs: u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::Mode;
    use crate::bell::RuleId;
    use crate::material::MaterialParams;
    use crate::mesh::{generate_quarter_mesh, DomainSpec};

    fn coarse_model(mode: Mode, enriched: bool) -> Model {
        let spec = DomainSpec { h_max: Some(0.25), grading: 2.0, ..DomainSpec::new(0.4, 1.0, 0.05, 3) };
        Model {
            mesh: generate_quarter_mesh(&spec).unwrap(),
            material: MaterialParams::new(1e9, 0.3, 0.04).unwrap(),
            mode,
            enriched,
            rule: RuleId::P25,
            load: 1e6,
        }
    }

    #[test]
    fn identity_like_system() {
        let n = 5;
        let trip = (0..n).map(|i| (i, i, 2.0 + i as f64)).chain([(0, 1, 0.1), (1, 0, 0.1)]).collect();
        let k = CsrMatrix::from_triplets(n, trip);
        let xs: Vec<f64> = (0..n).map(|i| i as f64 - 1.5).collect();
        let f = k.mul_vec(&xs);
        let (x, res) = solve(&LinearSystem { k, f }).unwrap();
        for (a, b) in x.iter().zip(&xs) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(res < 1e-14);
    }

    #[test]
    fn free_free_nullspace_has_dimension_three() {
        let model = coarse_model(Mode::I, false);
        let dofs = DofMap::new(model.mesh.nodes.len());
        let (trip, _) = model.assemble(&dofs).unwrap();
        let n = 12 * model.mesh.nodes.len();
        let k = CsrMatrix::from_triplets(dofs.total(), trip);
        // symmetric Jacobi scaling keeps the eigenvalue count meaningful
        let d: Vec<f64> = (0..n).map(|i| 1.0 / k.get(i, i).sqrt()).collect();
        let m = Mat::<f64>::from_fn(n, n, |i, j| k.get(i, j) * d[i] * d[j]);
        let ev = m.self_adjoint_eigenvalues(Side::Lower).unwrap();
        let max = ev.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let small = ev.iter().filter(|v| v.abs() < 1e-10 * max).count();
        assert_eq!(small, 3, "{:?}", &ev[..6]);
    }

    #[test]
    fn constrained_system_is_positive_definite() {
        for mode in [Mode::I, Mode::II] {
            let model = coarse_model(mode, true);
            let dofs = model.dof_map().unwrap();
            let (trip, _) = model.assemble(&dofs).unwrap();
            let k = CsrMatrix::from_triplets(dofs.total(), trip);
            let free: Vec<usize> = (0..dofs.total()).filter(|&i| !dofs.is_constrained(i)).collect();
            let d: Vec<f64> = free.iter().map(|&i| 1.0 / k.get(i, i).sqrt()).collect();
            let m = Mat::<f64>::from_fn(free.len(), free.len(), |i, j| k.get(free[i], free[j]) * d[i] * d[j]);
            let ev = m.self_adjoint_eigenvalues(Side::Lower).unwrap();
            assert!(ev[0] > 0.0, "{mode:?}: {}", ev[0]);
        }
    }

    #[test]
    fn health_checks_on_small_runs() {
        for mode in [Mode::I, Mode::II] {
            for enriched in [false, true] {
                let sol = solve_model(&coarse_model(mode, enriched)).unwrap();
                let r = sol.report;
                assert!(r.residual_norm < 1e-9, "{r:?}");
                assert!(r.equilibrium_error < 1e-8, "{r:?}");
                assert!(r.symmetry_error < 1e-10, "{r:?}");
                assert!(r.out_of_balance < 1e-8, "{r:?}");
                assert!(r.strain_energy > 0.0);
                let active = mode.amplitude_indices();
                for n in 0..4 {
                    if !enriched || !active.contains(&n) {
                        assert_eq!(sol.amplitudes.0[n], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn ligament_reactions_balance_the_top_load() {
        let model = coarse_model(Mode::I, true);
        let sol = solve_model(&model).unwrap();
        let dofs = model.dof_map().unwrap();
        let (trip, f) = model.assemble(&dofs).unwrap();
        let k = CsrMatrix::from_triplets(dofs.total(), trip);
        let ku = k.mul_vec(&sol.dofs);
        let lig = model.mesh.nodes_with(crate::mesh::BoundaryTag::Ligament);
        let reaction: f64 = lig.iter().map(|&a| ku[dofs.node_dof(a, 6)] - f[dofs.node_dof(a, 6)]).sum();
        let want = -model.load * model.mesh.spec.l;
        assert!(((reaction - want) / want).abs() < 1e-8);
    }

    #[test]
    fn missing_constraints_name_the_free_modes() {
        let model = coarse_model(Mode::I, false);
        let dofs = DofMap::new(model.mesh.nodes.len());
        let modes = unconstrained_modes(&model, &dofs);
        assert_eq!(modes, vec!["x-translation", "y-translation", "rotation"]);
    }
}
