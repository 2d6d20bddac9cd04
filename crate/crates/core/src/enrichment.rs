//! C¹-preserving crack-tip enrichment.
//!
//! Inside a fan element the asymptotic functions are renormalized as
//!
//! ```text
//! Q*(x) = Q(x) − Σ_j [ Q(x_j) N_j⁰ + Q_x(x_j) N_j¹ + Q_y(x_j) N_j² ]
//! ```
//!
//! where N_j⁰, N_j¹, N_j² are the Bell functions attached to the value, ∂x
//! and ∂y degrees of freedom of node j (local indices 6j, 6j+1, 6j+2). Q* and
//! its gradient then vanish at every node, so the nodal degrees of freedom
//! keep their meaning and the field stays C¹ across fan edges. The tip node
//! contributes nothing to the sum because Q and ∇Q vanish there.

use crate::asymptotics::{q_eval, AmplitudeFactors, AsymptoticEval};
use crate::bell::{Point, ScalarField, ShapeEval, TriangleGeometry};
use crate::error::{Error, Result};

/// Q*_in with first and second Cartesian derivatives at one point,
/// indexed [i][n] like [`AsymptoticEval`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnrichedEval {
    pub qstar: [[f64; 4]; 2],
    pub dqstar: [[[f64; 2]; 4]; 2],
    /// (xx, xy, yy); NaN when evaluated exactly at the tip, where the
    /// second derivatives are singular.
    pub ddqstar: [[[f64; 3]; 4]; 2],
}

/// Local index of the element node that coincides with the tip.
pub fn tip_local_index(g: &TriangleGeometry, tip: Point) -> Result<usize> {
    let tol = 1e-12 * g.diameter();
    g.nodes
        .iter()
        .position(|p| (p[0] - tip[0]).abs() <= tol && (p[1] - tip[1]).abs() <= tol)
        .ok_or_else(|| {
            Error::EnrichmentLayout(format!("crack tip ({}, {}) is not a node of the enriched element", tip[0], tip[1]))
        })
}

/// Nodal asymptotic data needed for the renormalization; computed once per
/// element and reused at every quadrature point.
#[derive(Debug, Clone, Copy)]
pub struct EnrichedElement {
    pub tip: Point,
    pub tip_local: usize,
    nodal: [Option<AsymptoticEval>; 3],
    eta: f64,
}

impl EnrichedElement {
    pub fn new(g: &TriangleGeometry, tip: Point, eta: f64) -> Result<Self> {
        let tip_local = tip_local_index(g, tip)?;
        let mut nodal = [None; 3];
        for (j, slot) in nodal.iter_mut().enumerate() {
            if j != tip_local {
                let p = g.nodes[j];
                *slot = Some(q_eval(p[0] - tip[0], p[1] - tip[1], eta)?);
            }
        }
        Ok(Self { tip, tip_local, nodal, eta })
    }

    /// Evaluate Q* at the point with Cartesian coordinates `p`, given the
    /// shape functions evaluated there.
    pub fn eval(&self, p: Point, s: &ShapeEval) -> Result<EnrichedEval> {
        let (x, y) = (p[0] - self.tip[0], p[1] - self.tip[1]);
        let mut out = if x == 0.0 && y == 0.0 {
            EnrichedEval { qstar: [[0.0; 4]; 2], dqstar: [[[0.0; 2]; 4]; 2], ddqstar: [[[f64::NAN; 3]; 4]; 2] }
        } else {
            let q = q_eval(x, y, self.eta)?;
            EnrichedEval { qstar: q.q, dqstar: q.dq, ddqstar: q.ddq }
        };
        for (j, nod) in self.nodal.iter().enumerate() {
            let Some(nod) = nod else { continue };
            let (k0, k1, k2) = (6 * j, 6 * j + 1, 6 * j + 2);
            for i in 0..2 {
                for n in 0..4 {
                    let (v, gx, gy) = (nod.q[i][n], nod.dq[i][n][0], nod.dq[i][n][1]);
                    out.qstar[i][n] -= v * s.n[k0] + gx * s.n[k1] + gy * s.n[k2];
                    for c in 0..2 {
                        out.dqstar[i][n][c] -= v * s.dn[k0][c] + gx * s.dn[k1][c] + gy * s.dn[k2][c];
                    }
                    for c in 0..3 {
                        out.ddqstar[i][n][c] -= v * s.ddn[k0][c] + gx * s.ddn[k1][c] + gy * s.ddn[k2][c];
                    }
                }
            }
        }
        Ok(out)
    }
}

/// One-shot evaluation of Q* at areal coordinates `l` of an element whose
/// node coincides with `tip`.
pub fn enriched_eval(g: &TriangleGeometry, tip: Point, l: &[f64; 3], eta: f64) -> Result<EnrichedEval> {
    let el = EnrichedElement::new(g, tip, eta)?;
    el.eval(g.point(l), &g.shape_eval(l))
}

/// Displacement components with their derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DisplacementJet {
    pub u: ScalarField,
    pub v: ScalarField,
}

impl DisplacementJet {
    /// Voigt strain (ε11, ε22, 2ε12).
    pub fn strain(&self) -> [f64; 3] {
        [self.u.grad[0], self.v.grad[1], self.u.grad[1] + self.v.grad[0]]
    }

    /// Strain gradient (ε11,1, ε11,2, ε22,1, ε22,2, 2ε12,1, 2ε12,2).
    pub fn strain_gradient(&self) -> [f64; 6] {
        let (u, v) = (&self.u.hess, &self.v.hess);
        [u[0], u[1], v[1], v[2], u[1] + v[0], u[2] + v[1]]
    }
}

/// Split 36 node-major element DOFs (per node: u block then v block) into the
/// 18 u and 18 v shape coefficients.
pub fn split_element_dofs(nodal: &[f64; 36]) -> ([f64; 18], [f64; 18]) {
    let mut u = [0.0; 18];
    let mut v = [0.0; 18];
    for a in 0..3 {
        for k in 0..6 {
            u[6 * a + k] = nodal[12 * a + k];
            v[6 * a + k] = nodal[12 * a + 6 + k];
        }
    }
    (u, v)
}

/// Conventional Bell interpolation plus the amplitude-weighted enrichment
/// (1/4μ) Σ K_n Q*_in. Pass `None` for conventional elements.
pub fn enriched_interpolation(
    nodal: &[f64; 36],
    k: &AmplitudeFactors,
    e: Option<&EnrichedEval>,
    s: &ShapeEval,
    mu: f64,
) -> DisplacementJet {
    let (ud, vd) = split_element_dofs(nodal);
    let mut jet = DisplacementJet { u: s.interpolate(&ud), v: s.interpolate(&vd) };
    if let Some(e) = e {
        let scale = 0.25 / mu;
        for (i, f) in [&mut jet.u, &mut jet.v].into_iter().enumerate() {
            for n in 0..4 {
                let kn = k.0[n] * scale;
                if kn == 0.0 {
                    continue;
                }
                f.value += kn * e.qstar[i][n];
                f.grad[0] += kn * e.dqstar[i][n][0];
                f.grad[1] += kn * e.dqstar[i][n][1];
                for c in 0..3 {
                    f.hess[c] += kn * e.ddqstar[i][n][c];
                }
            }
        }
    }
    jet
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::triangle_geometry;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// Random tip-incident fan element (tip, P(α0), P(α1)), counterclockwise.
    fn random_fan_element(rng: &mut impl Rng) -> (TriangleGeometry, f64) {
        let r = 10f64.powf(rng.gen_range(-4.0..-1.0));
        let a0 = rng.gen_range(0.0..PI * 0.8);
        let a1 = (a0 + rng.gen_range(0.2..0.8)).min(PI);
        let g = triangle_geometry([[0.0, 0.0], [r * a0.cos(), r * a0.sin()], [r * a1.cos(), r * a1.sin()]]).unwrap();
        (g, r)
    }

    const NODES: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

    #[test]
    fn vanishes_with_gradient_at_nodes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (g, r) = random_fan_element(&mut rng);
            for l in NODES {
                let e = enriched_eval(&g, [0.0, 0.0], &l, 1.8).unwrap();
                for i in 0..2 {
                    for n in 0..4 {
                        assert!(e.qstar[i][n].abs() / r.powf(1.5) < 1e-12);
                        assert!(e.dqstar[i][n][0].abs() / r.sqrt() < 1e-10);
                        assert!(e.dqstar[i][n][1].abs() / r.sqrt() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn tip_must_be_a_node() {
        let g = triangle_geometry([[0.1, 0.0], [0.2, 0.0], [0.1, 0.1]]).unwrap();
        assert!(matches!(enriched_eval(&g, [0.0, 0.0], &[0.3, 0.3, 0.4], 1.8), Err(Error::EnrichmentLayout(_))));
    }

    #[test]
    fn independent_of_length_scale_and_reduces_without_amplitudes() {
        let g = triangle_geometry([[0.0, 0.0], [0.01, 0.0], [0.005, 0.008]]).unwrap();
        let l = [0.2, 0.5, 0.3];
        let e = enriched_eval(&g, [0.0, 0.0], &l, 1.8).unwrap();
        let s = g.shape_eval(&l);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let nodal: [f64; 36] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let a = enriched_interpolation(&nodal, &AmplitudeFactors::ZERO, Some(&e), &s, 1.0);
        let b = enriched_interpolation(&nodal, &AmplitudeFactors::ZERO, None, &s, 1.0);
        assert_eq!(a, b);
        let only = enriched_interpolation(&[0.0; 36], &AmplitudeFactors([1.0, 0.0, 0.0, 0.0]), Some(&e), &s, 0.25);
        assert_eq!(only.u.value, e.qstar[0][0]);
        assert_eq!(only.v.value, e.qstar[1][0]);
    }

    #[test]
    fn renormalization_removes_nodal_data_only() {
        // nodal DOFs set to the nodal values and gradients of Q11/Q21; with
        // K1 = 1 the subtracted interpolant cancels them and the field is Q
        let g = triangle_geometry([[0.0, 0.0], [0.01, 0.002], [-0.003, 0.009]]).unwrap();
        let mu = 0.25;
        let mut nodal = [0.0; 36];
        for a in 1..3 {
            let p = g.nodes[a];
            let q = q_eval(p[0], p[1], 1.8).unwrap();
            for i in 0..2 {
                nodal[12 * a + 6 * i] = q.q[i][0];
                nodal[12 * a + 6 * i + 1] = q.dq[i][0][0];
                nodal[12 * a + 6 * i + 2] = q.dq[i][0][1];
            }
        }
        let k = AmplitudeFactors([1.0, 0.0, 0.0, 0.0]);
        let el = EnrichedElement::new(&g, [0.0, 0.0], 1.8).unwrap();
        for l in [[0.3, 0.3, 0.4], [0.1, 0.7, 0.2], [0.0, 0.5, 0.5], [0.0, 1.0, 0.0]] {
            let s = g.shape_eval(&l);
            let p = g.point(&l);
            let q = q_eval(p[0], p[1], 1.8).unwrap();
            let jet = enriched_interpolation(&nodal, &k, Some(&el.eval(p, &s).unwrap()), &s, mu);
            for (i, f) in [jet.u, jet.v].into_iter().enumerate() {
                assert!((f.value - q.q[i][0]).abs() < 1e-15, "{l:?}");
                assert!((f.grad[0] - q.dq[i][0][0]).abs() < 1e-12 && (f.grad[1] - q.dq[i][0][1]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn intra_fan_conformity() {
        // two fan elements sharing the edge tip–P
        let r = 0.004;
        let p: Vec<[f64; 2]> = [0.0, 0.6, 1.3].iter().map(|a: &f64| [r * a.cos(), r * a.sin()]).collect();
        let g1 = triangle_geometry([[0.0, 0.0], p[0], p[1]]).unwrap();
        let g2 = triangle_geometry([[0.0, 0.0], p[1], p[2]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        // global DOFs of the tip and P1; the two remaining nodes random
        let tip: [f64; 12] = std::array::from_fn(|_| rng.gen_range(-1e-3..1e-3));
        let shared: [f64; 12] = std::array::from_fn(|_| rng.gen_range(-1e-3..1e-3));
        let other1: [f64; 12] = std::array::from_fn(|_| rng.gen_range(-1e-3..1e-3));
        let other2: [f64; 12] = std::array::from_fn(|_| rng.gen_range(-1e-3..1e-3));
        let pack = |a: &[f64; 12], b: &[f64; 12], c: &[f64; 12]| {
            let mut out = [0.0; 36];
            out[..12].copy_from_slice(a);
            out[12..24].copy_from_slice(b);
            out[24..].copy_from_slice(c);
            out
        };
        let n1 = pack(&tip, &other1, &shared);
        let n2 = pack(&tip, &shared, &other2);
        let k = AmplitudeFactors([0.3, -0.7, 1.1, 0.2]);
        let e1 = EnrichedElement::new(&g1, [0.0, 0.0], 1.8).unwrap();
        let e2 = EnrichedElement::new(&g2, [0.0, 0.0], 1.8).unwrap();
        let tdir = [p[1][0] / r, p[1][1] / r];
        for s in 1..=20 {
            let t = s as f64 / 21.0;
            let x = [p[1][0] * t, p[1][1] * t];
            let (l1, l2) = (g1.areal_coords(x), g2.areal_coords(x));
            let (s1, s2) = (g1.shape_eval(&l1), g2.shape_eval(&l2));
            let j1 = enriched_interpolation(&n1, &k, Some(&e1.eval(x, &s1).unwrap()), &s1, 1.0);
            let j2 = enriched_interpolation(&n2, &k, Some(&e2.eval(x, &s2).unwrap()), &s2, 1.0);
            for (a, b) in [(j1.u, j2.u), (j1.v, j2.v)] {
                let scale = a.value.abs().max(1e-6);
                assert!((a.value - b.value).abs() < 1e-10 * scale);
                let ta = a.grad[0] * tdir[0] + a.grad[1] * tdir[1];
                let tb = b.grad[0] * tdir[0] + b.grad[1] * tdir[1];
                assert!((ta - tb).abs() < 1e-10 * ta.abs().max(1e-3));
                // the normal derivative is continuous as well
                assert!((a.grad[0] - b.grad[0]).abs() < 1e-9 * a.grad[0].abs().max(1e-3));
                assert!((a.grad[1] - b.grad[1]).abs() < 1e-9 * a.grad[1].abs().max(1e-3));
            }
        }
    }

    #[test]
    fn second_derivatives_grow_like_inverse_sqrt_r() {
        let r = 0.01;
        let g = triangle_geometry([[0.0, 0.0], [r, 0.0], [r * 0.6f64.cos(), r * 0.6f64.sin()]]).unwrap();
        let el = EnrichedElement::new(&g, [0.0, 0.0], 1.8).unwrap();
        let dir = [0.3f64.cos(), 0.3f64.sin()];
        let at = |rho: f64| {
            let x = [rho * dir[0], rho * dir[1]];
            let s = g.shape_eval(&g.areal_coords(x));
            let e = el.eval(x, &s).unwrap();
            e.ddqstar[0][0].iter().map(|v| v * v).sum::<f64>().sqrt()
        };
        let rho = r * 1e-4;
        let ratio = at(rho / 4.0) / at(rho);
        assert!((ratio - 2.0).abs() < 0.1, "{ratio}");
    }
}
