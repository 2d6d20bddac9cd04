//! Element-level integrals: stiffness and consistent edge loads.

use crate::bell::{gauss_legendre_5, QuadratureRule, ShapeEval, TriangleGeometry};
use crate::enrichment::{EnrichedElement, EnrichedEval};
use crate::error::Result;
use crate::material::ConstitutiveMatrices;

/// Nodal DOFs per element (3 nodes × 12).
pub const NODAL: usize = 36;

/// Dense symmetric element matrix of size 36, or 40 when the four
/// amplitude columns are attached.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementMatrix {
    pub n: usize,
    /// Row-major n × n.
    pub data: Vec<f64>,
}

impl ElementMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// Enrichment data for a fan element: the renormalized asymptotic
/// functions and the 1/(4μ) amplitude scale.
#[derive(Debug, Clone, Copy)]
pub struct Enrichment<'a> {
    pub element: &'a EnrichedElement,
    pub scale: f64,
}

/// Strain (B₁, 3 rows) and strain-gradient (B₂, 6 rows) operators at one
/// point, column-major with `n` columns.
pub(crate) struct BMatrices {
    pub n: usize,
    pub b1: Vec<[f64; 3]>,
    pub b2: Vec<[f64; 6]>,
}

impl BMatrices {
    pub fn new(s: &ShapeEval, e: Option<(&EnrichedEval, f64)>) -> Self {
        let n = if e.is_some() { NODAL + 4 } else { NODAL };
        let mut b1 = vec![[0.0; 3]; n];
        let mut b2 = vec![[0.0; 6]; n];
        for a in 0..3 {
            for k in 0..6 {
                let sh = 6 * a + k;
                let [nx, ny] = s.dn[sh];
                let [nxx, nxy, nyy] = s.ddn[sh];
                let iu = 12 * a + k;
                let iv = iu + 6;
                b1[iu] = [nx, 0.0, ny];
                b1[iv] = [0.0, ny, nx];
                b2[iu] = [nxx, nxy, 0.0, 0.0, nxy, nyy];
                b2[iv] = [0.0, 0.0, nxy, nyy, nxx, nxy];
            }
        }
        if let Some((e, s)) = e {
            for m in 0..4 {
                let [ux, uy] = e.dqstar[0][m];
                let [vx, vy] = e.dqstar[1][m];
                let [uxx, uxy, uyy] = e.ddqstar[0][m];
                let [vxx, vxy, vyy] = e.ddqstar[1][m];
                b1[NODAL + m] = [s * ux, s * vy, s * (uy + vx)];
                b2[NODAL + m] = [s * uxx, s * uxy, s * vxy, s * vyy, s * (uxy + vxx), s * (uyy + vxy)];
            }
        }
        Self { n, b1, b2 }
    }

    /// Strain and strain gradient for element DOFs `x` (length n).
    pub fn apply(&self, x: &[f64]) -> ([f64; 3], [f64; 6]) {
        let mut eps = [0.0; 3];
        let mut kap = [0.0; 6];
        for j in 0..self.n {
            if x[j] == 0.0 {
                continue;
            }
            for r in 0..3 {
                eps[r] += self.b1[j][r] * x[j];
            }
            for r in 0..6 {
                kap[r] += self.b2[j][r] * x[j];
            }
        }
        (eps, kap)
    }
}

/// K_e = Σ_q w_q |Δ|/2 (B₁ᵀ C B₁ + B₂ᵀ A B₂) over the rule's points.
pub fn element_stiffness(
    g: &TriangleGeometry,
    cm: &ConstitutiveMatrices,
    rule: &QuadratureRule,
    enrichment: Option<Enrichment<'_>>,
) -> Result<ElementMatrix> {
    let n = if enrichment.is_some() { NODAL + 4 } else { NODAL };
    let mut k = ElementMatrix::zeros(n);
    let has_gradient = cm.a.iter().flatten().any(|v| *v != 0.0);
    let mut cb1 = vec![[0.0; 3]; n];
    let mut ab2 = vec![[0.0; 6]; n];
    for (l, w) in rule.iter() {
        let s = g.shape_eval(l);
        let ee = match enrichment {
            Some(en) => Some((en.element.eval(g.point(l), &s)?, en.scale)),
            None => None,
        };
        let b = BMatrices::new(&s, ee.as_ref().map(|(e, sc)| (e, *sc)));
        let wq = w * g.area();
        for j in 0..n {
            for r in 0..3 {
                cb1[j][r] = wq * (0..3).map(|c| cm.c[r][c] * b.b1[j][c]).sum::<f64>();
            }
            if has_gradient {
                for r in 0..6 {
                    ab2[j][r] = wq * (0..6).map(|c| cm.a[r][c] * b.b2[j][c]).sum::<f64>();
                }
            }
        }
        for i in 0..n {
            let (b1i, b2i) = (&b.b1[i], &b.b2[i]);
            let row = &mut k.data[i * n..(i + 1) * n];
            for j in i..n {
                let mut v = b1i[0] * cb1[j][0] + b1i[1] * cb1[j][1] + b1i[2] * cb1[j][2];
                if has_gradient {
                    v += (0..6).map(|r| b2i[r] * ab2[j][r]).sum::<f64>();
                }
                row[j] += v;
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            k.data[i * n + j] = k.data[j * n + i];
        }
    }
    Ok(k)
}

/// Consistent load of a constant traction on the element edge from local
/// node `a` to local node `b`: element-DOF contributions (36, or 40 with the
/// amplitude entries).
pub fn consistent_edge_load(
    g: &TriangleGeometry,
    edge: [usize; 2],
    traction: [f64; 2],
    enrichment: Option<Enrichment<'_>>,
) -> Result<Vec<f64>> {
    let n = if enrichment.is_some() { NODAL + 4 } else { NODAL };
    let mut f = vec![0.0; n];
    if traction == [0.0, 0.0] {
        return Ok(f);
    }
    let (pa, pb) = (g.nodes[edge[0]], g.nodes[edge[1]]);
    let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
    for (t, w) in gauss_legendre_5() {
        let mut l = [0.0; 3];
        l[edge[0]] = 1.0 - t;
        l[edge[1]] = t;
        let s = g.shape_eval(&l);
        let wq = w * len;
        for a in 0..3 {
            for k in 0..6 {
                let nv = s.n[6 * a + k] * wq;
                f[12 * a + k] += nv * traction[0];
                f[12 * a + 6 + k] += nv * traction[1];
            }
        }
        if let Some(en) = enrichment {
            let e = en.element.eval(g.point(&l), &s)?;
            for m in 0..4 {
                f[NODAL + m] += wq * en.scale * (traction[0] * e.qstar[0][m] + traction[1] * e.qstar[1][m]);
            }
        }
    }
    Ok(f)
}
