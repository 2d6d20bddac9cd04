//! Bell triangle: areal coordinates, the 18 reduced-quintic shape functions
//! with analytic first and second Cartesian derivatives, and triangle
//! quadrature.
//!
//! The coefficients r_ij that couple the two edge-correction monomials are
//!
//! ```text
//! r_ij = -(b_i b_j + c_i c_j) / (b_i^2 + c_i^2)
//! ```
//!
//! i.e. the projection of edge j onto edge i, normalized by the squared
//! length of edge i (edge i is the side opposite node i). This choice makes
//! the element reproduce every complete quartic, which is checked in the
//! unit tests below and in the patch tests.

mod quadrature;

pub use quadrature::{gauss_legendre_5, quadrature, QuadratureRule, RuleId};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Number of shape functions per element (6 per node).
pub const NSHAPE: usize = 18;

/// Affine data of a straight-sided triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleGeometry {
    pub nodes: [Point; 3],
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub c: [f64; 3],
    /// Signed doubled area.
    pub delta: f64,
}

impl TriangleGeometry {
    pub fn new(nodes: [Point; 3]) -> Result<Self> {
        let mut a = [0.0; 3];
        let mut b = [0.0; 3];
        let mut c = [0.0; 3];
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let [xj, yj] = nodes[j];
            let [xk, yk] = nodes[k];
            a[i] = xj * yk - xk * yj;
            b[i] = yj - yk;
            c[i] = xk - xj;
        }
        let [x1, y1] = nodes[0];
        let [x2, y2] = nodes[1];
        let [x3, y3] = nodes[2];
        let delta = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1);
        let g = Self { nodes, a, b, c, delta };
        let h = g.diameter();
        let tol = 1e-12 * h * h;
        if !(delta.abs() >= tol) || h == 0.0 {
            return Err(Error::DegenerateElement { delta, tol });
        }
        Ok(g)
    }

    /// Longest edge length.
    pub fn diameter(&self) -> f64 {
        (0..3)
            .map(|i| {
                let p = self.nodes[i];
                let q = self.nodes[(i + 1) % 3];
                (p[0] - q[0]).hypot(p[1] - q[1])
            })
            .fold(0.0, f64::max)
    }

    pub fn area(&self) -> f64 {
        0.5 * self.delta.abs()
    }

    /// Areal coordinates of a Cartesian point; points outside the element
    /// give coordinates outside [0, 1].
    pub fn areal_coords(&self, p: Point) -> [f64; 3] {
        let mut l = [0.0; 3];
        for i in 0..3 {
            l[i] = (self.a[i] + self.b[i] * p[0] + self.c[i] * p[1]) / self.delta;
        }
        l
    }

    /// Cartesian point of an areal triple.
    pub fn point(&self, l: &[f64; 3]) -> Point {
        let mut p = [0.0; 2];
        for i in 0..3 {
            p[0] += l[i] * self.nodes[i][0];
            p[1] += l[i] * self.nodes[i][1];
        }
        p
    }

    /// Evaluate all 18 shape functions and their derivatives at `l`.
    pub fn shape_eval(&self, l: &[f64; 3]) -> ShapeEval {
        shape_eval(self, l)
    }
}

/// Free-function form of [`TriangleGeometry::new`].
pub fn triangle_geometry(nodes: [Point; 3]) -> Result<TriangleGeometry> {
    TriangleGeometry::new(nodes)
}

/// Free-function form of [`TriangleGeometry::areal_coords`].
pub fn areal_coords(g: &TriangleGeometry, p: Point) -> [f64; 3] {
    g.areal_coords(p)
}

/// Shape function values and Cartesian derivatives at one point.
///
/// Index `6 * node + k` with k = 0..6 addresses the functions attached to the
/// value, ∂x, ∂y, ∂xx, ∂xy, ∂yy degrees of freedom of that node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeEval {
    pub n: [f64; NSHAPE],
    pub dn: [[f64; 2]; NSHAPE],
    /// (xx, xy, yy)
    pub ddn: [[f64; 3]; NSHAPE],
}

impl ShapeEval {
    /// Interpolate one scalar component from its 18 nodal values.
    pub fn interpolate(&self, dofs: &[f64; NSHAPE]) -> ScalarField {
        let mut f = ScalarField::default();
        for i in 0..NSHAPE {
            let w = dofs[i];
            f.value += w * self.n[i];
            f.grad[0] += w * self.dn[i][0];
            f.grad[1] += w * self.dn[i][1];
            for k in 0..3 {
                f.hess[k] += w * self.ddn[i][k];
            }
        }
        f
    }
}

/// A scalar field with its gradient and (xx, xy, yy) Hessian at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScalarField {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [f64; 3],
}

// Value, gradient and Hessian (with respect to L1, L2, L3 treated as
// independent variables) of a polynomial in areal coordinates.
#[derive(Clone, Copy, Default)]
struct ArealJet {
    v: f64,
    g: [f64; 3],
    h: [[f64; 3]; 3],
}

impl ArealJet {
    fn add_monomial(&mut self, coef: f64, e: [i32; 3], l: &[f64; 3]) {
        if coef == 0.0 {
            return;
        }
        let pw = |x: f64, n: i32| if n < 0 { 0.0 } else { x.powi(n) };
        let p: [f64; 3] = std::array::from_fn(|i| pw(l[i], e[i]));
        let p1: [f64; 3] = std::array::from_fn(|i| e[i] as f64 * pw(l[i], e[i] - 1));
        let p2: [f64; 3] = std::array::from_fn(|i| (e[i] * (e[i] - 1)) as f64 * pw(l[i], e[i] - 2));
        self.v += coef * p[0] * p[1] * p[2];
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            self.g[i] += coef * p1[i] * p[j] * p[k];
            self.h[i][i] += coef * p2[i] * p[j] * p[k];
            let off = coef * p1[i] * p1[j] * p[k];
            self.h[i][j] += off;
            self.h[j][i] += off;
        }
    }
}

/// Evaluate the 18 Bell shape functions with first and second Cartesian
/// derivatives at areal coordinates `l`.
pub fn shape_eval(g: &TriangleGeometry, l: &[f64; 3]) -> ShapeEval {
    let mut out = ShapeEval { n: [0.0; NSHAPE], dn: [[0.0; 2]; NSHAPE], ddn: [[0.0; 3]; NSHAPE] };
    let inv = 1.0 / g.delta;
    let bx: [f64; 3] = std::array::from_fn(|i| g.b[i] * inv);
    let cy: [f64; 3] = std::array::from_fn(|i| g.c[i] * inv);

    for node in 0..3 {
        let jets = node_functions(g, node, l);
        for (k, jet) in jets.iter().enumerate() {
            let idx = 6 * node + k;
            out.n[idx] = jet.v;
            let mut dx = 0.0;
            let mut dy = 0.0;
            for i in 0..3 {
                dx += bx[i] * jet.g[i];
                dy += cy[i] * jet.g[i];
            }
            out.dn[idx] = [dx, dy];
            let mut xx = 0.0;
            let mut xy = 0.0;
            let mut yy = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    let h = jet.h[i][j];
                    xx += bx[i] * bx[j] * h;
                    xy += bx[i] * cy[j] * h;
                    yy += cy[i] * cy[j] * h;
                }
            }
            out.ddn[idx] = [xx, xy, yy];
        }
    }
    out
}

/// The six functions attached to `node`, obtained from the node-1 formulas
/// by cyclic relabelling (1, 2, 3) -> (node, node+1, node+2).
fn node_functions(g: &TriangleGeometry, node: usize, l: &[f64; 3]) -> [ArealJet; 6] {
    let p = [node, (node + 1) % 3, (node + 2) % 3];
    let (b1, b2, b3) = (g.b[p[0]], g.b[p[1]], g.b[p[2]]);
    let (c1, c2, c3) = (g.c[p[0]], g.c[p[1]], g.c[p[2]]);
    let r21 = -(b2 * b1 + c2 * c1) / (b2 * b2 + c2 * c2);
    let r31 = -(b3 * b1 + c3 * c1) / (b3 * b3 + c3 * c3);

    // Exponents are given in local order (L1, L2, L3) and mapped to global slots.
    let map = |e: [i32; 3]| {
        let mut out = [0; 3];
        for k in 0..3 {
            out[p[k]] = e[k];
        }
        out
    };
    let e400_1 = map([4, 1, 0]);
    let e401 = map([4, 0, 1]);
    let e320 = map([3, 2, 0]);
    let e302 = map([3, 0, 2]);
    let e311 = map([3, 1, 1]);
    let e212 = map([2, 1, 2]);
    let e221 = map([2, 2, 1]);

    let mut f = [ArealJet::default(); 6];
    // value
    let j = &mut f[0];
    j.add_monomial(1.0, map([5, 0, 0]), l);
    j.add_monomial(5.0, e400_1, l);
    j.add_monomial(5.0, e401, l);
    j.add_monomial(10.0, e320, l);
    j.add_monomial(10.0, e302, l);
    j.add_monomial(20.0, e311, l);
    j.add_monomial(30.0 * r21, e212, l);
    j.add_monomial(30.0 * r31, e221, l);
    // ∂x
    let j = &mut f[1];
    j.add_monomial(c3, e400_1, l);
    j.add_monomial(-c2, e401, l);
    j.add_monomial(4.0 * c3, e320, l);
    j.add_monomial(-4.0 * c2, e302, l);
    j.add_monomial(4.0 * (c3 - c2), e311, l);
    j.add_monomial(-(3.0 * c1 + 15.0 * r21 * c2), e212, l);
    j.add_monomial(3.0 * c1 + 15.0 * r31 * c3, e221, l);
    // ∂y
    let j = &mut f[2];
    j.add_monomial(-b3, e400_1, l);
    j.add_monomial(b2, e401, l);
    j.add_monomial(-4.0 * b3, e320, l);
    j.add_monomial(4.0 * b2, e302, l);
    j.add_monomial(4.0 * (b2 - b3), e311, l);
    j.add_monomial(3.0 * b1 + 15.0 * r21 * b2, e212, l);
    j.add_monomial(-(3.0 * b1 + 15.0 * r31 * b3), e221, l);
    // ∂xx
    let j = &mut f[3];
    j.add_monomial(0.5 * c3 * c3, e320, l);
    j.add_monomial(0.5 * c2 * c2, e302, l);
    j.add_monomial(-c2 * c3, e311, l);
    j.add_monomial(c1 * c2 + 2.5 * r21 * c2 * c2, e212, l);
    j.add_monomial(c1 * c3 + 2.5 * r31 * c3 * c3, e221, l);
    // ∂xy
    let j = &mut f[4];
    j.add_monomial(-b3 * c3, e320, l);
    j.add_monomial(-b2 * c2, e302, l);
    j.add_monomial(b2 * c3 + b3 * c2, e311, l);
    j.add_monomial(-(b1 * c2 + b2 * c1 + 5.0 * r21 * b2 * c2), e212, l);
    j.add_monomial(-(b1 * c3 + b3 * c1 + 5.0 * r31 * b3 * c3), e221, l);
    // ∂yy
    let j = &mut f[5];
    j.add_monomial(0.5 * b3 * b3, e320, l);
    j.add_monomial(0.5 * b2 * b2, e302, l);
    j.add_monomial(-b2 * b3, e311, l);
    j.add_monomial(b1 * b2 + 2.5 * r21 * b2 * b2, e212, l);
    j.add_monomial(b1 * b3 + 2.5 * r31 * b3 * b3, e221, l);
    f
}
