//! Leading r^{3/2} crack-tip fields of the gradient model.
//!
//! The displacement near the tip is
//!
//! ```text
//! u = (1/4μ) Σ K_n Q_1n(r, θ),   v = (1/4μ) Σ K_n Q_2n(r, θ)
//! ```
//!
//! with r, θ measured from the tip, θ counterclockwise from the crack
//! extension line and the crack faces at θ = ±π. Every Q_in has the form
//! r^{3/2} F(θ) where F is a short series in cos(mθ/2), sin(mθ/2) with
//! m ∈ {1, 3, 5}; the coefficients below are the product-to-sum expansions
//! of the trigonometric forms, which keeps the derivatives exact and cheap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::MaterialParams;

/// Loading mode of the symmetric quarter model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "I")]
    I,
    #[serde(rename = "II")]
    II,
}

impl Mode {
    /// Indices of the amplitude factors that belong to this mode.
    pub fn amplitude_indices(self) -> [usize; 2] {
        match self {
            Mode::I => [0, 1],
            Mode::II => [2, 3],
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::I => "I",
            Mode::II => "II",
        })
    }
}

/// Amplitude factors K1..K4 [Pa·m^{-1/2}]; (K1, K2) drive mode I and
/// (K3, K4) mode II.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AmplitudeFactors(pub [f64; 4]);

impl AmplitudeFactors {
    pub const ZERO: AmplitudeFactors = AmplitudeFactors([0.0; 4]);

    /// Mode I amplitudes from the (A1, A2) parametrization of the
    /// Fourier-transform full-field solution.
    pub fn from_mode_i_series(a1: f64, a2: f64, eta: f64) -> Self {
        Self([a1, 6.0 * (a1 - a2) / (17.0 + 8.0 * eta), 0.0, 0.0])
    }

    /// Inverse of [`Self::from_mode_i_series`]: returns (A1, A2).
    pub fn to_mode_i_series(&self, eta: f64) -> (f64, f64) {
        let [k1, k2, _, _] = self.0;
        (k1, k1 - k2 * (17.0 + 8.0 * eta) / 6.0)
    }

    /// Mode II amplitudes from the (B1, B2) parametrization.
    pub fn from_mode_ii_series(b1: f64, b2: f64, eta: f64) -> Self {
        let d = 13.0 + 8.0 * eta;
        Self([0.0, 0.0, 2.0 * b2 / d, b1 - 2.0 * b2 * (3.0 - 2.0 * eta) / d])
    }

    /// Inverse of [`Self::from_mode_ii_series`]: returns (B1, B2).
    pub fn to_mode_ii_series(&self, eta: f64) -> (f64, f64) {
        let [_, _, k3, k4] = self.0;
        let b2 = k3 * (13.0 + 8.0 * eta) / 2.0;
        (k4 + k3 * (3.0 - 2.0 * eta), b2)
    }
}

/// Angular factor F(θ) = Σ a_m cos(mθ/2) + b_m sin(mθ/2), m = 1, 3, 5.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct HalfAngleSeries {
    cos: [f64; 3],
    sin: [f64; 3],
}

impl HalfAngleSeries {
    const ORDERS: [f64; 3] = [0.5, 1.5, 2.5];

    /// (F, F', F'') at the given half-angle harmonics.
    fn eval(&self, cs: &[(f64, f64); 3]) -> (f64, f64, f64) {
        let mut f = 0.0;
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for k in 0..3 {
            let (c, s) = cs[k];
            let w = Self::ORDERS[k];
            let (a, b) = (self.cos[k], self.sin[k]);
            let base = a * c + b * s;
            f += base;
            d1 += w * (b * c - a * s);
            d2 -= w * w * base;
        }
        (f, d1, d2)
    }
}

/// The eight angular factors, indexed [component][n].
fn angular_table(eta: f64) -> [[HalfAngleSeries; 4]; 2] {
    let c = |a: [f64; 3]| HalfAngleSeries { cos: a, sin: [0.0; 3] };
    let s = |b: [f64; 3]| HalfAngleSeries { cos: [0.0; 3], sin: b };
    [
        [
            c([-3.0, 1.0 + 2.0 * eta, 0.0]),
            c([2.0 * eta, -(17.0 + 8.0 * eta) / 6.0, -0.5]),
            s([-3.0 - 6.0 * eta, (13.0 + 4.0 * eta) / 2.0, 1.5]),
            s([0.0, 1.0, 0.0]),
        ],
        [
            s([-3.0, 2.0 * eta - 1.0, 0.0]),
            s([-2.0 * eta, (17.0 + 8.0 * eta) / 6.0, -0.5]),
            c([3.0 - 6.0 * eta, (13.0 + 12.0 * eta) / 2.0, -1.5]),
            c([0.0, -1.0, 0.0]),
        ],
    ]
}

/// Polar angle in (−π, π]; points on the negative x-axis map to +π so the
/// upper crack face is used regardless of the sign of a zero y.
pub fn tip_angle(x: f64, y: f64) -> f64 {
    if y == 0.0 && x < 0.0 {
        std::f64::consts::PI
    } else {
        y.atan2(x)
    }
}

fn harmonics(theta: f64) -> [(f64, f64); 3] {
    let h = 0.5 * theta;
    let (s1, c1) = h.sin_cos();
    // cos/sin of 3h and 5h via angle addition from h and 2h
    let (s2, c2) = theta.sin_cos();
    let (c3, s3) = (c1 * c2 - s1 * s2, s1 * c2 + c1 * s2);
    let (c5, s5) = (c3 * c2 - s3 * s2, s3 * c2 + c3 * s2);
    [(c1, s1), (c3, s3), (c5, s5)]
}

/// Q_in values and Cartesian derivatives at one point, indexed [i][n]
/// with i = 0 for the x-component and i = 1 for the y-component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticEval {
    pub q: [[f64; 4]; 2],
    pub dq: [[[f64; 2]; 4]; 2],
    /// (xx, xy, yy)
    pub ddq: [[[f64; 3]; 4]; 2],
}

impl AsymptoticEval {
    pub const ZERO: AsymptoticEval = AsymptoticEval { q: [[0.0; 4]; 2], dq: [[[0.0; 2]; 4]; 2], ddq: [[[0.0; 3]; 4]; 2] };
}

/// Q_in values only; defined (and zero) at the tip.
pub fn q_values(x: f64, y: f64, eta: f64) -> [[f64; 4]; 2] {
    let r = x.hypot(y);
    if r == 0.0 {
        return [[0.0; 4]; 2];
    }
    let cs = harmonics(tip_angle(x, y));
    let r32 = r * r.sqrt();
    let table = angular_table(eta);
    let mut q = [[0.0; 4]; 2];
    for i in 0..2 {
        for n in 0..4 {
            q[i][n] = r32 * table[i][n].eval(&cs).0;
        }
    }
    q
}

/// Q_in with first and second Cartesian derivatives at offset (x, y) from
/// the tip. The derivatives are singular at the tip itself.
pub fn q_eval(x: f64, y: f64, eta: f64) -> Result<AsymptoticEval> {
    let r = x.hypot(y);
    if r == 0.0 {
        return Err(Error::TipSingularity);
    }
    let theta = tip_angle(x, y);
    let cs = harmonics(theta);
    let (s, c) = theta.sin_cos();
    let sr = r.sqrt();
    let r32 = r * sr;
    let rm12 = 1.0 / sr;
    let table = angular_table(eta);

    let mut out = AsymptoticEval::ZERO;
    for i in 0..2 {
        for n in 0..4 {
            let (f, f1, f2) = table[i][n].eval(&cs);
            out.q[i][n] = r32 * f;
            out.dq[i][n] = [sr * (1.5 * c * f - s * f1), sr * (1.5 * s * f + c * f1)];
            // f_rr, f_r/r + f_θθ/r², f_rθ/r − f_θ/r²
            let a = 0.75 * rm12 * f;
            let b = rm12 * (1.5 * f + f2);
            let m = rm12 * 0.5 * f1;
            out.ddq[i][n] = [
                c * c * a + s * s * b - 2.0 * s * c * m,
                s * c * (a - b) + (c * c - s * s) * m,
                s * s * a + c * c * b + 2.0 * s * c * m,
            ];
        }
    }
    Ok(out)
}

/// Cartesian displacement (u, v) of the asymptotic field for amplitudes `k`.
pub fn displacement(x: f64, y: f64, k: &AmplitudeFactors, m: &MaterialParams) -> [f64; 2] {
    let q = q_values(x, y, m.eta);
    let s = 0.25 / m.mu;
    let mut u = [0.0; 2];
    for i in 0..2 {
        u[i] = s * (0..4).map(|n| k.0[n] * q[i][n]).sum::<f64>();
    }
    u
}

/// Polar displacement components split into the classical Williams-type
/// part and the additional gradient part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarDisplacement {
    /// (u_r, u_θ)
    pub classical: [f64; 2],
    /// (u_r, u_θ)
    pub gradient: [f64; 2],
}

impl PolarDisplacement {
    pub fn total(&self) -> [f64; 2] {
        [self.classical[0] + self.gradient[0], self.classical[1] + self.gradient[1]]
    }

    /// Rotate the total polar displacement at angle θ to Cartesian (u, v).
    pub fn to_cartesian(&self, theta: f64) -> [f64; 2] {
        let [ur, ut] = self.total();
        let (s, c) = theta.sin_cos();
        [ur * c - ut * s, ur * s + ut * c]
    }
}

/// Polar form of the mode I (K1, K2) or mode II (K3, K4) field.
pub fn polar_asymptotic(mode: Mode, r: f64, theta: f64, k: &AmplitudeFactors, m: &MaterialParams) -> PolarDisplacement {
    let eta = m.eta;
    let s = r.max(0.0).powf(1.5) / (4.0 * m.mu);
    let h = 0.5 * theta;
    let (c1, s1) = (h.cos(), h.sin());
    let (c3, s3) = ((3.0 * h).cos(), (3.0 * h).sin());
    let (c5, s5) = ((5.0 * h).cos(), (5.0 * h).sin());
    match mode {
        Mode::I => {
            let [k1, k2, _, _] = k.0;
            PolarDisplacement {
                classical: [
                    k1 * s * ((2.0 * eta - 3.0) * c1 + c5),
                    k1 * s * ((2.0 * eta + 3.0) * s1 - s5),
                ],
                gradient: [
                    k2 * s * ((4.0 * eta - 1.0) / 2.0 * c3 - (8.0 * eta + 17.0) / 6.0 * c5),
                    k2 * s * (-(4.0 * eta + 1.0) / 2.0 * s3 + (8.0 * eta + 17.0) / 6.0 * s5),
                ],
            }
        }
        Mode::II => {
            let [_, _, k3, k4] = k.0;
            PolarDisplacement {
                classical: [
                    k3 * s * ((3.0 - 2.0 * eta) * s1 - 5.0 * s5),
                    k3 * s * ((3.0 + 2.0 * eta) * c1 - 5.0 * c5),
                ],
                gradient: [
                    k4 * s * s1 + k3 * s * (1.5 * (1.0 - 4.0 * eta) * s3 + (23.0 + 8.0 * eta) / 2.0 * s5),
                    -k4 * s * c1 - k3 * s * (1.5 * (1.0 + 4.0 * eta) * c3 - (23.0 + 8.0 * eta) / 2.0 * c5),
                ],
            }
        }
    }
}

/// Crack-face opening at distance |x| behind the tip (θ = π).
pub fn crack_face_opening(x: f64, k: &AmplitudeFactors, m: &MaterialParams) -> f64 {
    -x.abs().powf(1.5) / (2.0 * m.mu) * (1.0 + m.eta) * (k.0[0] + 5.0 / 3.0 * k.0[1])
}

/// Energy release rates (J_I, J_II) [Pa·m] from the amplitude factors.
pub fn j_integral(k: &AmplitudeFactors, m: &MaterialParams) -> Result<(f64, f64)> {
    let eta = m.eta;
    if eta <= 1.0 {
        return Err(Error::InvalidParameter(format!("Kolosov constant must exceed 1, got {eta}")));
    }
    let [k1, k2, k3, k4] = k.0;
    let pre = (1.0 + eta) / (8.0 * m.mu) * std::f64::consts::PI * m.ell * m.ell;
    let ji = pre * ((3.0 * k1 + k2).powi(2) + 8.0 * k2 * k2 * (eta + 2.0));
    let jii = pre * (72.0 * k3 * k3 * (eta + 2.0) + 9.0 * k4 * k4 / (4.0 * (eta * eta - 1.0)));
    Ok((ji, jii))
}

/// Classical reference energy release rate K0²(1+η)/(8μ) with K0 = t√(π d_min).
pub fn reference_j(m: &MaterialParams, t: f64, d_min: f64) -> f64 {
    let k0 = t * (std::f64::consts::PI * d_min).sqrt();
    k0 * k0 * (1.0 + m.eta) / (8.0 * m.mu)
}

/// J normalized by [`reference_j`].
pub fn normalized_j(j: f64, m: &MaterialParams, t: f64, d_min: f64) -> f64 {
    j / reference_j(m, t, d_min)
}

/// Classical energy release rate of a centre crack of half-length `d` in a
/// plate of half-width `half_width` under remote stress `t`, with the secant
/// finite-width correction.
pub fn classical_center_crack_j(m: &MaterialParams, t: f64, d: f64, half_width: f64) -> f64 {
    let f = (1.0 / (std::f64::consts::PI * d / (2.0 * half_width)).cos()).sqrt();
    let k = t * (std::f64::consts::PI * d).sqrt() * f;
    k * k * (1.0 + m.eta) / (8.0 * m.mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Direct transcription of the trigonometric forms, used as an oracle.
    fn q_direct(r: f64, t: f64, eta: f64) -> [[f64; 4]; 2] {
        let (c, s) = (f64::cos, f64::sin);
        let h = t / 2.0;
        let r32 = r.powf(1.5);
        [
            [
                r32 * c(h) * (-4.0 - 2.0 * eta + 2.0 * (1.0 + 2.0 * eta) * c(t)),
                r32 * c(h) * ((7.0 + 10.0 * eta) / 3.0 - (14.0 + 8.0 * eta) / 3.0 * c(t) - c(2.0 * t)),
                r32 * s(h) * (5.0 - 4.0 * eta + 4.0 * (4.0 + eta) * c(t) + 3.0 * c(2.0 * t)),
                r32 * s(h) * (1.0 + 2.0 * c(t)),
            ],
            [
                r32 * s(h) * (-4.0 + 2.0 * eta - 2.0 * (1.0 - 2.0 * eta) * c(t)),
                r32 * s(h) * ((7.0 - 2.0 * eta) / 3.0 + (14.0 + 8.0 * eta) / 3.0 * c(t) - c(2.0 * t)),
                r32 * c(h) * (-5.0 - 12.0 * eta + 4.0 * (4.0 + 3.0 * eta) * c(t) - 3.0 * c(2.0 * t)),
                r32 * c(h) * (1.0 - 2.0 * c(t)),
            ],
        ]
    }

    #[test]
    fn series_matches_trigonometric_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let r = rng.gen_range(0.01..3.0);
            let t: f64 = rng.gen_range(-3.1..3.14159);
            let eta = rng.gen_range(1.0..3.0);
            let q = q_values(r * t.cos(), r * t.sin(), eta);
            let d = q_direct(r, t, eta);
            for i in 0..2 {
                for n in 0..4 {
                    assert!((q[i][n] - d[i][n]).abs() < 1e-12 * (1.0 + d[i][n].abs()) * r.powf(1.5));
                }
            }
        }
    }

    #[test]
    fn vanishing_factors_on_the_ligament() {
        let q = q_values(0.7, 0.0, 1.8);
        assert_eq!(q[0][2], 0.0);
        assert_eq!(q[1][0], 0.0);
    }

    #[test]
    fn tip_derivatives_are_an_error() {
        assert!(matches!(q_eval(0.0, 0.0, 1.8), Err(Error::TipSingularity)));
        assert_eq!(q_values(0.0, 0.0, 1.8), [[0.0; 4]; 2]);
    }

    #[test]
    fn negative_zero_y_uses_upper_face() {
        let a = q_values(-0.5, 0.0, 1.8);
        let b = q_values(-0.5, -0.0, 1.8);
        assert_eq!(a, b);
    }

    #[test]
    fn crack_face_closed_form() {
        let m = MaterialParams::new(1e9, 0.3, 0.01).unwrap();
        let k = AmplitudeFactors([-4.1692e6, -1.3455e6, 0.0, 0.0]);
        for x in [-1e-3, -0.05, -0.3] {
            let v = displacement(x, 0.0, &k, &m)[1];
            let w = crack_face_opening(x, &k, &m);
            assert!((v - w).abs() < 1e-12 * w.abs());
        }
    }

    #[test]
    fn mode_ii_pure_gradient_polar_form() {
        let m = MaterialParams::new(1.0, 0.25, 0.1).unwrap();
        let k = AmplitudeFactors([0.0, 0.0, 0.0, 1.0]);
        let (r, t): (f64, f64) = (0.3, 0.8);
        let p = polar_asymptotic(Mode::II, r, t, &k, &m).total();
        let s = r.powf(1.5) / (4.0 * m.mu);
        assert!((p[0] - s * (t / 2.0).sin()).abs() < 1e-15);
        assert!((p[1] + s * (t / 2.0).cos()).abs() < 1e-15);
    }

    #[test]
    fn mode_i_classical_hoop_vanishes_ahead_of_tip() {
        let m = MaterialParams::new(1.0, 0.3, 0.1).unwrap();
        let p = polar_asymptotic(Mode::I, 0.4, 0.0, &AmplitudeFactors([1.0, 0.0, 0.0, 0.0]), &m);
        assert_eq!(p.total()[1], 0.0);
    }

    #[test]
    fn polar_and_cartesian_agree() {
        let m = MaterialParams::new(1e9, 0.3, 0.01).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let r = rng.gen_range(1e-3..2.0);
            let t = rng.gen_range(-3.14..3.14);
            for (mode, k) in [
                (Mode::I, AmplitudeFactors([rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), 0.0, 0.0])),
                (Mode::II, AmplitudeFactors([0.0, 0.0, rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)])),
            ] {
                let a = polar_asymptotic(mode, r, t, &k, &m).to_cartesian(t);
                let b = displacement(r * t.cos(), r * t.sin(), &k, &m);
                let scale = r.powf(1.5) / m.mu * 50.0;
                for i in 0..2 {
                    assert!((a[i] - b[i]).abs() < 1e-12 * scale, "{mode:?}");
                }
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let r = rng.gen_range(0.05..2.0);
            let t = rng.gen_range(-3.0..3.0);
            let (x, y) = (r * f64::cos(t), r * f64::sin(t));
            let eta = 1.8;
            let e = q_eval(x, y, eta).unwrap();
            let h = 1e-5 * r;
            let px = q_eval(x + h, y, eta).unwrap();
            let mx = q_eval(x - h, y, eta).unwrap();
            let py = q_eval(x, y + h, eta).unwrap();
            let my = q_eval(x, y - h, eta).unwrap();
            for i in 0..2 {
                for n in 0..4 {
                    let s1 = e.dq[i][n][0].abs().max(e.dq[i][n][1].abs()).max(r.sqrt());
                    let fx = (px.q[i][n] - mx.q[i][n]) / (2.0 * h);
                    let fy = (py.q[i][n] - my.q[i][n]) / (2.0 * h);
                    assert!((fx - e.dq[i][n][0]).abs() < 1e-6 * s1);
                    assert!((fy - e.dq[i][n][1]).abs() < 1e-6 * s1);
                    let s2 = e.ddq[i][n].iter().fold(1.0 / r.sqrt(), |a, v| a.max(v.abs()));
                    let fxx = (px.dq[i][n][0] - mx.dq[i][n][0]) / (2.0 * h);
                    let fxy = (py.dq[i][n][0] - my.dq[i][n][0]) / (2.0 * h);
                    let fyx = (px.dq[i][n][1] - mx.dq[i][n][1]) / (2.0 * h);
                    let fyy = (py.dq[i][n][1] - my.dq[i][n][1]) / (2.0 * h);
                    assert!((fxx - e.ddq[i][n][0]).abs() < 1e-6 * s2);
                    assert!((fxy - e.ddq[i][n][1]).abs() < 1e-6 * s2);
                    assert!((fyx - e.ddq[i][n][1]).abs() < 1e-6 * s2);
                    assert!((fyy - e.ddq[i][n][2]).abs() < 1e-6 * s2);
                }
            }
        }
    }

    #[test]
    fn scaling_and_parity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let r = rng.gen_range(1e-3..1.0);
            let t: f64 = rng.gen_range(0.01..3.1);
            let eta = rng.gen_range(1.0..3.0);
            let a = q_eval(r * t.cos(), r * t.sin(), eta).unwrap();
            let b = q_eval(4.0 * r * t.cos(), 4.0 * r * t.sin(), eta).unwrap();
            let m = q_eval(r * t.cos(), -r * t.sin(), eta).unwrap();
            for i in 0..2 {
                for n in 0..4 {
                    let qs = a.q[i][n].abs().max(r.powf(1.5));
                    assert!((b.q[i][n] - 8.0 * a.q[i][n]).abs() < 1e-12 * 8.0 * qs);
                    for k in 0..3 {
                        let ds = a.ddq[i][n].iter().fold(1.0 / r.sqrt(), |s, v| s.max(v.abs()));
                        assert!((b.ddq[i][n][k] - 0.5 * a.ddq[i][n][k]).abs() < 1e-12 * ds);
                    }
                    // Q11, Q12, Q23, Q24 even in θ; the rest odd.
                    let even = (i == 0 && n < 2) || (i == 1 && n >= 2);
                    let sign = if even { 1.0 } else { -1.0 };
                    assert!((m.q[i][n] - sign * a.q[i][n]).abs() < 1e-12 * qs);
                }
            }
        }
    }

    #[test]
    fn tip_strain_vanishes() {
        let e = q_eval(1e-10, 3e-11, 1.8).unwrap();
        for i in 0..2 {
            for n in 0..4 {
                assert!(e.dq[i][n][0].abs() < 1e-3 && e.dq[i][n][1].abs() < 1e-3);
            }
        }
    }

    #[test]
    fn j_values() {
        let m = MaterialParams::new(1e9, 0.3, 0.01).unwrap();
        assert_eq!(j_integral(&AmplitudeFactors::ZERO, &m).unwrap(), (0.0, 0.0));
        let (ji, jii) = j_integral(&AmplitudeFactors([1.0, 0.0, 0.0, 0.0]), &m).unwrap();
        let want = 2.8 / (8.0 * m.mu) * std::f64::consts::PI * 1e-4 * 9.0;
        assert!((ji - want).abs() < 1e-14 * want);
        assert_eq!(jii, 0.0);
    }

    #[test]
    fn reference_j_plane_strain_identity() {
        let m = MaterialParams::new(1e9, 0.3, 0.01).unwrap();
        let (t, dmin) = (1e6, 0.025);
        let k0 = t * (std::f64::consts::PI * dmin).sqrt();
        let alt = k0 * k0 * (1.0 - m.nu * m.nu) / m.e;
        assert!((reference_j(&m, t, dmin) - alt).abs() < 1e-12 * alt);
        assert!((normalized_j(alt, &m, t, dmin) - 1.0).abs() < 1e-12);
        assert_eq!(normalized_j(0.0, &m, t, dmin), 0.0);
    }

    #[test]
    fn series_conversions_round_trip() {
        let eta = 1.8;
        let k = AmplitudeFactors::from_mode_i_series(1.5, -0.5, eta);
        let (a1, a2) = k.to_mode_i_series(eta);
        assert!((a1 - 1.5).abs() < 1e-14 && (a2 + 0.5).abs() < 1e-14);
        let k = AmplitudeFactors::from_mode_ii_series(0.7, 2.0, eta);
        let (b1, b2) = k.to_mode_ii_series(eta);
        assert!((b1 - 0.7).abs() < 1e-14 && (b2 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn classical_parts_satisfy_navier() {
        // μΔu + (λ+μ)∇(∇·u) = 0 by fourth-order central differences
        let m = MaterialParams::new(1e9, 0.3, 0.01).unwrap();
        for (mode, k) in [(Mode::I, [1.0, 0.0, 0.0, 0.0]), (Mode::II, [0.0, 0.0, 1.0, 0.0])] {
            let k = AmplitudeFactors(k);
            let field = |x: f64, y: f64| {
                let th = tip_angle(x, y);
                let p = polar_asymptotic(mode, x.hypot(y), th, &k, &m);
                PolarDisplacement { classical: p.classical, gradient: [0.0; 2] }.to_cartesian(th)
            };
            for (r, th) in [(0.3, 0.4), (0.05, 2.5), (1.0, -1.2), (0.2, -2.9)] {
                let (x, y): (f64, f64) = (r * f64::cos(th), r * f64::sin(th));
                let h = 1e-3 * r;
                let w = [(-2.0, -1.0 / 12.0), (-1.0, 16.0 / 12.0), (0.0, -30.0 / 12.0), (1.0, 16.0 / 12.0), (2.0, -1.0 / 12.0)];
                let d2 = |dx: f64, dy: f64, i: usize| -> f64 {
                    w.iter().map(|(o, c)| c * field(x + o * h * dx, y + o * h * dy)[i]).sum::<f64>() / (h * h)
                };
                // mixed derivative from the 4-point stencil, refined by Richardson
                let dxy = |i: usize, h: f64| {
                    (field(x + h, y + h)[i] - field(x + h, y - h)[i] - field(x - h, y + h)[i] + field(x - h, y - h)[i]) / (4.0 * h * h)
                };
                let mixed = |i: usize| (4.0 * dxy(i, h) - dxy(i, 2.0 * h)) / 3.0;
                let (uxx, uyy, vxx, vyy) = (d2(1.0, 0.0, 0), d2(0.0, 1.0, 0), d2(1.0, 0.0, 1), d2(0.0, 1.0, 1));
                let (uxy, vxy) = (mixed(0), mixed(1));
                let lm = m.lambda + m.mu;
                let rx = m.mu * (uxx + uyy) + lm * (uxx + vxy);
                let ry = m.mu * (vxx + vyy) + lm * (uxy + vyy);
                let scale = (m.lambda + 2.0 * m.mu) * [uxx, uyy, vxx, vyy, uxy, vxy].iter().fold(0.0f64, |a, v| a.max(v.abs()));
                assert!(rx.abs() < 1e-6 * scale && ry.abs() < 1e-6 * scale, "{mode} r={r} θ={th}: {rx:e} {ry:e} vs {scale:e}");
            }
        }
    }
}
