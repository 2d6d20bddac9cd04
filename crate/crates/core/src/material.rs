//! Isotropic material parameters and the constitutive matrices of the
//! single-length-scale gradient model (gradient moduli = ℓ² × classical moduli).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Elastic constants of the plane-strain model.
///
/// Only `e`, `nu` and `ell` are independent; the remaining fields are
/// derived on construction and kept for convenience.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaterialParams {
    /// Young's modulus [Pa].
    pub e: f64,
    /// Poisson ratio.
    pub nu: f64,
    /// First Lamé constant [Pa].
    pub lambda: f64,
    /// Shear modulus [Pa].
    pub mu: f64,
    /// Plane-strain Kolosov constant 3 − 4ν.
    pub eta: f64,
    /// Length scale parameter [m].
    pub ell: f64,
}

impl MaterialParams {
    pub fn new(e: f64, nu: f64, ell: f64) -> Result<Self> {
        if !(e.is_finite() && e > 0.0) {
            return Err(Error::InvalidParameter(format!("Young's modulus must be positive, got {e}")));
        }
        if !(nu.is_finite() && (0.0..0.5).contains(&nu)) {
            return Err(Error::InvalidParameter(format!("Poisson ratio must lie in [0, 0.5), got {nu}")));
        }
        if !(ell.is_finite() && ell >= 0.0) {
            return Err(Error::InvalidParameter(format!("length scale must be non-negative, got {ell}")));
        }
        Ok(Self {
            e,
            nu,
            lambda: e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)),
            mu: e / (2.0 * (1.0 + nu)),
            eta: 3.0 - 4.0 * nu,
            ell,
        })
    }

    /// Same elastic constants with a different length scale.
    pub fn with_ell(&self, ell: f64) -> Result<Self> {
        Self::new(self.e, self.nu, ell)
    }

    pub fn constitutive(&self) -> ConstitutiveMatrices {
        ConstitutiveMatrices::new(self)
    }
}

/// Material input as it appears in run configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialInput {
    #[serde(rename = "E")]
    pub e: f64,
    pub nu: f64,
    pub ell: f64,
}

impl TryFrom<MaterialInput> for MaterialParams {
    type Error = Error;

    fn try_from(m: MaterialInput) -> Result<Self> {
        MaterialParams::new(m.e, m.nu, m.ell)
    }
}

/// `c` maps Voigt strain (ε11, ε22, 2ε12) to Cauchy stress (τ11, τ22, τ12).
/// `a` maps the strain gradient (ε11,1, ε11,2, ε22,1, ε22,2, 2ε12,1, 2ε12,2)
/// to double stress (μ111, μ112, μ221, μ222, μ121, μ122).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstitutiveMatrices {
    pub c: [[f64; 3]; 3],
    pub a: [[f64; 6]; 6],
}

impl ConstitutiveMatrices {
    pub fn new(m: &MaterialParams) -> Self {
        let (l, mu) = (m.lambda, m.mu);
        let d = l + 2.0 * mu;
        let c = [[d, l, 0.0], [l, d, 0.0], [0.0, 0.0, mu]];
        let s = m.ell * m.ell;
        let a = [
            [s * d, 0.0, s * l, 0.0, 0.0, 0.0],
            [0.0, s * d, 0.0, s * l, 0.0, 0.0],
            [s * l, 0.0, s * d, 0.0, 0.0, 0.0],
            [0.0, s * l, 0.0, s * d, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, s * mu, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, s * mu],
        ];
        Self { c, a }
    }

    pub fn stress(&self, strain: &[f64; 3]) -> [f64; 3] {
        mat_vec(&self.c, strain)
    }

    pub fn double_stress(&self, kappa: &[f64; 6]) -> [f64; 6] {
        mat_vec(&self.a, kappa)
    }
}

fn mat_vec<const N: usize>(m: &[[f64; N]; N], v: &[f64; N]) -> [f64; N] {
    let mut out = [0.0; N];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_material() {
        let m = MaterialParams::new(1e9, 0.3, 0.01).unwrap();
        assert!((m.eta - 1.8).abs() < 1e-15);
        assert!((m.mu - 0.384_615_384_615e9).abs() < 1.0);
        assert!((m.lambda - 0.576_923_076_923e9).abs() < 1.0);
        let c = m.constitutive();
        assert!((c.c[0][0] - 1.346_153_846_15e9).abs() < 10.0);
    }

    #[test]
    fn zero_poisson_decouples_lambda() {
        let m = MaterialParams::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(m.lambda, 0.0);
        assert_eq!(m.mu, 0.5);
    }

    #[test]
    fn zero_length_scale_gives_zero_gradient_matrix() {
        let c = MaterialParams::new(2.0, 0.25, 0.0).unwrap().constitutive();
        assert!(c.a.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(MaterialParams::new(0.0, 0.3, 0.1).is_err());
        assert!(MaterialParams::new(1.0, 0.5, 0.1).is_err());
        assert!(MaterialParams::new(1.0, -0.1, 0.1).is_err());
        assert!(MaterialParams::new(1.0, 0.3, -1e-3).is_err());
        assert!(MaterialParams::new(f64::NAN, 0.3, 0.1).is_err());
    }

    #[test]
    fn matrices_are_symmetric() {
        let c = MaterialParams::new(3.0, 0.2, 0.4).unwrap().constitutive();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(c.c[i][j], c.c[j][i]);
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(c.a[i][j], c.a[j][i]);
            }
        }
    }

    proptest! {
        #[test]
        fn quadratic_forms_nonnegative(
            e in 1e3f64..1e12, nu in 0.0f64..0.499, ell in 0.0f64..1.0,
            eps in prop::array::uniform3(-1.0f64..1.0),
            kap in prop::array::uniform6(-1.0f64..1.0),
        ) {
            let c = MaterialParams::new(e, nu, ell).unwrap().constitutive();
            let s = c.stress(&eps);
            let w1: f64 = s.iter().zip(&eps).map(|(a, b)| a * b).sum();
            prop_assert!(w1 >= -1e-9 * e);
            let m = c.double_stress(&kap);
            let w2: f64 = m.iter().zip(&kap).map(|(a, b)| a * b).sum();
            prop_assert!(w2 >= -1e-9 * e);
        }

        #[test]
        fn double_stress_is_ell_squared_times_stress_gradient(
            nu in 0.0f64..0.49, ell in 0.0f64..0.5,
            kap in prop::array::uniform6(-1.0f64..1.0),
        ) {
            // Split κ into the x- and y-gradients of the Voigt strain and apply c to each.
            let m = MaterialParams::new(1.0, nu, ell).unwrap();
            let c = m.constitutive();
            let tx = c.stress(&[kap[0], kap[2], kap[4]]);
            let ty = c.stress(&[kap[1], kap[3], kap[5]]);
            let expected = [tx[0], ty[0], tx[1], ty[1], tx[2], ty[2]].map(|v| v * ell * ell);
            let got = c.double_stress(&kap);
            for (g, e) in got.iter().zip(&expected) {
                prop_assert!((g - e).abs() < 1e-12);
            }
        }
    }
}
