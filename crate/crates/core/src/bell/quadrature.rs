//! Fully symmetric quadrature rules on the triangle.
//!
//! Rules are stored as text tables (`rules/triNN.txt`), one point per line
//! as `L1 L2 L3 weight`, with weights normalized to sum to one over the
//! triangle; multiply by the element area at use.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Supported rule sizes, identified by point count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub enum RuleId {
    P13,
    P25,
    P30,
    P37,
}

impl RuleId {
    pub const ALL: [RuleId; 4] = [RuleId::P13, RuleId::P25, RuleId::P30, RuleId::P37];

    pub fn points(self) -> usize {
        match self {
            RuleId::P13 => 13,
            RuleId::P25 => 25,
            RuleId::P30 => 30,
            RuleId::P37 => 37,
        }
    }

    /// Highest total degree integrated exactly.
    pub fn degree(self) -> usize {
        match self {
            RuleId::P13 => 6,
            RuleId::P25 => 10,
            RuleId::P30 => 11,
            RuleId::P37 => 13,
        }
    }

    fn table(self) -> &'static str {
        match self {
            RuleId::P13 => include_str!("rules/tri13.txt"),
            RuleId::P25 => include_str!("rules/tri25.txt"),
            RuleId::P30 => include_str!("rules/tri30.txt"),
            RuleId::P37 => include_str!("rules/tri37.txt"),
        }
    }
}

impl TryFrom<usize> for RuleId {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        match n {
            13 => Ok(RuleId::P13),
            25 => Ok(RuleId::P25),
            30 => Ok(RuleId::P30),
            37 => Ok(RuleId::P37),
            _ => Err(Error::Config(format!(
                "unsupported quadrature rule {n}; expected one of 13, 25, 30, 37"
            ))),
        }
    }
}

impl From<RuleId> for usize {
    fn from(r: RuleId) -> usize {
        r.points()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    /// Parse a rule table. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str, degree: usize) -> Result<Self> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("quadrature line {}: {e}", lineno + 1)))?;
            if vals.len() != 4 {
                return Err(Error::Config(format!(
                    "quadrature line {}: expected 4 columns, found {}",
                    lineno + 1,
                    vals.len()
                )));
            }
            if vals[3] <= 0.0 {
                return Err(Error::Config(format!(
                    "quadrature line {}: non-positive weight {}",
                    lineno + 1,
                    vals[3]
                )));
            }
            if (vals[0] + vals[1] + vals[2] - 1.0).abs() > 1e-14 {
                return Err(Error::Config(format!("quadrature line {}: areal coordinates do not sum to 1", lineno + 1)));
            }
            points.push([vals[0], vals[1], vals[2]]);
            weights.push(vals[3]);
        }
        if points.is_empty() {
            return Err(Error::Config("empty quadrature table".into()));
        }
        Ok(Self { points, weights, degree })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; 3], f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

/// Tabulated rule for `id`, parsed once and cached.
pub fn quadrature(id: RuleId) -> &'static QuadratureRule {
    static CACHE: [OnceLock<QuadratureRule>; 4] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let slot = RuleId::ALL.iter().position(|&r| r == id).unwrap();
    CACHE[slot].get_or_init(|| {
        QuadratureRule::parse(id.table(), id.degree()).expect("embedded quadrature table is valid")
    })
}

/// 5-point Gauss-Legendre rule on [0, 1] as (abscissa, weight) pairs.
pub fn gauss_legendre_5() -> [(f64, f64); 5] {
    const X: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.236_926_885_056_189_1,
        0.478_628_670_499_366_5,
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
    ];
    std::array::from_fn(|i| (0.5 * (X[i] + 1.0), 0.5 * W[i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    // ∫ L1^p L2^q L3^s dA / Area = 2 p! q! s! / (p+q+s+2)!
    fn exact(p: u32, q: u32, s: u32) -> f64 {
        2.0 * factorial(p) * factorial(q) * factorial(s) / factorial(p + q + s + 2)
    }

    #[test]
    fn weights_sum_to_one() {
        for id in RuleId::ALL {
            let r = quadrature(id);
            assert_eq!(r.len(), id.points());
            let s: f64 = r.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-14, "{id:?}: {s}");
        }
    }

    #[test]
    fn monomials_exact_to_rule_degree() {
        for id in RuleId::ALL {
            let r = quadrature(id);
            let d = id.degree() as u32;
            for p in 0..=d {
                for q in 0..=(d - p) {
                    for s in 0..=(d - p - q) {
                        let got: f64 = r
                            .iter()
                            .map(|(l, w)| w * l[0].powi(p as i32) * l[1].powi(q as i32) * l[2].powi(s as i32))
                            .sum();
                        let want = exact(p, q, s);
                        assert!((got - want).abs() < 1e-12 * want.max(1e-3), "{id:?} ({p},{q},{s}): {got} vs {want}");
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_negative_weight_and_bad_ids() {
        let bad = "0.3333333333333333 0.3333333333333333 0.3333333333333334 -0.1\n";
        assert!(QuadratureRule::parse(bad, 1).is_err());
        assert!(RuleId::try_from(12).is_err());
        assert_eq!(RuleId::try_from(37).unwrap(), RuleId::P37);
    }

    #[test]
    fn gauss_legendre_integrates_degree_nine() {
        let gl = gauss_legendre_5();
        for k in 0..=9 {
            let got: f64 = gl.iter().map(|(x, w)| w * x.powi(k)).sum();
            assert!((got - 1.0 / (k as f64 + 1.0)).abs() < 1e-14);
        }
    }
}
