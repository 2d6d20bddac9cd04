//! Exactness of the symmetric triangle rules on areal monomials.

use sge_crack::bell::{quadrature, RuleId};

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn main() {
    for id in RuleId::ALL {
        let rule = quadrature(id);
        let mut worst: f64 = 0.0;
        for p in 0..=id.degree() as u32 {
            for q in 0..=id.degree() as u32 - p {
                let approx: f64 = rule.iter().map(|(l, w)| w * l[0].powi(p as i32) * l[1].powi(q as i32)).sum();
                // ∫ L1^p L2^q dA / A = 2 p! q! / (p + q + 2)!
                let exact = 2.0 * factorial(p) * factorial(q) / factorial(p + q + 2);
                worst = worst.max((approx - exact).abs());
            }
        }
        let wmin = rule.iter().map(|(_, w)| w).fold(f64::INFINITY, f64::min);
        println!("{:>2} points, degree {:>2}: max monomial error {worst:.1e}, min weight {wmin:.4}", rule.len(), id.degree());
    }
}
