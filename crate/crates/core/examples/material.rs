//! Plane-strain constitutive matrices of the simplified gradient model.

use sge_crack::MaterialParams;

fn main() -> sge_crack::Result<()> {
    let m = MaterialParams::new(200e9, 0.3, 1e-5)?;
    println!("λ = {:.4e} Pa, μ = {:.4e} Pa, η = {}", m.lambda, m.mu, m.eta);
    let cm = m.constitutive();
    println!("C (Pa):");
    for row in cm.c {
        println!("  {}", row.map(|v| format!("{v:>11.4e}")).join(" "));
    }
    println!("A = ℓ²·pattern (Pa·m²):");
    for row in cm.a {
        println!("  {}", row.map(|v| format!("{v:>10.3e}")).join(" "));
    }
    // uniaxial strain and a linear strain gradient
    let tau = cm.stress(&[1e-3, 0.0, 0.0]);
    let mu = cm.double_stress(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    println!("τ for ε11 = 1e-3: {tau:?}");
    println!("μ for ε11,1 = 1 /m: {mu:?}");
    Ok(())
}
