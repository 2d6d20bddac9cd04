//! Near-tip asymptotic displacement, its polar form, the crack-face opening
//! and the energy release rate for given amplitude factors.

use sge_crack::asymptotics::{crack_face_opening, displacement, j_integral, polar_asymptotic, q_eval, AmplitudeFactors};
use sge_crack::{MaterialParams, Mode};

fn main() -> sge_crack::Result<()> {
    let m = MaterialParams::new(1e9, 0.3, 0.02)?;
    let k = AmplitudeFactors([-4.1692e6, -1.3455e6, 0.0, 0.0]);
    let (r, theta): (f64, f64) = (1e-3, 2.0);
    let (x, y) = (r * theta.cos(), r * theta.sin());

    let cart = displacement(x, y, &k, &m);
    let polar = polar_asymptotic(Mode::I, r, theta, &k, &m);
    println!("Cartesian (u, v)       = {cart:?}");
    println!("from polar (classical + gradient) = {:?}", polar.to_cartesian(theta));

    let q = q_eval(x, y, m.eta)?;
    println!("Q11 = {:.6e}, ∂Q11/∂x = {:.6e}, ∂²Q11/∂x² = {:.6e}", q.q[0][0], q.dq[0][0][0], q.ddq[0][0][0]);

    for xf in [-1e-4, -1e-3, -1e-2] {
        println!("crack-face v({xf}) = {:.6e} m", crack_face_opening(xf, &k, &m));
    }
    let (j1, j2) = j_integral(&k, &m)?;
    println!("J (mode I, mode II) = ({j1:.6e}, {j2:.6e}) Pa·m");
    Ok(())
}
