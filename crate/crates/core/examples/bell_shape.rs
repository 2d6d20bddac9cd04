//! Bell triangle shape functions: nodal Kronecker table and interpolation of
//! a cubic from its nodal jets.

use sge_crack::bell::triangle_geometry;

fn main() -> sge_crack::Result<()> {
    let g = triangle_geometry([[0.0, 0.0], [2.0, 0.3], [0.4, 1.5]])?;
    println!("area = {}, diameter = {}", g.area(), g.diameter());
    // rows: shape function, columns: (value, ∂x, ∂y, ∂xx, ∂xy, ∂yy) at its node
    let node_l = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for (a, l) in node_l.iter().enumerate() {
        let s = g.shape_eval(l);
        for k in 0..6 {
            let i = 6 * a + k;
            let jet = [s.n[i], s.dn[i][0], s.dn[i][1], s.ddn[i][0], s.ddn[i][1], s.ddn[i][2]];
            println!("N{:<2} at node {a}: {:?}", i + 1, jet.map(|v| (v * 1e12).round() / 1e12));
        }
    }

    let f = |x: f64, y: f64| [x * x * y - 2.0 * y * y * y + x, 2.0 * x * y + 1.0, x * x - 6.0 * y * y, 2.0 * y, 2.0 * x, -12.0 * y];
    let mut dofs = [0.0; 18];
    for a in 0..3 {
        let p = g.nodes[a];
        dofs[6 * a..6 * a + 6].copy_from_slice(&f(p[0], p[1]));
    }
    let l = [0.2, 0.5, 0.3];
    let p = g.point(&l);
    let v = g.shape_eval(&l).interpolate(&dofs);
    println!("cubic at {p:?}: interpolated {} exact {}", v.value, f(p[0], p[1])[0]);
    Ok(())
}
