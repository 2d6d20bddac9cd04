//! Renormalized enrichment functions Q* on a tip-fan element: zero nodal
//! jets, r^{-1/2} growth of the second derivatives toward the tip.

use sge_crack::bell::triangle_geometry;
use sge_crack::enrichment::EnrichedElement;

fn main() -> sge_crack::Result<()> {
    let r = 1e-3;
    let g = triangle_geometry([[0.0, 0.0], [r, 0.0], [r * 0.6f64.cos(), r * 0.6f64.sin()]])?;
    let el = EnrichedElement::new(&g, [0.0, 0.0], 1.8)?;
    for l in [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
        let e = el.eval(g.point(&l), &g.shape_eval(&l))?;
        println!("at node {:?}: Q* = {:?}, ∇Q*(x-comp, n=1) = {:?}", g.point(&l), e.qstar[0], e.dqstar[0][0]);
    }
    println!("{:>10} {:>14} {:>8}", "s", "|∂²Q*11/∂x²|", "ratio");
    let mut prev: Option<f64> = None;
    for s in [1e-2, 2.5e-3, 6.25e-4, 1.5625e-4, 3.90625e-5] {
        // points along the bisector at fraction s of the element
        let l = [1.0 - s, s / 2.0, s / 2.0];
        let e = el.eval(g.point(&l), &g.shape_eval(&l))?;
        let v = e.ddqstar[0][0][0].abs();
        println!("{s:>10} {v:>14.6e} {:>8.4}", prev.map_or(f64::NAN, |p| v / p));
        prev = Some(v);
    }
    Ok(())
}
