//! Size effect: amplitude factors, normalized J and inverse stress
//! concentration over crack length for several length scales.

use sge_crack::study::{run_size_effect, RunConfig, SizeEffectSweep};
use sge_crack::Mode;
use std::path::PathBuf;

fn main() -> sge_crack::Result<()> {
    let root = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/size_effect".into()));
    let sweep = SizeEffectSweep::default();
    for mode in [Mode::I, Mode::II] {
        let rep = run_size_effect(&RunConfig::baseline(mode), &sweep, Some(&root.join(format!("mode_{mode}"))))?;
        println!("mode {mode}");
        println!("{:>7} {:>7} {:>10} {:>10} {:>9} {:>9} {:>7}", "ℓ/L", "d/L", "K_a", "K_b", "J/J0", "Jcl/J0", "1/kt");
        let [a, b] = mode.amplitude_indices();
        for r in &rep.rows {
            let s = &r.summary;
            println!(
                "{:>7} {:>7.4} {:>10.4} {:>10.4} {:>9.4} {:>9.4} {:>7.4}",
                r.ell_over_l,
                r.d_over_l,
                s.amplitudes_normalized[a],
                s.amplitudes_normalized[b],
                s.j_normalized.unwrap_or(f64::NAN),
                r.j_classical_normalized,
                s.inverse_kt
            );
        }
        for f in &rep.failures {
            println!("failed: {} — {}", f.label, f.error);
        }
    }
    Ok(())
}
