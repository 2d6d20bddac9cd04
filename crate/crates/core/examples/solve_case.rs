//! Solve the baseline mode-I problem with and without tip enrichment and
//! print the amplitude factors, tip stress concentration and solver health.

use sge_crack::asymptotics::Mode;
use sge_crack::study::{run_case, RunConfig};
use std::time::Instant;

fn main() -> sge_crack::Result<()> {
    for enriched in [true, false] {
        let mut cfg = RunConfig::baseline(Mode::I);
        cfg.enrichment = enriched;
        let t0 = Instant::now();
        let (_, s) = run_case(&cfg)?;
        println!("enriched = {enriched} ({:.1} s, {} dofs)", t0.elapsed().as_secs_f64(), s.dofs);
        println!("  K_n·√ℓ/t  = {:?}", s.amplitudes_normalized);
        println!("  kt        = {:.6}", s.kt);
        println!("  J/J0      = {:?}", s.j_normalized);
        println!("  residual  = {:.2e}, equilibrium = {:.2e}", s.residual_norm, s.equilibrium_error);
    }
    Ok(())
}
