//! Single run with output files: crack opening and stress along y = 0 for
//! mode I and mode II (CSV, SVG and a JSON summary per mode).

use sge_crack::study::{run_single, RunConfig};
use sge_crack::Mode;
use std::path::PathBuf;

fn main() -> sge_crack::Result<()> {
    let root = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/profiles".into()));
    for mode in [Mode::I, Mode::II] {
        let dir = root.join(format!("mode_{mode}"));
        let s = run_single(&RunConfig::baseline(mode), Some(&dir))?;
        println!("mode {mode}: kt = {:.5}, 1/kt = {:.5}, K·√ℓ/t = {:?}", s.kt, s.inverse_kt, s.amplitudes_normalized);
        println!("  files in {}", dir.display());
    }
    Ok(())
}
