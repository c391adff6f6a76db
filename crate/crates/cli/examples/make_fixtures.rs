//! Regenerates the seeded input files under `tests/fixtures`.
//!
//! cargo run -p gic-cli --example make_fixtures

use std::fmt::Write as _;
use std::path::Path;

use gic_core::glm::{synth_sinusoids_seeded, GlmScenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    std::fs::create_dir_all(&dir)?;

    // Four sensors of unit-variance complex white noise, 500 snapshots.
    let (p, n) = (4, 500);
    let silent = GlmScenario::sinusoids(1, n)?;
    let rows: Vec<_> = (0..p)
        .map(|i| synth_sinusoids_seeded(&silent, &[], &[], 1.0, 100 + i as u64))
        .collect::<Result<_, _>>()?;
    let mut s = (0..p)
        .map(|i| format!("re_{i},im_{i}"))
        .collect::<Vec<_>>()
        .join(",");
    s.push('\n');
    for t in 0..n {
        let line: Vec<String> = rows
            .iter()
            .map(|r| format!("{},{}", r[t].re, r[t].im))
            .collect();
        writeln!(s, "{}", line.join(","))?;
    }
    std::fs::write(dir.join("noise_p4_n500.csv"), s)?;

    // Three unit-amplitude sinusoids of the default scenario in unit noise.
    let n = 200;
    let scenario = GlmScenario::sinusoids(6, n)?;
    let y = synth_sinusoids_seeded(&scenario, &[1.0; 3], &[0.0, 0.785, 1.047], 1.0, 7)?;
    let mut s = String::from("re,im\n");
    for z in &y {
        writeln!(s, "{},{}", z.re, z.im)?;
    }
    std::fs::write(dir.join("sinusoids_q3_n200.csv"), s)?;
    Ok(())
}
