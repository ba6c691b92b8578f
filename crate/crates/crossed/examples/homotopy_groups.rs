//! Homotopy groups of the bundled fixtures, read from their JSON files.

use std::path::PathBuf;

use crossed::{fixtures, io};

fn main() -> anyhow::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for stem in fixtures::GROUPOIDS.iter().chain(&fixtures::CROSSED_MODULES).chain(&fixtures::COMPLEXES) {
        let c = io::load(&dir.join(format!("{stem}.json")))?.into_complex()?;
        let h = c.describe_homotopy()?;
        let line: Vec<String> = h.iter().enumerate().map(|(n, g)| format!("pi{n}={}", g.join(","))).collect();
        println!("{stem:12} rank {}  {}", c.rank(), line.join("  "));
    }
    Ok(())
}
