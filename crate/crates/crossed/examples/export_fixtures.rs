//! Writes every fixture as a JSON document into `fixtures/` (or the given
//! directory) and checks that each file parses back to the same document.

use std::path::PathBuf;

use crossed::{fixtures, io};

fn main() -> anyhow::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    std::fs::create_dir_all(&dir)?;
    for (name, obj) in fixtures::documents() {
        let text = io::to_string(&obj);
        let back = io::to_string(&io::parse(&text)?);
        anyhow::ensure!(back == text, "{name} does not round trip");
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, text)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
