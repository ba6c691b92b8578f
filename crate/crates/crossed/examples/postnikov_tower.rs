//! The Postnikov tower of CC4: stages, fibrations, fibers and the limit.

use crossed::crs::{check_tower, fiber, tower};
use crossed::fixtures;

fn main() -> anyhow::Result<()> {
    let c = fixtures::cc4();
    let t = tower(&c)?;
    for (n, p) in t.stages.iter().enumerate() {
        println!("P{n}: {:?}", p.describe_homotopy()?);
    }
    let r = check_tower(&c, &t)?;
    println!("fibrations {:?}, limit recovers the input: {}", r.fibrations, r.limit);
    for n in 0..c.rank() {
        let f = fiber(&c, n, 0)?;
        println!("fiber of eta{}: {:?} concentrated={} matches={}", n + 1, f.homotopy, f.concentrated, f.matches);
    }
    for n in 1..=3 {
        let k = c.coskeleton(n)?;
        println!("cosk{n}: {:?}", k.describe_homotopy()?);
    }
    Ok(())
}
