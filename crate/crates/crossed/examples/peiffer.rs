//! A pre-crossed module failing the Peiffer identity and its quotient.

use crossed::coefficients::GGroup;
use crossed::group::FiniteGroup;
use crossed::xmod::{check_crossed, peiffer_quotient, PreCrossedModule};
use crossed::fixtures;

fn main() -> anyhow::Result<()> {
    // S₃ over Z/2 with trivial action and the sign map as boundary
    let g = fixtures::cyclic(2);
    let c = GGroup::constant(g, &FiniteGroup::s3());
    let p = PreCrossedModule::new(c, vec![vec![0, 0, 0, 1, 1, 1]])?;
    let (ok, violations) = check_crossed(&p);
    println!("crossed: {ok}, {} Peiffer violations", violations.len());
    let (q, proj) = peiffer_quotient(&p)?;
    println!("quotient order {}, projection {:?}", q.c().group(0).order(), proj[0]);
    let (q2, _) = peiffer_quotient(q.pre())?;
    println!("quotient again has order {}", q2.c().group(0).order());
    Ok(())
}
