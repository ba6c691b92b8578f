//! 2-extensions from tower fibrations, their torsors, U-splitness and pullback.

use crossed::ext_torsor::*;
use crossed::fixtures;

fn main() -> anyhow::Result<()> {
    for stem in ["cc4", "cc4t", "s3x", "r4"] {
        let c = fixtures::complex(stem)?;
        for n in 1..=c.rank() {
            let e = extension_from_tower(&c, n)?;
            let t = torsor_from_extension(&e)?;
            let end = endomorphism_object(&t)?;
            println!(
                "{stem} stage {n}: A = {:?}, extension {}, torsor {}, u-split {}, End {:?} vs {:?}",
                e.coeff.describe(),
                validate_extension(&e).ok(),
                validate_torsor(&t).ok(),
                is_u_split(&t),
                end.computed,
                end.expected
            );
        }
    }
    let e = extension_from_tower(&fixtures::cc4t(), 2)?;
    let s = torsor_from_extension(&e)?.to_set_torsor()?;
    let n = s.fiber.num_objects();
    let doubled: Vec<usize> = (0..n).chain(0..n).collect();
    let (p, _) = torsor_pullback(&s, &doubled)?;
    println!("pullback along a doubling: {} -> {} objects, valid {}", n, p.fiber.num_objects(), p.validate().ok());
    let corr = morphism_correspondence(&e, &e)?;
    println!("endomorphisms: {} of the extension, {} of the torsor", corr.extension_morphisms, corr.torsor_morphisms);
    let bad = torsor_from_extension(&extension_from_tower(&fixtures::cc4(), 1)?)?.perturbed();
    println!("perturbed cocycle passes: {}", validate_torsor(&bad).ok());
    Ok(())
}
