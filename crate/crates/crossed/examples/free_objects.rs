//! Free pre-crossed modules and free n-crossed complexes: the transpose
//! count of the adjunction against a brute-force Hom count.

use crossed::crs::{cotriple_step, free_ncrs, Cell};
use crossed::fixtures;
use crossed::xmod::FreePreCrossedModule;

fn main() -> anyhow::Result<()> {
    let g = fixtures::cyclic(2);
    for target in [fixtures::xm_z2_z2_zero(), fixtures::xm_z2_z2_id()] {
        let free = FreePreCrossedModule::new(g.clone(), vec![1])?;
        println!(
            "free pre-crossed on one generator over the nonidentity loop: transpose {} brute force {}",
            free.transpose_count(target.pre()),
            free.brute_force_hom_count(target.pre())
        );
    }
    let low = fixtures::complex("xm_z2_z2_0")?;
    let f = free_ncrs(&low, &[(0, Cell::Group(1))])?;
    println!("free 3-crossed complex: C3 = {:?}", f.complex.module(3).unwrap().describe());
    let (g3, eps) = cotriple_step(&fixtures::cc4t())?;
    println!("cotriple on CC4t: {} generators, counit is a fibration: {}", g3.gens[0].len(), eps.is_fibration(&g3.complex, &fixtures::cc4t()));
    Ok(())
}
