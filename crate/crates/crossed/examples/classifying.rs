//! Classifying functors on Eilenberg–MacLane objects: sizes of W̄₁ and W̄₂,
//! the comparison with L, and the ladder W̄ₙ K(Ãₙ, m) = K(Ãₙ₋₁, m+1).

use crossed::fixtures;
use crossed::simplicial::*;

fn main() -> anyhow::Result<()> {
    let a = fixtures::coeff_z2(&fixtures::cyclic(2));
    let w1 = Wbar1::new(SimplicialGroupoid::em(&a, 1, 2));
    println!("W̄₁ K(Z/2, 1) simplex counts {:?}", w1.counts());
    let w2 = wbar2(&SimplicialCrs::em(2, &a, 1, 2)?)?;
    println!("W̄₂ K(Z/2, 1) arrows at * per level: {:?}", (0..=w2.top()).map(|k| w2.vertex_count(k, 0)).collect::<Vec<_>>());
    println!("W̄₁ vs L: {}", wbar1_em_vs_l(&a, 1)?.ok());
    for (name, a) in fixtures::coefficient_grid() {
        let cells: Vec<bool> = (2..=4)
            .flat_map(|n| (1..=2).map(move |m| (n, m)))
            .map(|(n, m)| check_em_ladder(n, &a, m).map(|r| r.ok()))
            .collect::<Result<_, _>>()?;
        println!("{name:18} ladder {:?}", cells);
    }
    Ok(())
}
