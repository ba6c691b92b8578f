//! The loop construction undoing W̄ₙ, and transport of simplicial homotopies.

use crossed::fixtures;
use crossed::simplicial::*;

fn main() -> anyhow::Result<()> {
    let a = fixtures::coeff_z3_inversion(&fixtures::interval_plus_z2())?;
    let s = SimplicialCrs::em(4, &a, 1, 3)?;
    let r = check_loop_wbar(&s)?;
    println!("loop∘W̄ on K(Z/3, 1) over I+Z2: {}", r.ok());
    let z = fixtures::coeff_z(&fixtures::cyclic(2));
    for n in 2..=4 {
        let s = SimplicialCrs::em(n, &z, 1, 2)?;
        let hs = generate_homotopies(&s.head, &s.head, 4)?;
        let ok = hs
            .iter()
            .map(|h| transport_homotopy(&s, &s, h).map(|t| t.report.ok()))
            .collect::<Result<Vec<_>, _>>()?;
        println!("n={n}: {} homotopies transported, identities hold {:?}", hs.len(), ok);
    }
    Ok(())
}
