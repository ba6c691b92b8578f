//! Crossed modules as 2-groupoids, and (n+1)-crossed complexes as internal
//! groupoids in n-crossed complexes.

use crossed::fixtures;
use crossed::internal_gpd::{check_crs_gpd, check_gpd_crs, check_pi0, endomorphism_splitting, gpd_n};
use crossed::xmod::{check_roundtrip_gpd, check_roundtrip_xm, gpd_of_xm};

fn main() -> anyhow::Result<()> {
    for stem in fixtures::CROSSED_MODULES {
        let c = fixtures::complex(stem)?;
        let g = gpd_of_xm(c.xm())?;
        println!(
            "{stem}: {} cells, xm round trip {}, 2-groupoid round trip {}",
            g.cells.num_arrows(),
            check_roundtrip_xm(c.xm())?,
            check_roundtrip_gpd(&g)?
        );
    }
    for stem in fixtures::COMPLEXES {
        let c = fixtures::complex(stem)?;
        let n = c.rank() - 1;
        let g = gpd_n(&c, n)?;
        println!(
            "{stem}: crs∘gpd = id {}, gpd∘crs ≅ id {}, reflector = pi0 {}, End splits {}",
            check_crs_gpd(&c, n)?,
            check_gpd_crs(&g)?,
            check_pi0(&g)?,
            endomorphism_splitting(&g)?.iso
        );
    }
    Ok(())
}
