//! Small named objects used by tests, examples and the command line.

use std::sync::Arc;

use crate::abelian::FgAbelian;
use crate::coefficients::{GGroup, GModule, Gpd, ModHom};
use crate::crs::{Boundary, CrossedComplex, Level};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::groupoid::FiniteGroupoid;
use crate::io::Object;
use crate::linalg::Mat;
use crate::simplicial::{SimplicialCrs, SimplicialModule};
use crate::xmod::CrossedModule;

pub fn interval() -> Gpd {
    Arc::new(FiniteGroupoid::interval())
}

/// One-object groupoid of `Z/n` with object `*`; arrow `k` is the element `k`.
pub fn cyclic(n: usize) -> Gpd {
    Arc::new(FiniteGroupoid::from_group(&FiniteGroup::cyclic(n), "*"))
}

pub fn s3() -> Gpd {
    Arc::new(FiniteGroupoid::from_group(&FiniteGroup::s3(), "*"))
}

pub fn point() -> Gpd {
    Arc::new(FiniteGroupoid::from_group(&FiniteGroup::trivial(), "*"))
}

/// `I ⊔ Z/2`.
pub fn interval_plus_z2() -> Gpd {
    Arc::new(FiniteGroupoid::disjoint_union(&FiniteGroupoid::interval(), &cyclic(2)))
}

/// `(G, C, δ) = (Z/2, Z/2, 0)` with trivial action.
pub fn xm_z2_z2_zero() -> CrossedModule {
    let g = cyclic(2);
    let c = GGroup::constant(g, &FiniteGroup::cyclic(2));
    CrossedModule::new(c, vec![vec![0, 0]]).expect("fixture")
}

/// `(G, C, δ) = (Z/2, Z/2, id)` with trivial action.
pub fn xm_z2_z2_id() -> CrossedModule {
    let g = cyclic(2);
    let c = GGroup::constant(g, &FiniteGroup::cyclic(2));
    CrossedModule::new(c, vec![vec![0, 1]]).expect("fixture")
}

/// `(G, C, δ) = (Z/4, Z/2, 1 ↦ 2)` with trivial action.
pub fn xm_z4_z2() -> CrossedModule {
    let g = cyclic(4);
    let c = GGroup::constant(g, &FiniteGroup::cyclic(2));
    CrossedModule::new(c, vec![vec![0, 2]]).expect("fixture")
}

fn z2_over_z4_level(top: FgAbelian) -> CrossedComplex {
    let g = cyclic(2);
    let c2 = GGroup::constant(g.clone(), &FiniteGroup::cyclic(4));
    let xm = CrossedModule::new(c2, vec![vec![0; 4]]).expect("fixture");
    let level = Level {
        module: GModule::constant(g, &top),
        boundary: Boundary::IntoGroup(vec![vec![2]]),
    };
    CrossedComplex::new(xm, vec![level], 3).expect("fixture")
}

/// `Z →(1 ↦ 2) Z/4 →0 Z/2`, trivial actions.
pub fn cc4() -> CrossedComplex {
    z2_over_z4_level(FgAbelian::free(1))
}

/// `Z/2 →(1 ↦ 2) Z/4 →0 Z/2`, trivial actions.
pub fn cc4t() -> CrossedComplex {
    z2_over_z4_level(FgAbelian::cyclic(2))
}

/// `Z →(×2) Z →(1 ↦ 2) Z/4 →0 Z/2`, trivial actions; rank 4.
pub fn r4() -> CrossedComplex {
    let c = cc4();
    let g = c.base().clone();
    let z = GModule::constant(g, &FgAbelian::free(1));
    let mut higher = c.higher().to_vec();
    higher.push(Level {
        module: z,
        boundary: Boundary::Module(ModHom {
            mats: vec![Mat::from_rows(&[vec![2]], 1)],
        }),
    });
    CrossedComplex::new(c.xm().clone(), higher, 4).expect("fixture")
}

/// `Z/2 →0 S₃ →id S₃` with conjugation action on `C₂`; rank 3.
pub fn s3x() -> CrossedComplex {
    let g = s3();
    let (grp, ends) = g.end_group(0);
    let action = (0..g.num_arrows())
        .map(|t| {
            let e = ends.iter().position(|&a| a == t).unwrap();
            (0..grp.order()).map(|c| grp.conj(e, c)).collect()
        })
        .collect();
    let c2 = GGroup::new(g.clone(), vec![grp.clone()], action).expect("fixture");
    let xm = CrossedModule::new(c2, vec![ends.clone()]).expect("fixture");
    let level = Level {
        module: GModule::constant(g, &FgAbelian::cyclic(2)),
        boundary: Boundary::IntoGroup(vec![vec![grp.identity()]]),
    };
    CrossedComplex::new(xm, vec![level], 3).expect("fixture")
}

/// Constant `Z/2`.
pub fn coeff_z2(pi: &Gpd) -> GModule {
    GModule::constant(pi.clone(), &FgAbelian::cyclic(2))
}

/// Constant `Z`.
pub fn coeff_z(pi: &Gpd) -> GModule {
    GModule::constant(pi.clone(), &FgAbelian::free(1))
}

/// `Z/3` where every nonidentity loop acts by inversion; a module whenever
/// each vertex group has order at most 2.
pub fn coeff_z3_inversion(pi: &Gpd) -> Result<GModule> {
    let b = pi.clone();
    GModule::with_action(pi.clone(), &FgAbelian::cyclic(3), move |t| {
        let flip = b.src(t) == b.tgt(t) && !b.is_identity(t);
        Mat::from_rows(&[vec![if flip { -1 } else { 1 }]], 1)
    })
}

/// A named groupoid fixture.
pub fn groupoid(name: &str) -> Result<Gpd> {
    Ok(match name {
        "I" => interval(),
        "Z2" => cyclic(2),
        "Z4" => cyclic(4),
        "S3" => s3(),
        "trivial" => point(),
        "I+Z2" => interval_plus_z2(),
        _ => {
            return Err(Error::Unknown {
                kind: "groupoid",
                name: name.into(),
            })
        }
    })
}

/// A named crossed complex fixture; crossed modules have rank 2.
pub fn complex(name: &str) -> Result<CrossedComplex> {
    Ok(match name {
        "xm_z2_z2_0" => CrossedComplex::from_xm(xm_z2_z2_zero()),
        "xm_z2_z2_id" => CrossedComplex::from_xm(xm_z2_z2_id()),
        "xm_z4_z2" => CrossedComplex::from_xm(xm_z4_z2()),
        "cc4" => cc4(),
        "cc4t" => cc4t(),
        "r4" => r4(),
        "s3x" => s3x(),
        _ => {
            if let Ok(g) = groupoid(name) {
                return Ok(CrossedComplex::from_groupoid(g));
            }
            return Err(Error::Unknown {
                kind: "fixture",
                name: name.into(),
            });
        }
    })
}

pub const GROUPOIDS: [&str; 4] = ["I", "Z2", "Z4", "S3"];
pub const CROSSED_MODULES: [&str; 3] = ["xm_z2_z2_0", "xm_z2_z2_id", "xm_z4_z2"];
pub const COMPLEXES: [&str; 4] = ["cc4", "cc4t", "r4", "s3x"];

/// Coefficient modules used by the ladder grid, keyed by file stem.
pub fn coefficient_grid() -> Vec<(String, GModule)> {
    let mut out = Vec::new();
    for (pn, pi) in [("trivial", point()), ("Z2", cyclic(2)), ("I+Z2", interval_plus_z2())] {
        out.push((format!("coeff_z2_{pn}"), coeff_z2(&pi)));
        out.push((format!("coeff_z3inv_{pn}"), coeff_z3_inversion(&pi).expect("fixture")));
        out.push((format!("coeff_z_{pn}"), coeff_z(&pi)));
    }
    out
}

/// Every fixture as a document, keyed by file stem.
pub fn documents() -> Vec<(String, Object)> {
    let mut out = Vec::new();
    for n in ["I", "Z2", "Z4", "S3", "trivial", "I+Z2"] {
        out.push((n.to_string(), Object::Groupoid(groupoid(n).expect("fixture"))));
    }
    for (n, m) in [
        ("xm_z2_z2_0", xm_z2_z2_zero()),
        ("xm_z2_z2_id", xm_z2_z2_id()),
        ("xm_z4_z2", xm_z4_z2()),
    ] {
        out.push((n.to_string(), Object::CrossedModule(m)));
    }
    for n in COMPLEXES {
        out.push((n.to_string(), Object::Complex(complex(n).expect("fixture"))));
    }
    for (n, m) in coefficient_grid() {
        out.push((n, Object::Module(m)));
    }
    let z2 = coeff_z2(&cyclic(2));
    out.push(("k_z2_m2".into(), Object::SimplicialModule(SimplicialModule::em(&z2, 2, 3))));
    for n in 2..=4 {
        let s = SimplicialCrs::em(n, &z2, 1, 3).expect("fixture");
        out.push((format!("em{n}_z2_m1"), Object::Simplicial(s)));
    }
    let z = coeff_z(&point());
    out.push(("em3_z_m1".into(), Object::Simplicial(SimplicialCrs::em(3, &z, 1, 3).expect("fixture"))));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_validate() {
        for n in GROUPOIDS.iter().chain(&CROSSED_MODULES).chain(&COMPLEXES) {
            let c = complex(n).unwrap();
            c.validate().unwrap();
        }
        for p in [point(), cyclic(2), interval_plus_z2()] {
            coeff_z3_inversion(&p).unwrap();
        }
        assert!(complex("nope").is_err());
    }

    #[test]
    fn s3x_homotopy() {
        let c = s3x();
        let d: Vec<Vec<String>> = c.describe_homotopy().unwrap();
        assert_eq!(d[1], vec!["0"]);
        assert_eq!(d[2], vec!["0"]);
        assert_eq!(d[3], vec!["Z/2"]);
    }

    #[test]
    fn r4_homotopy() {
        let d = r4().describe_homotopy().unwrap();
        assert_eq!(d[2], vec!["Z/2"]);
        assert_eq!(d[3], vec!["0"]);
        assert_eq!(d[4], vec!["0"]);
    }
}
