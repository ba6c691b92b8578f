//! Invariants checked on generated inputs.

mod common;

use proptest::prelude::*;

use crossed::abelian::FgAbelian;
use crossed::coefficients::GModule;
use crossed::crs::{self, CrossedComplex};
use crossed::fixtures;
use crossed::io::{self, Object};
use crossed::linalg::Mat;
use crossed::simplicial::{self as sp, SimplicialCrs, SimplicialModule};
use crossed::xmod;

fn small_matrix() -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| (Just(r), Just(c), prop::collection::vec(-6i64..=6, r * c)))
}

fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> Mat {
    let mut m = Mat::identity(n);
    for &(i, j, k) in ops {
        let (i, j) = (i % n, j % n);
        if i != j {
            let mut e = Mat::identity(n);
            e.set(i, j, k);
            m = e.mul(&m);
        }
    }
    m
}

fn coefficient() -> impl Strategy<Value = GModule> {
    (0usize..9).prop_map(|i| fixtures::coefficient_grid().swap_remove(i).1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn invariants_ignore_unimodular_changes(
        (r, c, entries) in small_matrix(),
        left in prop::collection::vec((0usize..3, 0usize..3, -2i64..=2), 0..4),
        right in prop::collection::vec((0usize..3, 0usize..3, -2i64..=2), 0..4),
    ) {
        let rows: Vec<Vec<i64>> = entries.chunks(c).map(|x| x.to_vec()).collect();
        let m = Mat::from_rows(&rows, c);
        let a = FgAbelian::new(r, m.clone());
        let b = FgAbelian::new(r, unimodular(r, &left).mul(&m).mul(&unimodular(c, &right)));
        prop_assert_eq!(a.invariants(), b.invariants());
        prop_assert!(a.isomorphic(&b));
    }

    #[test]
    fn finite_orders_match_enumeration((r, c, entries) in small_matrix()) {
        let rows: Vec<Vec<i64>> = entries.chunks(c).map(|x| x.to_vec()).collect();
        let a = FgAbelian::new(r, Mat::from_rows(&rows, c));
        if let (Some(order), Some(els)) = (a.order(), a.elements()) {
            prop_assert_eq!(order as usize, els.len());
        }
    }

    #[test]
    fn em_homology_is_concentrated(a in coefficient(), m in 1usize..=3) {
        let k = SimplicialModule::em(&a, m, m + 1);
        prop_assert!(k.violations().is_empty());
        for d in 0..=m {
            let h = k.homology(d).unwrap();
            if d == m {
                for x in 0..a.base().num_objects() {
                    prop_assert!(h.value(x).isomorphic(a.value(x)));
                }
            } else {
                prop_assert!(h.is_trivial(), "degree {}", d);
            }
        }
    }

    #[test]
    fn wbar_outputs_are_simplicial(a in coefficient(), n in 3usize..=4, m in 1usize..=2) {
        let s = SimplicialCrs::em(n, &a, m, m + 1).unwrap();
        let w = sp::wbar(&s).unwrap();
        prop_assert!(w.violations().is_empty());
        prop_assert_eq!(w.top(), s.top() + 1);
    }

    #[test]
    fn documents_round_trip(i in 0usize..27) {
        let docs = fixtures::documents();
        let (_, obj) = &docs[i % docs.len()];
        let text = io::to_string(obj);
        let back = io::parse(&text).unwrap();
        prop_assert_eq!(io::to_string(&back), text);
    }

    #[test]
    fn towers_of_crossed_modules(i in 0usize..200, base in prop::sample::select(vec![2usize, 3, 4])) {
        let g = fixtures::cyclic(base);
        let all = xmod::crossed_modules_over(&g, 6);
        let m = all[i % all.len()].clone();
        let c = CrossedComplex::from_xm(m);
        let t = crs::tower(&c).unwrap();
        prop_assert!(crs::check_tower(&c, &t).unwrap().ok());
        for n in 0..2 {
            let f = crs::fiber(&c, n, 0).unwrap();
            prop_assert!(f.concentrated && f.matches);
        }
        prop_assert!(xmod::check_roundtrip_xm(c.xm()).unwrap());
    }

    #[test]
    fn peiffer_quotients_are_crossed(i in 0usize..400) {
        let g = fixtures::cyclic(2);
        let all = common::precrossed_over(&g, 6);
        let p = &all[i % all.len()];
        let (q, proj) = xmod::peiffer_quotient(p).unwrap();
        prop_assert!(xmod::check_crossed(q.pre()).0);
        // the projection is onto
        let hit: std::collections::BTreeSet<usize> = proj[0].iter().copied().collect();
        prop_assert_eq!(hit.len(), q.c().group(0).order());
    }
}

#[test]
fn emitted_simplicial_documents_reparse() {
    let a = fixtures::coeff_z(&fixtures::interval_plus_z2());
    let w = sp::wbar(&SimplicialCrs::em(4, &a, 1, 2).unwrap()).unwrap();
    let text = io::to_string(&Object::Simplicial(w.clone()));
    match io::parse(&text).unwrap() {
        Object::Simplicial(back) => assert_eq!(back, w),
        _ => panic!(),
    }
}
