//! Brute-force oracles and enumerators shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use crossed::coefficients::{GGroup, Gpd};
use crossed::crs::{Boundary, CrossedComplex};
use crossed::group::{automorphisms, small_groups, FiniteGroup};
use crossed::io::{self, Object};
use crossed::xmod::PreCrossedModule;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn load_fixture(stem: &str) -> Object {
    io::load(&fixture_dir().join(format!("{stem}.json"))).unwrap_or_else(|e| panic!("{stem}: {e}"))
}

/// Element-order profile of a finite abelian group, or `None` when infinite.
pub type Profile = Option<Vec<(usize, usize)>>;

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Profile of `Z/n₁ + ⋯ + Z/n_k` read from a description such as
/// `Z/2 + Z/4`; any free summand makes it infinite.
pub fn profile_of_description(s: &str) -> Profile {
    if s == "0" {
        return Some(vec![(1, 1)]);
    }
    let mut orders: Vec<usize> = vec![1];
    for part in s.split(" + ") {
        let n: usize = part.strip_prefix("Z/")?.parse().ok()?;
        let mut next = Vec::new();
        for &o in &orders {
            for k in 0..n {
                let ok = n / gcd(n, k);
                next.push(o / gcd(o, ok) * ok);
            }
        }
        orders = next;
    }
    Some(count_orders(orders))
}

fn count_orders(orders: Vec<usize>) -> Vec<(usize, usize)> {
    let mut set: Vec<(usize, usize)> = Vec::new();
    let distinct: BTreeSet<usize> = orders.iter().copied().collect();
    for o in distinct {
        set.push((o, orders.iter().filter(|&&x| x == o).count()));
    }
    set
}

/// Profile of a subquotient `K / I` of a finite group, both given as element sets of
/// an ambient table, with `I` normal in `K`: orders of cosets in the quotient.
fn quotient_profile(g: &FiniteGroup, k: &[usize], i: &[usize]) -> Vec<(usize, usize)> {
    let iset: BTreeSet<usize> = i.iter().copied().collect();
    let mut orders = Vec::new();
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for &a in k {
        if seen.contains(&a) {
            continue;
        }
        for &b in i {
            seen.insert(g.mul(a, b));
        }
        let mut p = a;
        let mut n = 1;
        while !iset.contains(&p) {
            p = g.mul(p, a);
            n += 1;
        }
        orders.push(n);
    }
    count_orders(orders)
}

/// Subgroup generated by `gens`, by repeated multiplication.
fn generated(g: &FiniteGroup, gens: &[usize]) -> Vec<usize> {
    let mut set: BTreeSet<usize> = [g.identity()].into_iter().collect();
    loop {
        let mut grew = false;
        let cur: Vec<usize> = set.iter().copied().collect();
        for &a in &cur {
            for &s in gens {
                if set.insert(g.mul(a, s)) {
                    grew = true;
                }
            }
        }
        if !grew {
            return set.into_iter().collect();
        }
    }
}

/// `π₀` as the number of connected components, by union-find over arrows.
pub fn pi0_oracle(c: &CrossedComplex) -> usize {
    let g = c.base();
    let mut parent: Vec<usize> = (0..g.num_objects()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for t in 0..g.num_arrows() {
        let (a, b) = (find(&mut parent, g.src(t)), find(&mut parent, g.tgt(t)));
        parent[a] = b;
    }
    (0..g.num_objects()).filter(|&x| find(&mut parent, x) == x).count()
}

/// Order of `π₁(x) = End(x) / im δₓ`.
pub fn pi1_order_oracle(c: &CrossedComplex, x: usize) -> usize {
    let g = c.base();
    let ends = g.hom(x, x).len();
    let image: BTreeSet<usize> = (0..c.c2().group(x).order()).map(|u| c.xm().delta(x, u)).collect();
    ends / image.len()
}

/// `π₂(x) = ker δₓ / im ∂₃` by enumeration; needs a finite `C₂(x)`.
pub fn pi2_oracle(c: &CrossedComplex, x: usize) -> Profile {
    let grp = c.c2().group(x);
    let g = c.base();
    let kernel: Vec<usize> = (0..grp.order()).filter(|&u| g.is_identity(c.xm().delta(x, u))).collect();
    let image = match c.level(3).map(|l| &l.boundary) {
        Some(Boundary::IntoGroup(imgs)) => generated(grp, &imgs[x]),
        _ => vec![grp.identity()],
    };
    Some(quotient_profile(grp, &kernel, &image))
}

/// `∂₃` on an integer vector at `x`, by multiplying generator images.
fn d3_eval(c: &CrossedComplex, x: usize, v: &[i64]) -> usize {
    let grp = c.c2().group(x);
    let imgs = match &c.level(3).unwrap().boundary {
        Boundary::IntoGroup(i) => &i[x],
        _ => unreachable!(),
    };
    let mut acc = grp.identity();
    for (j, &k) in v.iter().enumerate() {
        let a = if k >= 0 { imgs[j] } else { grp.inv(imgs[j]) };
        for _ in 0..k.unsigned_abs() {
            acc = grp.mul(acc, a);
        }
    }
    acc
}

/// `π₃(x) = ker ∂₃ / im ∂₄` at the integer-vector level. `C₃(x)` must be
/// finite or `Z`; in the latter case kernel and image are `gZ` and `hZ`
/// found in a window of coefficients.
pub fn pi3_oracle(c: &CrossedComplex, x: usize) -> Profile {
    let Some(l3) = c.level(3) else {
        return Some(vec![(1, 1)]);
    };
    let v3 = l3.module.value(x);
    let id = c.c2().group(x).identity();
    let d4 = c.level(4).map(|l| match &l.boundary {
        Boundary::Module(h) => h.mats[x].clone(),
        _ => unreachable!(),
    });
    let apply4 = |w: &[i64]| -> Vec<i64> {
        let m = d4.as_ref().unwrap();
        (0..v3.rank()).map(|r| (0..w.len()).map(|k| m.get(r, k) * w[k]).sum()).collect()
    };
    match v3.elements() {
        Some(els) => {
            let zero = vec![0; v3.rank()];
            let kernel: Vec<Vec<i64>> = els.iter().filter(|v| d3_eval(c, x, v) == id).cloned().collect();
            let mut image: Vec<Vec<i64>> = vec![zero.clone()];
            if let (Some(l4), Some(_)) = (c.level(4), d4.as_ref()) {
                let v4 = l4.module.value(x);
                let src = v4.elements().expect("a finite C3 with an infinite C4 is not covered");
                image = src.iter().map(|w| apply4(w)).collect();
            }
            // cosets of the image inside the kernel, by element order
            let mut orders = Vec::new();
            let mut seen: Vec<Vec<i64>> = Vec::new();
            for a in &kernel {
                if seen.iter().any(|s| v3.eq_elem(s, a)) {
                    continue;
                }
                for b in &image {
                    let s: Vec<i64> = a.iter().zip(b).map(|(p, q)| p + q).collect();
                    seen.push(s);
                }
                let mut p = a.clone();
                let mut n = 1;
                while !image.iter().any(|b| v3.eq_elem(b, &p)) {
                    p = p.iter().zip(a).map(|(s, t)| s + t).collect();
                    n += 1;
                }
                orders.push(n);
            }
            Some(count_orders(orders))
        }
        None => {
            assert_eq!((v3.rank(), v3.free_rank()), (1, 1), "only C3(x) = Z is covered");
            let window = 64;
            let g = (1..=window).find(|&k| d3_eval(c, x, &[k]) == id);
            let h = c.level(4).map(|l4| {
                assert_eq!(l4.module.value(x).rank(), 1);
                apply4(&[1])[0].unsigned_abs() as i64
            });
            match (g, h) {
                (None, _) => Some(vec![(1, 1)]),
                (Some(_), None) | (Some(_), Some(0)) => None,
                (Some(g), Some(h)) => {
                    let n = (h / g) as usize;
                    Some(count_orders((0..n).map(|k| n / gcd(n, k)).collect()))
                }
            }
        }
    }
}

/// One-object groupoid on `Z/n`.
pub fn cyclic_base(n: usize) -> Gpd {
    crossed::fixtures::cyclic(n)
}

/// Every pre-crossed module over a one-object base with `|C| <= max`.
pub fn precrossed_over(base: &Gpd, max: usize) -> Vec<PreCrossedModule> {
    let (h, ends) = base.end_group(0);
    let mut out = Vec::new();
    for (_, c) in small_groups(max) {
        let (aut, perms) = automorphisms(&c);
        for act in h.homs(&aut) {
            let action: Vec<Vec<usize>> = (0..base.num_arrows())
                .map(|t| perms[act[ends.iter().position(|&e| e == t).unwrap()]].clone())
                .collect();
            let Ok(cg) = GGroup::new(base.clone(), vec![c.clone()], action) else {
                continue;
            };
            for d in c.homs(&h) {
                let delta = vec![d.iter().map(|&k| ends[k]).collect()];
                if let Ok(p) = PreCrossedModule::new(cg.clone(), delta) {
                    out.push(p);
                }
            }
        }
    }
    out
}

