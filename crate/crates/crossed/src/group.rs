//! Finite groups by multiplication table.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::abelian::FgAbelian;
use crate::error::{check_cap, invalid, Result};
use crate::linalg::Mat;

/// A finite group on `0..n` with identity `e`. `mul[a][b]` is `a*b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    e: usize,
    labels: Vec<String>,
}

impl FiniteGroup {
    /// Validates the table (closure, associativity, unit, inverses).
    pub fn from_table(mul: Vec<Vec<usize>>, labels: Option<Vec<String>>) -> Result<FiniteGroup> {
        let n = mul.len();
        check_cap("group", n)?;
        if n == 0 {
            return invalid("group has no elements");
        }
        if mul.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return invalid("multiplication table is not square over its elements");
        }
        let Some(e) = (0..n).find(|&e| (0..n).all(|a| mul[e][a] == a && mul[a][e] == a)) else {
            return invalid("no identity element");
        };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return invalid(format!("multiplication not associative at ({a},{b},{c})"));
                    }
                }
            }
        }
        let mut inv = vec![0; n];
        for a in 0..n {
            match (0..n).find(|&b| mul[a][b] == e && mul[b][a] == e) {
                Some(b) => inv[a] = b,
                None => return invalid(format!("element {a} has no inverse")),
            }
        }
        let labels = match labels {
            Some(l) if l.len() == n => l,
            Some(_) => return invalid("label count differs from group order"),
            None => (0..n).map(|i| i.to_string()).collect(),
        };
        Ok(FiniteGroup {
            mul,
            inv,
            e,
            labels,
        })
    }

    fn from_trusted(mul: Vec<Vec<usize>>, e: usize, labels: Vec<String>) -> FiniteGroup {
        let n = mul.len();
        let mut inv = vec![0; n];
        for a in 0..n {
            inv[a] = (0..n).find(|&b| mul[a][b] == e).expect("trusted table has inverses");
        }
        FiniteGroup {
            mul,
            inv,
            e,
            labels,
        }
    }

    pub fn trivial() -> FiniteGroup {
        FiniteGroup::cyclic(1)
    }

    pub fn cyclic(n: usize) -> FiniteGroup {
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::from_trusted(mul, 0, (0..n).map(|i| i.to_string()).collect())
    }

    /// Permutation group from a closed list of permutations (first must be the identity).
    pub fn from_permutations(perms: Vec<Vec<usize>>) -> FiniteGroup {
        let index: HashMap<Vec<usize>, usize> =
            perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let compose = |p: &Vec<usize>, q: &Vec<usize>| -> Vec<usize> { q.iter().map(|&i| p[i]).collect() };
        let mul = perms
            .iter()
            .map(|p| perms.iter().map(|q| index[&compose(p, q)]).collect())
            .collect();
        let labels = perms
            .iter()
            .map(|p| p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(""))
            .collect();
        FiniteGroup::from_trusted(mul, 0, labels)
    }

    /// The symmetric group on three letters, elements labelled by images of 012.
    pub fn s3() -> FiniteGroup {
        FiniteGroup::from_permutations(vec![
            vec![0, 1, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![1, 0, 2],
            vec![0, 2, 1],
            vec![2, 1, 0],
        ])
    }

    pub fn product(a: &FiniteGroup, b: &FiniteGroup) -> FiniteGroup {
        let (n, m) = (a.order(), b.order());
        let mul = (0..n * m)
            .map(|x| {
                (0..n * m)
                    .map(|y| a.mul(x / m, y / m) * m + b.mul(x % m, y % m))
                    .collect()
            })
            .collect();
        let labels = (0..n * m)
            .map(|x| format!("({},{})", a.label(x / m), b.label(x % m)))
            .collect();
        FiniteGroup::from_trusted(mul, a.e * m + b.e, labels)
    }

    /// Semidirect product `N ⋊ H` where `act[h]` is an automorphism of `N`.
    /// Element `(n, h)` has index `n * |H| + h`; `(n,h)(n',h') = (n·ʰn', hh')`.
    pub fn semidirect(nn: &FiniteGroup, h: &FiniteGroup, act: &[Vec<usize>]) -> FiniteGroup {
        let (n, m) = (nn.order(), h.order());
        let mul = (0..n * m)
            .map(|x| {
                (0..n * m)
                    .map(|y| {
                        let (a, g) = (x / m, x % m);
                        let (b, k) = (y / m, y % m);
                        nn.mul(a, act[g][b]) * m + h.mul(g, k)
                    })
                    .collect()
            })
            .collect();
        let labels = (0..n * m)
            .map(|x| format!("({},{})", nn.label(x / m), h.label(x % m)))
            .collect();
        FiniteGroup::from_trusted(mul, nn.e * m + h.e, labels)
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn identity(&self) -> usize {
        self.e
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn table(&self) -> &Vec<Vec<usize>> {
        &self.mul
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn find_label(&self, s: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == s)
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(a) } else { a };
        let mut r = self.e;
        for _ in 0..k.unsigned_abs() {
            r = self.mul(r, base);
        }
        r
    }

    /// `a b a⁻¹`
    pub fn conj(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.inv(a))
    }

    pub fn elem_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != self.e {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..self.order()).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn center(&self) -> Vec<usize> {
        (0..self.order())
            .filter(|&a| (0..self.order()).all(|b| self.mul(a, b) == self.mul(b, a)))
            .collect()
    }

    /// Subgroup generated by `gens`, sorted.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.e] = true;
        let mut queue: VecDeque<usize> = VecDeque::from([self.e]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order()).filter(|&x| seen[x]).collect()
    }

    pub fn is_subgroup(&self, s: &[usize]) -> bool {
        let set: BTreeSet<usize> = s.iter().copied().collect();
        set.contains(&self.e)
            && s.iter().all(|&a| set.contains(&self.inv(a)))
            && s.iter().all(|&a| s.iter().all(|&b| set.contains(&self.mul(a, b))))
    }

    pub fn is_normal(&self, s: &[usize]) -> bool {
        let set: BTreeSet<usize> = s.iter().copied().collect();
        (0..self.order()).all(|g| s.iter().all(|&x| set.contains(&self.conj(g, x))))
    }

    /// Smallest subgroup containing `gens` and stable under conjugation and
    /// the given extra automorphisms (each a permutation of the elements).
    pub fn normal_closure(&self, gens: &[usize], autos: &[Vec<usize>]) -> Vec<usize> {
        let mut current: BTreeSet<usize> = self.closure(gens).into_iter().collect();
        loop {
            let mut next: Vec<usize> = current.iter().copied().collect();
            for &x in &current {
                for g in 0..self.order() {
                    next.push(self.conj(g, x));
                }
                for a in autos {
                    next.push(a[x]);
                }
            }
            let closed: BTreeSet<usize> = self.closure(&next).into_iter().collect();
            if closed == current {
                return current.into_iter().collect();
            }
            current = closed;
        }
    }

    /// Quotient by a normal subgroup: the group of cosets and the projection.
    /// Cosets are numbered by their smallest element.
    pub fn quotient(&self, normal: &[usize]) -> (FiniteGroup, Vec<usize>) {
        let n = self.order();
        let mut coset_of = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for a in 0..n {
            if coset_of[a] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(a);
            for &s in normal {
                coset_of[self.mul(a, s)] = id;
            }
        }
        let mul = reps
            .iter()
            .map(|&a| reps.iter().map(|&b| coset_of[self.mul(a, b)]).collect())
            .collect();
        let labels = reps.iter().map(|&a| self.label(a).to_string()).collect();
        let q = FiniteGroup::from_trusted(mul, coset_of[self.e], labels);
        (q, coset_of)
    }

    /// Whether `f` (image of each element) is a homomorphism into `h`.
    pub fn is_hom(&self, h: &FiniteGroup, f: &[usize]) -> bool {
        f.len() == self.order()
            && (0..self.order())
                .all(|a| (0..self.order()).all(|b| f[self.mul(a, b)] == h.mul(f[a], f[b])))
    }

    /// A small generating set, chosen greedily in index order.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![self.e];
        for a in 0..self.order() {
            if span.binary_search(&a).is_err() {
                gens.push(a);
                span = self.closure(&gens);
            }
        }
        gens
    }

    /// Every homomorphism into `h`, each as a table of images.
    pub fn homs(&self, h: &FiniteGroup) -> Vec<Vec<usize>> {
        let gens = self.generators();
        let mut out = Vec::new();
        let mut images = vec![0; gens.len()];
        loop {
            if let Some(f) = self.extend_hom(h, &gens, &images) {
                out.push(f);
            }
            // odometer over generator images
            let mut i = 0;
            loop {
                if i == images.len() {
                    return out;
                }
                images[i] += 1;
                if images[i] < h.order() {
                    break;
                }
                images[i] = 0;
                i += 1;
            }
        }
    }

    /// Extends generator images to a homomorphism if consistent.
    pub fn extend_hom(&self, h: &FiniteGroup, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
        let mut f = vec![usize::MAX; self.order()];
        f[self.e] = h.identity();
        let mut queue = VecDeque::from([self.e]);
        while let Some(x) = queue.pop_front() {
            for (&g, &img) in gens.iter().zip(images) {
                let y = self.mul(x, g);
                let fy = h.mul(f[x], img);
                if f[y] == usize::MAX {
                    f[y] = fy;
                    queue.push_back(y);
                } else if f[y] != fy {
                    return None;
                }
            }
        }
        if f.contains(&usize::MAX) || !self.is_hom(h, &f) {
            return None;
        }
        Some(f)
    }

    /// Brute-force isomorphism test.
    pub fn isomorphic(&self, other: &FiniteGroup) -> bool {
        if self.order() != other.order() {
            return false;
        }
        let orders = |g: &FiniteGroup| {
            let mut v: Vec<usize> = (0..g.order()).map(|a| g.elem_order(a)).collect();
            v.sort();
            v
        };
        if orders(self) != orders(other) {
            return false;
        }
        self.homs(other).iter().any(|f| {
            let s: BTreeSet<usize> = f.iter().copied().collect();
            s.len() == self.order()
        })
    }
}

/// Dihedral group of order 2n as permutations of n points.
pub fn dihedral(n: usize) -> FiniteGroup {
    let mut perms = Vec::new();
    for k in 0..n {
        perms.push((0..n).map(|i| (i + k) % n).collect::<Vec<_>>());
    }
    for k in 0..n {
        perms.push((0..n).map(|i| (k + n - i) % n).collect::<Vec<_>>());
    }
    FiniteGroup::from_permutations(perms)
}

/// Quaternion group; element `4s + u` is `(-1)^s · [1, i, j, k][u]`.
pub fn quaternion() -> FiniteGroup {
    // unit products: (sign, unit)
    let unit = |a: usize, b: usize| -> (usize, usize) {
        match (a, b) {
            (0, x) | (x, 0) => (0, x),
            (x, y) if x == y => (1, 0),
            (1, 2) => (0, 3),
            (2, 3) => (0, 1),
            (3, 1) => (0, 2),
            (2, 1) => (1, 3),
            (3, 2) => (1, 1),
            (1, 3) => (1, 2),
            _ => unreachable!(),
        }
    };
    let names = ["1", "i", "j", "k"];
    let mul = (0..8)
        .map(|x| {
            (0..8)
                .map(|y| {
                    let (s, u) = unit(x % 4, y % 4);
                    ((x / 4 + y / 4 + s) % 2) * 4 + u
                })
                .collect()
        })
        .collect();
    let labels = (0..8)
        .map(|x| format!("{}{}", if x >= 4 { "-" } else { "" }, names[x % 4]))
        .collect();
    FiniteGroup::from_trusted(mul, 0, labels)
}

/// Every group of order at most `max` (up to isomorphism, `max <= 8`), named.
pub fn small_groups(max: usize) -> Vec<(String, FiniteGroup)> {
    assert!(max <= 8, "small group library stops at order 8");
    let z = FiniteGroup::cyclic;
    let mut out = Vec::new();
    for n in 1..=max {
        out.push((format!("Z/{n}"), z(n)));
        match n {
            4 => out.push(("Z/2xZ/2".into(), FiniteGroup::product(&z(2), &z(2)))),
            6 => out.push(("S3".into(), FiniteGroup::s3())),
            8 => {
                out.push(("Z/2xZ/4".into(), FiniteGroup::product(&z(2), &z(4))));
                let v = FiniteGroup::product(&z(2), &z(2));
                out.push(("Z/2xZ/2xZ/2".into(), FiniteGroup::product(&v, &z(2))));
                out.push(("D4".into(), dihedral(4)));
                out.push(("Q8".into(), quaternion()));
            }
            _ => {}
        }
    }
    out
}

/// Short name: invariant factors when abelian, a library name for small
/// nonabelian groups, otherwise the order.
pub fn describe_group(g: &FiniteGroup) -> String {
    if g.is_abelian() {
        let all: Vec<usize> = (0..g.order()).collect();
        return AbelianSubgroup::new(g, &all).pres.invariants();
    }
    if g.order() <= 8 {
        if let Some((name, _)) = small_groups(g.order()).into_iter().find(|(_, h)| h.order() == g.order() && h.isomorphic(g)) {
            return name;
        }
    }
    format!("nonabelian of order {}", g.order())
}

/// Automorphism group of `g` with each automorphism as an element permutation.
pub fn automorphisms(g: &FiniteGroup) -> (FiniteGroup, Vec<Vec<usize>>) {
    let mut perms: Vec<Vec<usize>> = g
        .homs(g)
        .into_iter()
        .filter(|f| f.iter().copied().collect::<BTreeSet<_>>().len() == g.order())
        .collect();
    perms.sort();
    // identity permutation is the smallest
    (FiniteGroup::from_permutations(perms.clone()), perms)
}

/// An abelian subgroup of a finite group with a presentation whose
/// coordinates are exponent vectors on chosen generators.
#[derive(Clone, Debug)]
pub struct AbelianSubgroup {
    pub gens: Vec<usize>,
    pub pres: FgAbelian,
    coords: HashMap<usize, Vec<i64>>,
}

impl AbelianSubgroup {
    /// `elems` must be an abelian subgroup of `g`.
    pub fn new(g: &FiniteGroup, elems: &[usize]) -> AbelianSubgroup {
        debug_assert!(g.is_subgroup(elems));
        let mut gens: Vec<usize> = Vec::new();
        let mut orders: Vec<i64> = Vec::new();
        let mut coords: HashMap<usize, Vec<i64>> = HashMap::new();
        coords.insert(g.identity(), vec![]);
        let mut rel_cols: Vec<Vec<i64>> = Vec::new();
        for &a in elems {
            if coords.contains_key(&a) {
                continue;
            }
            // smallest power of a already in the span
            let mut m = 1;
            let mut p = a;
            while !coords.contains_key(&p) {
                p = g.mul(p, a);
                m += 1;
            }
            let k = gens.len();
            let mut rel = coords[&p].clone();
            rel.resize(k + 1, 0);
            for x in rel.iter_mut() {
                *x = -*x;
            }
            rel[k] += m;
            rel_cols.push(rel);
            gens.push(a);
            orders.push(m);
            // extend span: s * a^j for j < m
            let old: Vec<(usize, Vec<i64>)> = coords.iter().map(|(x, c)| (*x, c.clone())).collect();
            let mut added = HashMap::new();
            for (x, c) in &old {
                let mut y = *x;
                for j in 1..m {
                    y = g.mul(y, a);
                    let mut cy = c.clone();
                    cy.resize(k + 1, 0);
                    cy[k] = j;
                    added.insert(y, cy);
                }
            }
            for c in coords.values_mut() {
                c.resize(k + 1, 0);
            }
            coords.extend(added);
        }
        let r = gens.len();
        let cols: Vec<Vec<i64>> = rel_cols
            .into_iter()
            .map(|mut c| {
                c.resize(r, 0);
                c
            })
            .collect();
        let pres = FgAbelian::new(r, Mat::from_cols(&cols, r));
        for c in coords.values_mut() {
            c.resize(r, 0);
        }
        AbelianSubgroup { gens, pres, coords }
    }

    pub fn coords(&self, a: usize) -> Option<&Vec<i64>> {
        self.coords.get(&a)
    }

    pub fn contains(&self, a: usize) -> bool {
        self.coords.contains_key(&a)
    }

    pub fn eval(&self, g: &FiniteGroup, x: &[i64]) -> usize {
        let mut r = g.identity();
        for (&gen, &k) in self.gens.iter().zip(x) {
            r = g.mul(r, g.pow(gen, k));
        }
        r
    }

    pub fn elements(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.coords.keys().copied().collect();
        v.sort();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_basics() {
        let g = FiniteGroup::s3();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        assert_eq!(g.center(), vec![0]);
        assert_eq!(g.homs(&FiniteGroup::cyclic(2)).len(), 2);
        assert_eq!(g.homs(&g).len(), 10);
        let a3 = g.closure(&[1]);
        assert_eq!(a3.len(), 3);
        assert!(g.is_normal(&a3));
        let (q, _) = g.quotient(&a3);
        assert!(q.isomorphic(&FiniteGroup::cyclic(2)));
    }

    #[test]
    fn semidirect_z3_by_z2_is_s3() {
        let z3 = FiniteGroup::cyclic(3);
        let z2 = FiniteGroup::cyclic(2);
        let act = vec![vec![0, 1, 2], vec![0, 2, 1]];
        let s = FiniteGroup::semidirect(&z3, &z2, &act);
        assert!(s.isomorphic(&FiniteGroup::s3()));
    }

    #[test]
    fn small_group_library() {
        let gs = small_groups(8);
        assert_eq!(gs.len(), 14);
        assert!(!quaternion().is_abelian());
        assert!(!dihedral(4).isomorphic(&quaternion()));
        assert_eq!(automorphisms(&FiniteGroup::cyclic(8)).0.order(), 4);
        assert_eq!(automorphisms(&FiniteGroup::s3()).0.order(), 6);
    }

    #[test]
    fn abelian_subgroup_presentation() {
        let g = FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(4));
        let all: Vec<usize> = (0..8).collect();
        let a = AbelianSubgroup::new(&g, &all);
        assert_eq!(a.pres.invariants(), "Z/2 + Z/4");
        for x in all {
            let c = a.coords(x).unwrap();
            assert_eq!(a.eval(&g, c), x);
        }
    }
}
