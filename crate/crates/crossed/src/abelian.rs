//! Finitely generated abelian groups given by presentations.

use std::fmt;

use crate::linalg::{kernel, snf, Mat};

/// `Z^rank / span(columns of relations)`.
#[derive(Clone, Debug)]
pub struct FgAbelian {
    rank: usize,
    relations: Mat,
    // canonical coordinates c = u x, reduced modulo d[i] (d[i] = 0 means free)
    u: Mat,
    u_inv: Mat,
    d: Vec<i64>,
}

impl PartialEq for FgAbelian {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.relations == other.relations
    }
}

impl Eq for FgAbelian {}

impl FgAbelian {
    pub fn new(rank: usize, relations: Mat) -> FgAbelian {
        assert_eq!(relations.rows(), rank, "relation matrix must have `rank` rows");
        let s = snf(&relations);
        let mut d = vec![0; rank];
        d[..s.rank()].copy_from_slice(&s.diag);
        FgAbelian {
            rank,
            relations,
            u: s.u,
            u_inv: s.u_inv,
            d,
        }
    }

    pub fn zero() -> FgAbelian {
        FgAbelian::new(0, Mat::zeros(0, 0))
    }

    pub fn free(rank: usize) -> FgAbelian {
        FgAbelian::new(rank, Mat::zeros(rank, 0))
    }

    pub fn cyclic(n: i64) -> FgAbelian {
        FgAbelian::new(1, Mat::from_rows(&[vec![n]], 1))
    }

    /// Diagonal presentation `Z/d_0 + Z/d_1 + ...` (a zero entry gives a copy of Z).
    pub fn diagonal(d: &[i64]) -> FgAbelian {
        let cols: Vec<Vec<i64>> = d
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, &x)| {
                let mut c = vec![0; d.len()];
                c[i] = x;
                c
            })
            .collect();
        FgAbelian::new(d.len(), Mat::from_cols(&cols, d.len()))
    }

    pub fn direct_sum(parts: &[&FgAbelian]) -> FgAbelian {
        let rels: Vec<&Mat> = parts.iter().map(|p| &p.relations).collect();
        let rank = parts.iter().map(|p| p.rank).sum();
        FgAbelian::new(rank, Mat::block_diag(&rels))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn relations(&self) -> &Mat {
        &self.relations
    }

    /// Canonical coordinates of `x`; equal elements give equal coordinates.
    pub fn coords(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.rank, "element has wrong length");
        let mut c = self.u.mul_vec(x);
        for (ci, &di) in c.iter_mut().zip(&self.d) {
            if di != 0 {
                *ci = ci.rem_euclid(di);
            }
        }
        c
    }

    /// Canonical representative of the class of `x`.
    pub fn reduce(&self, x: &[i64]) -> Vec<i64> {
        self.u_inv.mul_vec(&self.coords(x))
    }

    pub fn is_zero(&self, x: &[i64]) -> bool {
        self.coords(x).iter().all(|&c| c == 0)
    }

    pub fn eq_elem(&self, x: &[i64], y: &[i64]) -> bool {
        self.coords(x) == self.coords(y)
    }

    pub fn zero_elem(&self) -> Vec<i64> {
        vec![0; self.rank]
    }

    pub fn add(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        let s: Vec<i64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        self.reduce(&s)
    }

    pub fn neg(&self, x: &[i64]) -> Vec<i64> {
        let s: Vec<i64> = x.iter().map(|a| -a).collect();
        self.reduce(&s)
    }

    pub fn sub(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        self.add(x, &self.neg(y))
    }

    pub fn unit(&self, i: usize) -> Vec<i64> {
        let mut e = vec![0; self.rank];
        e[i] = 1;
        e
    }

    /// Invariant factors greater than one, in divisibility order.
    pub fn torsion(&self) -> Vec<i64> {
        self.d.iter().copied().filter(|&x| x > 1).collect()
    }

    pub fn free_rank(&self) -> usize {
        self.d.iter().filter(|&&x| x == 0).count()
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank() == 0 && self.torsion().is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank() == 0
    }

    pub fn order(&self) -> Option<u64> {
        self.is_finite()
            .then(|| self.torsion().iter().map(|&x| x as u64).product())
    }

    /// Canonical invariant-factor description, e.g. `Z^1 + Z/2`.
    pub fn invariants(&self) -> String {
        let mut parts = Vec::new();
        let f = self.free_rank();
        if f > 0 {
            parts.push(format!("Z^{f}"));
        }
        for t in self.torsion() {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    /// Abstract isomorphism test by invariant factors.
    pub fn isomorphic(&self, other: &FgAbelian) -> bool {
        self.free_rank() == other.free_rank() && self.torsion() == other.torsion()
    }

    /// Every element, as canonical representatives. `None` when infinite.
    pub fn elements(&self) -> Option<Vec<Vec<i64>>> {
        if !self.is_finite() {
            return None;
        }
        let mut out = vec![vec![0i64; self.rank]];
        for (i, &di) in self.d.iter().enumerate() {
            if di <= 1 {
                continue;
            }
            let mut next = Vec::with_capacity(out.len() * di as usize);
            for c in &out {
                for k in 0..di {
                    let mut c2 = c.clone();
                    c2[i] = k;
                    next.push(c2);
                }
            }
            out = next;
        }
        Some(out.iter().map(|c| self.u_inv.mul_vec(c)).collect())
    }

    /// Finite test set: all elements when finite; otherwise canonical
    /// combinations with free coordinates in `-radius..=radius`.
    pub fn sample(&self, radius: i64) -> Vec<Vec<i64>> {
        if let Some(e) = self.elements() {
            return e;
        }
        let mut out = vec![vec![0i64; self.rank]];
        for (i, &di) in self.d.iter().enumerate() {
            let range: Vec<i64> = match di {
                0 => (-radius..=radius).collect(),
                1 => continue,
                _ => (0..di).collect(),
            };
            let mut next = Vec::new();
            for c in &out {
                for &k in &range {
                    let mut c2 = c.clone();
                    c2[i] = k;
                    next.push(c2);
                }
            }
            out = next;
        }
        out.iter().map(|c| self.u_inv.mul_vec(c)).collect()
    }

    /// Diagonal form with inverse coordinate changes: `(s, to, from)` where
    /// `to` maps old generators to new coordinates and `from` back.
    pub fn simplify(&self) -> (FgAbelian, Mat, Mat) {
        let keep: Vec<usize> = (0..self.rank).filter(|&i| self.d[i] != 1).collect();
        let d: Vec<i64> = keep.iter().map(|&i| self.d[i]).collect();
        (
            FgAbelian::diagonal(&d),
            self.u.select_rows(&keep),
            self.u_inv.select_cols(&keep),
        )
    }

    /// Whether `m` (columns = images of generators of `self` in `target`)
    /// sends every relation of `self` to zero.
    pub fn hom_well_defined(&self, m: &Mat, target: &FgAbelian) -> bool {
        assert_eq!((m.rows(), m.cols()), (target.rank, self.rank));
        m.mul(&self.relations)
            .to_cols()
            .iter()
            .all(|c| target.is_zero(c))
    }

    /// Whether two matrices define the same map `self -> target`.
    pub fn maps_equal(&self, a: &Mat, b: &Mat, target: &FgAbelian) -> bool {
        a.sub(b).to_cols().iter().all(|c| target.is_zero(c))
    }

    /// Solve `gens * w = x` in `self`, where `gens` has columns in `self`.
    /// Returns `w` when `x` lies in the span.
    pub fn solve_in_span(&self, gens: &Mat, x: &[i64]) -> Option<Vec<i64>> {
        let big = gens.hstack(&self.relations);
        crate::linalg::solve(&big, x).map(|w| w[..gens.cols()].to_vec())
    }

    /// Lattice `{w : gens * w = 0 in self}`, as columns.
    pub fn relation_lattice(&self, gens: &Mat) -> Mat {
        let big = gens.hstack(&self.relations);
        let k = kernel(&big);
        let idx: Vec<usize> = (0..gens.cols()).collect();
        k.select_rows(&idx)
    }
}

impl fmt::Display for FgAbelian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.invariants())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_and_reduce() {
        let a = FgAbelian::new(2, Mat::from_rows(&[vec![2, 0], vec![0, 3]], 2));
        assert_eq!(a.invariants(), "Z/6");
        assert_eq!(a.order(), Some(6));
        assert_eq!(a.elements().unwrap().len(), 6);
        assert!(a.is_zero(&[2, 3]));
        assert!(!a.is_zero(&[1, 0]));
        assert!(a.eq_elem(&[3, 1], &[1, 4]));
        let b = FgAbelian::new(2, Mat::from_rows(&[vec![2], vec![0]], 1));
        assert_eq!(b.invariants(), "Z^1 + Z/2");
        assert_eq!(FgAbelian::zero().invariants(), "0");
    }

    #[test]
    fn simplify_roundtrip() {
        let a = FgAbelian::new(3, Mat::from_rows(&[vec![4, 6], vec![6, 9], vec![0, 0]], 2));
        let (s, to, from) = a.simplify();
        assert!(s.isomorphic(&a));
        for x in a.sample(2) {
            let y = from.mul_vec(&to.mul_vec(&x));
            assert!(a.eq_elem(&x, &y));
        }
    }
}
