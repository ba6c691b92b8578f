//! Dense integer matrices and the Smith normal form.
//!
//! Everything abelian in the crate bottoms out here: kernels, integer
//! solving and canonical forms of presentations.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn diag(d: &[i64]) -> Mat {
        let mut m = Mat::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    /// Builds from row vectors; `cols` is needed when there are no rows.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Mat {
        let mut m = Mat::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    /// Builds from column vectors; `rows` is needed when there are no columns.
    pub fn from_cols(cols: &[Vec<i64>], rows: usize) -> Mat {
        let mut m = Mat::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged matrix");
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: i64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn col(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<i64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn to_cols(&self) -> Vec<Vec<i64>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut out = Mat::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j));
            }
        }
        out
    }

    /// `[self ; other]`
    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn block_diag(blocks: &[&Mat]) -> Mat {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Mat::zeros(r, c);
        let (mut i0, mut j0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(i0 + i, j0 + j, b.get(i, j));
                }
            }
            i0 += b.rows;
            j0 += b.cols;
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Mat {
        let rows: Vec<Vec<i64>> = idx.iter().map(|&i| self.row(i)).collect();
        Mat::from_rows(&rows, self.cols)
    }

    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        let cols: Vec<Vec<i64>> = idx.iter().map(|&j| self.col(j)).collect();
        Mat::from_cols(&cols, self.rows)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_dst += k * row_src
    fn add_row(&mut self, dst: usize, src: usize, k: i64) {
        if k == 0 {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(dst, j) + k * self.get(src, j);
            self.set(dst, j, v);
        }
    }

    /// col_dst += k * col_src
    fn add_col(&mut self, dst: usize, src: usize, k: i64) {
        if k == 0 {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, dst) + k * self.get(i, src);
            self.set(i, dst, v);
        }
    }
}

/// Smith normal form `D = U * M * V` with the inverses of `U` and `V`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: Mat,
    pub u_inv: Mat,
    pub v: Mat,
    pub v_inv: Mat,
    /// Nonzero diagonal entries `d_0 | d_1 | ...`, all positive.
    pub diag: Vec<i64>,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// The full diagonal matrix `D` with the shape of the input.
    pub fn d(&self) -> Mat {
        let mut d = Mat::zeros(self.u.rows(), self.v.rows());
        for (i, &x) in self.diag.iter().enumerate() {
            d.set(i, i, x);
        }
        d
    }
}

pub fn snf(m: &Mat) -> Snf {
    let (r, c) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = Mat::identity(r);
    let mut u_inv = Mat::identity(r);
    let mut v = Mat::identity(c);
    let mut v_inv = Mat::identity(c);
    let mut diag = Vec::new();

    // Row and column operations are mirrored on the transforms so that
    // U*M*V stays equal to the working matrix throughout.
    let row_add = |a: &mut Mat, u: &mut Mat, u_inv: &mut Mat, dst, src, k| {
        a.add_row(dst, src, k);
        u.add_row(dst, src, k);
        u_inv.add_col(src, dst, -k);
    };
    let col_add = |a: &mut Mat, v: &mut Mat, v_inv: &mut Mat, dst, src, k| {
        a.add_col(dst, src, k);
        v.add_col(dst, src, k);
        v_inv.add_row(src, dst, -k);
    };

    for t in 0..r.min(c) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = a.get(i, j).abs();
                    if x != 0 && best.map_or(true, |(bi, bj)| x < a.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Snf {
                    u,
                    u_inv,
                    v,
                    v_inv,
                    diag,
                };
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            let p = a.get(t, t);
            let mut clean = true;
            for i in t + 1..r {
                let q = a.get(i, t) / p;
                row_add(&mut a, &mut u, &mut u_inv, i, t, -q);
                clean &= a.get(i, t) == 0;
            }
            for j in t + 1..c {
                let q = a.get(t, j) / p;
                col_add(&mut a, &mut v, &mut v_inv, j, t, -q);
                clean &= a.get(t, j) == 0;
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| a.get(i, j) % p != 0));
            if let Some(i) = bad {
                row_add(&mut a, &mut u, &mut u_inv, t, i, 1);
                continue;
            }
            break;
        }
        if a.get(t, t) < 0 {
            a.add_row(t, t, -2);
            u.add_row(t, t, -2);
            // the inverse of negating row t is negating column t
            for i in 0..r {
                let x = u_inv.get(i, t);
                u_inv.set(i, t, -x);
            }
        }
        diag.push(a.get(t, t));
    }
    Snf {
        u,
        u_inv,
        v,
        v_inv,
        diag,
    }
}

/// Basis (as columns) of the integer kernel `{x : m x = 0}`.
pub fn kernel(m: &Mat) -> Mat {
    let s = snf(m);
    let idx: Vec<usize> = (s.rank()..m.cols()).collect();
    s.v.select_cols(&idx)
}

/// Some integer solution of `m x = b`, if one exists.
pub fn solve(m: &Mat, b: &[i64]) -> Option<Vec<i64>> {
    assert_eq!(m.rows(), b.len());
    let s = snf(m);
    solve_with(&s, m.cols(), b)
}

pub(crate) fn solve_with(s: &Snf, cols: usize, b: &[i64]) -> Option<Vec<i64>> {
    let ub = s.u.mul_vec(b);
    let mut y = vec![0; cols];
    for (i, &x) in ub.iter().enumerate() {
        if i < s.rank() {
            if x % s.diag[i] != 0 {
                return None;
            }
            y[i] = x / s.diag[i];
        } else if x != 0 {
            return None;
        }
    }
    Some(s.v.mul_vec(&y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &Mat) -> Snf {
        let s = snf(m);
        assert_eq!(s.u.mul(m).mul(&s.v), s.d());
        assert_eq!(s.u.mul(&s.u_inv), Mat::identity(m.rows()));
        assert_eq!(s.v.mul(&s.v_inv), Mat::identity(m.cols()));
        for w in s.diag.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
        s
    }

    #[test]
    fn snf_small_cases() {
        let s = check(&Mat::from_rows(&[vec![2, 0], vec![0, 3]], 2));
        assert_eq!(s.diag, vec![1, 6]);
        let s = check(&Mat::zeros(2, 3));
        assert!(s.diag.is_empty());
        let s = check(&Mat::from_rows(&[vec![1]], 1));
        assert_eq!(s.diag, vec![1]);
        let s = check(&Mat::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3));
        assert_eq!(s.diag, vec![2, 6, 12]);
    }

    #[test]
    fn kernel_and_solve() {
        let m = Mat::from_rows(&[vec![1, 2, 3], vec![2, 4, 6]], 3);
        let k = kernel(&m);
        assert_eq!(k.cols(), 2);
        assert!(m.mul(&k).is_zero());
        let x = solve(&m, &[3, 6]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![3, 6]);
        assert!(solve(&m, &[1, 1]).is_none());
        assert!(solve(&Mat::from_rows(&[vec![2]], 1), &[1]).is_none());
    }
}
