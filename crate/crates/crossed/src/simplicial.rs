//! Truncated simplicial objects over a fixed base groupoid: simplicial
//! modules, simplicial n-crossed complexes given by a head and a tail,
//! simplicial groupoids that are levelwise twisted semidirect products and
//! the simplicial sets of the first classifying functor. Includes the
//! classifying functors, their inverses for n >= 3, Eilenberg–MacLane
//! objects, the ladder comparison and homotopy transport.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Debug;

use crate::abelian::FgAbelian;
use crate::coefficients::{self, GModule, Gpd, ModHom};
use crate::crs::{eval_word, Boundary, CrossedComplex, Level};
use crate::error::{invalid, Error, Result};
use crate::ext_torsor::Report;
use crate::group::{AbelianSubgroup, FiniteGroup};
use crate::groupoid::FiniteGroupoid;
use crate::linalg::{self, Mat};
use crate::xmod::CrossedModule;

// ---------------------------------------------------------------------------
// combinatorics of the simplex category

/// Order-preserving surjections `[k] -> [m]` as value lists, in lexicographic order.
pub fn surjections(k: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(k: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k + 1 {
            if *cur.last().unwrap() == m {
                out.push(cur.clone());
            }
            return;
        }
        let last = *cur.last().unwrap();
        for step in 0..2 {
            let v = last + step;
            let left = k + 1 - cur.len() - 1;
            if v <= m && m - v <= left {
                cur.push(v);
                go(k, m, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if k >= m {
        go(k, m, &mut vec![0], &mut out);
    }
    out
}

/// Coface `δᵢ: [k-1] -> [k]` as a value list.
fn coface(k: usize, i: usize) -> Vec<usize> {
    (0..k).map(|t| if t < i { t } else { t + 1 }).collect()
}

/// Codegeneracy `σⱼ: [k+1] -> [k]` as a value list.
fn codegen(k: usize, j: usize) -> Vec<usize> {
    (0..k + 2).map(|t| if t <= j { t } else { t - 1 }).collect()
}

/// 0/1 pattern of the operator induced by `theta` on the surjection basis.
fn pattern(src: &[Vec<usize>], tgt: &[Vec<usize>], theta: &[usize], m: usize) -> Mat {
    let mut p = Mat::zeros(tgt.len(), src.len());
    let index: HashMap<&Vec<usize>, usize> = tgt.iter().enumerate().map(|(i, s)| (s, i)).collect();
    for (c, sigma) in src.iter().enumerate() {
        let rho: Vec<usize> = theta.iter().map(|&t| sigma[t]).collect();
        let hit: BTreeSet<usize> = rho.iter().copied().collect();
        if hit.len() == m + 1 {
            p.set(index[&rho], c, 1);
        }
    }
    p
}

/// `p ⊗ I_r`.
fn kron(p: &Mat, r: usize) -> Mat {
    let mut out = Mat::zeros(p.rows() * r, p.cols() * r);
    for i in 0..p.rows() {
        for j in 0..p.cols() {
            let v = p.get(i, j);
            if v != 0 {
                for k in 0..r {
                    out.set(i * r + k, j * r + k, v);
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// module helpers

/// All elements when finite, otherwise zero, `±eᵢ` and `Σ eᵢ`.
pub(crate) fn test_vectors(v: &FgAbelian) -> (Vec<Vec<i64>>, bool) {
    if let Some(e) = v.elements() {
        return (e, true);
    }
    let r = v.rank();
    let mut out = vec![vec![0; r]];
    for i in 0..r {
        let u = v.unit(i);
        out.push(v.neg(&u));
        out.push(u);
    }
    out.push(v.reduce(&vec![1; r]));
    let set: BTreeSet<Vec<i64>> = out.into_iter().map(|x| v.reduce(&x)).collect();
    (set.into_iter().collect(), false)
}

fn sum_module(base: &Gpd, parts: &[&GModule]) -> GModule {
    if parts.is_empty() {
        GModule::zero(base.clone())
    } else {
        GModule::direct_sum(parts)
    }
}

/// A morphism between direct sums given by blocks `(target slot, source slot, map)`.
fn block_hom(base: &Gpd, src: &[&GModule], tgt: &[&GModule], blocks: &[(usize, usize, ModHom)]) -> ModHom {
    let mats = (0..base.num_objects())
        .map(|x| {
            let sr: Vec<usize> = src.iter().map(|m| m.value(x).rank()).collect();
            let tr: Vec<usize> = tgt.iter().map(|m| m.value(x).rank()).collect();
            let mut out = Mat::zeros(tr.iter().sum(), sr.iter().sum());
            for (r, c, h) in blocks {
                let inj = GModule::sum_injection(&tr, *r);
                let proj = GModule::sum_projection(&sr, *c);
                out = out.add(&inj.mul(&h.mats[x]).mul(&proj));
            }
            out
        })
        .collect();
    ModHom { mats }
}

fn slot_proj(base: &Gpd, parts: &[&GModule], i: usize) -> ModHom {
    ModHom {
        mats: (0..base.num_objects())
            .map(|x| {
                let r: Vec<usize> = parts.iter().map(|m| m.value(x).rank()).collect();
                GModule::sum_projection(&r, i)
            })
            .collect(),
    }
}

fn slot_inj(base: &Gpd, parts: &[&GModule], i: usize) -> ModHom {
    ModHom {
        mats: (0..base.num_objects())
            .map(|x| {
                let r: Vec<usize> = parts.iter().map(|m| m.value(x).rank()).collect();
                GModule::sum_injection(&r, i)
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// simplicial modules

/// A simplicial G-module truncated at level `top`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialModule {
    pub levels: Vec<GModule>,
    /// `faces[k][i]: levels[k] -> levels[k-1]`; `faces[0]` is empty.
    pub faces: Vec<Vec<ModHom>>,
    /// `degens[k][j]: levels[k] -> levels[k+1]` for `k < top`.
    pub degens: Vec<Vec<ModHom>>,
}

impl SimplicialModule {
    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn base(&self) -> &Gpd {
        self.levels[0].base()
    }

    pub fn face(&self, k: usize, i: usize) -> &ModHom {
        &self.faces[k][i]
    }

    pub fn degen(&self, k: usize, j: usize) -> &ModHom {
        &self.degens[k][j]
    }

    /// The constant simplicial module on `a`.
    pub fn constant(a: &GModule, top: usize) -> SimplicialModule {
        let id = ModHom::identity(a);
        SimplicialModule {
            levels: vec![a.clone(); top + 1],
            faces: (0..=top).map(|k| if k == 0 { vec![] } else { vec![id.clone(); k + 1] }).collect(),
            degens: (0..top).map(|k| vec![id.clone(); k + 1]).collect(),
        }
    }

    pub fn zero(base: &Gpd, top: usize) -> SimplicialModule {
        SimplicialModule::constant(&GModule::zero(base.clone()), top)
    }

    /// `K(A, m)` by Dold–Kan: level `k` is `A` to the power of the surjections
    /// `[k] -> [m]`, and `θ` sends the `σ` summand to the `σθ` summand, or to
    /// zero when `σθ` is not surjective.
    pub fn em(a: &GModule, m: usize, top: usize) -> SimplicialModule {
        let base = a.base().clone();
        let surj: Vec<Vec<Vec<usize>>> = (0..=top + 1).map(|k| surjections(k, m)).collect();
        let levels: Vec<GModule> = (0..=top)
            .map(|k| {
                let parts: Vec<&GModule> = vec![a; surj[k].len()];
                sum_module(&base, &parts)
            })
            .collect();
        let op = |k_src: usize, k_tgt: usize, theta: &[usize]| -> ModHom {
            let p = pattern(&surj[k_src], &surj[k_tgt], theta, m);
            ModHom {
                mats: (0..base.num_objects()).map(|x| kron(&p, a.value(x).rank())).collect(),
            }
        };
        let faces = (0..=top)
            .map(|k| if k == 0 { vec![] } else { (0..=k).map(|i| op(k, k - 1, &coface(k, i))).collect() })
            .collect();
        let degens = (0..top).map(|k| (0..=k).map(|j| op(k, k + 1, &codegen(k, j))).collect()).collect();
        SimplicialModule { levels, faces, degens }
    }

    /// Shape, equivariance and simplicial identity failures.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let top = self.top();
        for k in 1..=top {
            for (i, d) in self.faces[k].iter().enumerate() {
                if let Err(e) = d.validate(&self.levels[k], &self.levels[k - 1]) {
                    out.push(format!("d{i} at level {k}: {e}"));
                }
            }
        }
        for k in 0..top {
            for (j, s) in self.degens[k].iter().enumerate() {
                if let Err(e) = s.validate(&self.levels[k], &self.levels[k + 1]) {
                    out.push(format!("s{j} at level {k}: {e}"));
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        simplicial_identity_violations(
            top,
            &|k, i| self.faces[k][i].clone(),
            &|k, j| self.degens[k][j].clone(),
            &|k| self.levels[k].clone(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            Some(v) => invalid(v),
            None => Ok(()),
        }
    }

    /// `Σ (-1)ⁱ dᵢ: levels[k] -> levels[k-1]`.
    pub fn boundary(&self, k: usize) -> ModHom {
        let mut acc = ModHom::zero(&self.levels[k], &self.levels[k - 1]);
        for (i, d) in self.faces[k].iter().enumerate() {
            acc = if i % 2 == 0 { acc.add(d) } else { acc.sub(d) };
        }
        acc
    }

    /// Homology of the unnormalized chain complex at `k < top`.
    pub fn homology(&self, k: usize) -> Result<GModule> {
        if k >= self.top() {
            return Err(Error::Range(format!("homology at {k} needs level {}", k + 1)));
        }
        let zero = GModule::zero(self.base().clone());
        let out = if k == 0 {
            ModHom::zero(&self.levels[0], &zero)
        } else {
            self.boundary(k)
        };
        let c = if k == 0 { &zero } else { &self.levels[k - 1] };
        let h = coefficients::homology(&self.boundary(k + 1), &self.levels[k + 1], &out, &self.levels[k], c)?;
        Ok(h.module)
    }
}

/// Checks the simplicial identities for linear operators.
fn simplicial_identity_violations(
    top: usize,
    d: &dyn Fn(usize, usize) -> ModHom,
    s: &dyn Fn(usize, usize) -> ModHom,
    level: &dyn Fn(usize) -> GModule,
) -> Vec<String> {
    let mut out = Vec::new();
    // dᵢdⱼ = dⱼ₋₁dᵢ for i < j
    for k in 2..=top {
        for j in 0..=k {
            for i in 0..j {
                let l = d(k - 1, i).after(&d(k, j));
                let r = d(k - 1, j - 1).after(&d(k, i));
                if !l.equals(&r, &level(k), &level(k - 2)) {
                    out.push(format!("d{i}d{j} != d{}d{i} at level {k}", j - 1));
                }
            }
        }
    }
    // sᵢsⱼ = sⱼ₊₁sᵢ for i <= j
    for k in 0..top.saturating_sub(1) {
        for j in 0..=k {
            for i in 0..=j {
                let l = s(k + 1, i).after(&s(k, j));
                let r = s(k + 1, j + 1).after(&s(k, i));
                if !l.equals(&r, &level(k), &level(k + 2)) {
                    out.push(format!("s{i}s{j} != s{}s{i} at level {k}", j + 1));
                }
            }
        }
    }
    // mixed identities
    for k in 0..top {
        for j in 0..=k {
            let sj = s(k, j);
            for i in 0..=k + 1 {
                let l = d(k + 1, i).after(&sj);
                let r = if i < j {
                    s(k - 1, j - 1).after(&d(k, i))
                } else if i == j || i == j + 1 {
                    ModHom::identity(&level(k))
                } else {
                    s(k - 1, j).after(&d(k, i - 1))
                };
                if !l.equals(&r, &level(k), &level(k)) {
                    out.push(format!("d{i}s{j} identity fails at level {k}"));
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// vertex groups

/// Endomorphism groups of a groupoid with arrow/element translation.
#[derive(Clone, Debug)]
pub(crate) struct VertexGroups {
    groups: Vec<(FiniteGroup, Vec<usize>, HashMap<usize, usize>)>,
}

impl VertexGroups {
    pub(crate) fn new(g: &FiniteGroupoid) -> VertexGroups {
        let groups = (0..g.num_objects())
            .map(|x| {
                let (grp, ends) = g.end_group(x);
                let pos = ends.iter().enumerate().map(|(i, &a)| (a, i)).collect();
                (grp, ends, pos)
            })
            .collect();
        VertexGroups { groups }
    }

    /// `∏ imgsᵢ^{vᵢ}` in the vertex group at `x`, as an arrow.
    pub(crate) fn eval(&self, x: usize, imgs: &[usize], v: &[i64]) -> usize {
        let (g, ends, pos) = &self.groups[x];
        let idx: Vec<usize> = imgs.iter().map(|a| pos[a]).collect();
        ends[eval_word(g, &idx, v)]
    }

    fn commute(&self, x: usize, imgs: &[usize]) -> bool {
        let (g, _, pos) = &self.groups[x];
        imgs.iter()
            .all(|a| imgs.iter().all(|b| g.mul(pos[a], pos[b]) == g.mul(pos[b], pos[a])))
    }

    fn is_vertex_arrow(&self, x: usize, a: usize) -> bool {
        self.groups[x].2.contains_key(&a)
    }
}

fn commute_in(g: &FiniteGroup, imgs: &[usize]) -> bool {
    imgs.iter().all(|&a| imgs.iter().all(|&b| g.mul(a, b) == g.mul(b, a)))
}

// ---------------------------------------------------------------------------
// simplicial n-crossed complexes

/// Augmentation of the head into the top of the tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Aug {
    /// `n = 2`: per object, the vertex-group arrow hit by each generator of level 0.
    Base(Vec<Vec<usize>>),
    /// `n = 3`: per object, the element of `C₂(x)` hit by each generator of level 0.
    Group(Vec<Vec<usize>>),
    /// `n >= 4`: into the module at level `n - 1`.
    Module(ModHom),
}

/// A simplicial n-crossed complex: the constant part `tail` of rank `n - 1`,
/// the simplicial module `head` at level `n`, and the augmentation joining them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialCrs {
    pub n: usize,
    pub tail: CrossedComplex,
    pub head: SimplicialModule,
    pub aug: Aug,
}

/// The groupoid as a complex of the given rank with all higher levels zero.
pub fn trivial_tail(pi: &Gpd, rank: usize) -> Result<CrossedComplex> {
    match rank {
        0 => CrossedComplex::from_set(pi.clone()),
        1 => Ok(CrossedComplex::from_groupoid(pi.clone())),
        _ => {
            let z = GModule::zero(pi.clone());
            let higher = (3..=rank)
                .map(|k| Level {
                    module: z.clone(),
                    boundary: if k == 3 {
                        Boundary::IntoGroup(vec![vec![]; pi.num_objects()])
                    } else {
                        Boundary::Module(ModHom::zero(&z, &z))
                    },
                })
                .collect();
            CrossedComplex::new(CrossedModule::trivial(pi.clone()), higher, rank)
        }
    }
}

impl SimplicialCrs {
    pub fn new(n: usize, tail: CrossedComplex, head: SimplicialModule, aug: Aug) -> Result<SimplicialCrs> {
        let s = SimplicialCrs { n, tail, head, aug };
        match s.violations().into_iter().next() {
            Some(v) => invalid(v),
            None => Ok(s),
        }
    }

    pub fn base(&self) -> &Gpd {
        self.tail.base()
    }

    pub fn top(&self) -> usize {
        self.head.top()
    }

    /// `K(Ãₙ, m)`: tail the groupoid, head `K(A, m)`, zero augmentation.
    pub fn em(n: usize, a: &GModule, m: usize, top: usize) -> Result<SimplicialCrs> {
        if n < 2 {
            return Err(Error::Range("simplicial crossed complexes need n >= 2".into()));
        }
        let pi = a.base().clone();
        let tail = trivial_tail(&pi, n - 1)?;
        let head = SimplicialModule::em(a, m, top);
        let l0 = &head.levels[0];
        let aug = match n {
            2 => Aug::Base((0..pi.num_objects()).map(|x| vec![pi.id(x); l0.value(x).rank()]).collect()),
            3 => Aug::Group(
                (0..pi.num_objects())
                    .map(|x| vec![tail.c2().group(x).identity(); l0.value(x).rank()])
                    .collect(),
            ),
            _ => Aug::Module(ModHom::zero(l0, tail.module(n - 1).unwrap())),
        };
        SimplicialCrs::new(n, tail, head, aug)
    }

    /// `d₀ⁱ: levels[i] -> levels[0]`.
    pub fn d0_power(&self, i: usize) -> ModHom {
        let mut acc = ModHom::identity(&self.head.levels[i]);
        for k in (1..=i).rev() {
            acc = self.head.faces[k][0].after(&acc);
        }
        acc
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = self.head.violations();
        if !out.is_empty() {
            return out;
        }
        let n = self.n;
        if n < 2 {
            return vec!["simplicial crossed complexes need n >= 2".into()];
        }
        if self.tail.rank() != n - 1 {
            return vec![format!("tail has rank {}, expected {}", self.tail.rank(), n - 1)];
        }
        if !self.tail.base().same_as(self.head.base()) {
            return vec!["head and tail live over different groupoids".into()];
        }
        let b = self.base().clone();
        let l0 = &self.head.levels[0];
        let top = self.top();
        match &self.aug {
            Aug::Module(h) => {
                if n < 4 {
                    return vec!["module augmentation needs n >= 4".into()];
                }
                let cm = self.tail.module(n - 1).unwrap();
                if let Err(e) = h.validate(l0, cm) {
                    return vec![format!("augmentation: {e}")];
                }
                if top >= 1 {
                    let l = h.after(&self.head.faces[1][0]);
                    let r = h.after(&self.head.faces[1][1]);
                    if !l.equals(&r, &self.head.levels[1], cm) {
                        out.push("augmentation does not equalize d0 and d1".into());
                    }
                }
                match &self.tail.level(n - 1).unwrap().boundary {
                    Boundary::Module(d) => {
                        if !d.after(h).is_zero(l0, self.tail.module(n - 2).unwrap()) {
                            out.push("boundary after augmentation is nonzero".into());
                        }
                    }
                    Boundary::IntoGroup(imgs) => {
                        for x in 0..b.num_objects() {
                            let g = self.tail.c2().group(x);
                            for j in 0..h.mats[x].cols() {
                                if eval_word(g, &imgs[x], &h.mats[x].col(j)) != g.identity() {
                                    out.push("boundary after augmentation is nonzero".into());
                                }
                            }
                        }
                    }
                }
            }
            Aug::Group(imgs) => {
                if n != 3 {
                    return vec!["group augmentation needs n = 3".into()];
                }
                let c2 = self.tail.c2();
                for x in 0..b.num_objects() {
                    let g = c2.group(x);
                    if imgs[x].len() != l0.value(x).rank() || imgs[x].iter().any(|&a| a >= g.order()) {
                        return vec!["augmentation has the wrong shape".into()];
                    }
                    if !commute_in(g, &imgs[x]) {
                        out.push("augmentation images do not commute".into());
                    }
                    let rel = l0.value(x).relations();
                    for j in 0..rel.cols() {
                        if eval_word(g, &imgs[x], &rel.col(j)) != g.identity() {
                            out.push("augmentation does not respect relations".into());
                        }
                    }
                    for &a in &imgs[x] {
                        if !b.is_identity(self.tail.xm().delta(x, a)) {
                            out.push("boundary after augmentation is nonzero".into());
                        }
                    }
                }
                for t in 0..b.num_arrows() {
                    let (x, y) = (b.src(t), b.tgt(t));
                    for j in 0..l0.value(x).rank() {
                        let v = l0.act(t, &l0.value(x).unit(j));
                        if eval_word(c2.group(y), &imgs[y], &v) != c2.act(t, imgs[x][j]) {
                            out.push("augmentation is not equivariant".into());
                        }
                    }
                }
                if top >= 1 {
                    let l1 = &self.head.levels[1];
                    for x in 0..b.num_objects() {
                        for j in 0..l1.value(x).rank() {
                            let e = l1.value(x).unit(j);
                            let a = eval_word(c2.group(x), &imgs[x], &self.head.faces[1][0].mats[x].mul_vec(&e));
                            let c = eval_word(c2.group(x), &imgs[x], &self.head.faces[1][1].mats[x].mul_vec(&e));
                            if a != c {
                                out.push("augmentation does not equalize d0 and d1".into());
                            }
                        }
                    }
                }
                // the image of ∂₂ acts trivially on the head
                for x in 0..b.num_objects() {
                    for c in 0..c2.group(x).order() {
                        let t = self.tail.xm().delta(x, c);
                        for (k, l) in self.head.levels.iter().enumerate() {
                            let v = l.value(x);
                            if !v.maps_equal(l.action(t), &Mat::identity(v.rank()), v) {
                                out.push(format!("image of the crossed module acts nontrivially on level {k}"));
                            }
                        }
                    }
                }
            }
            Aug::Base(imgs) => {
                if n != 2 {
                    return vec!["base augmentation needs n = 2".into()];
                }
                let vg = VertexGroups::new(&b);
                for x in 0..b.num_objects() {
                    if imgs[x].len() != l0.value(x).rank() || imgs[x].iter().any(|&a| !vg.is_vertex_arrow(x, a)) {
                        return vec!["augmentation has the wrong shape".into()];
                    }
                    if !vg.commute(x, &imgs[x]) {
                        out.push("augmentation images do not commute".into());
                    }
                    let rel = l0.value(x).relations();
                    for j in 0..rel.cols() {
                        if !b.is_identity(vg.eval(x, &imgs[x], &rel.col(j))) {
                            out.push("augmentation does not respect relations".into());
                        }
                    }
                }
                for t in 0..b.num_arrows() {
                    let (x, y) = (b.src(t), b.tgt(t));
                    for j in 0..l0.value(x).rank() {
                        let v = l0.act(t, &l0.value(x).unit(j));
                        if vg.eval(y, &imgs[y], &v) != b.conj(t, imgs[x][j]) {
                            out.push("augmentation is not equivariant".into());
                        }
                    }
                }
                for k in 0..=top {
                    let d0k = self.d0_power(k);
                    let l = &self.head.levels[k];
                    for x in 0..b.num_objects() {
                        let v = l.value(x);
                        for j in 0..v.rank() {
                            let t = vg.eval(x, &imgs[x], &d0k.mats[x].mul_vec(&v.unit(j)));
                            if !v.maps_equal(l.action(t), &Mat::identity(v.rank()), v) {
                                out.push(format!("augmented level {k} is not crossed"));
                            }
                        }
                    }
                }
                if top >= 1 {
                    let l1 = &self.head.levels[1];
                    for x in 0..b.num_objects() {
                        for j in 0..l1.value(x).rank() {
                            let e = l1.value(x).unit(j);
                            let a = vg.eval(x, &imgs[x], &self.head.faces[1][0].mats[x].mul_vec(&e));
                            let c = vg.eval(x, &imgs[x], &self.head.faces[1][1].mats[x].mul_vec(&e));
                            if a != c {
                                out.push("augmentation does not equalize d0 and d1".into());
                            }
                        }
                    }
                }
            }
        }
        out.dedup();
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            Some(v) => invalid(v),
            None => Ok(()),
        }
    }

    /// The top tail term as a module, the augmentation as a matrix into it,
    /// and for `n = 3` the presentations of `C₂`.
    fn ceil(&self) -> Result<(GModule, ModHom, Option<Vec<AbelianSubgroup>>)> {
        match &self.aug {
            Aug::Module(h) => Ok((self.tail.module(self.n - 1).unwrap().clone(), h.clone(), None)),
            Aug::Group(imgs) => {
                let c2 = self.tail.c2();
                let b = self.base();
                let all: Vec<Vec<usize>> = (0..b.num_objects()).map(|x| (0..c2.group(x).order()).collect()).collect();
                if (0..b.num_objects()).any(|x| !c2.group(x).is_abelian()) {
                    return Err(Error::Range("the classifying functor at n = 3 needs an abelian C₂".into()));
                }
                let (cm, pres) = c2.abelian_module(&all)?;
                let mats = (0..b.num_objects())
                    .map(|x| {
                        let cols: Vec<Vec<i64>> = imgs[x].iter().map(|&a| pres[x].coords(a).unwrap().clone()).collect();
                        Mat::from_cols(&cols, cm.value(x).rank())
                    })
                    .collect();
                Ok((cm, ModHom { mats }, Some(pres)))
            }
            Aug::Base(_) => Err(Error::Range("n = 2 classifies into simplicial groupoids".into())),
        }
    }
}

/// Face and degeneracy blocks shared by the classifying functors: slots
/// `[C⁰, …, Cⁱ⁻¹]` at level `i`, optionally followed by a constant slot.
struct WbarBlocks<'a> {
    head: &'a SimplicialModule,
    base: Gpd,
    ceil: Option<GModule>,
}

impl WbarBlocks<'_> {
    fn slots(&self, i: usize) -> Vec<&GModule> {
        let mut v: Vec<&GModule> = self.head.levels[..i].iter().collect();
        if let Some(c) = &self.ceil {
            v.push(c);
        }
        v
    }

    fn module(&self, i: usize) -> GModule {
        sum_module(&self.base, &self.slots(i))
    }

    fn id(&self, r: usize) -> ModHom {
        ModHom::identity(&self.head.levels[r])
    }

    fn ceil_block(&self, tgt_slot: usize, src_slot: usize, out: &mut Vec<(usize, usize, ModHom)>) {
        if let Some(c) = &self.ceil {
            out.push((tgt_slot, src_slot, ModHom::identity(c)));
        }
    }

    /// `d₀` at level `i >= 1`; slot `i - 1` is sent along `to_ceil` when present.
    fn d0(&self, i: usize, to_ceil: Option<&ModHom>) -> ModHom {
        let mut bl = Vec::new();
        for r in 0..i - 1 {
            bl.push((r, r, self.id(r)));
        }
        if let Some(h) = to_ceil {
            bl.push((i - 1, i - 1, h.clone()));
        }
        self.ceil_block(i - 1, i, &mut bl);
        block_hom(&self.base, &self.slots(i), &self.slots(i - 1), &bl)
    }

    /// `dⱼ` at level `i` for `j >= 1`.
    fn dj(&self, i: usize, j: usize) -> ModHom {
        let mut bl = Vec::new();
        for r in 0..i {
            if r < i - j {
                bl.push((r, r, self.id(r)));
            } else if r >= 1 {
                bl.push((r - 1, r, self.head.faces[r][r - (i - j)].clone()));
            }
        }
        self.ceil_block(i - 1, i, &mut bl);
        block_hom(&self.base, &self.slots(i), &self.slots(i - 1), &bl)
    }

    /// `sⱼ` at level `i`.
    fn sj(&self, i: usize, j: usize) -> ModHom {
        let mut bl = Vec::new();
        for r in 0..i {
            if r < i - j {
                bl.push((r, r, self.id(r)));
            } else {
                bl.push((r + 1, r, self.head.degens[r][r - (i - j)].clone()));
            }
        }
        self.ceil_block(i + 1, i, &mut bl);
        block_hom(&self.base, &self.slots(i), &self.slots(i + 1), &bl)
    }
}

/// `W̄ₙ` for `n >= 3`: an object of `scrsₙ` to one of `scrsₙ₋₁`, one level higher.
pub fn wbar(s: &SimplicialCrs) -> Result<SimplicialCrs> {
    let n = s.n;
    if n < 3 {
        return Err(Error::Range("use wbar2 or wbar1 below n = 3".into()));
    }
    let (cm, augm, pres) = s.ceil()?;
    let base = s.base().clone();
    let top = s.top() + 1;
    let wb = WbarBlocks {
        head: &s.head,
        base: base.clone(),
        ceil: Some(cm.clone()),
    };
    let levels: Vec<GModule> = (0..=top).map(|i| wb.module(i)).collect();
    let mut faces = vec![vec![]];
    for i in 1..=top {
        let to_ceil = augm.after(&s.d0_power(i - 1));
        let mut f = vec![wb.d0(i, Some(&to_ceil))];
        for j in 1..=i {
            f.push(wb.dj(i, j));
        }
        faces.push(f);
    }
    let degens = (0..top).map(|i| (0..=i).map(|j| wb.sj(i, j)).collect()).collect();
    let head = SimplicialModule { levels, faces, degens };
    let new_tail = s.tail.truncate(n - 2)?;
    let aug = if n == 3 {
        let pres = pres.unwrap();
        let xm = s.tail.xm();
        let c2 = s.tail.c2();
        Aug::Base(
            (0..base.num_objects())
                .map(|x| {
                    (0..cm.value(x).rank())
                        .map(|j| xm.delta(x, pres[x].eval(c2.group(x), &cm.value(x).unit(j))))
                        .collect()
                })
                .collect(),
        )
    } else {
        match &s.tail.level(n - 1).unwrap().boundary {
            Boundary::Module(d) => Aug::Module(d.clone()),
            Boundary::IntoGroup(imgs) => Aug::Group(imgs.clone()),
        }
    };
    SimplicialCrs::new(n - 1, new_tail, head, aug)
}

/// Kernels and quotients used by the loop construction.
#[derive(Clone, Debug)]
pub struct LoopMaps {
    /// `Kᵢ -> Cⁱ⁺¹`
    pub incl: Vec<ModHom>,
    /// `Kᵢ -> K̃ᵢ`
    pub proj: Vec<ModHom>,
    /// `K̃ᵢ -> Kᵢ`, a set-theoretic section on generators
    pub sec: Vec<ModHom>,
    pub kernels: Vec<GModule>,
}

/// The inverse of `W̄ₙ₊₁` on objects of `scrsₙ` with `n >= 2`: the tail gains
/// level 0 of the head, and the head is the loop object built from
/// `Kᵢ = ker(d₁⋯dᵢ₊₁)` modulo the degenerate part. For `n = 2`, level 0
/// must be finite since it becomes a crossed module.
pub fn loop_object(s: &SimplicialCrs) -> Result<(SimplicialCrs, LoopMaps)> {
    let p = s.n;
    let top_in = s.top();
    if top_in < 1 {
        return Err(Error::Range("the loop construction needs level 1".into()));
    }
    let h = &s.head;
    let lv = |k: usize| &h.levels[k];
    let top = top_in - 1;
    let mut kernels = Vec::new();
    let mut incl = Vec::new();
    for i in 0..=top {
        let mut acc = ModHom::identity(lv(i + 1));
        for t in (1..=i + 1).rev() {
            acc = h.faces[t][t].after(&acc);
        }
        let k = coefficients::kernel(&acc, lv(i + 1), lv(0))?;
        kernels.push(k.module);
        incl.push(k.incl);
    }
    let mut levels = Vec::new();
    let mut proj = Vec::new();
    let mut sec = Vec::new();
    let mut s0r: Vec<Option<ModHom>> = Vec::new();
    for i in 0..=top {
        if i == 0 {
            levels.push(kernels[0].clone());
            proj.push(ModHom::identity(&kernels[0]));
            sec.push(ModHom::identity(&kernels[0]));
            s0r.push(None);
            continue;
        }
        let f = h.degens[i][0].after(&incl[i - 1]);
        let r = coefficients::lift(&f, &incl[i], &kernels[i], lv(i + 1))
            .ok_or_else(|| Error::Invalid(format!("s0 does not preserve the kernel at {i}")))?;
        let q = coefficients::cokernel(&r, &kernels[i - 1], &kernels[i])?;
        levels.push(q.module);
        proj.push(q.proj);
        sec.push(q.section);
        s0r.push(Some(r));
    }
    let through = |op: &ModHom, i: usize, to: usize| -> Result<ModHom> {
        let f = op.after(&incl[i]);
        coefficients::lift(&f, &incl[to], &kernels[to], lv(to + 1))
            .ok_or_else(|| Error::Invalid(format!("operator does not preserve the kernels at level {i}")))
    };
    let mut faces = vec![vec![]];
    for i in 1..=top {
        let mut f = Vec::new();
        for j in 0..=i {
            let op = if j == 0 {
                // d₁ - d₀ + s₀d₁d₀
                let d1 = &h.faces[i + 1][1];
                let d0 = &h.faces[i + 1][0];
                let corr = h.degens[i - 1][0].after(&h.faces[i][1]).after(d0);
                d1.sub(d0).add(&corr)
            } else {
                h.faces[i + 1][j + 1].clone()
            };
            let l = through(&op, i, i - 1)?;
            if let Some(r) = &s0r[i] {
                if !proj[i - 1].after(&l).after(r).is_zero(&kernels[i - 1], &levels[i - 1]) {
                    return invalid(format!("face {j} at level {i} does not descend"));
                }
            }
            f.push(proj[i - 1].after(&l).after(&sec[i]));
        }
        faces.push(f);
    }
    let mut degens = Vec::new();
    for i in 0..top {
        let mut d = Vec::new();
        for j in 0..=i {
            let l = through(&h.degens[i + 1][j + 1], i, i + 1)?;
            if let Some(r) = &s0r[i] {
                if !proj[i + 1].after(&l).after(r).is_zero(&kernels[i - 1], &levels[i + 1]) {
                    return invalid(format!("degeneracy {j} at level {i} does not descend"));
                }
            }
            d.push(proj[i + 1].after(&l).after(&sec[i]));
        }
        degens.push(d);
    }
    let head = SimplicialModule { levels, faces, degens };
    let a0 = h.faces[1][0].after(&incl[0]);
    let (tail, aug) = match &s.aug {
        Aug::Base(imgs) => {
            // level 0 becomes the crossed module of the new tail
            let b = s.base().clone();
            let vg = VertexGroups::new(&b);
            let (gg, els) = lv(0).to_ggroup()?;
            let delta = (0..b.num_objects())
                .map(|x| els[x].iter().map(|e| vg.eval(x, &imgs[x], e)).collect())
                .collect();
            let xm = CrossedModule::new(gg, delta)?;
            let index = |x: usize, v: &[i64]| {
                let val = lv(0).value(x);
                els[x].iter().position(|e| val.eq_elem(e, v)).unwrap()
            };
            let gimgs = (0..b.num_objects())
                .map(|x| (0..a0.mats[x].cols()).map(|j| index(x, &a0.mats[x].col(j))).collect())
                .collect();
            (CrossedComplex::from_xm(xm), Aug::Group(gimgs))
        }
        other => {
            let boundary = match other {
                Aug::Module(m) => Boundary::Module(m.clone()),
                Aug::Group(imgs) => Boundary::IntoGroup(imgs.clone()),
                Aug::Base(_) => unreachable!(),
            };
            let mut higher = s.tail.higher().to_vec();
            higher.push(Level {
                module: lv(0).clone(),
                boundary,
            });
            (CrossedComplex::new(s.tail.xm().clone(), higher, p)?, Aug::Module(a0))
        }
    };
    let out = SimplicialCrs::new(p + 1, tail, head, aug)?;
    Ok((out, LoopMaps { incl, proj, sec, kernels }))
}

/// `loop ∘ W̄ ≅ id` for `n >= 4`: the canonical levelwise maps are
/// isomorphisms compatible with all structure.
pub fn check_loop_wbar(s: &SimplicialCrs) -> Result<Report> {
    if s.n < 4 {
        return Err(Error::Range("the round trip is checked for n >= 4".into()));
    }
    let w = wbar(s)?;
    let (l, maps) = loop_object(&w)?;
    let mut r = Report::default();
    let base = s.base().clone();
    let cm = s.tail.module(s.n - 1).unwrap();
    let mut phi = Vec::new();
    for i in 0..=s.top() {
        let mut slots: Vec<&GModule> = s.head.levels[..=i].iter().collect();
        slots.push(cm);
        let inj = slot_inj(&base, &slots, i);
        let lifted = coefficients::lift(&inj, &maps.incl[i], &maps.kernels[i], &w.head.levels[i + 1]);
        match lifted {
            Some(m) => phi.push(maps.proj[i].after(&m)),
            None => {
                r.push("slot inclusion lands in the kernel", false, format!("level {i}"));
                return Ok(r);
            }
        }
    }
    let iso = (0..=s.top()).all(|i| coefficients::is_iso(&phi[i], &s.head.levels[i], &l.head.levels[i]).unwrap_or(false));
    r.push("levelwise isomorphism", iso, "");
    let mut faces_ok = true;
    for k in 1..=s.top() {
        for i in 0..=k {
            let a = l.head.faces[k][i].after(&phi[k]);
            let b = phi[k - 1].after(&s.head.faces[k][i]);
            faces_ok &= a.equals(&b, &s.head.levels[k], &l.head.levels[k - 1]);
        }
    }
    r.push("faces commute", faces_ok, "");
    let mut degens_ok = true;
    for k in 0..s.top() {
        for j in 0..=k {
            let a = l.head.degens[k][j].after(&phi[k]);
            let b = phi[k + 1].after(&s.head.degens[k][j]);
            degens_ok &= a.equals(&b, &s.head.levels[k], &l.head.levels[k + 1]);
        }
    }
    r.push("degeneracies commute", degens_ok, "");
    r.push("tail is recovered", l.tail == s.tail, "");
    let aug_ok = match (&l.aug, &s.aug) {
        (Aug::Module(a), Aug::Module(b)) => a.after(&phi[0]).equals(b, &s.head.levels[0], cm),
        _ => false,
    };
    r.push("augmentation is recovered", aug_ok, "");
    Ok(r)
}

// ---------------------------------------------------------------------------
// simplicial groupoids

/// An arrow `(f, v)` of a levelwise semidirect product: `f` in the base and
/// `v` in the level module at the target of `f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GArrow {
    pub f: usize,
    pub v: Vec<i64>,
}

/// A face or degeneracy: linear on the module part; when `shift` is set, the
/// base part is also multiplied by the augmentation of the selected vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GOp {
    pub mats: ModHom,
    pub shift: Option<ModHom>,
}

#[derive(Clone, Debug)]
struct Twist {
    /// per object, the vertex-group arrow hit by each generator of `C⁰`
    imgs: Vec<Vec<usize>>,
    /// per level and slot `s`, the map `M_k -> C⁰` selecting `d₀ˢ bₛ`
    sels: Vec<Vec<ModHom>>,
}

/// A truncated simplicial groupoid, identity on objects over `base`, whose
/// level `k` has arrows `(f, v)` with `v` in `levels[k] = ⊕ slots[k]`.
/// Composition is `(g, b)(f, a) = (gf, b + ⊕ᵣ wᵣ·aᵣ)` with
/// `wᵣ = δᵣ₊₁(b)⋯δ_{k-1}(b)·g`, or just `g` when untwisted.
#[derive(Clone, Debug)]
pub struct SimplicialGroupoid {
    base: Gpd,
    vg: VertexGroups,
    pub levels: Vec<GModule>,
    pub slots: Vec<Vec<GModule>>,
    pub faces: Vec<Vec<GOp>>,
    pub degens: Vec<Vec<GOp>>,
    twist: Option<Twist>,
}

const PAIR_CAP: usize = 4000;

impl SimplicialGroupoid {
    /// `Π ⋉ M` levelwise for a simplicial module `M`.
    pub fn from_module(m: &SimplicialModule) -> SimplicialGroupoid {
        let op = |h: &ModHom| GOp {
            mats: h.clone(),
            shift: None,
        };
        SimplicialGroupoid {
            base: m.base().clone(),
            vg: VertexGroups::new(m.base()),
            levels: m.levels.clone(),
            slots: m.levels.iter().map(|l| vec![l.clone()]).collect(),
            faces: m.faces.iter().map(|f| f.iter().map(op).collect()).collect(),
            degens: m.degens.iter().map(|f| f.iter().map(op).collect()).collect(),
            twist: None,
        }
    }

    /// `K(Ã₁, m)`: the semidirect product of `Π` with `K(A, m)`.
    pub fn em(a: &GModule, m: usize, top: usize) -> SimplicialGroupoid {
        SimplicialGroupoid::from_module(&SimplicialModule::em(a, m, top))
    }

    /// The constant simplicial groupoid on the base.
    pub fn constant(pi: &Gpd, top: usize) -> SimplicialGroupoid {
        SimplicialGroupoid::from_module(&SimplicialModule::zero(pi, top))
    }

    pub fn base(&self) -> &Gpd {
        &self.base
    }

    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn is_twisted(&self) -> bool {
        self.twist.is_some()
    }

    pub fn src(&self, a: &GArrow) -> usize {
        self.base.src(a.f)
    }

    pub fn tgt(&self, a: &GArrow) -> usize {
        self.base.tgt(a.f)
    }

    pub fn identity(&self, k: usize, x: usize) -> GArrow {
        GArrow {
            f: self.base.id(x),
            v: vec![0; self.levels[k].value(x).rank()],
        }
    }

    fn delta_at(&self, y: usize, sel: &ModHom, v: &[i64]) -> usize {
        match &self.twist {
            Some(t) => self.vg.eval(y, &t.imgs[y], &sel.mats[y].mul_vec(v)),
            None => self.base.id(y),
        }
    }

    /// `g ∘ f` at level `k`.
    pub fn compose(&self, k: usize, g: &GArrow, f: &GArrow) -> GArrow {
        let (y, z) = (self.tgt(f), self.tgt(g));
        let slots = &self.slots[k];
        let mut out = Vec::new();
        let mut off = 0;
        for (r, sm) in slots.iter().enumerate() {
            let rr = sm.value(y).rank();
            let a_r = &f.v[off..off + rr];
            off += rr;
            let mut w = g.f;
            if let Some(t) = &self.twist {
                for s in (r + 1..slots.len()).rev() {
                    let d = self.delta_at(z, &t.sels[k][s], &g.v);
                    w = self.base.compose(d, w);
                }
            }
            out.extend(sm.act(w, a_r));
        }
        let v = self.levels[k].value(z).reduce(&self.levels[k].value(z).add(&g.v, &out));
        GArrow {
            f: self.base.compose(g.f, f.f),
            v,
        }
    }

    fn apply(&self, op: &GOp, k_tgt: usize, a: &GArrow) -> GArrow {
        let y = self.tgt(a);
        let f = match (&op.shift, &self.twist) {
            (Some(sel), Some(_)) => self.base.compose(self.delta_at(y, sel, &a.v), a.f),
            _ => a.f,
        };
        GArrow {
            f,
            v: self.levels[k_tgt].value(y).reduce(&op.mats.mats[y].mul_vec(&a.v)),
        }
    }

    /// `dᵢ` on an arrow at level `k`.
    pub fn face(&self, k: usize, i: usize, a: &GArrow) -> GArrow {
        self.apply(&self.faces[k][i], k - 1, a)
    }

    /// `sⱼ` on an arrow at level `k`.
    pub fn degen(&self, k: usize, j: usize, a: &GArrow) -> GArrow {
        self.apply(&self.degens[k][j], k + 1, a)
    }

    /// All arrows at level `k` when finite, otherwise every base arrow with
    /// test vectors; the flag says whether the list is exhaustive.
    pub fn arrows(&self, k: usize) -> (Vec<GArrow>, bool) {
        let mut out = Vec::new();
        let mut exhaustive = true;
        for f in 0..self.base.num_arrows() {
            let (vs, ex) = test_vectors(self.levels[k].value(self.base.tgt(f)));
            exhaustive &= ex;
            out.extend(vs.into_iter().map(|v| GArrow { f, v }));
        }
        (out, exhaustive)
    }

    /// Groupoid laws, functoriality of faces and degeneracies, and the
    /// simplicial identities, on the arrows of [`arrows`](Self::arrows).
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let top = self.top();
        let samples: Vec<Vec<GArrow>> = (0..=top).map(|k| self.arrows(k).0).collect();
        for k in 0..=top {
            let arr = &samples[k];
            let mut pairs = Vec::new();
            'p: for g in arr {
                for f in arr {
                    if self.tgt(f) == self.src(g) {
                        pairs.push((g, f));
                        if pairs.len() >= PAIR_CAP {
                            break 'p;
                        }
                    }
                }
            }
            for a in arr {
                let l = self.compose(k, &self.identity(k, self.tgt(a)), a);
                let r = self.compose(k, a, &self.identity(k, self.src(a)));
                if l != *a || r != *a {
                    out.push(format!("identity law fails at level {k}"));
                    break;
                }
            }
            let mut count = 0;
            'a: for (g, f) in &pairs {
                for e in arr {
                    if self.tgt(e) != self.src(f) {
                        continue;
                    }
                    count += 1;
                    if count > PAIR_CAP {
                        break 'a;
                    }
                    let l = self.compose(k, &self.compose(k, g, f), e);
                    let r = self.compose(k, g, &self.compose(k, f, e));
                    if l != r {
                        out.push(format!("composition is not associative at level {k}"));
                        break 'a;
                    }
                }
            }
            for (g, f) in &pairs {
                let gf = self.compose(k, g, f);
                if k >= 1 {
                    for i in 0..=k {
                        let l = self.face(k, i, &gf);
                        let r = self.compose(k - 1, &self.face(k, i, g), &self.face(k, i, f));
                        if l != r {
                            out.push(format!("d{i} is not a functor at level {k}"));
                        }
                    }
                }
                if k < top {
                    for j in 0..=k {
                        let l = self.degen(k, j, &gf);
                        let r = self.compose(k + 1, &self.degen(k, j, g), &self.degen(k, j, f));
                        if l != r {
                            out.push(format!("s{j} is not a functor at level {k}"));
                        }
                    }
                }
            }
        }
        out.extend(pointwise_identity_violations(
            top,
            &|k, i, a| self.face(k, i, a),
            &|k, j, a| self.degen(k, j, a),
            &|k| samples[k].clone(),
        ));
        out.dedup();
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            Some(v) => invalid(v),
            None => Ok(()),
        }
    }

    /// Number of arrows `x -> x` at level `k`, when finite.
    pub fn vertex_count(&self, k: usize, x: usize) -> Option<u64> {
        let n = self.base.hom(x, x).len() as u64;
        self.levels[k].value(x).order().map(|o| o * n)
    }
}

/// The simplicial identities checked on sample elements.
pub(crate) fn pointwise_identity_violations<E: PartialEq>(
    top: usize,
    d: &dyn Fn(usize, usize, &E) -> E,
    s: &dyn Fn(usize, usize, &E) -> E,
    samples: &dyn Fn(usize) -> Vec<E>,
) -> Vec<String> {
    let mut out = Vec::new();
    for k in 2..=top {
        for x in samples(k) {
            for j in 0..=k {
                for i in 0..j {
                    if d(k - 1, i, &d(k, j, &x)) != d(k - 1, j - 1, &d(k, i, &x)) {
                        out.push(format!("d{i}d{j} != d{}d{i} at level {k}", j - 1));
                    }
                }
            }
        }
    }
    for k in 0..top.saturating_sub(1) {
        for x in samples(k) {
            for j in 0..=k {
                for i in 0..=j {
                    if s(k + 1, i, &s(k, j, &x)) != s(k + 1, j + 1, &s(k, i, &x)) {
                        out.push(format!("s{i}s{j} != s{}s{i} at level {k}", j + 1));
                    }
                }
            }
        }
    }
    for k in 0..top {
        for x in samples(k) {
            for j in 0..=k {
                let sx = s(k, j, &x);
                for i in 0..=k + 1 {
                    let l = d(k + 1, i, &sx);
                    let ok = if i < j {
                        l == s(k - 1, j - 1, &d(k, i, &x))
                    } else if i == j || i == j + 1 {
                        l == x
                    } else {
                        l == s(k - 1, j, &d(k, i - 1, &x))
                    };
                    if !ok {
                        out.push(format!("d{i}s{j} identity fails at level {k}"));
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// `W̄₂`: an object of `scrs₂` to a simplicial groupoid one level higher.
/// Level `k` is `⊕_{r<k} Cʳ`, twisted by the augmentation.
pub fn wbar2(s: &SimplicialCrs) -> Result<SimplicialGroupoid> {
    let imgs = match &s.aug {
        Aug::Base(imgs) => imgs.clone(),
        _ => return Err(Error::Range("wbar2 needs n = 2".into())),
    };
    let base = s.base().clone();
    let top = s.top() + 1;
    let wb = WbarBlocks {
        head: &s.head,
        base: base.clone(),
        ceil: None,
    };
    let twisted = imgs.iter().flatten().any(|&a| !base.is_identity(a));
    let levels: Vec<GModule> = (0..=top).map(|i| wb.module(i)).collect();
    let slots: Vec<Vec<GModule>> = (0..=top).map(|i| wb.slots(i).into_iter().cloned().collect()).collect();
    let sel = |k: usize, r: usize| s.d0_power(r).after(&slot_proj(&base, &wb.slots(k), r));
    let mut faces = vec![vec![]];
    for i in 1..=top {
        let mut f = vec![GOp {
            mats: wb.d0(i, None),
            shift: if twisted { Some(sel(i, i - 1)) } else { None },
        }];
        for j in 1..=i {
            f.push(GOp {
                mats: wb.dj(i, j),
                shift: None,
            });
        }
        faces.push(f);
    }
    let degens = (0..top)
        .map(|i| {
            (0..=i)
                .map(|j| GOp {
                    mats: wb.sj(i, j),
                    shift: None,
                })
                .collect()
        })
        .collect();
    let twist = twisted.then(|| Twist {
        imgs,
        sels: (0..=top).map(|k| (0..k).map(|r| sel(k, r)).collect()).collect(),
    });
    Ok(SimplicialGroupoid {
        vg: VertexGroups::new(&base),
        base,
        levels,
        slots,
        faces,
        degens,
        twist,
    })
}

// ---------------------------------------------------------------------------
// the first classifying functor

/// An `n`-simplex of `W̄₁Σ`: arrows `uᵢ ∈ Σᵢ` with `tgt uᵢ = src uᵢ₋₁`,
/// and `vertex = src uₙ₋₁` (any object when `n = 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    pub vertex: usize,
    pub arrows: Vec<GArrow>,
}

/// The simplicial set `W̄₁Σ`, truncated one level above `Σ`.
#[derive(Clone, Debug)]
pub struct Wbar1 {
    pub src: SimplicialGroupoid,
}

impl Wbar1 {
    pub fn new(src: SimplicialGroupoid) -> Wbar1 {
        Wbar1 { src }
    }

    pub fn top(&self) -> usize {
        self.src.top() + 1
    }

    /// `z_j`: `z₀ = tgt u₀` and `z_j = src u_{j-1}`.
    fn z(&self, s: &Simplex, j: usize) -> usize {
        if s.arrows.is_empty() {
            s.vertex
        } else if j == 0 {
            self.src.tgt(&s.arrows[0])
        } else {
            self.src.src(&s.arrows[j - 1])
        }
    }

    /// All `n`-simplices when finite, otherwise those built from test arrows.
    pub fn simplices(&self, n: usize) -> (Vec<Simplex>, bool) {
        let g = &self.src;
        if n == 0 {
            let v = (0..g.base.num_objects())
                .map(|x| Simplex {
                    vertex: x,
                    arrows: vec![],
                })
                .collect();
            return (v, true);
        }
        let mut exhaustive = true;
        let per: Vec<Vec<GArrow>> = (0..n)
            .map(|i| {
                let (a, ex) = g.arrows(i);
                exhaustive &= ex;
                a
            })
            .collect();
        let mut out = Vec::new();
        let mut partial: Vec<Vec<GArrow>> = per[0].iter().map(|a| vec![a.clone()]).collect();
        for level in per.iter().skip(1) {
            let mut next = Vec::new();
            for p in &partial {
                let want = g.src(p.last().unwrap());
                for a in level {
                    if g.tgt(a) == want {
                        let mut q = p.clone();
                        q.push(a.clone());
                        next.push(q);
                    }
                }
            }
            partial = next;
        }
        for p in partial {
            out.push(Simplex {
                vertex: g.src(p.last().unwrap()),
                arrows: p,
            });
        }
        (out, exhaustive)
    }

    pub fn face(&self, i: usize, s: &Simplex) -> Simplex {
        let g = &self.src;
        let n = s.arrows.len();
        let u = &s.arrows;
        if i == 0 {
            let vertex = g.tgt(&u[n - 1]);
            return Simplex {
                vertex,
                arrows: u[..n - 1].to_vec(),
            };
        }
        let mut arrows = Vec::with_capacity(n - 1);
        for r in 0..n - 1 {
            let a = if r + 1 < n - i {
                u[r].clone()
            } else if r + 1 == n - i {
                g.compose(r, &u[r], &g.face(r + 1, 0, &u[r + 1]))
            } else {
                g.face(r + 1, r + 1 + i - n, &u[r + 1])
            };
            arrows.push(a);
        }
        Simplex {
            vertex: s.vertex,
            arrows,
        }
    }

    pub fn degen(&self, i: usize, s: &Simplex) -> Simplex {
        let g = &self.src;
        let n = s.arrows.len();
        let u = &s.arrows;
        let mut arrows = Vec::with_capacity(n + 1);
        for r in 0..=n {
            let a = if r < n - i {
                u[r].clone()
            } else if r == n - i {
                g.identity(r, self.z(s, n - i))
            } else {
                g.degen(r - 1, r - 1 + i - n, &u[r - 1])
            };
            arrows.push(a);
        }
        Simplex {
            vertex: s.vertex,
            arrows,
        }
    }

    pub fn identity_violations(&self) -> Vec<String> {
        pointwise_identity_violations(
            self.top(),
            &|_, i, s| self.face(i, s),
            &|_, j, s| self.degen(j, s),
            &|k| self.simplices(k).0,
        )
    }

    /// Number of `k`-simplices for each level, when finite.
    pub fn counts(&self) -> Vec<Option<usize>> {
        (0..=self.top())
            .map(|k| {
                let (s, ex) = self.simplices(k);
                ex.then_some(s.len())
            })
            .collect()
    }
}

/// An `m`-simplex of `L_Π(A, n+1)`: a nerve simplex `(f₀, …, f_{m-1})` with
/// `fᵢ: zᵢ₊₁ -> zᵢ`, plus face values in `A(z_m)` at levels `n+1` and `n+2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LSimplex {
    pub vertex: usize,
    pub nerve: Vec<usize>,
    pub values: Vec<Vec<i64>>,
}

/// Compares `W̄₁ K(Ã₁, n)` with `L_Π(A, n+1)` at levels `<= n+2`: the
/// explicit correspondence is a bijection, covers the nerve projection
/// and lands in cocycles at level `n + 2`.
pub fn wbar1_em_vs_l(a: &GModule, n: usize) -> Result<Report> {
    if n < 1 {
        return Err(Error::Range("the comparison needs n >= 1".into()));
    }
    let pi = a.base().clone();
    let w = Wbar1::new(SimplicialGroupoid::em(a, n, n + 1));
    let nerve = Wbar1::new(SimplicialGroupoid::constant(&pi, n + 1));
    let mut r = Report::default();
    let transport = |f: usize, v: &[i64]| a.act(pi.inv(f), v);
    let to_l = |s: &Simplex| -> LSimplex {
        let m = s.arrows.len();
        let nerve: Vec<usize> = s.arrows.iter().map(|u| u.f).collect();
        let mut values = Vec::new();
        if m == n + 1 {
            values.push(transport(s.arrows[n].f, &s.arrows[n].v));
        } else if m == n + 2 {
            let (fa, aa) = (s.arrows[n].f, &s.arrows[n].v);
            let (fb, alpha) = (s.arrows[n + 1].f, &s.arrows[n + 1].v);
            let z = s.vertex;
            let val = a.value(z);
            let rk = a.value(pi.tgt(fb)).rank();
            let part = |j: usize| alpha[j * rk..(j + 1) * rk].to_vec();
            values.push(transport(pi.compose(fa, fb), aa));
            let mut alt = val.zero_elem();
            for i in 1..=n + 1 {
                let ai = transport(fb, &part(i - 1));
                if i <= n {
                    values.push(ai.clone());
                }
                alt = if (n + 1 - i) % 2 == 0 { val.add(&alt, &ai) } else { val.sub(&alt, &ai) };
            }
            values.push(val.reduce(&alt));
        }
        LSimplex {
            vertex: s.vertex,
            nerve,
            values,
        }
    };
    let project = |s: &Simplex| Simplex {
        vertex: s.vertex,
        arrows: s.arrows.iter().map(|u| GArrow { f: u.f, v: vec![] }).collect(),
    };
    // the coordinate change on (a, a₁, …, aₙ₊₁) is unimodular
    let k = n + 2;
    let mut p = Mat::zeros(k, k);
    for i in 0..=n {
        p.set(i, i, 1);
    }
    for i in 1..=n + 1 {
        p.set(n + 1, i, if (n + 1 - i) % 2 == 0 { 1 } else { -1 });
    }
    let sn = linalg::snf(&p);
    r.push(
        "top coordinate change is unimodular",
        sn.rank() == k && sn.diag.iter().all(|&d| d == 1),
        "",
    );
    for m in 0..=n + 2 {
        let (simp, ex) = w.simplices(m);
        let images: BTreeSet<LSimplex> = simp.iter().map(to_l).collect();
        r.push(
            &format!("level {m}: correspondence is injective"),
            images.len() == simp.len(),
            if ex { "exhaustive" } else { "sampled" },
        );
        if ex {
            // |L_m| = Σ over nerve simplices of |A(z_m)|^c
            let c = if m <= n { 0 } else if m == n + 1 { 1 } else { n + 2 };
            let (nv, _) = nerve.simplices(m);
            let mut total: u64 = 0;
            for s in &nv {
                let o = a.value(s.vertex).order().unwrap_or(0);
                total += o.pow(c as u32);
            }
            r.push(
                &format!("level {m}: correspondence is surjective"),
                total == simp.len() as u64,
                format!("{} simplices", simp.len()),
            );
        }
        let mut proj_ok = true;
        for s in &simp {
            if m >= 1 {
                for i in 0..=m {
                    proj_ok &= project(&w.face(i, s)) == nerve.face(i, &project(s));
                }
            }
            if m < n + 2 {
                for j in 0..=m {
                    proj_ok &= project(&w.degen(j, s)) == nerve.degen(j, &project(s));
                }
            }
        }
        r.push(&format!("level {m}: nerve projection is simplicial"), proj_ok, "");
    }
    let (top_simp, ex) = w.simplices(n + 2);
    let mut coc = true;
    for s in &top_simp {
        let z = s.vertex;
        let val = a.value(z);
        let fb = s.arrows[n + 1].f;
        let mut acc = val.zero_elem();
        for i in 0..=n + 2 {
            let b = to_l(&w.face(i, s)).values[0].clone();
            let b = if i == 0 { transport(fb, &b) } else { b };
            acc = if i % 2 == 0 { val.add(&acc, &b) } else { val.sub(&acc, &b) };
        }
        coc &= val.is_zero(&acc);
    }
    r.push(
        &format!("level {}: faces satisfy the cocycle condition", n + 2),
        coc,
        if ex { "exhaustive" } else { "sampled" },
    );
    Ok(r)
}

/// An Eilenberg–MacLane object `K(Ãₙ, m)` truncated at `m + 2`.
#[derive(Clone, Debug)]
pub enum EmObject {
    /// `n = 1`: the simplicial groupoid `Π ⋉ K(A, m)`
    Groupoid(SimplicialGroupoid),
    Crs(SimplicialCrs),
}

pub fn em_object(n: usize, a: &GModule, m: usize) -> Result<EmObject> {
    if n < 1 || m < 1 {
        return Err(Error::Range("em_object needs n >= 1 and m >= 1".into()));
    }
    if n == 1 {
        return Ok(EmObject::Groupoid(SimplicialGroupoid::em(a, m, m + 2)));
    }
    Ok(EmObject::Crs(SimplicialCrs::em(n, a, m, m + 2)?))
}

// ---------------------------------------------------------------------------
// the ladder

/// `σ*: X_p -> X_k` for a surjection `σ: [k] -> [p]`, as a composite of
/// degeneracies: `σ = σ'' ∘ σⱼ` with `j` the first collapsed index.
fn surjection_op(h: &SimplicialModule, sigma: &[usize]) -> ModHom {
    let k = sigma.len() - 1;
    let p = sigma[k];
    if k == p {
        return ModHom::identity(&h.levels[k]);
    }
    let j = (0..k).find(|&t| sigma[t] == sigma[t + 1]).unwrap();
    let rest: Vec<usize> = (0..k).map(|t| if t <= j { sigma[t] } else { sigma[t + 1] }).collect();
    h.degens[k - 1][j].after(&surjection_op(h, &rest))
}

/// Extends `x: A -> H_p` to `K(A, p) -> H` by `φ_k = (σ* x)_σ`, and checks
/// that it is a levelwise isomorphism of simplicial modules.
pub fn dold_kan_compare(h: &SimplicialModule, a: &GModule, p: usize, x: &ModHom) -> Result<(Vec<ModHom>, Report)> {
    let top = h.top();
    let e = SimplicialModule::em(a, p, top);
    let base = h.base().clone();
    let mut r = Report::default();
    let mut cyc = true;
    if p >= 1 {
        for d in &h.faces[p] {
            cyc &= d.after(x).is_zero(a, &h.levels[p - 1]);
        }
    }
    r.push("generator is a normalized cycle", cyc, format!("degree {p}"));
    let phi: Vec<ModHom> = (0..=top)
        .map(|k| {
            let ops: Vec<ModHom> = surjections(k, p).iter().map(|s| surjection_op(h, s).after(x)).collect();
            ModHom {
                mats: (0..base.num_objects())
                    .map(|o| {
                        ops.iter()
                            .fold(Mat::zeros(h.levels[k].value(o).rank(), 0), |acc, m| acc.hstack(&m.mats[o]))
                    })
                    .collect(),
            }
        })
        .collect();
    let mut bad = None;
    for k in 0..=top {
        if !coefficients::is_iso(&phi[k], &e.levels[k], &h.levels[k])? {
            bad.get_or_insert(format!("level {k} is not an isomorphism"));
        }
    }
    r.push("levelwise isomorphism", bad.is_none(), bad.take().unwrap_or_default());
    for k in 1..=top {
        for i in 0..=k {
            let l = h.faces[k][i].after(&phi[k]);
            let rr = phi[k - 1].after(&e.faces[k][i]);
            if !l.equals(&rr, &e.levels[k], &h.levels[k - 1]) {
                bad.get_or_insert(format!("d{i} at level {k}: {:?} vs {:?}", l.mats, rr.mats));
            }
        }
    }
    r.push("faces commute", bad.is_none(), bad.take().unwrap_or_default());
    for k in 0..top {
        for j in 0..=k {
            let l = h.degens[k][j].after(&phi[k]);
            let rr = phi[k + 1].after(&e.degens[k][j]);
            if !l.equals(&rr, &e.levels[k], &h.levels[k + 1]) {
                bad.get_or_insert(format!("s{j} at level {k}: {:?} vs {:?}", l.mats, rr.mats));
            }
        }
    }
    r.push("degeneracies commute", bad.is_none(), bad.take().unwrap_or_default());
    Ok((phi, r))
}

fn aug_is_trivial(s: &SimplicialCrs) -> bool {
    let b = s.base();
    match &s.aug {
        Aug::Base(imgs) => imgs.iter().flatten().all(|&a| b.is_identity(a)),
        Aug::Group(imgs) => imgs
            .iter()
            .enumerate()
            .all(|(x, v)| v.iter().all(|&a| a == s.tail.c2().group(x).identity())),
        Aug::Module(h) => h.is_zero(&s.head.levels[0], s.tail.module(s.n - 1).unwrap()),
    }
}

/// The heads of a simplicial groupoid as a simplicial module, when untwisted.
fn untwisted_module(g: &SimplicialGroupoid) -> Option<SimplicialModule> {
    if g.is_twisted() {
        return None;
    }
    Some(SimplicialModule {
        levels: g.levels.clone(),
        faces: g.faces.iter().map(|f| f.iter().map(|o| o.mats.clone()).collect()).collect(),
        degens: g.degens.iter().map(|f| f.iter().map(|o| o.mats.clone()).collect()).collect(),
    })
}

/// `W̄ₙ K(Ãₙ, m) ≅ K(Ãₙ₋₁, m + 1)` for `n >= 2`, with the Dold–Kan
/// isomorphism generated by the degree `m + 1` copy of `A`. Failures carry
/// a counterexample in their detail.
pub fn check_em_ladder(n: usize, a: &GModule, m: usize) -> Result<Report> {
    if n < 2 || m < 1 {
        return Err(Error::Range("the ladder needs n >= 2 and m >= 1".into()));
    }
    let base = a.base().clone();
    let src = SimplicialCrs::em(n, a, m, m + 1)?;
    let mut r = Report::default();
    let head = if n == 2 {
        let g = wbar2(&src)?;
        r.push("result is untwisted", !g.is_twisted(), "");
        untwisted_module(&g).ok_or_else(|| Error::Invalid("twisted result".into()))?
    } else {
        let w = wbar(&src)?;
        let expected = SimplicialCrs::em(n - 1, a, m + 1, m + 2)?;
        r.push("tails agree", w.tail == expected.tail, "");
        r.push("augmentation is trivial", aug_is_trivial(&w), "");
        w.head
    };
    let mut slots: Vec<&GModule> = src.head.levels[..=m].iter().collect();
    let ceil;
    if n >= 3 {
        ceil = src.ceil()?.0;
        slots.push(&ceil);
    }
    let x = slot_inj(&base, &slots, m);
    let (_, rep) = dold_kan_compare(&head, a, m + 1, &x)?;
    r.checks.extend(rep.checks);
    Ok(r)
}

// ---------------------------------------------------------------------------
// homotopies

/// A simplicial homotopy `α ≃ β: X -> Y` with `d₀h₀ = α` and
/// `d_{q+1}h_q = β`; `h[q][j]: X_q -> Y_{q+1}` for `q < top`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homotopy {
    pub alpha: Vec<ModHom>,
    pub beta: Vec<ModHom>,
    pub h: Vec<Vec<ModHom>>,
}

/// The homotopy identities checked on sample elements.
#[allow(clippy::too_many_arguments)]
fn pointwise_homotopy_violations<E: PartialEq>(
    top: usize,
    dx: &dyn Fn(usize, usize, &E) -> E,
    sx: &dyn Fn(usize, usize, &E) -> E,
    dy: &dyn Fn(usize, usize, &E) -> E,
    sy: &dyn Fn(usize, usize, &E) -> E,
    alpha: &dyn Fn(usize, &E) -> E,
    beta: &dyn Fn(usize, &E) -> E,
    h: &dyn Fn(usize, usize, &E) -> E,
    samples: &dyn Fn(usize) -> Vec<E>,
) -> Vec<String> {
    let mut out = Vec::new();
    let mut fail = |s: String| out.push(s);
    for q in 0..=top {
        for x in samples(q) {
            for (name, f) in [("α", alpha), ("β", beta)] {
                if q >= 1 {
                    for i in 0..=q {
                        if dy(q, i, &f(q, &x)) != f(q - 1, &dx(q, i, &x)) {
                            fail(format!("{name} does not commute with d{i} at level {q}"));
                        }
                    }
                }
                if q < top {
                    for j in 0..=q {
                        if sy(q, j, &f(q, &x)) != f(q + 1, &sx(q, j, &x)) {
                            fail(format!("{name} does not commute with s{j} at level {q}"));
                        }
                    }
                }
            }
            if q >= top {
                continue;
            }
            if dy(q + 1, 0, &h(q, 0, &x)) != alpha(q, &x) {
                fail(format!("d0h0 != α at level {q}"));
            }
            if dy(q + 1, q + 1, &h(q, q, &x)) != beta(q, &x) {
                fail(format!("d{}h{q} != β at level {q}", q + 1));
            }
            for j in 0..=q {
                let hx = h(q, j, &x);
                for i in 0..=q + 1 {
                    let l = dy(q + 1, i, &hx);
                    let ok = if i < j {
                        l == h(q - 1, j - 1, &dx(q, i, &x))
                    } else if i == j + 1 && j < q {
                        l == dy(q + 1, j + 1, &h(q, j + 1, &x))
                    } else if i > j + 1 {
                        l == h(q - 1, j, &dx(q, i - 1, &x))
                    } else {
                        true
                    };
                    if !ok {
                        fail(format!("d{i}h{j} identity fails at level {q}"));
                    }
                }
                if q + 1 < top {
                    for i in 0..=q + 1 {
                        let l = sy(q + 1, i, &hx);
                        let ok = if i <= j {
                            l == h(q + 1, j + 1, &sx(q, i, &x))
                        } else {
                            l == h(q + 1, j, &sx(q, i - 1, &x))
                        };
                        if !ok {
                            fail(format!("s{i}h{j} identity fails at level {q}"));
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

type Elem = (usize, Vec<i64>);

/// Zero and the generators at every object; exact for linear maps.
fn generator_samples(m: &GModule) -> Vec<Elem> {
    let mut out = Vec::new();
    for x in 0..m.base().num_objects() {
        let v = m.value(x);
        out.push((x, v.zero_elem()));
        for i in 0..v.rank() {
            out.push((x, v.reduce(&v.unit(i))));
        }
    }
    out
}

/// Shape, equivariance and identity failures of a homotopy between
/// simplicial modules of the same height.
pub fn homotopy_violations(x: &SimplicialModule, y: &SimplicialModule, t: &Homotopy) -> Vec<String> {
    let top = x.top();
    if y.top() != top || t.alpha.len() != top + 1 || t.beta.len() != top + 1 || t.h.len() != top {
        return vec!["homotopy has the wrong height".into()];
    }
    let mut out = Vec::new();
    for q in 0..=top {
        for (name, f) in [("α", &t.alpha[q]), ("β", &t.beta[q])] {
            if let Err(e) = f.validate(&x.levels[q], &y.levels[q]) {
                out.push(format!("{name} at level {q}: {e}"));
            }
        }
        if q < top {
            if t.h[q].len() != q + 1 {
                return vec![format!("h at level {q} has the wrong length")];
            }
            for (j, hj) in t.h[q].iter().enumerate() {
                if let Err(e) = hj.validate(&x.levels[q], &y.levels[q + 1]) {
                    out.push(format!("h{j} at level {q}: {e}"));
                }
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    let ap = |m: &ModHom, tgt: &GModule, e: &Elem| (e.0, m.apply(tgt, e.0, &e.1));
    pointwise_homotopy_violations(
        top,
        &|k, i, e| ap(&x.faces[k][i], &x.levels[k - 1], e),
        &|k, j, e| ap(&x.degens[k][j], &x.levels[k + 1], e),
        &|k, i, e| ap(&y.faces[k][i], &y.levels[k - 1], e),
        &|k, j, e| ap(&y.degens[k][j], &y.levels[k + 1], e),
        &|k, e| ap(&t.alpha[k], &y.levels[k], e),
        &|k, e| ap(&t.beta[k], &y.levels[k], e),
        &|k, j, e| ap(&t.h[k][j], &y.levels[k + 1], e),
        &|k| generator_samples(&x.levels[k]),
    )
}

/// The homotopy on `W̄ₙ` induced slotwise: slots `r < i-j` by `α`, slot
/// `i-j` by zero, slot `r >= i-j` into slot `r+1` by `h_{r-(i-j)}`, and the
/// identity on the constant slot.
fn transported(x: &SimplicialModule, y: &SimplicialModule, t: &Homotopy, ceil: Option<&GModule>, base: &Gpd) -> Homotopy {
    let wx = WbarBlocks {
        head: x,
        base: base.clone(),
        ceil: ceil.cloned(),
    };
    let wy = WbarBlocks {
        head: y,
        base: base.clone(),
        ceil: ceil.cloned(),
    };
    let top = x.top() + 1;
    let level_map = |maps: &[ModHom], i: usize| {
        let mut bl: Vec<(usize, usize, ModHom)> = (0..i).map(|r| (r, r, maps[r].clone())).collect();
        if let Some(c) = ceil {
            bl.push((i, i, ModHom::identity(c)));
        }
        block_hom(base, &wx.slots(i), &wy.slots(i), &bl)
    };
    let alpha = (0..=top).map(|i| level_map(&t.alpha, i)).collect();
    let beta = (0..=top).map(|i| level_map(&t.beta, i)).collect();
    let h = (0..top)
        .map(|i| {
            (0..=i)
                .map(|j| {
                    let mut bl = Vec::new();
                    for r in 0..i {
                        if r < i - j {
                            bl.push((r, r, t.alpha[r].clone()));
                        } else {
                            bl.push((r + 1, r, t.h[r][r - (i - j)].clone()));
                        }
                    }
                    if let Some(c) = ceil {
                        bl.push((i + 1, i, ModHom::identity(c)));
                    }
                    block_hom(base, &wx.slots(i), &wy.slots(i + 1), &bl)
                })
                .collect()
        })
        .collect();
    Homotopy { alpha, beta, h }
}

/// Result of transporting a homotopy through a classifying functor.
#[derive(Clone, Debug)]
pub struct Transport {
    pub homotopy: Homotopy,
    pub report: Report,
}

/// Transports a homotopy between the heads of two objects of `scrsₙ` with
/// the same tail (the base functor is the identity) to their images under
/// `W̄ₙ`, and checks the identities there. For `n = 2` the check runs
/// pointwise on the simplicial groupoids.
pub fn transport_homotopy(src: &SimplicialCrs, tgt: &SimplicialCrs, t: &Homotopy) -> Result<Transport> {
    if src.n != tgt.n || src.tail != tgt.tail {
        return Err(Error::Range("homotopy transport needs a common tail".into()));
    }
    if let Some(v) = homotopy_violations(&src.head, &tgt.head, t).into_iter().next() {
        return invalid(format!("input homotopy: {v}"));
    }
    let base = src.base().clone();
    let mut r = Report::default();
    let aug_ok = [&t.alpha[0], &t.beta[0]].iter().all(|f| match (&src.aug, &tgt.aug) {
        (Aug::Module(a), Aug::Module(b)) => b.after(f).equals(a, &src.head.levels[0], src.tail.module(src.n - 1).unwrap()),
        _ => aug_is_trivial(src) && aug_is_trivial(tgt),
    });
    r.push("maps commute with the augmentation", aug_ok, "");
    if src.n >= 3 {
        let (cm, _, _) = src.ceil()?;
        let out = transported(&src.head, &tgt.head, t, Some(&cm), &base);
        let wx = wbar(src)?;
        let wy = wbar(tgt)?;
        let v = homotopy_violations(&wx.head, &wy.head, &out);
        r.push("transported identities hold", v.is_empty(), v.join("; "));
        return Ok(Transport { homotopy: out, report: r });
    }
    let out = transported(&src.head, &tgt.head, t, None, &base);
    let gx = wbar2(src)?;
    let gy = wbar2(tgt)?;
    let ap = |m: &ModHom, g: &SimplicialGroupoid, k: usize, a: &GArrow| GArrow {
        f: a.f,
        v: m.apply(&g.levels[k], g.tgt(a), &a.v),
    };
    let v = pointwise_homotopy_violations(
        gx.top(),
        &|k, i, a| gx.face(k, i, a),
        &|k, j, a| gx.degen(k, j, a),
        &|k, i, a| gy.face(k, i, a),
        &|k, j, a| gy.degen(k, j, a),
        &|k, a| ap(&out.alpha[k], &gy, k, a),
        &|k, a| ap(&out.beta[k], &gy, k, a),
        &|k, j, a| ap(&out.h[k][j], &gy, k + 1, a),
        &|k| gx.arrows(k).0,
    );
    let mut functor = true;
    for k in 0..=gx.top() {
        let (arr, _) = gx.arrows(k);
        for g in arr.iter().take(60) {
            for f in arr.iter().take(60) {
                if gx.tgt(f) != gx.src(g) {
                    continue;
                }
                let gf = gx.compose(k, g, f);
                for m in [&out.alpha[k], &out.beta[k]] {
                    functor &= ap(m, &gy, k, &gf) == gy.compose(k, &ap(m, &gy, k, g), &ap(m, &gy, k, f));
                }
            }
        }
    }
    r.push("transported maps are functors", functor, "");
    r.push("transported identities hold", v.is_empty(), v.join("; "));
    Ok(Transport { homotopy: out, report: r })
}

/// Linear forms in the unknown matrix entries: `[row][col][var]`.
type Form = Vec<Vec<Vec<i64>>>;

fn lmul(k: &Mat, f: &Form, nv: usize) -> Form {
    let cols = f.first().map_or(0, |r| r.len());
    (0..k.rows())
        .map(|i| {
            (0..cols)
                .map(|c| {
                    let mut acc = vec![0; nv];
                    for (r, row) in f.iter().enumerate() {
                        let kv = k.get(i, r);
                        if kv != 0 {
                            for (a, b) in acc.iter_mut().zip(&row[c]) {
                                *a += kv * b;
                            }
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn rmul(f: &Form, k: &Mat, nv: usize) -> Form {
    f.iter()
        .map(|row| {
            (0..k.cols())
                .map(|j| {
                    let mut acc = vec![0; nv];
                    for (c, e) in row.iter().enumerate() {
                        let kv = k.get(c, j);
                        if kv != 0 {
                            for (a, b) in acc.iter_mut().zip(e) {
                                *a += kv * b;
                            }
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn fsub(a: &Form, b: &Form) -> Form {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect()).collect())
        .collect()
}

/// Homotopies between simplicial modules of the same height, found by
/// solving the identities as an integer linear system and taking small
/// combinations of a basis of solutions; distinct up to relations.
pub fn generate_homotopies(x: &SimplicialModule, y: &SimplicialModule, count: usize) -> Result<Vec<Homotopy>> {
    let top = x.top();
    if y.top() != top {
        return Err(Error::Range("homotopies need equal heights".into()));
    }
    let base = x.base().clone();
    let no = base.num_objects();
    // unknowns: α_q, β_q, then h[q][j]
    let mut unknowns: Vec<(usize, usize)> = Vec::new(); // (src level, tgt level)
    for _ in 0..2 {
        for q in 0..=top {
            unknowns.push((q, q));
        }
    }
    for q in 0..top {
        for _ in 0..=q {
            unknowns.push((q, q + 1));
        }
    }
    let mut offs = Vec::new();
    let mut nv = 0;
    for &(s, t) in &unknowns {
        let mut per = Vec::new();
        for o in 0..no {
            per.push(nv);
            nv += x.levels[s].value(o).rank() * y.levels[t].value(o).rank();
        }
        offs.push(per);
    }
    let alpha_u = |q: usize| q;
    let beta_u = |q: usize| top + 1 + q;
    let h_u = |q: usize, j: usize| 2 * (top + 1) + q * (q + 1) / 2 + j;
    let var = |u: usize, o: usize| -> Form {
        let (s, t) = unknowns[u];
        let (rr, cc) = (y.levels[t].value(o).rank(), x.levels[s].value(o).rank());
        (0..rr)
            .map(|r| {
                (0..cc)
                    .map(|c| {
                        let mut v = vec![0; nv];
                        v[offs[u][o] + r * cc + c] = 1;
                        v
                    })
                    .collect()
            })
            .collect()
    };
    // equations: (target value, form) meaning form ≡ 0 modulo relations
    let mut eqs: Vec<(FgAbelian, Form)> = Vec::new();
    for (u, &(s, t)) in unknowns.iter().enumerate() {
        for o in 0..no {
            let rel = x.levels[s].value(o).relations();
            eqs.push((y.levels[t].value(o).clone(), rmul(&var(u, o), rel, nv)));
        }
        for a in 0..base.num_arrows() {
            let (o1, o2) = (base.src(a), base.tgt(a));
            let l = rmul(&var(u, o2), x.levels[s].action(a), nv);
            let rr = lmul(y.levels[t].action(a), &var(u, o1), nv);
            eqs.push((y.levels[t].value(o2).clone(), fsub(&l, &rr)));
        }
    }
    for o in 0..no {
        let yv = |k: usize| y.levels[k].value(o).clone();
        for q in 0..=top {
            for u in [alpha_u(q), beta_u(q)] {
                if q >= 1 {
                    for i in 0..=q {
                        let l = lmul(&y.faces[q][i].mats[o], &var(u, o), nv);
                        let rr = rmul(&var(u - 1, o), &x.faces[q][i].mats[o], nv);
                        eqs.push((yv(q - 1), fsub(&l, &rr)));
                    }
                }
                if q < top {
                    for j in 0..=q {
                        let l = lmul(&y.degens[q][j].mats[o], &var(u, o), nv);
                        let rr = rmul(&var(u + 1, o), &x.degens[q][j].mats[o], nv);
                        eqs.push((yv(q + 1), fsub(&l, &rr)));
                    }
                }
            }
            if q >= top {
                continue;
            }
            let dyh = |i: usize, j: usize| lmul(&y.faces[q + 1][i].mats[o], &var(h_u(q, j), o), nv);
            eqs.push((yv(q), fsub(&dyh(0, 0), &var(alpha_u(q), o))));
            eqs.push((yv(q), fsub(&dyh(q + 1, q), &var(beta_u(q), o))));
            for j in 0..=q {
                for i in 0..=q + 1 {
                    let l = dyh(i, j);
                    if i < j {
                        let rr = rmul(&var(h_u(q - 1, j - 1), o), &x.faces[q][i].mats[o], nv);
                        eqs.push((yv(q), fsub(&l, &rr)));
                    } else if i == j + 1 && j < q {
                        eqs.push((yv(q), fsub(&l, &dyh(j + 1, j + 1))));
                    } else if i > j + 1 {
                        let rr = rmul(&var(h_u(q - 1, j), o), &x.faces[q][i - 1].mats[o], nv);
                        eqs.push((yv(q), fsub(&l, &rr)));
                    }
                }
                if q + 1 < top {
                    for i in 0..=q + 1 {
                        let l = lmul(&y.degens[q + 1][i].mats[o], &var(h_u(q, j), o), nv);
                        let rr = if i <= j {
                            rmul(&var(h_u(q + 1, j + 1), o), &x.degens[q][i].mats[o], nv)
                        } else {
                            rmul(&var(h_u(q + 1, j), o), &x.degens[q][i - 1].mats[o], nv)
                        };
                        eqs.push((yv(q + 1), fsub(&l, &rr)));
                    }
                }
            }
        }
    }
    // rows: one per entry; extra columns absorb relations of the target
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut extra: Vec<(usize, Mat)> = Vec::new();
    let mut n_extra = 0;
    let mut seen: BTreeSet<(Vec<Vec<i64>>, Vec<Vec<i64>>)> = BTreeSet::new();
    for (tv, f) in &eqs {
        let rel = tv.relations();
        let cols = f.first().map_or(0, |r| r.len());
        for c in 0..cols {
            let block: Vec<Vec<i64>> = f.iter().map(|row| row[c].clone()).collect();
            if block.iter().all(|r| r.iter().all(|&v| v == 0)) || !seen.insert((block.clone(), rel.to_cols())) {
                continue;
            }
            let start = rows.len();
            rows.extend(block);
            if rel.cols() > 0 {
                extra.push((start, rel.clone()));
                n_extra += rel.cols();
            }
        }
    }
    let total = nv + n_extra;
    let mut m = Mat::zeros(rows.len(), total);
    for (i, r) in rows.iter().enumerate() {
        for (j, &v) in r.iter().enumerate() {
            if v != 0 {
                m.set(i, j, v);
            }
        }
    }
    let mut col = nv;
    for (start, rel) in &extra {
        for j in 0..rel.cols() {
            for i in 0..rel.rows() {
                m.set(start + i, col, -rel.get(i, j));
            }
            col += 1;
        }
    }
    let kern = linalg::kernel(&m);
    let basis: Vec<Vec<i64>> = (0..kern.cols()).map(|j| kern.col(j)[..nv].to_vec()).filter(|v| v.iter().any(|&a| a != 0)).collect();
    let build = |v: &[i64]| -> Homotopy {
        let hom = |u: usize| -> ModHom {
            let (s, t) = unknowns[u];
            ModHom {
                mats: (0..no)
                    .map(|o| {
                        let (rr, cc) = (y.levels[t].value(o).rank(), x.levels[s].value(o).rank());
                        let tv = y.levels[t].value(o);
                        let cols: Vec<Vec<i64>> = (0..cc)
                            .map(|c| tv.reduce(&(0..rr).map(|r| v[offs[u][o] + r * cc + c]).collect::<Vec<_>>()))
                            .collect();
                        Mat::from_cols(&cols, rr)
                    })
                    .collect(),
            }
        };
        Homotopy {
            alpha: (0..=top).map(|q| hom(alpha_u(q))).collect(),
            beta: (0..=top).map(|q| hom(beta_u(q))).collect(),
            h: (0..top).map(|q| (0..=q).map(|j| hom(h_u(q, j))).collect()).collect(),
        }
    };
    let zero = build(&vec![0; nv]);
    let basis: Vec<Vec<i64>> = basis.into_iter().filter(|b| build(b) != zero).collect();
    let mut out: Vec<Homotopy> = Vec::new();
    let d = basis.len();
    let limit = 3usize.saturating_pow(d.min(12) as u32).min(4096);
    for t in 0..limit {
        if out.len() >= count {
            break;
        }
        let mut coeff = vec![0i64; d];
        let mut rest = t;
        for c in coeff.iter_mut().take(d.min(12)) {
            *c = [0, 1, -1][rest % 3];
            rest /= 3;
        }
        let mut v = vec![0i64; nv];
        for (c, b) in coeff.iter().zip(&basis) {
            for (a, bb) in v.iter_mut().zip(b) {
                *a += c * bb;
            }
        }
        let cand = build(&v);
        if !out.contains(&cand) {
            out.push(cand);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn z2_group() -> Gpd {
        Arc::new(FiniteGroupoid::from_group(&FiniteGroup::cyclic(2), "*"))
    }

    fn point() -> Gpd {
        Arc::new(FiniteGroupoid::discrete(&["*"]))
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn surjection_counts() {
        for k in 0..6 {
            for m in 0..=k {
                assert_eq!(surjections(k, m).len(), binom(k, m));
            }
        }
    }

    #[test]
    fn em_is_simplicial_with_homology_in_degree_m() {
        let pi = point();
        for a in [FgAbelian::cyclic(2), FgAbelian::free(1), FgAbelian::cyclic(3)] {
            let am = GModule::constant(pi.clone(), &a);
            for m in 1..=3 {
                let k = SimplicialModule::em(&am, m, m + 2);
                k.validate().unwrap();
                for d in 0..=m + 1 {
                    let h = k.homology(d).unwrap();
                    if d == m {
                        assert!(h.value(0).isomorphic(&a), "m={m} d={d}");
                    } else {
                        assert!(h.value(0).is_trivial(), "m={m} d={d}: {}", h.value(0).invariants());
                    }
                }
            }
        }
    }

    #[test]
    fn wbar_of_em_is_valid() {
        let pi = z2_group();
        let a = GModule::constant(pi.clone(), &FgAbelian::cyclic(2));
        for n in 3..=4 {
            let s = SimplicialCrs::em(n, &a, 1, 2).unwrap();
            let w = wbar(&s).unwrap();
            assert_eq!(w.n, n - 1);
            assert_eq!(w.top(), 3);
        }
    }

    #[test]
    fn wbar2_constant_sizes() {
        let pi = z2_group();
        let c = GModule::constant(pi.clone(), &FgAbelian::cyclic(2));
        let tail = trivial_tail(&pi, 1).unwrap();
        let head = SimplicialModule::constant(&c, 3);
        let s = SimplicialCrs::new(2, tail.clone(), head.clone(), Aug::Base(vec![vec![pi.id(0)]])).unwrap();
        let g = wbar2(&s).unwrap();
        g.validate().unwrap();
        for k in 0..=4 {
            assert_eq!(g.vertex_count(k, 0), Some(2 * (1 << k)));
        }
        let nontriv = (0..2).find(|&a| !pi.is_identity(a)).unwrap();
        let s = SimplicialCrs::new(2, tail.clone(), head, Aug::Base(vec![vec![nontriv]])).unwrap();
        let g = wbar2(&s).unwrap();
        assert!(g.is_twisted());
        g.validate().unwrap();
        let small = SimplicialCrs::new(2, tail, SimplicialModule::constant(&c, 1), Aug::Base(vec![vec![nontriv]])).unwrap();
        let w1 = Wbar1::new(wbar2(&small).unwrap());
        assert!(w1.identity_violations().is_empty(), "{:?}", w1.identity_violations());
    }

    #[test]
    fn wbar1_matches_l() {
        let pi = z2_group();
        let a = GModule::constant(pi.clone(), &FgAbelian::cyclic(2));
        let w = Wbar1::new(SimplicialGroupoid::em(&a, 1, 2));
        assert!(w.identity_violations().is_empty(), "{:?}", w.identity_violations());
        for n in 1..=2 {
            let r = wbar1_em_vs_l(&a, n).unwrap();
            assert!(r.ok(), "{:?}", r.failures());
        }
        let pt = point();
        let a = GModule::constant(pt.clone(), &FgAbelian::cyclic(2));
        let w = Wbar1::new(SimplicialGroupoid::em(&a, 1, 2));
        assert_eq!(w.counts()[2], Some(2));
        let z = GModule::constant(pt, &FgAbelian::free(1));
        let r = wbar1_em_vs_l(&z, 1).unwrap();
        assert!(r.ok(), "{:?}", r.failures());
    }

    #[test]
    fn loop_after_wbar() {
        let pi = z2_group();
        let a = GModule::constant(pi.clone(), &FgAbelian::cyclic(2));
        let s = SimplicialCrs::em(4, &a, 1, 3).unwrap();
        let r = check_loop_wbar(&s).unwrap();
        assert!(r.ok(), "{:?}", r.failures());
    }

    #[test]
    fn ladder_on_small_cases() {
        for pi in [point(), z2_group()] {
            for a in [FgAbelian::cyclic(2), FgAbelian::free(1)] {
                let am = GModule::constant(pi.clone(), &a);
                for n in 2..=4 {
                    for m in 1..=2 {
                        let r = check_em_ladder(n, &am, m).unwrap();
                        assert!(r.ok(), "n={n} m={m} {:?}", r.failures());
                    }
                }
            }
        }
    }

    #[test]
    fn generated_homotopies_transport() {
        let pi = z2_group();
        for a in [FgAbelian::cyclic(2), FgAbelian::free(1)] {
            let am = GModule::constant(pi.clone(), &a);
            for n in [2, 3, 4] {
                let s = SimplicialCrs::em(n, &am, 1, 2).unwrap();
                let hs = generate_homotopies(&s.head, &s.head, 4).unwrap();
                assert!(hs.len() >= 2, "{}", hs.len());
                for h in &hs {
                    assert!(homotopy_violations(&s.head, &s.head, h).is_empty());
                    let t = transport_homotopy(&s, &s, h).unwrap();
                    assert!(t.report.ok(), "n={n} {:?}", t.report.failures());
                }
            }
        }
    }

    #[test]
    fn broken_homotopy_is_rejected() {
        let pi = point();
        let am = GModule::constant(pi, &FgAbelian::free(1));
        let s = SimplicialCrs::em(3, &am, 1, 2).unwrap();
        let mut h = generate_homotopies(&s.head, &s.head, 1).unwrap().remove(0);
        let m = &mut h.h[1][0].mats[0];
        m.set(0, 0, m.get(0, 0) + 1);
        assert!(transport_homotopy(&s, &s, &h).is_err());
    }

    #[test]
    fn loop_from_scrs2() {
        let pi = z2_group();
        let a = GModule::constant(pi.clone(), &FgAbelian::cyclic(2));
        let s = SimplicialCrs::em(3, &a, 1, 2).unwrap();
        let w = wbar(&s).unwrap();
        let (l, _) = loop_object(&w).unwrap();
        assert_eq!(l.n, 3);
        assert_eq!(l.top(), 2);
        for k in 0..=2 {
            assert!(l.head.levels[k].value(0).isomorphic(s.head.levels[k].value(0)), "level {k}");
        }
    }

    #[test]
    fn em_object_level_sizes() {
        let pi = z2_group();
        let a = GModule::constant(pi.clone(), &FgAbelian::cyclic(2));
        for m in 1..=3 {
            match em_object(3, &a, m).unwrap() {
                EmObject::Crs(s) => {
                    assert_eq!(s.head.levels[m].value(0).order(), Some(2));
                    assert_eq!(s.head.levels[m + 1].value(0).order(), Some(1 << (m + 1)));
                    assert_eq!(s.top(), m + 2);
                }
                EmObject::Groupoid(_) => unreachable!(),
            }
        }
        let z = GModule::zero(pi.clone());
        match em_object(1, &z, 2).unwrap() {
            EmObject::Groupoid(g) => assert!((0..=4).all(|k| g.levels[k].value(0).is_trivial())),
            EmObject::Crs(_) => unreachable!(),
        }
    }
}
