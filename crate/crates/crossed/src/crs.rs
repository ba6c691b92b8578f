//! Crossed complexes over a finite groupoid: validation, homotopy groups,
//! Postnikov reflectors, truncation and coskeleta, the tower with its fibers
//! and limit, and the free n-crossed complex.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::abelian::FgAbelian;
use crate::coefficients::{self, GGroup, GModule, Gpd, ModHom};
use crate::error::{invalid, Error, Result};
use crate::group::{describe_group, AbelianSubgroup, FiniteGroup};
use crate::groupoid::{Components, FiniteGroupoid, Functor};
use crate::linalg::Mat;
use crate::xmod::{self, CrossedModule};

/// Boundary out of a level `n >= 3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// `∂₃`: per object, the element of `C₂(x)` hit by each generator.
    IntoGroup(Vec<Vec<usize>>),
    /// `∂ₙ` for `n >= 4`.
    Module(ModHom),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub module: GModule,
    pub boundary: Boundary,
}

/// `⋯ → C₃ → C₂ → G` with levels above `rank` zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossedComplex {
    xm: CrossedModule,
    higher: Vec<Level>,
    rank: usize,
}

/// `∏ gᵢ^{vᵢ}` in an abelian subgroup of `g`.
pub(crate) fn eval_word(g: &FiniteGroup, imgs: &[usize], v: &[i64]) -> usize {
    imgs.iter()
        .zip(v)
        .fold(g.identity(), |acc, (&a, &k)| g.mul(acc, g.pow(a, k)))
}

/// The abelian part of a complex: `ker δ₂ ← C₃ ← C₄ ← ⋯`.
#[derive(Clone, Debug)]
pub struct Chain {
    /// `ker δ₂` with its coordinate presentation per object
    pub k2: GModule,
    pub k2_pres: Vec<AbelianSubgroup>,
    /// `modules[i]` is level `i + 2`; `modules[0] = ker δ₂`
    pub modules: Vec<GModule>,
    /// `d[i]: modules[i + 1] -> modules[i]`
    pub d: Vec<ModHom>,
}

impl Chain {
    pub fn level(&self, n: usize) -> Option<&GModule> {
        n.checked_sub(2).and_then(|i| self.modules.get(i))
    }

    /// `∂ₙ` for `n >= 3` (level 3 lands in `ker δ₂`).
    pub fn boundary(&self, n: usize) -> Option<&ModHom> {
        n.checked_sub(3).and_then(|i| self.d.get(i))
    }
}

/// A homotopy group in the dimension-appropriate form.
#[derive(Clone, Debug)]
pub enum HomotopyGroup {
    Components(Components),
    Groupoid(Gpd, Functor),
    Module(GModule),
}

impl HomotopyGroup {
    /// One line per object (or component for `π₀`).
    pub fn describe(&self) -> Vec<String> {
        match self {
            HomotopyGroup::Components(c) => vec![format!("{} component(s)", c.blocks.len())],
            HomotopyGroup::Groupoid(p, _) => (0..p.num_objects()).map(|x| describe_group(&p.end_group(x).0)).collect(),
            HomotopyGroup::Module(m) => m.describe(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            HomotopyGroup::Components(c) => c.blocks.len() <= 1,
            HomotopyGroup::Groupoid(p, _) => p.num_arrows() == p.num_objects(),
            HomotopyGroup::Module(m) => m.is_trivial(),
        }
    }
}

impl CrossedComplex {
    pub fn new(xm: CrossedModule, higher: Vec<Level>, rank: usize) -> Result<CrossedComplex> {
        let c = CrossedComplex { xm, higher, rank };
        if let Some(v) = c.violations().into_iter().next() {
            return Err(Error::Invalid(v));
        }
        Ok(c)
    }

    /// A crossed module as a complex of rank 2.
    pub fn from_xm(xm: CrossedModule) -> CrossedComplex {
        CrossedComplex {
            xm,
            higher: Vec::new(),
            rank: 2,
        }
    }

    /// A groupoid as a complex of rank 1.
    pub fn from_groupoid(base: Gpd) -> CrossedComplex {
        CrossedComplex {
            xm: CrossedModule::trivial(base),
            higher: Vec::new(),
            rank: 1,
        }
    }

    /// A discrete groupoid (a set) as a complex of rank 0.
    pub fn from_set(base: Gpd) -> Result<CrossedComplex> {
        CrossedComplex::new(CrossedModule::trivial(base), Vec::new(), 0)
    }

    pub fn base(&self) -> &Gpd {
        self.xm.base()
    }

    pub fn xm(&self) -> &CrossedModule {
        &self.xm
    }

    pub fn c2(&self) -> &GGroup {
        self.xm.c()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn higher(&self) -> &[Level] {
        &self.higher
    }

    /// Level `n >= 3`, if present.
    pub fn level(&self, n: usize) -> Option<&Level> {
        n.checked_sub(3).and_then(|i| self.higher.get(i))
    }

    pub fn module(&self, n: usize) -> Option<&GModule> {
        self.level(n).map(|l| &l.module)
    }

    /// `∂₃` applied to a vector of `C₃(x)`.
    pub fn d3(&self, x: usize, v: &[i64]) -> usize {
        match &self.higher[0].boundary {
            Boundary::IntoGroup(imgs) => eval_word(self.c2().group(x), &imgs[x], v),
            Boundary::Module(_) => unreachable!("level 3 boundary lands in a group"),
        }
    }

    /// `im ∂₃` per object (trivial when rank < 3).
    pub fn image_d3(&self) -> Vec<Vec<usize>> {
        (0..self.base().num_objects())
            .map(|x| {
                let g = self.c2().group(x);
                match self.higher.first().map(|l| &l.boundary) {
                    Some(Boundary::IntoGroup(imgs)) => g.closure(&imgs[x]),
                    _ => vec![g.identity()],
                }
            })
            .collect()
    }

    /// Every violated condition, located.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let g = self.base().clone();
        if self.higher.len() != self.rank.saturating_sub(2) {
            out.push(format!("rank {} needs {} levels above 2", self.rank, self.rank.saturating_sub(2)));
            return out;
        }
        if self.rank <= 1 && !self.c2().is_trivial() {
            out.push("levels above the rank must be trivial (C2)".into());
        }
        if self.rank == 0 && g.num_arrows() != g.num_objects() {
            out.push("a rank 0 complex has a discrete base".into());
        }
        let ker = self.xm.kernel_elements();
        for (i, level) in self.higher.iter().enumerate() {
            let n = i + 3;
            let m = &level.module;
            if m.base() != &g {
                out.push(format!("C{n} lives over a different base"));
                continue;
            }
            if let Err(e) = m.validate() {
                out.push(format!("C{n}: {e}"));
                continue;
            }
            match (&level.boundary, n) {
                (Boundary::IntoGroup(imgs), 3) => {
                    if imgs.len() != g.num_objects() {
                        out.push("d3 must give images at every object".into());
                        continue;
                    }
                    let mut ok = true;
                    for x in 0..g.num_objects() {
                        let cx = self.c2().group(x);
                        if imgs[x].len() != m.value(x).rank() || imgs[x].iter().any(|&a| a >= cx.order()) {
                            out.push(format!("d3 at `{}` has the wrong shape", g.objects()[x]));
                            ok = false;
                            continue;
                        }
                        for (j, &a) in imgs[x].iter().enumerate() {
                            if !ker[x].contains(&a) {
                                out.push(format!(
                                    "chain condition fails: delta2(d3(e{j})) != 1 at `{}`",
                                    g.objects()[x]
                                ));
                                ok = false;
                            }
                        }
                        let commute = imgs[x].iter().all(|&a| imgs[x].iter().all(|&b| cx.mul(a, b) == cx.mul(b, a)));
                        if !commute {
                            out.push(format!("d3 images do not commute at `{}`", g.objects()[x]));
                            ok = false;
                            continue;
                        }
                        for r in m.value(x).relations().to_cols() {
                            if eval_word(cx, &imgs[x], &r) != cx.identity() {
                                out.push(format!("d3 does not respect relations at `{}`", g.objects()[x]));
                                ok = false;
                            }
                        }
                    }
                    if !ok {
                        continue;
                    }
                    for t in 0..g.num_arrows() {
                        let (x, y) = (g.src(t), g.tgt(t));
                        for j in 0..m.value(x).rank() {
                            let e = m.value(x).unit(j);
                            let lhs = self.d3(y, &m.action(t).mul_vec(&e));
                            let rhs = self.c2().act(t, imgs[x][j]);
                            if lhs != rhs {
                                out.push(format!("d3 is not natural along `{}`", g.arrow(t).name));
                            }
                        }
                    }
                }
                (Boundary::Module(d), n) if n >= 4 => {
                    let prev = &self.higher[i - 1].module;
                    if let Err(e) = d.validate(m, prev) {
                        out.push(format!("d{n}: {e}"));
                        continue;
                    }
                    if n == 4 {
                        for x in 0..g.num_objects() {
                            for col in d.mats[x].to_cols() {
                                if self.d3(x, &col) != self.c2().group(x).identity() {
                                    out.push(format!("chain condition fails: d3 d4 != 0 at `{}`", g.objects()[x]));
                                }
                            }
                        }
                    } else if let Boundary::Module(d_prev) = &self.higher[i - 1].boundary {
                        let before = &self.higher[i - 2].module;
                        if !d_prev.after(d).is_zero(m, before) {
                            out.push(format!("chain condition fails: d{} d{n} != 0", n - 1));
                        }
                    }
                }
                _ => out.push(format!("boundary of C{n} has the wrong kind")),
            }
            // im δ₂ acts trivially on Cₙ
            for x in 0..g.num_objects() {
                let v = m.value(x);
                let arrows: BTreeSet<usize> = self.xm.delta_table()[x].iter().copied().collect();
                for a in arrows {
                    if !v.maps_equal(m.action(a), &Mat::identity(v.rank()), v) {
                        out.push(format!(
                            "image of delta2 acts nontrivially on C{n} at `{}` (arrow `{}`)",
                            g.objects()[x],
                            g.arrow(a).name
                        ));
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            Some(v) => Err(Error::Invalid(v)),
            None => Ok(()),
        }
    }

    /// The abelian chain `ker δ₂ ← C₃ ← ⋯` with `∂₃` corestricted to `ker δ₂`.
    pub fn chain(&self) -> Result<Chain> {
        let (k2, k2_pres) = self.xm.kernel_module()?;
        let mut modules = vec![k2.clone()];
        let mut d = Vec::new();
        for (i, level) in self.higher.iter().enumerate() {
            modules.push(level.module.clone());
            match &level.boundary {
                Boundary::IntoGroup(imgs) => {
                    let mats = (0..self.base().num_objects())
                        .map(|x| {
                            let cols: Vec<Vec<i64>> = imgs[x]
                                .iter()
                                .map(|&a| k2_pres[x].coords(a).cloned().expect("d3 lands in ker delta2"))
                                .collect();
                            Mat::from_cols(&cols, k2_pres[x].pres.rank())
                        })
                        .collect();
                    d.push(ModHom { mats });
                }
                Boundary::Module(m) => d.push(m.clone()),
            }
            debug_assert_eq!(d.len(), i + 1);
        }
        Ok(Chain {
            k2,
            k2_pres,
            modules,
            d,
        })
    }

    pub fn pi0(&self) -> Components {
        self.base().pi0()
    }

    pub fn pi1(&self) -> Result<(Gpd, Functor)> {
        let (p, q) = xmod::pi1(&self.xm)?;
        Ok((Arc::new(p), q))
    }

    /// `πₙ` for `n >= 2` as a G-module (before descent to `π₁`).
    pub fn homology(&self, n: usize) -> Result<GModule> {
        if n < 2 {
            return Err(Error::Range(format!("homology is taken in dimensions >= 2, got {n}")));
        }
        if n > self.rank + 1 {
            return Err(Error::Range(format!("dimension {n} exceeds rank + 1 = {}", self.rank + 1)));
        }
        let ch = self.chain()?;
        let g = self.base().clone();
        let zero = GModule::zero(g);
        let Some(m) = ch.level(n) else {
            return Ok(zero);
        };
        let (out, c) = match ch.boundary(n) {
            Some(d) => (d.clone(), ch.level(n - 1).unwrap().clone()),
            None => (ModHom::zero(m, &zero), zero.clone()),
        };
        let (inc, b) = match ch.boundary(n + 1) {
            Some(d) => (d.clone(), ch.level(n + 1).unwrap().clone()),
            None => (ModHom::zero(&zero, m), zero.clone()),
        };
        Ok(coefficients::homology(&inc, &b, &out, m, &c)?.module)
    }

    /// `πₙ(C)` in the form appropriate to `n`.
    pub fn homotopy_group(&self, n: usize) -> Result<HomotopyGroup> {
        match n {
            0 => Ok(HomotopyGroup::Components(self.pi0())),
            1 => {
                let (p, q) = self.pi1()?;
                Ok(HomotopyGroup::Groupoid(p, q))
            }
            _ => {
                let h = self.homology(n)?;
                let (p, q) = self.pi1()?;
                Ok(HomotopyGroup::Module(h.descend(&q, p)?))
            }
        }
    }

    /// The induced chain complex of `π₁`-modules: `π₂(C₂) ← C̄₃ ← C̄₄ ← ⋯`.
    pub fn induced_chain(&self) -> Result<(Gpd, Vec<GModule>, Vec<ModHom>)> {
        let ch = self.chain()?;
        let (p, q) = self.pi1()?;
        let modules = ch
            .modules
            .iter()
            .map(|m| m.descend(&q, p.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok((p, modules, ch.d))
    }

    /// Levels `3..=n` kept, the rest dropped; `n = 1` keeps the base only.
    pub fn truncate(&self, n: usize) -> Result<CrossedComplex> {
        if n < 1 {
            return Err(Error::Range("truncation needs n >= 1".into()));
        }
        if n >= self.rank {
            return Ok(self.clone());
        }
        if n == 1 {
            return Ok(CrossedComplex::from_groupoid(self.base().clone()));
        }
        Ok(CrossedComplex {
            xm: self.xm.clone(),
            higher: self.higher[..n - 2].to_vec(),
            rank: n,
        })
    }

    /// `coskⁿ(Tₙ C)`: the truncation with `ker ∂ₙ` inserted at `n + 1`.
    pub fn coskeleton(&self, n: usize) -> Result<CrossedComplex> {
        let t = self.truncate(n)?;
        let g = self.base().clone();
        match n {
            1 => Ok(CrossedComplex::from_xm(CrossedModule::terminal(g))),
            2 => {
                let ch = t.chain()?;
                let imgs = ch.k2_pres.iter().map(|p| p.gens.clone()).collect();
                let level = Level {
                    module: ch.k2,
                    boundary: Boundary::IntoGroup(imgs),
                };
                CrossedComplex::new(t.xm.clone(), vec![level], 3)
            }
            _ => {
                let ch = t.chain()?;
                let k = coefficients::kernel(ch.boundary(n).unwrap(), ch.level(n).unwrap(), ch.level(n - 1).unwrap())?;
                let mut higher = t.higher.clone();
                higher.push(Level {
                    module: k.module,
                    boundary: Boundary::Module(k.incl),
                });
                CrossedComplex::new(t.xm.clone(), higher, n + 1)
            }
        }
    }

    /// The reflection `Pₙ(C)` with its unit `C -> Pₙ(C)`.
    pub fn reflect(&self, n: usize) -> Result<(CrossedComplex, CrsMorphism)> {
        if n >= self.rank {
            return Ok((self.clone(), CrsMorphism::identity(self)));
        }
        let g = self.base().clone();
        match n {
            0 => {
                let (d, f) = g.components_groupoid();
                let p = CrossedComplex::from_set(Arc::new(d))?;
                let unit = CrsMorphism::to_lower(self, &p, f);
                Ok((p, unit))
            }
            1 => {
                let (pi, q) = self.pi1()?;
                let p = CrossedComplex::from_groupoid(pi);
                let unit = CrsMorphism::to_lower(self, &p, q);
                Ok((p, unit))
            }
            2 => {
                let im = self.image_d3();
                for (x, s) in im.iter().enumerate() {
                    let center: BTreeSet<usize> = self.c2().group(x).center().into_iter().collect();
                    if s.iter().any(|a| !center.contains(a)) {
                        return invalid("image of d3 is not central");
                    }
                }
                let (qc, proj) = self.c2().quotient(&im)?;
                let delta = (0..g.num_objects())
                    .map(|x| {
                        let mut d = vec![0; qc.group(x).order()];
                        for u in 0..self.c2().group(x).order() {
                            d[proj[x][u]] = self.xm.delta(x, u);
                        }
                        d
                    })
                    .collect();
                let p = CrossedComplex::from_xm(CrossedModule::new(qc, delta)?);
                let unit = CrsMorphism {
                    base: Functor::identity(&g),
                    level2: proj,
                    higher: Vec::new(),
                }
                .fill_zero_levels(self, &p);
                Ok((p, unit))
            }
            _ => {
                let ch = self.chain()?;
                let cn = ch.level(n).unwrap();
                let co = coefficients::cokernel(ch.boundary(n + 1).unwrap(), ch.level(n + 1).unwrap(), cn)?;
                let boundary = match &self.higher[n - 3].boundary {
                    Boundary::IntoGroup(imgs) => Boundary::IntoGroup(
                        (0..g.num_objects())
                            .map(|x| {
                                co.section.mats[x]
                                    .to_cols()
                                    .iter()
                                    .map(|v| {
                                        let w = cn.value(x).reduce(v);
                                        eval_word(self.c2().group(x), &imgs[x], &w)
                                    })
                                    .collect()
                            })
                            .collect(),
                    ),
                    Boundary::Module(d) => Boundary::Module(d.after(&co.section)),
                };
                let mut higher = self.higher[..n - 3].to_vec();
                higher.push(Level {
                    module: co.module.clone(),
                    boundary,
                });
                let p = CrossedComplex::new(self.xm.clone(), higher, n)?;
                let mut maps: Vec<Vec<Mat>> = (3..n)
                    .map(|k| ch.level(k).unwrap().values().iter().map(|v| Mat::identity(v.rank())).collect())
                    .collect();
                maps.push(co.proj.mats.clone());
                let unit = CrsMorphism {
                    base: Functor::identity(&g),
                    level2: (0..g.num_objects()).map(|x| (0..self.c2().group(x).order()).collect()).collect(),
                    higher: maps,
                }
                .fill_zero_levels(self, &p);
                Ok((p, unit))
            }
        }
    }

    /// Levels equal as data (same presentations and tables).
    pub fn same_as(&self, other: &CrossedComplex) -> bool {
        self == other
    }

    /// Describes `π₀ … π_{rank+1}`, one entry per dimension.
    pub fn describe_homotopy(&self) -> Result<Vec<Vec<String>>> {
        (0..=self.rank + 1)
            .map(|n| self.homotopy_group(n).map(|h| h.describe()))
            .collect()
    }
}

/// A morphism of crossed complexes: base functor, level 2 maps per source
/// object, and matrices at each source level `>= 3` (rows sized by the
/// target, zero rows when the target has no such level).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrsMorphism {
    pub base: Functor,
    pub level2: Vec<Vec<usize>>,
    /// `higher[k][x]` for level `k + 3`
    pub higher: Vec<Vec<Mat>>,
}

impl CrsMorphism {
    pub fn identity(c: &CrossedComplex) -> CrsMorphism {
        CrsMorphism {
            base: Functor::identity(c.base()),
            level2: (0..c.base().num_objects())
                .map(|x| (0..c.c2().group(x).order()).collect())
                .collect(),
            higher: c
                .higher
                .iter()
                .map(|l| l.module.values().iter().map(|v| Mat::identity(v.rank())).collect())
                .collect(),
        }
    }

    /// Unit of a reflection into rank <= 1 along a change of base.
    fn to_lower(src: &CrossedComplex, tgt: &CrossedComplex, f: Functor) -> CrsMorphism {
        CrsMorphism {
            base: f,
            level2: (0..src.base().num_objects())
                .map(|x| vec![0; src.c2().group(x).order()])
                .collect(),
            higher: Vec::new(),
        }
        .fill_zero_levels(src, tgt)
    }

    /// Pads missing levels with zero maps.
    fn fill_zero_levels(mut self, src: &CrossedComplex, tgt: &CrossedComplex) -> CrsMorphism {
        for (k, level) in src.higher.iter().enumerate() {
            let rows_of = |x: usize| tgt.module(k + 3).map_or(0, |m| m.value(self.base.obj[x]).rank());
            let ok = self.higher.get(k).is_some_and(|v| v.len() == src.base().num_objects());
            if !ok {
                let mats = (0..src.base().num_objects())
                    .map(|x| Mat::zeros(rows_of(x), level.module.value(x).rank()))
                    .collect();
                if k < self.higher.len() {
                    self.higher[k] = mats;
                } else {
                    self.higher.push(mats);
                }
            }
        }
        self
    }

    /// `self ∘ first`, where `first: a -> b` and `self: b -> c`.
    pub fn after(&self, first: &CrsMorphism, a: &CrossedComplex, c: &CrossedComplex) -> CrsMorphism {
        let base = self.base.after(&first.base);
        let level2 = (0..a.base().num_objects())
            .map(|x| {
                let y = first.base.obj[x];
                first.level2[x].iter().map(|&u| self.level2[y][u]).collect()
            })
            .collect();
        let higher = (0..a.higher.len())
            .map(|k| {
                (0..a.base().num_objects())
                    .map(|x| {
                        let y = first.base.obj[x];
                        match self.higher.get(k) {
                            Some(g) => g[y].mul(&first.higher[k][x]),
                            None => Mat::zeros(
                                c.module(k + 3).map_or(0, |m| m.value(base.obj[x]).rank()),
                                a.higher[k].module.value(x).rank(),
                            ),
                        }
                    })
                    .collect()
            })
            .collect();
        CrsMorphism { base, level2, higher }
    }

    /// Functor, level homomorphisms, naturality and commuting with boundaries.
    pub fn validate(&self, src: &CrossedComplex, tgt: &CrossedComplex) -> Result<()> {
        let (g, h) = (src.base(), tgt.base());
        self.base.validate(g, h)?;
        let f = &self.base;
        for x in 0..g.num_objects() {
            let (cx, cy) = (src.c2().group(x), tgt.c2().group(f.obj[x]));
            if !cx.is_hom(cy, &self.level2[x]) {
                return invalid("level 2 map is not a homomorphism");
            }
            for u in 0..cx.order() {
                if tgt.xm().delta(f.obj[x], self.level2[x][u]) != f.arr[src.xm().delta(x, u)] {
                    return invalid("level 2 map does not commute with delta2");
                }
            }
        }
        for t in 0..g.num_arrows() {
            let (x, y) = (g.src(t), g.tgt(t));
            for u in 0..src.c2().group(x).order() {
                if self.level2[y][src.c2().act(t, u)] != tgt.c2().act(f.arr[t], self.level2[x][u]) {
                    return invalid("level 2 map is not equivariant");
                }
            }
        }
        if self.higher.len() != src.higher.len() {
            return invalid("morphism must give a map at every level");
        }
        for (k, level) in src.higher.iter().enumerate() {
            let n = k + 3;
            let m = &level.module;
            let Some(tm) = tgt.module(n) else {
                if self.higher[k].iter().any(|a| a.rows() != 0) {
                    return invalid(format!("level {n} map into a missing level"));
                }
                continue;
            };
            for x in 0..g.num_objects() {
                let a = &self.higher[k][x];
                let ty = tm.value(f.obj[x]);
                if a.rows() != ty.rank() || a.cols() != m.value(x).rank() || !m.value(x).hom_well_defined(a, ty) {
                    return invalid(format!("level {n} map is not a homomorphism"));
                }
            }
            for t in 0..g.num_arrows() {
                let (x, y) = (g.src(t), g.tgt(t));
                let lhs = tm.action(f.arr[t]).mul(&self.higher[k][x]);
                let rhs = self.higher[k][y].mul(m.action(t));
                if !m.value(x).maps_equal(&lhs, &rhs, tm.value(f.obj[y])) {
                    return invalid(format!("level {n} map is not natural"));
                }
            }
            for x in 0..g.num_objects() {
                let fx = f.obj[x];
                for j in 0..m.value(x).rank() {
                    let e = m.value(x).unit(j);
                    let image = self.higher[k][x].mul_vec(&e);
                    let ok = if n == 3 {
                        let below = self.level2[x][src.d3(x, &e)];
                        below == tgt.d3(fx, &image)
                    } else {
                        let (Boundary::Module(d), Boundary::Module(td)) = (&level.boundary, &tgt.level(n).unwrap().boundary) else {
                            unreachable!()
                        };
                        let lhs = self.higher[k - 1][x].mul_vec(&d.mats[x].mul_vec(&e));
                        let rhs = td.mats[fx].mul_vec(&image);
                        tgt.module(n - 1).unwrap().value(fx).eq_elem(&lhs, &rhs)
                    };
                    if !ok {
                        return invalid(format!("level {n} map does not commute with the boundary"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Fibration of crossed complexes: star-surjective base functor,
    /// surjective on objects, and surjective at every level.
    pub fn is_fibration(&self, src: &CrossedComplex, tgt: &CrossedComplex) -> bool {
        let (g, h) = (src.base(), tgt.base());
        let objs: BTreeSet<usize> = self.base.obj.iter().copied().collect();
        if !self.base.is_fibration(g, h) || objs.len() != h.num_objects() {
            return false;
        }
        for x in 0..g.num_objects() {
            let img: BTreeSet<usize> = self.level2[x].iter().copied().collect();
            if img.len() != tgt.c2().group(self.base.obj[x]).order() {
                return false;
            }
        }
        for (k, mats) in self.higher.iter().enumerate() {
            let Some(tm) = tgt.module(k + 3) else { continue };
            for (x, a) in mats.iter().enumerate() {
                let ty = tm.value(self.base.obj[x]);
                if !FgAbelian::new(ty.rank(), ty.relations().hstack(a)).is_trivial() {
                    return false;
                }
            }
        }
        true
    }
}

/// Whether two surjections out of `c` are the same quotient: equal fibres on
/// objects, arrows and level 2, and equal kernels at every abelian level.
pub fn same_quotient(c: &CrossedComplex, f1: &CrsMorphism, a: &CrossedComplex, f2: &CrsMorphism, b: &CrossedComplex) -> bool {
    if !f1.is_fibration(c, a) || !f2.is_fibration(c, b) {
        return false;
    }
    let same_fibres = |u: &[usize], v: &[usize]| {
        (0..u.len()).all(|i| (0..u.len()).all(|j| (u[i] == u[j]) == (v[i] == v[j])))
    };
    if !same_fibres(&f1.base.obj, &f2.base.obj) || !same_fibres(&f1.base.arr, &f2.base.arr) {
        return false;
    }
    if (0..c.base().num_objects()).any(|x| !same_fibres(&f1.level2[x], &f2.level2[x])) {
        return false;
    }
    for k in 0..c.higher.len() {
        let n = k + 3;
        for x in 0..c.base().num_objects() {
            let cx = c.module(n).unwrap().value(x);
            // generators of the kernel of a level map; a missing level kills everything
            let kernel = |p: &CrsMorphism, t: &CrossedComplex| match t.module(n) {
                Some(tm) => tm.value(p.base.obj[x]).relation_lattice(&p.higher[k][x]),
                None => Mat::identity(cx.rank()),
            };
            let kills = |lat: &Mat, p: &CrsMorphism, t: &CrossedComplex| {
                lat.to_cols().iter().all(|w| {
                    t.module(n)
                        .is_none_or(|tm| tm.value(p.base.obj[x]).is_zero(&p.higher[k][x].mul_vec(w)))
                })
            };
            if !kills(&kernel(f1, a), f2, b) || !kills(&kernel(f2, b), f1, a) {
                return false;
            }
        }
    }
    true
}

/// The Postnikov tower `P_N → ⋯ → P₁ → P₀` of a rank `N` complex.
#[derive(Clone, Debug)]
pub struct Tower {
    /// `stages[n] = Pₙ(C)`
    pub stages: Vec<CrossedComplex>,
    /// `eta[n] = ηₙ₊₁: stages[n + 1] -> stages[n]`
    pub eta: Vec<CrsMorphism>,
    /// `units[n]: C -> stages[n]`
    pub units: Vec<CrsMorphism>,
}

pub fn tower(c: &CrossedComplex) -> Result<Tower> {
    let top = c.rank();
    let mut stages = vec![c.clone()];
    let mut eta = Vec::new();
    for n in (0..top).rev() {
        let (p, u) = stages.last().unwrap().reflect(n)?;
        stages.push(p);
        eta.push(u);
    }
    stages.reverse();
    eta.reverse();
    let mut units = vec![CrsMorphism::identity(c)];
    for n in (0..top).rev() {
        let u = eta[n].after(units.last().unwrap(), c, &stages[n]);
        units.push(u);
    }
    units.reverse();
    Ok(Tower { stages, eta, units })
}

/// Checks on a tower, one flag per property.
#[derive(Clone, Debug)]
pub struct TowerReport {
    pub fibrations: Vec<bool>,
    pub morphisms_valid: bool,
    /// iterated stage agrees with the direct reflection as a quotient
    pub matches_reflect: Vec<bool>,
    /// `Pₙ₊₁ Pₙ = Pₙ`
    pub idempotent: Vec<bool>,
    pub limit: bool,
}

impl TowerReport {
    pub fn ok(&self) -> bool {
        self.morphisms_valid
            && self.limit
            && self.fibrations.iter().all(|&b| b)
            && self.matches_reflect.iter().all(|&b| b)
            && self.idempotent.iter().all(|&b| b)
    }
}

pub fn check_tower(c: &CrossedComplex, t: &Tower) -> Result<TowerReport> {
    let fibrations = t
        .eta
        .iter()
        .enumerate()
        .map(|(n, e)| e.is_fibration(&t.stages[n + 1], &t.stages[n]))
        .collect();
    let morphisms_valid = t
        .eta
        .iter()
        .enumerate()
        .all(|(n, e)| e.validate(&t.stages[n + 1], &t.stages[n]).is_ok())
        && t
            .units
            .iter()
            .enumerate()
            .all(|(n, u)| u.validate(c, &t.stages[n]).is_ok());
    let mut matches_reflect = Vec::new();
    let mut idempotent = Vec::new();
    for n in 0..t.stages.len() {
        let (p, u) = c.reflect(n)?;
        matches_reflect.push(same_quotient(c, &u, &p, &t.units[n], &t.stages[n]));
        let (pp, _) = t.stages[n].reflect(n + 1)?;
        idempotent.push(pp.same_as(&t.stages[n]));
    }
    Ok(TowerReport {
        fibrations,
        morphisms_valid,
        matches_reflect,
        idempotent,
        limit: limit_matches(c, t)?,
    })
}

/// Compatible families `(a₀, …, a_N)` with `aₙ = η(aₙ₊₁)`, found by search
/// from the bottom stage up. `sizes[n]` elements at stage `n`, `down[n]` maps
/// stage `n + 1` to stage `n`.
fn families(sizes: &[usize], down: &[&[usize]]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0..sizes[0]).map(|a| vec![a]).collect();
    for n in 1..sizes.len() {
        let mut next = Vec::new();
        for f in &out {
            for a in 0..sizes[n] {
                if down[n - 1][a] == f[n - 1] {
                    let mut g = f.clone();
                    g.push(a);
                    next.push(g);
                }
            }
        }
        out = next;
    }
    out
}

/// Reconstructs `C` as the limit of its tower and compares with the cone of units.
pub fn limit_matches(c: &CrossedComplex, t: &Tower) -> Result<bool> {
    let top = t.stages.len() - 1;
    let is_bijection = |fams: &Vec<Vec<usize>>, cone: &dyn Fn(usize) -> Vec<usize>, n: usize| {
        let set: BTreeSet<Vec<usize>> = fams.iter().cloned().collect();
        let imgs: BTreeSet<Vec<usize>> = (0..n).map(cone).collect();
        imgs.len() == n && imgs == set
    };
    // objects and arrows of the base
    let down_obj: Vec<&[usize]> = t.eta.iter().map(|e| e.base.obj.as_slice()).collect();
    let sizes: Vec<usize> = t.stages.iter().map(|s| s.base().num_objects()).collect();
    let fams = families(&sizes, &down_obj);
    if !is_bijection(&fams, &|x| t.units.iter().map(|u| u.base.obj[x]).collect(), c.base().num_objects()) {
        return Ok(false);
    }
    let down_arr: Vec<&[usize]> = t.eta.iter().map(|e| e.base.arr.as_slice()).collect();
    let sizes: Vec<usize> = t.stages.iter().map(|s| s.base().num_arrows()).collect();
    let fams = families(&sizes, &down_arr);
    if !is_bijection(&fams, &|a| t.units.iter().map(|u| u.base.arr[a]).collect(), c.base().num_arrows()) {
        return Ok(false);
    }
    if top < 2 {
        return Ok(true);
    }
    // level 2, over stages 2..=top (lower stages are trivial there)
    for x in 0..c.base().num_objects() {
        let sizes: Vec<usize> = (2..=top).map(|n| t.stages[n].c2().group(x).order()).collect();
        let down: Vec<&[usize]> = (2..top).map(|n| t.eta[n].level2[x].as_slice()).collect();
        let fams = families(&sizes, &down);
        let cone = |u: usize| (2..=top).map(|n| t.units[n].level2[x][u]).collect();
        if !is_bijection(&fams, &cone, c.c2().group(x).order()) {
            return Ok(false);
        }
    }
    // abelian levels: kernel of the difference map
    for k in 3..=top {
        for x in 0..c.base().num_objects() {
            let vals: Vec<&FgAbelian> = (k..=top).map(|n| t.stages[n].module(k).unwrap().value(x)).collect();
            let ranks: Vec<usize> = vals.iter().map(|v| v.rank()).collect();
            let s = FgAbelian::direct_sum(&vals);
            let tv: Vec<&FgAbelian> = vals[..vals.len() - 1].to_vec();
            let tsum = FgAbelian::direct_sum(&tv);
            let t_ranks: Vec<usize> = ranks[..ranks.len() - 1].to_vec();
            let mut d = Mat::zeros(tsum.rank(), s.rank());
            for i in 0..t_ranks.len() {
                let n = k + i;
                let inj_t = GModule::sum_injection(&t_ranks, i);
                let proj_i = GModule::sum_projection(&ranks, i);
                let proj_next = GModule::sum_projection(&ranks, i + 1);
                let eta = &t.eta[n].higher[k - 3][x];
                d = d.add(&inj_t.mul(&proj_i.sub(&eta.mul(&proj_next))));
            }
            let cone_cols: Vec<Mat> = (k..=top).map(|n| t.units[n].higher[k - 3][x].clone()).collect();
            let cone = cone_cols[1..].iter().fold(cone_cols[0].clone(), |acc, m| acc.vstack(m));
            let ck = c.module(k).unwrap().value(x);
            let commutes = d.mul(&cone).to_cols().iter().all(|col| tsum.is_zero(col));
            let lim = tsum.relation_lattice(&d);
            let onto = lim.to_cols().iter().all(|w| s.solve_in_span(&cone, w).is_some());
            let into = s.relation_lattice(&cone).to_cols().iter().all(|w| ck.is_zero(w));
            if !(commutes && onto && into) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The fiber of `ηₙ₊₁` over an object with its homotopy groups.
#[derive(Clone, Debug)]
pub struct Fiber {
    pub stage: usize,
    pub object: usize,
    pub complex: CrossedComplex,
    /// `π₀ … π_{n+2}` of the fiber, described
    pub homotopy: Vec<Vec<String>>,
    /// trivial away from `n + 1`
    pub concentrated: bool,
    /// `πₙ₊₁(fiber) ≅ πₙ₊₁(C)(x)`
    pub matches: bool,
}

/// One-object subgroupoid at `x` on the given endomorphisms.
fn local_base(g: &FiniteGroupoid, x: usize, arrows: &[usize]) -> Result<(Gpd, Functor)> {
    let (sub, incl) = g.subgroupoid(&[x], arrows)?;
    Ok((Arc::new(sub), incl))
}

/// A module over a one-object trivial base with the value `v`.
fn point_module(base: &Gpd, v: &FgAbelian) -> GModule {
    GModule::constant(base.clone(), v)
}

fn restrict_hom(h: &ModHom, x: usize) -> ModHom {
    ModHom { mats: vec![h.mats[x].clone()] }
}

/// Fiber of `ηₙ₊₁: Pₙ₊₁(C) -> Pₙ(C)` over `x`.
pub fn fiber(c: &CrossedComplex, n: usize, x: usize) -> Result<Fiber> {
    if x >= c.base().num_objects() {
        return Err(Error::Unknown {
            kind: "object",
            name: x.to_string(),
        });
    }
    if n + 1 > c.rank().max(1) {
        return Err(Error::Range(format!("no tower map eta_{} for a rank {} complex", n + 1, c.rank())));
    }
    let (p, _) = c.reflect(n + 1)?;
    let g = c.base().clone();
    let mut local = 0;
    let complex = match n {
        0 => {
            let (pi, _) = p.pi1()?;
            let comp = pi.pi0();
            let block = comp.blocks[comp.block_of[x]].clone();
            let arrows: Vec<usize> = (0..pi.num_arrows())
                .filter(|&a| block.contains(&pi.src(a)))
                .collect();
            let (sub, _) = pi.subgroupoid(&block, &arrows)?;
            local = sub.object_index(&g.objects()[x])?;
            CrossedComplex::from_groupoid(Arc::new(sub))
        }
        1 => {
            let im: BTreeSet<usize> = p.xm().delta_table()[x].iter().copied().collect();
            let im: Vec<usize> = im.into_iter().collect();
            let (base, incl) = local_base(&g, x, &im)?;
            let c2 = p.c2().restrict(&incl, base.clone());
            let delta = vec![p.xm().delta_table()[x]
                .iter()
                .map(|&a| incl.arr.iter().position(|&b| b == a).unwrap())
                .collect()];
            CrossedComplex::from_xm(CrossedModule::new(c2, delta)?)
        }
        _ => {
            let (base, incl) = local_base(&g, x, &[g.id(x)])?;
            let ch = p.chain()?;
            let top = ch.level(n + 1).unwrap();
            let mid = ch.level(n).unwrap();
            let d = ch.boundary(n + 1).unwrap();
            let image = coefficients::image(d, top, mid)?;
            let top_x = point_module(&base, top.value(x));
            let corestricted = restrict_hom(&image.corestriction, x);
            if n == 2 {
                // level 2: im ∂₃ as a subgroup of C₂(x)
                let c2 = p.c2().restrict(&incl, base.clone());
                let im = p.image_d3()[x].clone();
                let (sub, sub_incl) = c2.subgroup(&[im])?;
                let delta = vec![vec![base.id(0); sub.group(0).order()]];
                let xm = CrossedModule::new(sub, delta)?;
                let imgs: Vec<usize> = (0..top.value(x).rank())
                    .map(|j| {
                        let a = p.d3(x, &top.value(x).unit(j));
                        sub_incl[0].iter().position(|&b| b == a).unwrap()
                    })
                    .collect();
                let level = Level {
                    module: top_x,
                    boundary: Boundary::IntoGroup(vec![imgs]),
                };
                CrossedComplex::new(xm, vec![level], 3)?
            } else {
                let mut higher = Vec::new();
                for k in 3..n {
                    let boundary = if k == 3 {
                        Boundary::IntoGroup(vec![vec![]])
                    } else {
                        Boundary::Module(ModHom {
                            mats: vec![Mat::zeros(0, 0)],
                        })
                    };
                    higher.push(Level {
                        module: GModule::zero(base.clone()),
                        boundary,
                    });
                }
                let im_x = point_module(&base, image.module.value(x));
                let bottom = if n == 3 {
                    Boundary::IntoGroup(vec![vec![0; im_x.value(0).rank()]])
                } else {
                    Boundary::Module(ModHom {
                        mats: vec![Mat::zeros(0, im_x.value(0).rank())],
                    })
                };
                higher.push(Level {
                    module: im_x,
                    boundary: bottom,
                });
                higher.push(Level {
                    module: top_x,
                    boundary: Boundary::Module(corestricted),
                });
                CrossedComplex::new(CrossedModule::trivial(base), higher, n + 1)?
            }
        }
    };
    let groups: Vec<HomotopyGroup> = (0..=n + 2)
        .map(|k| {
            if k <= complex.rank() + 1 {
                complex.homotopy_group(k)
            } else {
                Ok(HomotopyGroup::Module(GModule::zero(complex.base().clone())))
            }
        })
        .collect::<Result<_>>()?;
    let concentrated = groups.iter().enumerate().all(|(k, h)| k == n + 1 || h.is_trivial());
    let matches = match (&groups[n + 1], c.homotopy_group(n + 1)?) {
        (HomotopyGroup::Groupoid(f, _), HomotopyGroup::Groupoid(pc, _)) => {
            f.end_group(local).0.isomorphic(&pc.end_group(x).0)
        }
        (HomotopyGroup::Module(f), HomotopyGroup::Module(m)) => f.value(0).isomorphic(m.value(x)),
        _ => false,
    };
    Ok(Fiber {
        stage: n + 1,
        object: x,
        homotopy: groups.iter().map(|h| h.describe()).collect(),
        complex,
        concentrated,
        matches,
    })
}

/// Element of `Cₙ₋₁(z)` hit by a free generator: a group element at `n = 3`,
/// a vector above.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cell {
    Group(usize),
    Vector(Vec<i64>),
}

/// The free n-crossed complex on `f: X -> πₙ₋₁(C)` over a rank `n - 1` complex.
#[derive(Clone, Debug)]
pub struct FreeNCrs {
    pub complex: CrossedComplex,
    /// generators at each object: `(arrow of π₁, u)`
    pub gens: Vec<Vec<(usize, usize)>>,
    pub pi: Gpd,
    pub q: Functor,
    /// a lift in `G` of each arrow of `π₁`
    pub lift: Vec<usize>,
    pub x: Vec<(usize, Cell)>,
}

pub fn free_ncrs(c: &CrossedComplex, x: &[(usize, Cell)]) -> Result<FreeNCrs> {
    let n = c.rank() + 1;
    if n < 3 {
        return Err(Error::Range("the free n-crossed complex needs n >= 3".into()));
    }
    let g = c.base().clone();
    let (pi, q) = c.pi1()?;
    let mut lift = vec![usize::MAX; pi.num_arrows()];
    for t in (0..g.num_arrows()).rev() {
        lift[q.arr[t]] = t;
    }
    for (z, cell) in x {
        let ok = match (cell, n) {
            (Cell::Group(a), 3) => c.xm().delta(*z, *a) == g.id(*z),
            (Cell::Vector(v), 4) => c.d3(*z, v) == c.c2().group(*z).identity(),
            (Cell::Vector(v), _) => {
                let Boundary::Module(d) = &c.level(n - 1).unwrap().boundary else { unreachable!() };
                c.module(n - 2).unwrap().value(*z).is_zero(&d.mats[*z].mul_vec(v))
            }
            _ => false,
        };
        if !ok {
            return invalid("generator images must be cycles of the right kind");
        }
    }
    let gens: Vec<Vec<(usize, usize)>> = (0..g.num_objects())
        .map(|y| {
            let mut v = Vec::new();
            for (u, (z, _)) in x.iter().enumerate() {
                for &p in pi.hom(*z, y) {
                    v.push((p, u));
                }
            }
            v
        })
        .collect();
    let index: Vec<HashMap<(usize, usize), usize>> = gens
        .iter()
        .map(|v| v.iter().enumerate().map(|(i, &k)| (k, i)).collect())
        .collect();
    let values: Vec<FgAbelian> = gens.iter().map(|v| FgAbelian::free(v.len())).collect();
    let action = (0..g.num_arrows())
        .map(|t| {
            let (a, b) = (g.src(t), g.tgt(t));
            let mut m = Mat::zeros(gens[b].len(), gens[a].len());
            for (j, &(p, u)) in gens[a].iter().enumerate() {
                m.set(index[b][&(pi.compose(q.arr[t], p), u)], j, 1);
            }
            m
        })
        .collect();
    let module = GModule::new(g.clone(), values, action)?;
    let boundary = if n == 3 {
        Boundary::IntoGroup(
            gens.iter()
                .map(|v| {
                    v.iter()
                        .map(|&(p, u)| match &x[u].1 {
                            Cell::Group(a) => c.c2().act(lift[p], *a),
                            Cell::Vector(_) => unreachable!(),
                        })
                        .collect()
                })
                .collect(),
        )
    } else {
        let below = c.module(n - 1).unwrap();
        Boundary::Module(ModHom {
            mats: gens
                .iter()
                .enumerate()
                .map(|(y, v)| {
                    let cols: Vec<Vec<i64>> = v
                        .iter()
                        .map(|&(p, u)| match &x[u].1 {
                            Cell::Vector(w) => below.act(lift[p], w),
                            Cell::Group(_) => unreachable!(),
                        })
                        .collect();
                    Mat::from_cols(&cols, below.value(y).rank())
                })
                .collect(),
        })
    };
    let mut higher = c.higher().to_vec();
    higher.push(Level { module, boundary });
    let complex = CrossedComplex::new(c.xm().clone(), higher, n)?;
    Ok(FreeNCrs {
        complex,
        gens,
        pi,
        q,
        lift,
        x: x.to_vec(),
    })
}

impl FreeNCrs {
    fn top(&self) -> usize {
        self.complex.rank()
    }

    /// Elements of `Dₙ(z)` over `Tₙ₋₁`: finite levels only.
    fn target_elements(d: &CrossedComplex, n: usize, z: usize) -> Result<Vec<Vec<i64>>> {
        d.module(n)
            .and_then(|m| m.value(z).elements())
            .ok_or_else(|| Error::Range("hom counting needs a finite top level".into()))
    }

    fn boundary_of(d: &CrossedComplex, n: usize, z: usize, v: &[i64]) -> Cell {
        match &d.level(n).unwrap().boundary {
            Boundary::IntoGroup(_) => Cell::Group(d.d3(z, v)),
            Boundary::Module(m) => Cell::Vector(d.module(n - 1).unwrap().value(z).reduce(&m.mats[z].mul_vec(v))),
        }
    }

    fn same_cell(d: &CrossedComplex, n: usize, z: usize, a: &Cell, b: &Cell) -> bool {
        match (a, b) {
            (Cell::Group(a), Cell::Group(b)) => a == b,
            (Cell::Vector(a), Cell::Vector(b)) => d.module(n - 1).unwrap().value(z).eq_elem(a, b),
            _ => false,
        }
    }

    fn check_target(&self, d: &CrossedComplex) -> Result<()> {
        let n = self.top();
        if d.rank() != n || d.truncate(n - 1)? != self.complex.truncate(n - 1)? {
            return invalid("target must extend the same (n-1)-truncation");
        }
        Ok(())
    }

    /// `|Hom(X, Uₙ D)|`: choices `c_u ∈ Dₙ(z_u)` with `∂c_u = f(u)`.
    pub fn transpose_count(&self, d: &CrossedComplex) -> Result<usize> {
        self.check_target(d)?;
        let n = self.top();
        let mut total = 1;
        for (z, cell) in &self.x {
            let els = Self::target_elements(d, n, *z)?;
            total *= els
                .iter()
                .filter(|v| Self::same_cell(d, n, *z, &Self::boundary_of(d, n, *z, v), cell))
                .count();
        }
        Ok(total)
    }

    /// Counts morphisms `Fₙ -> D` over the truncation by searching all
    /// generator images, keeping equivariant assignments that commute with `∂`.
    pub fn brute_force_hom_count(&self, d: &CrossedComplex) -> Result<usize> {
        self.check_target(d)?;
        let n = self.top();
        let g = self.complex.base().clone();
        let m = d.module(n).unwrap();
        let flat: Vec<(usize, usize, usize)> = self
            .gens
            .iter()
            .enumerate()
            .flat_map(|(y, v)| v.iter().map(move |&(p, u)| (y, p, u)))
            .collect();
        let elements: Vec<Vec<Vec<i64>>> = (0..g.num_objects())
            .map(|y| Self::target_elements(d, n, y))
            .collect::<Result<_>>()?;
        let mut images: Vec<usize> = vec![0; flat.len()];
        let mut count = 0;
        self.search(d, &flat, &elements, 0, &mut images, &mut count, m);
        Ok(count)
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        d: &CrossedComplex,
        flat: &[(usize, usize, usize)],
        elements: &[Vec<Vec<i64>>],
        k: usize,
        images: &mut Vec<usize>,
        count: &mut usize,
        m: &GModule,
    ) {
        if k == flat.len() {
            *count += 1;
            return;
        }
        let n = self.top();
        let g = self.complex.base();
        let (y, p, u) = flat[k];
        let want = match &self.x[u].1 {
            Cell::Group(a) => Cell::Group(self.complex.c2().act(self.lift[p], *a)),
            Cell::Vector(w) => Cell::Vector(d.module(n - 1).unwrap().act(self.lift[p], w)),
        };
        for (i, v) in elements[y].iter().enumerate() {
            if !Self::same_cell(d, n, y, &Self::boundary_of(d, n, y, v), &want) {
                continue;
            }
            images[k] = i;
            // equivariance against every earlier generator of the same u
            let ok = (0..=k).all(|j| {
                let (yj, pj, uj) = flat[j];
                if uj != u {
                    return true;
                }
                g.hom(yj, y).iter().all(|&t| {
                    if self.pi.compose(self.q.arr[t], pj) != p {
                        return true;
                    }
                    let moved = m.act(t, &elements[yj][images[j]]);
                    m.value(y).eq_elem(&moved, &elements[y][images[k]])
                })
            });
            if ok {
                self.search(d, flat, elements, k + 1, images, count, m);
            }
        }
    }
}

/// One step of the cotriple `𝔾ₙ = FₙUₙ` on a rank `n` complex with finite
/// top level, with the counit `𝔾ₙ(C) -> C`.
pub fn cotriple_step(c: &CrossedComplex) -> Result<(FreeNCrs, CrsMorphism)> {
    let n = c.rank();
    if n < 3 {
        return Err(Error::Range("the cotriple is defined for n >= 3".into()));
    }
    let top = c.module(n).unwrap();
    let mut x = Vec::new();
    let mut elems = Vec::new();
    for z in 0..c.base().num_objects() {
        let els = top
            .value(z)
            .elements()
            .ok_or_else(|| Error::Range("the cotriple step needs a finite top level".into()))?;
        for v in els {
            let cell = match &c.level(n).unwrap().boundary {
                Boundary::IntoGroup(_) => Cell::Group(c.d3(z, &v)),
                Boundary::Module(d) => Cell::Vector(c.module(n - 1).unwrap().value(z).reduce(&d.mats[z].mul_vec(&v))),
            };
            x.push((z, cell));
            elems.push(v);
        }
    }
    let t = c.truncate(n - 1)?;
    let free = free_ncrs(&t, &x)?;
    let mut counit = CrsMorphism::identity(&free.complex);
    let mats = (0..c.base().num_objects())
        .map(|y| {
            let cols: Vec<Vec<i64>> = free.gens[y]
                .iter()
                .map(|&(p, u)| top.act(free.lift[p], &elems[u]))
                .collect();
            Mat::from_cols(&cols, top.value(y).rank())
        })
        .collect();
    *counit.higher.last_mut().unwrap() = mats;
    Ok((free, counit))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize) -> Gpd {
        Arc::new(FiniteGroupoid::from_group(&FiniteGroup::cyclic(n), "*"))
    }

    /// `Z →(×2) Z/4 →(0) Z/2`, trivial actions.
    fn cc4() -> CrossedComplex {
        let g = z(2);
        let c2 = GGroup::constant(g.clone(), &FiniteGroup::cyclic(4));
        let xm = CrossedModule::new(c2, vec![vec![0; 4]]).unwrap();
        let level = Level {
            module: GModule::constant(g, &FgAbelian::free(1)),
            boundary: Boundary::IntoGroup(vec![vec![2]]),
        };
        CrossedComplex::new(xm, vec![level], 3).unwrap()
    }

    #[test]
    fn cc4_homotopy() {
        let c = cc4();
        let h = c.describe_homotopy().unwrap();
        assert_eq!(h[0], vec!["1 component(s)"]);
        assert_eq!(h[1], vec!["Z/2"]);
        assert_eq!(h[2], vec!["Z/2"]);
        assert_eq!(h[3], vec!["Z^1"]);
        assert_eq!(h[4], vec!["0"]);
    }

    #[test]
    fn cc4_reflect_and_tower() {
        let c = cc4();
        let (p2, _) = c.reflect(2).unwrap();
        assert_eq!(p2.c2().group(0).order(), 2);
        let t = tower(&c).unwrap();
        assert_eq!(t.stages.len(), 4);
        let r = check_tower(&c, &t).unwrap();
        assert!(r.ok(), "{r:?}");
    }

    #[test]
    fn broken_chain_condition_is_located() {
        let g = z(2);
        let c2 = GGroup::constant(g.clone(), &FiniteGroup::cyclic(2));
        let xm = CrossedModule::new(c2, vec![vec![0, 1]]).unwrap();
        let level = Level {
            module: GModule::constant(g, &FgAbelian::free(1)),
            boundary: Boundary::IntoGroup(vec![vec![1]]),
        };
        let err = CrossedComplex::new(xm, vec![level], 3).unwrap_err();
        assert!(err.to_string().contains("chain condition"));
    }

    #[test]
    fn fibers_concentrate() {
        let c = cc4();
        for n in 0..3 {
            let f = fiber(&c, n, 0).unwrap();
            assert!(f.concentrated, "stage {}: {:?}", n + 1, f.homotopy);
            assert!(f.matches, "stage {}: {:?}", n + 1, f.homotopy);
        }
    }

    #[test]
    fn coskeleton_kills_top() {
        let c = cc4();
        let k = c.coskeleton(3).unwrap();
        assert_eq!(k.module(4).unwrap().describe(), vec!["Z^1"]);
        assert!(k.homology(4).unwrap().is_trivial());
        assert!(k.homology(3).unwrap().is_trivial());
        let k2 = c.coskeleton(2).unwrap();
        assert!(k2.homology(3).unwrap().is_trivial());
        assert_eq!(c.coskeleton(1).unwrap().c2().group(0).order(), 2);
    }

    fn z2_over(base: Gpd, d3_hits_one: bool) -> (CrossedComplex, CrossedComplex) {
        let c2 = GGroup::constant(base.clone(), &FiniteGroup::cyclic(2));
        let xm = CrossedModule::new(c2, vec![vec![base.id(0); 2]]).unwrap();
        let low = CrossedComplex::from_xm(xm.clone());
        let level = Level {
            module: GModule::constant(base, &FgAbelian::cyclic(2)),
            boundary: Boundary::IntoGroup(vec![vec![usize::from(d3_hits_one)]]),
        };
        (low, CrossedComplex::new(xm, vec![level], 3).unwrap())
    }

    #[test]
    fn free_ncrs_adjunction() {
        let point = Arc::new(FiniteGroupoid::discrete(&["*"]));
        let (low, id_top) = z2_over(point.clone(), true);
        let (_, zero_top) = z2_over(point, false);
        let f = free_ncrs(&low, &[(0, Cell::Group(1))]).unwrap();
        assert_eq!(f.complex.module(3).unwrap().describe(), vec!["Z^1"]);
        assert_eq!(f.transpose_count(&id_top).unwrap(), 1);
        assert_eq!(f.brute_force_hom_count(&id_top).unwrap(), 1);
        assert_eq!(f.transpose_count(&zero_top).unwrap(), 0);
        assert_eq!(f.brute_force_hom_count(&zero_top).unwrap(), 0);
        let f0 = free_ncrs(&low, &[(0, Cell::Group(0))]).unwrap();
        assert_eq!(f0.transpose_count(&zero_top).unwrap(), 2);
        assert_eq!(f0.brute_force_hom_count(&zero_top).unwrap(), 2);

        let (low, top) = z2_over(z(2), false);
        let f = free_ncrs(&low, &[(0, Cell::Group(0)), (0, Cell::Group(1))]).unwrap();
        assert_eq!(f.complex.module(3).unwrap().describe(), vec!["Z^4"]);
        assert_eq!(f.transpose_count(&top).unwrap(), f.brute_force_hom_count(&top).unwrap());
    }

    #[test]
    fn cotriple_counit() {
        let (_, top) = z2_over(z(2), false);
        let (g, eps) = cotriple_step(&top).unwrap();
        assert_eq!(g.gens[0].len(), 4);
        eps.validate(&g.complex, &top).unwrap();
        assert!(eps.is_fibration(&g.complex, &top));
    }
}
