//! Pre-crossed and crossed modules over a groupoid, their 2-groupoids,
//! Peiffer quotients and free pre-crossed modules.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::coefficients::{GGroup, GModule, Gpd};
use crate::error::{check_cap, invalid, Result};
use crate::group::{AbelianSubgroup, FiniteGroup};
use crate::groupoid::{semidirect, FiniteGroupoid, Functor};

/// `(G, C, δ)` with `δ_x: C(x) -> End_G(x)` natural. `delta[x][u]` is an
/// arrow index of the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreCrossedModule {
    c: GGroup,
    delta: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeifferViolation {
    pub object: usize,
    pub u: usize,
    pub v: usize,
}

impl PreCrossedModule {
    pub fn new(c: GGroup, delta: Vec<Vec<usize>>) -> Result<PreCrossedModule> {
        let p = PreCrossedModule { c, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.c.base();
        if self.delta.len() != g.num_objects() {
            return invalid("boundary must be given at every object");
        }
        for x in 0..g.num_objects() {
            let cx = self.c.group(x);
            let d = &self.delta[x];
            if d.len() != cx.order() {
                return invalid(format!("boundary at `{}` has the wrong length", g.objects()[x]));
            }
            for &a in d {
                if a >= g.num_arrows() || g.src(a) != x || g.tgt(a) != x {
                    return invalid(format!("boundary at `{}` leaves End(x)", g.objects()[x]));
                }
            }
            for u in 0..cx.order() {
                for v in 0..cx.order() {
                    if d[cx.mul(u, v)] != g.compose(d[u], d[v]) {
                        return invalid(format!("boundary at `{}` is not a homomorphism", g.objects()[x]));
                    }
                }
            }
        }
        for t in 0..g.num_arrows() {
            let (x, y) = (g.src(t), g.tgt(t));
            for u in 0..self.c.group(x).order() {
                if self.delta[y][self.c.act(t, u)] != g.conj(t, self.delta[x][u]) {
                    return invalid(format!(
                        "boundary is not natural along `{}` at element {}",
                        g.arrow(t).name,
                        self.c.group(x).label(u)
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &Gpd {
        self.c.base()
    }

    pub fn c(&self) -> &GGroup {
        &self.c
    }

    pub fn delta(&self, x: usize, u: usize) -> usize {
        self.delta[x][u]
    }

    pub fn delta_table(&self) -> &[Vec<usize>] {
        &self.delta
    }

    /// Pairs where `ᵟ⁽ᵘ⁾v ≠ u v u⁻¹`.
    pub fn peiffer_violations(&self) -> Vec<PeifferViolation> {
        let mut out = Vec::new();
        for x in 0..self.base().num_objects() {
            let cx = self.c.group(x);
            for u in 0..cx.order() {
                for v in 0..cx.order() {
                    if self.c.act(self.delta[x][u], v) != cx.conj(u, v) {
                        out.push(PeifferViolation { object: x, u, v });
                    }
                }
            }
        }
        out
    }

    pub fn is_crossed(&self) -> bool {
        self.peiffer_violations().is_empty()
    }
}

/// `check_crossed`: the Peiffer identity at every object with all violations.
pub fn check_crossed(p: &PreCrossedModule) -> (bool, Vec<PeifferViolation>) {
    let v = p.peiffer_violations();
    (v.is_empty(), v)
}

/// A pre-crossed module satisfying the Peiffer identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossedModule(PreCrossedModule);

impl std::ops::Deref for CrossedModule {
    type Target = PreCrossedModule;
    fn deref(&self) -> &PreCrossedModule {
        &self.0
    }
}

impl CrossedModule {
    pub fn new(c: GGroup, delta: Vec<Vec<usize>>) -> Result<CrossedModule> {
        CrossedModule::from_pre(PreCrossedModule::new(c, delta)?)
    }

    pub fn from_pre(p: PreCrossedModule) -> Result<CrossedModule> {
        if let Some(v) = p.peiffer_violations().first() {
            let cx = p.c.group(v.object);
            return invalid(format!(
                "Peiffer identity fails at `{}` for u={}, v={}",
                p.base().objects()[v.object],
                cx.label(v.u),
                cx.label(v.v)
            ));
        }
        Ok(CrossedModule(p))
    }

    pub fn pre(&self) -> &PreCrossedModule {
        &self.0
    }

    /// The trivial crossed module `1_G`.
    pub fn trivial(base: Gpd) -> CrossedModule {
        let delta = (0..base.num_objects()).map(|x| vec![base.id(x)]).collect();
        CrossedModule(PreCrossedModule {
            c: GGroup::trivial(base),
            delta,
        })
    }

    /// The terminal crossed module `(End_G, inclusion)`.
    pub fn terminal(base: Gpd) -> CrossedModule {
        let (c, ends) = GGroup::end_functor(base);
        CrossedModule(PreCrossedModule { c, delta: ends })
    }

    /// `ker δ_x` as sorted element lists.
    pub fn kernel_elements(&self) -> Vec<Vec<usize>> {
        (0..self.base().num_objects())
            .map(|x| {
                let id = self.base().id(x);
                (0..self.c.group(x).order())
                    .filter(|&u| self.delta[x][u] == id)
                    .collect()
            })
            .collect()
    }

    /// `im δ_x` as arrow lists.
    pub fn image_arrows(&self) -> Vec<Vec<usize>> {
        self.delta
            .iter()
            .map(|d| d.iter().copied().collect::<BTreeSet<_>>().into_iter().collect())
            .collect()
    }

    /// `ker δ` as a G-module with its coordinate presentations.
    pub fn kernel_module(&self) -> Result<(GModule, Vec<AbelianSubgroup>)> {
        self.c.abelian_module(&self.kernel_elements())
    }

    /// Checks the consequences of the Peiffer identity: `ker δ` central and
    /// fixed by the action of `im δ`.
    pub fn check_consequences(&self) -> Result<()> {
        for (x, ker) in self.kernel_elements().iter().enumerate() {
            let cx = self.c.group(x);
            let center: BTreeSet<usize> = cx.center().into_iter().collect();
            if ker.iter().any(|k| !center.contains(k)) {
                return invalid("kernel of the boundary is not central");
            }
            for u in 0..cx.order() {
                if ker.iter().any(|&k| self.c.act(self.delta[x][u], k) != k) {
                    return invalid("image of the boundary acts nontrivially on its kernel");
                }
            }
        }
        Ok(())
    }
}

/// Peiffer quotient `C / P` where `P` is the normal closure (under conjugation
/// and the `G`-action) of all `ᵟ⁽ᵘ⁾v · (u v u⁻¹)⁻¹`.
pub fn peiffer_quotient(p: &PreCrossedModule) -> Result<(CrossedModule, Vec<Vec<usize>>)> {
    let g = p.base();
    check_cap("pre-crossed module", p.c.total_size())?;
    let mut fam: Vec<Vec<usize>> = (0..g.num_objects())
        .map(|x| {
            let cx = p.c.group(x);
            let mut gens = Vec::new();
            for u in 0..cx.order() {
                for v in 0..cx.order() {
                    let lhs = p.c.act(p.delta[x][u], v);
                    gens.push(cx.mul(lhs, cx.inv(cx.conj(u, v))));
                }
            }
            cx.normal_closure(&gens, &[])
        })
        .collect();
    loop {
        let mut changed = false;
        for t in 0..g.num_arrows() {
            let (x, y) = (g.src(t), g.tgt(t));
            let moved: Vec<usize> = fam[x].iter().map(|&a| p.c.act(t, a)).collect();
            let mut all = fam[y].clone();
            all.extend(moved);
            let closed = p.c.group(y).normal_closure(&all, &[]);
            if closed != fam[y] {
                fam[y] = closed;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let (q, proj) = p.c.quotient(&fam)?;
    let delta = (0..g.num_objects())
        .map(|x| {
            let mut d = vec![usize::MAX; q.group(x).order()];
            for u in 0..p.c.group(x).order() {
                d[proj[x][u]] = p.delta[x][u];
            }
            d
        })
        .collect();
    Ok((CrossedModule::new(q, delta)?, proj))
}

/// Morphisms of pre-crossed modules over the same base (identity change of
/// base), by brute-force enumeration: natural families `φ_x` with `δ'φ = δ`.
pub fn precrossed_homs(src: &PreCrossedModule, tgt: &PreCrossedModule) -> Vec<Vec<Vec<usize>>> {
    let g = src.base();
    let per_object: Vec<Vec<Vec<usize>>> = (0..g.num_objects())
        .map(|x| {
            src.c
                .group(x)
                .homs(tgt.c.group(x))
                .into_iter()
                .filter(|f| (0..f.len()).all(|u| tgt.delta[x][f[u]] == src.delta[x][u]))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; per_object.len()];
    if per_object.iter().any(|v| v.is_empty()) {
        return out;
    }
    loop {
        let fam: Vec<Vec<usize>> = choice.iter().enumerate().map(|(x, &i)| per_object[x][i].clone()).collect();
        let natural = (0..g.num_arrows()).all(|t| {
            let x = g.src(t);
            (0..src.c.group(x).order()).all(|u| fam[g.tgt(t)][src.c.act(t, u)] == tgt.c.act(t, fam[x][u]))
        });
        if natural {
            out.push(fam);
        }
        let mut i = 0;
        loop {
            if i == choice.len() {
                return out;
            }
            choice[i] += 1;
            if choice[i] < per_object[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Every crossed module over a one-object base with `|C| <= max_order`,
/// found by enumerating groups, actions and boundaries.
pub fn crossed_modules_over(base: &Gpd, max_order: usize) -> Vec<CrossedModule> {
    assert_eq!(base.num_objects(), 1, "target enumeration needs a one-object base");
    let (h, ends) = base.end_group(0);
    let mut out = Vec::new();
    for (_, c) in crate::group::small_groups(max_order) {
        let (aut, perms) = crate::group::automorphisms(&c);
        for act in h.homs(&aut) {
            let action: Vec<Vec<usize>> = (0..base.num_arrows())
                .map(|t| perms[act[ends.iter().position(|&e| e == t).unwrap()]].clone())
                .collect();
            let Ok(cg) = GGroup::new(base.clone(), vec![c.clone()], action) else {
                continue;
            };
            for d in c.homs(&h) {
                let delta = vec![d.iter().map(|&k| ends[k]).collect()];
                if let Ok(m) = CrossedModule::new(cg.clone(), delta) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// `π₁` of a crossed module: `G / im δ` with its projection.
pub fn pi1(m: &CrossedModule) -> Result<(FiniteGroupoid, Functor)> {
    m.base().quotient_by_image(&m.image_arrows())
}

/// `π₂` of a crossed module: `ker δ` as a `π₁`-module, with the projection to `π₁`.
pub fn pi2(m: &CrossedModule) -> Result<(GModule, Gpd, Functor)> {
    let (k, _) = m.kernel_module()?;
    let (p, q) = pi1(m)?;
    let p = Arc::new(p);
    let a = k.descend(&q, p.clone())?;
    Ok((a, p, q))
}

/// The upper ceiling: a crossed module's underlying G-group.
pub fn ceil2(m: &CrossedModule) -> GGroup {
    m.c.clone()
}

/// Internal groupoid in groupoids: object groupoid `G`, cell groupoid with
/// source, target and identity functors, and vertical composition.
#[derive(Clone, Debug)]
pub struct TwoGroupoid {
    pub objects: Gpd,
    pub cells: FiniteGroupoid,
    pub s: Functor,
    pub t: Functor,
    pub i: Functor,
    /// `vcomp[(d, c)]` is `d · c` (first `c`, then `d`) when `t(c) = s(d)`.
    pub vcomp: HashMap<(usize, usize), usize>,
}

impl TwoGroupoid {
    pub fn validate(&self) -> Result<()> {
        let g = &self.objects;
        self.s.validate(&self.cells, g)?;
        self.t.validate(&self.cells, g)?;
        self.i.validate(g, &self.cells)?;
        let idg = Functor::identity(g);
        if self.s.after(&self.i) != idg || self.t.after(&self.i) != idg {
            return invalid("source or target is not a retraction of the identity");
        }
        if self.s.obj != idg.obj || self.t.obj != idg.obj || self.i.obj != idg.obj {
            return invalid("structure maps must be the identity on objects");
        }
        let n = self.cells.num_arrows();
        let mut composable = 0;
        for c in 0..n {
            for d in 0..n {
                if self.t.arr[c] != self.s.arr[d] {
                    continue;
                }
                composable += 1;
                let Some(&e) = self.vcomp.get(&(d, c)) else {
                    return invalid("vertical composite missing");
                };
                if self.s.arr[e] != self.s.arr[c] || self.t.arr[e] != self.t.arr[d] {
                    return invalid("vertical composite has wrong boundary");
                }
            }
        }
        if composable != self.vcomp.len() {
            return invalid("vertical composition defined on a non-composable pair");
        }
        for c in 0..n {
            let (l, r) = (self.i.arr[self.t.arr[c]], self.i.arr[self.s.arr[c]]);
            if self.vcomp[&(l, c)] != c || self.vcomp[&(c, r)] != c {
                return invalid("vertical identities fail");
            }
        }
        for (&(d, c), &dc) in &self.vcomp {
            for e in 0..n {
                if let Some(&ed) = self.vcomp.get(&(e, d)) {
                    if self.vcomp.get(&(e, dc)) != self.vcomp.get(&(ed, c)) {
                        return invalid("vertical composition is not associative");
                    }
                }
            }
        }
        // interchange: vertical composition is a functor on the cell groupoid
        for (&(d, c), &dc) in &self.vcomp {
            for (&(d2, c2), &dc2) in &self.vcomp {
                if let (Some(h1), Some(h2)) = (self.cells.try_compose(d2, d), self.cells.try_compose(c2, c)) {
                    if self.vcomp.get(&(h1, h2)) != Some(&self.cells.compose(dc2, dc)) {
                        return invalid("interchange law fails");
                    }
                }
            }
        }
        Ok(())
    }

    /// Coequalizer of `s` and `t`: `G` modulo the targets of cells with trivial source.
    pub fn pi0(&self) -> Result<(FiniteGroupoid, Functor)> {
        let g = &self.objects;
        let n: Vec<Vec<usize>> = (0..g.num_objects())
            .map(|x| {
                let set: BTreeSet<usize> = (0..self.cells.num_arrows())
                    .filter(|&c| self.s.arr[c] == g.id(x))
                    .map(|c| self.t.arr[c])
                    .collect();
                set.into_iter().collect()
            })
            .collect();
        g.quotient_by_image(&n)
    }
}

/// The 2-groupoid of a crossed module: cells `(u, a)` with
/// `t(u, a) = δ(a)∘u` and `(v, b)·(u, a) = (u, ba)` vertically.
pub fn gpd_of_xm(m: &CrossedModule) -> Result<TwoGroupoid> {
    let g = m.base();
    let sd = semidirect(m.c())?;
    let t = Functor {
        obj: (0..g.num_objects()).collect(),
        arr: sd
            .pairs
            .iter()
            .map(|&(u, a)| g.compose(m.delta(g.tgt(u), a), u))
            .collect(),
    };
    let mut vcomp = HashMap::new();
    for (c, &(u, a)) in sd.pairs.iter().enumerate() {
        let y = g.tgt(u);
        let v = t.arr[c];
        for b in 0..m.c().group(y).order() {
            let d = sd.index(v, b);
            vcomp.insert((d, c), sd.index(u, m.c().group(y).mul(b, a)));
        }
    }
    Ok(TwoGroupoid {
        objects: g.clone(),
        cells: sd.groupoid,
        s: sd.s,
        t,
        i: sd.i,
        vcomp,
    })
}

/// Crossed module of a 2-groupoid: `C(x)` = cells with source `id_x`,
/// acted on by conjugation with `i(t)`, with boundary the target.
/// Returns it with, per object, the cell of each element.
pub fn xm_of_gpd(gg: &TwoGroupoid) -> Result<(CrossedModule, Vec<Vec<usize>>)> {
    gg.validate()?;
    let g = &gg.objects;
    let cells: Vec<Vec<usize>> = (0..g.num_objects())
        .map(|x| {
            (0..gg.cells.num_arrows())
                .filter(|&c| gg.s.arr[c] == g.id(x))
                .collect()
        })
        .collect();
    let mut groups = Vec::new();
    for (x, cx) in cells.iter().enumerate() {
        let pos = |c: usize| cx.iter().position(|&d| d == c).expect("closed under composition");
        let mul = cx
            .iter()
            .map(|&a| cx.iter().map(|&b| pos(gg.cells.compose(a, b))).collect())
            .collect();
        let labels = cx.iter().map(|&c| gg.cells.arrow(c).name.clone()).collect();
        let _ = x;
        groups.push(FiniteGroup::from_table(mul, Some(labels))?);
    }
    let action = (0..g.num_arrows())
        .map(|t| {
            let (x, y) = (g.src(t), g.tgt(t));
            let it = gg.i.arr[t];
            cells[x]
                .iter()
                .map(|&c| {
                    let d = gg.cells.conj(it, c);
                    cells[y].iter().position(|&e| e == d).expect("conjugate has trivial source")
                })
                .collect()
        })
        .collect();
    let c = GGroup::new(g.clone(), groups, action)?;
    let delta = cells
        .iter()
        .map(|cx| cx.iter().map(|&c| gg.t.arr[c]).collect())
        .collect();
    Ok((CrossedModule::new(c, delta)?, cells))
}

/// Checks that `a ↦ b` elementwise is an isomorphism of crossed modules over
/// the same base.
pub fn is_xm_iso(a: &PreCrossedModule, b: &PreCrossedModule, maps: &[Vec<usize>]) -> bool {
    let g = a.base();
    crate::coefficients::is_ggroup_hom(a.c(), b.c(), maps)
        && (0..g.num_objects()).all(|x| {
            let img: BTreeSet<usize> = maps[x].iter().copied().collect();
            img.len() == a.c().group(x).order()
                && img.len() == b.c().group(x).order()
                && (0..maps[x].len()).all(|u| b.delta(x, maps[x][u]) == a.delta(x, u))
        })
}

/// Round trip `xm_of_gpd(gpd_of_xm(M)) ≅ M` via `a ↦ (id_x, a)`.
pub fn check_roundtrip_xm(m: &CrossedModule) -> Result<bool> {
    let gg = gpd_of_xm(m)?;
    let (m2, cells) = xm_of_gpd(&gg)?;
    let g = m.base();
    let sd = semidirect(m.c())?;
    let maps: Vec<Vec<usize>> = (0..g.num_objects())
        .map(|x| {
            (0..m.c().group(x).order())
                .map(|a| {
                    let cell = sd.index(g.id(x), a);
                    cells[x].iter().position(|&c| c == cell).unwrap()
                })
                .collect()
        })
        .collect();
    Ok(is_xm_iso(m, &m2, &maps))
}

/// Round trip `gpd_of_xm(xm_of_gpd(𝒢)) ≅ 𝒢` via `(u, c) ↦ c ∘ i(u)`.
pub fn check_roundtrip_gpd(gg: &TwoGroupoid) -> Result<bool> {
    let (m, cells) = xm_of_gpd(gg)?;
    let g2 = gpd_of_xm(&m)?;
    let sd = semidirect(m.c())?;
    let phi: Vec<usize> = sd
        .pairs
        .iter()
        .map(|&(u, a)| gg.cells.compose(cells[gg.objects.tgt(u)][a], gg.i.arr[u]))
        .collect();
    let bij = phi.iter().copied().collect::<BTreeSet<_>>().len() == gg.cells.num_arrows()
        && phi.len() == gg.cells.num_arrows();
    let functor = Functor {
        obj: (0..gg.objects.num_objects()).collect(),
        arr: phi.clone(),
    };
    let hom = functor.validate(&g2.cells, &gg.cells).is_ok();
    let structure = (0..phi.len()).all(|c| gg.s.arr[phi[c]] == g2.s.arr[c] && gg.t.arr[phi[c]] == g2.t.arr[c])
        && (0..gg.objects.num_arrows()).all(|u| phi[g2.i.arr[u]] == gg.i.arr[u]);
    let vert = g2
        .vcomp
        .iter()
        .all(|(&(d, c), &e)| gg.vcomp.get(&(phi[d], phi[c])) == Some(&phi[e]));
    Ok(bij && hom && structure && vert)
}

/// Letter of a free group word: generator index and exponent sign.
pub type Letter = (usize, bool);

/// Free pre-crossed module on `f: X -> arr(G)` with each `f(u)` an
/// endomorphism: `C(x)` is free on pairs `⟨t, u⟩` with `t: z_u -> x`.
#[derive(Clone, Debug)]
pub struct FreePreCrossedModule {
    base: Gpd,
    /// `f(u)` for each `u ∈ X`
    f: Vec<usize>,
    /// generators `(t, u)`
    gens: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
}

impl FreePreCrossedModule {
    pub fn new(base: Gpd, f: Vec<usize>) -> Result<FreePreCrossedModule> {
        for &a in &f {
            if a >= base.num_arrows() || base.src(a) != base.tgt(a) {
                return invalid("f(u) must be an endomorphism");
            }
        }
        let mut gens = Vec::new();
        for (u, &a) in f.iter().enumerate() {
            for t in base.hom_from(base.src(a)) {
                gens.push((t, u));
            }
        }
        let index = gens.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        Ok(FreePreCrossedModule { base, f, gens, index })
    }

    pub fn base(&self) -> &Gpd {
        &self.base
    }

    pub fn generators(&self) -> &[(usize, usize)] {
        &self.gens
    }

    /// Object where generator `⟨t,u⟩` lives (the target of `t`).
    pub fn gen_object(&self, i: usize) -> usize {
        self.base.tgt(self.gens[i].0)
    }

    /// Freely reduced product of words.
    pub fn mul(&self, a: &[Letter], b: &[Letter]) -> Vec<Letter> {
        let mut out: Vec<Letter> = a.to_vec();
        for &l in b {
            match out.last() {
                Some(&(g, s)) if g == l.0 && s != l.1 => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        out
    }

    pub fn inverse(&self, a: &[Letter]) -> Vec<Letter> {
        a.iter().rev().map(|&(g, s)| (g, !s)).collect()
    }

    pub fn reduce(&self, a: &[Letter]) -> Vec<Letter> {
        self.mul(&[], a)
    }

    /// `δ⟨t,u⟩ = t f(u) t⁻¹`, extended multiplicatively.
    pub fn delta(&self, x: usize, w: &[Letter]) -> usize {
        let mut r = self.base.id(x);
        for &(i, s) in w {
            let (t, u) = self.gens[i];
            let mut d = self.base.conj(t, self.f[u]);
            if !s {
                d = self.base.inv(d);
            }
            r = self.base.compose(r, d);
        }
        r
    }

    /// `ˢ⟨t,u⟩ = ⟨st,u⟩`.
    pub fn act(&self, s: usize, w: &[Letter]) -> Vec<Letter> {
        w.iter()
            .map(|&(i, sg)| {
                let (t, u) = self.gens[i];
                (self.index[&(self.base.compose(s, t), u)], sg)
            })
            .collect()
    }

    /// Evaluates a word in a target pre-crossed module given generator images.
    pub fn eval(&self, target: &PreCrossedModule, x: usize, images: &[usize], w: &[Letter]) -> usize {
        let cx = target.c().group(x);
        let mut r = cx.identity();
        for &(i, s) in w {
            let v = if s { images[i] } else { cx.inv(images[i]) };
            r = cx.mul(r, v);
        }
        r
    }

    /// Transpose of `c: X -> U'(M)` (with `δ'(c_u) = f(u)`): generator images `ᵗc_u`.
    pub fn transpose(&self, target: &PreCrossedModule, c: &[usize]) -> Vec<usize> {
        self.gens
            .iter()
            .map(|&(t, u)| target.c().act(t, c[u]))
            .collect()
    }

    /// Size of `Hom(X, U'(M))` over `G`: choices `c_u ∈ C'(z_u)` with `δ'(c_u) = f(u)`.
    pub fn transpose_count(&self, target: &PreCrossedModule) -> usize {
        self.f
            .iter()
            .map(|&a| {
                let z = self.base.src(a);
                (0..target.c().group(z).order())
                    .filter(|&c| target.delta(z, c) == a)
                    .count()
            })
            .product()
    }

    /// Counts morphisms `Free -> M` by searching over all generator images
    /// (any assignment extends to the free groups), keeping equivariant ones
    /// compatible with boundaries.
    pub fn brute_force_hom_count(&self, target: &PreCrossedModule) -> usize {
        let n = self.gens.len();
        let mut images = vec![0usize; n];
        self.search(target, 0, &mut images)
    }

    fn search(&self, m: &PreCrossedModule, k: usize, images: &mut Vec<usize>) -> usize {
        if k == self.gens.len() {
            return 1;
        }
        let x = self.gen_object(k);
        let (t, u) = self.gens[k];
        let want = self.base.conj(t, self.f[u]);
        let mut total = 0;
        for c in 0..m.c().group(x).order() {
            if m.delta(x, c) != want {
                continue;
            }
            images[k] = c;
            // equivariance against earlier generators: ˢφ⟨t',u⟩ = φ⟨st',u⟩
            let ok = (0..=k).all(|j| {
                let (tj, uj) = self.gens[j];
                (0..=k).all(|i| {
                    let (ti, ui) = self.gens[i];
                    if ui != uj {
                        return true;
                    }
                    // s = ti ∘ tj⁻¹ sends ⟨tj,u⟩ to ⟨ti,u⟩
                    if self.base.src(ti) != self.base.src(tj) {
                        return true;
                    }
                    let s = self.base.compose(ti, self.base.inv(tj));
                    m.c().act(s, images[j]) == images[i]
                })
            });
            if ok {
                total += self.search(m, k + 1, images);
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize) -> Gpd {
        Arc::new(FiniteGroupoid::from_group(&FiniteGroup::cyclic(n), "*"))
    }

    #[test]
    fn examples_crossed() {
        let g = z(2);
        let c = GGroup::constant(g.clone(), &FiniteGroup::cyclic(2));
        let zero = CrossedModule::new(c.clone(), vec![vec![0, 0]]).unwrap();
        let id = CrossedModule::new(c, vec![vec![0, 1]]).unwrap();
        assert_eq!(pi1(&zero).unwrap().0.num_arrows(), 2);
        assert_eq!(pi1(&id).unwrap().0.num_arrows(), 1);
        assert_eq!(pi2(&zero).unwrap().0.describe(), vec!["Z/2"]);
        assert_eq!(pi2(&id).unwrap().0.describe(), vec!["0"]);
        assert!(check_roundtrip_xm(&zero).unwrap());
        assert!(check_roundtrip_gpd(&gpd_of_xm(&id).unwrap()).unwrap());
        assert_eq!(gpd_of_xm(&zero).unwrap().cells.num_arrows(), 4);
    }

    #[test]
    fn sign_map_peiffer_quotient() {
        let g = z(2);
        let c = GGroup::constant(g, &FiniteGroup::s3());
        let sign: Vec<usize> = vec![0, 0, 0, 1, 1, 1];
        let p = PreCrossedModule::new(c, vec![sign]).unwrap();
        assert!(!p.is_crossed());
        let (q, _) = peiffer_quotient(&p).unwrap();
        assert_eq!(q.c().group(0).order(), 2);
        let (q2, proj) = peiffer_quotient(&q).unwrap();
        assert_eq!(proj[0], vec![0, 1]);
        assert_eq!(q2.c().group(0).order(), 2);
    }

    #[test]
    fn free_precrossed_counts() {
        let g = z(2);
        let c = GGroup::constant(g.clone(), &FiniteGroup::cyclic(2));
        let id = CrossedModule::new(c, vec![vec![0, 1]]).unwrap();
        let free = FreePreCrossedModule::new(g, vec![1]).unwrap();
        assert_eq!(free.transpose_count(&id), 1);
        assert_eq!(free.brute_force_hom_count(&id), 1);
    }
}
