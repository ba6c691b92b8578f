//! Coefficient functors on a groupoid: `GGroup` (finite groups) and
//! `GModule` (finitely generated abelian groups), with kernels, images and
//! cokernels of module morphisms.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::abelian::FgAbelian;
use crate::error::{check_cap, invalid, Result};
use crate::group::{AbelianSubgroup, FiniteGroup};
use crate::groupoid::{Arrow, FiniteGroupoid, Functor};
use crate::linalg::Mat;

pub type Gpd = Arc<FiniteGroupoid>;

/// A functor from a groupoid to finite groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GGroup {
    base: Gpd,
    groups: Vec<FiniteGroup>,
    // action[t][a] = ᵗa
    action: Vec<Vec<usize>>,
}

impl GGroup {
    pub fn new(base: Gpd, groups: Vec<FiniteGroup>, action: Vec<Vec<usize>>) -> Result<GGroup> {
        let c = GGroup {
            base,
            groups,
            action,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let b = &self.base;
        if self.groups.len() != b.num_objects() || self.action.len() != b.num_arrows() {
            return invalid("G-group must give a group per object and a map per arrow");
        }
        for t in 0..b.num_arrows() {
            let (x, y) = (b.src(t), b.tgt(t));
            let a = &self.action[t];
            if a.len() != self.groups[x].order() || a.iter().any(|&v| v >= self.groups[y].order()) {
                return invalid(format!("action of `{}` has the wrong shape", b.arrow(t).name));
            }
            let img: BTreeSet<usize> = a.iter().copied().collect();
            if img.len() != self.groups[y].order() || a.len() != self.groups[y].order() {
                return invalid(format!("action of `{}` is not bijective", b.arrow(t).name));
            }
            if !self.groups[x].is_hom(&self.groups[y], a) {
                return invalid(format!("action of `{}` is not a homomorphism", b.arrow(t).name));
            }
        }
        for x in 0..b.num_objects() {
            if self.action[b.id(x)].iter().enumerate().any(|(i, &v)| i != v) {
                return invalid(format!("identity at `{}` acts nontrivially", b.objects()[x]));
            }
        }
        for (g, f, h) in b.comp_triples() {
            for a in 0..self.groups[b.src(f)].order() {
                if self.action[g][self.action[f][a]] != self.action[h][a] {
                    return invalid("action is not functorial");
                }
            }
        }
        Ok(())
    }

    pub fn constant(base: Gpd, g: &FiniteGroup) -> GGroup {
        let groups = vec![g.clone(); base.num_objects()];
        let action = vec![(0..g.order()).collect(); base.num_arrows()];
        GGroup {
            base,
            groups,
            action,
        }
    }

    pub fn trivial(base: Gpd) -> GGroup {
        GGroup::constant(base, &FiniteGroup::trivial())
    }

    /// Endomorphism groups with action by conjugation. Element `i` at `x` is
    /// the arrow `end_arrows(x)[i]`.
    pub fn end_functor(base: Gpd) -> (GGroup, Vec<Vec<usize>>) {
        let mut groups = Vec::new();
        let mut ends = Vec::new();
        for x in 0..base.num_objects() {
            let (g, e) = base.end_group(x);
            groups.push(g);
            ends.push(e);
        }
        let mut action = Vec::new();
        for t in 0..base.num_arrows() {
            let (x, y) = (base.src(t), base.tgt(t));
            let row = ends[x]
                .iter()
                .map(|&a| {
                    let c = base.conj(t, a);
                    ends[y].iter().position(|&b| b == c).expect("conjugate is an endomorphism")
                })
                .collect();
            action.push(row);
        }
        (
            GGroup {
                base,
                groups,
                action,
            },
            ends,
        )
    }

    pub fn base(&self) -> &Gpd {
        &self.base
    }

    pub fn group(&self, x: usize) -> &FiniteGroup {
        &self.groups[x]
    }

    pub fn groups(&self) -> &[FiniteGroup] {
        &self.groups
    }

    pub fn act(&self, t: usize, a: usize) -> usize {
        self.action[t][a]
    }

    pub fn action(&self, t: usize) -> &[usize] {
        &self.action[t]
    }

    pub fn total_size(&self) -> usize {
        self.groups.iter().map(|g| g.order()).sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.groups.iter().all(|g| g.order() == 1)
    }

    /// Totally disconnected groupoid with `End(x) = C(x)`; arrow `(x, a)` is
    /// numbered consecutively by object, then element.
    pub fn hat(&self) -> Result<FiniteGroupoid> {
        check_cap("hat groupoid", self.total_size())?;
        let mut offset = Vec::new();
        let mut arrows = Vec::new();
        for (x, g) in self.groups.iter().enumerate() {
            offset.push(arrows.len());
            for a in 0..g.order() {
                arrows.push(Arrow {
                    name: format!("{}:{}", self.base.objects()[x], g.label(a)),
                    src: x,
                    tgt: x,
                });
            }
        }
        let owner: Vec<(usize, usize)> = self
            .groups
            .iter()
            .enumerate()
            .flat_map(|(x, g)| (0..g.order()).map(move |a| (x, a)))
            .collect();
        let id = (0..self.groups.len())
            .map(|x| offset[x] + self.groups[x].identity())
            .collect();
        Ok(FiniteGroupoid::from_law(
            self.base.objects().to_vec(),
            arrows,
            id,
            |g, f| {
                let (x, a) = owner[g];
                let (_, b) = owner[f];
                offset[x] + self.groups[x].mul(a, b)
            },
        ))
    }

    /// `C ∘ f` over the source of `f`.
    pub fn restrict(&self, f: &Functor, new_base: Gpd) -> GGroup {
        GGroup {
            groups: f.obj.iter().map(|&y| self.groups[y].clone()).collect(),
            action: f.arr.iter().map(|&t| self.action[t].clone()).collect(),
            base: new_base,
        }
    }

    /// Objectwise product; element `(a, b)` has index `a * |D(x)| + b`.
    pub fn product(&self, other: &GGroup) -> GGroup {
        let groups = self
            .groups
            .iter()
            .zip(&other.groups)
            .map(|(a, b)| FiniteGroup::product(a, b))
            .collect();
        let action = (0..self.base.num_arrows())
            .map(|t| {
                let m = other.groups[self.base.src(t)].order();
                let m2 = other.groups[self.base.tgt(t)].order();
                (0..self.groups[self.base.src(t)].order() * m)
                    .map(|e| self.action[t][e / m] * m2 + other.action[t][e % m])
                    .collect()
            })
            .collect();
        GGroup {
            base: self.base.clone(),
            groups,
            action,
        }
    }

    /// Whether per-object subsets are subgroups stable under the action.
    pub fn is_stable_family(&self, sub: &[Vec<usize>]) -> bool {
        (0..self.groups.len()).all(|x| self.groups[x].is_subgroup(&sub[x]))
            && (0..self.base.num_arrows()).all(|t| {
                let target: BTreeSet<usize> = sub[self.base.tgt(t)].iter().copied().collect();
                sub[self.base.src(t)].iter().all(|&a| target.contains(&self.action[t][a]))
            })
    }

    /// Quotient by a stable family of normal subgroups, with projections.
    pub fn quotient(&self, normal: &[Vec<usize>]) -> Result<(GGroup, Vec<Vec<usize>>)> {
        if !self.is_stable_family(normal) {
            return invalid("quotient family is not a stable family of subgroups");
        }
        let mut groups = Vec::new();
        let mut proj = Vec::new();
        for (x, g) in self.groups.iter().enumerate() {
            if !g.is_normal(&normal[x]) {
                return invalid(format!("subgroup at `{}` is not normal", self.base.objects()[x]));
            }
            let (q, p) = g.quotient(&normal[x]);
            groups.push(q);
            proj.push(p);
        }
        let action = (0..self.base.num_arrows())
            .map(|t| {
                let (x, y) = (self.base.src(t), self.base.tgt(t));
                let mut row = vec![0; groups[x].order()];
                for a in 0..self.groups[x].order() {
                    row[proj[x][a]] = proj[y][self.action[t][a]];
                }
                row
            })
            .collect();
        Ok((
            GGroup {
                base: self.base.clone(),
                groups,
                action,
            },
            proj,
        ))
    }

    /// Sub-G-group on a stable family; returns it with the inclusions.
    pub fn subgroup(&self, sub: &[Vec<usize>]) -> Result<(GGroup, Vec<Vec<usize>>)> {
        if !self.is_stable_family(sub) {
            return invalid("not a stable family of subgroups");
        }
        let mut groups = Vec::new();
        let mut incl: Vec<Vec<usize>> = Vec::new();
        for (x, g) in self.groups.iter().enumerate() {
            let mut elems = sub[x].clone();
            elems.sort();
            elems.dedup();
            let pos = |a: usize| elems.binary_search(&a).unwrap();
            let mul = elems
                .iter()
                .map(|&a| elems.iter().map(|&b| pos(g.mul(a, b))).collect())
                .collect();
            let labels = elems.iter().map(|&a| g.label(a).to_string()).collect();
            groups.push(FiniteGroup::from_table(mul, Some(labels))?);
            incl.push(elems);
        }
        let action = (0..self.base.num_arrows())
            .map(|t| {
                let (x, y) = (self.base.src(t), self.base.tgt(t));
                incl[x]
                    .iter()
                    .map(|&a| incl[y].binary_search(&self.action[t][a]).unwrap())
                    .collect()
            })
            .collect();
        Ok((
            GGroup {
                base: self.base.clone(),
                groups,
                action,
            },
            incl,
        ))
    }

    /// A stable family of abelian subgroups as a G-module, with the
    /// presentations used for coordinates at each object.
    pub fn abelian_module(&self, sub: &[Vec<usize>]) -> Result<(GModule, Vec<AbelianSubgroup>)> {
        if !self.is_stable_family(sub) {
            return invalid("not a stable family of subgroups");
        }
        let mut pres = Vec::new();
        for (x, g) in self.groups.iter().enumerate() {
            if sub[x].iter().any(|&a| sub[x].iter().any(|&b| g.mul(a, b) != g.mul(b, a))) {
                return invalid(format!("subgroup at `{}` is not abelian", self.base.objects()[x]));
            }
            pres.push(AbelianSubgroup::new(g, &sub[x]));
        }
        let mut action = Vec::new();
        for t in 0..self.base.num_arrows() {
            let (x, y) = (self.base.src(t), self.base.tgt(t));
            let cols: Vec<Vec<i64>> = pres[x]
                .gens
                .iter()
                .map(|&gen| pres[y].coords(self.action[t][gen]).expect("stable").clone())
                .collect();
            action.push(Mat::from_cols(&cols, pres[y].pres.rank()));
        }
        let m = GModule::new(
            self.base.clone(),
            pres.iter().map(|p| p.pres.clone()).collect(),
            action,
        )?;
        Ok((m, pres))
    }
}

/// Natural family of homomorphisms between G-groups over the same base.
pub fn is_ggroup_hom(src: &GGroup, tgt: &GGroup, maps: &[Vec<usize>]) -> bool {
    let b = src.base();
    maps.len() == b.num_objects()
        && (0..b.num_objects()).all(|x| src.group(x).is_hom(tgt.group(x), &maps[x]))
        && (0..b.num_arrows()).all(|t| {
            let x = b.src(t);
            (0..src.group(x).order()).all(|a| maps[b.tgt(t)][src.act(t, a)] == tgt.act(t, maps[x][a]))
        })
}

/// A functor from a groupoid to finitely generated abelian groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GModule {
    base: Gpd,
    values: Vec<FgAbelian>,
    action: Vec<Mat>,
}

impl GModule {
    pub fn new(base: Gpd, values: Vec<FgAbelian>, action: Vec<Mat>) -> Result<GModule> {
        let m = GModule {
            base,
            values,
            action,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let b = &self.base;
        if self.values.len() != b.num_objects() || self.action.len() != b.num_arrows() {
            return invalid("G-module must give a value per object and a matrix per arrow");
        }
        for t in 0..b.num_arrows() {
            let (x, y) = (b.src(t), b.tgt(t));
            let m = &self.action[t];
            if m.rows() != self.values[y].rank() || m.cols() != self.values[x].rank() {
                return invalid(format!("action matrix of `{}` has the wrong shape", b.arrow(t).name));
            }
            if !self.values[x].hom_well_defined(m, &self.values[y]) {
                return invalid(format!("action of `{}` does not respect relations", b.arrow(t).name));
            }
        }
        for x in 0..b.num_objects() {
            let v = &self.values[x];
            if !v.maps_equal(&self.action[b.id(x)], &Mat::identity(v.rank()), v) {
                return invalid(format!("identity at `{}` acts nontrivially", b.objects()[x]));
            }
        }
        for (g, f, h) in b.comp_triples() {
            let lhs = self.action[g].mul(&self.action[f]);
            let y = b.tgt(h);
            if !self.values[b.src(f)].maps_equal(&lhs, &self.action[h], &self.values[y]) {
                return invalid("action is not functorial");
            }
        }
        Ok(())
    }

    pub fn constant(base: Gpd, a: &FgAbelian) -> GModule {
        let values = vec![a.clone(); base.num_objects()];
        let action = vec![Mat::identity(a.rank()); base.num_arrows()];
        GModule {
            base,
            values,
            action,
        }
    }

    pub fn zero(base: Gpd) -> GModule {
        GModule::constant(base, &FgAbelian::zero())
    }

    /// Constant value with arrow `t` acting by `act(t)`.
    pub fn with_action(base: Gpd, a: &FgAbelian, act: impl Fn(usize) -> Mat) -> Result<GModule> {
        let values = vec![a.clone(); base.num_objects()];
        let action = (0..base.num_arrows()).map(act).collect();
        GModule::new(base, values, action)
    }

    pub fn base(&self) -> &Gpd {
        &self.base
    }

    pub fn value(&self, x: usize) -> &FgAbelian {
        &self.values[x]
    }

    pub fn values(&self) -> &[FgAbelian] {
        &self.values
    }

    pub fn action(&self, t: usize) -> &Mat {
        &self.action[t]
    }

    pub fn act(&self, t: usize, v: &[i64]) -> Vec<i64> {
        self.values[self.base.tgt(t)].reduce(&self.action[t].mul_vec(v))
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|v| v.is_trivial())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Per-object invariant factor descriptions.
    pub fn describe(&self) -> Vec<String> {
        self.values.iter().map(|v| v.invariants()).collect()
    }

    /// Whether every arrow acts as the identity.
    pub fn has_trivial_action(&self) -> bool {
        (0..self.base.num_arrows()).all(|t| {
            let (x, y) = (self.base.src(t), self.base.tgt(t));
            x != y || {
                let v = &self.values[x];
                v.maps_equal(&self.action[t], &Mat::identity(v.rank()), v)
            }
        })
    }

    pub fn restrict(&self, f: &Functor, new_base: Gpd) -> GModule {
        GModule {
            values: f.obj.iter().map(|&y| self.values[y].clone()).collect(),
            action: f.arr.iter().map(|&t| self.action[t].clone()).collect(),
            base: new_base,
        }
    }

    /// Same values on a different base with the same objects and the given arrow actions.
    pub fn rebase(&self, base: Gpd, action: Vec<Mat>) -> Result<GModule> {
        GModule::new(base, self.values.clone(), action)
    }

    pub fn direct_sum(parts: &[&GModule]) -> GModule {
        let base = parts[0].base.clone();
        let values = (0..base.num_objects())
            .map(|x| {
                let vs: Vec<&FgAbelian> = parts.iter().map(|p| &p.values[x]).collect();
                FgAbelian::direct_sum(&vs)
            })
            .collect();
        let action = (0..base.num_arrows())
            .map(|t| {
                let ms: Vec<&Mat> = parts.iter().map(|p| &p.action[t]).collect();
                Mat::block_diag(&ms)
            })
            .collect();
        GModule {
            base,
            values,
            action,
        }
    }

    /// Canonical injections and projections of a direct sum of `ranks` at object `x`.
    pub fn sum_injection(ranks: &[usize], i: usize) -> Mat {
        let total: usize = ranks.iter().sum();
        let off: usize = ranks[..i].iter().sum();
        let mut m = Mat::zeros(total, ranks[i]);
        for k in 0..ranks[i] {
            m.set(off + k, k, 1);
        }
        m
    }

    pub fn sum_projection(ranks: &[usize], i: usize) -> Mat {
        GModule::sum_injection(ranks, i).transpose()
    }

    /// A finite module as a G-group; element `i` at `x` is `elements[x][i]`.
    pub fn to_ggroup(&self) -> Result<(GGroup, Vec<Vec<Vec<i64>>>)> {
        let mut groups = Vec::new();
        let mut elements = Vec::new();
        let mut index: Vec<HashMap<Vec<i64>, usize>> = Vec::new();
        for v in &self.values {
            let els = v
                .elements()
                .ok_or_else(|| crate::Error::Range("module is not finite".into()))?;
            check_cap("module elements", els.len())?;
            let idx: HashMap<Vec<i64>, usize> = els.iter().enumerate().map(|(i, e)| (v.coords(e), i)).collect();
            let mul = els
                .iter()
                .map(|a| els.iter().map(|b| idx[&v.coords(&v.add(a, b))]).collect())
                .collect();
            let labels = els.iter().map(|e| format!("{:?}", v.coords(e))).collect();
            groups.push(FiniteGroup::from_table(mul, Some(labels))?);
            elements.push(els);
            index.push(idx);
        }
        let action = (0..self.base.num_arrows())
            .map(|t| {
                let (x, y) = (self.base.src(t), self.base.tgt(t));
                elements[x]
                    .iter()
                    .map(|e| index[y][&self.values[y].coords(&self.act(t, e))])
                    .collect()
            })
            .collect();
        Ok((GGroup::new(self.base.clone(), groups, action)?, elements))
    }

    /// Transports the action along `q: G -> Π` (identity on objects); fails
    /// when two arrows with the same image act differently.
    pub fn descend(&self, q: &Functor, pi: Gpd) -> Result<GModule> {
        let b = &self.base;
        if q.obj.len() != pi.num_objects() || q.obj.iter().enumerate().any(|(i, &x)| i != x) {
            return invalid("descent is only defined along identity-on-objects functors");
        }
        let mut action: Vec<Option<Mat>> = vec![None; pi.num_arrows()];
        for t in 0..b.num_arrows() {
            let p = q.arr[t];
            match &action[p] {
                None => action[p] = Some(self.action[t].clone()),
                Some(m) => {
                    let (x, y) = (b.src(t), b.tgt(t));
                    if !self.values[x].maps_equal(m, &self.action[t], &self.values[y]) {
                        return invalid(format!(
                            "descent obstruction: arrows with the same image act differently at `{}`",
                            b.arrow(t).name
                        ));
                    }
                }
            }
        }
        let action = action
            .into_iter()
            .map(|m| m.ok_or_else(|| crate::Error::Invalid("descent functor is not surjective".into())))
            .collect::<Result<Vec<_>>>()?;
        GModule::new(pi, self.values.clone(), action)
    }
}

/// A morphism of G-modules: one matrix per object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModHom {
    pub mats: Vec<Mat>,
}

impl ModHom {
    pub fn zero(src: &GModule, tgt: &GModule) -> ModHom {
        ModHom {
            mats: (0..src.base.num_objects())
                .map(|x| Mat::zeros(tgt.values[x].rank(), src.values[x].rank()))
                .collect(),
        }
    }

    pub fn identity(m: &GModule) -> ModHom {
        ModHom {
            mats: m.values.iter().map(|v| Mat::identity(v.rank())).collect(),
        }
    }

    pub fn apply(&self, tgt: &GModule, x: usize, v: &[i64]) -> Vec<i64> {
        tgt.values[x].reduce(&self.mats[x].mul_vec(v))
    }

    /// `self` after `first`.
    pub fn after(&self, first: &ModHom) -> ModHom {
        ModHom {
            mats: self.mats.iter().zip(&first.mats).map(|(a, b)| a.mul(b)).collect(),
        }
    }

    pub fn sub(&self, other: &ModHom) -> ModHom {
        ModHom {
            mats: self.mats.iter().zip(&other.mats).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn add(&self, other: &ModHom) -> ModHom {
        ModHom {
            mats: self.mats.iter().zip(&other.mats).map(|(a, b)| a.add(b)).collect(),
        }
    }

    /// Shapes, relation compatibility and naturality squares.
    pub fn validate(&self, src: &GModule, tgt: &GModule) -> Result<()> {
        let b = &src.base;
        if self.mats.len() != b.num_objects() {
            return invalid("morphism must give a matrix per object");
        }
        for x in 0..b.num_objects() {
            let m = &self.mats[x];
            if m.rows() != tgt.values[x].rank() || m.cols() != src.values[x].rank() {
                return invalid(format!("morphism matrix at `{}` has the wrong shape", b.objects()[x]));
            }
            if !src.values[x].hom_well_defined(m, &tgt.values[x]) {
                return invalid(format!("morphism at `{}` does not respect relations", b.objects()[x]));
            }
        }
        for t in 0..b.num_arrows() {
            let (x, y) = (b.src(t), b.tgt(t));
            let lhs = tgt.action[t].mul(&self.mats[x]);
            let rhs = self.mats[y].mul(&src.action[t]);
            if !src.values[x].maps_equal(&lhs, &rhs, &tgt.values[y]) {
                return invalid(format!("morphism is not natural along `{}`", b.arrow(t).name));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self, src: &GModule, tgt: &GModule) -> bool {
        (0..self.mats.len()).all(|x| {
            src.values[x].maps_equal(&self.mats[x], &Mat::zeros(tgt.values[x].rank(), src.values[x].rank()), &tgt.values[x])
        })
    }

    pub fn equals(&self, other: &ModHom, src: &GModule, tgt: &GModule) -> bool {
        (0..self.mats.len()).all(|x| src.values[x].maps_equal(&self.mats[x], &other.mats[x], &tgt.values[x]))
    }
}

/// Submodule generated by columns `gens` of `ambient`, presented on those generators.
fn span_presentation(ambient: &FgAbelian, gens: &Mat) -> FgAbelian {
    FgAbelian::new(gens.cols(), ambient.relation_lattice(gens))
}

/// Matrix of an action transported to chosen generators: column `j` solves
/// `gens_y w = act * gens_x e_j` in `ambient_y`.
fn transport_action(ambient_y: &FgAbelian, gens_y: &Mat, act: &Mat, gens_x: &Mat) -> Mat {
    let cols: Vec<Vec<i64>> = (0..gens_x.cols())
        .map(|j| {
            let v = act.mul_vec(&gens_x.col(j));
            ambient_y
                .solve_in_span(gens_y, &v)
                .expect("submodule is stable under the action")
        })
        .collect();
    Mat::from_cols(&cols, gens_y.cols())
}

pub struct Kernel {
    pub module: GModule,
    pub incl: ModHom,
}

pub struct Image {
    pub module: GModule,
    pub incl: ModHom,
    pub corestriction: ModHom,
}

pub struct Cokernel {
    pub module: GModule,
    pub proj: ModHom,
    /// a set-theoretic lift of the generators of the cokernel
    pub section: ModHom,
}

pub fn kernel(phi: &ModHom, src: &GModule, tgt: &GModule) -> Result<Kernel> {
    phi.validate(src, tgt)?;
    let b = src.base.clone();
    let mut values = Vec::new();
    let mut incl = Vec::new();
    for x in 0..b.num_objects() {
        let l = tgt.values[x].relation_lattice(&phi.mats[x]);
        let k = span_presentation(&src.values[x], &l);
        let (ks, _to, from) = k.simplify();
        incl.push(l.mul(&from));
        values.push(ks);
    }
    let action = (0..b.num_arrows())
        .map(|t| {
            let (x, y) = (b.src(t), b.tgt(t));
            transport_action(&src.values[y], &incl[y], &src.action[t], &incl[x])
        })
        .collect();
    let module = GModule::new(b, values, action)?;
    Ok(Kernel {
        module,
        incl: ModHom { mats: incl },
    })
}

pub fn image(phi: &ModHom, src: &GModule, tgt: &GModule) -> Result<Image> {
    phi.validate(src, tgt)?;
    let b = src.base.clone();
    let mut values = Vec::new();
    let mut to_all = Vec::new();
    let mut from_all = Vec::new();
    for x in 0..b.num_objects() {
        let l = tgt.values[x].relation_lattice(&phi.mats[x]);
        let i = FgAbelian::new(src.values[x].rank(), l);
        let (is, to, from) = i.simplify();
        values.push(is);
        to_all.push(to);
        from_all.push(from);
    }
    let action = (0..b.num_arrows())
        .map(|t| {
            let (x, y) = (b.src(t), b.tgt(t));
            to_all[y].mul(&src.action[t]).mul(&from_all[x])
        })
        .collect();
    let module = GModule::new(b.clone(), values, action)?;
    let incl = ModHom {
        mats: (0..b.num_objects()).map(|x| phi.mats[x].mul(&from_all[x])).collect(),
    };
    Ok(Image {
        module,
        incl,
        corestriction: ModHom { mats: to_all },
    })
}

pub fn cokernel(phi: &ModHom, src: &GModule, tgt: &GModule) -> Result<Cokernel> {
    phi.validate(src, tgt)?;
    let b = src.base.clone();
    let mut values = Vec::new();
    let mut to_all = Vec::new();
    let mut from_all = Vec::new();
    for x in 0..b.num_objects() {
        let v = &tgt.values[x];
        let q = FgAbelian::new(v.rank(), v.relations().hstack(&phi.mats[x]));
        let (qs, to, from) = q.simplify();
        values.push(qs);
        to_all.push(to);
        from_all.push(from);
    }
    let action = (0..b.num_arrows())
        .map(|t| {
            let (x, y) = (b.src(t), b.tgt(t));
            to_all[y].mul(&tgt.action[t]).mul(&from_all[x])
        })
        .collect();
    let module = GModule::new(b, values, action)?;
    Ok(Cokernel {
        module,
        proj: ModHom { mats: to_all },
        section: ModHom { mats: from_all },
    })
}

/// Factor `f: B -> M` through an injective `incl: K -> M`, if possible.
pub fn lift(f: &ModHom, incl: &ModHom, k: &GModule, m: &GModule) -> Option<ModHom> {
    let mut mats = Vec::new();
    for x in 0..incl.mats.len() {
        let cols: Option<Vec<Vec<i64>>> = (0..f.mats[x].cols())
            .map(|j| m.values[x].solve_in_span(&incl.mats[x], &f.mats[x].col(j)))
            .collect();
        let cols = cols?;
        mats.push(Mat::from_cols(&cols, k.values[x].rank()));
    }
    Some(ModHom { mats })
}

pub fn is_injective(phi: &ModHom, src: &GModule, tgt: &GModule) -> Result<bool> {
    Ok(kernel(phi, src, tgt)?.module.is_trivial())
}

pub fn is_surjective(phi: &ModHom, src: &GModule, tgt: &GModule) -> Result<bool> {
    Ok(cokernel(phi, src, tgt)?.module.is_trivial())
}

pub fn is_iso(phi: &ModHom, src: &GModule, tgt: &GModule) -> Result<bool> {
    Ok(is_injective(phi, src, tgt)? && is_surjective(phi, src, tgt)?)
}

/// Homology `ker(out) / im(inc)` at the middle term `m`.
pub struct Homology {
    pub module: GModule,
    pub cycles: Kernel,
    /// cycles -> homology
    pub proj: ModHom,
}

pub fn homology(inc: &ModHom, b: &GModule, out: &ModHom, m: &GModule, c: &GModule) -> Result<Homology> {
    if !out.after(inc).is_zero(b, c) {
        return invalid("composite of consecutive boundaries is nonzero");
    }
    let cycles = kernel(out, m, c)?;
    let to_cycles = lift(inc, &cycles.incl, &cycles.module, m)
        .ok_or_else(|| crate::Error::Invalid("boundaries are not cycles".into()))?;
    let q = cokernel(&to_cycles, b, &cycles.module)?;
    Ok(Homology {
        module: q.module,
        cycles,
        proj: q.proj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point() -> Gpd {
        Arc::new(FiniteGroupoid::discrete(&["*"]))
    }

    fn one(m: i64) -> ModHom {
        ModHom {
            mats: vec![Mat::from_rows(&[vec![m]], 1)],
        }
    }

    #[test]
    fn kernel_image_cokernel_examples() {
        let z = GModule::constant(point(), &FgAbelian::free(1));
        let z4 = GModule::constant(point(), &FgAbelian::cyclic(4));
        let k = kernel(&one(0), &z, &z).unwrap();
        assert_eq!(k.module.describe(), vec!["Z^1"]);
        let c = cokernel(&one(2), &z, &z).unwrap();
        assert_eq!(c.module.describe(), vec!["Z/2"]);
        let k = kernel(&one(2), &z, &z4).unwrap();
        assert_eq!(k.module.describe(), vec!["Z^1"]);
        let c = cokernel(&one(2), &z, &z4).unwrap();
        assert_eq!(c.module.describe(), vec!["Z/2"]);
        let i = image(&one(2), &z, &z4).unwrap();
        assert_eq!(i.module.describe(), vec!["Z/2"]);
    }
}
