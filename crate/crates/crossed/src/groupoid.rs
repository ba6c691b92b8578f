//! Finite groupoids with explicit composition tables, and functors between them.
//!
//! Composition `comp(g, f)` is `g ∘ f`, meaning "first `f`, then `g`"; it is
//! defined when `tgt(f) = src(g)`.

use std::collections::{BTreeSet, HashMap};

use crate::coefficients::GGroup;
use crate::error::{check_cap, invalid, Error, Result};
use crate::group::FiniteGroup;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub src: usize,
    pub tgt: usize,
}

#[derive(Clone, Debug)]
pub struct FiniteGroupoid {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    id: Vec<usize>,
    comp: HashMap<(usize, usize), usize>,
    inv: Vec<usize>,
    obj_index: HashMap<String, usize>,
    arrow_index: HashMap<String, usize>,
    // hom[x][y] = arrows x -> y
    hom: Vec<Vec<Vec<usize>>>,
}

impl PartialEq for FiniteGroupoid {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects && self.arrows == other.arrows && self.id == other.id && self.comp == other.comp
    }
}

impl Eq for FiniteGroupoid {}

impl FiniteGroupoid {
    /// Builds and exhaustively validates a groupoid. `comp` lists `(g, f, g∘f)`.
    pub fn new(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        id: Vec<usize>,
        comp: Vec<(usize, usize, usize)>,
    ) -> Result<FiniteGroupoid> {
        let g = Self::build(objects, arrows, id, comp.into_iter().map(|(g, f, h)| ((g, f), h)).collect())?;
        g.validate()?;
        Ok(g)
    }

    /// Builds from a composition closure known to be a groupoid law.
    pub(crate) fn from_law(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        id: Vec<usize>,
        law: impl Fn(usize, usize) -> usize,
    ) -> FiniteGroupoid {
        let mut hom = vec![vec![Vec::new(); objects.len()]; objects.len()];
        for (i, a) in arrows.iter().enumerate() {
            hom[a.src][a.tgt].push(i);
        }
        let mut comp = HashMap::new();
        for (fi, f) in arrows.iter().enumerate() {
            for y in 0..objects.len() {
                for &gi in &hom[f.tgt][y] {
                    comp.insert((gi, fi), law(gi, fi));
                }
            }
        }
        Self::build(objects, arrows, id, comp).expect("composition law yields a groupoid")
    }

    fn build(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        id: Vec<usize>,
        comp: HashMap<(usize, usize), usize>,
    ) -> Result<FiniteGroupoid> {
        check_cap("groupoid arrows", arrows.len())?;
        let n = objects.len();
        let mut obj_index = HashMap::new();
        for (i, o) in objects.iter().enumerate() {
            if obj_index.insert(o.clone(), i).is_some() {
                return invalid(format!("duplicate object `{o}`"));
            }
        }
        let mut arrow_index = HashMap::new();
        for (i, a) in arrows.iter().enumerate() {
            if a.src >= n || a.tgt >= n {
                return invalid(format!("arrow `{}` has an unknown endpoint", a.name));
            }
            if arrow_index.insert(a.name.clone(), i).is_some() {
                return invalid(format!("duplicate arrow `{}`", a.name));
            }
        }
        if id.len() != n {
            return invalid("identity map must cover every object");
        }
        let mut hom = vec![vec![Vec::new(); n]; n];
        for (i, a) in arrows.iter().enumerate() {
            hom[a.src][a.tgt].push(i);
        }
        let mut g = FiniteGroupoid {
            objects,
            arrows,
            id,
            comp,
            inv: Vec::new(),
            obj_index,
            arrow_index,
            hom,
        };
        for (x, &i) in g.id.iter().enumerate() {
            if i >= g.arrows.len() || g.arrows[i].src != x || g.arrows[i].tgt != x {
                return invalid(format!("identity of `{}` is not an endomorphism of it", g.objects[x]));
            }
        }
        for (&(gi, fi), &h) in &g.comp {
            if gi >= g.arrows.len() || fi >= g.arrows.len() || h >= g.arrows.len() {
                return invalid("composition table refers to an unknown arrow");
            }
        }
        let mut inv = vec![usize::MAX; g.arrows.len()];
        for f in 0..g.arrows.len() {
            let (x, y) = (g.arrows[f].src, g.arrows[f].tgt);
            for &h in &g.hom[y][x] {
                if g.comp.get(&(h, f)) == Some(&g.id[x]) && g.comp.get(&(f, h)) == Some(&g.id[y]) {
                    inv[f] = h;
                    break;
                }
            }
            if inv[f] == usize::MAX {
                return invalid(format!("arrow `{}` has no inverse", g.arrows[f].name));
            }
        }
        g.inv = inv;
        Ok(g)
    }

    /// Totality on composable pairs, endpoints, unit laws and associativity.
    pub fn validate(&self) -> Result<()> {
        let m = self.arrows.len();
        for f in 0..m {
            for &g in &self.hom_from(self.arrows[f].tgt) {
                let Some(&h) = self.comp.get(&(g, f)) else {
                    return invalid(format!(
                        "composite of `{}` then `{}` missing",
                        self.arrows[f].name, self.arrows[g].name
                    ));
                };
                if self.arrows[h].src != self.arrows[f].src || self.arrows[h].tgt != self.arrows[g].tgt {
                    return invalid(format!("composite `{}` has wrong endpoints", self.arrows[h].name));
                }
            }
        }
        if self.comp.len() != self.composable_count() {
            return invalid("composition defined on a non-composable pair");
        }
        for f in 0..m {
            let a = &self.arrows[f];
            if self.compose(self.id[a.tgt], f) != f || self.compose(f, self.id[a.src]) != f {
                return invalid(format!("identity law fails at `{}`", a.name));
            }
        }
        for f in 0..m {
            for &g in &self.hom_from(self.arrows[f].tgt) {
                let gf = self.compose(g, f);
                for &h in &self.hom_from(self.arrows[g].tgt) {
                    if self.compose(h, gf) != self.compose(self.compose(h, g), f) {
                        return invalid(format!(
                            "associativity fails at ({}, {}, {})",
                            self.arrows[h].name, self.arrows[g].name, self.arrows[f].name
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn composable_count(&self) -> usize {
        (0..self.arrows.len())
            .map(|f| self.hom_from(self.arrows[f].tgt).len())
            .sum()
    }

    /// One-object groupoid of a group; arrows are named by element labels.
    pub fn from_group(g: &FiniteGroup, object: &str) -> FiniteGroupoid {
        let arrows = (0..g.order())
            .map(|a| Arrow {
                name: g.label(a).to_string(),
                src: 0,
                tgt: 0,
            })
            .collect();
        FiniteGroupoid::from_law(vec![object.to_string()], arrows, vec![g.identity()], |a, b| g.mul(a, b))
    }

    pub fn discrete(objects: &[&str]) -> FiniteGroupoid {
        let arrows = objects
            .iter()
            .enumerate()
            .map(|(i, o)| Arrow {
                name: format!("1_{o}"),
                src: i,
                tgt: i,
            })
            .collect();
        FiniteGroupoid::from_law(
            objects.iter().map(|s| s.to_string()).collect(),
            arrows,
            (0..objects.len()).collect(),
            |g, _| g,
        )
    }

    /// Codiscrete (indiscrete) groupoid: exactly one arrow between any two objects.
    pub fn codiscrete(objects: &[&str]) -> FiniteGroupoid {
        let n = objects.len();
        let mut arrows = Vec::new();
        for x in 0..n {
            for y in 0..n {
                let name = if x == y {
                    format!("1_{}", objects[x])
                } else {
                    format!("{}>{}", objects[x], objects[y])
                };
                arrows.push(Arrow { name, src: x, tgt: y });
            }
        }
        let law = |g: usize, f: usize| (f / n) * n + g % n;
        FiniteGroupoid::from_law(
            objects.iter().map(|s| s.to_string()).collect(),
            arrows,
            (0..n).map(|x| x * n + x).collect(),
            law,
        )
    }

    /// The interval groupoid: objects `a`, `b` and one isomorphism `a -> b`.
    pub fn interval() -> FiniteGroupoid {
        let mut g = FiniteGroupoid::codiscrete(&["a", "b"]);
        g.rename_arrows(&[("a>b", "ab"), ("b>a", "ba")]);
        g
    }

    fn rename_arrows(&mut self, renames: &[(&str, &str)]) {
        for (old, new) in renames {
            let i = self.arrow_index.remove(*old).expect("arrow to rename exists");
            self.arrows[i].name = new.to_string();
            self.arrow_index.insert(new.to_string(), i);
        }
    }

    /// Disjoint union; names on the right get a suffix if they clash.
    pub fn disjoint_union(a: &FiniteGroupoid, b: &FiniteGroupoid) -> FiniteGroupoid {
        let (n, m) = (a.objects.len(), a.arrows.len());
        let fresh = |name: &str, taken: &HashMap<String, usize>| {
            let mut s = name.to_string();
            while taken.contains_key(&s) {
                s.push('\'');
            }
            s
        };
        let mut objects = a.objects.clone();
        for o in &b.objects {
            objects.push(fresh(o, &a.obj_index));
        }
        let mut arrows = a.arrows.clone();
        for f in &b.arrows {
            arrows.push(Arrow {
                name: fresh(&f.name, &a.arrow_index),
                src: f.src + n,
                tgt: f.tgt + n,
            });
        }
        let mut id = a.id.clone();
        id.extend(b.id.iter().map(|i| i + m));
        FiniteGroupoid::from_law(objects, arrows, id, |g, f| {
            if g < m {
                a.compose(g, f)
            } else {
                b.compose(g - m, f - m) + m
            }
        })
    }

    /// Product groupoid; arrow `(f, g)` has index `f * |arr b| + g`.
    pub fn product(a: &FiniteGroupoid, b: &FiniteGroupoid) -> FiniteGroupoid {
        let (n, m) = (b.objects.len(), b.arrows.len());
        let mut objects = Vec::new();
        for x in &a.objects {
            for y in &b.objects {
                objects.push(format!("({x},{y})"));
            }
        }
        let mut arrows = Vec::new();
        for f in &a.arrows {
            for g in &b.arrows {
                arrows.push(Arrow {
                    name: format!("({},{})", f.name, g.name),
                    src: f.src * n + g.src,
                    tgt: f.tgt * n + g.tgt,
                });
            }
        }
        let mut id = Vec::new();
        for x in 0..a.objects.len() {
            for y in 0..n {
                id.push(a.id[x] * m + b.id[y]);
            }
        }
        FiniteGroupoid::from_law(objects, arrows, id, |g, f| {
            a.compose(g / m, f / m) * m + b.compose(g % m, f % m)
        })
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, f: usize) -> &Arrow {
        &self.arrows[f]
    }

    pub fn src(&self, f: usize) -> usize {
        self.arrows[f].src
    }

    pub fn tgt(&self, f: usize) -> usize {
        self.arrows[f].tgt
    }

    pub fn id(&self, x: usize) -> usize {
        self.id[x]
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.id[self.arrows[f].src] == f
    }

    pub fn inv(&self, f: usize) -> usize {
        self.inv[f]
    }

    /// `g ∘ f`; panics if not composable.
    pub fn compose(&self, g: usize, f: usize) -> usize {
        match self.comp.get(&(g, f)) {
            Some(&h) => h,
            None => panic!(
                "arrows `{}` and `{}` are not composable",
                self.arrows[g].name, self.arrows[f].name
            ),
        }
    }

    pub fn try_compose(&self, g: usize, f: usize) -> Option<usize> {
        self.comp.get(&(g, f)).copied()
    }

    /// `t a t⁻¹` for an endomorphism `a` of `src t`.
    pub fn conj(&self, t: usize, a: usize) -> usize {
        self.compose(self.compose(t, a), self.inv(t))
    }

    pub fn hom(&self, x: usize, y: usize) -> &[usize] {
        &self.hom[x][y]
    }

    pub fn hom_from(&self, x: usize) -> Vec<usize> {
        self.hom[x].iter().flatten().copied().collect()
    }

    pub fn object_index(&self, name: &str) -> Result<usize> {
        self.obj_index.get(name).copied().ok_or_else(|| Error::Unknown {
            kind: "object",
            name: name.to_string(),
        })
    }

    pub fn arrow_index(&self, name: &str) -> Result<usize> {
        self.arrow_index.get(name).copied().ok_or_else(|| Error::Unknown {
            kind: "arrow",
            name: name.to_string(),
        })
    }

    /// Composition triples `(g, f, g∘f)` in a canonical order.
    pub fn comp_triples(&self) -> Vec<(usize, usize, usize)> {
        let mut v: Vec<(usize, usize, usize)> = self.comp.iter().map(|(&(g, f), &h)| (g, f, h)).collect();
        v.sort();
        v
    }

    /// Endomorphism group at `x`; element `i` is the arrow `arrows[i]`.
    pub fn end_group(&self, x: usize) -> (FiniteGroup, Vec<usize>) {
        let ends = self.hom[x][x].clone();
        let pos: HashMap<usize, usize> = ends.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let mul = ends
            .iter()
            .map(|&a| ends.iter().map(|&b| pos[&self.compose(a, b)]).collect())
            .collect();
        let labels = ends.iter().map(|&a| self.arrows[a].name.clone()).collect();
        let g = FiniteGroup::from_table(mul, Some(labels)).expect("endomorphisms form a group");
        (g, ends)
    }

    /// Connected components: blocks of objects (sorted) and the block of each object.
    pub fn pi0(&self) -> Components {
        let n = self.objects.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for a in &self.arrows {
            let (ra, rb) = (find(&mut parent, a.src), find(&mut parent, a.tgt));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut block_of = vec![usize::MAX; n];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            let r = find(&mut parent, x);
            if block_of[r] == usize::MAX {
                block_of[r] = blocks.len();
                blocks.push(Vec::new());
            }
            block_of[x] = block_of[r];
            blocks[block_of[x]].push(x);
        }
        Components { blocks, block_of }
    }

    /// Discrete groupoid on the components, with the canonical functor onto it.
    pub fn components_groupoid(&self) -> (FiniteGroupoid, Functor) {
        let c = self.pi0();
        let names: Vec<String> = c
            .blocks
            .iter()
            .map(|b| self.objects[b[0]].clone())
            .collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let d = FiniteGroupoid::discrete(&refs);
        let f = Functor {
            obj: c.block_of.clone(),
            arr: self.arrows.iter().map(|a| d.id(c.block_of[a.src])).collect(),
        };
        (d, f)
    }

    /// Subgroupoid on chosen objects and arrows (must be closed); returns the inclusion.
    pub fn subgroupoid(&self, objects: &[usize], arrows: &[usize]) -> Result<(FiniteGroupoid, Functor)> {
        let opos: HashMap<usize, usize> = objects.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let apos: HashMap<usize, usize> = arrows.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut arr = Vec::new();
        for &f in arrows {
            let a = &self.arrows[f];
            let (Some(&s), Some(&t)) = (opos.get(&a.src), opos.get(&a.tgt)) else {
                return invalid("subgroupoid arrow leaves the object set");
            };
            arr.push(Arrow {
                name: a.name.clone(),
                src: s,
                tgt: t,
            });
        }
        let mut id = Vec::new();
        for &x in objects {
            match apos.get(&self.id[x]) {
                Some(&i) => id.push(i),
                None => return invalid("subgroupoid misses an identity"),
            }
        }
        let mut comp = HashMap::new();
        for &f in arrows {
            for &g in arrows {
                if let Some(h) = self.try_compose(g, f) {
                    match apos.get(&h) {
                        Some(&hi) => {
                            comp.insert((apos[&g], apos[&f]), hi);
                        }
                        None => return invalid("subgroupoid not closed under composition"),
                    }
                }
            }
        }
        let sub = Self::build(objects.iter().map(|&x| self.objects[x].clone()).collect(), arr, id, comp)?;
        let inc = Functor {
            obj: objects.to_vec(),
            arr: arrows.to_vec(),
        };
        Ok((sub, inc))
    }

    /// Quotient by a totally disconnected normal subgroupoid `n[x] ⊆ End(x)`.
    /// Arrows are classes `f ~ a∘f` for `a ∈ n[tgt f]`; classes are named by
    /// their smallest-index member.
    pub fn quotient_by_image(&self, n: &[Vec<usize>]) -> Result<(FiniteGroupoid, Functor)> {
        if n.len() != self.objects.len() {
            return invalid("normal subgroupoid must list a subgroup at every object");
        }
        let sets: Vec<BTreeSet<usize>> = n.iter().map(|v| v.iter().copied().collect()).collect();
        for (x, s) in sets.iter().enumerate() {
            if !s.contains(&self.id[x]) {
                return invalid(format!("subgroup at `{}` lacks the identity", self.objects[x]));
            }
            for &a in s {
                if self.src(a) != x || self.tgt(a) != x {
                    return invalid("subgroup element is not an endomorphism");
                }
                if !s.contains(&self.inv[a]) || s.iter().any(|&b| !s.contains(&self.compose(a, b))) {
                    return invalid(format!("set at `{}` is not a subgroup", self.objects[x]));
                }
            }
        }
        for t in 0..self.arrows.len() {
            let (x, y) = (self.src(t), self.tgt(t));
            for &a in &sets[x] {
                if !sets[y].contains(&self.conj(t, a)) {
                    return invalid(format!(
                        "subgroupoid is not stable under conjugation by `{}`",
                        self.arrows[t].name
                    ));
                }
            }
        }
        let mut class = vec![usize::MAX; self.arrows.len()];
        let mut reps = Vec::new();
        for f in 0..self.arrows.len() {
            if class[f] != usize::MAX {
                continue;
            }
            let c = reps.len();
            reps.push(f);
            for &a in &sets[self.tgt(f)] {
                class[self.compose(a, f)] = c;
            }
        }
        let arrows = reps.iter().map(|&f| self.arrows[f].clone()).collect();
        let id = self.id.iter().map(|&i| class[i]).collect();
        let q = FiniteGroupoid::from_law(self.objects.clone(), arrows, id, |g, f| {
            class[self.compose(reps[g], reps[f])]
        });
        let func = Functor {
            obj: (0..self.objects.len()).collect(),
            arr: class,
        };
        Ok((q, func))
    }

    /// Index-free structural comparison (same objects, arrows, composition).
    pub fn same_as(&self, other: &FiniteGroupoid) -> bool {
        self == other
    }
}

/// Grothendieck construction `⋉(G, C)`: arrows `x -> y` are pairs
/// `(u, a)` with `u: x -> y` in `G` and `a ∈ C(y)`, composed as
/// `(v, b)∘(u, a) = (vu, b·ᵛa)`.
#[derive(Clone, Debug)]
pub struct Semidirect {
    pub groupoid: FiniteGroupoid,
    pub pairs: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
    /// projection onto `G`
    pub s: Functor,
    /// section `u ↦ (u, 1)`
    pub i: Functor,
}

impl Semidirect {
    pub fn index(&self, u: usize, a: usize) -> usize {
        self.index[&(u, a)]
    }
}

pub fn semidirect(c: &GGroup) -> Result<Semidirect> {
    let g = c.base();
    let mut pairs = Vec::new();
    for u in 0..g.num_arrows() {
        for a in 0..c.group(g.tgt(u)).order() {
            pairs.push((u, a));
        }
    }
    check_cap("semidirect arrows", pairs.len())?;
    let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let arrows = pairs
        .iter()
        .map(|&(u, a)| Arrow {
            name: if c.group(g.tgt(u)).order() == 1 {
                g.arrow(u).name.clone()
            } else {
                format!("({},{})", g.arrow(u).name, c.group(g.tgt(u)).label(a))
            },
            src: g.src(u),
            tgt: g.tgt(u),
        })
        .collect();
    let id = (0..g.num_objects())
        .map(|x| index[&(g.id(x), c.group(x).identity())])
        .collect();
    let groupoid = FiniteGroupoid::from_law(g.objects().to_vec(), arrows, id, |q, p| {
        let (v, b) = pairs[q];
        let (u, a) = pairs[p];
        let z = g.tgt(v);
        index[&(g.compose(v, u), c.group(z).mul(b, c.act(v, a)))]
    });
    let s = Functor {
        obj: (0..g.num_objects()).collect(),
        arr: pairs.iter().map(|&(u, _)| u).collect(),
    };
    let i = Functor {
        obj: (0..g.num_objects()).collect(),
        arr: (0..g.num_arrows())
            .map(|u| index[&(u, c.group(g.tgt(u)).identity())])
            .collect(),
    };
    Ok(Semidirect {
        groupoid,
        pairs,
        index,
        s,
        i,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    pub blocks: Vec<Vec<usize>>,
    pub block_of: Vec<usize>,
}

/// A functor between finite groupoids, stored as object and arrow maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functor {
    pub obj: Vec<usize>,
    pub arr: Vec<usize>,
}

impl Functor {
    pub fn identity(g: &FiniteGroupoid) -> Functor {
        Functor {
            obj: (0..g.num_objects()).collect(),
            arr: (0..g.num_arrows()).collect(),
        }
    }

    /// `self` after `first`.
    pub fn after(&self, first: &Functor) -> Functor {
        Functor {
            obj: first.obj.iter().map(|&x| self.obj[x]).collect(),
            arr: first.arr.iter().map(|&f| self.arr[f]).collect(),
        }
    }

    /// Checks endpoints, identities and composition exhaustively.
    pub fn validate(&self, src: &FiniteGroupoid, tgt: &FiniteGroupoid) -> Result<()> {
        if self.obj.len() != src.num_objects() || self.arr.len() != src.num_arrows() {
            return invalid("functor maps have the wrong size");
        }
        if self.obj.iter().any(|&y| y >= tgt.num_objects()) || self.arr.iter().any(|&g| g >= tgt.num_arrows()) {
            return invalid("functor image outside the target");
        }
        for f in 0..src.num_arrows() {
            let g = self.arr[f];
            if tgt.src(g) != self.obj[src.src(f)] || tgt.tgt(g) != self.obj[src.tgt(f)] {
                return invalid(format!("functor breaks endpoints of `{}`", src.arrow(f).name));
            }
        }
        for x in 0..src.num_objects() {
            if self.arr[src.id(x)] != tgt.id(self.obj[x]) {
                return invalid("functor does not preserve identities");
            }
        }
        for (g, f, h) in src.comp_triples() {
            if tgt.compose(self.arr[g], self.arr[f]) != self.arr[h] {
                return invalid("functor does not preserve composition");
            }
        }
        Ok(())
    }

    /// Star-surjectivity: every arrow out of `f(x)` lifts to an arrow out of `x`.
    pub fn is_fibration(&self, src: &FiniteGroupoid, tgt: &FiniteGroupoid) -> bool {
        (0..src.num_objects()).all(|x| {
            let lifted: BTreeSet<usize> = src.hom_from(x).iter().map(|&h| self.arr[h]).collect();
            tgt.hom_from(self.obj[x]).iter().all(|g| lifted.contains(g))
        })
    }

    pub fn is_iso(&self, src: &FiniteGroupoid, tgt: &FiniteGroupoid) -> bool {
        let o: BTreeSet<usize> = self.obj.iter().copied().collect();
        let a: BTreeSet<usize> = self.arr.iter().copied().collect();
        o.len() == src.num_objects()
            && o.len() == tgt.num_objects()
            && a.len() == src.num_arrows()
            && a.len() == tgt.num_arrows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_and_union() {
        let i = FiniteGroupoid::interval();
        i.validate().unwrap();
        assert_eq!(i.pi0().blocks, vec![vec![0, 1]]);
        assert_eq!(i.end_group(0).0.order(), 1);
        let z2 = FiniteGroupoid::from_group(&FiniteGroup::cyclic(2), "*");
        let u = FiniteGroupoid::disjoint_union(&i, &z2);
        u.validate().unwrap();
        assert_eq!(u.pi0().blocks.len(), 2);
        assert_eq!(u.end_group(2).0.order(), 2);
        assert_eq!(FiniteGroupoid::discrete(&["x", "y"]).pi0().blocks.len(), 2);
    }

    #[test]
    fn quotient_z4_by_two() {
        let z4 = FiniteGroupoid::from_group(&FiniteGroup::cyclic(4), "*");
        let (q, f) = z4.quotient_by_image(&[vec![0, 2]]).unwrap();
        f.validate(&z4, &q).unwrap();
        assert!(q.end_group(0).0.isomorphic(&FiniteGroup::cyclic(2)));
    }

    #[test]
    fn semidirect_gives_s3() {
        use std::sync::Arc;
        let z2 = Arc::new(FiniteGroupoid::from_group(&FiniteGroup::cyclic(2), "*"));
        let c = GGroup::new(
            z2.clone(),
            vec![FiniteGroup::cyclic(3)],
            vec![vec![0, 1, 2], vec![0, 2, 1]],
        )
        .unwrap();
        let sd = semidirect(&c).unwrap();
        sd.groupoid.validate().unwrap();
        assert!(sd.groupoid.end_group(0).0.isomorphic(&FiniteGroup::s3()));
        assert!(sd.s.is_fibration(&sd.groupoid, &z2));
        assert_eq!(sd.s.after(&sd.i), Functor::identity(&z2));
    }

    #[test]
    fn fibration_examples() {
        let i = FiniteGroupoid::interval();
        let d = FiniteGroupoid::discrete(&["a", "b"]);
        let inc = Functor {
            obj: vec![0, 1],
            arr: vec![0, 3],
        };
        inc.validate(&d, &i).unwrap();
        assert!(!inc.is_fibration(&d, &i));
        assert!(Functor::identity(&i).is_fibration(&i, &i));
    }
}
