//! 2-extensions read off the Postnikov tower, the coefficient objects they
//! are classified by, the torsors they define, and torsor pullback.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::abelian::FgAbelian;
use crate::coefficients::{self, GGroup, GModule, Gpd, ModHom};
use crate::crs::{eval_word, Boundary, CrossedComplex, CrsMorphism, Level};
use crate::error::{invalid, Error, Result};
use crate::group::{AbelianSubgroup, FiniteGroup};
use crate::groupoid::{semidirect, Arrow, FiniteGroupoid, Functor, Semidirect};
use crate::internal_gpd::{self, InternalGroupoid, Top};
use crate::linalg::Mat;
use crate::xmod::{self, CrossedModule, TwoGroupoid};

/// An element of a finite group (by index) or of a presented abelian group
/// (canonical representative).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum El {
    G(usize),
    V(Vec<i64>),
}

impl El {
    fn g(&self) -> usize {
        match self {
            El::G(a) => *a,
            El::V(_) => panic!("expected a group element"),
        }
    }

    fn v(&self) -> &[i64] {
        match self {
            El::V(v) => v,
            El::G(_) => panic!("expected a vector"),
        }
    }
}

/// Elements to test against: all of them when `exhaustive`.
#[derive(Clone, Debug)]
pub struct Elems {
    pub items: Vec<El>,
    pub exhaustive: bool,
}

const RADIUS: i64 = 2;

fn module_elems(m: &FgAbelian) -> Elems {
    match m.elements() {
        Some(e) => Elems {
            items: e.into_iter().map(El::V).collect(),
            exhaustive: true,
        },
        None => Elems {
            items: m.sample(RADIUS).into_iter().map(El::V).collect(),
            exhaustive: false,
        },
    }
}

fn group_elems(g: &FiniteGroup) -> Elems {
    Elems {
        items: (0..g.order()).map(El::G).collect(),
        exhaustive: true,
    }
}

/// Named pass/fail lines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl Report {
    pub(crate) fn push(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            ok,
            detail: detail.into(),
        });
    }

    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.ok).collect()
    }
}

// ---------------------------------------------------------------------------
// coefficients

/// `insₙ(A) = (zero(A) → 1 → ⋯ → 1 → Π)` for `n >= 2`.
pub fn ins(n: usize, a: &GModule) -> Result<CrossedComplex> {
    let pi = a.base().clone();
    if n < 2 {
        return Err(Error::Range(format!("insertion needs n >= 2, got {n}")));
    }
    if n == 2 {
        let (ag, _) = a.to_ggroup()?;
        let delta = (0..pi.num_objects())
            .map(|x| vec![pi.id(x); ag.group(x).order()])
            .collect();
        return Ok(CrossedComplex::from_xm(CrossedModule::new(ag, delta)?));
    }
    let xm = CrossedModule::trivial(pi.clone());
    let mut higher: Vec<Level> = Vec::new();
    for k in 3..=n {
        let module = if k == n { a.clone() } else { GModule::zero(pi.clone()) };
        let boundary = if k == 3 {
            Boundary::IntoGroup(
                (0..pi.num_objects())
                    .map(|x| vec![xm.c().group(x).identity(); module.value(x).rank()])
                    .collect(),
            )
        } else {
            Boundary::Module(ModHom::zero(&module, &higher.last().unwrap().module))
        };
        higher.push(Level { module, boundary });
    }
    CrossedComplex::new(xm, higher, n)
}

#[derive(Clone, Debug)]
pub enum Realized {
    /// `⋉(Π, A) ⇄ Π`
    Groupoid(Semidirect),
    /// `(G, C × A∘q, δ ∘ p₀)`, materialized when `A` is finite
    CrossedModule {
        c: CrossedModule,
        product: Option<CrossedModule>,
    },
    /// the target with level `n` replaced by `Cₙ ⊕ A∘q`, `insₙ(A)`, and the
    /// two legs of the pullback square
    Complex {
        target: CrossedComplex,
        pulled: CrossedComplex,
        ins: CrossedComplex,
        to_target: CrsMorphism,
        to_ins: CrsMorphism,
    },
}

/// The abelian group object `Ãₙ` over an n-crossed complex.
#[derive(Clone, Debug)]
pub struct CoefficientObject {
    pub n: usize,
    pub pi: Gpd,
    pub q: Functor,
    /// `A` over `Π`
    pub a: GModule,
    /// `A∘q` over the base of the target
    pub aq: GModule,
    pub realized: Realized,
}

/// Builds `Ãₙ` for a `Π`-module over an n-crossed complex with `π₁ = Π`.
pub fn make_coefficients(n: usize, a: &GModule, target: &CrossedComplex) -> Result<CoefficientObject> {
    let (pi, q) = target.pi1()?;
    if !a.base().same_as(&pi) {
        return invalid("module is not over the fundamental groupoid of the target");
    }
    let g = target.base().clone();
    let aq = a.restrict(&q, g.clone());
    let realized = match n {
        0 => return Err(Error::Range("coefficients start at n = 1".into())),
        1 => {
            let (ag, _) = a.to_ggroup()?;
            Realized::Groupoid(semidirect(&ag)?)
        }
        2 => {
            let c = target.xm().clone();
            let product = if aq.is_finite() {
                let (ag, _) = aq.to_ggroup()?;
                let prod = c.c().product(&ag);
                let delta = (0..g.num_objects())
                    .map(|x| {
                        let m = ag.group(x).order();
                        (0..prod.group(x).order()).map(|k| c.delta(x, k / m)).collect()
                    })
                    .collect();
                Some(CrossedModule::new(prod, delta)?)
            } else {
                None
            };
            Realized::CrossedModule { c, product }
        }
        _ => {
            if target.rank() != n {
                return invalid(format!("target must have rank {n}"));
            }
            let level = target.level(n).unwrap();
            let cn = &level.module;
            let sum = GModule::direct_sum(&[cn, &aq]);
            let ranks = |x: usize| [cn.value(x).rank(), aq.value(x).rank()];
            let p0 = ModHom {
                mats: (0..g.num_objects()).map(|x| GModule::sum_projection(&ranks(x), 0)).collect(),
            };
            let p1 = ModHom {
                mats: (0..g.num_objects()).map(|x| GModule::sum_projection(&ranks(x), 1)).collect(),
            };
            let boundary = match &level.boundary {
                Boundary::IntoGroup(imgs) => Boundary::IntoGroup(
                    (0..g.num_objects())
                        .map(|x| {
                            let mut v = imgs[x].clone();
                            v.extend(std::iter::repeat(target.c2().group(x).identity()).take(aq.value(x).rank()));
                            v
                        })
                        .collect(),
                ),
                Boundary::Module(d) => Boundary::Module(d.after(&p0)),
            };
            let mut higher = target.higher()[..n - 3].to_vec();
            higher.push(Level { module: sum, boundary });
            let pulled = CrossedComplex::new(target.xm().clone(), higher, n)?;
            let ins = ins(n, a)?;
            let mut to_target = CrsMorphism::identity(target);
            *to_target.higher.last_mut().unwrap() = p0.mats.clone();
            let to_target = CrsMorphism {
                base: to_target.base,
                level2: to_target.level2,
                higher: to_target.higher,
            };
            let to_ins = CrsMorphism {
                base: q.clone(),
                level2: (0..g.num_objects())
                    .map(|x| vec![ins.c2().group(q.obj[x]).identity(); target.c2().group(x).order()])
                    .collect(),
                higher: (3..=n)
                    .map(|k| {
                        (0..g.num_objects())
                            .map(|x| {
                                let rows = ins.module(k).unwrap().value(q.obj[x]).rank();
                                if k == n {
                                    p1.mats[x].clone()
                                } else {
                                    Mat::zeros(rows, target.module(k).unwrap().value(x).rank())
                                }
                            })
                            .collect()
                    })
                    .collect(),
            };
            Realized::Complex {
                target: target.clone(),
                pulled,
                ins,
                to_target,
                to_ins,
            }
        }
    };
    Ok(CoefficientObject {
        n,
        pi,
        q,
        a: a.clone(),
        aq,
        realized,
    })
}

impl CoefficientObject {
    /// Abelian group object laws, pointwise: the structure maps are
    /// morphisms and fiberwise addition is compatible with composition.
    pub fn check_abelian_laws(&self) -> bool {
        match &self.realized {
            Realized::Groupoid(sd) => {
                let pi = &self.pi;
                let Ok((ag, _)) = self.a.to_ggroup() else { return false };
                if sd.s.validate(&sd.groupoid, pi).is_err() || sd.i.validate(pi, &sd.groupoid).is_err() {
                    return false;
                }
                // (v,c)∘(u,a) + (v,d)∘(u,b) = (v,c+d)∘(u,a+b)
                let add = |x: usize, a: usize, b: usize| ag.group(x).mul(a, b);
                for u in 0..pi.num_arrows() {
                    let (x, y) = (pi.src(u), pi.tgt(u));
                    for v in pi.hom_from(y) {
                        let z = pi.tgt(v);
                        for a in 0..ag.group(y).order() {
                            for b in 0..ag.group(y).order() {
                                for c in 0..ag.group(z).order() {
                                    for d in 0..ag.group(z).order() {
                                        let l1 = sd.groupoid.compose(sd.index(v, c), sd.index(u, a));
                                        let l2 = sd.groupoid.compose(sd.index(v, d), sd.index(u, b));
                                        let (w1, e1) = sd.pairs[l1];
                                        let (w2, e2) = sd.pairs[l2];
                                        let r = sd.groupoid.compose(sd.index(v, add(z, c, d)), sd.index(u, add(y, a, b)));
                                        if w1 != w2 || sd.pairs[r] != (w1, add(z, e1, e2)) {
                                            return false;
                                        }
                                    }
                                }
                            }
                        }
                    }
                    let _ = x;
                }
                true
            }
            Realized::CrossedModule { c, product } => {
                c.validate().is_ok() && self.aq.validate().is_ok() && product.as_ref().map_or(true, |p| p.is_crossed())
            }
            Realized::Complex {
                target,
                pulled,
                ins,
                to_target,
                to_ins,
            } => {
                let n = self.n;
                to_target.validate(pulled, target).is_ok()
                    && to_ins.validate(pulled, ins).is_ok()
                    && (0..target.base().num_objects()).all(|x| {
                        let want = FgAbelian::direct_sum(&[target.module(n).unwrap().value(x), self.aq.value(x)]);
                        pulled.module(n).unwrap().value(x).isomorphic(&want)
                    })
            }
        }
    }
}

// ---------------------------------------------------------------------------
// extensions

#[derive(Clone, Debug)]
pub enum Body {
    /// `0 → Â → Ĉ → G → Π → 0` with fiber crossed module `(G, C, δ)`;
    /// `kernel[x]` presents `ker δ` at `x`, which is `A∘q`
    Groupoid {
        fiber: CrossedModule,
        kernel: Vec<AbelianSubgroup>,
    },
    /// `0 → A → E₁ → E₀ → C → 0` of G-groups over the crossed module `C`;
    /// `sigma[x]` lists the images of the generators of `E₁(x)`
    CrossedModule {
        target: CrossedModule,
        e0: GGroup,
        e1: GModule,
        sigma: Vec<Vec<usize>>,
        tau: Vec<Vec<usize>>,
        j: ModHom,
    },
    /// `0 → A → E₁ → E₀ → Cₙ → 0` of G-modules
    Complex {
        e0: GModule,
        e1: GModule,
        sigma: ModHom,
        tau: ModHom,
        j: ModHom,
    },
}

#[derive(Clone, Debug)]
pub struct TwoExtension {
    pub n: usize,
    /// the complex being extended; `Π` as a rank 1 complex when `n = 1`
    pub base: CrossedComplex,
    pub pi: Gpd,
    pub q: Functor,
    /// `A` over `Π`
    pub coeff: GModule,
    /// `A∘q` over `G`
    pub a: GModule,
    pub body: Body,
}

/// Kernel of a morphism from a G-module to a G-group given on generators.
fn group_kernel(e1: &GModule, e0: &GGroup, sigma: &[Vec<usize>]) -> Result<coefficients::Kernel> {
    let nobj = e1.base().num_objects();
    let sub: Vec<Vec<usize>> = (0..nobj).map(|x| e0.group(x).closure(&sigma[x])).collect();
    let (img, pres) = e0.abelian_module(&sub)?;
    let mats = (0..nobj)
        .map(|x| {
            let cols: Vec<Vec<i64>> = sigma[x].iter().map(|&a| pres[x].coords(a).unwrap().clone()).collect();
            Mat::from_cols(&cols, pres[x].pres.rank())
        })
        .collect();
    let s = ModHom { mats };
    s.validate(e1, &img)?;
    coefficients::kernel(&s, e1, &img)
}

/// The 2-extension of `Pₙ(C)` by `πₙ₊₁(C)` given by the fibration `ηₙ₊₁`.
pub fn extension_from_tower(c: &CrossedComplex, n: usize) -> Result<TwoExtension> {
    if n < 1 || n > c.rank().max(1) {
        return Err(Error::Range(format!("stage {n} is outside 1..={}", c.rank().max(1))));
    }
    let (pi, q) = c.pi1()?;
    let g = c.base().clone();
    let nobj = g.num_objects();
    let (base, body, a) = match n {
        1 => {
            let (p2, _) = c.reflect(2)?;
            let fiber = p2.xm().clone();
            let (a, kernel) = fiber.kernel_module()?;
            (
                CrossedComplex::from_groupoid(pi.clone()),
                Body::Groupoid { fiber, kernel },
                a,
            )
        }
        2 => {
            let (p2, unit) = c.reflect(2)?;
            let (p3, _) = c.reflect(3)?;
            let (e1, sigma) = match p3.level(3) {
                Some(Level {
                    module,
                    boundary: Boundary::IntoGroup(imgs),
                }) => (module.clone(), imgs.clone()),
                _ => (GModule::zero(g.clone()), vec![Vec::new(); nobj]),
            };
            let e0 = c.c2().clone();
            let k = group_kernel(&e1, &e0, &sigma)?;
            let body = Body::CrossedModule {
                target: p2.xm().clone(),
                e0,
                e1,
                sigma,
                tau: unit.level2.clone(),
                j: k.incl,
            };
            (p2, body, k.module)
        }
        _ => {
            let (pn, unit) = c.reflect(n)?;
            let (pn1, _) = c.reflect(n + 1)?;
            let e0 = c.module(n).unwrap().clone();
            let (e1, sigma) = match pn1.level(n + 1) {
                Some(Level {
                    module,
                    boundary: Boundary::Module(d),
                }) => (module.clone(), d.clone()),
                _ => {
                    let z = GModule::zero(g.clone());
                    let s = ModHom::zero(&z, &e0);
                    (z, s)
                }
            };
            let tau = ModHom {
                mats: unit.higher[n - 3].clone(),
            };
            let k = coefficients::kernel(&sigma, &e1, &e0)?;
            let body = Body::Complex {
                e0,
                e1,
                sigma,
                tau,
                j: k.incl,
            };
            (pn, body, k.module)
        }
    };
    let coeff = a.descend(&q, pi.clone())?;
    Ok(TwoExtension {
        n,
        base,
        pi,
        q,
        coeff,
        a,
        body,
    })
}

impl TwoExtension {
    /// The (n+1)-crossed complex `E₁ → E₀ → Cₙ₋₁ → ⋯` carried by the middle
    /// of the sequence (for `n >= 2`).
    pub fn complex(&self) -> Result<CrossedComplex> {
        match &self.body {
            Body::Groupoid { .. } => invalid("the stage 1 extension has no middle complex"),
            Body::CrossedModule {
                target,
                e0,
                e1,
                sigma,
                tau,
                ..
            } => {
                let delta = (0..e0.base().num_objects())
                    .map(|x| (0..e0.group(x).order()).map(|u| target.delta(x, tau[x][u])).collect())
                    .collect();
                let xm = CrossedModule::new(e0.clone(), delta)?;
                let level = Level {
                    module: e1.clone(),
                    boundary: Boundary::IntoGroup(sigma.clone()),
                };
                CrossedComplex::new(xm, vec![level], 3)
            }
            Body::Complex { e0, e1, sigma, tau, .. } => {
                let n = self.n;
                let b = &self.base;
                let nobj = b.base().num_objects();
                let mut higher = b.higher()[..n - 3].to_vec();
                let boundary = match &b.level(n).unwrap().boundary {
                    Boundary::IntoGroup(imgs) => Boundary::IntoGroup(
                        (0..nobj)
                            .map(|x| {
                                tau.mats[x]
                                    .to_cols()
                                    .iter()
                                    .map(|col| eval_word(b.c2().group(x), &imgs[x], col))
                                    .collect()
                            })
                            .collect(),
                    ),
                    Boundary::Module(d) => Boundary::Module(d.after(tau)),
                };
                higher.push(Level {
                    module: e0.clone(),
                    boundary,
                });
                higher.push(Level {
                    module: e1.clone(),
                    boundary: Boundary::Module(sigma.clone()),
                });
                CrossedComplex::new(b.xm().clone(), higher, n + 1)
            }
        }
    }
}

/// Exactness at every node plus the structural conditions of the stage.
pub fn validate_extension(e: &TwoExtension) -> Report {
    let mut r = Report::default();
    let a = &e.a;
    match &e.body {
        Body::Groupoid { fiber, kernel } => {
            let g = fiber.base();
            r.push("fiber is a crossed module", fiber.is_crossed(), "");
            let mut inj = true;
            let mut at_c = true;
            let mut equivariant = true;
            for x in 0..g.num_objects() {
                let cx = fiber.c().group(x);
                let elems = a.value(x).elements().unwrap_or_default();
                let imgs: BTreeSet<usize> = elems.iter().map(|v| kernel[x].eval(cx, v)).collect();
                inj &= imgs.len() == elems.len();
                let ker: BTreeSet<usize> = (0..cx.order()).filter(|&u| fiber.delta(x, u) == g.id(x)).collect();
                at_c &= imgs == ker;
            }
            for u in 0..g.num_arrows() {
                let (x, y) = (g.src(u), g.tgt(u));
                for v in a.value(x).elements().unwrap_or_default() {
                    let lhs = kernel[y].eval(fiber.c().group(y), &a.act(u, &v));
                    let rhs = fiber.c().act(u, kernel[x].eval(fiber.c().group(x), &v));
                    equivariant &= lhs == rhs;
                }
            }
            r.push("A → C injective", inj, "");
            r.push("exact at C", at_c, "");
            r.push("kernel inclusion is natural", equivariant, "");
            let im: BTreeSet<usize> = (0..g.num_objects())
                .flat_map(|x| (0..fiber.c().group(x).order()).map(move |u| (x, u)))
                .map(|(x, u)| fiber.delta(x, u))
                .collect();
            let ker_q: BTreeSet<usize> = (0..g.num_arrows()).filter(|&f| e.pi.is_identity(e.q.arr[f])).collect();
            r.push("exact at G", im == ker_q, "");
            let onto: BTreeSet<usize> = e.q.arr.iter().copied().collect();
            let on_objects = e.q.obj.iter().enumerate().all(|(i, &x)| i == x);
            r.push(
                "G → Π surjective",
                on_objects && onto.len() == e.pi.num_arrows() && e.q.validate(g, &e.pi).is_ok(),
                "",
            );
            let factors = a.descend(&e.q, e.pi.clone()).is_ok_and(|d| d == e.coeff);
            r.push("ker δ factors through Π as A∘q", factors, "");
        }
        Body::CrossedModule {
            target,
            e0,
            e1,
            sigma,
            tau,
            j,
        } => {
            let g = e0.base();
            let inj = j.validate(a, e1).is_ok() && coefficients::is_injective(j, a, e1).unwrap_or(false);
            r.push("A → E₁ injective", inj, "");
            let at_e1 = group_kernel(e1, e0, sigma).is_ok_and(|k| {
                (0..g.num_objects()).all(|x| {
                    let sj_zero = j.mats[x]
                        .to_cols()
                        .iter()
                        .all(|col| eval_word(e0.group(x), &sigma[x], col) == e0.group(x).identity());
                    let ker_in_im = k.incl.mats[x]
                        .to_cols()
                        .iter()
                        .all(|col| e1.value(x).solve_in_span(&j.mats[x], col).is_some());
                    sj_zero && ker_in_im
                })
            });
            r.push("exact at E₁", at_e1, "");
            let mut at_e0 = true;
            let mut onto = true;
            let mut hom = true;
            for x in 0..g.num_objects() {
                let gx = e0.group(x);
                let im: BTreeSet<usize> = gx.closure(&sigma[x]).into_iter().collect();
                let cx = target.c().group(x);
                let ker: BTreeSet<usize> = (0..gx.order()).filter(|&u| tau[x][u] == cx.identity()).collect();
                at_e0 &= im == ker;
                let hit: BTreeSet<usize> = tau[x].iter().copied().collect();
                onto &= hit.len() == cx.order();
                hom &= gx.is_hom(cx, &tau[x]);
            }
            hom &= coefficients::is_ggroup_hom(e0, target.c(), tau);
            r.push("τ is a morphism of G-groups", hom, "");
            r.push("exact at E₀", at_e0, "");
            r.push("E₀ → C surjective", onto, "");
            match e.complex() {
                Ok(_) => r.push("E₁ → E₀ → G is a 3-crossed complex", true, ""),
                Err(err) => r.push("E₁ → E₀ → G is a 3-crossed complex", false, err.to_string()),
            }
        }
        Body::Complex {
            e0,
            e1,
            sigma,
            tau,
            j,
        } => {
            let target = e.base.module(e.n).unwrap();
            let maps_ok = j.validate(a, e1).is_ok() && sigma.validate(e1, e0).is_ok() && tau.validate(e0, target).is_ok();
            r.push("maps are morphisms of G-modules", maps_ok, "");
            if !maps_ok {
                return r;
            }
            let inj = coefficients::is_injective(j, a, e1).unwrap_or(false);
            r.push("A → E₁ injective", inj, "");
            r.push("exact at E₁", exact_at(j, sigma, a, e1, e0), "");
            r.push("exact at E₀", exact_at(sigma, tau, e1, e0, target), "");
            r.push(
                "E₀ → Cₙ surjective",
                coefficients::is_surjective(tau, e0, target).unwrap_or(false),
                "",
            );
            match e.complex() {
                Ok(_) => r.push("E₁ → E₀ → Cₙ₋₁ → ⋯ is a crossed complex", true, ""),
                Err(err) => r.push("E₁ → E₀ → Cₙ₋₁ → ⋯ is a crossed complex", false, err.to_string()),
            }
        }
    }
    r
}

/// `im f = ker g` for `a -f-> b -g-> c`.
fn exact_at(f: &ModHom, g: &ModHom, a: &GModule, b: &GModule, c: &GModule) -> bool {
    let comp_zero = g.after(f).is_zero(a, c);
    let Ok(k) = coefficients::kernel(g, b, c) else { return false };
    comp_zero
        && (0..b.base().num_objects()).all(|x| {
            k.incl.mats[x]
                .to_cols()
                .iter()
                .all(|col| b.value(x).solve_in_span(&f.mats[x], col).is_some())
        })
}

// ---------------------------------------------------------------------------
// torsors

#[derive(Clone, Debug)]
pub enum FiberGroupoid {
    /// stage 1: the 2-groupoid of the fiber crossed module
    TwoGroupoid(TwoGroupoid),
    /// stage n >= 2: `gpdₙ` of the middle (n+1)-crossed complex
    Internal(InternalGroupoid),
    /// stage 2 with nonabelian `E₀` and infinite `E₁`: described by its
    /// action form only
    Implicit,
}

/// Per place: objects, moves and the endomorphism moves of the fiber,
/// which is the action groupoid of the moves on the objects.
#[derive(Clone, Debug)]
struct Place {
    x: usize,
    y: usize,
    objects: Elems,
    moves: Elems,
    endo: Elems,
    base: Elems,
    coef: Elems,
    /// stage 2: a preimage under `σ` of each element of `im σ`
    preimage: HashMap<usize, Vec<i64>>,
}

/// A torsor above the base of an extension with coefficients `Ãₙ`.
#[derive(Clone, Debug)]
pub struct TwoTorsor {
    pub n: usize,
    pub extension: TwoExtension,
    pub coefficients: CoefficientObject,
    pub fiber: FiberGroupoid,
    places: Vec<Place>,
    perturb: Option<(usize, El, El)>,
}

/// The torsor of an extension; fails when the extension does not validate.
pub fn torsor_from_extension(e: &TwoExtension) -> Result<TwoTorsor> {
    let r = validate_extension(e);
    if !r.ok() {
        let names: Vec<String> = r.failures().iter().map(|c| format!("{} {}", c.name, c.detail)).collect();
        return invalid(format!("extension fails: {}", names.join("; ")));
    }
    torsor_of(e)
}

/// The torsor construction without validating the extension first.
pub fn torsor_of(e: &TwoExtension) -> Result<TwoTorsor> {
    let n = e.n;
    let (coefficients, fiber) = match &e.body {
        Body::Groupoid { fiber, .. } => {
            let coeffs = make_coefficients(1, &e.coeff, &e.base)?;
            (coeffs, FiberGroupoid::TwoGroupoid(xmod::gpd_of_xm(fiber)?))
        }
        _ => {
            let target = match &e.body {
                Body::CrossedModule { target, .. } => CrossedComplex::from_xm(target.clone()),
                _ => e.base.clone(),
            };
            let coeffs = make_coefficients(n, &e.coeff, &target)?;
            let fiber = match e.complex().and_then(|c| internal_gpd::gpd_n(&c, n)) {
                Ok(g) => FiberGroupoid::Internal(g),
                Err(Error::Range(_)) => FiberGroupoid::Implicit,
                Err(err) => return Err(err),
            };
            (coeffs, fiber)
        }
    };
    let places = build_places(e)?;
    Ok(TwoTorsor {
        n,
        extension: e.clone(),
        coefficients,
        fiber,
        places,
        perturb: None,
    })
}

fn build_places(e: &TwoExtension) -> Result<Vec<Place>> {
    let mut out = Vec::new();
    match &e.body {
        Body::Groupoid { fiber, .. } => {
            let g = fiber.base();
            for x in 0..g.num_objects() {
                for y in 0..g.num_objects() {
                    let cy = fiber.c().group(y);
                    out.push(Place {
                        x,
                        y,
                        objects: Elems {
                            items: g.hom(x, y).iter().map(|&f| El::G(f)).collect(),
                            exhaustive: true,
                        },
                        moves: group_elems(cy),
                        endo: Elems {
                            items: (0..cy.order())
                                .filter(|&u| fiber.delta(y, u) == g.id(y))
                                .map(El::G)
                                .collect(),
                            exhaustive: true,
                        },
                        base: Elems {
                            items: e.pi.hom(x, y).iter().map(|&f| El::G(f)).collect(),
                            exhaustive: true,
                        },
                        coef: module_elems(e.a.value(y)),
                        preimage: HashMap::new(),
                    });
                }
            }
        }
        Body::CrossedModule {
            target,
            e0,
            e1,
            sigma,
            ..
        } => {
            let k = group_kernel(e1, e0, sigma)?;
            for x in 0..e0.base().num_objects() {
                let endo = endo_elems(&k, e1, x);
                out.push(Place {
                    x,
                    y: x,
                    objects: group_elems(e0.group(x)),
                    moves: module_elems(e1.value(x)),
                    endo,
                    base: group_elems(target.c().group(x)),
                    coef: module_elems(e.a.value(x)),
                    preimage: preimages(e0.group(x), &sigma[x]),
                });
            }
        }
        Body::Complex { e0, e1, sigma, .. } => {
            let k = coefficients::kernel(sigma, e1, e0)?;
            let target = e.base.module(e.n).unwrap();
            for x in 0..e0.base().num_objects() {
                out.push(Place {
                    x,
                    y: x,
                    objects: module_elems(e0.value(x)),
                    moves: module_elems(e1.value(x)),
                    endo: endo_elems(&k, e1, x),
                    base: module_elems(target.value(x)),
                    coef: module_elems(e.a.value(x)),
                    preimage: HashMap::new(),
                });
            }
        }
    }
    Ok(out)
}

fn endo_elems(k: &coefficients::Kernel, e1: &GModule, x: usize) -> Elems {
    let s = module_elems(k.module.value(x));
    let items: BTreeSet<El> = s
        .items
        .iter()
        .map(|v| El::V(e1.value(x).reduce(&k.incl.mats[x].mul_vec(v.v()))))
        .collect();
    Elems {
        items: items.into_iter().collect(),
        exhaustive: s.exhaustive,
    }
}

/// Breadth-first search over coefficient vectors for a preimage of every
/// element of the subgroup generated by `imgs`.
fn preimages(g: &FiniteGroup, imgs: &[usize]) -> HashMap<usize, Vec<i64>> {
    let mut seen = HashMap::new();
    seen.insert(g.identity(), vec![0; imgs.len()]);
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(a) = queue.pop_front() {
        for (i, &s) in imgs.iter().enumerate() {
            let b = g.mul(a, s);
            if !seen.contains_key(&b) {
                let mut v = seen[&a].clone();
                v[i] += 1;
                seen.insert(b, v);
                queue.push_back(b);
            }
        }
    }
    seen
}

impl TwoTorsor {
    /// The same torsor with the cocycle changed at one endomorphism.
    pub fn perturbed(&self) -> TwoTorsor {
        let mut t = self.clone();
        for (p, pl) in self.places.iter().enumerate() {
            let nonzero = pl.coef.items.iter().any(|c| c != &self.coef_zero(p));
            if let (Some(o), Some(k), true) = (pl.objects.items.first(), pl.endo.items.first(), nonzero) {
                t.perturb = Some((p, o.clone(), k.clone()));
                return t;
            }
        }
        t
    }

    pub fn num_places(&self) -> usize {
        self.places.len()
    }

    fn coef_module(&self, p: usize) -> &FgAbelian {
        self.extension.a.value(self.places[p].y)
    }

    fn coef_zero(&self, p: usize) -> El {
        El::V(self.coef_module(p).zero_elem())
    }

    fn coef_add(&self, p: usize, a: &El, b: &El) -> El {
        El::V(self.coef_module(p).add(a.v(), b.v()))
    }

    /// Target of the move `k` out of the object `o`.
    pub fn target(&self, p: usize, o: &El, k: &El) -> El {
        let pl = &self.places[p];
        let x = pl.x;
        match &self.extension.body {
            Body::Groupoid { fiber, .. } => {
                let g = fiber.base();
                El::G(g.compose(fiber.delta(pl.y, k.g()), o.g()))
            }
            Body::CrossedModule { e0, sigma, .. } => {
                let gx = e0.group(x);
                El::G(gx.mul(o.g(), eval_word(gx, &sigma[x], k.v())))
            }
            Body::Complex { e0, sigma, .. } => {
                let s = sigma.mats[x].mul_vec(k.v());
                El::V(e0.value(x).add(o.v(), &s))
            }
        }
    }

    /// Composite move: first `k1`, then `k2`.
    pub fn then(&self, p: usize, k2: &El, k1: &El) -> El {
        match &self.extension.body {
            Body::Groupoid { fiber, .. } => El::G(fiber.c().group(self.places[p].y).mul(k2.g(), k1.g())),
            Body::CrossedModule { e1, .. } | Body::Complex { e1, .. } => {
                El::V(e1.value(self.places[p].x).add(k1.v(), k2.v()))
            }
        }
    }

    fn inv(&self, p: usize, k: &El) -> El {
        match &self.extension.body {
            Body::Groupoid { fiber, .. } => El::G(fiber.c().group(self.places[p].y).inv(k.g())),
            Body::CrossedModule { e1, .. } | Body::Complex { e1, .. } => El::V(e1.value(self.places[p].x).neg(k.v())),
        }
    }

    /// The base element an object lies over.
    pub fn proj(&self, p: usize, o: &El) -> El {
        let x = self.places[p].x;
        match &self.extension.body {
            Body::Groupoid { .. } => El::G(self.extension.q.arr[o.g()]),
            Body::CrossedModule { tau, .. } => El::G(tau[x][o.g()]),
            Body::Complex { tau, .. } => {
                let target = self.extension.base.module(self.n).unwrap();
                El::V(target.value(x).reduce(&tau.mats[x].mul_vec(o.v())))
            }
        }
    }

    /// `σ̄ = j⁻¹` on `ker σ`; `None` off the kernel.
    fn sbar(&self, p: usize, k: &El) -> Option<Vec<i64>> {
        let pl = &self.places[p];
        match &self.extension.body {
            Body::Groupoid { kernel, fiber } => {
                let c = kernel[pl.y].coords(k.g())?;
                let _ = fiber;
                Some(self.coef_module(p).reduce(c))
            }
            Body::CrossedModule { e1, j, .. } | Body::Complex { e1, j, .. } => {
                let a = e1.value(pl.x).solve_in_span(&j.mats[pl.x], k.v())?;
                Some(self.coef_module(p).reduce(&a))
            }
        }
    }

    /// The cocycle on an endomorphism `(o, k)`: its base element and its
    /// coefficient.
    pub fn alpha(&self, p: usize, o: &El, k: &El) -> Option<(El, El)> {
        if self.target(p, o, k) != *o {
            return None;
        }
        let mut a = El::V(self.sbar(p, k)?);
        if let Some((pp, po, pk)) = &self.perturb {
            if *pp == p && po == o && pk == k {
                let m = self.coef_module(p);
                let bump = self.places[p]
                    .coef
                    .items
                    .iter()
                    .find(|c| !m.is_zero(c.v()))
                    .cloned()
                    .unwrap_or_else(|| self.coef_zero(p));
                a = self.coef_add(p, &a, &bump);
            }
        }
        Some((self.proj(p, o), a))
    }

    /// A move from `o` to `o2`, when one exists.
    pub fn connecting_move(&self, p: usize, o: &El, o2: &El) -> Option<El> {
        let pl = &self.places[p];
        let x = pl.x;
        match &self.extension.body {
            Body::Groupoid { .. } => pl.moves.items.iter().find(|k| self.target(p, o, k) == *o2).cloned(),
            Body::CrossedModule { e0, .. } => {
                let gx = e0.group(x);
                let d = gx.mul(gx.inv(o.g()), o2.g());
                pl.preimage.get(&d).map(|v| El::V(v.clone()))
            }
            Body::Complex { e0, sigma, .. } => {
                let d = e0.value(x).sub(o2.v(), o.v());
                e0.value(x).solve_in_span(&sigma.mats[x], &d).map(El::V)
            }
        }
    }

    /// An object over the base element `t`, when one exists.
    pub fn section(&self, p: usize, t: &El) -> Option<El> {
        let pl = &self.places[p];
        let x = pl.x;
        match &self.extension.body {
            Body::Groupoid { .. } | Body::CrossedModule { .. } => {
                pl.objects.items.iter().find(|o| self.proj(p, o) == *t).cloned()
            }
            Body::Complex { tau, .. } => {
                let target = self.extension.base.module(self.n).unwrap();
                target
                    .value(x)
                    .solve_in_span(&tau.mats[x], t.v())
                    .map(|w| El::V(self.extension_e0_reduce(x, &w)))
            }
        }
    }

    fn extension_e0_reduce(&self, x: usize, w: &[i64]) -> Vec<i64> {
        match &self.extension.body {
            Body::Complex { e0, .. } => e0.value(x).reduce(w),
            _ => w.to_vec(),
        }
    }

    /// Whether every check was run on all elements.
    pub fn exhaustive(&self) -> bool {
        self.places
            .iter()
            .all(|p| p.objects.exhaustive && p.moves.exhaustive && p.endo.exhaustive && p.base.exhaustive)
    }
}

/// Both cocycle axioms, the pullback condition on `End`, naturality of the
/// cocycle and connectedness over the base.
pub fn validate_torsor(t: &TwoTorsor) -> Report {
    let mut r = Report::default();
    let mode = if t.exhaustive() { "exhaustive" } else { "sampled" };
    // α(ab) = α(a)α(b)
    let mut mult = true;
    for (p, pl) in t.places.iter().enumerate() {
        for o in &pl.objects.items {
            for k1 in &pl.endo.items {
                for k2 in &pl.endo.items {
                    let (Some(a1), Some(a2)) = (t.alpha(p, o, k1), t.alpha(p, o, k2)) else {
                        mult = false;
                        continue;
                    };
                    let k = t.then(p, k2, k1);
                    mult &= t.alpha(p, o, &k) == Some((a1.0.clone(), t.coef_add(p, &a2.1, &a1.1)));
                }
            }
        }
    }
    r.push("α(ab) = α(a)α(b)", mult, mode);
    // α(f a f⁻¹) = α(a) for s(f) = s(a)
    let mut conj = true;
    for (p, pl) in t.places.iter().enumerate() {
        for o in &pl.objects.items {
            for m in &pl.moves.items {
                let o2 = t.target(p, o, m);
                for k in &pl.endo.items {
                    let c = t.then(p, m, &t.then(p, k, &t.inv(p, m)));
                    conj &= t.alpha(p, &o2, &c) == t.alpha(p, o, k);
                }
            }
        }
    }
    r.push("α(faf⁻¹) = α(a)", conj, mode);
    // End(o) ≅ A(place) through α
    let mut pullback = true;
    for (p, pl) in t.places.iter().enumerate() {
        for o in &pl.objects.items {
            let imgs: BTreeSet<El> = pl.endo.items.iter().filter_map(|k| t.alpha(p, o, k).map(|a| a.1)).collect();
            pullback &= imgs.len() == pl.endo.items.len();
            if pl.endo.exhaustive && pl.coef.exhaustive {
                pullback &= imgs.len() == pl.coef.items.len();
            }
        }
    }
    if !t.exhaustive() {
        pullback &= kernel_is_coefficient(&t.extension);
    }
    r.push("End ≅ obj × A (pullback)", pullback, mode);
    // naturality in the base groupoid
    r.push("α is natural", alpha_natural(t), mode);
    // connected over the base
    let mut connected = true;
    for (p, pl) in t.places.iter().enumerate() {
        for o in &pl.objects.items {
            for k in &pl.moves.items {
                connected &= t.proj(p, &t.target(p, o, k)) == t.proj(p, o);
            }
            for o2 in &pl.objects.items {
                if t.proj(p, o) == t.proj(p, o2) {
                    connected &= t
                        .connecting_move(p, o, o2)
                        .is_some_and(|k| t.target(p, o, &k) == *o2);
                }
            }
        }
        if pl.base.exhaustive {
            connected &= pl.base.items.iter().all(|b| t.section(p, b).is_some_and(|o| t.proj(p, &o) == *b));
        }
    }
    if let Body::Complex { e0, tau, .. } = &t.extension.body {
        let target = t.extension.base.module(t.n).unwrap();
        connected &= coefficients::is_surjective(tau, e0, target).unwrap_or(false);
    }
    r.push("components are the base", connected, mode);
    r
}

fn kernel_is_coefficient(e: &TwoExtension) -> bool {
    match &e.body {
        Body::Groupoid { .. } => true,
        Body::CrossedModule { e0, e1, sigma, j, .. } => group_kernel(e1, e0, sigma).is_ok_and(|k| {
            (0..e1.base().num_objects()).all(|x| {
                e.a.value(x).isomorphic(k.module.value(x))
                    && k.incl.mats[x]
                        .to_cols()
                        .iter()
                        .all(|c| e1.value(x).solve_in_span(&j.mats[x], c).is_some())
            })
        }),
        Body::Complex { e0, e1, sigma, j, .. } => {
            coefficients::is_injective(j, &e.a, e1).unwrap_or(false) && exact_at(j, sigma, &e.a, e1, e0)
        }
    }
}

fn alpha_natural(t: &TwoTorsor) -> bool {
    let e = &t.extension;
    match &e.body {
        Body::Groupoid { fiber, .. } => {
            let g = fiber.base();
            let nobj = g.num_objects();
            for (p, pl) in t.places.iter().enumerate() {
                for u in g.hom_from(pl.y) {
                    let z = g.tgt(u);
                    let p2 = pl.x * nobj + z;
                    for o in &pl.objects.items {
                        let o2 = El::G(g.compose(u, o.g()));
                        for k in &pl.endo.items {
                            let k2 = El::G(fiber.c().act(u, k.g()));
                            let Some((b, a)) = t.alpha(p, o, k) else { return false };
                            let want = (
                                El::G(e.pi.compose(e.q.arr[u], b.g())),
                                El::V(e.a.value(z).reduce(&e.a.act(u, a.v()))),
                            );
                            if t.alpha(p2, &o2, &k2) != Some(want) {
                                return false;
                            }
                        }
                    }
                }
            }
            true
        }
        Body::CrossedModule { target, e0, e1, .. } => {
            let g = e0.base();
            for u in 0..g.num_arrows() {
                let (x, y) = (g.src(u), g.tgt(u));
                for o in &t.places[x].objects.items {
                    let o2 = El::G(e0.act(u, o.g()));
                    if t.proj(y, &o2) != El::G(target.c().act(u, t.proj(x, o).g())) {
                        return false;
                    }
                    for k in &t.places[x].endo.items {
                        let k2 = El::V(e1.value(y).reduce(&e1.act(u, k.v())));
                        let (Some((_, a)), Some((_, a2))) = (t.alpha(x, o, k), t.alpha(y, &o2, &k2)) else {
                            return false;
                        };
                        if !e.a.value(y).eq_elem(a2.v(), &e.a.act(u, a.v())) {
                            return false;
                        }
                    }
                }
            }
            true
        }
        Body::Complex { e0, e1, .. } => {
            let g = e0.base();
            let target = e.base.module(e.n).unwrap();
            for u in 0..g.num_arrows() {
                let (x, y) = (g.src(u), g.tgt(u));
                for o in &t.places[x].objects.items {
                    let o2 = El::V(e0.value(y).reduce(&e0.act(u, o.v())));
                    let want = El::V(target.value(y).reduce(&target.act(u, t.proj(x, o).v())));
                    if t.proj(y, &o2) != want {
                        return false;
                    }
                    for k in &t.places[x].endo.items {
                        let k2 = El::V(e1.value(y).reduce(&e1.act(u, k.v())));
                        let (Some((_, a)), Some((_, a2))) = (t.alpha(x, o, k), t.alpha(y, &o2, &k2)) else {
                            return false;
                        };
                        if !e.a.value(y).eq_elem(a2.v(), &e.a.act(u, a.v())) {
                            return false;
                        }
                    }
                }
            }
            true
        }
    }
}

/// U-splitness: the projection to the base has a set section and
/// `⟨s, t⟩` onto pairs in the same fiber has one too.
pub fn is_u_split(t: &TwoTorsor) -> bool {
    for (p, pl) in t.places.iter().enumerate() {
        if pl.base.exhaustive {
            if !pl.base.items.iter().all(|b| t.section(p, b).is_some_and(|o| t.proj(p, &o) == *b)) {
                return false;
            }
        }
        for o in &pl.objects.items {
            for o2 in &pl.objects.items {
                if t.proj(p, o) == t.proj(p, o2) && !t.connecting_move(p, o, o2).is_some_and(|k| t.target(p, o, &k) == *o2)
                {
                    return false;
                }
            }
        }
    }
    match &t.extension.body {
        Body::Complex { e0, e1, sigma, tau, .. } => {
            let target = t.extension.base.module(t.n).unwrap();
            coefficients::is_surjective(tau, e0, target).unwrap_or(false) && exact_at(sigma, tau, e1, e0, target)
        }
        _ => true,
    }
}

/// The endomorphism object computed as the equalizer of source and target,
/// against `E₀ ⊕ (A∘q)` (stage 1: `⋉(G, ker δ)` against `⋉(G, A∘q)`).
#[derive(Clone, Debug)]
pub struct EndReport {
    pub computed: Vec<String>,
    pub expected: Vec<String>,
    pub iso: bool,
}

pub fn endomorphism_object(t: &TwoTorsor) -> Result<EndReport> {
    let e = &t.extension;
    match (&e.body, &t.fiber) {
        (Body::Groupoid { fiber, kernel }, _) => {
            let g = fiber.base();
            let mut iso = true;
            let mut computed = Vec::new();
            for x in 0..g.num_objects() {
                let cx = fiber.c().group(x);
                let ker: Vec<usize> = (0..cx.order()).filter(|&u| fiber.delta(x, u) == g.id(x)).collect();
                let sub = AbelianSubgroup::new(cx, &ker);
                computed.push(sub.pres.invariants());
                let elems = e.a.value(x).elements().unwrap_or_default();
                let imgs: BTreeSet<usize> = elems.iter().map(|v| kernel[x].eval(cx, v)).collect();
                iso &= imgs.len() == elems.len() && imgs == ker.iter().copied().collect();
            }
            Ok(EndReport {
                computed,
                expected: e.a.describe(),
                iso,
            })
        }
        (_, FiberGroupoid::Internal(gi)) => match &gi.top {
            Top::Abelian { obj, arr, s, t: tt, .. } => {
                let j = match &e.body {
                    Body::CrossedModule { j, .. } | Body::Complex { j, .. } => j,
                    _ => unreachable!(),
                };
                let end = coefficients::kernel(&tt.sub(s), arr, obj)?;
                let expected = GModule::direct_sum(&[obj, &e.a]);
                let nobj = obj.base().num_objects();
                let mut mats = Vec::new();
                for x in 0..nobj {
                    // (v, a) ↦ (j a, v) in arrows = E₁ ⊕ obj
                    let (r1, r0, ra) = (j.mats[x].rows(), obj.value(x).rank(), e.a.value(x).rank());
                    let top = Mat::zeros(r1, r0).hstack(&j.mats[x]);
                    let bottom = Mat::identity(r0).hstack(&Mat::zeros(r0, ra));
                    let phi = top.vstack(&bottom);
                    let cols: Option<Vec<Vec<i64>>> = phi
                        .to_cols()
                        .iter()
                        .map(|c| arr.value(x).solve_in_span(&end.incl.mats[x], c))
                        .collect();
                    let Some(cols) = cols else {
                        return Ok(EndReport {
                            computed: end.module.describe(),
                            expected: expected.describe(),
                            iso: false,
                        });
                    };
                    mats.push(Mat::from_cols(&cols, end.module.value(x).rank()));
                }
                let psi = ModHom { mats };
                let iso = psi.validate(&expected, &end.module).is_ok() && coefficients::is_iso(&psi, &expected, &end.module)?;
                Ok(EndReport {
                    computed: end.module.describe(),
                    expected: expected.describe(),
                    iso,
                })
            }
            Top::Finite { arr, s, t: tt, .. } => {
                let Body::CrossedModule { e0, e1, j, .. } = &e.body else { unreachable!() };
                let (_, els) = e1.to_ggroup()?;
                let mut iso = true;
                let mut computed = Vec::new();
                let mut expected = Vec::new();
                for x in 0..e0.base().num_objects() {
                    let ax = arr.group(x);
                    let m = e0.group(x).order();
                    let end: BTreeSet<usize> = (0..ax.order()).filter(|&k| s[x][k] == tt[x][k]).collect();
                    let index: HashMap<Vec<i64>, usize> = els[x]
                        .iter()
                        .enumerate()
                        .map(|(i, v)| (e1.value(x).coords(v), i))
                        .collect();
                    let avals = e.a.value(x).elements().unwrap_or_default();
                    let mut imgs = BTreeSet::new();
                    for v in 0..m {
                        for a in &avals {
                            let ja = j.mats[x].mul_vec(a);
                            imgs.insert(index[&e1.value(x).coords(&ja)] * m + v);
                        }
                    }
                    iso &= imgs == end;
                    computed.push(format!("order {}", end.len()));
                    expected.push(format!("order {}", m * avals.len()));
                }
                Ok(EndReport { computed, expected, iso })
            }
        },
        _ => Err(Error::Range("endomorphisms need an explicit fiber".into())),
    }
}

/// `π₀` of the fiber is the base of the extension.
pub fn fiber_components_match(t: &TwoTorsor) -> Result<bool> {
    match &t.fiber {
        FiberGroupoid::TwoGroupoid(g) => {
            let (p, _) = g.pi0()?;
            Ok(p.same_as(&t.extension.pi))
        }
        FiberGroupoid::Internal(g) => {
            let (p, _) = internal_gpd::pi0_internal(g)?;
            Ok(p == t.extension.base || p.describe_homotopy()? == t.extension.base.describe_homotopy()?)
        }
        FiberGroupoid::Implicit => Ok(validate_torsor(t).checks.iter().any(|c| c.name == "components are the base" && c.ok)),
    }
}

// ---------------------------------------------------------------------------
// morphisms

/// A finite extension (stage >= 2) as tables of finite groups.
struct FiniteExt {
    e0: GGroup,
    e1: GGroup,
    a: GGroup,
    sigma: Vec<Vec<usize>>,
    tau: Vec<Vec<usize>>,
    j: Vec<Vec<usize>>,
}

fn module_table(
    src_els: &[Vec<i64>],
    tgt: &FgAbelian,
    tgt_els: &[Vec<i64>],
    f: impl Fn(&[i64]) -> Vec<i64>,
) -> Vec<usize> {
    let index: HashMap<Vec<i64>, usize> = tgt_els.iter().enumerate().map(|(i, v)| (tgt.coords(v), i)).collect();
    src_els.iter().map(|v| index[&tgt.coords(&f(v))]).collect()
}

fn finite_ext(e: &TwoExtension) -> Result<FiniteExt> {
    let (ag, aels) = e.a.to_ggroup()?;
    match &e.body {
        Body::Groupoid { .. } => Err(Error::Range("stage 1 has no module sequence".into())),
        Body::CrossedModule {
            target: _,
            e0,
            e1,
            sigma,
            tau,
            j,
        } => {
            let (e1g, els) = e1.to_ggroup()?;
            let nobj = e0.base().num_objects();
            let sig = (0..nobj)
                .map(|x| els[x].iter().map(|v| eval_word(e0.group(x), &sigma[x], v)).collect())
                .collect();
            let jt = (0..nobj)
                .map(|x| module_table(&aels[x], e1.value(x), &els[x], |v| j.mats[x].mul_vec(v)))
                .collect();
            Ok(FiniteExt {
                e0: e0.clone(),
                e1: e1g,
                a: ag,
                sigma: sig,
                tau: tau.clone(),
                j: jt,
            })
        }
        Body::Complex {
            e0,
            e1,
            sigma,
            tau,
            j,
        } => {
            let target = e.base.module(e.n).unwrap();
            let (e0g, els0) = e0.to_ggroup()?;
            let (e1g, els1) = e1.to_ggroup()?;
            let (_, elst) = target.to_ggroup()?;
            let nobj = e0.base().num_objects();
            let sig = (0..nobj)
                .map(|x| module_table(&els1[x], e0.value(x), &els0[x], |v| sigma.mats[x].mul_vec(v)))
                .collect();
            let ta = (0..nobj)
                .map(|x| module_table(&els0[x], target.value(x), &elst[x], |v| tau.mats[x].mul_vec(v)))
                .collect();
            let jt = (0..nobj)
                .map(|x| module_table(&aels[x], e1.value(x), &els1[x], |v| j.mats[x].mul_vec(v)))
                .collect();
            Ok(FiniteExt {
                e0: e0g,
                e1: e1g,
                a: ag,
                sigma: sig,
                tau: ta,
                j: jt,
            })
        }
    }
}

/// Natural families of homomorphisms `src -> tgt` over the common base.
fn ggroup_homs(src: &GGroup, tgt: &GGroup) -> Vec<Vec<Vec<usize>>> {
    let nobj = src.base().num_objects();
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for x in 0..nobj {
        let hs = src.group(x).homs(tgt.group(x));
        out = out
            .into_iter()
            .flat_map(|prefix| {
                hs.iter().map(move |h| {
                    let mut v = prefix.clone();
                    v.push(h.clone());
                    v
                })
            })
            .collect();
    }
    out.retain(|f| coefficients::is_ggroup_hom(src, tgt, f));
    out
}

/// Counts of extension morphisms `e -> e2` and of torsor morphisms between
/// their torsors, and whether `(f₀, f₁) ↦ (f₀, f₀ × f₁)` is a bijection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correspondence {
    pub extension_morphisms: usize,
    pub torsor_morphisms: usize,
    pub bijective: bool,
}

pub fn morphism_correspondence(e: &TwoExtension, e2: &TwoExtension) -> Result<Correspondence> {
    if e.n != e2.n || e.n < 2 {
        return Err(Error::Range("morphisms are compared at a common stage n >= 2".into()));
    }
    let f = finite_ext(e)?;
    let g = finite_ext(e2)?;
    let nobj = f.e0.base().num_objects();
    let same_a = (0..nobj).all(|x| f.a.group(x).order() == g.a.group(x).order());
    if !same_a {
        return invalid("extensions have different coefficients");
    }
    // extension morphisms
    let h0 = ggroup_homs(&f.e0, &g.e0);
    let h1 = ggroup_homs(&f.e1, &g.e1);
    let mut ext = Vec::new();
    for f0 in &h0 {
        if !(0..nobj).all(|x| (0..f.e0.group(x).order()).all(|u| g.tau[x][f0[x][u]] == f.tau[x][u])) {
            continue;
        }
        for f1 in &h1 {
            let ok = (0..nobj).all(|x| {
                (0..f.e1.group(x).order()).all(|y| f0[x][f.sigma[x][y]] == g.sigma[x][f1[x][y]])
                    && (0..f.a.group(x).order()).all(|a| f1[x][f.j[x][a]] == g.j[x][a])
            });
            if ok {
                ext.push((f0.clone(), f1.clone()));
            }
        }
    }
    // torsor morphisms: arrows E₀ × E₁ with index u·|E₁| + y
    let arr = |h: &FiniteExt| h.e0.product(&h.e1);
    let (fa, ga) = (arr(&f), arr(&g));
    let src = |h: &FiniteExt, x: usize, k: usize| k / h.e1.group(x).order();
    let tgt = |h: &FiniteExt, x: usize, k: usize| {
        let m = h.e1.group(x).order();
        h.e0.group(x).mul(k / m, h.sigma[x][k % m])
    };
    let alpha = |h: &FiniteExt, x: usize, k: usize| -> Option<(usize, usize)> {
        let m = h.e1.group(x).order();
        let (u, y) = (k / m, k % m);
        if h.sigma[x][y] != h.e0.group(x).identity() {
            return None;
        }
        let a = (0..h.a.group(x).order()).find(|&a| h.j[x][a] == y)?;
        Some((h.tau[x][u], a))
    };
    let ha = ggroup_homs(&fa, &ga);
    let mut tors = Vec::new();
    for f0 in &h0 {
        if !(0..nobj).all(|x| (0..f.e0.group(x).order()).all(|u| g.tau[x][f0[x][u]] == f.tau[x][u])) {
            continue;
        }
        for fm in &ha {
            let ok = (0..nobj).all(|x| {
                let m = f.e1.group(x).order();
                let m2 = g.e1.group(x).order();
                (0..fa.group(x).order()).all(|k| {
                    src(&g, x, fm[x][k]) == f0[x][src(&f, x, k)]
                        && tgt(&g, x, fm[x][k]) == f0[x][tgt(&f, x, k)]
                        && match alpha(&f, x, k) {
                            Some(a) => alpha(&g, x, fm[x][k]) == Some(a),
                            None => true,
                        }
                }) && (0..f.e0.group(x).order()).all(|u| fm[x][u * m] == f0[x][u] * m2)
            });
            if ok {
                tors.push((f0.clone(), fm.clone()));
            }
        }
    }
    let mut images = BTreeSet::new();
    for (f0, f1) in &ext {
        let fm: Vec<Vec<usize>> = (0..nobj)
            .map(|x| {
                let m = f.e1.group(x).order();
                let m2 = g.e1.group(x).order();
                (0..fa.group(x).order())
                    .map(|k| f0[x][k / m] * m2 + f1[x][k % m])
                    .collect()
            })
            .collect();
        images.insert((f0.clone(), fm));
    }
    let all: BTreeSet<(Vec<Vec<usize>>, Vec<Vec<usize>>)> = tors.iter().cloned().collect();
    Ok(Correspondence {
        extension_morphisms: ext.len(),
        torsor_morphisms: tors.len(),
        bijective: images.len() == ext.len() && images == all,
    })
}

// ---------------------------------------------------------------------------
// explicit torsors and pullback

/// A finite torsor spelled out as a groupoid over a family of base sets.
#[derive(Clone, Debug)]
pub struct SetTorsor {
    pub fiber: FiniteGroupoid,
    /// the place of each fiber object and its base element there
    pub proj: Vec<(usize, usize)>,
    /// size of the base set at each place
    pub base: Vec<usize>,
    /// coefficient group at each place
    pub coef: Vec<FiniteGroup>,
    /// `α` on endomorphisms of the fiber
    pub alpha: Vec<Option<usize>>,
}

impl TwoTorsor {
    /// The fiber as an explicit groupoid; needs every set to be finite.
    pub fn to_set_torsor(&self) -> Result<SetTorsor> {
        if !self.exhaustive() {
            return Err(Error::Range("torsor has infinite components".into()));
        }
        let mut objects = Vec::new();
        let mut proj = Vec::new();
        let mut base = Vec::new();
        let mut coef = Vec::new();
        let mut obj_index: HashMap<(usize, El), usize> = HashMap::new();
        let mut coef_index: Vec<HashMap<El, usize>> = Vec::new();
        for (p, pl) in self.places.iter().enumerate() {
            let bidx: HashMap<&El, usize> = pl.base.items.iter().enumerate().map(|(i, b)| (b, i)).collect();
            for o in &pl.objects.items {
                obj_index.insert((p, o.clone()), objects.len());
                objects.push(format!("{p}:{o:?}"));
                proj.push((p, bidx[&self.proj(p, o)]));
            }
            base.push(pl.base.items.len());
            let m = self.coef_module(p);
            let cidx: HashMap<El, usize> = pl.coef.items.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
            let mul = pl
                .coef
                .items
                .iter()
                .map(|a| pl.coef.items.iter().map(|b| cidx[&El::V(m.add(a.v(), b.v()))]).collect())
                .collect();
            coef.push(FiniteGroup::from_table(mul, None)?);
            coef_index.push(cidx);
        }
        let mut arrows = Vec::new();
        let mut info = Vec::new();
        let mut arrow_index: HashMap<(usize, El, El), usize> = HashMap::new();
        for (p, pl) in self.places.iter().enumerate() {
            for o in &pl.objects.items {
                for k in &pl.moves.items {
                    let o2 = self.target(p, o, k);
                    arrow_index.insert((p, o.clone(), k.clone()), arrows.len());
                    arrows.push(Arrow {
                        name: format!("{p}:{o:?}:{k:?}"),
                        src: obj_index[&(p, o.clone())],
                        tgt: obj_index[&(p, o2)],
                    });
                    info.push((p, o.clone(), k.clone()));
                }
            }
        }
        let id_move = |p: usize| -> El {
            match &self.extension.body {
                Body::Groupoid { fiber, .. } => El::G(fiber.c().group(self.places[p].y).identity()),
                Body::CrossedModule { e1, .. } | Body::Complex { e1, .. } => {
                    El::V(e1.value(self.places[p].x).zero_elem())
                }
            }
        };
        let mut id = vec![0; objects.len()];
        for ((p, o), &i) in &obj_index {
            id[i] = arrow_index[&(*p, o.clone(), id_move(*p))];
        }
        let alpha = info
            .iter()
            .map(|(p, o, k)| self.alpha(*p, o, k).map(|(_, a)| coef_index[*p][&a]))
            .collect();
        let fiber = FiniteGroupoid::from_law(objects, arrows, id, |g, f| {
            let (p, o, k1) = &info[f];
            let (_, _, k2) = &info[g];
            arrow_index[&(*p, o.clone(), self.then(*p, k2, k1))]
        });
        Ok(SetTorsor {
            fiber,
            proj,
            base,
            coef,
            alpha,
        })
    }
}

impl SetTorsor {
    /// Both cocycle axioms, the pullback condition and connectedness, all
    /// exhaustively.
    pub fn validate(&self) -> Report {
        let g = &self.fiber;
        let mut r = Report::default();
        let place = |o: usize| self.proj[o].0;
        let endos = |o: usize| -> Vec<usize> { g.hom(o, o).to_vec() };
        let mut mult = true;
        let mut conj = true;
        let mut pullback = true;
        for o in 0..g.num_objects() {
            let c = &self.coef[place(o)];
            for &a in &endos(o) {
                for &b in &endos(o) {
                    mult &= match (self.alpha[a], self.alpha[b], self.alpha[g.compose(a, b)]) {
                        (Some(x), Some(y), Some(z)) => c.mul(x, y) == z,
                        _ => false,
                    };
                }
                for f in g.hom_from(o) {
                    let fa = g.compose(g.compose(f, a), g.inv(f));
                    conj &= self.alpha[fa] == self.alpha[a];
                }
            }
            let imgs: BTreeSet<Option<usize>> = endos(o).iter().map(|&a| self.alpha[a]).collect();
            pullback &= !imgs.contains(&None) && imgs.len() == endos(o).len() && imgs.len() == c.order();
        }
        r.push("α(ab) = α(a)α(b)", mult, "exhaustive");
        r.push("α(faf⁻¹) = α(a)", conj, "exhaustive");
        r.push("End ≅ obj × A (pullback)", pullback, "exhaustive");
        r.push("components are the base", self.connected(), "exhaustive");
        r
    }

    /// Objects over the same base element are joined by an arrow, arrows
    /// stay over one base element, and every base element is hit.
    pub fn connected(&self) -> bool {
        let g = &self.fiber;
        let arrows_ok = (0..g.num_arrows()).all(|f| self.proj[g.src(f)] == self.proj[g.tgt(f)]);
        let pairs_ok = (0..g.num_objects())
            .all(|o| (0..g.num_objects()).all(|o2| self.proj[o] != self.proj[o2] || !g.hom(o, o2).is_empty()));
        arrows_ok && pairs_ok && self.projection_onto()
    }

    fn projection_onto(&self) -> bool {
        let hit: BTreeSet<(usize, usize)> = self.proj.iter().copied().collect();
        hit.len() == self.base.iter().sum::<usize>()
    }

    /// For finite sets splitting means surjective, for the projection and
    /// for `⟨s, t⟩` onto pairs over the same base element.
    pub fn is_u_split(&self) -> bool {
        self.connected()
    }
}

/// Pullback of a torsor along `f: O' -> obj(fiber)`, with the cartesian map.
pub fn torsor_pullback(t: &SetTorsor, f: &[usize]) -> Result<(SetTorsor, Functor)> {
    let g = &t.fiber;
    if f.iter().any(|&o| o >= g.num_objects()) {
        return invalid("pullback map leaves the objects of the fiber");
    }
    let objects: Vec<String> = f
        .iter()
        .enumerate()
        .map(|(i, &o)| format!("{i}>{}", g.objects()[o]))
        .collect();
    let mut arrows = Vec::new();
    let mut info = Vec::new();
    let mut index = HashMap::new();
    for (x, &fx) in f.iter().enumerate() {
        for (y, &fy) in f.iter().enumerate() {
            for &a in g.hom(fx, fy) {
                index.insert((x, a, y), arrows.len());
                arrows.push(Arrow {
                    name: format!("{x}>{}>{y}", g.arrow(a).name),
                    src: x,
                    tgt: y,
                });
                info.push((x, a, y));
            }
        }
    }
    let id = (0..f.len()).map(|x| index[&(x, g.id(f[x]), x)]).collect();
    let fiber = FiniteGroupoid::from_law(objects, arrows, id, |q, p| {
        let (x, a, _) = info[p];
        let (_, b, z) = info[q];
        index[&(x, g.compose(b, a), z)]
    });
    let alpha = info
        .iter()
        .map(|&(x, a, y)| if x == y { t.alpha[a] } else { None })
        .collect();
    let pulled = SetTorsor {
        fiber,
        proj: f.iter().map(|&o| t.proj[o]).collect(),
        base: t.base.clone(),
        coef: t.coef.clone(),
        alpha,
    };
    let map = Functor {
        obj: f.to_vec(),
        arr: info.iter().map(|&(_, a, _)| a).collect(),
    };
    Ok((pulled, map))
}

/// Factors `g: G'' -> fiber` with `obj(g) = f ∘ h` through the pullback
/// along `f`; `None` when the factorization fails to be a functor.
pub fn factor_through_pullback(
    pulled: &SetTorsor,
    map: &Functor,
    src: &FiniteGroupoid,
    g: &Functor,
    h: &[usize],
) -> Option<Functor> {
    if (0..src.num_objects()).any(|x| g.obj[x] != map.obj[h[x]]) {
        return None;
    }
    let p = &pulled.fiber;
    let arr: Option<Vec<usize>> = (0..src.num_arrows())
        .map(|a| {
            let (x, y) = (h[src.src(a)], h[src.tgt(a)]);
            p.hom(x, y).iter().copied().find(|&b| map.arr[b] == g.arr[a])
        })
        .collect();
    let hp = Functor {
        obj: h.to_vec(),
        arr: arr?,
    };
    (hp.validate(src, p).is_ok() && map.after(&hp) == *g).then_some(hp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::FiniteGroupoid;
    use std::sync::Arc;

    fn z(n: usize) -> Gpd {
        Arc::new(FiniteGroupoid::from_group(&FiniteGroup::cyclic(n), "*"))
    }

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

    fn cc4t() -> CrossedComplex {
        let g = z(2);
        let c2 = GGroup::constant(g.clone(), &FiniteGroup::cyclic(4));
        let xm = CrossedModule::new(c2, vec![vec![0; 4]]).unwrap();
        let level = Level {
            module: GModule::constant(g, &FgAbelian::cyclic(2)),
            boundary: Boundary::IntoGroup(vec![vec![2]]),
        };
        CrossedComplex::new(xm, vec![level], 3).unwrap()
    }

    #[test]
    fn stages_of_cc4() {
        let c = cc4();
        for n in 1..=3 {
            let e = extension_from_tower(&c, n).unwrap();
            let r = validate_extension(&e);
            assert!(r.ok(), "stage {n}: {:?}", r.failures());
            let t = torsor_from_extension(&e).unwrap();
            let v = validate_torsor(&t);
            assert!(v.ok(), "stage {n}: {:?}", v.failures());
            assert!(is_u_split(&t), "stage {n}");
            assert!(fiber_components_match(&t).unwrap(), "stage {n}");
            assert!(t.coefficients.check_abelian_laws(), "stage {n}");
            if n >= 2 {
                let end = endomorphism_object(&t).unwrap();
                assert!(end.iso, "stage {n}: {end:?}");
            }
        }
        let e2 = extension_from_tower(&c, 2).unwrap();
        assert_eq!(e2.a.describe(), vec!["Z^1"]);
    }

    #[test]
    fn perturbed_cocycle_fails() {
        let e = extension_from_tower(&cc4(), 1).unwrap();
        let t = torsor_from_extension(&e).unwrap();
        assert!(!validate_torsor(&t.perturbed()).ok());
        let s = t.to_set_torsor().unwrap();
        assert!(s.validate().ok());
    }

    #[test]
    fn finite_stage_two_correspondence() {
        let e = extension_from_tower(&cc4t(), 2).unwrap();
        let t = torsor_from_extension(&e).unwrap();
        let s = t.to_set_torsor().unwrap();
        assert_eq!(s.fiber.num_arrows(), 8);
        assert!(s.validate().ok());
        let c = morphism_correspondence(&e, &e).unwrap();
        assert!(c.bijective, "{c:?}");
        assert!(c.extension_morphisms >= 1);
    }

    #[test]
    fn pullback_doubles_objects() {
        let e = extension_from_tower(&cc4t(), 2).unwrap();
        let s = torsor_from_extension(&e).unwrap().to_set_torsor().unwrap();
        let n = s.fiber.num_objects();
        let f: Vec<usize> = (0..n).chain(0..n).collect();
        let (p, map) = torsor_pullback(&s, &f).unwrap();
        assert!(p.validate().ok());
        assert!(p.is_u_split());
        map.validate(&p.fiber, &s.fiber).unwrap();
        let (p2, m2) = torsor_pullback(&s, &f[..n]).unwrap();
        let h: Vec<usize> = (0..n).collect();
        assert!(factor_through_pullback(&p, &map, &p2.fiber, &m2, &h).is_some());
    }
}
