//! JSON documents for groupoids, modules, crossed modules and crossed
//! complexes. Names are resolved on load; malformed input reports the line
//! and column of the problem.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::abelian::FgAbelian;
use crate::coefficients::{GGroup, GModule, Gpd, ModHom};
use crate::crs::{Boundary, CrossedComplex, Level};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::groupoid::{Arrow, FiniteGroupoid};
use crate::linalg::Mat;
use crate::simplicial::{Aug, SimplicialCrs, SimplicialModule};
use crate::xmod::CrossedModule;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowJson {
    pub name: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupoidJson {
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowJson>,
    /// `[g, f, g∘f]`
    pub comp: Vec<[String; 3]>,
    pub id: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueJson {
    pub rank: usize,
    /// relation vectors, each of length `rank`
    pub relations: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub values: BTreeMap<String, ValueJson>,
    /// per arrow, the matrix rows
    pub action: BTreeMap<String, Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GGroupJson {
    pub groups: BTreeMap<String, GroupJson>,
    /// per arrow, the permutation of element indices
    pub action: BTreeMap<String, Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossedModuleJson {
    pub base: GroupoidJson,
    #[serde(rename = "C")]
    pub c: GGroupJson,
    /// per object, the arrow hit by each element
    pub delta: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryJson {
    /// per object, the element of `C₂` hit by each generator
    IntoGroup(BTreeMap<String, Vec<usize>>),
    /// per object, the matrix rows
    Matrix(BTreeMap<String, Vec<Vec<i64>>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelJson {
    pub n: usize,
    pub module: ModuleJson,
    pub boundary: BoundaryJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub base: GroupoidJson,
    pub dim2: CrossedModuleJson,
    pub higher: Vec<LevelJson>,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleDoc {
    pub base: GroupoidJson,
    #[serde(flatten)]
    pub module: ModuleJson,
}

/// Per object, the rows of a matrix.
pub type MatsJson = BTreeMap<String, Vec<Vec<i64>>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialModuleJson {
    pub levels: Vec<ModuleJson>,
    /// `faces[k][i]: levels[k] -> levels[k-1]`; `faces[0]` is empty
    pub faces: Vec<Vec<MatsJson>>,
    /// `degens[k][j]: levels[k] -> levels[k+1]`
    pub degens: Vec<Vec<MatsJson>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialModuleDoc {
    pub base: GroupoidJson,
    #[serde(flatten)]
    pub module: SimplicialModuleJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AugJson {
    /// per object, the arrow hit by each generator of level 0
    Base(BTreeMap<String, Vec<String>>),
    /// per object, the element of `C₂` hit by each generator of level 0
    Group(BTreeMap<String, Vec<usize>>),
    Matrix(MatsJson),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialJson {
    pub n: usize,
    pub tail: ComplexJson,
    pub head: SimplicialModuleJson,
    pub aug: AugJson,
}

/// A top-level document, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Document {
    Groupoid(GroupoidJson),
    Module(ModuleDoc),
    CrossedModule(CrossedModuleJson),
    Complex(ComplexJson),
    SimplicialModule(SimplicialModuleDoc),
    Simplicial(SimplicialJson),
}

/// A loaded document.
#[derive(Clone, Debug)]
pub enum Object {
    Groupoid(Gpd),
    Module(GModule),
    CrossedModule(CrossedModule),
    Complex(CrossedComplex),
    SimplicialModule(SimplicialModule),
    Simplicial(SimplicialCrs),
}

impl Object {
    /// Any object except a module, viewed as a crossed complex.
    pub fn into_complex(self) -> Result<CrossedComplex> {
        match self {
            Object::Groupoid(g) => Ok(CrossedComplex::from_groupoid(g)),
            Object::CrossedModule(m) => Ok(CrossedComplex::from_xm(m)),
            Object::Complex(c) => Ok(c),
            _ => Err(Error::Range("expected a groupoid, crossed module or complex".into())),
        }
    }
}

// ---------------------------------------------------------------------------
// name resolution

/// Source text, used to locate names that fail to resolve.
struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn at(&self, needle: &str, msg: String) -> Error {
        let quoted = format!("\"{needle}\"");
        let (line, column) = match self.text.find(&quoted) {
            Some(pos) => {
                let before = &self.text[..pos];
                let line = before.matches('\n').count() + 1;
                let column = pos - before.rfind('\n').map_or(0, |p| p + 1) + 1;
                (line, column)
            }
            None => (0, 0),
        };
        Error::Parse { line, column, msg }
    }

    fn object(&self, g: &FiniteGroupoid, name: &str) -> Result<usize> {
        g.object_index(name).map_err(|_| self.at(name, format!("unknown object `{name}`")))
    }

    fn arrow(&self, g: &FiniteGroupoid, name: &str) -> Result<usize> {
        g.arrow_index(name).map_err(|_| self.at(name, format!("unknown arrow `{name}`")))
    }

    fn per_object<'b, T>(&self, g: &FiniteGroupoid, m: &'b BTreeMap<String, T>, what: &str) -> Result<Vec<&'b T>> {
        for k in m.keys() {
            self.object(g, k)?;
        }
        g.objects()
            .iter()
            .map(|o| {
                m.get(o)
                    .ok_or_else(|| self.at(what, format!("`{what}` has no entry for object `{o}`")))
            })
            .collect()
    }

    fn per_arrow<'b, T>(&self, g: &FiniteGroupoid, m: &'b BTreeMap<String, T>, what: &str) -> Result<Vec<&'b T>> {
        for k in m.keys() {
            self.arrow(g, k)?;
        }
        g.arrows()
            .iter()
            .map(|a| {
                m.get(&a.name)
                    .ok_or_else(|| self.at(what, format!("`{what}` has no entry for arrow `{}`", a.name)))
            })
            .collect()
    }

    fn groupoid(&self, j: &GroupoidJson) -> Result<Gpd> {
        let obj = |n: &str| {
            j.objects
                .iter()
                .position(|o| o == n)
                .ok_or_else(|| self.at(n, format!("unknown object `{n}`")))
        };
        let arr = |n: &str| {
            j.arrows
                .iter()
                .position(|a| a.name == n)
                .ok_or_else(|| self.at(n, format!("unknown arrow `{n}`")))
        };
        let arrows = j
            .arrows
            .iter()
            .map(|a| {
                Ok(Arrow {
                    name: a.name.clone(),
                    src: obj(&a.src)?,
                    tgt: obj(&a.tgt)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let id = j
            .objects
            .iter()
            .map(|o| {
                let a = j.id.get(o).ok_or_else(|| self.at("id", format!("no identity for object `{o}`")))?;
                arr(a)
            })
            .collect::<Result<Vec<_>>>()?;
        let comp = j
            .comp
            .iter()
            .map(|[g, f, h]| Ok((arr(g)?, arr(f)?, arr(h)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Arc::new(FiniteGroupoid::new(j.objects.clone(), arrows, id, comp)?))
    }

    fn module(&self, g: &Gpd, j: &ModuleJson) -> Result<GModule> {
        let values = self
            .per_object(g, &j.values, "values")?
            .into_iter()
            .map(|v| {
                if v.relations.iter().any(|r| r.len() != v.rank) {
                    return Err(self.at("relations", "relation of the wrong length".into()));
                }
                Ok(FgAbelian::new(v.rank, Mat::from_cols(&v.relations, v.rank)))
            })
            .collect::<Result<Vec<_>>>()?;
        let action = self
            .per_arrow(g, &j.action, "action")?
            .into_iter()
            .zip(g.arrows())
            .map(|(rows, a)| matrix(self, rows, values[a.tgt].rank(), values[a.src].rank(), "action"))
            .collect::<Result<Vec<_>>>()?;
        GModule::new(g.clone(), values, action)
    }

    fn ggroup(&self, g: &Gpd, j: &GGroupJson) -> Result<GGroup> {
        let groups = self
            .per_object(g, &j.groups, "groups")?
            .into_iter()
            .map(|gr| FiniteGroup::from_table(gr.table.clone(), gr.labels.clone()))
            .collect::<Result<Vec<_>>>()?;
        let action = self
            .per_arrow(g, &j.action, "action")?
            .into_iter()
            .cloned()
            .collect();
        GGroup::new(g.clone(), groups, action)
    }

    fn crossed_module(&self, g: &Gpd, j: &CrossedModuleJson) -> Result<CrossedModule> {
        let c = self.ggroup(g, &j.c)?;
        let delta = self
            .per_object(g, &j.delta, "delta")?
            .into_iter()
            .map(|names| names.iter().map(|n| self.arrow(g, n)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        CrossedModule::new(c, delta)
    }

    fn complex(&self, j: &ComplexJson) -> Result<CrossedComplex> {
        let g = self.groupoid(&j.base)?;
        if j.dim2.base != j.base {
            return Err(self.at("dim2", "crossed module lives over a different base".into()));
        }
        let xm = self.crossed_module(&g, &j.dim2)?;
        let mut higher = Vec::new();
        for (k, l) in j.higher.iter().enumerate() {
            if l.n != k + 3 {
                return Err(self.at("higher", format!("level {} listed where {} was expected", l.n, k + 3)));
            }
            let module = self.module(&g, &l.module)?;
            let boundary = match &l.boundary {
                BoundaryJson::IntoGroup(m) => {
                    Boundary::IntoGroup(self.per_object(&g, m, "into_group")?.into_iter().cloned().collect())
                }
                BoundaryJson::Matrix(m) => {
                    let below = higher.last().map(|l: &Level| l.module.clone());
                    let below = below.ok_or_else(|| self.at("matrix", "a matrix boundary needs a module below".into()))?;
                    let mats = self
                        .per_object(&g, m, "matrix")?
                        .into_iter()
                        .enumerate()
                        .map(|(x, rows)| matrix(self, rows, below.value(x).rank(), module.value(x).rank(), "matrix"))
                        .collect::<Result<Vec<_>>>()?;
                    Boundary::Module(ModHom { mats })
                }
            };
            higher.push(Level { module, boundary });
        }
        CrossedComplex::new(xm, higher, j.rank)
    }
}

impl Ctx<'_> {
    fn mats(&self, g: &Gpd, m: &MatsJson, src: &GModule, tgt: &GModule, what: &str) -> Result<ModHom> {
        let mats = self
            .per_object(g, m, what)?
            .into_iter()
            .enumerate()
            .map(|(x, rows)| matrix(self, rows, tgt.value(x).rank(), src.value(x).rank(), what))
            .collect::<Result<Vec<_>>>()?;
        let h = ModHom { mats };
        h.validate(src, tgt)?;
        Ok(h)
    }

    fn simplicial_module(&self, g: &Gpd, j: &SimplicialModuleJson) -> Result<SimplicialModule> {
        let levels = j.levels.iter().map(|l| self.module(g, l)).collect::<Result<Vec<_>>>()?;
        if levels.is_empty() || j.faces.len() != levels.len() || j.degens.len() + 1 != levels.len() {
            return Err(self.at("levels", "levels, faces and degens have inconsistent lengths".into()));
        }
        let mut faces = Vec::new();
        for (k, fk) in j.faces.iter().enumerate() {
            let want = if k == 0 { 0 } else { k + 1 };
            if fk.len() != want {
                return Err(self.at("faces", format!("level {k} needs {want} faces")));
            }
            faces.push(
                fk.iter()
                    .map(|m| self.mats(g, m, &levels[k], &levels[k - 1], "faces"))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let mut degens = Vec::new();
        for (k, dk) in j.degens.iter().enumerate() {
            if dk.len() != k + 1 {
                return Err(self.at("degens", format!("level {k} needs {} degeneracies", k + 1)));
            }
            degens.push(
                dk.iter()
                    .map(|m| self.mats(g, m, &levels[k], &levels[k + 1], "degens"))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let s = SimplicialModule { levels, faces, degens };
        s.validate()?;
        Ok(s)
    }

    fn simplicial(&self, j: &SimplicialJson) -> Result<SimplicialCrs> {
        let tail = self.complex(&j.tail)?;
        let g = tail.base().clone();
        let head = self.simplicial_module(&g, &j.head)?;
        let aug = match &j.aug {
            AugJson::Base(m) => Aug::Base(
                self.per_object(&g, m, "base")?
                    .into_iter()
                    .map(|names| names.iter().map(|n| self.arrow(&g, n)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?,
            ),
            AugJson::Group(m) => Aug::Group(self.per_object(&g, m, "group")?.into_iter().cloned().collect()),
            AugJson::Matrix(m) => {
                let top = tail
                    .module(j.n - 1)
                    .ok_or_else(|| self.at("matrix", "a matrix augmentation needs a module below".into()))?;
                Aug::Module(self.mats(&g, m, &head.levels[0], top, "matrix")?)
            }
        };
        SimplicialCrs::new(j.n, tail, head, aug)
    }
}

fn matrix(ctx: &Ctx, rows: &[Vec<i64>], r: usize, c: usize, what: &str) -> Result<Mat> {
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(ctx.at(what, format!("`{what}` matrix should be {r}x{c}")));
    }
    Ok(Mat::from_rows(rows, c))
}

// ---------------------------------------------------------------------------
// parsing

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    }
}

/// Reads `kind` first, then the body as its concrete type so that errors
/// keep their position.
pub fn parse_document(text: &str) -> Result<Document> {
    #[derive(Deserialize)]
    struct Kind {
        kind: String,
    }
    let kind = serde_json::from_str::<Kind>(text).map_err(json_error)?.kind;
    let body = |e| json_error(e);
    Ok(match kind.as_str() {
        "groupoid" => Document::Groupoid(serde_json::from_str(text).map_err(body)?),
        "module" => Document::Module(serde_json::from_str(text).map_err(body)?),
        "crossed_module" => Document::CrossedModule(serde_json::from_str(text).map_err(body)?),
        "complex" => Document::Complex(serde_json::from_str(text).map_err(body)?),
        "simplicial_module" => Document::SimplicialModule(serde_json::from_str(text).map_err(body)?),
        "simplicial" => Document::Simplicial(serde_json::from_str(text).map_err(body)?),
        _ => return Err(Ctx { text }.at(&kind, format!("unknown kind `{kind}`"))),
    })
}

/// Parses and validates any document.
pub fn parse(text: &str) -> Result<Object> {
    let doc = parse_document(text)?;
    let ctx = Ctx { text };
    Ok(match &doc {
        Document::Groupoid(g) => Object::Groupoid(ctx.groupoid(g)?),
        Document::Module(m) => {
            let g = ctx.groupoid(&m.base)?;
            Object::Module(ctx.module(&g, &m.module)?)
        }
        Document::CrossedModule(x) => {
            let g = ctx.groupoid(&x.base)?;
            Object::CrossedModule(ctx.crossed_module(&g, x)?)
        }
        Document::Complex(c) => Object::Complex(ctx.complex(c)?),
        Document::SimplicialModule(m) => {
            let g = ctx.groupoid(&m.base)?;
            Object::SimplicialModule(ctx.simplicial_module(&g, &m.module)?)
        }
        Document::Simplicial(s) => Object::Simplicial(ctx.simplicial(s)?),
    })
}

pub fn load(path: &std::path::Path) -> Result<Object> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Range(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

// ---------------------------------------------------------------------------
// emitting

pub fn groupoid_json(g: &FiniteGroupoid) -> GroupoidJson {
    let name = |a: usize| g.arrow(a).name.clone();
    let mut comp: Vec<[String; 3]> = g
        .comp_triples()
        .into_iter()
        .map(|(a, b, c)| [name(a), name(b), name(c)])
        .collect();
    comp.sort();
    GroupoidJson {
        objects: g.objects().to_vec(),
        arrows: g
            .arrows()
            .iter()
            .map(|a| ArrowJson {
                name: a.name.clone(),
                src: g.objects()[a.src].clone(),
                tgt: g.objects()[a.tgt].clone(),
            })
            .collect(),
        comp,
        id: (0..g.num_objects()).map(|x| (g.objects()[x].clone(), name(g.id(x)))).collect(),
    }
}

pub fn module_json(m: &GModule) -> ModuleJson {
    let g = m.base();
    ModuleJson {
        values: (0..g.num_objects())
            .map(|x| {
                let v = m.value(x);
                (
                    g.objects()[x].clone(),
                    ValueJson {
                        rank: v.rank(),
                        relations: v.relations().to_cols(),
                    },
                )
            })
            .collect(),
        action: (0..g.num_arrows())
            .map(|t| (g.arrow(t).name.clone(), m.action(t).to_rows()))
            .collect(),
    }
}

pub fn ggroup_json(c: &GGroup) -> GGroupJson {
    let g = c.base();
    GGroupJson {
        groups: (0..g.num_objects())
            .map(|x| {
                let gr = c.group(x);
                (
                    g.objects()[x].clone(),
                    GroupJson {
                        table: gr.table().clone(),
                        labels: Some(gr.labels().to_vec()),
                    },
                )
            })
            .collect(),
        action: (0..g.num_arrows())
            .map(|t| (g.arrow(t).name.clone(), c.action(t).to_vec()))
            .collect(),
    }
}

pub fn crossed_module_json(m: &CrossedModule) -> CrossedModuleJson {
    let g = m.base();
    CrossedModuleJson {
        base: groupoid_json(g),
        c: ggroup_json(m.c()),
        delta: (0..g.num_objects())
            .map(|x| {
                let names = (0..m.c().group(x).order())
                    .map(|u| g.arrow(m.delta(x, u)).name.clone())
                    .collect();
                (g.objects()[x].clone(), names)
            })
            .collect(),
    }
}

pub fn complex_json(c: &CrossedComplex) -> ComplexJson {
    let g = c.base();
    let per_object = |f: &dyn Fn(usize) -> Vec<Vec<i64>>| -> BTreeMap<String, Vec<Vec<i64>>> {
        (0..g.num_objects()).map(|x| (g.objects()[x].clone(), f(x))).collect()
    };
    ComplexJson {
        base: groupoid_json(g),
        dim2: crossed_module_json(c.xm()),
        higher: c
            .higher()
            .iter()
            .enumerate()
            .map(|(k, l)| LevelJson {
                n: k + 3,
                module: module_json(&l.module),
                boundary: match &l.boundary {
                    Boundary::IntoGroup(imgs) => BoundaryJson::IntoGroup(
                        (0..g.num_objects()).map(|x| (g.objects()[x].clone(), imgs[x].clone())).collect(),
                    ),
                    Boundary::Module(h) => BoundaryJson::Matrix(per_object(&|x| h.mats[x].to_rows())),
                },
            })
            .collect(),
        rank: c.rank(),
    }
}

fn mats_json(g: &FiniteGroupoid, h: &ModHom) -> MatsJson {
    (0..g.num_objects()).map(|x| (g.objects()[x].clone(), h.mats[x].to_rows())).collect()
}

pub fn simplicial_module_json(s: &SimplicialModule) -> SimplicialModuleJson {
    let g = s.base();
    let ops = |v: &Vec<Vec<ModHom>>| v.iter().map(|k| k.iter().map(|h| mats_json(g, h)).collect()).collect();
    SimplicialModuleJson {
        levels: s.levels.iter().map(module_json).collect(),
        faces: ops(&s.faces),
        degens: ops(&s.degens),
    }
}

pub fn simplicial_json(s: &SimplicialCrs) -> SimplicialJson {
    let g = s.base();
    let per_object = |v: &Vec<Vec<usize>>| (0..g.num_objects()).map(|x| (g.objects()[x].clone(), v[x].clone())).collect();
    SimplicialJson {
        n: s.n,
        tail: complex_json(&s.tail),
        head: simplicial_module_json(&s.head),
        aug: match &s.aug {
            Aug::Base(v) => AugJson::Base(
                (0..g.num_objects())
                    .map(|x| (g.objects()[x].clone(), v[x].iter().map(|&a| g.arrow(a).name.clone()).collect()))
                    .collect(),
            ),
            Aug::Group(v) => AugJson::Group(per_object(v)),
            Aug::Module(h) => AugJson::Matrix(mats_json(g, h)),
        },
    }
}

pub fn document(o: &Object) -> Document {
    match o {
        Object::Groupoid(g) => Document::Groupoid(groupoid_json(g)),
        Object::Module(m) => Document::Module(ModuleDoc {
            base: groupoid_json(m.base()),
            module: module_json(m),
        }),
        Object::CrossedModule(m) => Document::CrossedModule(crossed_module_json(m)),
        Object::Complex(c) => Document::Complex(complex_json(c)),
        Object::SimplicialModule(s) => Document::SimplicialModule(SimplicialModuleDoc {
            base: groupoid_json(s.base()),
            module: simplicial_module_json(s),
        }),
        Object::Simplicial(s) => Document::Simplicial(simplicial_json(s)),
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_string(o: &Object) -> String {
    let mut s = serde_json::to_string_pretty(&document(o)).expect("documents serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixtures_round_trip() {
        for n in fixtures::COMPLEXES.iter().chain(&fixtures::CROSSED_MODULES) {
            let c = fixtures::complex(n).unwrap();
            let text = to_string(&Object::Complex(c.clone()));
            let back = parse(&text).unwrap().into_complex().unwrap();
            assert!(back.same_as(&c), "{n}");
            assert_eq!(to_string(&Object::Complex(back)), text);
        }
        for n in fixtures::GROUPOIDS {
            let g = fixtures::groupoid(n).unwrap();
            let text = to_string(&Object::Groupoid(g.clone()));
            match parse(&text).unwrap() {
                Object::Groupoid(h) => assert!(h.same_as(&g)),
                _ => panic!(),
            }
        }
        let m = fixtures::coeff_z3_inversion(&fixtures::interval_plus_z2()).unwrap();
        let text = to_string(&Object::Module(m.clone()));
        match parse(&text).unwrap() {
            Object::Module(n) => assert_eq!(n.values(), m.values()),
            _ => panic!(),
        }
    }

    #[test]
    fn simplicial_round_trip() {
        let a = fixtures::coeff_z3_inversion(&fixtures::interval_plus_z2()).unwrap();
        for n in 2..=4 {
            let s = SimplicialCrs::em(n, &a, 1, 2).unwrap();
            let text = to_string(&Object::Simplicial(s.clone()));
            match parse(&text).unwrap() {
                Object::Simplicial(t) => assert_eq!(t, s),
                _ => panic!(),
            }
        }
        let m = SimplicialModule::em(&a, 2, 3);
        let text = to_string(&Object::SimplicialModule(m.clone()));
        match parse(&text).unwrap() {
            Object::SimplicialModule(t) => assert_eq!(t, m),
            _ => panic!(),
        }
    }

    #[test]
    fn errors_carry_lines() {
        match parse("{\n  \"kind\": \"groupoid\",\n  \"objects\": [1]\n}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let g = fixtures::cyclic(2);
        let text = to_string(&Object::Groupoid(g)).replacen("\"tgt\": \"*\"", "\"tgt\": \"nowhere\"", 1);
        match parse(&text) {
            Err(Error::Parse { line, msg, .. }) => {
                assert!(line > 1, "{msg}");
                assert!(msg.contains("nowhere"));
            }
            other => panic!("{other:?}"),
        }
    }
}
