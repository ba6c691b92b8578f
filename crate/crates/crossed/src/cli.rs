//! The `ck` command line: loads documents, runs one computation and prints a
//! deterministic report. Exit codes: 0 ok, 2 validation failure, 3 parse
//! error, 4 size cap, 5 range, unknown name or usage.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::crs::{self, CrossedComplex, HomotopyGroup};
use crate::error::{Error, Result};
use crate::ext_torsor::{self, Body, FiberGroupoid, Report};
use crate::io::{self, Object};
use crate::simplicial::{self, SimplicialCrs, SimplicialGroupoid, SimplicialModule, Wbar1};

#[derive(Parser, Debug)]
#[command(name = "ck", about = "Crossed complexes, Postnikov towers, 2-torsors and classifying functors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Stage or dimension `n`
    #[arg(long, global = true)]
    pub stage: Option<usize>,
    /// Object name
    #[arg(long, global = true)]
    pub object: Option<String>,
    /// Truncation level of a simplicial input
    #[arg(long, global = true)]
    pub trunc: Option<usize>,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate a document
    Validate { path: PathBuf },
    /// Homotopy group `πₙ` (`--stage n`)
    Pi { path: PathBuf },
    /// Postnikov tower with its checks
    Tower { path: PathBuf },
    /// Fiber of `ηₙ₊₁` over an object (`--stage n --object x`)
    Fiber { path: PathBuf },
    /// 2-extension realizing `ηₙ₊₁` (`--stage n`)
    Extension { path: PathBuf },
    /// 2-torsor of that extension with its axiom report (`--stage n`)
    Torsor { path: PathBuf },
    /// Compares `W̄ₙ K(Ãₙ, m)` with `K(Ãₙ₋₁, m+1)` for the module in `coeff`
    EmCheck { n: usize, m: usize, coeff: PathBuf },
    /// Applies `W̄₁` (simplicial module), `W̄₂` or `W̄ₙ` (simplicial document)
    Wbar { path: PathBuf, kind: WbarKind },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum WbarKind {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "n")]
    N,
}

/// A rendered result; `ok = false` exits with the validation code.
pub struct Output {
    pub json: Value,
    pub text: String,
    pub ok: bool,
}

impl Output {
    fn ok(json: Value, text: String) -> Output {
        Output { json, text, ok: true }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Text => self.text.clone(),
        }
    }
}

/// Runs the command line and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 5 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let text = out.render(cli.format);
            let written = match &cli.out {
                Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match (written, out.ok) {
                (Err(e), _) => {
                    eprintln!("error: {e}");
                    5
                }
                (Ok(()), true) => 0,
                (Ok(()), false) => 2,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Validate { path } => cmd_validate(path),
        Command::Pi { path } => cmd_pi(path, stage(cli)?),
        Command::Tower { path } => cmd_tower(path),
        Command::Fiber { path } => {
            let x = cli.object.as_deref().ok_or_else(|| Error::Range("fiber needs --object".into()))?;
            cmd_fiber(path, stage(cli)?, x)
        }
        Command::Extension { path } => cmd_extension(path, stage(cli)?),
        Command::Torsor { path } => cmd_torsor(path, stage(cli)?),
        Command::EmCheck { n, m, coeff } => cmd_em_check(*n, *m, coeff),
        Command::Wbar { path, kind } => cmd_wbar(path, *kind, cli.trunc),
    }
}

fn stage(cli: &Cli) -> Result<usize> {
    cli.stage.ok_or_else(|| Error::Range("this command needs --stage".into()))
}

fn load(path: &Path) -> Result<Object> {
    io::load(path).map_err(|e| match e {
        Error::Parse { line, column, msg } => Error::Parse {
            line,
            column,
            msg: format!("{}: {msg}", path.display()),
        },
        e => e,
    })
}

fn load_complex(path: &Path) -> Result<CrossedComplex> {
    load(path)?.into_complex()
}

fn report_json(r: &Report) -> Value {
    json!({
        "ok": r.ok(),
        "checks": r.checks.iter().map(|c| json!({"name": c.name, "ok": c.ok, "detail": c.detail})).collect::<Vec<_>>(),
    })
}

fn report_text(r: &Report) -> String {
    let mut s = String::new();
    for c in &r.checks {
        let mark = if c.ok { "pass" } else { "FAIL" };
        if c.detail.is_empty() {
            s.push_str(&format!("{mark} {}\n", c.name));
        } else {
            s.push_str(&format!("{mark} {}: {}\n", c.name, c.detail));
        }
    }
    s
}

fn kind_name(o: &Object) -> &'static str {
    match o {
        Object::Groupoid(_) => "groupoid",
        Object::Module(_) => "module",
        Object::CrossedModule(_) => "crossed_module",
        Object::Complex(_) => "complex",
        Object::SimplicialModule(_) => "simplicial_module",
        Object::Simplicial(_) => "simplicial",
    }
}

pub fn cmd_validate(path: &Path) -> Result<Output> {
    match load(path) {
        Ok(o) => {
            let kind = kind_name(&o);
            Ok(Output::ok(json!({"valid": true, "kind": kind}), format!("valid {kind}\n")))
        }
        Err(Error::Invalid(msg)) => Ok(Output {
            json: json!({"valid": false, "violation": msg}),
            text: format!("invalid: {msg}\n"),
            ok: false,
        }),
        Err(e) => Err(e),
    }
}

/// Object names and group descriptions of `πₙ`.
fn homotopy_entries(c: &CrossedComplex, n: usize) -> Result<Vec<(String, String)>> {
    let h = c.homotopy_group(n)?;
    let names: Vec<String> = match &h {
        HomotopyGroup::Components(comp) => {
            let g = c.base();
            comp.blocks
                .iter()
                .map(|b| b.iter().map(|&x| g.objects()[x].clone()).collect::<Vec<_>>().join(","))
                .collect()
        }
        HomotopyGroup::Groupoid(p, _) => p.objects().to_vec(),
        HomotopyGroup::Module(m) => m.base().objects().to_vec(),
    };
    let values = match &h {
        HomotopyGroup::Components(comp) => vec!["•".to_string(); comp.blocks.len()],
        _ => h.describe(),
    };
    Ok(names.into_iter().zip(values).collect())
}

fn entries_text(e: &[(String, String)]) -> String {
    if e.len() == 1 {
        return format!("{}\n", e[0].1);
    }
    e.iter().map(|(x, v)| format!("{x}: {v}\n")).collect()
}

pub fn cmd_pi(path: &Path, n: usize) -> Result<Output> {
    let c = load_complex(path)?;
    if n > c.rank() + 1 {
        return Err(Error::Range(format!("n = {n} exceeds rank + 1 = {}", c.rank() + 1)));
    }
    let e = homotopy_entries(&c, n)?;
    let json = json!({
        "n": n,
        "groups": e.iter().map(|(x, v)| json!({"at": x, "group": v})).collect::<Vec<_>>(),
    });
    Ok(Output::ok(json, entries_text(&e)))
}

fn all_homotopy(c: &CrossedComplex) -> Result<Vec<Vec<(String, String)>>> {
    (0..=c.rank() + 1).map(|n| homotopy_entries(c, n)).collect()
}

fn homotopy_line(h: &[Vec<(String, String)>]) -> String {
    h.iter()
        .enumerate()
        .map(|(n, e)| {
            let vs: Vec<&str> = e.iter().map(|(_, v)| v.as_str()).collect();
            format!("pi{n}=[{}]", vs.join(", "))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn homotopy_json(h: &[Vec<(String, String)>]) -> Value {
    Value::Array(
        h.iter()
            .map(|e| Value::Array(e.iter().map(|(x, v)| json!({"at": x, "group": v})).collect()))
            .collect(),
    )
}

pub fn cmd_tower(path: &Path) -> Result<Output> {
    let c = load_complex(path)?;
    let t = crs::tower(&c)?;
    let r = crs::check_tower(&c, &t)?;
    let mut text = String::new();
    let mut stages = Vec::new();
    for (n, p) in t.stages.iter().enumerate() {
        let h = all_homotopy(p)?;
        text.push_str(&format!("stage {n}: {}\n", homotopy_line(&h)));
        stages.push(json!({
            "n": n,
            "homotopy": homotopy_json(&h),
            "complex": io::complex_json(p),
        }));
    }
    for (n, ok) in r.fibrations.iter().enumerate() {
        text.push_str(&format!("eta{} fibration: {ok}\n", n + 1));
    }
    text.push_str(&format!("morphisms valid: {}\n", r.morphisms_valid));
    text.push_str(&format!("limit reconstructs input: {}\n", r.limit));
    let json = json!({
        "stages": stages,
        "fibrations": r.fibrations,
        "matches_reflect": r.matches_reflect,
        "idempotent": r.idempotent,
        "morphisms_valid": r.morphisms_valid,
        "limit": r.limit,
        "ok": r.ok(),
    });
    Ok(Output { json, text, ok: r.ok() })
}

pub fn cmd_fiber(path: &Path, n: usize, x: &str) -> Result<Output> {
    let c = load_complex(path)?;
    let xi = c.base().object_index(x)?;
    let f = crs::fiber(&c, n, xi)?;
    let mut text = format!("fiber of eta{} over {x}\n", n + 1);
    for (k, h) in f.homotopy.iter().enumerate() {
        text.push_str(&format!("pi{k} = {}\n", h.join(", ")));
    }
    text.push_str(&format!("concentrated in degree {}: {}\n", n + 1, f.concentrated));
    text.push_str(&format!("matches pi{} of the input: {}\n", n + 1, f.matches));
    let json = json!({
        "stage": n,
        "object": x,
        "homotopy": f.homotopy,
        "concentrated": f.concentrated,
        "matches": f.matches,
        "complex": io::complex_json(&f.complex),
    });
    Ok(Output {
        json,
        text,
        ok: f.concentrated && f.matches,
    })
}

fn per_object<T: serde::Serialize>(g: &crate::groupoid::FiniteGroupoid, v: &[T]) -> Value {
    let m: serde_json::Map<String, Value> = g
        .objects()
        .iter()
        .zip(v)
        .map(|(x, t)| (x.clone(), serde_json::to_value(t).expect("serializes")))
        .collect();
    Value::Object(m)
}

fn mats_value(g: &crate::groupoid::FiniteGroupoid, h: &crate::coefficients::ModHom) -> Value {
    per_object(g, &h.mats.iter().map(|m| m.to_rows()).collect::<Vec<_>>())
}

fn extension_json(e: &ext_torsor::TwoExtension) -> Result<Value> {
    let g = e.base.base().clone();
    let body = match &e.body {
        Body::Groupoid { fiber, kernel } => {
            let fg = fiber.base();
            json!({
                "fiber": io::crossed_module_json(fiber),
                "kernel": per_object(fg, &kernel.iter().map(|k| k.gens.clone()).collect::<Vec<_>>()),
            })
        }
        Body::CrossedModule {
            target,
            e0,
            e1,
            sigma,
            tau,
            j,
        } => {
            let cg = target.base();
            json!({
                "target": io::crossed_module_json(target),
                "e0": io::ggroup_json(e0),
                "e1": io::module_json(e1),
                "sigma": per_object(cg, sigma),
                "tau": per_object(cg, tau),
                "j": mats_value(cg, j),
                "middle": io::complex_json(&e.complex()?),
            })
        }
        Body::Complex { e0, e1, sigma, tau, j } => json!({
            "e0": io::module_json(e0),
            "e1": io::module_json(e1),
            "sigma": mats_value(&g, sigma),
            "tau": mats_value(&g, tau),
            "j": mats_value(&g, j),
            "middle": io::complex_json(&e.complex()?),
        }),
    };
    Ok(json!({
        "stage": e.n,
        "base": io::complex_json(&e.base),
        "coefficients": io::document(&Object::Module(e.coeff.clone())),
        "a": io::module_json(&e.a),
        "sequence": body,
    }))
}

pub fn cmd_extension(path: &Path, n: usize) -> Result<Output> {
    let c = load_complex(path)?;
    let e = ext_torsor::extension_from_tower(&c, n)?;
    let r = ext_torsor::validate_extension(&e);
    let mut text = format!("extension at stage {n}\ncoefficients: {}\n", e.coeff.describe().join(", "));
    text.push_str(&report_text(&r));
    let mut json = extension_json(&e)?;
    json["report"] = report_json(&r);
    Ok(Output { json, text, ok: r.ok() })
}

pub fn cmd_torsor(path: &Path, n: usize) -> Result<Output> {
    let c = load_complex(path)?;
    let e = ext_torsor::extension_from_tower(&c, n)?;
    let t = ext_torsor::torsor_from_extension(&e)?;
    let r = ext_torsor::validate_torsor(&t);
    let split = ext_torsor::is_u_split(&t);
    let end = ext_torsor::endomorphism_object(&t)?;
    let components = ext_torsor::fiber_components_match(&t)?;
    let fiber = match &t.fiber {
        FiberGroupoid::TwoGroupoid(_) => "2-groupoid",
        FiberGroupoid::Internal(_) => "internal groupoid",
        FiberGroupoid::Implicit => "implicit",
    };
    let mut text = format!("torsor at stage {n}\nfiber: {fiber}\n");
    text.push_str(&report_text(&r));
    text.push_str(&format!("u-split: {split}\n"));
    text.push_str(&format!(
        "endomorphisms: [{}] expected [{}] iso: {}\n",
        end.computed.join(", "),
        end.expected.join(", "),
        end.iso
    ));
    text.push_str(&format!("components of the fiber match the base: {components}\n"));
    let ok = r.ok() && split && end.iso && components;
    let json = json!({
        "stage": n,
        "fiber": fiber,
        "places": t.num_places(),
        "exhaustive": t.exhaustive(),
        "axioms": report_json(&r),
        "u_split": split,
        "endomorphisms": {"computed": end.computed, "expected": end.expected, "iso": end.iso},
        "components_match": components,
        "ok": ok,
    });
    Ok(Output { json, text, ok })
}

pub fn cmd_em_check(n: usize, m: usize, coeff: &Path) -> Result<Output> {
    let a = match load(coeff)? {
        Object::Module(a) => a,
        _ => return Err(Error::Range("em-check needs a module document".into())),
    };
    let r = simplicial::check_em_ladder(n, &a, m)?;
    let text = format!("ladder n={n} m={m}\n{}", report_text(&r));
    let json = json!({"n": n, "m": m, "report": report_json(&r)});
    Ok(Output { json, text, ok: r.ok() })
}

fn truncate_module(s: &SimplicialModule, l: usize) -> Result<SimplicialModule> {
    if l > s.top() {
        return Err(Error::Range(format!("truncation {l} is above the top level {}", s.top())));
    }
    Ok(SimplicialModule {
        levels: s.levels[..=l].to_vec(),
        faces: s.faces[..=l].to_vec(),
        degens: s.degens[..l].to_vec(),
    })
}

fn levels_json(levels: &[crate::coefficients::GModule]) -> Value {
    Value::Array(levels.iter().map(|l| json!(l.describe())).collect())
}

fn levels_text(levels: &[crate::coefficients::GModule]) -> String {
    levels
        .iter()
        .enumerate()
        .map(|(k, l)| format!("level {k}: {}\n", l.describe().join(", ")))
        .collect()
}

fn violations_out(mut json: Value, mut text: String, v: Vec<String>) -> Output {
    for s in &v {
        text.push_str(&format!("violation: {s}\n"));
    }
    text.push_str(&format!("simplicial identities: {}\n", v.is_empty()));
    json["violations"] = json!(v);
    Output {
        json,
        text,
        ok: v.is_empty(),
    }
}

pub fn cmd_wbar(path: &Path, kind: WbarKind, trunc: Option<usize>) -> Result<Output> {
    let o = load(path)?;
    match (kind, o) {
        (WbarKind::One, Object::SimplicialModule(m)) => {
            let m = match trunc {
                Some(l) => truncate_module(&m, l)?,
                None => m,
            };
            let w = Wbar1::new(SimplicialGroupoid::from_module(&m));
            let counts = w.counts();
            let mut text = String::new();
            for (k, c) in counts.iter().enumerate() {
                match c {
                    Some(c) => text.push_str(&format!("level {k}: {c} simplices\n")),
                    None => text.push_str(&format!("level {k}: infinite\n")),
                }
            }
            let json = json!({"top": w.top(), "counts": counts});
            Ok(violations_out(json, text, w.identity_violations()))
        }
        (WbarKind::Two | WbarKind::N, Object::Simplicial(s)) => {
            let s = match trunc {
                Some(l) => SimplicialCrs::new(s.n, s.tail.clone(), truncate_module(&s.head, l)?, s.aug.clone())?,
                None => s,
            };
            match (kind, s.n) {
                (WbarKind::Two, 2) => {
                    let g = simplicial::wbar2(&s)?;
                    let counts: Vec<Vec<Option<u64>>> = (0..=g.top())
                        .map(|k| (0..g.base().num_objects()).map(|x| g.vertex_count(k, x)).collect())
                        .collect();
                    let mut text = format!("twisted: {}\n", g.is_twisted());
                    text.push_str(&levels_text(&g.levels));
                    let json = json!({
                        "top": g.top(),
                        "twisted": g.is_twisted(),
                        "levels": levels_json(&g.levels),
                        "vertex_counts": per_level_counts(&counts),
                    });
                    Ok(violations_out(json, text, g.violations()))
                }
                (WbarKind::N, n) if n >= 3 => {
                    let w = simplicial::wbar(&s)?;
                    let doc = Object::Simplicial(w);
                    Ok(Output::ok(
                        serde_json::to_value(io::document(&doc)).expect("serializes"),
                        io::to_string(&doc),
                    ))
                }
                _ => Err(Error::Range(format!("wbar kind does not apply to n = {}", s.n))),
            }
        }
        _ => Err(Error::Range(
            "wbar 1 takes a simplicial module; wbar 2 and wbar n take a simplicial document".into(),
        )),
    }
}

fn per_level_counts(c: &[Vec<Option<u64>>]) -> Value {
    json!(c)
}
