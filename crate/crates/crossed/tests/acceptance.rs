//! Acceptance suite: one pass/fail line per criterion, with timings.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use crossed::abelian::FgAbelian;
use crossed::coefficients::GModule;
use crossed::crs::{self, Boundary, Cell, CrossedComplex, Level};
use crossed::ext_torsor as et;
use crossed::fixtures;
use crossed::internal_gpd::{check_crs_gpd, check_gpd_crs, check_pi0, gpd_n};
use crossed::io::{self, Object};
use crossed::linalg::Mat;
use crossed::simplicial as sp;
use crossed::xmod::{self, check_crossed, peiffer_quotient, precrossed_homs, FreePreCrossedModule};

use common::*;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn all_complex_fixtures() -> Vec<(&'static str, CrossedComplex)> {
    fixtures::GROUPOIDS
        .iter()
        .chain(&fixtures::CROSSED_MODULES)
        .chain(&fixtures::COMPLEXES)
        .map(|&n| (n, fixtures::complex(n).unwrap()))
        .collect()
}

fn criterion_1() -> Outcome {
    for stem in fixtures::GROUPOIDS.iter().chain(&fixtures::CROSSED_MODULES).chain(&fixtures::COMPLEXES) {
        let c = load_fixture(stem).into_complex().map_err(e2s)?;
        c.validate().map_err(e2s)?;
        ensure(c.same_as(&fixtures::complex(stem).unwrap()), || format!("{stem}.json differs from its constructor"))?;
    }
    let cc4 = load_fixture("cc4").into_complex().map_err(e2s)?;
    let h = cc4.describe_homotopy().map_err(e2s)?;
    ensure(pi0_oracle(&cc4) == 1 && h[0].len() == 1, || format!("pi0 {:?}", h[0]))?;
    ensure(h[1] == ["Z/2"] && pi1_order_oracle(&cc4, 0) == 2, || format!("pi1 {:?}", h[1]))?;
    ensure(h[2] == ["Z/2"] && pi2_oracle(&cc4, 0) == profile_of_description("Z/2"), || format!("pi2 {:?}", h[2]))?;
    // ×2: Z -> Z/4 has kernel 2Z, so the top group of CC4 is Z; with a Z/2 top it is 0
    ensure(h[3] == ["Z^1"] && pi3_oracle(&cc4, 0).is_none(), || format!("pi3(CC4) {:?}", h[3]))?;
    let cc4t = load_fixture("cc4t").into_complex().map_err(e2s)?;
    let ht = cc4t.describe_homotopy().map_err(e2s)?;
    ensure(ht[3] == ["0"] && pi3_oracle(&cc4t, 0) == profile_of_description("0"), || format!("pi3(CC4t) {:?}", ht[3]))?;
    ensure(ht[..3] == h[..3], || "CC4t differs below dimension 3".into())?;
    // every finite fixture against the oracles
    for (name, c) in all_complex_fixtures() {
        let h = c.describe_homotopy().map_err(e2s)?;
        ensure(pi0_oracle(&c) == h[0].len(), || format!("{name}: pi0"))?;
        if c.rank() >= 2 {
            for x in 0..c.base().num_objects() {
                ensure(pi2_oracle(&c, x) == profile_of_description(&h[2][0]), || format!("{name}: pi2 {:?}", h[2]))?;
                if c.rank() >= 3 {
                    let want = profile_of_description(&h[3][0]);
                    ensure(pi3_oracle(&c, x) == want, || format!("{name}: pi3 {:?}", h[3]))?;
                }
            }
        }
    }
    Ok("CC4: pi0=• pi1=Z/2 pi2=Z/2 pi3=Z (kernel 2Z of ×2); CC4t: pi3=0; oracles agree on all fixtures".into())
}

fn criterion_2() -> Outcome {
    let mut fibers = 0;
    for (name, c) in all_complex_fixtures() {
        let t = crs::tower(&c).map_err(e2s)?;
        let r = crs::check_tower(&c, &t).map_err(e2s)?;
        ensure(r.ok(), || format!("{name}: {r:?}"))?;
        for n in 0..c.rank() {
            for x in 0..c.base().num_objects() {
                let f = crs::fiber(&c, n, x).map_err(e2s)?;
                ensure(f.concentrated && f.matches, || format!("{name}: fiber of eta{} at {x}: {:?}", n + 1, f.homotopy))?;
                fibers += 1;
            }
        }
    }
    Ok(format!("all towers fibrant with limit recovered; {fibers} fibers concentrated"))
}

fn criterion_3() -> Outcome {
    for stem in fixtures::CROSSED_MODULES {
        let c = fixtures::complex(stem).unwrap();
        let m = c.xm();
        ensure(xmod::check_roundtrip_xm(m).map_err(e2s)?, || format!("{stem}: xm -> gpd -> xm"))?;
        let g = xmod::gpd_of_xm(m).map_err(e2s)?;
        ensure(xmod::check_roundtrip_gpd(&g).map_err(e2s)?, || format!("{stem}: gpd -> xm -> gpd"))?;
    }
    for stem in fixtures::COMPLEXES {
        let c = fixtures::complex(stem).unwrap();
        let n = c.rank() - 1;
        ensure(check_crs_gpd(&c, n).map_err(e2s)?, || format!("{stem}: crs_n gpd_n"))?;
        let g = gpd_n(&c, n).map_err(e2s)?;
        ensure(check_gpd_crs(&g).map_err(e2s)?, || format!("{stem}: gpd_n crs_n"))?;
        ensure(check_pi0(&g).map_err(e2s)?, || format!("{stem}: P_n i_(n+1) vs pi0 gpd_n"))?;
    }
    Ok("3 crossed modules both ways; cc4, cc4t, s3x, r4 through gpd_n".into())
}

fn criterion_4() -> Outcome {
    let (mut runs, mut exhaustive) = (0, 0);
    for (name, c) in all_complex_fixtures() {
        for n in 1..=c.rank().max(1) {
            let e = et::extension_from_tower(&c, n).map_err(e2s)?;
            let r = et::validate_extension(&e);
            ensure(r.ok(), || format!("{name} stage {n}: {:?}", r.failures()))?;
            let t = et::torsor_from_extension(&e).map_err(e2s)?;
            let v = et::validate_torsor(&t);
            ensure(v.ok(), || format!("{name} stage {n}: {:?}", v.failures()))?;
            ensure(et::is_u_split(&t), || format!("{name} stage {n}: not u-split"))?;
            let end = et::endomorphism_object(&t).map_err(e2s)?;
            ensure(end.iso, || format!("{name} stage {n}: {end:?}"))?;
            runs += 1;
            if t.exhaustive() {
                exhaustive += 1;
            }
        }
    }
    Ok(format!(
        "{runs} stage runs; {exhaustive} checked exhaustively, the rest (free levels) on generators and samples"
    ))
}

fn criterion_5() -> Outcome {
    let mut pairs = 0;
    let mut sources = 0;
    for base in [cyclic_base(2), cyclic_base(3), cyclic_base(4)] {
        let targets = xmod::crossed_modules_over(&base, 8);
        for p in precrossed_over(&base, 6) {
            let (q, _) = peiffer_quotient(&p).map_err(e2s)?;
            ensure(check_crossed(q.pre()).0, || "quotient fails the Peiffer identity".into())?;
            let (q2, proj) = peiffer_quotient(q.pre()).map_err(e2s)?;
            let identity = proj.iter().all(|m| m.iter().enumerate().all(|(u, &v)| u == v));
            ensure(identity && q2.c().group(0).order() == q.c().group(0).order(), || "not idempotent".into())?;
            for t in &targets {
                let via = precrossed_homs(q.pre(), t.pre()).len();
                let direct = precrossed_homs(&p, t.pre()).len();
                ensure(via == direct, || format!("Hom counts {via} vs {direct}"))?;
                pairs += 1;
            }
            sources += 1;
        }
    }
    Ok(format!("{sources} pre-crossed sources, {pairs} Hom counts against targets of order <= 8"))
}

/// Rank 3 extensions of a crossed module with a constant top of order <= 8.
fn rank3_targets(low: &CrossedComplex) -> Vec<CrossedComplex> {
    let g = low.base().clone();
    let c2 = low.c2().group(0);
    let mut out = Vec::new();
    for top in small_modules() {
        let gens = top.rank();
        let mut imgs = vec![0usize; gens];
        loop {
            let level = Level {
                module: GModule::constant(g.clone(), &top),
                boundary: Boundary::IntoGroup(vec![imgs.clone()]),
            };
            if let Ok(d) = CrossedComplex::new(low.xm().clone(), vec![level], 3) {
                out.push(d);
            }
            if !bump(&mut imgs, c2.order()) {
                break;
            }
        }
    }
    out
}

/// Rank 4 extensions of a rank 3 complex with a constant top of order <= 8.
fn rank4_targets(low: &CrossedComplex) -> Vec<CrossedComplex> {
    let g = low.base().clone();
    let c3 = low.module(3).unwrap().value(0).clone();
    let bound = c3.order().unwrap() as usize;
    let mut out = Vec::new();
    for top in small_modules() {
        let mut entries = vec![0usize; c3.rank() * top.rank()];
        loop {
            let rows: Vec<Vec<i64>> = (0..c3.rank())
                .map(|r| (0..top.rank()).map(|k| entries[r * top.rank() + k] as i64).collect())
                .collect();
            let mut higher = low.higher().to_vec();
            higher.push(Level {
                module: GModule::constant(g.clone(), &top),
                boundary: Boundary::Module(crossed::coefficients::ModHom {
                    mats: vec![Mat::from_rows(&rows, top.rank())],
                }),
            });
            if let Ok(d) = CrossedComplex::new(low.xm().clone(), higher, 4) {
                out.push(d);
            }
            if !bump(&mut entries, bound) {
                break;
            }
        }
    }
    out
}

fn small_modules() -> Vec<FgAbelian> {
    let mut v: Vec<FgAbelian> = (2..=8).map(FgAbelian::cyclic).collect();
    let (z2, z4) = (FgAbelian::cyclic(2), FgAbelian::cyclic(4));
    v.push(FgAbelian::direct_sum(&[&z2, &z2]));
    v.push(FgAbelian::direct_sum(&[&z2, &z4]));
    v.push(FgAbelian::direct_sum(&[&z2, &z2, &z2]));
    v
}

fn bump(v: &mut [usize], base: usize) -> bool {
    for d in v.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn criterion_6() -> Outcome {
    let mut checks = 0;
    for base in [cyclic_base(2), cyclic_base(4)] {
        let targets = precrossed_over(&base, 8);
        let ends: Vec<usize> = base.hom(0, 0).to_vec();
        let mut xs: Vec<Vec<usize>> = ends.iter().map(|&a| vec![a]).collect();
        for &a in &ends {
            for &b in &ends {
                xs.push(vec![a, b]);
            }
        }
        for f in &xs {
            let free = FreePreCrossedModule::new(base.clone(), f.clone()).map_err(e2s)?;
            for t in &targets {
                let (a, b) = (free.transpose_count(t), free.brute_force_hom_count(t));
                ensure(a == b, || format!("free pre-crossed on {f:?}: {a} vs {b}"))?;
                checks += 1;
            }
        }
    }
    for stem in fixtures::CROSSED_MODULES {
        let low = fixtures::complex(stem).unwrap();
        let grp = low.c2().group(0);
        let cycles: Vec<usize> = (0..grp.order()).filter(|&u| low.base().is_identity(low.xm().delta(0, u))).collect();
        let mut xs: Vec<Vec<(usize, Cell)>> = cycles.iter().map(|&a| vec![(0, Cell::Group(a))]).collect();
        for &a in &cycles {
            for &b in &cycles {
                xs.push(vec![(0, Cell::Group(a)), (0, Cell::Group(b))]);
            }
        }
        let targets = rank3_targets(&low);
        for x in &xs {
            let f = crs::free_ncrs(&low, x).map_err(e2s)?;
            for d in &targets {
                let (a, b) = (f.transpose_count(d).map_err(e2s)?, f.brute_force_hom_count(d).map_err(e2s)?);
                ensure(a == b, || format!("{stem} free 3-crossed on {x:?}: {a} vs {b}"))?;
                checks += 1;
            }
        }
    }
    for stem in ["cc4t", "s3x"] {
        let low = fixtures::complex(stem).unwrap();
        let m3 = low.module(3).unwrap().value(0).clone();
        let cycles: Vec<Vec<i64>> = m3
            .elements()
            .unwrap()
            .into_iter()
            .filter(|v| low.c2().group(0).identity() == low.d3(0, v))
            .collect();
        let mut xs: Vec<Vec<(usize, Cell)>> = cycles.iter().map(|v| vec![(0, Cell::Vector(v.clone()))]).collect();
        for a in &cycles {
            for b in &cycles {
                xs.push(vec![(0, Cell::Vector(a.clone())), (0, Cell::Vector(b.clone()))]);
            }
        }
        let targets = rank4_targets(&low);
        for x in &xs {
            let f = crs::free_ncrs(&low, x).map_err(e2s)?;
            for d in &targets {
                let (a, b) = (f.transpose_count(d).map_err(e2s)?, f.brute_force_hom_count(d).map_err(e2s)?);
                ensure(a == b, || format!("{stem} free 4-crossed on {x:?}: {a} vs {b}"))?;
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} transpose counts equal brute-force Hom counts"))
}

fn criterion_7() -> Outcome {
    let grid = fixtures::coefficient_grid();
    let mut ladders = 0;
    for (name, a) in &grid {
        for n in 2..=4 {
            for m in 1..=2 {
                let r = sp::check_em_ladder(n, a, m).map_err(e2s)?;
                ensure(r.ok(), || format!("{name} n={n} m={m}: {:?}", r.failures()))?;
                ladders += 1;
            }
        }
    }
    let mut comparisons = 0;
    for (name, a) in &grid {
        for n in 1..=2 {
            let r = sp::wbar1_em_vs_l(a, n).map_err(e2s)?;
            ensure(r.ok(), || format!("{name} n={n}: {:?}", r.failures()))?;
            comparisons += 1;
        }
    }
    let mut transported = 0;
    for (name, a) in &grid {
        if !name.ends_with("_Z2") {
            continue;
        }
        for n in 2..=4 {
            let s = sp::SimplicialCrs::em(n, a, 1, 2).map_err(e2s)?;
            for h in sp::generate_homotopies(&s.head, &s.head, 4).map_err(e2s)? {
                let t = sp::transport_homotopy(&s, &s, &h).map_err(e2s)?;
                ensure(t.report.ok(), || format!("{name} n={n}: {:?}", t.report.failures()))?;
                transported += 1;
            }
        }
    }
    ensure(transported >= 10, || format!("only {transported} homotopies generated"))?;
    let mut loops = 0;
    for (name, a) in &grid {
        let s = sp::SimplicialCrs::em(4, a, 1, 3).map_err(e2s)?;
        let r = sp::check_loop_wbar(&s).map_err(e2s)?;
        ensure(r.ok(), || format!("{name}: {:?}", r.failures()))?;
        loops += 1;
    }
    Ok(format!(
        "{ladders} ladder cells, {comparisons} L comparisons, {transported} transported homotopies, {loops} loop round trips"
    ))
}

/// Every CLI invocation on the fixture set.
fn cli_invocations() -> Vec<Vec<String>> {
    let dir = fixture_dir();
    let path = |s: &str| dir.join(format!("{s}.json")).display().to_string();
    let mut out = Vec::new();
    for (stem, obj) in fixtures::documents() {
        out.push(vec!["validate".into(), path(&stem)]);
        let Ok(c) = obj.into_complex() else {
            continue;
        };
        for n in 0..=c.rank() + 1 {
            out.push(vec!["pi".into(), path(&stem), "--stage".into(), n.to_string()]);
        }
        out.push(vec!["tower".into(), path(&stem)]);
        for n in 0..c.rank() {
            for x in c.base().objects() {
                out.push(vec!["fiber".into(), path(&stem), "--stage".into(), n.to_string(), "--object".into(), x.clone()]);
            }
        }
        for n in 1..=c.rank().max(1) {
            out.push(vec!["extension".into(), path(&stem), "--stage".into(), n.to_string()]);
            out.push(vec!["torsor".into(), path(&stem), "--stage".into(), n.to_string()]);
        }
    }
    for (stem, _) in fixtures::coefficient_grid() {
        for n in 2..=4 {
            out.push(vec!["em-check".into(), n.to_string(), "1".into(), path(&stem)]);
        }
    }
    out.push(vec!["wbar".into(), path("k_z2_m2"), "1".into()]);
    out.push(vec!["wbar".into(), path("k_z2_m2"), "1".into(), "--trunc".into(), "2".into()]);
    out.push(vec!["wbar".into(), path("em2_z2_m1"), "2".into()]);
    for s in ["em3_z2_m1", "em4_z2_m1", "em3_z_m1"] {
        out.push(vec!["wbar".into(), path(s), "n".into()]);
    }
    out
}

fn run_ck(args: &[String]) -> (Option<i32>, Vec<u8>, Vec<u8>) {
    let o = Command::new(env!("CARGO_BIN_EXE_ck")).args(args).output().expect("ck runs");
    (o.status.code(), o.stdout, o.stderr)
}

fn criterion_8() -> Outcome {
    let mut runs = 0;
    for args in cli_invocations() {
        for format in ["text", "json"] {
            let mut a = args.clone();
            a.extend(["--format".to_string(), format.to_string()]);
            let first = run_ck(&a);
            let second = run_ck(&a);
            ensure(first == second, || format!("ck {} differs between runs", a.join(" ")))?;
            ensure(first.0 == Some(0), || {
                format!("ck {} exited {:?}: {}", a.join(" "), first.0, String::from_utf8_lossy(&first.2))
            })?;
            runs += 1;
        }
    }
    // emitted objects parse back
    let out = run_ck(&["wbar".into(), fixture_dir().join("em4_z2_m1.json").display().to_string(), "n".into()]);
    let obj = io::parse(&String::from_utf8(out.1).map_err(e2s)?).map_err(e2s)?;
    ensure(matches!(obj, Object::Simplicial(_)), || "wbar output is not a simplicial document".into())?;
    Ok(format!("{runs} invocations byte-identical across two runs"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("fixtures and homotopy groups", criterion_1, Duration::from_secs(1)),
        ("Postnikov towers and fibers", criterion_2, Duration::from_secs(1)),
        ("round-trip isomorphisms", criterion_3, Duration::from_secs(1)),
        ("extensions and torsors", criterion_4, Duration::from_secs(5)),
        ("Peiffer quotient", criterion_5, Duration::from_secs(5)),
        ("free functor adjunctions", criterion_6, Duration::from_secs(5)),
        ("simplicial ladder", criterion_7, Duration::from_secs(30)),
        ("CLI determinism", criterion_8, Duration::MAX),
    ];
    let optimized = !cfg!(debug_assertions);
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let timing = if *budget == Duration::MAX {
            format!("{took:.2?}")
        } else {
            format!("{took:.2?} of {budget:?}")
        };
        // timing budgets apply to optimized builds
        let late = optimized && took > *budget;
        match (&result, late) {
            (Ok(detail), false) => println!("criterion {}: PASS {name}: {detail} [{timing}]", i + 1),
            (Ok(detail), true) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: over budget: {detail} [{timing}]", i + 1)
            }
            (Err(e), _) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {e} [{timing}]", i + 1)
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
