//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use extlab_cli::suites;
use extlab_core::cache::{encode_resolution, ResolutionCache};
use extlab_core::module::{a_mod_sq1, free_module, GradedModule};
use extlab_core::resolve::minimal_resolution;
use extlab_core::scenario::{
    build_scenario, compare_projection_filtration, kernel_image_lemma_check, ScenarioKind, ScenarioResult, ScenarioSpec,
};
use extlab_core::steenrod::AlgebraTable;
use extlab_oracle::{ext_dims, CyclicModule};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
}

fn run(c: Criterion, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    let elapsed = start.elapsed();
    let outcome = outcome.and_then(|d| {
        if elapsed <= c.budget {
            Ok(d)
        } else {
            Err(format!("took {elapsed:.1?}, budget {:?}", c.budget))
        }
    });
    match &outcome {
        Ok(d) => println!("criterion {} PASS {} ({d}; {elapsed:.1?})", c.id, c.name),
        Err(d) => println!("criterion {} FAIL {} ({d}; {elapsed:.1?})", c.id, c.name),
    }
    outcome.is_ok()
}

fn classes(r: &ScenarioResult) -> Result<Vec<(usize, usize, usize)>, String> {
    let e3 = r
        .e3
        .as_ref()
        .ok_or_else(|| format!("{}: hypothesis on beta fails: {:?}", r.spec.kind, r.hypothesis.violations))?;
    Ok(e3.entries.iter().map(|e| (e.stem, e.filtration, e.dim)).collect())
}

fn scenario(table: &AlgebraTable, kind: ScenarioKind, max_s: usize, max_t: usize) -> Result<ScenarioResult, String> {
    build_scenario(table, &ScenarioSpec::new(kind, max_s, max_t), None).map_err(err)
}

fn ext_f2(table: &AlgebraTable) -> Outcome {
    let r = minimal_resolution(table, Arc::new(GradedModule::f2(20)), 8, 20).map_err(err)?;
    r.verify().map_err(err)?;
    let chart = r.ext_chart();
    let oracle = ext_dims(CyclicModule::F2, 8, 20);
    for s in 0..=8 {
        for t in 0..=20 {
            ensure(chart.get(s, t) == oracle[s][t], || {
                format!("({s},{t}): found {}, oracle {}", chart.get(s, t), oracle[s][t])
            })?;
        }
    }
    for t in 0..=20 {
        let want = usize::from([1, 2, 4, 8, 16].contains(&t));
        ensure(chart.get(1, t) == want, || format!("Ext^(1,{t}) = {}", chart.get(1, t)))?;
    }
    Ok("189 bidegrees equal the oracle; h_j at t = 1, 2, 4, 8, 16".into())
}

fn ext_a_mod_sq1(table: &AlgebraTable) -> Outcome {
    let q = a_mod_sq1(table, 24).map_err(err)?;
    let r = minimal_resolution(table, q.module, 10, 24).map_err(err)?;
    let chart = r.ext_chart();
    let oracle = ext_dims(CyclicModule::AModSq1, 10, 24);
    for s in 0..=10 {
        for t in 0..=24 {
            let want = usize::from(s == t);
            ensure(chart.get(s, t) == want && oracle[s][t] == want, || {
                format!("({s},{t}): found {}, oracle {}", chart.get(s, t), oracle[s][t])
            })?;
        }
    }
    Ok("h0 tower only, s <= 10, t <= 24".into())
}

fn fn_family(table: &AlgebraTable) -> Outcome {
    let mut checked = 0;
    for n in [1, 2, 3, 4, 6] {
        let start = Instant::now();
        let r = scenario(table, ScenarioKind::Fn(n), 8, n + 14)?;
        let (ws, wt) = r.spec.window();
        for s in 0..=ws {
            for t in 0..=wt {
                let m = r.beta.matrix(s, t);
                ensure(m.rows() == m.cols() && r.beta.rank(s, t) == m.cols(), || {
                    format!("n={n}: beta at ({s},{t}) is {}x{} of rank {}", m.rows(), m.cols(), r.beta.rank(s, t))
                })?;
                checked += 1;
            }
        }
        let got = classes(&r)?;
        ensure(got == [(0, 0, 1), (n - 1, 1, 1)], || format!("n={n}: E3 = {got:?}"))?;
        ensure(start.elapsed() < Duration::from_secs(120), || format!("n={n} too slow"))?;
    }
    Ok(format!("beta bijective in {checked} bidegrees; E3 = {{(0,0), (n-1,1)}} in (stem, s)"))
}

fn fnz_family(table: &AlgebraTable) -> Outcome {
    for n in [2, 4, 6, 8] {
        let r = scenario(table, ScenarioKind::FnZ(n), 8, n + 14)?;
        let (ws, _) = r.spec.window();
        let mut want: Vec<(usize, usize, usize)> = (0..=ws).map(|s| (0, s, 1)).collect();
        want.push((n - 1, 1, 1));
        want.sort_unstable();
        let got = classes(&r)?;
        ensure(got == want, || format!("n={n}: E3 = {got:?}"))?;
    }
    Ok("h0 tower plus (n-1, 1) for n = 2, 4, 6, 8".into())
}

fn fbig_pattern(r: &ScenarioResult) -> Outcome {
    let got = classes(r)?;
    let mut want: Vec<(usize, usize, usize)> = (0..=8).map(|s| (0, s, 1)).collect();
    for stem in (1..=25).step_by(2) {
        want.push((stem, usize::from([1, 3, 7, 15].contains(&stem)), 1));
    }
    want.sort_unstable();
    ensure(got == want, || format!("E3 = {got:?}"))?;
    Ok("tower in stem 0; filtration 1 in stems 1, 3, 7, 15; filtration 0 in the other odd stems; even stems empty".into())
}

fn lemma_internals(r: &ScenarioResult) -> Outcome {
    let report = kernel_image_lemma_check(r);
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    ensure(failed.is_empty(), || format!("library checks failed: {failed:?}"))?;

    let ik = &r.d_ik;
    for s in 0..=ik.max_s {
        for t in 0..=ik.max_t {
            let want = if s == 0 && t % 2 == 0 && t >= 2 && !(t / 2).is_power_of_two() { 1 } else { 0 };
            ensure(ik.kernel_dim(s, t) == want, || format!("ker d_IK at ({s},{t}) = {}", ik.kernel_dim(s, t)))?;
        }
    }
    let ci = &r.d_ci;
    let oracle = ext_dims(CyclicModule::F2, ci.max_s + 1, ci.max_t);
    let chart_i = r.chart_i();
    for s in 0..=ci.max_s {
        for t in 0..=ci.max_t {
            let m = ci.matrix(s, t);
            ensure(ci.rank(s, t) == m.cols(), || format!("d_CI not injective at ({s},{t})"))?;
            let want = if t > s + 1 { oracle[s + 1][t] } else { 0 };
            ensure(chart_i.get(s, t) == want, || {
                format!("Ext^({s},{t})(I) = {}, expected {want}", chart_i.get(s, t))
            })?;
        }
    }
    Ok(format!(
        "ker d_IK one-dimensional exactly at (0, 2i), i = 3, 5, 6, 7, 9, ... <= {}; Ext(I) = shifted Ext(F2)",
        ik.max_t / 2
    ))
}

fn filtration_deltas(table: &AlgebraTable, fbig: &ScenarioResult) -> Outcome {
    let indices = [1, 2, 3, 4, 5, 6, 8];
    let fnz = indices
        .iter()
        .map(|&i| scenario(table, ScenarioKind::FnZ(2 * i), 6, 2 * i + 6))
        .collect::<Result<Vec<_>, _>>()?;
    let deltas = compare_projection_filtration(fbig, &fnz, &indices).map_err(err)?;
    ensure(deltas.len() == indices.len(), || "missing indices".into())?;
    for d in &deltas {
        ensure((d.delta == 0) == [1, 2, 4, 8].contains(&d.i), || format!("i = {}: delta {}", d.i, d.delta))?;
    }
    let shown: Vec<String> = deltas.iter().map(|d| format!("{}:{}", d.i, d.delta)).collect();
    Ok(format!("i:delta = {}", shown.join(" ")))
}

fn exit_code(args: &[&str], cache: &Path) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_extlab"))
        .args(args)
        .env("EXTLAB_CACHE", cache)
        .output()
        .map_err(err)?;
    let stderr = String::from_utf8_lossy(&out.stderr);
    ensure(!stderr.contains("panicked"), || format!("{args:?} panicked: {stderr}"))?;
    let code = out.status.code().ok_or_else(|| format!("{args:?} killed by a signal"))?;
    Ok((code, String::from_utf8_lossy(&out.stdout).into_owned()))
}

fn cli_contract(table: &AlgebraTable) -> Result<usize, String> {
    let dir = tempfile::tempdir().map_err(err)?;
    let cache = dir.path();
    let cases: &[(&[&str], i32)] = &[
        (&["resolve", "--module", "a", "--max-s", "4", "--max-t", "10"], 0),
        (&["resolve", "--module", "free:0,3", "--max-s", "3", "--max-t", "8", "--format", "svg"], 0),
        (&["scenario", "--kind", "fn", "--n", "2", "--max-s", "8", "--max-t", "16"], 0),
        (&["scenario", "--kind", "f-conj", "--max-s", "6", "--max-t", "16", "--format", "json"], 0),
        (&["verify", "--suite", "steenrod"], 0),
        (&["scenario", "--kind", "fnz"], 2),
        (&["scenario", "--kind", "f", "--n", "4"], 2),
        (&["scenario", "--kind", "g"], 2),
        (&["scenario", "--kind", "fn", "--n", "0"], 2),
        (&["resolve", "--module", "free:1,x"], 2),
        (&["resolve", "--module", "f2", "--max-t", "0"], 2),
        (&["resolve", "--module", "f2", "--max-s", "-3"], 2),
        (&["resolve", "--module", "f2", "--format", "png"], 2),
        (&["verify", "--suite", "nope"], 2),
        (&["frobnicate"], 2),
        (&[], 2),
    ];
    for (args, want) in cases {
        let (code, _) = exit_code(args, cache)?;
        ensure(code == *want, || format!("{args:?}: exit {code}, expected {want}"))?;
    }
    let (_, json) = exit_code(&["resolve", "--module", "f2", "--max-s", "6", "--max-t", "14", "--format", "json"], cache)?;
    let v: serde_json::Value = serde_json::from_str(&json).map_err(err)?;
    ensure(v["dims"][1][1] == 1 && v["schema_version"] == 1, || format!("bad resolve json: {json}"))?;

    // a cache entry under F2's name holding another module's resolution
    let foreign = minimal_resolution(table, Arc::new(free_module(table, &[0], 10).map_err(err)?), 3, 10).map_err(err)?;
    let poisoned = ResolutionCache::new(cache).path_for(&GradedModule::f2(10), 3, 10);
    std::fs::write(&poisoned, encode_resolution(&foreign)).map_err(err)?;
    let (code, _) = exit_code(&["resolve", "--module", "f2", "--max-s", "3", "--max-t", "10"], cache)?;
    ensure(code == 1, || format!("poisoned cache: exit {code}, expected 1"))?;
    Ok(cases.len() + 2)
}

fn property_suites(table: &AlgebraTable) -> Outcome {
    let mut total = 0;
    for (name, checks) in [("steenrod", suites::steenrod()), ("resolution", suites::resolution()), ("les", suites::les())] {
        for c in &checks {
            ensure(c.passed, || format!("{name}: {} failed: {}", c.name, c.detail))?;
        }
        total += checks.len();
    }
    let cli = cli_contract(table)?;
    Ok(format!("{total} property checks, {cli} CLI exit-code cases"))
}

fn main() -> ExitCode {
    let table = AlgebraTable::new(28);
    let minutes = |m: u64| Duration::from_secs(60 * m);
    let mut ok = true;
    ok &= run(
        Criterion { id: 1, name: "Ext(F2) matches the oracle with the h_j pattern", budget: minutes(1) },
        || ext_f2(&table),
    );
    ok &= run(
        Criterion { id: 2, name: "Ext(A/ASq1) = F2[h0]", budget: minutes(1) },
        || ext_a_mod_sq1(&table),
    );
    ok &= run(
        Criterion { id: 3, name: "F_n: beta bijective and E3 collapses", budget: minutes(10) },
        || fn_family(&table),
    );
    ok &= run(
        Criterion { id: 4, name: "F_nZ: E3 = h0 tower plus one class", budget: minutes(8) },
        || fnz_family(&table),
    );
    let mut fbig = None;
    ok &= run(
        Criterion { id: 5, name: "F: one class in each positive odd stem", budget: minutes(10) },
        || {
            let r = scenario(&table, ScenarioKind::Fbig, 10, 26)?;
            let out = fbig_pattern(&r);
            fbig = Some(r);
            out
        },
    );
    ok &= run(
        Criterion { id: 6, name: "F' has the same E3 chart as F", budget: minutes(10) },
        || {
            let f = fbig.as_ref().ok_or("F did not build")?;
            let c = scenario(&table, ScenarioKind::FbigConj, 10, 26)?;
            ensure(classes(&c)? == classes(f)?, || format!("F' = {:?}", classes(&c)))?;
            Ok(format!("{} classes agree", classes(f)?.len()))
        },
    );
    ok &= run(
        Criterion { id: 7, name: "kernel of d_IK and image of d_CI for F", budget: minutes(1) },
        || lemma_internals(fbig.as_ref().ok_or("F did not build")?),
    );
    ok &= run(
        Criterion { id: 8, name: "projection to F_2iZ preserves filtration iff i is a power of 2", budget: minutes(5) },
        || filtration_deltas(&table, fbig.as_ref().ok_or("F did not build")?),
    );
    ok &= run(
        Criterion { id: 9, name: "property suites and CLI exit codes", budget: minutes(5) },
        || property_suites(&table),
    );
    if ok {
        println!("acceptance: all criteria PASS");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAIL");
        ExitCode::FAILURE
    }
}
