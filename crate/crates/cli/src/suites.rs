//! The `verify` suites. Bounds are pinned so a clean build always runs the
//! same checks.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use extlab_core::cache::{decode_resolution, encode_resolution, load_resolution, save_resolution, CacheError};
use extlab_core::les::{compose_boundaries, connecting_map, horseshoe_lift, les_exactness_report, Ses};
use extlab_core::module::{a_mod_sq1, factor_map, free_module, GradedModule, ModuleMap};
use extlab_core::resolve::{minimal_resolution, Resolution};
use extlab_core::scenario::{
    build_scenario, compare_projection_filtration, kernel_image_lemma_check, scenario_map, verify_scenario,
    ScenarioKind, ScenarioResult, ScenarioSpec,
};
use extlab_core::steenrod::{AlgebraElement, AlgebraTable, RewriteStrategy};
use extlab_f2::{BitMatrix, BitVec};
use extlab_oracle::{ext_dims, CyclicModule, MilnorAlgebra};
use serde::Serialize;

use crate::args::Suite;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub elapsed_ms: u128,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub suite: &'static str,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

type Outcome = Result<String, String>;

fn check(name: impl Into<String>, f: impl FnOnce() -> Outcome) -> Check {
    let (passed, detail) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(d)) => (true, d),
        Ok(Err(d)) => (false, d),
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            (false, format!("panic: {msg}"))
        }
    };
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::All => "all",
        Suite::Steenrod => "steenrod",
        Suite::Resolution => "resolution",
        Suite::Les => "les",
        Suite::Scenarios => "scenarios",
    }
}

pub fn run(suite: Suite) -> VerifyReport {
    let selected: &[Suite] = match suite {
        Suite::All => &[Suite::Steenrod, Suite::Resolution, Suite::Les, Suite::Scenarios],
        Suite::Steenrod => &[Suite::Steenrod],
        Suite::Resolution => &[Suite::Resolution],
        Suite::Les => &[Suite::Les],
        Suite::Scenarios => &[Suite::Scenarios],
    };
    let suites: Vec<SuiteReport> = selected
        .iter()
        .map(|&s| {
            let start = Instant::now();
            let checks = match s {
                Suite::Steenrod => steenrod(),
                Suite::Resolution => resolution(),
                Suite::Les => les(),
                _ => scenarios(),
            };
            SuiteReport {
                name: suite_name(s),
                passed: checks.iter().all(|c| c.passed),
                elapsed_ms: start.elapsed().as_millis(),
                checks,
            }
        })
        .collect();
    VerifyReport {
        schema_version: REPORT_SCHEMA_VERSION,
        command: "verify",
        suite: suite_name(suite),
        passed: suites.iter().all(|s| s.passed),
        suites,
    }
}

fn basis(t: &AlgebraTable, d: usize, i: usize) -> AlgebraElement {
    AlgebraElement::new(d, BitVec::unit(t.dim(d), i))
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn words(max_len: usize, max_letter: u32, max_degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            let deg: u32 = w.iter().sum();
            for a in 1..=max_letter.min(max_degree.saturating_sub(deg)) {
                let mut v = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn steenrod() -> Vec<Check> {
    let t = AlgebraTable::new(32);
    vec![
        check("admissible basis dimensions equal Milnor basis dimensions, degree <= 32", || {
            let m = MilnorAlgebra::new(32);
            for d in 0..=32 {
                ensure(t.dim(d) == m.dim(d), || format!("degree {d}: {} vs {}", t.dim(d), m.dim(d)))?;
            }
            Ok("33 degrees".into())
        }),
        check("associativity, total degree <= 20", || {
            let mut n = 0usize;
            for da in 1..=18 {
                for db in 1..=19 - da {
                    for dc in 1..=20 - da - db {
                        for ia in 0..t.dim(da) {
                            for ib in 0..t.dim(db) {
                                let (a, b) = (basis(&t, da, ia), basis(&t, db, ib));
                                let ab = t.multiply(&a, &b).map_err(err)?;
                                for ic in 0..t.dim(dc) {
                                    let c = basis(&t, dc, ic);
                                    let lhs = t.multiply(&ab, &c).map_err(err)?;
                                    let rhs = t.multiply(&a, &t.multiply(&b, &c).map_err(err)?).map_err(err)?;
                                    ensure(lhs == rhs, || format!("({da},{ia})({db},{ib})({dc},{ic})"))?;
                                    n += 1;
                                }
                            }
                        }
                    }
                }
            }
            Ok(format!("{n} triples"))
        }),
        check("Adem rewriting is confluent, words of degree <= 20", || {
            let all = words(4, 10, 20);
            for w in &all {
                let left = t.adem_reduce_with(w, RewriteStrategy::LeftmostFirst).map_err(err)?;
                let right = t.adem_reduce_with(w, RewriteStrategy::RightmostFirst).map_err(err)?;
                let mut acc = t.unit();
                for &a in w.iter().rev() {
                    acc = t.multiply(&t.sq(a as usize).map_err(err)?, &acc).map_err(err)?;
                }
                ensure(left == right && left == acc, || format!("word {w:?}"))?;
            }
            Ok(format!("{} words", all.len()))
        }),
        check("chi is an involution, degree <= 20", || {
            for d in 0..=20 {
                for i in 0..t.dim(d) {
                    let x = basis(&t, d, i);
                    let back = t.antipode_elem(&t.antipode_elem(&x).map_err(err)?).map_err(err)?;
                    ensure(back == x, || format!("degree {d} index {i}"))?;
                }
            }
            Ok("21 degrees".into())
        }),
        check("chi reverses products, total degree <= 16", || {
            for da in 1..=15 {
                for db in 1..=16 - da {
                    for ia in 0..t.dim(da) {
                        for ib in 0..t.dim(db) {
                            let (a, b) = (basis(&t, da, ia), basis(&t, db, ib));
                            let lhs = t.antipode_elem(&t.multiply(&a, &b).map_err(err)?).map_err(err)?;
                            let rhs = t
                                .multiply(&t.antipode_elem(&b).map_err(err)?, &t.antipode_elem(&a).map_err(err)?)
                                .map_err(err)?;
                            ensure(lhs == rhs, || format!("({da},{ia})({db},{ib})"))?;
                        }
                    }
                }
            }
            Ok("ok".into())
        }),
        check("Sq^n and chi(Sq^n) are decomposable iff n is not a power of 2, n <= 32", || {
            for n in 1..=32usize {
                let want = !n.is_power_of_two();
                ensure(t.is_decomposable(&t.sq(n).map_err(err)?).map_err(err)? == want, || format!("Sq^{n}"))?;
                ensure(
                    t.is_decomposable(&t.antipode_sq(n).map_err(err)?).map_err(err)? == want,
                    || format!("chi(Sq^{n})"),
                )?;
                let codim = t.dim(n) - t.decomposables(n).map_err(err)?.dim();
                ensure(codim == usize::from(n.is_power_of_two()), || format!("indecomposables in degree {n}"))?;
            }
            Ok("32 degrees".into())
        }),
    ]
}

fn oracle_check(table: &AlgebraTable, name: &str, module: GradedModule, which: CyclicModule, s: usize, t: usize) -> Check {
    check(format!("{name} matches the Milnor-basis oracle, s <= {s}, t <= {t}"), || {
        let r = minimal_resolution(table, Arc::new(module), s, t).map_err(err)?;
        let want = ext_dims(which, s, t);
        ensure(r.ext_chart().dims == want, || format!("found {:?}, oracle {want:?}", r.ext_chart().dims))?;
        Ok(format!("{} bidegrees", (s + 1) * (t + 1)))
    })
}

pub fn resolution() -> Vec<Check> {
    let table = AlgebraTable::new(24);
    let mut out = vec![
        oracle_check(&table, "F2", GradedModule::f2(20), CyclicModule::F2, 8, 20),
        oracle_check(
            &table,
            "A/ASq1",
            a_mod_sq1(&table, 20).map(|q| (*q.module).clone()).unwrap_or_else(|_| GradedModule::zero(20)),
            CyclicModule::AModSq1,
            8,
            20,
        ),
        oracle_check(
            &table,
            "A",
            free_module(&table, &[0], 20).unwrap_or_else(|_| GradedModule::zero(20)),
            CyclicModule::Free,
            8,
            20,
        ),
    ];
    out.push(check("Ext^1(F2) is spanned by h_j in degrees 2^j", || {
        let c = minimal_resolution(&table, Arc::new(GradedModule::f2(20)), 2, 20).map_err(err)?.ext_chart();
        for t in 0..=20usize {
            let want = usize::from(t.is_power_of_two());
            ensure(c.get(1, t) == want, || format!("t = {t}: {}", c.get(1, t)))?;
        }
        Ok("t <= 20".into())
    }));
    out.push(check("Ext(A/ASq1) is F2[h0], s <= 10, t <= 24", || {
        let q = a_mod_sq1(&table, 24).map_err(err)?;
        let c = minimal_resolution(&table, q.module, 10, 24).map_err(err)?.ext_chart();
        for s in 0..=10 {
            for t in 0..=24 {
                ensure(c.get(s, t) == usize::from(s == t), || format!("({s},{t}): {}", c.get(s, t)))?;
            }
        }
        Ok("275 bidegrees".into())
    }));
    out.push(check("d∘d = 0, minimality and exactness on scenario modules", || {
        let spec = ScenarioSpec::new(ScenarioKind::Fbig, 8, 20);
        let f = factor_map(&scenario_map(&table, &spec).map_err(err)?).map_err(err)?;
        let modules = [
            ("K", Arc::clone(&f.kernel)),
            ("I", Arc::clone(&f.image)),
            ("C", Arc::clone(&f.cokernel)),
            ("F2", Arc::new(GradedModule::f2(20))),
        ];
        for (name, m) in modules {
            let r = minimal_resolution(&table, m, 8, 20).map_err(err)?;
            r.verify().map_err(|e| format!("{name}: {e}"))?;
        }
        Ok("4 resolutions".into())
    }));
    out.push(check("cache round trip is bit-exact", || {
        let dir = tempfile::tempdir().map_err(err)?;
        let q = a_mod_sq1(&table, 20).map_err(err)?;
        let r = minimal_resolution(&table, Arc::clone(&q.module), 8, 20).map_err(err)?;
        let path = dir.path().join("r.extres");
        save_resolution(&r, &path).map_err(err)?;
        let back = load_resolution(&table, Arc::clone(&q.module), &path).map_err(err)?;
        ensure(encode_resolution(&back) == encode_resolution(&r), || "re-encoding differs".into())?;
        for s in 0..=8 {
            ensure(back.differentials(s) == r.differentials(s), || format!("differentials at s = {s}"))?;
        }
        let other = decode_resolution(&table, Arc::new(GradedModule::f2(20)), &encode_resolution(&r));
        ensure(matches!(other, Err(CacheError::HashMismatch { .. })), || "foreign module accepted".into())?;
        let cut = encode_resolution(&r);
        let truncated = decode_resolution(&table, Arc::clone(&q.module), &cut[..cut.len() / 2]);
        ensure(matches!(truncated, Err(CacheError::Corrupt(_))), || "truncated file accepted".into())?;
        Ok(format!("{} bytes", cut.len()))
    }));
    out.push(check("Ext chart does not depend on generator order", || {
        let r = minimal_resolution(&table, Arc::new(GradedModule::f2(20)), 8, 20).map_err(err)?;
        let rev = r.reversed_within_degrees(&table).map_err(err)?;
        rev.verify().map_err(err)?;
        ensure(rev.ext_chart() == r.ext_chart(), || "charts differ".into())?;
        Ok("ok".into())
    }));
    out
}

const LES_S: usize = 6;
const LES_T: usize = 20;

fn resolved(table: &AlgebraTable, m: &Arc<GradedModule>, s: usize) -> Result<Arc<Resolution>, String> {
    minimal_resolution(table, Arc::clone(m), s, LES_T).map(Arc::new).map_err(err)
}

fn sequence_check(table: &AlgebraTable, name: String, ses: Ses) -> Check {
    check(name, || {
        let sub = resolved(table, ses.sub(), LES_S)?;
        let quot = resolved(table, ses.quotient(), LES_S + 1)?;
        let lift = horseshoe_lift(table, &ses, sub, quot).map_err(err)?;
        lift.check_horseshoe(table).map_err(err)?;
        let d = connecting_map(&lift).map_err(err)?;
        let mid = resolved(table, ses.middle(), LES_S)?.ext_chart();
        let report = les_exactness_report(Some(&mid), &d);
        ensure(report.passed(), || format!("{:?}", report.failures))?;
        Ok(format!("horseshoe ok, {} rank identities", report.checked))
    })
}

fn augmentation(table: &AlgebraTable) -> Result<Ses, String> {
    let q = a_mod_sq1(table, LES_T).map_err(err)?.module;
    let f2 = Arc::new(GradedModule::f2(LES_T));
    let mats = (0..=LES_T)
        .map(|t| if t == 0 { BitMatrix::identity(1) } else { BitMatrix::zeros(0, q.dim(t)) })
        .collect();
    let eps = ModuleMap::new(q, f2, mats).map_err(err)?;
    Ok(Ses::kernel_sequence(&factor_map(&eps).map_err(err)?))
}

pub fn les() -> Vec<Check> {
    let table = AlgebraTable::new(LES_T);
    let mut out = Vec::new();
    match augmentation(&table) {
        Ok(ses) => out.push(sequence_check(&table, "0 -> I -> A/ASq1 -> F2 -> 0".into(), ses)),
        Err(e) => out.push(check("0 -> I -> A/ASq1 -> F2 -> 0", || Err(e))),
    }
    for kind in [ScenarioKind::Fn(2), ScenarioKind::FnZ(4), ScenarioKind::Fbig, ScenarioKind::FbigConj] {
        let spec = ScenarioSpec::new(kind, LES_S, LES_T);
        let factored = scenario_map(&table, &spec).map_err(err).and_then(|m| factor_map(&m).map_err(err));
        match factored {
            Ok(f) => {
                out.push(sequence_check(&table, format!("{kind}: 0 -> K -> Dom -> I -> 0"), Ses::kernel_sequence(&f)));
                out.push(sequence_check(&table, format!("{kind}: 0 -> I -> Cod -> C -> 0"), Ses::image_sequence(&f)));
            }
            Err(e) => out.push(check(format!("{kind}: factor the map"), || Err(e))),
        }
    }
    out.push(check("identity map has zero boundaries", || {
        let q = a_mod_sq1(&table, LES_T).map_err(err)?.module;
        let f = factor_map(&ModuleMap::identity(q)).map_err(err)?;
        for ses in [Ses::kernel_sequence(&f), Ses::image_sequence(&f)] {
            let lift = horseshoe_lift(&table, &ses, resolved(&table, ses.sub(), LES_S)?, resolved(&table, ses.quotient(), LES_S + 1)?)
                .map_err(err)?;
            lift.check_horseshoe(&table).map_err(err)?;
            ensure(connecting_map(&lift).map_err(err)?.is_zero(), || "nonzero boundary".into())?;
        }
        Ok("both sequences".into())
    }));
    out.push(check("beta ranks do not depend on generator order", || {
        let spec = ScenarioSpec::new(ScenarioKind::Fbig, LES_S, LES_T);
        let f = factor_map(&scenario_map(&table, &spec).map_err(err)?).map_err(err)?;
        let (ks, is) = (Ses::kernel_sequence(&f), Ses::image_sequence(&f));
        let rk = resolved(&table, ks.sub(), LES_S)?;
        let ri = resolved(&table, is.sub(), LES_S + 1)?;
        let rc = resolved(&table, is.quotient(), LES_S + 2)?;
        let beta = |rk: Arc<Resolution>, ri: Arc<Resolution>, rc: Arc<Resolution>| -> Result<_, String> {
            let ik = connecting_map(&horseshoe_lift(&table, &ks, rk, Arc::clone(&ri)).map_err(err)?).map_err(err)?;
            let ci = connecting_map(&horseshoe_lift(&table, &is, ri, rc).map_err(err)?).map_err(err)?;
            compose_boundaries(&ik, &ci).map_err(err)
        };
        let rev = |r: &Arc<Resolution>| r.reversed_within_degrees(&table).map(Arc::new).map_err(err);
        let a = beta(Arc::clone(&rk), Arc::clone(&ri), Arc::clone(&rc))?;
        let b = beta(rev(&rk)?, rev(&ri)?, rev(&rc)?)?;
        for s in 0..=a.max_s {
            for t in 0..=a.max_t {
                ensure(a.rank(s, t) == b.rank(s, t), || format!("({s},{t})"))?;
            }
        }
        Ok("ok".into())
    }));
    out
}

fn scenario(table: &AlgebraTable, kind: ScenarioKind, max_s: usize, max_t: usize) -> Result<ScenarioResult, String> {
    build_scenario(table, &ScenarioSpec::new(kind, max_s, max_t), None).map_err(err)
}

fn collapse_check(r: &ScenarioResult) -> Result<(), String> {
    ensure(r.hypothesis.passed(), || format!("hypothesis fails: {:?}", r.hypothesis.violations))?;
    let diff = verify_scenario(r);
    ensure(diff.is_empty(), || format!("diff: {:?}", diff.entries))
}

pub fn scenarios() -> Vec<Check> {
    let table = AlgebraTable::new(28);
    let mut out = Vec::new();
    for n in [1, 2, 3, 4, 6] {
        out.push(check(format!("F_{n} collapses to classes at (stem, s) = (0, 0) and ({}, 1)", n - 1), || {
            let r = scenario(&table, ScenarioKind::Fn(n), 8, n + 14)?;
            collapse_check(&r)?;
            let e3 = r.e3.as_ref().ok_or("no chart")?;
            let classes: Vec<(usize, usize, usize)> = e3.entries.iter().map(|e| (e.stem, e.filtration, e.dim)).collect();
            ensure(classes == [(0, 0, 1), (n - 1, 1, 1)], || format!("{classes:?}"))?;
            Ok(format!("beta an isomorphism in {} bidegrees", r.hypothesis.checked))
        }));
    }
    for n in [2, 4, 6, 8] {
        out.push(check(format!("F_{n}Z collapses to the h0 tower plus (stem, s) = ({}, 1)", n - 1), || {
            let r = scenario(&table, ScenarioKind::FnZ(n), 8, n + 14)?;
            collapse_check(&r)?;
            Ok(format!("{} classes", r.e3.as_ref().map_or(0, |c| c.entries.len())))
        }));
    }
    let fbig = scenario(&table, ScenarioKind::Fbig, 10, 26);
    out.push(check("F has one class in each odd stem, s <= 8, stems <= 23", || {
        let r = fbig.as_ref().map_err(Clone::clone)?;
        collapse_check(r)?;
        let e3 = r.e3.as_ref().ok_or("no chart")?;
        for stem in 1..=23 {
            let want: Vec<(usize, usize)> = match stem {
                1 | 3 | 7 | 15 => vec![(1, 1)],
                s if s % 2 == 1 => vec![(0, 1)],
                _ => vec![],
            };
            ensure(e3.column(stem) == want, || format!("stem {stem}: {:?}", e3.column(stem)))?;
        }
        Ok("23 stems".into())
    }));
    out.push(check("F' has the same chart as F", || {
        let r = fbig.as_ref().map_err(Clone::clone)?;
        let c = scenario(&table, ScenarioKind::FbigConj, 10, 26)?;
        collapse_check(&c)?;
        let (a, b) = (r.e3.as_ref().ok_or("no chart")?, c.e3.as_ref().ok_or("no chart")?);
        ensure(a.same_classes(b), || "charts differ".into())?;
        Ok("identical".into())
    }));
    out.push(check("kernel and image of the boundary maps for F", || {
        let r = fbig.as_ref().map_err(Clone::clone)?;
        let report = kernel_image_lemma_check(r);
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        ensure(failed.is_empty(), || failed.join("; "))?;
        Ok(format!("{} checks", report.checks.len()))
    }));
    out.push(check("projection F -> F_2iZ preserves filtration iff i is a power of 2", || {
        let r = fbig.as_ref().map_err(Clone::clone)?;
        let indices = [1, 2, 3, 4, 5, 6, 8];
        let fnz = indices
            .iter()
            .map(|&i| scenario(&table, ScenarioKind::FnZ(2 * i), 6, 2 * i + 6))
            .collect::<Result<Vec<_>, _>>()?;
        let deltas = compare_projection_filtration(r, &fnz, &indices).map_err(err)?;
        for d in &deltas {
            let want = if d.i.is_power_of_two() { 0 } else { -1 };
            ensure(d.delta == want, || format!("i = {}: delta {}", d.i, d.delta))?;
        }
        let shown: Vec<String> = deltas.iter().map(|d| format!("i={}:{}", d.i, d.delta)).collect();
        Ok(shown.join(" "))
    }));
    out
}
