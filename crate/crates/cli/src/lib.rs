//! Driver behind the `extlab` binary.

pub mod args;
pub mod render;
pub mod suites;

use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use anyhow::Context as _;
use extlab_core::cache::ResolutionCache;
use extlab_core::module::{a_mod_sq1, free_module, GradedModule};
use extlab_core::resolve::minimal_resolution;
use extlab_core::scenario::{
    build_scenario, expected_e3, kernel_image_lemma_check, verify_scenario, ScenarioError, ScenarioKind, ScenarioSpec,
};
use extlab_core::steenrod::AlgebraTable;
use serde_json::json;

use crate::args::{
    Bounds, CacheArgs, Cli, Command, Format, Kind, ModuleSelector, ReportFormat, ResolveArgs, ScenarioArgs, VerifyArgs,
    MAX_DEGREE, MAX_FILTRATION,
};
use crate::render::{ascii, svg, Lattice};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Internal(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Verified,
    Mismatch,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Verified => 0,
            Status::Mismatch => 1,
        }
    }
}

pub fn run(cli: Cli) -> Result<Status, CliError> {
    match cli.command {
        Command::Resolve(a) => cmd_resolve(a),
        Command::Scenario(a) => cmd_scenario(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn check_bounds(b: &Bounds) -> Result<(), CliError> {
    if !(1..=MAX_FILTRATION).contains(&b.max_s) {
        return Err(CliError::Usage(format!("--max-s must be between 1 and {MAX_FILTRATION}")));
    }
    if !(1..=MAX_DEGREE).contains(&b.max_t) {
        return Err(CliError::Usage(format!("--max-t must be between 1 and {MAX_DEGREE}")));
    }
    Ok(())
}

fn cache(c: &CacheArgs) -> Option<ResolutionCache> {
    (!c.no_cache).then(|| ResolutionCache::new(&c.cache_dir))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).context("writing to stdout")?;
        }
    }
    Ok(())
}

fn pretty(v: &serde_json::Value) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).context("serialising report")?;
    s.push('\n');
    Ok(s)
}

fn build_module(table: &AlgebraTable, sel: &ModuleSelector, max_t: usize) -> anyhow::Result<GradedModule> {
    Ok(match sel {
        ModuleSelector::F2 => GradedModule::f2(max_t),
        ModuleSelector::A => free_module(table, &[0], max_t)?.with_name("A"),
        ModuleSelector::AModSq1 => (*a_mod_sq1(table, max_t)?.module).clone(),
        ModuleSelector::Free(shifts) => free_module(table, shifts, max_t)?,
    })
}

fn cmd_resolve(a: ResolveArgs) -> Result<Status, CliError> {
    check_bounds(&a.bounds)?;
    let (max_s, max_t) = (a.bounds.max_s, a.bounds.max_t);
    let table = AlgebraTable::new(max_t);
    let module = Arc::new(build_module(&table, &a.module, max_t)?);
    let r = match cache(&a.cache) {
        Some(c) => c.get_or_compute(&table, Arc::clone(&module), max_s, max_t).map_err(anyhow::Error::from)?,
        None => minimal_resolution(&table, Arc::clone(&module), max_s, max_t).map_err(anyhow::Error::from)?,
    };
    r.verify().map_err(anyhow::Error::from).context("resolution failed its self-check")?;
    let chart = r.ext_chart();
    let title = format!("Ext({}) for s <= {max_s}, t <= {max_t}", a.module);
    let text = match a.output.format {
        Format::Ascii => ascii(&Lattice::from_ext(title, &chart)),
        Format::Svg => svg(&Lattice::from_ext(title, &chart)),
        Format::Json => {
            let classes: Vec<_> = chart
                .nonzero()
                .into_iter()
                .map(|(s, t, dim)| json!({ "s": s, "t": t, "stem": t - s, "dim": dim }))
                .collect();
            pretty(&json!({
                "schema_version": SCHEMA_VERSION,
                "command": "resolve",
                "module": a.module.to_string(),
                "module_hash": r.module_hash(),
                "max_s": max_s,
                "max_t": max_t,
                "dims": chart.dims,
                "classes": classes,
            }))?
        }
    };
    emit(a.output.output.as_deref(), &text)?;
    Ok(Status::Verified)
}

fn scenario_kind(kind: Kind, n: Option<usize>) -> Result<ScenarioKind, CliError> {
    let need = |flag: &str| CliError::Usage(format!("--n is required for --kind {flag}"));
    match (kind, n) {
        (Kind::Fn, Some(n)) => Ok(ScenarioKind::Fn(n)),
        (Kind::Fnz, Some(n)) => Ok(ScenarioKind::FnZ(n)),
        (Kind::Fn, None) => Err(need("fn")),
        (Kind::Fnz, None) => Err(need("fnz")),
        (Kind::F | Kind::FConj, Some(_)) => Err(CliError::Usage("--n only applies to --kind fn and fnz".into())),
        (Kind::F, None) => Ok(ScenarioKind::Fbig),
        (Kind::FConj, None) => Ok(ScenarioKind::FbigConj),
    }
}

fn cmd_scenario(a: ScenarioArgs) -> Result<Status, CliError> {
    check_bounds(&a.bounds)?;
    let kind = scenario_kind(a.kind, a.n)?;
    let spec = ScenarioSpec::new(kind, a.bounds.max_s, a.bounds.max_t);
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let table = AlgebraTable::new(spec.max_t);
    let cache = cache(&a.cache);
    let result = match build_scenario(&table, &spec, cache.as_ref()) {
        Ok(r) => r,
        Err(ScenarioError::Bounds(m)) => return Err(CliError::Usage(m)),
        Err(e) => return Err(anyhow::Error::from(e).context(format!("building scenario {kind}")).into()),
    };
    let diff = verify_scenario(&result);
    let expected = expected_e3(&spec);
    let status = if diff.is_empty() { Status::Verified } else { Status::Mismatch };
    let (ws, wt) = spec.window();
    let title = format!("E3 of {kind}, window s <= {ws}, t <= {wt}");
    let flagged = diff.entries.iter().map(|e| (e.stem, e.filtration));
    let lattice = match &result.e3 {
        Some(c) => Lattice::from_e3(title, c).flag(flagged),
        None => Lattice::from_e3(format!("{title} (hypothesis on beta fails; showing the expected chart)"), &expected),
    };
    let text = match a.output.format {
        Format::Ascii => {
            let mut s = ascii(&lattice);
            if result.e3.is_none() {
                for v in &result.hypothesis.violations {
                    s.push_str(&format!("beta fails at (s={}, t={}): {}\n", v.s, v.t, v.reason));
                }
            }
            for e in &diff.entries {
                s.push_str(&format!(
                    "mismatch at stem {}, filtration {}: expected {}, found {}\n",
                    e.stem, e.filtration, e.expected, e.found
                ));
            }
            s.push_str(if diff.is_empty() { "verified\n" } else { "MISMATCH\n" });
            s
        }
        Format::Svg => svg(&lattice),
        Format::Json => {
            let lemma = matches!(kind, ScenarioKind::Fbig | ScenarioKind::FbigConj).then(|| kernel_image_lemma_check(&result));
            pretty(&json!({
                "schema_version": SCHEMA_VERSION,
                "command": "scenario",
                "scenario": kind.to_string(),
                "spec": spec,
                "window": { "max_s": ws, "max_t": wt },
                "hypothesis": result.hypothesis,
                "assembled": result.e3,
                "expected": expected,
                "diff": diff,
                "lemma": lemma,
                "verified": diff.is_empty(),
            }))?
        }
    };
    emit(a.output.output.as_deref(), &text)?;
    Ok(status)
}

fn cmd_verify(a: VerifyArgs) -> Result<Status, CliError> {
    let report = suites::run(a.suite);
    let text = match a.format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report).context("serialising report")?;
            s.push('\n');
            s
        }
        ReportFormat::Ascii => {
            let mut s = String::new();
            for suite in &report.suites {
                s.push_str(&format!("[{}] {} ms\n", suite.name, suite.elapsed_ms));
                for c in &suite.checks {
                    let mark = if c.passed { "PASS" } else { "FAIL" };
                    s.push_str(&format!("  {mark} {}: {}\n", c.name, c.detail));
                }
            }
            s.push_str(if report.passed { "all checks passed\n" } else { "some checks FAILED\n" });
            s
        }
    };
    emit(a.output.as_deref(), &text)?;
    Ok(if report.passed { Status::Verified } else { Status::Mismatch })
}
