//! End-to-end E3 computations for fibers of maps between Eilenberg-MacLane
//! spectra.
//!
//! A scenario fixes `f* : H*Z -> H*Y`, factors it as
//! `0 -> K -> H*Z -> I -> 0`, `0 -> I -> H*Y -> C -> 0`, resolves `K`, `I`
//! and `C`, and computes `β = ∂_CI ∘ ∂_IK`. When `β` is injective where the
//! scenario requires, `E3(s,t) = dim ker β(s,t) + dim coker β(s-2,t-1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::cache::{CacheError, ResolutionCache};
use crate::les::{
    compose_boundaries, connecting_map, horseshoe_lift, les_exactness_report, BoundaryMap, CompositeMap, LesError,
    LesReport, Ses,
};
use crate::module::{a_mod_sq1, factor_map, free_module, map_from_generators, FactoredMap, GradedModule, ModuleElement, ModuleError};
use crate::resolve::{minimal_resolution, ExtChart, Resolution, ResolveError};
use crate::steenrod::AlgebraTable;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("bad bounds: {0}")]
    Bounds(String),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error(transparent)]
    Les(#[from] LesError),
    #[error("no F_{n}Z scenario supplied for stem {stem}", n = 2 * i, stem = 2 * i - 1)]
    MissingCounterpart { i: usize },
    #[error("expected exactly one class in stem {stem} of {scenario}, found {found}")]
    AmbiguousClass { scenario: String, stem: usize, found: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "n")]
pub enum ScenarioKind {
    /// Fiber of `Sq^n : H -> Σ^n H`.
    Fn(usize),
    /// Fiber of `Sq^n : HZ -> Σ^n H`.
    FnZ(usize),
    /// Fiber of `(Sq^{2i})_i : HZ -> ∏ Σ^{2i} H`.
    Fbig,
    /// Fiber of `(χ(Sq^{2i}))_i : HZ -> ∏ Σ^{2i} H`.
    FbigConj,
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioKind::Fn(n) => write!(f, "F_{n}"),
            ScenarioKind::FnZ(n) => write!(f, "F_{n}Z"),
            ScenarioKind::Fbig => write!(f, "F"),
            ScenarioKind::FbigConj => write!(f, "F'"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub max_s: usize,
    pub max_t: usize,
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind, max_s: usize, max_t: usize) -> Self {
        Self { kind, max_s, max_t }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.max_s < 2 || self.max_t < 2 {
            return Err(ScenarioError::Bounds("need max_s >= 2 and max_t >= 2".into()));
        }
        if let ScenarioKind::Fn(n) | ScenarioKind::FnZ(n) = self.kind {
            if n == 0 {
                return Err(ScenarioError::Bounds("n must be at least 1".into()));
            }
            if self.max_t < n + 4 {
                return Err(ScenarioError::Bounds(format!("max_t must be at least n + 4 = {}", n + 4)));
            }
        }
        Ok(())
    }

    /// The certified window in `(s, t)`: `s <= max_s - 2`, `t <= max_t - 1`.
    pub fn window(&self) -> (usize, usize) {
        (self.max_s - 2, self.max_t - 1)
    }

    pub fn expected_pattern(&self) -> BetaPattern {
        match self.kind {
            ScenarioKind::Fn(_) => BetaPattern::Isomorphism,
            ScenarioKind::FnZ(_) => BetaPattern::Injective,
            ScenarioKind::Fbig | ScenarioKind::FbigConj => BetaPattern::InjectiveAboveFiltrationZero,
        }
    }
}

/// What `β` must satisfy in every bidegree of the window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BetaPattern {
    Isomorphism,
    Injective,
    /// Injective for `s >= 1`; at `s = 0` injectivity of `p_K^*` is automatic.
    InjectiveAboveFiltrationZero,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub s: usize,
    pub t: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    pub pattern: BetaPattern,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_hypothesis(beta: &CompositeMap, pattern: BetaPattern) -> HypothesisReport {
    let mut violations = Vec::new();
    let mut checked = 0;
    for s in 0..=beta.max_s {
        for t in 0..=beta.max_t {
            checked += 1;
            let m = beta.matrix(s, t);
            let kernel = beta.kernel_dim(s, t);
            let reason = match pattern {
                BetaPattern::Isomorphism if m.rows() != m.cols() || kernel != 0 => {
                    Some(format!("{}x{} of rank {}", m.rows(), m.cols(), beta.rank(s, t)))
                }
                BetaPattern::Injective if kernel != 0 => Some(format!("kernel of dimension {kernel}")),
                BetaPattern::InjectiveAboveFiltrationZero if s >= 1 && kernel != 0 => {
                    Some(format!("kernel of dimension {kernel}"))
                }
                _ => None,
            };
            if let Some(reason) = reason {
                violations.push(Violation { s, t, reason });
            }
        }
    }
    HypothesisReport {
        pattern,
        checked,
        violations,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E3Entry {
    pub stem: usize,
    pub filtration: usize,
    pub dim: usize,
    pub labels: Vec<String>,
}

/// An E3 page in `(stem, filtration)` coordinates, known for `s <= max_s`
/// and `t <= max_t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E3Chart {
    pub max_s: usize,
    pub max_t: usize,
    pub entries: Vec<E3Entry>,
}

impl E3Chart {
    fn from_map(max_s: usize, max_t: usize, map: BTreeMap<(usize, usize), (usize, Vec<String>)>) -> Self {
        let entries = map
            .into_iter()
            .filter(|(_, (d, _))| *d > 0)
            .map(|((stem, filtration), (dim, labels))| E3Entry {
                stem,
                filtration,
                dim,
                labels,
            })
            .collect();
        Self { max_s, max_t, entries }
    }

    pub fn get(&self, stem: usize, filtration: usize) -> usize {
        self.entries
            .iter()
            .find(|e| e.stem == stem && e.filtration == filtration)
            .map_or(0, |e| e.dim)
    }

    pub fn in_window(&self, stem: usize, filtration: usize) -> bool {
        filtration <= self.max_s && stem + filtration <= self.max_t
    }

    /// Classes in `stem`, as `(filtration, dim)`.
    pub fn column(&self, stem: usize) -> Vec<(usize, usize)> {
        self.entries
            .iter()
            .filter(|e| e.stem == stem)
            .map(|e| (e.filtration, e.dim))
            .collect()
    }

    pub fn max_stem(&self) -> usize {
        self.max_t
    }

    /// The same classes, ignoring labels.
    pub fn same_classes(&self, other: &E3Chart) -> bool {
        let key = |c: &E3Chart| -> Vec<(usize, usize, usize)> {
            c.entries.iter().map(|e| (e.stem, e.filtration, e.dim)).collect()
        };
        self.max_s == other.max_s && self.max_t == other.max_t && key(self) == key(other)
    }
}

/// E3 from `β` under the hypotheses of `pattern`; the report when they fail.
pub fn assemble_e3(beta: &CompositeMap, pattern: BetaPattern) -> Result<E3Chart, HypothesisReport> {
    let report = check_hypothesis(beta, pattern);
    if !report.passed() {
        return Err(report);
    }
    let mut map: BTreeMap<(usize, usize), (usize, Vec<String>)> = BTreeMap::new();
    for s in 0..=beta.max_s {
        for t in s..=beta.max_t {
            let ker = beta.kernel_dim(s, t);
            let coker = if s >= 2 && t >= 1 {
                beta.cokernel_dim(s - 2, t - 1)
            } else {
                beta.target.get(s, t)
            };
            let entry = map.entry((t - s, s)).or_default();
            if ker > 0 {
                entry.0 += ker;
                entry.1.push(format!("ker beta, from Ext^({s},{})(K)", t + 1));
            }
            if coker > 0 {
                entry.0 += coker;
                entry.1.push(format!("coker beta, from Ext^({s},{t})(C)"));
            }
        }
    }
    Ok(E3Chart::from_map(beta.max_s, beta.max_t, map))
}

/// The closed-form E3 page of each scenario, inside the certified window.
pub fn expected_e3(spec: &ScenarioSpec) -> E3Chart {
    let (max_s, max_t) = spec.window();
    let mut map: BTreeMap<(usize, usize), (usize, Vec<String>)> = BTreeMap::new();
    let mut add = |s: usize, t: usize, label: String| {
        if s <= max_s && t <= max_t && t >= s {
            let e = map.entry((t - s, s)).or_default();
            e.0 += 1;
            e.1.push(label);
        }
    };
    let tower = |add: &mut dyn FnMut(usize, usize, String)| {
        for s in 0..=max_s {
            add(s, s, if s == 0 { "1".into() } else { format!("h0^{s}") });
        }
    };
    match spec.kind {
        ScenarioKind::Fn(n) => {
            add(0, 0, "1".into());
            add(1, n, format!("S^(1,{n}) F2"));
        }
        ScenarioKind::FnZ(n) => {
            tower(&mut add);
            add(1, n, format!("S^(1,{n}) F2"));
        }
        ScenarioKind::Fbig | ScenarioKind::FbigConj => {
            tower(&mut add);
            let mut j = 1;
            while (1usize << j) <= max_t {
                add(1, 1 << j, format!("h{j}"));
                j += 1;
            }
            for i in 1..=max_t.div_ceil(2) {
                if !i.is_power_of_two() {
                    add(0, 2 * i - 1, format!("x{}", 2 * i - 1));
                }
            }
        }
    }
    E3Chart::from_map(max_s, max_t, map)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiffEntry {
    pub stem: usize,
    pub filtration: usize,
    pub expected: usize,
    pub found: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiffReport {
    pub hypothesis_failed: bool,
    pub entries: Vec<DiffEntry>,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        !self.hypothesis_failed && self.entries.is_empty()
    }
}

pub fn diff_charts(found: &E3Chart, expected: &E3Chart) -> DiffReport {
    let mut keys: Vec<(usize, usize)> = found
        .entries
        .iter()
        .chain(&expected.entries)
        .map(|e| (e.stem, e.filtration))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    let entries = keys
        .into_iter()
        .filter(|&(stem, f)| expected.in_window(stem, f))
        .filter_map(|(stem, filtration)| {
            let (e, g) = (expected.get(stem, filtration), found.get(stem, filtration));
            (e != g).then_some(DiffEntry {
                stem,
                filtration,
                expected: e,
                found: g,
            })
        })
        .collect();
    DiffReport {
        hypothesis_failed: false,
        entries,
    }
}

/// Everything a scenario computes.
#[derive(Clone, Debug)]
pub struct ScenarioResult {
    pub spec: ScenarioSpec,
    pub factored: FactoredMap,
    pub res_k: Arc<Resolution>,
    pub res_i: Arc<Resolution>,
    pub res_c: Arc<Resolution>,
    pub chart_dom: ExtChart,
    pub chart_cod: ExtChart,
    pub d_ik: BoundaryMap,
    pub d_ci: BoundaryMap,
    pub beta: CompositeMap,
    pub les_kernel: LesReport,
    pub les_image: LesReport,
    pub hypothesis: HypothesisReport,
    pub e3: Option<E3Chart>,
}

impl ScenarioResult {
    pub fn chart_k(&self) -> ExtChart {
        self.res_k.ext_chart()
    }

    pub fn chart_i(&self) -> ExtChart {
        self.res_i.ext_chart()
    }

    pub fn chart_c(&self) -> ExtChart {
        self.res_c.ext_chart()
    }
}

/// The map `f*` of a scenario.
pub fn scenario_map(table: &AlgebraTable, spec: &ScenarioSpec) -> Result<crate::module::ModuleMap, ScenarioError> {
    let max_t = spec.max_t;
    match spec.kind {
        ScenarioKind::Fn(n) => {
            let dom = Arc::new(free_module(table, &[n], max_t)?);
            let cod = Arc::new(free_module(table, &[0], max_t)?);
            let x = table.sq(n).map_err(ModuleError::from)?;
            Ok(map_from_generators(table, dom, cod, &[ModuleElement::new(n, x.coords().clone())])?)
        }
        ScenarioKind::FnZ(n) => {
            let q = a_mod_sq1(table, max_t)?;
            let dom = Arc::new(free_module(table, &[n], max_t)?);
            let target = q.class_of(&table.sq(n).map_err(ModuleError::from)?);
            Ok(map_from_generators(table, dom, Arc::clone(&q.module), &[target])?)
        }
        ScenarioKind::Fbig | ScenarioKind::FbigConj => {
            let q = a_mod_sq1(table, max_t)?;
            let shifts: Vec<usize> = (1..=max_t / 2).map(|i| 2 * i).collect();
            let dom = Arc::new(free_module(table, &shifts, max_t)?);
            let targets = shifts
                .iter()
                .map(|&d| {
                    let x = if spec.kind == ScenarioKind::Fbig {
                        table.sq(d)
                    } else {
                        table.antipode_sq(d)
                    }
                    .map_err(ModuleError::from)?;
                    Ok(q.class_of(&x))
                })
                .collect::<Result<Vec<_>, ScenarioError>>()?;
            Ok(map_from_generators(table, dom, Arc::clone(&q.module), &targets)?)
        }
    }
}

fn resolve_with(
    table: &AlgebraTable,
    cache: Option<&ResolutionCache>,
    module: Arc<GradedModule>,
    max_s: usize,
    max_t: usize,
) -> Result<Resolution, ScenarioError> {
    Ok(match cache {
        Some(c) => c.get_or_compute(table, module, max_s, max_t)?,
        None => minimal_resolution(table, module, max_s, max_t)?,
    })
}

pub fn build_scenario(
    table: &AlgebraTable,
    spec: &ScenarioSpec,
    cache: Option<&ResolutionCache>,
) -> Result<ScenarioResult, ScenarioError> {
    spec.validate()?;
    if table.max_degree() < spec.max_t {
        return Err(ScenarioError::Bounds(format!(
            "algebra table stops at degree {}",
            table.max_degree()
        )));
    }
    let (max_s, max_t) = (spec.max_s, spec.max_t);
    let f = scenario_map(table, spec)?;
    let factored = factor_map(&f)?;
    let modules = [
        Arc::clone(&factored.kernel),
        Arc::clone(&factored.image),
        Arc::clone(&factored.cokernel),
        Arc::clone(f.domain()),
        Arc::clone(f.codomain()),
    ];
    let resolved: Vec<Result<Resolution, ScenarioError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = modules
            .iter()
            .map(|m| {
                let m = Arc::clone(m);
                scope.spawn(move || resolve_with(table, cache, m, max_s, max_t))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("resolution thread panicked"))
            .collect()
    });
    let mut resolved = resolved.into_iter();
    let mut next = || -> Result<Resolution, ScenarioError> { resolved.next().expect("five resolutions") };
    let res_k = Arc::new(next()?);
    let res_i = Arc::new(next()?);
    let res_c = Arc::new(next()?);
    let res_dom = next()?;
    let res_cod = next()?;

    let kernel_ses = Ses::kernel_sequence(&factored);
    let image_ses = Ses::image_sequence(&factored);
    let (lift_ik, lift_ci) = std::thread::scope(|scope| {
        let a = scope.spawn(|| -> Result<_, ScenarioError> {
            let l = horseshoe_lift(table, &kernel_ses, Arc::clone(&res_k), Arc::clone(&res_i))?;
            l.check_horseshoe(table)?;
            Ok(l)
        });
        let b = scope.spawn(|| -> Result<_, ScenarioError> {
            let l = horseshoe_lift(table, &image_ses, Arc::clone(&res_i), Arc::clone(&res_c))?;
            l.check_horseshoe(table)?;
            Ok(l)
        });
        (a.join().expect("lift thread panicked"), b.join().expect("lift thread panicked"))
    });
    let d_ik = connecting_map(&lift_ik?)?;
    let d_ci = connecting_map(&lift_ci?)?;
    let beta = compose_boundaries(&d_ik, &d_ci)?;
    let chart_dom = res_dom.ext_chart();
    let chart_cod = res_cod.ext_chart();
    let les_kernel = les_exactness_report(Some(&chart_dom), &d_ik);
    let les_image = les_exactness_report(Some(&chart_cod), &d_ci);
    let pattern = spec.expected_pattern();
    let (hypothesis, e3) = match assemble_e3(&beta, pattern) {
        Ok(chart) => (check_hypothesis(&beta, pattern), Some(chart)),
        Err(report) => (report, None),
    };
    Ok(ScenarioResult {
        spec: *spec,
        factored,
        res_k,
        res_i,
        res_c,
        chart_dom,
        chart_cod,
        d_ik,
        d_ci,
        beta,
        les_kernel,
        les_image,
        hypothesis,
        e3,
    })
}

pub fn verify_scenario(result: &ScenarioResult) -> DiffReport {
    let expected = expected_e3(&result.spec);
    match &result.e3 {
        Some(chart) => diff_charts(chart, &expected),
        None => DiffReport {
            hypothesis_failed: true,
            entries: Vec::new(),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub name: String,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&LemmaCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn lemma_check(name: &str, failures: Vec<String>) -> LemmaCheck {
    LemmaCheck {
        name: name.into(),
        passed: failures.is_empty(),
        failures,
    }
}

fn is_nontrivial_power_of_two(t: usize) -> bool {
    t >= 2 && t.is_power_of_two()
}

/// The internal statements about `∂_IK`, `∂_CI` and `β` for `F` and `F'`.
pub fn kernel_image_lemma_check(result: &ScenarioResult) -> LemmaReport {
    let (d_ik, d_ci, beta) = (&result.d_ik, &result.d_ci, &result.beta);
    let chart_i = result.chart_i();
    let chart_c = result.chart_c();
    let mut checks = Vec::new();

    let mut f = Vec::new();
    if (0..=result.factored.cokernel.max_t()).any(|t| result.factored.cokernel.dim(t) != usize::from(t == 0)) {
        f.push(format!("C has dimensions {:?}", result.factored.cokernel.dims()));
    }
    checks.push(lemma_check("cokernel is F2", f));

    let mut f = Vec::new();
    for s in 0..=d_ik.max_s {
        for t in 0..=d_ik.max_t {
            let want = usize::from(s == 0 && t % 2 == 0 && t >= 2 && !(t / 2).is_power_of_two());
            let got = d_ik.kernel_dim(s, t);
            if got != want {
                f.push(format!("ker d_IK at ({s},{t}) has dim {got}, expected {want}"));
            }
        }
    }
    checks.push(lemma_check("kernel of d_IK", f));

    let mut f = Vec::new();
    for s in 0..=d_ik.max_s {
        for t in 0..=d_ik.max_t {
            let (rank, dim) = (d_ik.rank(s, t), chart_i.get(s + 1, t));
            if rank != dim {
                f.push(format!("d_IK into Ext^({},{t})(I) has rank {rank} of {dim}", s + 1));
            }
        }
    }
    for t in 0..=chart_i.max_t {
        let want = usize::from(is_nontrivial_power_of_two(t));
        if chart_i.get(0, t) != want {
            f.push(format!("Ext^(0,{t})(I) has dim {}, expected {want}", chart_i.get(0, t)));
        }
    }
    checks.push(lemma_check("image of d_IK is positive filtration", f));

    let mut f = Vec::new();
    for s in 0..=d_ci.max_s {
        for t in 0..=d_ci.max_t {
            if d_ci.kernel_dim(s, t) != 0 {
                f.push(format!("d_CI not injective at ({s},{t})"));
            }
            let want = if t >= s + 2 { chart_c.get(s + 1, t) } else { 0 };
            if chart_i.get(s, t) != want {
                f.push(format!("Ext^({s},{t})(I) has dim {}, expected {want}", chart_i.get(s, t)));
            }
        }
    }
    checks.push(lemma_check("d_CI injective with Ext(I) = shifted Ext(F2)", f));

    let mut f = Vec::new();
    for s in 0..=d_ik.max_s.min(d_ci.max_s.saturating_sub(1)) {
        for t in 0..=d_ik.max_t.min(d_ci.max_t) {
            // the image of d_IK lands on the part of Ext(F2) with t - s > 0
            // in filtration >= 2
            let got = d_ci.matrix(s + 1, t).mul(d_ik.matrix(s, t)).rank();
            let want = if t > s + 2 { chart_c.get(s + 2, t) } else { 0 };
            if got != want {
                f.push(format!("image in Ext^({},{t})(C) has dim {got}, expected {want}", s + 2));
            }
        }
    }
    checks.push(lemma_check("d_CI maps the image of d_IK onto filtration >= 2", f));

    let mut f = Vec::new();
    for s in 0..=beta.max_s {
        for t in 0..=beta.max_t {
            let want = usize::from(s == 0 && t % 2 == 1 && !t.div_ceil(2).is_power_of_two());
            let got = beta.kernel_dim(s, t);
            if got != want {
                f.push(format!("ker beta at ({s},{t}) has dim {got}, expected {want}"));
            }
        }
    }
    checks.push(lemma_check("kernel of beta", f));

    let mut f = Vec::new();
    for s in 0..=beta.max_s + 2 {
        for t in 0..=beta.max_t + 1 {
            let coker = if s >= 2 && t >= 1 {
                beta.cokernel_dim(s - 2, t - 1)
            } else {
                chart_c.get(s, t)
            };
            let want = usize::from(t == s || (s == 1 && is_nontrivial_power_of_two(t)));
            if coker != want {
                f.push(format!("coker beta at ({s},{t}) has dim {coker}, expected {want}"));
            }
        }
    }
    checks.push(lemma_check("cokernel of beta", f));
    LemmaReport { checks }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltrationDelta {
    pub i: usize,
    pub stem: usize,
    pub f_filtration: usize,
    pub fnz_filtration: usize,
    /// `f_filtration - fnz_filtration`
    pub delta: isize,
}

fn unique_class(chart: &E3Chart, stem: usize, scenario: &str) -> Result<usize, ScenarioError> {
    let col = chart.column(stem);
    let total: usize = col.iter().map(|&(_, d)| d).sum();
    match col[..] {
        [(f, 1)] => Ok(f),
        _ => Err(ScenarioError::AmbiguousClass {
            scenario: scenario.to_string(),
            stem,
            found: total,
        }),
    }
}

/// For each `i`, compares the filtration of the class of `F` in stem
/// `2i - 1` with that of `F_{2i}Z`.
pub fn compare_projection_filtration(
    fbig: &ScenarioResult,
    fnz: &[ScenarioResult],
    indices: &[usize],
) -> Result<Vec<FiltrationDelta>, ScenarioError> {
    let f_chart = fbig
        .e3
        .as_ref()
        .ok_or_else(|| ScenarioError::Bounds("F scenario has no E3 chart".into()))?;
    indices
        .iter()
        .map(|&i| {
            let stem = 2 * i - 1;
            let other = fnz
                .iter()
                .find(|r| r.spec.kind == ScenarioKind::FnZ(2 * i) && r.e3.is_some())
                .ok_or(ScenarioError::MissingCounterpart { i })?;
            let other_chart = other.e3.as_ref().expect("filtered above");
            if !f_chart.in_window(stem, 0) || !other_chart.in_window(stem, 1) {
                return Err(ScenarioError::Bounds(format!("stem {stem} is outside a window")));
            }
            let f_filtration = unique_class(f_chart, stem, "F")?;
            let fnz_filtration = unique_class(other_chart, stem, &other.spec.kind.to_string())?;
            Ok(FiltrationDelta {
                i,
                stem,
                f_filtration,
                fnz_filtration,
                delta: f_filtration as isize - fnz_filtration as isize,
            })
        })
        .collect()
}
