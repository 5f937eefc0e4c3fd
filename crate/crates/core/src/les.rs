//! Connecting homomorphisms of Ext long exact sequences.
//!
//! For `0 -> K' -> M -> I' -> 0` with minimal resolutions of `K'` and `I'`,
//! the horseshoe resolution of `M` has differential
//! `d^Q = [[d^K, τ], [0, d^I]]` on `P(K') ⊕ P(I')`. The off-diagonal
//! `τ_s : P_s(I') -> P_{s-1}(K')` is chosen generator by generator so that
//! `d^Q∘d^Q = 0`, and the boundary `Ext^s(K') -> Ext^{s+1}(I')` is `[φ] ↦ [φ∘τ]`.
//! With minimal resolutions both Hom complexes have zero differential, so
//! its matrix just reads off unit coefficients of `τ`.

use std::sync::Arc;

use extlab_f2::{BitMatrix, BitVec, Solver};
use serde::Serialize;

use crate::module::{FactoredMap, GradedModule, ModuleMap};
use crate::resolve::{extend_from_generators, resolution_key, ExtChart, Resolution};
use crate::steenrod::AlgebraTable;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LesError {
    #[error("the maps do not form a short exact sequence in degree {t}")]
    NotExact { t: usize },
    #[error("resolutions do not belong to the outer terms of the sequence")]
    WrongResolution,
    #[error("lift equation has no solution at (s, t) = ({s}, {t})")]
    Unsolvable { s: usize, t: usize },
    #[error("horseshoe differential squares to a nonzero map at (s, t) = ({s}, {t})")]
    NotAComplex { s: usize, t: usize },
    #[error("horseshoe augmentation is not onto in degree {t}")]
    NotOnto { t: usize },
    #[error("boundary maps do not share the middle chart at (s, t) = ({s}, {t})")]
    ChartMismatch { s: usize, t: usize },
}

/// `0 -> sub -> middle -> quotient -> 0`.
#[derive(Clone, Debug)]
pub struct Ses {
    pub inclusion: ModuleMap,
    pub projection: ModuleMap,
}

impl Ses {
    pub fn new(inclusion: ModuleMap, projection: ModuleMap) -> Result<Self, LesError> {
        let ses = Self {
            inclusion,
            projection,
        };
        ses.check_exact()?;
        Ok(ses)
    }

    /// `0 -> K -> Dom -> I -> 0`.
    pub fn kernel_sequence(f: &FactoredMap) -> Self {
        Self {
            inclusion: f.kernel_inclusion.clone(),
            projection: f.image_projection.clone(),
        }
    }

    /// `0 -> I -> Cod -> C -> 0`.
    pub fn image_sequence(f: &FactoredMap) -> Self {
        Self {
            inclusion: f.image_inclusion.clone(),
            projection: f.cokernel_projection.clone(),
        }
    }

    pub fn sub(&self) -> &Arc<GradedModule> {
        self.inclusion.domain()
    }

    pub fn middle(&self) -> &Arc<GradedModule> {
        self.projection.domain()
    }

    pub fn quotient(&self) -> &Arc<GradedModule> {
        self.projection.codomain()
    }

    pub fn max_t(&self) -> usize {
        self.projection.max_t()
    }

    fn check_exact(&self) -> Result<(), LesError> {
        for t in 0..=self.max_t().min(self.inclusion.max_t()) {
            let (i, p) = (self.inclusion.matrix(t), self.projection.matrix(t));
            if i.rows() != p.cols()
                || i.rank() != i.cols()
                || p.rank() != p.rows()
                || !p.mul(i).is_zero()
                || i.cols() + p.rows() != p.cols()
            {
                return Err(LesError::NotExact { t });
            }
        }
        Ok(())
    }
}

/// The off-diagonal part of a horseshoe resolution.
#[derive(Clone, Debug)]
pub struct ChainLift {
    ses: Ses,
    res_sub: Arc<Resolution>,
    res_quot: Arc<Resolution>,
    levels: usize,
    max_t: usize,
    // sigma[g] in M_{|g|} for g a generator of P_0(I')
    sigma: Vec<BitVec>,
    // tau[s][g] in P_{s-1}(K') for g a generator of P_s(I'); tau[0] unused
    tau: Vec<Vec<BitVec>>,
}

impl ChainLift {
    /// `τ_s` is available for `1 <= s <= levels()`.
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn max_t(&self) -> usize {
        self.max_t
    }

    pub fn ses(&self) -> &Ses {
        &self.ses
    }

    pub fn sub_resolution(&self) -> &Arc<Resolution> {
        &self.res_sub
    }

    pub fn quotient_resolution(&self) -> &Arc<Resolution> {
        &self.res_quot
    }

    pub fn sigma(&self, g: usize) -> &BitVec {
        &self.sigma[g]
    }

    pub fn tau(&self, s: usize, g: usize) -> &BitVec {
        &self.tau[s][g]
    }

    fn sigma_matrix(&self, table: &AlgebraTable, t: usize) -> BitMatrix {
        extend_from_generators(table, self.res_quot.free(0), &self.sigma, self.ses.middle().as_ref(), t)
    }

    fn tau_matrix(&self, table: &AlgebraTable, s: usize, t: usize) -> BitMatrix {
        extend_from_generators(table, self.res_quot.free(s), &self.tau[s], self.res_sub.free(s - 1), t)
    }

    /// Assembles `d^Q` degreewise and checks `ε∘d^Q_1 = 0`,
    /// `d^Q_{s-1}∘d^Q_s = 0` for `2 <= s <= levels`, and that `ε` is onto.
    pub fn check_horseshoe(&self, table: &AlgebraTable) -> Result<(), LesError> {
        for t in 0..=self.max_t {
            let inc = self.ses.inclusion.matrix(t);
            let eps = inc
                .mul(self.res_sub.differential_matrix(0, t))
                .hconcat(&self.sigma_matrix(table, t));
            if eps.rank() != self.ses.middle().dim(t) {
                return Err(LesError::NotOnto { t });
            }
            // above the resolved range of K' only the P(I') part of Q_s is used
            let dq = |s: usize| -> BitMatrix {
                let tau = self.tau_matrix(table, s, t);
                let dk = if s <= self.res_sub.max_s() {
                    self.res_sub.differential_matrix(s, t).clone()
                } else {
                    BitMatrix::zeros(tau.rows(), 0)
                };
                let di = self.res_quot.differential_matrix(s, t);
                let top = dk.hconcat(&tau);
                let bottom = BitMatrix::zeros(di.rows(), dk.cols()).hconcat(di);
                top.vconcat(&bottom)
            };
            let mut prev = eps;
            for s in 1..=self.levels {
                let cur = dq(s);
                if !prev.mul(&cur).is_zero() {
                    return Err(LesError::NotAComplex { s, t });
                }
                prev = cur;
            }
        }
        Ok(())
    }
}

pub fn horseshoe_lift(
    table: &AlgebraTable,
    ses: &Ses,
    res_sub: Arc<Resolution>,
    res_quot: Arc<Resolution>,
) -> Result<ChainLift, LesError> {
    let max_t = res_sub.max_t().min(res_quot.max_t()).min(ses.max_t());
    if res_sub.module_hash() != resolution_key(ses.sub(), res_sub.max_t())
        || res_quot.module_hash() != resolution_key(ses.quotient(), res_quot.max_t())
    {
        return Err(LesError::WrongResolution);
    }
    let levels = res_quot.max_s().min(res_sub.max_s() + 1);

    let p0 = res_quot.free(0);
    let mut sigma = Vec::with_capacity(p0.num_generators());
    for t in 0..=max_t {
        let gens = p0.generators_in(t);
        if gens.is_empty() {
            continue;
        }
        let solver = Solver::new(ses.projection.matrix(t));
        for g in gens {
            let x = solver
                .solve(res_quot.differential(0, g))
                .ok_or(LesError::Unsolvable { s: 0, t })?;
            sigma.push(x);
        }
    }
    let mut lift = ChainLift {
        ses: ses.clone(),
        res_sub: Arc::clone(&res_sub),
        res_quot: Arc::clone(&res_quot),
        levels,
        max_t,
        sigma,
        tau: vec![Vec::new(); levels + 1],
    };
    let gens_in_range = |s: usize| res_quot.free(s).degrees().iter().filter(|&&d| d <= max_t).count();

    // τ_1: inc(aug_K(τ_1 g)) = σ(d g)
    if levels >= 1 {
        let mut tau1 = Vec::with_capacity(gens_in_range(1));
        for t in 0..=max_t {
            let gens = res_quot.free(1).generators_in(t);
            if gens.is_empty() {
                continue;
            }
            let a = ses.inclusion.matrix(t).mul(res_sub.differential_matrix(0, t));
            let solver = Solver::new(&a);
            let sig = lift.sigma_matrix(table, t);
            for g in gens {
                let y = sig.mul_vec(res_quot.differential(1, g));
                tau1.push(solver.solve(&y).ok_or(LesError::Unsolvable { s: 1, t })?);
            }
        }
        lift.tau[1] = tau1;
    }
    // τ_{s+1}: d^K(τ_{s+1} g) = τ_s(d^I g)
    for s in 1..levels {
        let mut next = Vec::with_capacity(gens_in_range(s + 1));
        for t in 0..=max_t {
            let gens = res_quot.free(s + 1).generators_in(t);
            if gens.is_empty() {
                continue;
            }
            let solver = Solver::new(res_sub.differential_matrix(s, t));
            let tm = lift.tau_matrix(table, s, t);
            for g in gens {
                let y = tm.mul_vec(res_quot.differential(s + 1, g));
                next.push(solver.solve(&y).ok_or(LesError::Unsolvable { s: s + 1, t })?);
            }
        }
        lift.tau[s + 1] = next;
    }
    Ok(lift)
}

/// `∂ : Ext^{s,t}(K') -> Ext^{s+1,t}(I')` for `s <= max_s`, `t <= max_t`.
///
/// `matrix(s, t)` has a row per generator of `P_{s+1}(I')` and a column per
/// generator of `P_s(K')` in degree `t`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryMap {
    pub max_s: usize,
    pub max_t: usize,
    pub source: ExtChart,
    pub target: ExtChart,
    #[serde(skip)]
    mats: Vec<Vec<BitMatrix>>,
}

impl BoundaryMap {
    pub fn matrix(&self, s: usize, t: usize) -> &BitMatrix {
        &self.mats[s][t]
    }

    pub fn rank(&self, s: usize, t: usize) -> usize {
        self.mats[s][t].rank()
    }

    pub fn kernel_dim(&self, s: usize, t: usize) -> usize {
        self.mats[s][t].cols() - self.rank(s, t)
    }

    pub fn is_zero(&self) -> bool {
        self.mats.iter().flatten().all(BitMatrix::is_zero)
    }
}

pub fn connecting_map(lift: &ChainLift) -> Result<BoundaryMap, LesError> {
    let max_t = lift.max_t;
    let source = lift.res_sub.ext_chart();
    let target = lift.res_quot.ext_chart();
    if lift.levels == 0 {
        return Ok(BoundaryMap {
            max_s: 0,
            max_t,
            source,
            target,
            mats: Vec::new(),
        });
    }
    let max_s = lift.levels - 1;
    let mut mats = Vec::with_capacity(max_s + 1);
    for s in 0..=max_s {
        let pk = lift.res_sub.free(s);
        let pi = lift.res_quot.free(s + 1);
        let row = (0..=max_t)
            .map(|t| {
                let ks = pk.generators_in(t);
                let is = pi.generators_in(t);
                let mut m = BitMatrix::zeros(is.len(), ks.len());
                for (r, gi) in is.clone().enumerate() {
                    let v = &lift.tau[s + 1][gi];
                    for (c, gk) in ks.clone().enumerate() {
                        if v.get(pk.generator_position(gk)) {
                            m.set(r, c, true);
                        }
                    }
                }
                m
            })
            .collect();
        mats.push(row);
    }
    Ok(BoundaryMap {
        max_s,
        max_t,
        source,
        target,
        mats,
    })
}

/// `β = ∂_CI ∘ ∂_IK`, indexed by the suspension `Σ^{-1}K`:
/// `matrix(s, t) : Ext^{s,t}(Σ^{-1}K) = Ext^{s,t+1}(K) -> Ext^{s+2,t+1}(C)`.
#[derive(Clone, Debug, Serialize)]
pub struct CompositeMap {
    pub max_s: usize,
    pub max_t: usize,
    /// Chart of `Σ^{-1}K`.
    pub source: ExtChart,
    /// Chart of `C`.
    pub target: ExtChart,
    #[serde(skip)]
    mats: Vec<Vec<BitMatrix>>,
}

impl CompositeMap {
    pub fn matrix(&self, s: usize, t: usize) -> &BitMatrix {
        &self.mats[s][t]
    }

    pub fn rank(&self, s: usize, t: usize) -> usize {
        self.mats[s][t].rank()
    }

    pub fn kernel_dim(&self, s: usize, t: usize) -> usize {
        self.mats[s][t].cols() - self.rank(s, t)
    }

    pub fn cokernel_dim(&self, s: usize, t: usize) -> usize {
        self.mats[s][t].rows() - self.rank(s, t)
    }

    /// Replaces one matrix. Only meant for building negative controls.
    pub fn with_matrix(mut self, s: usize, t: usize, m: BitMatrix) -> Self {
        assert_eq!((m.rows(), m.cols()), (self.mats[s][t].rows(), self.mats[s][t].cols()));
        self.mats[s][t] = m;
        self
    }
}

pub fn compose_boundaries(ik: &BoundaryMap, ci: &BoundaryMap) -> Result<CompositeMap, LesError> {
    let max_t = ik.max_t.min(ci.max_t);
    for s in 0..=ik.max_s.min(ci.max_s) + 1 {
        for t in 0..=max_t {
            if ik.target.get(s, t) != ci.source.get(s, t) {
                return Err(LesError::ChartMismatch { s, t });
            }
        }
    }
    if max_t == 0 || ci.max_s == 0 || ci.mats.is_empty() || ik.mats.is_empty() {
        return Ok(CompositeMap {
            max_s: 0,
            max_t: 0,
            source: ik.source.shifted(-1),
            target: ci.target.clone(),
            mats: Vec::new(),
        });
    }
    let max_s = ik.max_s.min(ci.max_s - 1);
    let beta_t = max_t - 1;
    let mats = (0..=max_s)
        .map(|s| {
            (0..=beta_t)
                .map(|t| ci.matrix(s + 1, t + 1).mul(ik.matrix(s, t + 1)))
                .collect()
        })
        .collect();
    Ok(CompositeMap {
        max_s,
        max_t: beta_t,
        source: ik.source.shifted(-1),
        target: ci.target.clone(),
        mats,
    })
}

/// One rank-alternation check of a long exact sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LesEntry {
    pub s: usize,
    pub t: usize,
    pub expected: usize,
    pub found: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LesReport {
    pub checked: usize,
    pub middle_skipped: bool,
    pub failures: Vec<LesEntry>,
}

impl LesReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// With the middle chart, checks
/// `dim Ext^s(M) = (dim Ext^s(I') - rank ∂_{s-1}) + (dim Ext^s(K') - rank ∂_s)`
/// wherever both boundaries are known. Without it, checks only that each
/// boundary matrix has the shape its charts demand.
pub fn les_exactness_report(middle: Option<&ExtChart>, boundary: &BoundaryMap) -> LesReport {
    let mut report = LesReport {
        middle_skipped: middle.is_none(),
        ..LesReport::default()
    };
    if boundary.mats.is_empty() {
        return report;
    }
    for s in 0..=boundary.max_s {
        for t in 0..=boundary.max_t {
            let m = boundary.matrix(s, t);
            report.checked += 1;
            let want = (boundary.target.get(s + 1, t), boundary.source.get(s, t));
            if (m.rows(), m.cols()) != want {
                report.failures.push(LesEntry {
                    s,
                    t,
                    expected: want.0 * want.1,
                    found: m.rows() * m.cols(),
                });
            }
            let Some(mid) = middle else { continue };
            let before = if s == 0 { 0 } else { boundary.rank(s - 1, t) };
            let expected = (boundary.target.get(s, t) - before) + (boundary.source.get(s, t) - boundary.rank(s, t));
            let found = mid.get(s, t);
            report.checked += 1;
            if expected != found {
                report.failures.push(LesEntry { s, t, expected, found });
            }
        }
    }
    report
}
