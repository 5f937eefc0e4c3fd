//! Degreewise-finite graded left modules over the Steenrod algebra.
//!
//! A [`GradedModule`] is stored concretely: a dimension for every degree
//! `0..=max_t` and, for every `k >= 1` and `t` with `t + k <= max_t`, the
//! matrix of `Sq^k : M_t -> M_{t+k}` (column convention, see `extlab_f2`).
//! A module built with bound `max_t` says nothing about degrees above it.

use std::fmt;
use std::sync::Arc;

use extlab_f2::{kernel_basis, BitMatrix, BitVec, QuotientSpace, Subspace};
use sha2::{Digest, Sha256};

use crate::steenrod::{binomial_odd, AlgebraElement, AlgebraTable, SteenrodError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModuleError {
    #[error("malformed module data: {0}")]
    Malformed(String),
    #[error("generator {generator} has degree {expected} but its target has degree {found}")]
    DegreeMismatch {
        generator: usize,
        expected: usize,
        found: usize,
    },
    #[error("map is not A-linear for Sq^{k} in degree {t}")]
    NotLinear { k: usize, t: usize },
    #[error("action violates the Adem relation for Sq^{a} Sq^{b} in degree {t}")]
    AdemViolation { a: usize, b: usize, t: usize },
    #[error("Sq^{k} carries a degree {t} element out of the subspace")]
    EscapesSubspace { k: usize, t: usize },
    #[error("suspension by {shift} would move degree {degree} below zero")]
    NegativeSuspension { shift: isize, degree: usize },
    #[error("operation needs a free module")]
    NotFree,
    #[error("bound mismatch: {0}")]
    BoundMismatch(String),
    #[error(transparent)]
    Steenrod(#[from] SteenrodError),
}

/// An element of a module in a single degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleElement {
    pub degree: usize,
    pub vector: BitVec,
}

impl ModuleElement {
    pub fn new(degree: usize, vector: BitVec) -> Self {
        Self { degree, vector }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct GradedModule {
    name: String,
    max_t: usize,
    dims: Vec<usize>,
    // actions[t][k - 1] : M_t -> M_{t+k}
    actions: Vec<Vec<BitMatrix>>,
    labels: Vec<Vec<String>>,
    free_shifts: Option<Vec<usize>>,
}

impl fmt::Debug for GradedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GradedModule")
            .field("name", &self.name)
            .field("max_t", &self.max_t)
            .field("dims", &self.dims)
            .finish_non_exhaustive()
    }
}

impl GradedModule {
    /// Assembles a module from raw data, checking every matrix shape.
    pub fn new(
        name: impl Into<String>,
        max_t: usize,
        dims: Vec<usize>,
        actions: Vec<Vec<BitMatrix>>,
        labels: Option<Vec<Vec<String>>>,
    ) -> Result<Self, ModuleError> {
        if dims.len() != max_t + 1 || actions.len() != max_t + 1 {
            return Err(ModuleError::Malformed(format!(
                "expected {} degrees of data",
                max_t + 1
            )));
        }
        for (t, row) in actions.iter().enumerate() {
            if row.len() != max_t - t {
                return Err(ModuleError::Malformed(format!(
                    "degree {t} has {} action matrices, expected {}",
                    row.len(),
                    max_t - t
                )));
            }
            for (k1, m) in row.iter().enumerate() {
                let k = k1 + 1;
                if m.rows() != dims[t + k] || m.cols() != dims[t] {
                    return Err(ModuleError::Malformed(format!(
                        "Sq^{k} in degree {t} is {}x{}",
                        m.rows(),
                        m.cols()
                    )));
                }
            }
        }
        let labels = match labels {
            Some(l) => {
                if l.len() != max_t + 1 || l.iter().zip(&dims).any(|(l, &d)| l.len() != d) {
                    return Err(ModuleError::Malformed("label table has the wrong shape".into()));
                }
                l
            }
            None => dims
                .iter()
                .enumerate()
                .map(|(t, &d)| (0..d).map(|j| format!("e{t}_{j}")).collect())
                .collect(),
        };
        Ok(Self {
            name: name.into(),
            max_t,
            dims,
            actions,
            labels,
            free_shifts: None,
        })
    }

    pub fn zero(max_t: usize) -> Self {
        Self::new(
            "0",
            max_t,
            vec![0; max_t + 1],
            (0..=max_t)
                .map(|t| (1..=max_t - t).map(|_| BitMatrix::zeros(0, 0)).collect())
                .collect(),
            None,
        )
        .expect("zero module is well formed")
    }

    /// `F2` concentrated in degree 0.
    pub fn f2(max_t: usize) -> Self {
        let mut dims = vec![0; max_t + 1];
        dims[0] = 1;
        let actions = (0..=max_t)
            .map(|t| {
                (1..=max_t - t)
                    .map(|k| BitMatrix::zeros(dims[t + k], dims[t]))
                    .collect()
            })
            .collect();
        let mut labels: Vec<Vec<String>> = vec![Vec::new(); max_t + 1];
        labels[0].push("1".into());
        Self::new("F2", max_t, dims, actions, Some(labels)).expect("F2 is well formed")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn max_t(&self) -> usize {
        self.max_t
    }

    /// Dimension in degree `t`; zero above the bound.
    pub fn dim(&self, t: usize) -> usize {
        self.dims.get(t).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self, t: usize) -> &[String] {
        &self.labels[t]
    }

    pub fn free_shifts(&self) -> Option<&[usize]> {
        self.free_shifts.as_deref()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// Matrix of `Sq^k` out of degree `t`. Requires `k >= 1`, `t + k <= max_t`.
    pub fn action(&self, k: usize, t: usize) -> &BitMatrix {
        assert!(k >= 1 && t + k <= self.max_t, "Sq^{k} from degree {t} is out of range");
        &self.actions[t][k - 1]
    }

    /// `Sq^k x` for `x` in degree `t`.
    pub fn act(&self, k: usize, t: usize, x: &BitVec) -> BitVec {
        if k == 0 {
            return x.clone();
        }
        self.action(k, t).mul_vec(x)
    }

    /// `Sq^{i_1} ... Sq^{i_k} x`, applying `Sq^{i_k}` first.
    pub fn act_monomial(&self, exponents: &[u32], t: usize, x: &BitVec) -> BitVec {
        let mut v = x.clone();
        let mut deg = t;
        for &i in exponents.iter().rev() {
            v = self.act(i as usize, deg, &v);
            deg += i as usize;
        }
        v
    }

    pub fn act_element(
        &self,
        table: &AlgebraTable,
        a: &AlgebraElement,
        t: usize,
        x: &BitVec,
    ) -> BitVec {
        let mut out = BitVec::zeros(self.dim(t + a.degree()));
        for idx in a.coords().iter_ones() {
            let m = table.basis_element(a.degree(), idx);
            out.xor_assign(&self.act_monomial(m.exponents(), t, x));
        }
        out
    }

    /// Checks `Sq^a Sq^b = sum_c binom(b-c-1, a-2c) Sq^{a+b-c} Sq^c` as
    /// matrices for every `a < 2b` and every degree in range.
    pub fn check_adem_relations(&self) -> Result<(), ModuleError> {
        for t in 0..=self.max_t {
            for b in 1..=self.max_t - t {
                for a in 1..(2 * b).min(self.max_t - t - b + 1) {
                    let lhs = self.action(a, t + b).mul(self.action(b, t));
                    let mut rhs = BitMatrix::zeros(self.dim(t + a + b), self.dim(t));
                    for c in 0..=a / 2 {
                        if binomial_odd((b - c - 1) as u32, (a - 2 * c) as u32) {
                            let term = if c == 0 {
                                self.action(a + b, t).clone()
                            } else {
                                self.action(a + b - c, t + c).mul(self.action(c, t))
                            };
                            rhs = add_matrices(&rhs, &term);
                        }
                    }
                    if lhs != rhs {
                        return Err(ModuleError::AdemViolation { a, b, t });
                    }
                }
            }
        }
        Ok(())
    }

    /// SHA-256 over bound, dimensions and action matrices (names and labels
    /// excluded), as lowercase hex.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"extlab-module-v1");
        h.update((self.max_t as u64).to_le_bytes());
        for &d in &self.dims {
            h.update((d as u64).to_le_bytes());
        }
        for row in &self.actions {
            for m in row {
                for r in 0..m.rows() {
                    for w in m.row_words(r) {
                        h.update(w.to_le_bytes());
                    }
                }
            }
        }
        hex::encode(h.finalize())
    }

    /// The same module, forgetting everything above degree `max_t`.
    pub fn truncate(&self, max_t: usize) -> Self {
        let max_t = max_t.min(self.max_t);
        Self {
            name: self.name.clone(),
            max_t,
            dims: self.dims[..=max_t].to_vec(),
            actions: (0..=max_t)
                .map(|t| self.actions[t][..max_t - t].to_vec())
                .collect(),
            labels: self.labels[..=max_t].to_vec(),
            free_shifts: self
                .free_shifts
                .as_ref()
                .map(|s| s.iter().copied().filter(|&d| d <= max_t).collect()),
        }
    }
}

fn add_matrices(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    let mut out = a.clone();
    for r in 0..a.rows() {
        for c in b.row(r).iter_ones() {
            out.set(r, c, !out.get(r, c));
        }
    }
    out
}

/// `⊕_g Σ^{shift_g} A`, truncated at `max_t`.
///
/// Degree `t` has basis `(g, m)` for each generator `g` in order and each
/// admissible `m` of degree `t - shift_g`, in the algebra's canonical order.
pub fn free_module(
    table: &AlgebraTable,
    shifts: &[usize],
    max_t: usize,
) -> Result<GradedModule, ModuleError> {
    if max_t > table.max_degree() {
        return Err(SteenrodError::DegreeOutOfRange {
            degree: max_t,
            max: table.max_degree(),
        }
        .into());
    }
    let offsets = |t: usize| -> Vec<usize> {
        let mut acc = 0;
        shifts
            .iter()
            .map(|&s| {
                let o = acc;
                acc += if t >= s { table.dim(t - s) } else { 0 };
                o
            })
            .collect()
    };
    let dims: Vec<usize> = (0..=max_t)
        .map(|t| shifts.iter().filter(|&&s| s <= t).map(|&s| table.dim(t - s)).sum())
        .collect();
    let mut actions = Vec::with_capacity(max_t + 1);
    for t in 0..=max_t {
        let src = offsets(t);
        let mut row = Vec::with_capacity(max_t - t);
        for k in 1..=max_t - t {
            let dst = offsets(t + k);
            let mut m = BitMatrix::zeros(dims[t + k], dims[t]);
            for (g, &s) in shifts.iter().enumerate() {
                if s > t {
                    continue;
                }
                let sq_idx = table.index_of(&crate::steenrod::AdmissibleMonomial::new(vec![k as u32])?);
                let sq_idx = sq_idx.expect("Sq^k is admissible");
                for i in 0..table.dim(t - s) {
                    for c in table.product_of_basis(k, sq_idx, t - s, i).iter_ones() {
                        m.set(dst[g] + c, src[g] + i, true);
                    }
                }
            }
            row.push(m);
        }
        actions.push(row);
    }
    let labels = (0..=max_t)
        .map(|t| {
            let mut out = Vec::with_capacity(dims[t]);
            for (g, &s) in shifts.iter().enumerate() {
                if s > t {
                    continue;
                }
                for m in table.enumerate_admissible(t - s).expect("in range") {
                    if shifts.len() == 1 {
                        out.push(m.to_string());
                    } else {
                        out.push(format!("g{g}:{m}"));
                    }
                }
            }
            out
        })
        .collect();
    let name = match shifts {
        [0] => "A".to_string(),
        _ => format!(
            "free({})",
            shifts.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
        ),
    };
    let mut m = GradedModule::new(name, max_t, dims, actions, Some(labels))?;
    m.free_shifts = Some(shifts.to_vec());
    Ok(m)
}

pub fn direct_sum(max_t: usize, modules: &[&GradedModule]) -> Result<GradedModule, ModuleError> {
    if modules.iter().any(|m| m.max_t != max_t) {
        return Err(ModuleError::BoundMismatch(
            "direct summands must share a bound".into(),
        ));
    }
    let dims: Vec<usize> = (0..=max_t)
        .map(|t| modules.iter().map(|m| m.dim(t)).sum())
        .collect();
    let mut actions = Vec::with_capacity(max_t + 1);
    for t in 0..=max_t {
        let mut row = Vec::with_capacity(max_t - t);
        for k in 1..=max_t - t {
            let mut out = BitMatrix::zeros(dims[t + k], dims[t]);
            let (mut ro, mut co) = (0, 0);
            for m in modules {
                let a = m.action(k, t);
                for r in 0..a.rows() {
                    for c in a.row(r).iter_ones() {
                        out.set(ro + r, co + c, true);
                    }
                }
                ro += m.dim(t + k);
                co += m.dim(t);
            }
            row.push(out);
        }
        actions.push(row);
    }
    let labels = (0..=max_t)
        .map(|t| {
            modules
                .iter()
                .enumerate()
                .flat_map(|(i, m)| m.labels(t).iter().map(move |l| format!("{i}:{l}")))
                .collect()
        })
        .collect();
    let name = if modules.is_empty() {
        "0".to_string()
    } else {
        modules.iter().map(|m| m.name.as_str()).collect::<Vec<_>>().join(" + ")
    };
    let mut sum = GradedModule::new(name, max_t, dims, actions, Some(labels))?;
    if let Some(shifts) = modules
        .iter()
        .map(|m| m.free_shifts.clone())
        .collect::<Option<Vec<_>>>()
    {
        sum.free_shifts = Some(shifts.concat());
    }
    Ok(sum)
}

/// `Σ^shift M`, i.e. `(Σ^shift M)_t = M_{t - shift}`. The bound moves with
/// the module, so `max_t` becomes `max_t + shift`.
pub fn suspend(m: &GradedModule, shift: isize) -> Result<GradedModule, ModuleError> {
    if shift < 0 {
        let down = shift.unsigned_abs();
        if let Some(t) = (0..down.min(m.max_t + 1)).find(|&t| m.dim(t) != 0) {
            return Err(ModuleError::NegativeSuspension { shift, degree: t });
        }
        if down > m.max_t {
            return Ok(GradedModule::zero(0));
        }
        let max_t = m.max_t - down;
        let mut out = GradedModule::new(
            format!("S^{shift} {}", m.name),
            max_t,
            m.dims[down..].to_vec(),
            (0..=max_t).map(|t| m.actions[t + down].clone()).collect(),
            Some(m.labels[down..].to_vec()),
        )?;
        out.free_shifts = m
            .free_shifts
            .as_ref()
            .map(|s| s.iter().map(|&d| d - down).collect());
        return Ok(out);
    }
    let up = shift as usize;
    let max_t = m.max_t + up;
    let mut dims = vec![0; up];
    dims.extend_from_slice(&m.dims);
    let actions = (0..=max_t)
        .map(|t| {
            if t >= up {
                m.actions[t - up].clone()
            } else {
                (1..=max_t - t)
                    .map(|k| BitMatrix::zeros(dims[t + k], 0))
                    .collect()
            }
        })
        .collect();
    let mut labels = vec![Vec::new(); up];
    labels.extend(m.labels.iter().cloned());
    let mut out = GradedModule::new(format!("S^{shift} {}", m.name), max_t, dims, actions, Some(labels))?;
    out.free_shifts = m
        .free_shifts
        .as_ref()
        .map(|s| s.iter().map(|&d| d + up).collect());
    Ok(out)
}

/// A degree-preserving A-linear map.
#[derive(Clone, Debug)]
pub struct ModuleMap {
    domain: Arc<GradedModule>,
    codomain: Arc<GradedModule>,
    // mats[t] : domain_t -> codomain_t
    mats: Vec<BitMatrix>,
}

impl ModuleMap {
    /// Wraps per-degree matrices, checking shapes and linearity with respect
    /// to the algebra generators `Sq^{2^j}`.
    pub fn new(
        domain: Arc<GradedModule>,
        codomain: Arc<GradedModule>,
        mats: Vec<BitMatrix>,
    ) -> Result<Self, ModuleError> {
        if domain.max_t != codomain.max_t || mats.len() != domain.max_t + 1 {
            return Err(ModuleError::BoundMismatch(
                "map data does not cover the module bounds".into(),
            ));
        }
        for (t, m) in mats.iter().enumerate() {
            if m.rows() != codomain.dim(t) || m.cols() != domain.dim(t) {
                return Err(ModuleError::Malformed(format!(
                    "map matrix in degree {t} is {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        let f = Self {
            domain,
            codomain,
            mats,
        };
        f.check_linearity_for(|k| k.is_power_of_two())?;
        Ok(f)
    }

    pub fn identity(m: Arc<GradedModule>) -> Self {
        let mats = (0..=m.max_t).map(|t| BitMatrix::identity(m.dim(t))).collect();
        Self {
            domain: Arc::clone(&m),
            codomain: m,
            mats,
        }
    }

    pub fn domain(&self) -> &Arc<GradedModule> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<GradedModule> {
        &self.codomain
    }

    pub fn max_t(&self) -> usize {
        self.domain.max_t
    }

    pub fn matrix(&self, t: usize) -> &BitMatrix {
        &self.mats[t]
    }

    pub fn apply(&self, t: usize, x: &BitVec) -> BitVec {
        self.mats[t].mul_vec(x)
    }

    /// `f(Sq^k x) = Sq^k f(x)` for every `k` and `t` in range.
    pub fn check_linearity(&self) -> Result<(), ModuleError> {
        self.check_linearity_for(|_| true)
    }

    fn check_linearity_for(&self, which: impl Fn(usize) -> bool) -> Result<(), ModuleError> {
        let max_t = self.max_t();
        for t in 0..=max_t {
            for k in (1..=max_t - t).filter(|&k| which(k)) {
                let lhs = self.mats[t + k].mul(self.domain.action(k, t));
                let rhs = self.codomain.action(k, t).mul(&self.mats[t]);
                if lhs != rhs {
                    return Err(ModuleError::NotLinear { k, t });
                }
            }
        }
        Ok(())
    }

    pub fn compose(&self, first: &ModuleMap) -> Result<ModuleMap, ModuleError> {
        if first.codomain.content_hash() != self.domain.content_hash() {
            return Err(ModuleError::BoundMismatch("maps are not composable".into()));
        }
        let mats = (0..=self.max_t())
            .map(|t| self.mats[t].mul(&first.mats[t]))
            .collect();
        ModuleMap::new(Arc::clone(&first.domain), Arc::clone(&self.codomain), mats)
    }
}

/// The A-linear map out of a free module sending generator `g` to
/// `targets[g]`.
pub fn map_from_generators(
    table: &AlgebraTable,
    domain: Arc<GradedModule>,
    codomain: Arc<GradedModule>,
    targets: &[ModuleElement],
) -> Result<ModuleMap, ModuleError> {
    let shifts = domain.free_shifts().ok_or(ModuleError::NotFree)?.to_vec();
    if shifts.len() != targets.len() {
        return Err(ModuleError::Malformed(format!(
            "{} generators but {} targets",
            shifts.len(),
            targets.len()
        )));
    }
    for (g, (&s, x)) in shifts.iter().zip(targets).enumerate() {
        if s != x.degree {
            return Err(ModuleError::DegreeMismatch {
                generator: g,
                expected: s,
                found: x.degree,
            });
        }
        if x.vector.len() != codomain.dim(x.degree) {
            return Err(ModuleError::Malformed(format!(
                "target of generator {g} has the wrong length"
            )));
        }
    }
    let max_t = domain.max_t();
    let mut mats = Vec::with_capacity(max_t + 1);
    for t in 0..=max_t {
        let mut columns = Vec::with_capacity(domain.dim(t));
        for (&s, x) in shifts.iter().zip(targets) {
            if s > t {
                continue;
            }
            for m in table.enumerate_admissible(t - s)? {
                columns.push(codomain.act_monomial(m.exponents(), s, &x.vector));
            }
        }
        mats.push(BitMatrix::from_columns(codomain.dim(t), &columns));
    }
    ModuleMap::new(domain, codomain, mats)
}

/// A submodule given degreewise, with its inclusion.
fn submodule(
    ambient: &Arc<GradedModule>,
    spaces: &[Subspace],
    name: String,
) -> Result<(Arc<GradedModule>, ModuleMap), ModuleError> {
    let max_t = ambient.max_t;
    let dims: Vec<usize> = spaces.iter().map(Subspace::dim).collect();
    let mut actions = Vec::with_capacity(max_t + 1);
    for t in 0..=max_t {
        let basis = spaces[t].vectors();
        let mut row = Vec::with_capacity(max_t - t);
        for k in 1..=max_t - t {
            let columns = basis
                .iter()
                .map(|v| {
                    spaces[t + k]
                        .coordinates(&ambient.act(k, t, v))
                        .ok_or(ModuleError::EscapesSubspace { k, t })
                })
                .collect::<Result<Vec<_>, _>>()?;
            row.push(BitMatrix::from_columns(dims[t + k], &columns));
        }
        actions.push(row);
    }
    let labels = (0..=max_t)
        .map(|t| {
            spaces[t]
                .vectors()
                .iter()
                .map(|v| {
                    let terms: Vec<&str> = v.iter_ones().map(|i| ambient.labels(t)[i].as_str()).collect();
                    terms.join(" + ")
                })
                .collect()
        })
        .collect();
    let sub = Arc::new(GradedModule::new(name, max_t, dims, actions, Some(labels))?);
    let inclusion = (0..=max_t)
        .map(|t| BitMatrix::from_columns(ambient.dim(t), &spaces[t].vectors()))
        .collect();
    let inc = ModuleMap::new(Arc::clone(&sub), Arc::clone(ambient), inclusion)?;
    Ok((sub, inc))
}

/// The quotient by a degreewise-given submodule, with its projection. The
/// complement basis is the canonical one (non-pivot coordinates).
fn quotient(
    ambient: &Arc<GradedModule>,
    spaces: &[Subspace],
    name: String,
) -> Result<(Arc<GradedModule>, ModuleMap), ModuleError> {
    let max_t = ambient.max_t;
    let qs: Vec<QuotientSpace> = spaces.iter().cloned().map(QuotientSpace::new).collect();
    let dims: Vec<usize> = qs.iter().map(QuotientSpace::dim).collect();
    let mut actions = Vec::with_capacity(max_t + 1);
    for t in 0..=max_t {
        let mut row = Vec::with_capacity(max_t - t);
        for k in 1..=max_t - t {
            let columns: Vec<BitVec> = (0..dims[t])
                .map(|i| {
                    let v = qs[t].lift(&BitVec::unit(dims[t], i));
                    qs[t + k].project(&ambient.act(k, t, &v))
                })
                .collect();
            row.push(BitMatrix::from_columns(dims[t + k], &columns));
        }
        actions.push(row);
    }
    let labels = (0..=max_t)
        .map(|t| {
            qs[t]
                .complement_indices()
                .iter()
                .map(|&i| ambient.labels(t)[i].clone())
                .collect()
        })
        .collect();
    let quo = Arc::new(GradedModule::new(name, max_t, dims, actions, Some(labels))?);
    let projection = (0..=max_t)
        .map(|t| {
            let columns: Vec<BitVec> = (0..ambient.dim(t))
                .map(|j| qs[t].project(&BitVec::unit(ambient.dim(t), j)))
                .collect();
            BitMatrix::from_columns(qs[t].dim(), &columns)
        })
        .collect();
    let proj = ModuleMap::new(Arc::clone(ambient), Arc::clone(&quo), projection)?;
    Ok((quo, proj))
}

/// Kernel, image and cokernel of a module map, with the four structure
/// maps of `0 -> K -> Dom -> I -> 0` and `0 -> I -> Cod -> C -> 0`.
#[derive(Clone, Debug)]
pub struct FactoredMap {
    pub map: ModuleMap,
    pub kernel: Arc<GradedModule>,
    pub image: Arc<GradedModule>,
    pub cokernel: Arc<GradedModule>,
    /// `i_K : K -> Dom`
    pub kernel_inclusion: ModuleMap,
    /// `p_I : Dom -> I`
    pub image_projection: ModuleMap,
    /// `i_I : I -> Cod`
    pub image_inclusion: ModuleMap,
    /// `p_C : Cod -> C`
    pub cokernel_projection: ModuleMap,
}

impl FactoredMap {
    /// Rank checks for both short exact sequences in every degree.
    pub fn check_exactness(&self) -> Result<(), ModuleError> {
        let dom = self.map.domain();
        let cod = self.map.codomain();
        for t in 0..=self.map.max_t() {
            let (k, i, c) = (self.kernel.dim(t), self.image.dim(t), self.cokernel.dim(t));
            let bad = |what: &str| Err(ModuleError::Malformed(format!("{what} fails in degree {t}")));
            if dom.dim(t) != k + i || cod.dim(t) != i + c {
                return bad("dimension count");
            }
            if self.kernel_inclusion.matrix(t).rank() != k
                || self.image_projection.matrix(t).rank() != i
                || self.image_inclusion.matrix(t).rank() != i
                || self.cokernel_projection.matrix(t).rank() != c
            {
                return bad("injectivity/surjectivity");
            }
            if !self
                .image_projection
                .matrix(t)
                .mul(self.kernel_inclusion.matrix(t))
                .is_zero()
                || !self
                    .cokernel_projection
                    .matrix(t)
                    .mul(self.image_inclusion.matrix(t))
                    .is_zero()
            {
                return bad("composite vanishing");
            }
            if self.image_inclusion.matrix(t).mul(self.image_projection.matrix(t)) != *self.map.matrix(t) {
                return bad("factorisation");
            }
        }
        Ok(())
    }
}

pub fn factor_map(f: &ModuleMap) -> Result<FactoredMap, ModuleError> {
    let dom = f.domain();
    let cod = f.codomain();
    let max_t = f.max_t();
    let kernels: Vec<Subspace> = (0..=max_t).map(|t| kernel_basis(f.matrix(t))).collect();
    let images: Vec<Subspace> = (0..=max_t)
        .map(|t| Subspace::from_vectors(cod.dim(t), f.matrix(t).columns()))
        .collect();
    let (kernel, kernel_inclusion) = submodule(dom, &kernels, format!("ker({} -> {})", dom.name(), cod.name()))?;
    let (image, image_inclusion) = submodule(cod, &images, format!("im({} -> {})", dom.name(), cod.name()))?;
    let (cokernel, cokernel_projection) =
        quotient(cod, &images, format!("coker({} -> {})", dom.name(), cod.name()))?;
    let image_projection_mats = (0..=max_t)
        .map(|t| {
            let columns = f
                .matrix(t)
                .columns()
                .iter()
                .map(|v| images[t].coordinates(v).expect("column lies in the image"))
                .collect::<Vec<_>>();
            BitMatrix::from_columns(images[t].dim(), &columns)
        })
        .collect();
    let image_projection = ModuleMap::new(Arc::clone(dom), Arc::clone(&image), image_projection_mats)?;
    let factored = FactoredMap {
        map: f.clone(),
        kernel,
        image,
        cokernel,
        kernel_inclusion,
        image_projection,
        image_inclusion,
        cokernel_projection,
    };
    factored.check_exactness()?;
    Ok(factored)
}

/// Right multiplication by `x`, as the map `Σ^{|x|} A -> A` sending the
/// generator to `x`.
pub fn right_multiplication(
    table: &AlgebraTable,
    x: &AlgebraElement,
    max_t: usize,
) -> Result<ModuleMap, ModuleError> {
    let a = Arc::new(free_module(table, &[0], max_t)?);
    let shifted = Arc::new(free_module(table, &[x.degree()], max_t)?);
    let target = ModuleElement::new(x.degree(), x.coords().clone());
    map_from_generators(table, shifted, a, &[target])
}

/// `A/A Sq^1` together with the projection `A -> A/A Sq^1`.
#[derive(Clone, Debug)]
pub struct AModSq1 {
    pub module: Arc<GradedModule>,
    pub projection: ModuleMap,
}

impl AModSq1 {
    /// The class of `x` in the quotient.
    pub fn class_of(&self, x: &AlgebraElement) -> ModuleElement {
        ModuleElement::new(x.degree(), self.projection.apply(x.degree(), x.coords()))
    }
}

pub fn a_mod_sq1(table: &AlgebraTable, max_t: usize) -> Result<AModSq1, ModuleError> {
    let f = right_multiplication(table, &table.sq(1)?, max_t)?;
    let factored = factor_map(&f)?;
    let module = Arc::new(
        Arc::unwrap_or_clone(factored.cokernel).with_name("A/ASq1"),
    );
    let projection = ModuleMap::new(
        Arc::clone(factored.cokernel_projection.domain()),
        Arc::clone(&module),
        (0..=max_t)
            .map(|t| factored.cokernel_projection.matrix(t).clone())
            .collect(),
    )?;
    Ok(AModSq1 { module, projection })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> AlgebraTable {
        AlgebraTable::new(12)
    }

    #[test]
    fn free_module_examples() {
        let t = table();
        let a = free_module(&t, &[0], 8).unwrap();
        assert_eq!(a.dims(), &[1, 1, 1, 2, 2, 2, 3, 4, 4]);
        assert!(free_module(&t, &[], 5).unwrap().is_zero());
        let m = free_module(&t, &[2, 4], 4).unwrap();
        assert_eq!(m.dims(), &[0, 0, 1, 1, 2]);
        a.check_adem_relations().unwrap();
        m.check_adem_relations().unwrap();
    }

    #[test]
    fn map_from_generators_examples() {
        let t = table();
        let a = Arc::new(free_module(&t, &[0], 6).unwrap());
        let s1 = Arc::new(free_module(&t, &[1], 6).unwrap());
        let zero = map_from_generators(
            &t,
            Arc::clone(&s1),
            Arc::clone(&a),
            &[ModuleElement::new(1, BitVec::zeros(1))],
        )
        .unwrap();
        assert!((0..=6).all(|d| zero.matrix(d).is_zero()));

        let f = right_multiplication(&t, &t.sq(1).unwrap(), 6).unwrap();
        assert_eq!(*f.matrix(1), BitMatrix::identity(1));
        f.check_linearity().unwrap();

        let q = a_mod_sq1(&t, 6).unwrap();
        let s2 = Arc::new(free_module(&t, &[2], 6).unwrap());
        let target = q.class_of(&t.sq(2).unwrap());
        let g = map_from_generators(&t, s2, Arc::clone(&q.module), &[target]).unwrap();
        // Sq^1 * gen goes to [Sq^1 Sq^2] = [Sq^3]
        let sq3 = q.class_of(&t.sq(3).unwrap());
        assert_eq!(g.apply(3, &BitVec::unit(1, 0)), sq3.vector);
        assert!(!sq3.vector.is_zero());

        let bad = map_from_generators(&t, s1, a, &[ModuleElement::new(2, BitVec::zeros(1))]);
        assert!(matches!(bad, Err(ModuleError::DegreeMismatch { .. })));
    }

    #[test]
    fn factor_examples() {
        let t = table();
        let a = Arc::new(free_module(&t, &[0], 8).unwrap());
        let id = factor_map(&ModuleMap::identity(Arc::clone(&a))).unwrap();
        assert!(id.kernel.is_zero() && id.cokernel.is_zero());
        assert_eq!(id.image.dims(), a.dims());

        let f = right_multiplication(&t, &t.sq(1).unwrap(), 8).unwrap();
        let fm = factor_map(&f).unwrap();
        assert_eq!(&fm.cokernel.dims()[..4], &[1, 0, 1, 1]);
        fm.kernel.check_adem_relations().unwrap();
        fm.cokernel.check_adem_relations().unwrap();
    }

    #[test]
    fn a_mod_sq1_examples() {
        let t = table();
        let q = a_mod_sq1(&t, 12).unwrap();
        assert_eq!(&q.module.dims()[..5], &[1, 0, 1, 1, 1]);
        let a = free_module(&t, &[0], 12).unwrap();
        for d in 1..=12 {
            assert_eq!(a.dim(d), q.module.dim(d) + q.module.dim(d - 1), "degree {d}");
        }
        // labels are the admissible monomials not ending in Sq^1
        for d in 0..=12 {
            for l in q.module.labels(d) {
                assert!(!l.ends_with("Sq^1"), "{l}");
            }
        }
        assert!(q.class_of(&t.sq(1).unwrap()).vector.is_zero());
        q.module.check_adem_relations().unwrap();
    }

    #[test]
    fn sums_and_suspensions() {
        let t = table();
        assert!(direct_sum(5, &[]).unwrap().is_zero());
        let a = free_module(&t, &[0], 6).unwrap();
        let up = suspend(&a, 1).unwrap();
        assert_eq!(up.dim(0), 0);
        assert_eq!(up.dim(4), a.dim(3));
        assert_eq!(suspend(&up, -1).unwrap().content_hash(), a.content_hash());
        assert!(matches!(suspend(&a, -1), Err(ModuleError::NegativeSuspension { .. })));
        let s = direct_sum(6, &[&a, &free_module(&t, &[2], 6).unwrap()]).unwrap();
        let f = free_module(&t, &[0, 2], 6).unwrap();
        assert_eq!(s.content_hash(), f.content_hash());
        assert_eq!(s.free_shifts(), f.free_shifts());
        s.check_adem_relations().unwrap();
    }
}
