//! Minimal free resolutions, built by a degreewise sweep.
//!
//! For each internal degree `t` (outer) and homological degree `s` (inner)
//! the engine compares `ker(d_{s-1})_t` with the image of the generators of
//! `P_s` already chosen in lower degrees, and adjoins one new generator per
//! vector of a canonical complement. Generator counts are then the
//! dimensions of `Ext^{s,t}`.

use std::sync::Arc;

use extlab_f2::{kernel_basis, BitMatrix, BitVec, Subspace};
use serde::Serialize;

use crate::module::GradedModule;
use crate::steenrod::AlgebraTable;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolveError {
    #[error("module is only known through degree {module_max_t}, resolution asks for {max_t}")]
    ModuleTooSmall { module_max_t: usize, max_t: usize },
    #[error("algebra table stops at degree {table_max}, resolution asks for {max_t}")]
    TableTooSmall { table_max: usize, max_t: usize },
    #[error("d∘d is nonzero on generator {generator} of P_{s}")]
    NotAComplex { s: usize, generator: usize },
    #[error("generator {generator} of P_{s} has a unit coefficient in its differential")]
    NotMinimal { s: usize, generator: usize },
    #[error("resolution is not exact at (s, t) = ({s}, {t})")]
    NotExact { s: usize, t: usize },
    #[error("bad generator ordering: {0}")]
    BadOrdering(String),
}

/// Something the Steenrod algebra acts on, degreewise.
pub trait ModuleAction {
    fn dim(&self, t: usize) -> usize;

    /// `a x` for `a` the basis element `ia` of degree `da` and `x` of degree `d`.
    fn act_basis(&self, table: &AlgebraTable, da: usize, ia: usize, d: usize, x: &BitVec) -> BitVec;
}

impl ModuleAction for GradedModule {
    fn dim(&self, t: usize) -> usize {
        GradedModule::dim(self, t)
    }

    fn act_basis(&self, table: &AlgebraTable, da: usize, ia: usize, d: usize, x: &BitVec) -> BitVec {
        if da == 0 {
            return x.clone();
        }
        self.act_monomial(table.basis_element(da, ia).exponents(), d, x)
    }
}

/// A free module on generators listed in non-decreasing degree.
///
/// Degree `t` has basis `(g, m)`: for each generator in order, the
/// admissible monomials of degree `t - |g|` in the algebra's order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeModule {
    max_t: usize,
    alg_dims: Vec<usize>,
    degrees: Vec<usize>,
    // offsets[t][g] is where generator g's block starts in degree t;
    // offsets[t][n] is the total dimension
    offsets: Vec<Vec<usize>>,
}

impl FreeModule {
    pub fn new(table: &AlgebraTable, max_t: usize) -> Self {
        Self {
            max_t,
            alg_dims: (0..=max_t).map(|t| table.dim(t)).collect(),
            degrees: Vec::new(),
            offsets: vec![vec![0]; max_t + 1],
        }
    }

    pub fn with_generators(table: &AlgebraTable, max_t: usize, degrees: &[usize]) -> Result<Self, ResolveError> {
        let mut f = Self::new(table, max_t);
        for &d in degrees {
            f.push_generator(d)?;
        }
        Ok(f)
    }

    pub fn push_generator(&mut self, degree: usize) -> Result<usize, ResolveError> {
        if self.degrees.last().is_some_and(|&d| d > degree) {
            return Err(ResolveError::BadOrdering(
                "generators must be added in non-decreasing degree".into(),
            ));
        }
        self.degrees.push(degree);
        for (t, off) in self.offsets.iter_mut().enumerate() {
            let total = *off.last().expect("offsets are never empty");
            let block = if t >= degree { self.alg_dims[t - degree] } else { 0 };
            off.push(total + block);
        }
        Ok(self.degrees.len() - 1)
    }

    pub fn max_t(&self) -> usize {
        self.max_t
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn num_generators(&self) -> usize {
        self.degrees.len()
    }

    /// Indices of the generators of degree exactly `t`.
    pub fn generators_in(&self, t: usize) -> std::ops::Range<usize> {
        let lo = self.degrees.partition_point(|&d| d < t);
        let hi = self.degrees.partition_point(|&d| d <= t);
        lo..hi
    }

    /// Index of the basis vector `(g, 1)` in degree `|g|`.
    pub fn generator_position(&self, g: usize) -> usize {
        self.offsets[self.degrees[g]][g]
    }

    pub fn block_offset(&self, t: usize, g: usize) -> usize {
        self.offsets[t][g]
    }

    /// The generator owning basis index `i` in degree `t`, and the index
    /// within its block.
    pub fn locate(&self, t: usize, i: usize) -> (usize, usize) {
        let off = &self.offsets[t];
        let g = off.partition_point(|&o| o <= i) - 1;
        (g, i - off[g])
    }
}

impl ModuleAction for FreeModule {
    fn dim(&self, t: usize) -> usize {
        self.offsets.get(t).map_or(0, |o| *o.last().expect("offsets are never empty"))
    }

    fn act_basis(&self, table: &AlgebraTable, da: usize, ia: usize, d: usize, x: &BitVec) -> BitVec {
        let t = d + da;
        let mut out = BitVec::zeros(self.dim(t));
        if da == 0 {
            out.xor_assign(x);
            return out;
        }
        let src = &self.offsets[d];
        let dst = &self.offsets[t];
        let mut g = 0;
        for i in x.iter_ones() {
            while src[g + 1] <= i {
                g += 1;
            }
            let db = d - self.degrees[g];
            let prod = table.product_of_basis(da, ia, db, i - src[g]);
            out.xor_at(dst[g], &prod);
        }
        out
    }
}

/// Matrix in degree `t` of the A-linear map out of `source` sending
/// generator `g` to `values[g]` (an element of `target` in degree `|g|`).
pub fn extend_from_generators<T: ModuleAction + ?Sized>(
    table: &AlgebraTable,
    source: &FreeModule,
    values: &[BitVec],
    target: &T,
    t: usize,
) -> BitMatrix {
    let mut columns = Vec::with_capacity(source.dim(t));
    for (g, &d) in source.degrees().iter().enumerate() {
        if d > t {
            break;
        }
        for ia in 0..table.dim(t - d) {
            columns.push(target.act_basis(table, t - d, ia, d, &values[g]));
        }
    }
    BitMatrix::from_columns(target.dim(t), &columns)
}

/// Bigraded dimension table with `0 <= s <= max_s`, `0 <= t <= max_t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtChart {
    pub max_s: usize,
    pub max_t: usize,
    /// dims[s][t]
    pub dims: Vec<Vec<usize>>,
}

impl ExtChart {
    pub fn zeros(max_s: usize, max_t: usize) -> Self {
        Self {
            max_s,
            max_t,
            dims: vec![vec![0; max_t + 1]; max_s + 1],
        }
    }

    /// Zero outside the table.
    pub fn get(&self, s: usize, t: usize) -> usize {
        self.dims.get(s).and_then(|r| r.get(t)).copied().unwrap_or(0)
    }

    /// Nonzero entries as `(s, t, dim)`.
    pub fn nonzero(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (s, row) in self.dims.iter().enumerate() {
            for (t, &d) in row.iter().enumerate() {
                if d > 0 {
                    out.push((s, t, d));
                }
            }
        }
        out
    }

    /// The chart of `Σ^{shift} M` given that of `M`, i.e. entries move from
    /// `t` to `t + shift`. Negative shifts drop `t < -shift`.
    pub fn shifted(&self, shift: isize) -> ExtChart {
        let max_t = (self.max_t as isize + shift).max(0) as usize;
        let mut out = ExtChart::zeros(self.max_s, max_t);
        for s in 0..=self.max_s {
            for t in 0..=max_t {
                let src = t as isize - shift;
                if src >= 0 {
                    out.dims[s][t] = self.get(s, src as usize);
                }
            }
        }
        out
    }
}

/// A minimal free resolution `P_max_s -> ... -> P_0 -> M` through internal
/// degree `max_t`.
#[derive(Clone, Debug)]
pub struct Resolution {
    module: Arc<GradedModule>,
    module_hash: String,
    max_s: usize,
    max_t: usize,
    free: Vec<FreeModule>,
    // diffs[0][g] in M_{|g|}; diffs[s][g] in P_{s-1} in degree |g|
    diffs: Vec<Vec<BitVec>>,
    // mats[s][t] : (P_s)_t -> (P_{s-1})_t, or the augmentation when s = 0
    mats: Vec<Vec<BitMatrix>>,
}

/// Content hash of `module` as seen by a resolution through `max_t`.
pub fn resolution_key(module: &GradedModule, max_t: usize) -> String {
    module.truncate(max_t).content_hash()
}

pub fn minimal_resolution(
    table: &AlgebraTable,
    module: Arc<GradedModule>,
    max_s: usize,
    max_t: usize,
) -> Result<Resolution, ResolveError> {
    check_bounds(table, &module, max_t)?;
    let mut free: Vec<FreeModule> = (0..=max_s).map(|_| FreeModule::new(table, max_t)).collect();
    let mut diffs: Vec<Vec<BitVec>> = vec![Vec::new(); max_s + 1];
    let mut mats: Vec<Vec<BitMatrix>> = vec![Vec::new(); max_s + 1];
    for t in 0..=max_t {
        for s in 0..=max_s {
            let (lower, upper) = free.split_at_mut(s);
            let p = &mut upper[0];
            let (old, kernel) = if s == 0 {
                let old = extend_from_generators(table, p, &diffs[0], module.as_ref(), t);
                (old, Subspace::full(module.dim(t)))
            } else {
                let old = extend_from_generators(table, p, &diffs[s], &lower[s - 1], t);
                (old, kernel_basis(&mats[s - 1][t]))
            };
            let mut image = Subspace::from_vectors(old.rows(), old.columns());
            let mut columns = old.columns();
            for v in kernel.vectors() {
                if image.insert(&v) {
                    p.push_generator(t)?;
                    diffs[s].push(v.clone());
                    columns.push(v);
                }
            }
            mats[s].push(BitMatrix::from_columns(old.rows(), &columns));
        }
    }
    let module_hash = resolution_key(&module, max_t);
    Ok(Resolution {
        module,
        module_hash,
        max_s,
        max_t,
        free,
        diffs,
        mats,
    })
}

fn check_bounds(table: &AlgebraTable, module: &GradedModule, max_t: usize) -> Result<(), ResolveError> {
    if module.max_t() < max_t {
        return Err(ResolveError::ModuleTooSmall {
            module_max_t: module.max_t(),
            max_t,
        });
    }
    if table.max_degree() < max_t {
        return Err(ResolveError::TableTooSmall {
            table_max: table.max_degree(),
            max_t,
        });
    }
    Ok(())
}

impl Resolution {
    /// Rebuilds a resolution from its generators and differentials, then
    /// checks that `d∘d = 0`.
    pub fn from_parts(
        table: &AlgebraTable,
        module: Arc<GradedModule>,
        max_s: usize,
        max_t: usize,
        degrees: Vec<Vec<usize>>,
        diffs: Vec<Vec<BitVec>>,
    ) -> Result<Resolution, ResolveError> {
        check_bounds(table, &module, max_t)?;
        if degrees.len() != max_s + 1 || diffs.len() != max_s + 1 {
            return Err(ResolveError::BadOrdering("one generator list per s expected".into()));
        }
        let free = degrees
            .iter()
            .map(|d| FreeModule::with_generators(table, max_t, d))
            .collect::<Result<Vec<_>, _>>()?;
        for s in 0..=max_s {
            if diffs[s].len() != degrees[s].len() {
                return Err(ResolveError::BadOrdering(format!("P_{s} has mismatched differential data")));
            }
            for (g, (v, &d)) in diffs[s].iter().zip(&degrees[s]).enumerate() {
                let want = if s == 0 { module.dim(d) } else { free[s - 1].dim(d) };
                if d > max_t || v.len() != want {
                    return Err(ResolveError::BadOrdering(format!(
                        "differential of generator {g} of P_{s} has the wrong shape"
                    )));
                }
            }
        }
        let mats = (0..=max_s)
            .map(|s| {
                (0..=max_t)
                    .map(|t| {
                        if s == 0 {
                            extend_from_generators(table, &free[0], &diffs[0], module.as_ref(), t)
                        } else {
                            extend_from_generators(table, &free[s], &diffs[s], &free[s - 1], t)
                        }
                    })
                    .collect()
            })
            .collect();
        let module_hash = resolution_key(&module, max_t);
        let r = Resolution {
            module,
            module_hash,
            max_s,
            max_t,
            free,
            diffs,
            mats,
        };
        r.check_complex()?;
        Ok(r)
    }

    pub fn module(&self) -> &Arc<GradedModule> {
        &self.module
    }

    pub fn module_hash(&self) -> &str {
        &self.module_hash
    }

    pub fn max_s(&self) -> usize {
        self.max_s
    }

    pub fn max_t(&self) -> usize {
        self.max_t
    }

    pub fn free(&self, s: usize) -> &FreeModule {
        &self.free[s]
    }

    /// Degrees of the generators of `P_s`.
    pub fn generator_degrees(&self, s: usize) -> &[usize] {
        self.free[s].degrees()
    }

    pub fn num_generators(&self, s: usize, t: usize) -> usize {
        self.free[s].generators_in(t).len()
    }

    /// `d(g)` for generator `g` of `P_s` (for `s = 0`, its image in `M`).
    pub fn differential(&self, s: usize, g: usize) -> &BitVec {
        &self.diffs[s][g]
    }

    pub fn differentials(&self, s: usize) -> &[BitVec] {
        &self.diffs[s]
    }

    /// `d_s` in degree `t`; the augmentation when `s = 0`.
    pub fn differential_matrix(&self, s: usize, t: usize) -> &BitMatrix {
        &self.mats[s][t]
    }

    pub fn ext_chart(&self) -> ExtChart {
        let mut c = ExtChart::zeros(self.max_s, self.max_t);
        for s in 0..=self.max_s {
            for &d in self.free[s].degrees() {
                c.dims[s][d] += 1;
            }
        }
        c
    }

    /// `d∘d = 0` on every generator.
    pub fn check_complex(&self) -> Result<(), ResolveError> {
        for s in 1..=self.max_s {
            for (g, &d) in self.free[s].degrees().iter().enumerate() {
                if !self.mats[s - 1][d].mul_vec(&self.diffs[s][g]).is_zero() {
                    return Err(ResolveError::NotAComplex { s, generator: g });
                }
            }
        }
        Ok(())
    }

    /// No differential has a unit coefficient on a generator.
    pub fn check_minimal(&self) -> Result<(), ResolveError> {
        for s in 1..=self.max_s {
            let below = &self.free[s - 1];
            for (g, &d) in self.free[s].degrees().iter().enumerate() {
                for h in below.generators_in(d) {
                    if self.diffs[s][g].get(below.generator_position(h)) {
                        return Err(ResolveError::NotMinimal { s, generator: g });
                    }
                }
            }
        }
        Ok(())
    }

    /// `P_0 -> M` is onto and `ker d_s = im d_{s+1}` for `s < max_s`, in
    /// every degree through `max_t`.
    pub fn check_exact(&self) -> Result<(), ResolveError> {
        for t in 0..=self.max_t {
            if self.mats[0][t].rank() != self.module.dim(t) {
                return Err(ResolveError::NotExact { s: 0, t });
            }
            for s in 0..self.max_s {
                let m = &self.mats[s][t];
                if m.cols() - m.rank() != self.mats[s + 1][t].rank() {
                    return Err(ResolveError::NotExact { s: s + 1, t });
                }
            }
        }
        Ok(())
    }

    pub fn verify(&self) -> Result<(), ResolveError> {
        self.check_complex()?;
        self.check_minimal()?;
        self.check_exact()
    }

    /// The same resolution with the generators of each `P_s` reordered.
    /// `perms[s][new] = old`; each permutation must keep degrees non-decreasing.
    pub fn reorder_generators(&self, table: &AlgebraTable, perms: &[Vec<usize>]) -> Result<Resolution, ResolveError> {
        if perms.len() != self.max_s + 1 {
            return Err(ResolveError::BadOrdering("one permutation per s expected".into()));
        }
        let mut degrees = Vec::with_capacity(self.max_s + 1);
        for (s, perm) in perms.iter().enumerate() {
            let n = self.free[s].num_generators();
            let mut seen = vec![false; n];
            if perm.len() != n || perm.iter().any(|&o| o >= n || std::mem::replace(&mut seen[o], true)) {
                return Err(ResolveError::BadOrdering(format!("not a permutation of P_{s}")));
            }
            degrees.push(perm.iter().map(|&o| self.free[s].degrees()[o]).collect::<Vec<_>>());
        }
        let new_free = degrees
            .iter()
            .map(|d| FreeModule::with_generators(table, self.max_t, d))
            .collect::<Result<Vec<_>, _>>()?;
        let mut diffs = Vec::with_capacity(self.max_s + 1);
        for s in 0..=self.max_s {
            let row = perms[s]
                .iter()
                .map(|&old| {
                    let v = &self.diffs[s][old];
                    if s == 0 {
                        return v.clone();
                    }
                    // move every block of P_{s-1} to its new position
                    let d = self.free[s].degrees()[old];
                    let (src, dst) = (&self.free[s - 1], &new_free[s - 1]);
                    let mut out = BitVec::zeros(v.len());
                    for (new_h, &old_h) in perms[s - 1].iter().enumerate() {
                        let hd = src.degrees()[old_h];
                        if hd > d {
                            continue;
                        }
                        let len = table.dim(d - hd);
                        let block = v.slice(src.block_offset(d, old_h), len);
                        out.xor_at(dst.block_offset(d, new_h), &block);
                    }
                    out
                })
                .collect();
            diffs.push(row);
        }
        Resolution::from_parts(table, Arc::clone(&self.module), self.max_s, self.max_t, degrees, diffs)
    }

    /// Reverses the generators of every `P_s` within each degree.
    pub fn reversed_within_degrees(&self, table: &AlgebraTable) -> Result<Resolution, ResolveError> {
        let perms: Vec<Vec<usize>> = (0..=self.max_s)
            .map(|s| {
                let f = &self.free[s];
                (0..=self.max_t).flat_map(|t| f.generators_in(t).rev()).collect()
            })
            .collect();
        self.reorder_generators(table, &perms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::{a_mod_sq1, free_module};

    #[test]
    fn free_algebra_resolves_itself() {
        let t = AlgebraTable::new(10);
        let a = Arc::new(free_module(&t, &[0], 10).unwrap());
        let r = minimal_resolution(&t, a, 4, 10).unwrap();
        r.verify().unwrap();
        assert_eq!(r.ext_chart().nonzero(), vec![(0, 0, 1)]);
    }

    #[test]
    fn f2_low_range() {
        let t = AlgebraTable::new(10);
        let r = minimal_resolution(&t, Arc::new(GradedModule::f2(10)), 4, 10).unwrap();
        r.verify().unwrap();
        let c = r.ext_chart();
        assert_eq!(c.get(0, 0), 1);
        assert_eq!((c.get(1, 1), c.get(1, 2), c.get(1, 3), c.get(1, 4)), (1, 1, 0, 1));
        assert_eq!(c.get(2, 2), 1);
    }

    #[test]
    fn a_mod_sq1_is_a_tower() {
        let t = AlgebraTable::new(12);
        let q = a_mod_sq1(&t, 12).unwrap();
        let r = minimal_resolution(&t, q.module, 6, 12).unwrap();
        r.verify().unwrap();
        let c = r.ext_chart();
        for s in 0..=6 {
            for tt in 0..=12 {
                assert_eq!(c.get(s, tt), usize::from(s == tt), "({s},{tt})");
            }
        }
    }

    #[test]
    fn reordering_keeps_counts() {
        let t = AlgebraTable::new(10);
        let r = minimal_resolution(&t, Arc::new(GradedModule::f2(10)), 4, 10).unwrap();
        let p = r.reversed_within_degrees(&t).unwrap();
        p.verify().unwrap();
        assert_eq!(p.ext_chart(), r.ext_chart());
    }
}
