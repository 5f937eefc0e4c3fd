//! The mod 2 Steenrod algebra in the admissible basis.
//!
//! Basis elements of degree `t` are admissible sequences `(i_1, ..., i_k)`
//! with `i_j >= 2 i_{j+1}`, standing for `Sq^{i_1} ... Sq^{i_k}`. Within a
//! degree they are ordered descending-lexicographically, so degree 6 reads
//! `Sq^6, Sq^5 Sq^1, Sq^4 Sq^2`. This ordering is what every bit vector of
//! algebra coordinates in the crate refers to.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use extlab_f2::{BitMatrix, BitVec, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SteenrodError {
    #[error("degree {degree} exceeds the algebra bound {max}")]
    DegreeOutOfRange { degree: usize, max: usize },
    #[error("decomposability is undefined in degree 0")]
    DegreeZero,
    #[error("{0} is not an admissible sequence")]
    NotAdmissible(AdmissibleMonomial),
}

/// `Sq^{i_1} ... Sq^{i_k}`; the empty list is the unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissibleMonomial(Vec<u32>);

impl AdmissibleMonomial {
    pub fn unit() -> Self {
        Self(Vec::new())
    }

    pub fn new(exponents: Vec<u32>) -> Result<Self, SteenrodError> {
        let m = Self(exponents);
        if m.is_admissible() {
            Ok(m)
        } else {
            Err(SteenrodError::NotAdmissible(m))
        }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&i| i as usize).sum()
    }

    pub fn is_admissible(&self) -> bool {
        self.0.iter().all(|&i| i > 0) && self.0.windows(2).all(|w| w[0] >= 2 * w[1])
    }
}

impl fmt::Display for AdmissibleMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(|i| format!("Sq^{i}")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// A homogeneous element, as coordinates over the admissible basis of its
/// degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    degree: usize,
    coords: BitVec,
}

impl AlgebraElement {
    pub fn new(degree: usize, coords: BitVec) -> Self {
        Self { degree, coords }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coords(&self) -> &BitVec {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }

    pub fn add_assign(&mut self, other: &AlgebraElement) {
        assert_eq!(self.degree, other.degree, "adding elements of different degree");
        self.coords.xor_assign(&other.coords);
    }
}

/// Order in which inadmissible adjacent pairs are rewritten.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RewriteStrategy {
    LeftmostFirst,
    RightmostFirst,
}

/// `binom(n, k) mod 2` by Lucas' theorem.
#[inline]
pub fn binomial_odd(n: u32, k: u32) -> bool {
    k & !n == 0
}

/// Bases, product tables and antipodes of the algebra through `max_degree`.
///
/// Everything except the decomposables is built eagerly in [`new`], so a
/// table can be shared freely across threads.
///
/// [`new`]: AlgebraTable::new
pub struct AlgebraTable {
    max_degree: usize,
    basis: Vec<Vec<AdmissibleMonomial>>,
    index: Vec<HashMap<Vec<u32>, usize>>,
    // products[da][db] row `ia * dim(db) + ib` is basis(da)[ia] * basis(db)[ib]
    products: Vec<Vec<BitMatrix>>,
    chi_sq: Vec<AlgebraElement>,
    decomposables: Vec<OnceLock<Subspace>>,
}

impl fmt::Debug for AlgebraTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgebraTable")
            .field("max_degree", &self.max_degree)
            .finish_non_exhaustive()
    }
}

impl AlgebraTable {
    pub fn new(max_degree: usize) -> Self {
        let basis: Vec<Vec<AdmissibleMonomial>> =
            (0..=max_degree).map(admissible_sequences).collect();
        let index = basis
            .iter()
            .map(|b| {
                b.iter()
                    .enumerate()
                    .map(|(i, m)| (m.0.clone(), i))
                    .collect::<HashMap<_, _>>()
            })
            .collect();
        let mut table = Self {
            max_degree,
            basis,
            index,
            products: Vec::new(),
            chi_sq: Vec::new(),
            decomposables: (0..=max_degree).map(|_| OnceLock::new()).collect(),
        };
        table.products = table.build_products();
        table.chi_sq = table.build_chi_sq();
        table
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    fn check_degree(&self, degree: usize) -> Result<(), SteenrodError> {
        if degree > self.max_degree {
            Err(SteenrodError::DegreeOutOfRange {
                degree,
                max: self.max_degree,
            })
        } else {
            Ok(())
        }
    }

    /// Dimension of the degree `t` part; zero beyond the bound.
    pub fn dim(&self, t: usize) -> usize {
        self.basis.get(t).map_or(0, Vec::len)
    }

    pub fn enumerate_admissible(&self, t: usize) -> Result<&[AdmissibleMonomial], SteenrodError> {
        self.check_degree(t)?;
        Ok(&self.basis[t])
    }

    pub fn basis_element(&self, t: usize, idx: usize) -> &AdmissibleMonomial {
        &self.basis[t][idx]
    }

    pub fn index_of(&self, m: &AdmissibleMonomial) -> Option<usize> {
        self.index.get(m.degree())?.get(&m.0).copied()
    }

    pub fn zero(&self, degree: usize) -> AlgebraElement {
        AlgebraElement::new(degree, BitVec::zeros(self.dim(degree)))
    }

    pub fn unit(&self) -> AlgebraElement {
        AlgebraElement::new(0, BitVec::unit(1, 0))
    }

    /// `Sq^n` as an element.
    pub fn sq(&self, n: usize) -> Result<AlgebraElement, SteenrodError> {
        self.check_degree(n)?;
        if n == 0 {
            return Ok(self.unit());
        }
        let idx = self.index[n][&vec![n as u32]];
        Ok(AlgebraElement::new(n, BitVec::unit(self.dim(n), idx)))
    }

    pub fn monomial(&self, m: &AdmissibleMonomial) -> Result<AlgebraElement, SteenrodError> {
        self.check_degree(m.degree())?;
        let idx = self
            .index_of(m)
            .ok_or_else(|| SteenrodError::NotAdmissible(m.clone()))?;
        Ok(AlgebraElement::new(m.degree(), BitVec::unit(self.dim(m.degree()), idx)))
    }

    /// Rewrites `Sq^{w_1} ... Sq^{w_k}` into the admissible basis, leftmost
    /// inadmissible pair first.
    pub fn adem_reduce(&self, word: &[u32]) -> Result<AlgebraElement, SteenrodError> {
        self.adem_reduce_with(word, RewriteStrategy::LeftmostFirst)
    }

    pub fn adem_reduce_with(
        &self,
        word: &[u32],
        strategy: RewriteStrategy,
    ) -> Result<AlgebraElement, SteenrodError> {
        let degree = word.iter().map(|&w| w as usize).sum();
        self.check_degree(degree)?;
        let mut memo = HashMap::new();
        let coords = self.rewrite(word, strategy, &mut memo);
        Ok(AlgebraElement::new(degree, coords))
    }

    fn rewrite(
        &self,
        word: &[u32],
        strategy: RewriteStrategy,
        memo: &mut HashMap<Vec<u32>, BitVec>,
    ) -> BitVec {
        let word: Vec<u32> = word.iter().copied().filter(|&w| w > 0).collect();
        if let Some(v) = memo.get(&word) {
            return v.clone();
        }
        let degree: usize = word.iter().map(|&w| w as usize).sum();
        let bad = |j: &usize| word[*j] < 2 * word[*j + 1];
        let pair = match strategy {
            RewriteStrategy::LeftmostFirst => (0..word.len().saturating_sub(1)).find(bad),
            RewriteStrategy::RightmostFirst => (0..word.len().saturating_sub(1)).rev().find(bad),
        };
        let result = match pair {
            None => BitVec::unit(self.dim(degree), self.index[degree][&word]),
            Some(j) => {
                let (a, b) = (word[j], word[j + 1]);
                let mut acc = BitVec::zeros(self.dim(degree));
                // Sq^a Sq^b = sum_c binom(b - c - 1, a - 2c) Sq^{a+b-c} Sq^c
                for c in 0..=a / 2 {
                    if binomial_odd(b - c - 1, a - 2 * c) {
                        let mut next = Vec::with_capacity(word.len());
                        next.extend_from_slice(&word[..j]);
                        next.push(a + b - c);
                        next.push(c);
                        next.extend_from_slice(&word[j + 2..]);
                        acc.xor_assign(&self.rewrite(&next, strategy, memo));
                    }
                }
                acc
            }
        };
        memo.insert(word, result.clone());
        result
    }

    fn build_products(&self) -> Vec<Vec<BitMatrix>> {
        let n = self.max_degree;
        let mut memo = HashMap::new();
        // sq_left[i][d] row c: Sq^i * basis(d)[c]
        let mut sq_left: Vec<Vec<BitMatrix>> = vec![Vec::new(); n + 1];
        for i in 1..=n {
            for d in 0..=n - i {
                let rows: Vec<BitVec> = self.basis[d]
                    .iter()
                    .map(|m| {
                        let mut w = vec![i as u32];
                        w.extend_from_slice(&m.0);
                        self.rewrite(&w, RewriteStrategy::LeftmostFirst, &mut memo)
                    })
                    .collect();
                sq_left[i].push(BitMatrix::from_rows(self.dim(i + d), &rows));
            }
        }
        let mut products = Vec::with_capacity(n + 1);
        for da in 0..=n {
            let mut row = Vec::with_capacity(n + 1 - da);
            for db in 0..=n - da {
                let mut rows = Vec::with_capacity(self.dim(da) * self.dim(db));
                for a in &self.basis[da] {
                    for ib in 0..self.dim(db) {
                        let mut v = BitVec::unit(self.dim(db), ib);
                        let mut deg = db;
                        for &i in a.0.iter().rev() {
                            let table = &sq_left[i as usize][deg];
                            let mut next = BitVec::zeros(self.dim(deg + i as usize));
                            for c in v.iter_ones() {
                                next.xor_assign(&table.row(c));
                            }
                            v = next;
                            deg += i as usize;
                        }
                        rows.push(v);
                    }
                }
                row.push(BitMatrix::from_rows(self.dim(da + db), &rows));
            }
            products.push(row);
        }
        products
    }

    /// Product of two basis elements, as a row of the product table.
    #[inline]
    pub fn product_of_basis(&self, da: usize, ia: usize, db: usize, ib: usize) -> BitVec {
        self.products[da][db].row(ia * self.dim(db) + ib)
    }

    pub fn multiply(
        &self,
        a: &AlgebraElement,
        b: &AlgebraElement,
    ) -> Result<AlgebraElement, SteenrodError> {
        let degree = a.degree + b.degree;
        self.check_degree(degree)?;
        let mut out = BitVec::zeros(self.dim(degree));
        for ia in a.coords.iter_ones() {
            for ib in b.coords.iter_ones() {
                out.xor_assign(&self.product_of_basis(a.degree, ia, b.degree, ib));
            }
        }
        Ok(AlgebraElement::new(degree, out))
    }

    fn build_chi_sq(&self) -> Vec<AlgebraElement> {
        let mut chi: Vec<AlgebraElement> = vec![self.unit()];
        for n in 1..=self.max_degree {
            let mut acc = self.zero(n);
            for (j, chi_j) in chi.iter().enumerate() {
                let sq = self.sq(n - j).expect("degree in range");
                acc.add_assign(&self.multiply(&sq, chi_j).expect("degree in range"));
            }
            chi.push(acc);
        }
        chi
    }

    /// `chi(Sq^n)` from `sum_{i+j=n} Sq^i chi(Sq^j) = 0`.
    pub fn antipode_sq(&self, n: usize) -> Result<AlgebraElement, SteenrodError> {
        self.check_degree(n)?;
        Ok(self.chi_sq[n].clone())
    }

    /// The anti-automorphism `chi`, extended linearly from
    /// `chi(Sq^{i_1} ... Sq^{i_k}) = chi(Sq^{i_k}) ... chi(Sq^{i_1})`.
    pub fn antipode_elem(&self, x: &AlgebraElement) -> Result<AlgebraElement, SteenrodError> {
        self.check_degree(x.degree)?;
        let mut out = self.zero(x.degree);
        for idx in x.coords.iter_ones() {
            let mut acc = self.unit();
            for &i in &self.basis[x.degree][idx].0 {
                acc = self.multiply(&self.chi_sq[i as usize], &acc)?;
            }
            out.add_assign(&acc);
        }
        Ok(out)
    }

    /// Span of all products `a*b` with `|a|, |b| >= 1` in degree `t`.
    pub fn decomposables(&self, t: usize) -> Result<&Subspace, SteenrodError> {
        self.check_degree(t)?;
        Ok(self.decomposables[t].get_or_init(|| {
            let mut rows = Vec::new();
            for da in 1..t {
                let m = &self.products[da][t - da];
                rows.extend(m.row_vectors());
            }
            Subspace::from_vectors(self.dim(t), rows)
        }))
    }

    pub fn is_decomposable(&self, x: &AlgebraElement) -> Result<bool, SteenrodError> {
        if x.degree == 0 {
            return Err(SteenrodError::DegreeZero);
        }
        Ok(self.decomposables(x.degree)?.contains(&x.coords))
    }

    /// Human-readable sum of admissible monomials.
    pub fn format_element(&self, x: &AlgebraElement) -> String {
        if x.is_zero() {
            return "0".to_string();
        }
        x.coords
            .iter_ones()
            .map(|i| self.basis[x.degree][i].to_string())
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Admissible sequences of degree `t`, descending-lexicographic.
fn admissible_sequences(t: usize) -> Vec<AdmissibleMonomial> {
    fn go(remaining: u32, max_first: u32, prefix: &mut Vec<u32>, out: &mut Vec<AdmissibleMonomial>) {
        if remaining == 0 {
            out.push(AdmissibleMonomial(prefix.clone()));
            return;
        }
        for i in (1..=remaining.min(max_first)).rev() {
            // a tail starting at most i/2 sums to less than i
            if remaining - i >= i.max(1) {
                continue;
            }
            prefix.push(i);
            go(remaining - i, i / 2, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(t as u32, t as u32, &mut Vec::new(), &mut out);
    out
}
