use crate::{rref, BitMatrix, BitVec};

/// A subspace of `F2^n`, held as a basis in reduced row-echelon form.
///
/// Each basis row has its leading one at its pivot column, pivots increase
/// strictly, and every pivot column is zero in all other rows. So a member
/// vector `v` equals the sum of the rows whose pivot entry in `v` is set,
/// and its coordinates are simply `v` read at the pivots.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: BitMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: BitMatrix::zeros(0, ambient_dim),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: BitMatrix::identity(ambient_dim),
            pivots: (0..ambient_dim).collect(),
        }
    }

    /// The span of `vectors`.
    pub fn from_vectors(ambient_dim: usize, vectors: impl IntoIterator<Item = BitVec>) -> Self {
        let rows: Vec<BitVec> = vectors.into_iter().collect();
        let r = rref(&BitMatrix::from_rows(ambient_dim, &rows));
        let basis = BitMatrix::from_rows(
            ambient_dim,
            &(0..r.rank).map(|i| r.reduced.row(i)).collect::<Vec<_>>(),
        );
        Self {
            ambient_dim,
            basis,
            pivots: r.pivots,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis(&self) -> &BitMatrix {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<BitVec> {
        self.basis.row_vectors()
    }

    /// Replaces `v` by its canonical representative modulo this subspace
    /// (zero at every pivot column).
    pub fn reduce(&self, v: &mut BitVec) {
        assert_eq!(v.len(), self.ambient_dim, "reduce: dimension mismatch");
        for (r, &p) in self.pivots.iter().enumerate() {
            if v.get(p) {
                v.xor_words(self.basis.row_words(r));
            }
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }

    /// Coordinates of `v` in the basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &BitVec) -> Option<BitVec> {
        if !self.contains(v) {
            return None;
        }
        let mut c = BitVec::zeros(self.dim());
        for (r, &p) in self.pivots.iter().enumerate() {
            if v.get(p) {
                c.set(r, true);
            }
        }
        Some(c)
    }

    /// The member with the given coordinates.
    pub fn element(&self, coords: &BitVec) -> BitVec {
        assert_eq!(coords.len(), self.dim(), "element: coordinate length mismatch");
        let mut v = BitVec::zeros(self.ambient_dim);
        for r in coords.iter_ones() {
            v.xor_words(self.basis.row_words(r));
        }
        v
    }

    /// Adds `v` to the subspace, keeping the basis reduced. Returns whether
    /// the dimension grew.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        let Some(p) = w.first_one() else {
            return false;
        };
        let mut rows = self.vectors();
        for row in rows.iter_mut() {
            if row.get(p) {
                row.xor_assign(&w);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        rows.insert(at, w);
        self.pivots.insert(at, p);
        self.basis = BitMatrix::from_rows(self.ambient_dim, &rows);
        true
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim, "sum: ambient mismatch");
        Subspace::from_vectors(
            self.ambient_dim,
            self.vectors().into_iter().chain(other.vectors()),
        )
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.vectors().iter().all(|v| other.contains(v))
    }

    /// Column indices that are not pivots; these index the canonical
    /// complement.
    pub fn nonpivots(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient_dim];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient_dim).filter(|&c| !is_pivot[c]).collect()
    }
}

/// `F2^n / sub`, with the complement spanned by the non-pivot unit vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientSpace {
    sub: Subspace,
    nonpivots: Vec<usize>,
}

impl QuotientSpace {
    pub fn new(sub: Subspace) -> Self {
        let nonpivots = sub.nonpivots();
        Self { sub, nonpivots }
    }

    pub fn dim(&self) -> usize {
        self.nonpivots.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.sub.ambient_dim()
    }

    pub fn subspace(&self) -> &Subspace {
        &self.sub
    }

    /// Ambient indices of the complement basis, in order.
    pub fn complement_indices(&self) -> &[usize] {
        &self.nonpivots
    }

    pub fn project(&self, v: &BitVec) -> BitVec {
        let mut w = v.clone();
        self.sub.reduce(&mut w);
        let mut q = BitVec::zeros(self.dim());
        for (i, &c) in self.nonpivots.iter().enumerate() {
            if w.get(c) {
                q.set(i, true);
            }
        }
        q
    }

    pub fn lift(&self, q: &BitVec) -> BitVec {
        assert_eq!(q.len(), self.dim(), "lift: dimension mismatch");
        let mut v = BitVec::zeros(self.ambient_dim());
        for i in q.iter_ones() {
            v.set(self.nonpivots[i], true);
        }
        v
    }
}

/// Projection onto the canonical complement of `sub` and its section.
///
/// `proj` is `(n - dim sub) x n` with kernel `sub`; `lift` is
/// `n x (n - dim sub)` and `proj · lift` is the identity.
pub fn quotient_section(ambient_dim: usize, sub: &Subspace) -> (BitMatrix, BitMatrix) {
    assert_eq!(sub.ambient_dim(), ambient_dim, "quotient_section: ambient mismatch");
    let q = QuotientSpace::new(sub.clone());
    let proj_cols: Vec<BitVec> = (0..ambient_dim)
        .map(|j| q.project(&BitVec::unit(ambient_dim, j)))
        .collect();
    let lift_cols: Vec<BitVec> = (0..q.dim())
        .map(|i| q.lift(&BitVec::unit(q.dim(), i)))
        .collect();
    (
        BitMatrix::from_columns(q.dim(), &proj_cols),
        BitMatrix::from_columns(ambient_dim, &lift_cols),
    )
}
