use std::fmt;

use crate::{words_for, BitVec, Subspace, WORD_BITS};

/// A dense F2 matrix stored row-major, `stride` words per row.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Stacks the given vectors as rows. Every vector must have length `cols`.
    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has the wrong length");
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        m
    }

    /// The matrix whose `j`-th column is `columns[j]`, i.e. the map sending
    /// `e_j` to `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column {j} has the wrong length");
            for i in c.iter_ones() {
                m.set(i, j, true);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        (self.data[r * self.stride + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        let w = &mut self.data[r * self.stride + c / WORD_BITS];
        let mask = 1u64 << (c % WORD_BITS);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVec {
        BitVec::from_words(self.cols, self.row_words(r).to_vec())
    }

    pub fn column(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn row_vectors(&self) -> Vec<BitVec> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn columns(&self) -> Vec<BitVec> {
        self.transpose().row_vectors()
    }

    #[inline]
    fn xor_row_into(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..(src + 1) * s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s], &mut lo[dst * s..(dst + 1) * s])
        };
        for (d, x) in b.iter_mut().zip(a) {
            *d ^= x;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// `self · x`.
    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols, "mul_vec: dimension mismatch");
        let mut out = BitVec::zeros(self.rows);
        let xw = x.words();
        for r in 0..self.rows {
            let parity = self
                .row_words(r)
                .iter()
                .zip(xw)
                .map(|(a, b)| (a & b).count_ones())
                .sum::<u32>();
            if parity % 2 == 1 {
                out.set(r, true);
            }
        }
        out
    }

    /// The matrix product `self · other`.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "mul: dimension mismatch");
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let dst = r * out.stride;
            for k in row_ones(self.row_words(r)) {
                let src = other.row_words(k);
                for (d, x) in out.data[dst..dst + out.stride].iter_mut().zip(src) {
                    *d ^= x;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in row_ones(self.row_words(r)) {
                t.set(c, r, true);
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn rank(&self) -> usize {
        rref(self).rank
    }

    /// Gauss-Jordan elimination in place, choosing pivots only among the
    /// first `limit` columns. Returns the pivot columns in increasing order.
    fn reduce_in_place(&mut self, limit: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..limit.min(self.cols) {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(p, r);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_row_into(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// The block of columns `start .. start + len`.
    pub fn column_block(&self, start: usize, len: usize) -> BitMatrix {
        assert!(start + len <= self.cols, "column block out of range");
        let mut out = BitMatrix::zeros(self.rows, len);
        for r in 0..self.rows {
            for c in row_ones(self.row_words(r)).filter(|&c| c >= start && c < start + len) {
                out.set(r, c - start, true);
            }
        }
        out
    }

    /// `[self | other]`.
    pub fn hconcat(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows, other.rows, "hconcat: row mismatch");
        let mut out = BitMatrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            let dst = r * out.stride;
            out.data[dst..dst + self.stride].copy_from_slice(self.row_words(r));
            for c in row_ones(other.row_words(r)) {
                out.set(r, self.cols + c, true);
            }
        }
        out
    }
}

impl BitMatrix {
    /// `self` stacked above `other`.
    pub fn vconcat(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols, "vconcat: column mismatch");
        let mut out = BitMatrix::zeros(self.rows + other.rows, self.cols);
        out.data[..self.data.len()].copy_from_slice(&self.data);
        out.data[self.data.len()..].copy_from_slice(&other.data);
        out
    }
}

fn row_ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD_BITS + b)
            }
        })
    })
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row(r))?;
        }
        Ok(())
    }
}

/// Reduced row-echelon form of a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    /// Same shape as the input; rows past `rank` are zero.
    pub reduced: BitMatrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

pub fn rref(m: &BitMatrix) -> Rref {
    let mut reduced = m.clone();
    let pivots = reduced.reduce_in_place(m.cols);
    Rref {
        rank: pivots.len(),
        reduced,
        pivots,
    }
}

/// Basis of `{ v : m·v = 0 }`, in reduced form.
pub fn kernel_basis(m: &BitMatrix) -> Subspace {
    let Rref { reduced, pivots, .. } = rref(m);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let vectors = (0..m.cols).filter(|&f| !is_pivot[f]).map(|f| {
        let mut v = BitVec::unit(m.cols, f);
        for (r, &p) in pivots.iter().enumerate() {
            if reduced.get(r, f) {
                v.set(p, true);
            }
        }
        v
    });
    Subspace::from_vectors(m.cols, vectors)
}

/// Repeated solving of `m·x = b` for a fixed `m`.
///
/// Keeps the row operations `E` with `E·m = rref(m)`. The solution returned
/// sets every free variable to zero, so it is canonical.
#[derive(Clone, Debug)]
pub struct Solver {
    cols: usize,
    rows: usize,
    pivots: Vec<usize>,
    transform: BitMatrix,
}

impl Solver {
    pub fn new(m: &BitMatrix) -> Self {
        let mut aug = m.hconcat(&BitMatrix::identity(m.rows));
        let pivots = aug.reduce_in_place(m.cols);
        let transform = aug.column_block(m.cols, m.rows);
        Self {
            cols: m.cols,
            rows: m.rows,
            pivots,
            transform,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn solve(&self, b: &BitVec) -> Option<BitVec> {
        assert_eq!(b.len(), self.rows, "solve: right-hand side has wrong length");
        let eb = self.transform.mul_vec(b);
        if (self.pivots.len()..self.rows).any(|r| eb.get(r)) {
            return None;
        }
        let mut x = BitVec::zeros(self.cols);
        for (r, &p) in self.pivots.iter().enumerate() {
            if eb.get(r) {
                x.set(p, true);
            }
        }
        Some(x)
    }
}

/// Some `x` with `m·x = b`, or `None` when `b` is not in the column space.
pub fn solve(m: &BitMatrix, b: &BitVec) -> Option<BitVec> {
    Solver::new(m).solve(b)
}
