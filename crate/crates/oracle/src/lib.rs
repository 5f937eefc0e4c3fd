//! A second, deliberately naive route to `Ext_A(M, F2)`.
//!
//! Everything here is independent of `extlab-core`: the algebra is built in
//! the Milnor basis from the matrix product formula, modules are cyclic
//! quotients `A/L` given by a left ideal, the resolution is built with
//! redundant generators on purpose, and Ext is read off as the cohomology
//! of the dense cochain complex `Hom_A(P_*, F2)` rather than from
//! generator counts.

use extlab_f2::{kernel_basis, BitMatrix, BitVec, QuotientSpace, Subspace};

/// `Sq(r_1, r_2, ...)` with trailing zeros stripped.
pub type MilnorSeq = Vec<u32>;

/// Milnor sequences of total degree `t`, where `r_i` has weight `2^i - 1`.
pub fn milnor_sequences(t: usize) -> Vec<MilnorSeq> {
    fn go(rem: usize, i: usize, prefix: &mut Vec<u32>, out: &mut Vec<MilnorSeq>) {
        let w = (1usize << i) - 1;
        if rem == 0 {
            let mut r = prefix.clone();
            while r.last() == Some(&0) {
                r.pop();
            }
            out.push(r);
            return;
        }
        if w > rem {
            return;
        }
        for r in (0..=rem / w).rev() {
            prefix.push(r as u32);
            go(rem - r * w, i + 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(t, 1, &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

/// Sequences `T` with odd coefficient in `Sq(R) Sq(S)`.
pub fn milnor_product(r: &[u32], s: &[u32]) -> Vec<MilnorSeq> {
    // x[i][j] for i in 0..=rows, j in 0..=cols; row 0 and column 0 are
    // determined by the others
    let rows = r.len();
    let cols = s.len();
    let mut x = vec![vec![0u32; cols + 1]; rows + 1];
    let mut out = Vec::new();
    fill(r, s, 1, 1, &mut x, &mut out);
    out.sort();
    // terms appearing twice cancel
    let mut reduced: Vec<MilnorSeq> = Vec::new();
    for t in out {
        if reduced.last() == Some(&t) {
            reduced.pop();
        } else {
            reduced.push(t);
        }
    }
    reduced
}

fn fill(r: &[u32], s: &[u32], i: usize, j: usize, x: &mut [Vec<u32>], out: &mut Vec<MilnorSeq>) {
    let rows = r.len();
    let cols = s.len();
    if i > rows {
        // column sums: x[0][j] = s_j - sum_{i>=1} x[i][j]
        for jj in 1..=cols {
            let used: u32 = (1..=rows).map(|ii| x[ii][jj]).sum();
            if used > s[jj - 1] {
                return;
            }
            x[0][jj] = s[jj - 1] - used;
        }
        if let Some(t) = finish(x) {
            out.push(t);
        }
        return;
    }
    if j > cols {
        // row sums: x[i][0] = r_i - sum_{j>=1} 2^j x[i][j]
        let used: u32 = (1..=cols).map(|jj| x[i][jj] << jj).sum();
        if used > r[i - 1] {
            return;
        }
        x[i][0] = r[i - 1] - used;
        fill(r, s, i + 1, 1, x, out);
        return;
    }
    let used: u32 = (1..j).map(|jj| x[i][jj] << jj).sum();
    let col_used: u32 = (1..i).map(|ii| x[ii][j]).sum();
    let max_row = (r[i - 1].saturating_sub(used)) >> j;
    let max_col = s[j - 1].saturating_sub(col_used);
    for v in 0..=max_row.min(max_col) {
        x[i][j] = v;
        fill(r, s, i, j + 1, x, out);
    }
    x[i][j] = 0;
}

/// `T` for the matrix `x`, or `None` when the multinomial coefficient is even.
fn finish(x: &[Vec<u32>]) -> Option<MilnorSeq> {
    let rows = x.len() - 1;
    let cols = x[0].len() - 1;
    let mut t = Vec::new();
    for n in 1..=rows + cols {
        let mut acc = 0u32;
        let mut total = 0u32;
        for i in 0..=rows.min(n) {
            let j = n - i;
            if j > cols {
                continue;
            }
            let v = x[i][j];
            if acc & v != 0 {
                return None;
            }
            acc |= v;
            total += v;
        }
        t.push(total);
    }
    while t.last() == Some(&0) {
        t.pop();
    }
    Some(t)
}

/// The Steenrod algebra through a fixed degree, in the Milnor basis.
pub struct MilnorAlgebra {
    max_degree: usize,
    basis: Vec<Vec<MilnorSeq>>,
    // products[da][db][ia * dim(db) + ib]
    products: Vec<Vec<Vec<BitVec>>>,
}

impl MilnorAlgebra {
    pub fn new(max_degree: usize) -> Self {
        let basis: Vec<Vec<MilnorSeq>> = (0..=max_degree).map(milnor_sequences).collect();
        let index = |d: usize, seq: &MilnorSeq| -> usize {
            basis[d].binary_search(seq).expect("product lands in the basis")
        };
        let mut products = Vec::with_capacity(max_degree + 1);
        for da in 0..=max_degree {
            let mut row = Vec::with_capacity(max_degree + 1 - da);
            for db in 0..=max_degree - da {
                let mut entries = Vec::with_capacity(basis[da].len() * basis[db].len());
                for a in &basis[da] {
                    for b in &basis[db] {
                        let mut v = BitVec::zeros(basis[da + db].len());
                        for t in milnor_product(a, b) {
                            v.flip(index(da + db, &t));
                        }
                        entries.push(v);
                    }
                }
                row.push(entries);
            }
            products.push(row);
        }
        Self {
            max_degree,
            basis,
            products,
        }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn dim(&self, t: usize) -> usize {
        self.basis[t].len()
    }

    pub fn basis(&self, t: usize) -> &[MilnorSeq] {
        &self.basis[t]
    }

    pub fn index_of(&self, seq: &[u32]) -> Option<usize> {
        let d: usize = seq.iter().enumerate().map(|(i, &r)| r as usize * ((1 << (i + 1)) - 1)).sum();
        self.basis.get(d)?.binary_search(&seq.to_vec()).ok()
    }

    pub fn product(&self, da: usize, ia: usize, db: usize, ib: usize) -> &BitVec {
        &self.products[da][db][ia * self.dim(db) + ib]
    }

    /// `a * b` for arbitrary elements (coordinate vectors).
    pub fn multiply(&self, da: usize, a: &BitVec, db: usize, b: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.dim(da + db));
        for ia in a.iter_ones() {
            for ib in b.iter_ones() {
                out.xor_assign(self.product(da, ia, db, ib));
            }
        }
        out
    }
}

/// Which cyclic module `A/L` to resolve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CyclicModule {
    /// `L = 0`
    Free,
    /// `L = A^+`
    F2,
    /// `L = A Sq(1)`
    AModSq1,
}

/// `A/L` degreewise, as quotients of the algebra.
struct Cyclic<'a> {
    alg: &'a MilnorAlgebra,
    quotients: Vec<QuotientSpace>,
}

impl<'a> Cyclic<'a> {
    fn new(alg: &'a MilnorAlgebra, which: CyclicModule, max_t: usize) -> Self {
        let quotients = (0..=max_t)
            .map(|t| {
                let n = alg.dim(t);
                let ideal = match which {
                    CyclicModule::Free => Subspace::zero(n),
                    CyclicModule::F2 if t > 0 => Subspace::full(n),
                    CyclicModule::F2 => Subspace::zero(n),
                    CyclicModule::AModSq1 if t == 0 => Subspace::zero(n),
                    CyclicModule::AModSq1 => {
                        let sq1 = BitVec::unit(1, 0);
                        Subspace::from_vectors(
                            n,
                            (0..alg.dim(t - 1)).map(|i| alg.multiply(t - 1, &BitVec::unit(alg.dim(t - 1), i), 1, &sq1)),
                        )
                    }
                };
                QuotientSpace::new(ideal)
            })
            .collect();
        Self { alg, quotients }
    }

    fn dim(&self, t: usize) -> usize {
        self.quotients[t].dim()
    }

    /// `a [x]` for basis element `ia` of degree `da`, `x` in degree `d`.
    fn act(&self, da: usize, ia: usize, d: usize, x: &BitVec) -> BitVec {
        let lifted = self.quotients[d].lift(x);
        let a = BitVec::unit(self.alg.dim(da), ia);
        self.quotients[d + da].project(&self.alg.multiply(da, &a, d, &lifted))
    }
}

struct Free {
    degrees: Vec<usize>,
}

impl Free {
    fn offsets(&self, alg: &MilnorAlgebra, t: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degrees.len() + 1);
        let mut acc = 0;
        for &d in &self.degrees {
            out.push(acc);
            if d <= t {
                acc += alg.dim(t - d);
            }
        }
        out.push(acc);
        out
    }

    fn dim(&self, alg: &MilnorAlgebra, t: usize) -> usize {
        *self.offsets(alg, t).last().expect("nonempty")
    }

    fn act(&self, alg: &MilnorAlgebra, da: usize, ia: usize, d: usize, x: &BitVec) -> BitVec {
        let src = self.offsets(alg, d);
        let dst = self.offsets(alg, d + da);
        let mut out = BitVec::zeros(*dst.last().expect("nonempty"));
        for (g, &gd) in self.degrees.iter().enumerate() {
            if gd > d {
                continue;
            }
            for ib in 0..alg.dim(d - gd) {
                if x.get(src[g] + ib) {
                    let p = alg.product(da, ia, d - gd, ib);
                    for c in p.iter_ones() {
                        out.flip(dst[g] + c);
                    }
                }
            }
        }
        out
    }
}

/// `dims[s][t] = dim Ext^{s,t}_A(A/L, F2)` for `s <= max_s`, `t <= max_t`.
pub fn ext_dims(which: CyclicModule, max_s: usize, max_t: usize) -> Vec<Vec<usize>> {
    let alg = MilnorAlgebra::new(max_t);
    let module = Cyclic::new(&alg, which, max_t);
    let top = max_s + 1;
    let mut free: Vec<Free> = (0..=top).map(|_| Free { degrees: Vec::new() }).collect();
    let mut diffs: Vec<Vec<BitVec>> = vec![Vec::new(); top + 1];
    let mut mats: Vec<Vec<BitMatrix>> = vec![Vec::new(); top + 1];
    for t in 0..=max_t {
        for s in 0..=top {
            let target_dim = if s == 0 { module.dim(t) } else { free[s - 1].dim(&alg, t) };
            let mut columns = Vec::new();
            for (g, &gd) in free[s].degrees.iter().enumerate() {
                for ia in 0..alg.dim(t - gd) {
                    let v = &diffs[s][g];
                    columns.push(if s == 0 {
                        module.act(t - gd, ia, gd, v)
                    } else {
                        free[s - 1].act(&alg, t - gd, ia, gd, v)
                    });
                }
            }
            let kernel = if s == 0 {
                Subspace::full(target_dim)
            } else {
                kernel_basis(&mats[s - 1][t])
            };
            let image = Subspace::from_vectors(target_dim, columns.iter().cloned());
            let mut new: Vec<BitVec> = Vec::new();
            let mut covered = image.clone();
            for v in kernel.vectors() {
                if covered.insert(&v) {
                    new.push(v);
                }
            }
            // one redundant generator, so generator counts are not Ext
            if let Some(extra) = image.vectors().into_iter().next() {
                new.push(extra);
            }
            for v in new {
                free[s].degrees.push(t);
                diffs[s].push(v.clone());
                columns.push(v);
            }
            mats[s].push(BitMatrix::from_columns(target_dim, &columns));
        }
    }
    // the cochain complex Hom_A(P_s, F2) in degree t has basis the
    // generators of degree t; delta reads unit coefficients
    let mut dims = vec![vec![0; max_t + 1]; max_s + 1];
    for t in 0..=max_t {
        let gens: Vec<Vec<usize>> = (0..=top)
            .map(|s| (0..free[s].degrees.len()).filter(|&g| free[s].degrees[g] == t).collect())
            .collect();
        let delta = |s: usize| -> BitMatrix {
            // Hom(P_s) -> Hom(P_{s+1})
            let offs = free[s].offsets(&alg, t);
            let mut m = BitMatrix::zeros(gens[s + 1].len(), gens[s].len());
            for (r, &g1) in gens[s + 1].iter().enumerate() {
                for (c, &g0) in gens[s].iter().enumerate() {
                    if diffs[s + 1][g1].get(offs[g0]) {
                        m.set(r, c, true);
                    }
                }
            }
            m
        };
        for s in 0..=max_s {
            let out = delta(s);
            let cycles = gens[s].len() - out.rank();
            let boundaries = if s == 0 { 0 } else { delta(s - 1).rank() };
            dims[s][t] = cycles - boundaries;
        }
    }
    dims
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_products() {
        assert!(milnor_product(&[1], &[1]).is_empty());
        assert_eq!(milnor_product(&[1], &[2]), vec![vec![3]]);
        assert_eq!(milnor_product(&[2], &[1]), vec![vec![0, 1], vec![3]]);
        assert_eq!(milnor_product(&[], &[5]), vec![vec![5]]);
    }

    #[test]
    fn basis_dimensions() {
        let dims: Vec<usize> = (0..=10).map(|t| milnor_sequences(t).len()).collect();
        assert_eq!(dims, vec![1, 1, 1, 2, 2, 2, 3, 4, 4, 5, 6]);
    }

    #[test]
    fn associative_in_low_degrees() {
        let alg = MilnorAlgebra::new(12);
        for da in 1..=4 {
            for db in 1..=4 {
                for dc in 1..=4 {
                    for ia in 0..alg.dim(da) {
                        for ib in 0..alg.dim(db) {
                            for ic in 0..alg.dim(dc) {
                                let a = BitVec::unit(alg.dim(da), ia);
                                let b = BitVec::unit(alg.dim(db), ib);
                                let c = BitVec::unit(alg.dim(dc), ic);
                                let left = alg.multiply(da + db, &alg.multiply(da, &a, db, &b), dc, &c);
                                let right = alg.multiply(da, &a, db + dc, &alg.multiply(db, &b, dc, &c));
                                assert_eq!(left, right);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ext_of_free_and_f2() {
        let free = ext_dims(CyclicModule::Free, 3, 8);
        assert_eq!(free[0][0], 1);
        assert_eq!(free.iter().flatten().sum::<usize>(), 1);
        let f2 = ext_dims(CyclicModule::F2, 3, 8);
        assert_eq!(&f2[1][..], &[0, 1, 1, 0, 1, 0, 0, 0, 1]);
        assert_eq!(f2[2][2], 1);
    }
}
