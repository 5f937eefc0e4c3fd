use extlab_f2::{kernel_basis, quotient_section, rref, solve, BitMatrix, BitVec, Subspace};
use proptest::prelude::*;

fn matrix_strategy(max: usize) -> impl Strategy<Value = BitMatrix> {
    (0..=max, 0..=max).prop_flat_map(|(r, c)| {
        proptest::collection::vec(any::<bool>(), r * c).prop_map(move |bits| {
            let mut m = BitMatrix::zeros(r, c);
            for (i, b) in bits.into_iter().enumerate() {
                if b {
                    m.set(i / c.max(1), i % c.max(1), true);
                }
            }
            m
        })
    })
}

fn vec_of(len: usize, seed: &[bool]) -> BitVec {
    BitVec::from_bools(&(0..len).map(|i| seed.get(i).copied().unwrap_or(false)).collect::<Vec<_>>())
}

proptest! {
    #[test]
    fn rank_nullity(m in matrix_strategy(64)) {
        prop_assert_eq!(rref(&m).rank + kernel_basis(&m).dim(), m.cols());
        for v in kernel_basis(&m).vectors() {
            prop_assert!(m.mul_vec(&v).is_zero());
        }
    }

    #[test]
    fn rref_is_idempotent(m in matrix_strategy(40)) {
        let once = rref(&m);
        let twice = rref(&once.reduced);
        prop_assert_eq!(&once, &twice);
    }

    #[test]
    fn solve_is_sound(m in matrix_strategy(40), seed in proptest::collection::vec(any::<bool>(), 40)) {
        let b = vec_of(m.rows(), &seed);
        if let Some(x) = solve(&m, &b) {
            prop_assert_eq!(m.mul_vec(&x), b);
        }
        // anything in the image must be found
        let x0 = vec_of(m.cols(), &seed);
        let b0 = m.mul_vec(&x0);
        let x = solve(&m, &b0);
        prop_assert!(x.is_some());
        prop_assert_eq!(m.mul_vec(&x.unwrap()), b0);
    }

    #[test]
    fn quotient_is_exact(m in matrix_strategy(40)) {
        let n = m.cols();
        let sub = Subspace::from_vectors(n, m.row_vectors());
        let (proj, lift) = quotient_section(n, &sub);
        prop_assert_eq!(proj.rows(), n - sub.dim());
        prop_assert_eq!(proj.mul(&lift), BitMatrix::identity(n - sub.dim()));
        prop_assert_eq!(kernel_basis(&proj), sub);
    }
}
