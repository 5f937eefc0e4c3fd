use std::sync::OnceLock;

use extlab_core::steenrod::{AlgebraElement, AlgebraTable, RewriteStrategy};
use extlab_f2::BitVec;
use proptest::prelude::*;

fn table() -> &'static AlgebraTable {
    static T: OnceLock<AlgebraTable> = OnceLock::new();
    T.get_or_init(|| AlgebraTable::new(32))
}

/// Counts admissible sequences by brute force over all compositions of `t`.
fn brute_force_dim(t: u32) -> usize {
    fn compositions(t: u32, prefix: &mut Vec<u32>, count: &mut usize) {
        if t == 0 {
            if prefix.windows(2).all(|w| w[0] >= 2 * w[1]) {
                *count += 1;
            }
            return;
        }
        for i in 1..=t {
            prefix.push(i);
            compositions(t - i, prefix, count);
            prefix.pop();
        }
    }
    let mut count = 0;
    compositions(t, &mut Vec::new(), &mut count);
    count
}

fn basis_elem(t: &AlgebraTable, d: usize, i: usize) -> AlgebraElement {
    AlgebraElement::new(d, BitVec::unit(t.dim(d), i))
}

#[test]
fn dimensions_match_enumeration_oracle() {
    let oracle: Vec<usize> = (0..=10).map(brute_force_dim).collect();
    assert_eq!(oracle, vec![1, 1, 1, 2, 2, 2, 3, 4, 4, 5, 6]);
    // second route: partitions into parts 2^k - 1
    let mut series = vec![0usize; 17];
    series[0] = 1;
    for part in [1usize, 3, 7, 15] {
        for n in part..=16 {
            series[n] += series[n - part];
        }
    }
    assert_eq!(&series[..=10], &oracle[..]);
    for t in 0..=16 {
        assert_eq!(table().dim(t), brute_force_dim(t as u32), "degree {t}");
        assert_eq!(table().dim(t), series[t], "degree {t}");
    }
}

#[test]
fn associativity_through_degree_20() {
    let t = table();
    for da in 1..=18 {
        for db in 1..=19 - da {
            for dc in 1..=20 - da - db {
                for ia in 0..t.dim(da) {
                    let a = basis_elem(t, da, ia);
                    for ib in 0..t.dim(db) {
                        let ab = t.multiply(&a, &basis_elem(t, db, ib)).unwrap();
                        for ic in 0..t.dim(dc) {
                            let c = basis_elem(t, dc, ic);
                            let bc = t.multiply(&basis_elem(t, db, ib), &c).unwrap();
                            assert_eq!(
                                t.multiply(&ab, &c).unwrap(),
                                t.multiply(&a, &bc).unwrap(),
                                "({da},{ia}) ({db},{ib}) ({dc},{ic})"
                            );
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn antipode_is_an_involution_through_degree_20() {
    let t = table();
    for d in 0..=20 {
        for i in 0..t.dim(d) {
            let x = basis_elem(t, d, i);
            let chi = t.antipode_elem(&x).unwrap();
            assert_eq!(t.antipode_elem(&chi).unwrap(), x, "degree {d} index {i}");
        }
    }
}

#[test]
fn antipode_is_an_anti_homomorphism() {
    let t = table();
    for da in 1..=8 {
        for db in 1..=8 {
            for ia in 0..t.dim(da) {
                for ib in 0..t.dim(db) {
                    let a = basis_elem(t, da, ia);
                    let b = basis_elem(t, db, ib);
                    let lhs = t.antipode_elem(&t.multiply(&a, &b).unwrap()).unwrap();
                    let rhs = t
                        .multiply(&t.antipode_elem(&b).unwrap(), &t.antipode_elem(&a).unwrap())
                        .unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

#[test]
fn indecomposables_are_the_powers_of_two() {
    let t = table();
    for n in 2..=32usize {
        let expect = !n.is_power_of_two();
        assert_eq!(t.is_decomposable(&t.sq(n).unwrap()).unwrap(), expect, "Sq^{n}");
        assert_eq!(
            t.is_decomposable(&t.antipode_sq(n).unwrap()).unwrap(),
            expect,
            "chi(Sq^{n})"
        );
    }
    // the decomposables have codimension one in degrees 2^j, zero elsewhere
    for n in 1..=32usize {
        let codim = t.dim(n) - t.decomposables(n).unwrap().dim();
        assert_eq!(codim, usize::from(n.is_power_of_two()), "degree {n}");
    }
}

fn word_strategy() -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(1u32..=8, 1..=5).prop_filter("degree at most 20", |w| {
        w.iter().sum::<u32>() <= 20
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn adem_rewriting_is_confluent(word in word_strategy()) {
        let t = table();
        let left = t.adem_reduce_with(&word, RewriteStrategy::LeftmostFirst).unwrap();
        let right = t.adem_reduce_with(&word, RewriteStrategy::RightmostFirst).unwrap();
        prop_assert_eq!(&left, &right);
        // and agrees with multiplying the letters one at a time
        let mut acc = t.unit();
        for &w in word.iter().rev() {
            acc = t.multiply(&t.sq(w as usize).unwrap(), &acc).unwrap();
        }
        prop_assert_eq!(left, acc);
    }
}
