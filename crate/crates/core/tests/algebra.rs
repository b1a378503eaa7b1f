mod common;

use common::*;
use mc_holonomy::coalg::{self, Cutoff, WordPairs, Words};
use mc_holonomy::lincomb::LinComb;
use mc_holonomy::rational::{format_q, parse_q, q};
use mc_holonomy::sign::{multisets, permutation_sign, sort_graded, unshuffles};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn perm(seed: u64, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(&mut rng(seed));
    v
}

proptest! {
    #[test]
    fn koszul_sign_is_multiplicative(degs in proptest::collection::vec(-2i32..=2, 1..7), s1 in any::<u64>(), s2 in any::<u64>()) {
        let n = degs.len();
        let a = perm(s1, n);
        let b = perm(s2, n);
        // reorder by a, then reorder the result by b
        let degs_a: Vec<i32> = a.iter().map(|&i| degs[i]).collect();
        let ab: Vec<usize> = b.iter().map(|&j| a[j]).collect();
        prop_assert_eq!(permutation_sign(&degs, &ab), permutation_sign(&degs, &a) ^ permutation_sign(&degs_a, &b));
    }

    #[test]
    fn sorting_agrees_with_permutation_sign(letters in proptest::collection::vec(0usize..5, 0..7)) {
        let deg = |k: &usize| (*k as i32) % 2;
        let degs: Vec<i32> = letters.iter().map(deg).collect();
        match sort_graded(&letters, deg) {
            None => {
                let mut s = letters.clone();
                s.sort();
                prop_assert!(s.windows(2).any(|w| w[0] == w[1] && w[0] % 2 == 1));
            }
            Some((negative, sorted)) => {
                let mut order: Vec<usize> = (0..letters.len()).collect();
                order.sort_by_key(|&i| (letters[i], i));
                prop_assert_eq!(&sorted, &order.iter().map(|&i| letters[i]).collect::<Vec<_>>());
                prop_assert_eq!(negative, permutation_sign(&degs, &order));
            }
        }
    }

    #[test]
    fn rationals_round_trip(n in -1000i64..1000, d in 1i64..1000) {
        let x = q(n, d);
        prop_assert_eq!(parse_q(&format_q(&x)).unwrap(), x.clone());
        prop_assert_eq!(format_q(&x), format_q(&BigRational::new(BigInt::from(n * 7), BigInt::from(d * 7))));
    }

    #[test]
    fn lincomb_is_a_vector_space(s1 in any::<u64>(), s2 in any::<u64>()) {
        let mut r = rng(s1 ^ s2);
        let keys = [0usize, 1, 2, 3];
        let (a, b) = (combo(&mut r, &keys), combo(&mut r, &keys));
        let c = nonzero_q(&mut r);
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!((&a + &b).scaled(&c), &a.scaled(&c) + &b.scaled(&c));
        prop_assert!((&a - &a).is_zero());
        prop_assert!(a.iter().all(|(_, c)| c != &q(0, 1)));
    }

    #[test]
    fn coproduct_is_coassociative_and_counital(seed in any::<u64>()) {
        let l = random_three_dim(&mut rng(seed));
        let letters: Vec<usize> = (0..l.dim()).collect();
        for w in coalg::words_up_to(&l, &letters, 3) {
            let delta = coalg::coproduct(&l, &w);
            let left: LinComb<(Vec<usize>, Vec<usize>, Vec<usize>)> = delta
                .iter()
                .flat_map(|((a, b), c)| coalg::coproduct(&l, a).iter().map(|((x, y), d)| ((x.clone(), y.clone(), b.clone()), c * d)).collect::<Vec<_>>())
                .collect();
            let right: LinComb<(Vec<usize>, Vec<usize>, Vec<usize>)> = delta
                .iter()
                .flat_map(|((a, b), c)| coalg::coproduct(&l, b).iter().map(|((x, y), d)| ((a.clone(), x.clone(), y.clone()), c * d)).collect::<Vec<_>>())
                .collect();
            prop_assert_eq!(left, right);
            let counit: Words<usize> = delta.iter().filter(|((a, _), _)| a.is_empty()).map(|((_, b), c)| (b.clone(), c.clone())).collect();
            prop_assert_eq!(counit, LinComb::basis(w.clone()));
        }
    }

    #[test]
    fn exponentials_are_grouplike(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = random_three_dim(&mut r);
        let x = random_element(&mut r, &l, 0, 1);
        let cut = Cutoff::new(4);
        let e = coalg::exp_element(&l, &x, cut).unwrap();
        let lhs = coalg::truncate_pairs(&l, &coalg::coproduct_sum(&l, &e), cut);
        let mut rhs: WordPairs<usize> = LinComb::new();
        for (a, ca) in e.iter() {
            for (b, cb) in e.iter() {
                rhs.add_term((a.clone(), b.clone()), ca * cb);
            }
        }
        prop_assert_eq!(lhs, coalg::truncate_pairs(&l, &rhs, cut));
    }

    #[test]
    fn codifferential_squares_to_zero(seed in any::<u64>()) {
        let l = random_three_dim(&mut rng(seed));
        let letters: Vec<usize> = (0..l.dim()).collect();
        for w in coalg::words_up_to(&l, &letters, 4) {
            let dw = coalg::codifferential(&l, &w, l.cut()).unwrap();
            prop_assert!(coalg::codifferential_sum(&l, &dw, l.cut()).unwrap().is_zero());
        }
    }
}

#[test]
fn unshuffle_and_multiset_counts() {
    assert_eq!(unshuffles(4, &[2, 2]).len(), 6);
    assert_eq!(unshuffles(5, &[1, 2, 2]).len(), 30);
    assert_eq!(multisets(3, 2).len(), 6);
    assert_eq!(coalg::set_partitions(4).len(), 15);
}
