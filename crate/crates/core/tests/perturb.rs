mod common;

use common::*;
use mc_holonomy::lincomb::LinComb;
use mc_holonomy::linf::{AlgElement, BasisVector, CurvedLinf};
use mc_holonomy::perturb::{gauge_seed, kuranishi_solve, transfer_structure, Matrix, MatrixContraction};
use proptest::prelude::*;
use rand::Rng;

fn apply(m: &Matrix, x: &AlgElement) -> AlgElement {
    x.map_linear(|k| m[*k].clone())
}

// two-term complexes per weight with a random differential
fn complex(seed: u64) -> (Vec<BasisVector>, Matrix) {
    let mut r = rng(seed);
    let mut basis = Vec::new();
    for w in 1..=2u32 {
        for _ in 0..r.gen_range(1..=2) {
            basis.push(BasisVector::new(format!("a{}", basis.len()), 0, w));
        }
        for _ in 0..r.gen_range(1..=2) {
            basis.push(BasisVector::new(format!("b{}", basis.len()), 1, w));
        }
    }
    let mut d: Matrix = vec![LinComb::new(); basis.len()];
    for (k, b) in basis.iter().enumerate() {
        if b.deg == 0 {
            let targets: Vec<usize> = (0..basis.len()).filter(|&j| basis[j].deg == 1 && basis[j].weight == b.weight).collect();
            d[k] = combo(&mut r, &targets);
        }
    }
    (basis, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn side_conditions(seed in any::<u64>()) {
        let (basis, big_d) = complex(seed);
        let c = MatrixContraction::from_complex(basis.clone(), big_d).unwrap();
        let (big_d, small_d, p, i, h) = c.matrices();
        for k in 0..basis.len() {
            let x: AlgElement = LinComb::basis(k);
            let ip = apply(i, &apply(p, &x));
            let dh = apply(big_d, &apply(h, &x));
            let hd = apply(h, &apply(big_d, &x));
            prop_assert_eq!(&(&ip + &dh) + &hd, x.clone());
            prop_assert!(apply(h, &apply(h, &x)).is_zero());
            prop_assert!(apply(p, &apply(h, &x)).is_zero());
            prop_assert_eq!(apply(p, &apply(big_d, &x)), apply(small_d, &apply(p, &x)));
        }
        for k in 0..c.small_space().dim() {
            let y: AlgElement = LinComb::basis(k);
            prop_assert_eq!(apply(p, &apply(i, &y)), y.clone());
            prop_assert!(apply(h, &apply(i, &y)).is_zero());
            prop_assert_eq!(apply(big_d, &apply(i, &y)), apply(i, &apply(small_d, &y)));
        }
    }

    #[test]
    fn transfer_is_valid(seed in any::<u64>()) {
        let l = random_three_dim(&mut rng(seed));
        let c = MatrixContraction::for_algebra(&l).unwrap();
        let t = transfer_structure(&l, &c, l.arity_cap()).unwrap();
        prop_assert!(t.algebra.validate().is_valid());
        prop_assert!(t.p_mu.check().is_valid());
        prop_assert!(t.i_mu.check().is_valid());
    }

    #[test]
    fn kuranishi_solutions(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = random_contractible(&mut r);
        let c = MatrixContraction::for_algebra(&l).unwrap();
        let x = kuranishi_solve(&l, &c, &LinComb::new()).unwrap();
        let (_, _, _, _, h) = c.matrices();
        prop_assert!(apply(h, &x).is_zero());
        prop_assert!(l.curvature_residual(&x).unwrap().is_zero());
        let seed_x = gauge_seed(&c, &random_element(&mut r, &l, 0, 1));
        prop_assert_eq!(kuranishi_solve(&l, &c, &seed_x).unwrap(), x);
    }
}

#[test]
fn non_contractible_algebras_are_rejected() {
    let l = CurvedLinf::new(vec![BasisVector::new("u", 0, 1)], 2, 2).unwrap();
    let c = MatrixContraction::for_algebra(&l).unwrap();
    assert!(kuranishi_solve(&l, &c, &LinComb::new()).is_err());
}

fn curved_pair() -> CurvedLinf {
    let mut l = CurvedLinf::new(vec![BasisVector::new("b", 0, 1), BasisVector::new("c", 1, 1)], 2, 2).unwrap();
    l.set_bracket(&[], LinComb::basis(1)).unwrap();
    l.set_bracket(&[0], LinComb::basis(1)).unwrap();
    l
}

#[test]
fn curved_pair_solution() {
    let l = curved_pair();
    let c = MatrixContraction::for_algebra(&l).unwrap();
    let x = kuranishi_solve(&l, &c, &LinComb::new()).unwrap();
    assert_eq!(x, LinComb::single(0, mc_holonomy::rational::qi(-1)));
    let t = transfer_structure(&l, &c, 2).unwrap();
    assert_eq!(t.algebra.dim(), 0);
    assert!(t.algebra.brackets().is_empty());
}

#[test]
fn second_order_correction() {
    // {} = c, {b} = c, {e} = f, {b, b} = f: x = −b + x_e e with x_e + ½ = 0
    let mut l = curved_pair();
    let mut basis = l.basis().to_vec();
    basis.push(BasisVector::new("e", 0, 2));
    basis.push(BasisVector::new("f", 1, 2));
    let mut big = CurvedLinf::new(basis, 3, 3).unwrap();
    for (w, v) in l.brackets().clone() {
        big.set_bracket(&w, v).unwrap();
    }
    big.set_bracket(&[2], LinComb::basis(3)).unwrap();
    big.set_bracket(&[0, 0], LinComb::basis(3)).unwrap();
    l = big;
    let c = MatrixContraction::for_algebra(&l).unwrap();
    let x = kuranishi_solve(&l, &c, &LinComb::new()).unwrap();
    let expected: AlgElement = [(0, mc_holonomy::rational::qi(-1)), (2, mc_holonomy::rational::q(-1, 2))].into_iter().collect();
    assert_eq!(x, expected);
}

#[test]
fn abelian_transfer_keeps_the_differential() {
    let mut l = CurvedLinf::new(
        vec![BasisVector::new("a", 0, 1), BasisVector::new("b", 1, 1), BasisVector::new("u", 0, 1), BasisVector::new("v", 1, 2)],
        3,
        3,
    )
    .unwrap();
    l.set_bracket(&[0], LinComb::basis(1)).unwrap();
    let c = MatrixContraction::for_algebra(&l).unwrap();
    let t = transfer_structure(&l, &c, 3).unwrap();
    assert_eq!(t.algebra.dim(), 2);
    assert!(t.algebra.brackets().is_empty());
    assert!(t.p_mu.is_strict() && t.i_mu.is_strict());
}
