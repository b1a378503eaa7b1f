mod common;

use common::*;
use mc_holonomy::forms::{extend_section, AffineSimplexMap, FormFamily, PolyForm, Shape};
use mc_holonomy::rational::{q, qi, Q};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

fn form(seed: u64, n: usize, deg: u32) -> PolyForm {
    random_form(&mut rng(seed), n, deg)
}

fn homogeneous(seed: u64, n: usize) -> (PolyForm, usize) {
    let mut r = rng(seed);
    let k = r.gen_range(0..=n);
    (random_form_of_degree(&mut r, n, 2, k), k)
}

// a random affine map Δᵐ → Δⁿ whose vertices land at rational points of Δⁿ
fn affine(seed: u64, m: usize, n: usize) -> AffineSimplexMap {
    let mut r = rng(seed);
    let mut rows = vec![vec![Q::zero(); m + 1]; n + 1];
    for k in 0..=m {
        let weights: Vec<i64> = (0..=n).map(|_| r.gen_range(0..=3)).collect();
        let total: i64 = weights.iter().sum::<i64>().max(1);
        if weights.iter().all(|w| *w == 0) {
            rows[r.gen_range(0..=n)][k] = Q::one();
            continue;
        }
        for j in 0..=n {
            rows[j][k] = q(weights[j], total);
        }
    }
    AffineSimplexMap::new(m, n, rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_squares_to_zero(seed in any::<u64>(), n in 1usize..=3) {
        prop_assert!(form(seed, n, 3).d().d().is_zero());
    }

    #[test]
    fn leibniz_rule(s1 in any::<u64>(), s2 in any::<u64>(), n in 1usize..=3) {
        let (a, k) = homogeneous(s1, n);
        let b = form(s2, n, 2);
        let lhs = a.wedge(&b).unwrap().d();
        let sign = if k % 2 == 0 { qi(1) } else { qi(-1) };
        let rhs = a.d().wedge(&b).unwrap().add(&a.wedge(&b.d()).unwrap().scale(&sign)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn graded_commutativity(s1 in any::<u64>(), s2 in any::<u64>(), n in 1usize..=3) {
        let (a, k) = homogeneous(s1, n);
        let (b, l) = homogeneous(s2, n);
        let sign = if (k * l) % 2 == 0 { qi(1) } else { qi(-1) };
        prop_assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap().scale(&sign));
    }

    #[test]
    fn wedge_is_associative(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), n in 1usize..=3) {
        let (a, b, c) = (form(s1, n, 1), form(s2, n, 1), form(s3, n, 1));
        prop_assert_eq!(a.wedge(&b).unwrap().wedge(&c).unwrap(), a.wedge(&b.wedge(&c).unwrap()).unwrap());
    }

    #[test]
    fn pullback_is_a_dga_map(s1 in any::<u64>(), s2 in any::<u64>(), sm in any::<u64>(), m in 1usize..=2, n in 1usize..=3) {
        let f = affine(sm, m, n);
        let (a, b) = (form(s1, n, 2), form(s2, n, 1));
        prop_assert_eq!(a.d().pullback(&f).unwrap(), a.pullback(&f).unwrap().d());
        prop_assert_eq!(
            a.wedge(&b).unwrap().pullback(&f).unwrap(),
            a.pullback(&f).unwrap().wedge(&b.pullback(&f).unwrap()).unwrap()
        );
    }

    #[test]
    fn pullback_is_functorial(sa in any::<u64>(), sf in any::<u64>(), sg in any::<u64>()) {
        let g = affine(sg, 1, 2);
        let f = affine(sf, 2, 3);
        let a = form(sa, 3, 2);
        let fg = f.compose(&g).unwrap();
        prop_assert_eq!(a.pullback(&fg).unwrap(), a.pullback(&f).unwrap().pullback(&g).unwrap());
    }

    #[test]
    fn vertex_evaluation_is_pullback_to_a_point(sa in any::<u64>(), n in 1usize..=3, i in 0usize..=3) {
        let i = i % (n + 1);
        let a = form(sa, n, 3);
        let v = AffineSimplexMap::vertex(n, i).unwrap();
        prop_assert_eq!(PolyForm::constant(0, a.eval_vertex(i).unwrap()), a.pullback(&v).unwrap());
    }

    #[test]
    fn poincare_homotopy(sa in any::<u64>(), n in 1usize..=3, i in 0usize..=3) {
        let i = i % (n + 1);
        let a = form(sa, n, 3);
        let lhs = a.poincare_h(i).unwrap().d().add(&a.d().poincare_h(i).unwrap()).unwrap();
        prop_assert_eq!(lhs, a.sub(&a.eval_vertex_form(i).unwrap()).unwrap());
        prop_assert!(a.poincare_h(i).unwrap().poincare_h(i).unwrap().is_zero());
    }

    #[test]
    fn extension_restricts_back(sa in any::<u64>(), n in 1usize..=3, horn in proptest::option::of(0usize..=3)) {
        let a = form(sa, n, 2);
        let shape = match horn {
            Some(i) => Shape::Horn(i % (n + 1)),
            None => Shape::Boundary,
        };
        let family = FormFamily::restrict(&a, shape).unwrap();
        let ext = extend_section(&family).unwrap();
        for (j, f) in family.faces() {
            prop_assert_eq!(&ext.restrict_to_facet(*j).unwrap(), f);
        }
    }
}

#[test]
fn affine_maps_reject_bad_columns() {
    assert!(AffineSimplexMap::new(1, 1, vec![vec![qi(1), qi(1)], vec![qi(1), qi(0)]]).is_err());
    assert!(AffineSimplexMap::face(2, 3).is_err());
    assert!(AffineSimplexMap::face_inclusion(3, &[0, 2, 1]).is_err());
}

#[test]
fn incompatible_families_are_rejected() {
    let mut faces = std::collections::BTreeMap::new();
    faces.insert(0, PolyForm::constant(1, qi(1)));
    faces.insert(1, PolyForm::constant(1, qi(1)));
    faces.insert(2, PolyForm::constant(1, qi(2)));
    let family = FormFamily::new(2, Shape::Boundary, faces);
    assert!(family.is_err() || extend_section(&family.unwrap()).is_err());
}
