mod common;

use common::*;
use mc_holonomy::dupont::{faces, integrate_top, whitney_form, Dupont, WhitneyElement};
use mc_holonomy::forms::AffineSimplexMap;
use mc_holonomy::lincomb::LinComb;
use mc_holonomy::rational::qi;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn contraction_identities(seed in any::<u64>(), n in 1usize..=2) {
        let d = Dupont::new(n);
        let a = random_form(&mut rng(seed), n, 3);
        let pa = d.p(&a).unwrap();
        let sa = d.s(&a).unwrap();
        prop_assert_eq!(sa.d().add(&d.s(&a.d()).unwrap()).unwrap(), a.sub(&pa).unwrap());
        prop_assert_eq!(d.p(&pa).unwrap(), pa.clone());
        prop_assert!(d.s(&sa).unwrap().is_zero());
        prop_assert!(d.p(&sa).unwrap().is_zero());
        prop_assert_eq!(pa.d(), d.p(&a.d()).unwrap());
    }

    #[test]
    fn projection_of_whitney_elements(seed in any::<u64>(), n in 1usize..=3) {
        let d = Dupont::new(n);
        let keys = faces(n);
        let c = combo(&mut rng(seed), &keys);
        let w = WhitneyElement::new(n, c).unwrap();
        let form = d.i(&w).unwrap();
        prop_assert_eq!(d.project(&form).unwrap(), w.clone());
        prop_assert!(d.s(&form).unwrap().is_zero());
        prop_assert_eq!(w.d().realize(), form.d());
    }
}

#[test]
fn whitney_forms_integrate_to_one() {
    for n in 1..=4 {
        let top: Vec<usize> = (0..=n).collect();
        assert_eq!(integrate_top(&whitney_form(&top, n).unwrap()), qi(1), "n = {n}");
    }
}

#[test]
fn whitney_forms_restrict_to_faces() {
    for n in 1..=3 {
        for f in faces(n) {
            let w = whitney_form(&f, n).unwrap();
            for g in faces(n) {
                if g.len() != f.len() {
                    continue;
                }
                let inc = AffineSimplexMap::face_inclusion(n, &g).unwrap();
                let r = w.pullback(&inc).unwrap();
                if g == f {
                    let top: Vec<usize> = (0..f.len()).collect();
                    assert_eq!(r, whitney_form(&top, f.len() - 1).unwrap());
                } else {
                    assert!(r.is_zero(), "ω{f:?} on {g:?}");
                }
            }
        }
    }
}

#[test]
fn term_counts() {
    for n in 1..=5 {
        assert_eq!(Dupont::new(n).s_term_count(), (1 << (n + 1)) - 2);
    }
}

#[test]
fn report_passes() {
    for n in 1..=3 {
        assert!(Dupont::new(n).verify(2).unwrap().passed());
    }
    let w = WhitneyElement::new(2, LinComb::basis(vec![0, 1])).unwrap();
    assert_eq!(w.d().coeffs().len(), 1);
}
