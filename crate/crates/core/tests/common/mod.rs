#![allow(dead_code)]

use std::collections::BTreeMap;

use mc_holonomy::coalg::Word;
use mc_holonomy::forms::{monomial_basis, PolyForm};
use mc_holonomy::holonomy::LieAlgebra;
use mc_holonomy::lincomb::LinComb;
use mc_holonomy::linf::{conjugate, AlgElement, BasisVector, CurvedLinf, LinfMorphism};
use mc_holonomy::rational::{q, Q};
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small rational, zero with some probability.
pub fn small_q(rng: &mut TestRng) -> Q {
    let num = rng.gen_range(-3i64..=3);
    let den = rng.gen_range(1i64..=3);
    q(num, den)
}

pub fn nonzero_q(rng: &mut TestRng) -> Q {
    loop {
        let c = small_q(rng);
        if !c.is_zero() {
            return c;
        }
    }
}

/// A random combination of the given keys.
pub fn combo<K: Ord + Clone>(rng: &mut TestRng, keys: &[K]) -> LinComb<K> {
    keys.iter().map(|k| (k.clone(), small_q(rng))).collect()
}

/// A random form on `Δⁿ` of polynomial degree ≤ `deg`, all form degrees.
pub fn random_form(rng: &mut TestRng, n: usize, deg: u32) -> PolyForm {
    let mut terms = LinComb::new();
    for m in monomial_basis(n, deg) {
        if rng.gen_bool(0.4) {
            terms.add_term(m, small_q(rng));
        }
    }
    PolyForm::from_terms(n, terms).unwrap()
}

/// A random form of fixed form degree `k`.
pub fn random_form_of_degree(rng: &mut TestRng, n: usize, deg: u32, k: usize) -> PolyForm {
    random_form(rng, n, deg).degree_part(k)
}

/// Elements of `L` in degree `d` with weight ≥ `min_weight`.
pub fn random_element(rng: &mut TestRng, l: &CurvedLinf, d: i32, min_weight: u32) -> AlgElement {
    let keys: Vec<usize> = (0..l.dim()).filter(|&k| l.basis()[k].deg == d && l.basis()[k].weight >= min_weight).collect();
    combo(rng, &keys)
}

/// Random components `φ_(k)`, `k ≠ 1`, of a coalgebra automorphism on the basis of `l`.
pub fn random_automorphism(rng: &mut TestRng, l: &CurvedLinf, with_constant: bool) -> BTreeMap<Word<usize>, AlgElement> {
    let mut phi = BTreeMap::new();
    if with_constant {
        let c = random_element(rng, l, 0, 1);
        if !c.is_zero() {
            phi.insert(vec![], c);
        }
    }
    for w in l.words() {
        if w.len() < 2 || !rng.gen_bool(0.5) {
            continue;
        }
        let deg: i32 = w.iter().map(|k| l.basis()[*k].deg).sum();
        let weight: u32 = w.iter().map(|k| l.basis()[*k].weight).sum();
        let value = random_element(rng, l, deg, weight);
        if !value.is_zero() {
            let sorted_repeat_odd = w.windows(2).any(|p| p[0] == p[1] && l.basis()[p[0]].deg.rem_euclid(2) == 1);
            if !sorted_repeat_odd {
                phi.insert(w, value);
            }
        }
    }
    phi
}

/// A contractible curved algebra: pairs `{b_i} = c_i` plus curvature, transported
/// along a random coalgebra automorphism.
pub fn random_contractible(rng: &mut TestRng) -> CurvedLinf {
    let pairs = rng.gen_range(1..=2usize);
    let cutoff = rng.gen_range(3..=4u32);
    let mut basis = Vec::new();
    for i in 0..pairs {
        let w = rng.gen_range(1..=2u32);
        basis.push(BasisVector::new(format!("b{i}"), 0, w));
        basis.push(BasisVector::new(format!("c{i}"), 1, w));
    }
    let mut l = CurvedLinf::new(basis, cutoff, cutoff as usize).unwrap();
    for i in 0..pairs {
        l.set_bracket(&[2 * i], LinComb::basis(2 * i + 1)).unwrap();
    }
    let curvature = random_element(rng, &l, 1, 1);
    l.set_bracket(&[], curvature).unwrap();
    let with_constant = rng.gen_bool(0.5);
    let phi = random_automorphism(rng, &l, with_constant);
    conjugate(&l, &phi).unwrap().0
}

/// A 3-dimensional algebra `a → b` plus a spectator `z`, made nonlinear by conjugation.
pub fn random_three_dim(rng: &mut TestRng) -> CurvedLinf {
    let cutoff = 4;
    let wa = rng.gen_range(1..=2u32);
    let zdeg = rng.gen_range(-1..=1i32);
    let wz = rng.gen_range(1..=3u32);
    let basis = vec![BasisVector::new("a", 0, wa), BasisVector::new("b", 1, wa), BasisVector::new("z", zdeg, wz)];
    let mut l = CurvedLinf::new(basis, cutoff, cutoff as usize).unwrap();
    l.set_bracket(&[0], LinComb::single(1, nonzero_q(rng))).unwrap();
    if rng.gen_bool(0.5) {
        let curvature = random_element(rng, &l, 1, 1);
        l.set_bracket(&[], curvature).unwrap();
    }
    let with_constant = rng.gen_bool(0.5);
    let phi = random_automorphism(rng, &l, with_constant);
    conjugate(&l, &phi).unwrap().0
}

/// A random strict automorphism of the Heisenberg algebra, `X ↦ aX + bY (+ …)`, `Y ↦ cX + dY (+ …)`.
pub fn heisenberg_images(rng: &mut TestRng) -> Vec<AlgElement> {
    loop {
        let (a, b, c, d) = (small_q(rng), small_q(rng), small_q(rng), small_q(rng));
        let det = &a * &d - &b * &c;
        if det.is_zero() {
            continue;
        }
        let x: AlgElement = [(0, a), (1, b), (2, small_q(rng))].into_iter().collect();
        let y: AlgElement = [(0, c), (1, d), (2, small_q(rng))].into_iter().collect();
        return vec![x, y, LinComb::single(2, det)];
    }
}

/// `M × K` transported along a random automorphism, with the projection onto `M`.
pub fn random_fibration(rng: &mut TestRng, m: &CurvedLinf, extra: usize, cutoff: u32) -> (LinfMorphism, Vec<AlgElement>) {
    let mut kb = Vec::new();
    for j in 0..extra {
        kb.push(BasisVector::new(format!("k{j}"), rng.gen_range(-1..=0), rng.gen_range(1..=2)));
    }
    let mut k = CurvedLinf::new(kb, cutoff, cutoff as usize).unwrap();
    if extra >= 2 {
        let (a, b) = (0, 1);
        let deg = k.basis()[a].deg + k.basis()[b].deg + 1;
        let weight = k.basis()[a].weight + k.basis()[b].weight;
        let out = random_element(rng, &k, deg, weight);
        if !(a == b && k.basis()[a].deg.rem_euclid(2) == 1) {
            k.set_bracket(&[a, b], out).unwrap();
        }
        if !k.validate().is_valid() {
            k.set_bracket(&[a, b], LinComb::new()).unwrap();
        }
    }
    let prod = CurvedLinf::product(m, &k, "", "").unwrap();
    let phi = random_automorphism(rng, &prod, false);
    let (l, phi_morph) = conjugate(&prod, &phi).unwrap();
    let images: Vec<AlgElement> = (0..prod.dim()).map(|i| if i < m.dim() { LinComb::basis(i) } else { LinComb::new() }).collect();
    let proj = LinfMorphism::strict(prod.clone(), m.clone(), &images).unwrap();
    let f = phi_morph.then(&proj).unwrap();
    let _ = l;
    let section: Vec<AlgElement> = (0..m.dim()).map(LinComb::basis).collect();
    (f, section)
}

pub fn heisenberg() -> LieAlgebra {
    LieAlgebra::heisenberg()
}
