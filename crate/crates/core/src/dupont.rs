//! Whitney elementary forms and the Dupont contraction of `Ω_n` onto them.

use num_traits::{One, Zero};
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::forms::{monomial_basis, AffineSimplexMap, Monomial, PolyForm};
use crate::lincomb::LinComb;
use crate::rational::{factorial, Q};

/// A nondegenerate face `i_0 < … < i_k` of `Δⁿ`.
pub type Face = Vec<usize>;

/// All nondegenerate faces of `Δⁿ`, by dimension then lexicographically.
pub fn faces(n: usize) -> Vec<Face> {
    let verts: Vec<usize> = (0..=n).collect();
    (1..=n + 1).flat_map(|size| crate::sign::combinations(&verts, size)).collect()
}

fn check_face(face: &[usize], n: usize) -> Result<()> {
    if face.is_empty() || face.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NonIncreasingFace(face.to_vec()));
    }
    if let Some(&last) = face.last() {
        if last > n {
            return Err(Error::IndexOutOfRange { index: last, n });
        }
    }
    Ok(())
}

/// `ω_{i_0…i_k} = k! Σ_j (−1)^j t_{i_j} dt_{i_0} ∧ ⋯ d̂t_{i_j} ⋯ ∧ dt_{i_k}`.
pub fn whitney_form(face: &[usize], n: usize) -> Result<PolyForm> {
    check_face(face, n)?;
    let k = face.len() - 1;
    let mut out = PolyForm::zero(n);
    for j in 0..=k {
        let mut term = PolyForm::t(n, face[j])?;
        for (l, &v) in face.iter().enumerate() {
            if l != j {
                term = term.wedge(&PolyForm::dt(n, v)?)?;
            }
        }
        if j % 2 == 1 {
            term = term.neg();
        }
        out.add_assign(&term);
    }
    Ok(out.scale(&factorial(k)))
}

/// An element of the Whitney complex `W_n`, in the basis of elementary forms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WhitneyElement {
    n: usize,
    coeffs: LinComb<Face>,
}

impl fmt::Debug for WhitneyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W[n={}]{:?}", self.n, self.coeffs)
    }
}

impl WhitneyElement {
    pub fn zero(n: usize) -> Self {
        WhitneyElement { n, coeffs: LinComb::new() }
    }

    pub fn new(n: usize, coeffs: LinComb<Face>) -> Result<Self> {
        for f in coeffs.keys() {
            check_face(f, n)?;
        }
        Ok(WhitneyElement { n, coeffs })
    }

    pub fn basis(n: usize, face: &[usize]) -> Result<Self> {
        Self::new(n, LinComb::basis(face.to_vec()))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &LinComb<Face> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    /// The realized polynomial form `Σ c_F ω_F`.
    pub fn realize(&self) -> PolyForm {
        let mut out = PolyForm::zero(self.n);
        for (f, c) in self.coeffs.iter() {
            out.add_scaled(&whitney_form(f, self.n).expect("valid face"), c);
        }
        out
    }

    /// The simplicial coboundary, matching `d` on realized forms.
    pub fn d(&self) -> WhitneyElement {
        WhitneyElement { n: self.n, coeffs: self.coeffs.map_linear(|f| whitney_coboundary(f, self.n)) }
    }
}

/// `d ω_F = Σ_{v∉F} (−1)^{pos(v)} ω_{F∪v}`.
pub fn whitney_coboundary(face: &[usize], n: usize) -> LinComb<Face> {
    let mut out = LinComb::new();
    for v in 0..=n {
        if face.contains(&v) {
            continue;
        }
        let pos = face.iter().filter(|&&u| u < v).count();
        let mut g = face.to_vec();
        g.insert(pos, v);
        out.add_term(g, if pos % 2 == 1 { -Q::one() } else { Q::one() });
    }
    out
}

/// The Dupont contraction `(Ω_n, W_n, p_n, i_n, s_n)`.
///
/// Both maps are expanded over chains of vertices `i_0 < … < i_k`, sharing the
/// partial compositions `h^{i_{k−1}} ⋯ h^{i_0}` along the chain:
///
/// `p_n = Σ_F ω_F ε^{i_k} h^{i_{k−1}} ⋯ h^{i_0}` and
/// `s_n = Σ_{k<n} (−1)^k Σ_F ω_F h^{i_k} ⋯ h^{i_0}`,
///
/// the signs being the ones for which `d s_n + s_n d = 1 − p_n` with the
/// homotopies of [`PolyForm::poincare_h`].
pub struct Dupont {
    n: usize,
    cache: Mutex<HashMap<Monomial, (LinComb<Face>, PolyForm)>>,
}

impl fmt::Debug for Dupont {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dupont(n={})", self.n)
    }
}

impl Clone for Dupont {
    fn clone(&self) -> Self {
        Dupont::new(self.n)
    }
}

impl Dupont {
    pub fn new(n: usize) -> Self {
        Dupont { n, cache: Mutex::new(HashMap::new()) }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of summand operators `ω_F h^{i_k} ⋯ h^{i_0}` in `s_n`.
    pub fn s_term_count(&self) -> usize {
        faces(self.n).iter().filter(|f| f.len() <= self.n).count()
    }

    /// Number of summand operators in `p_n`.
    pub fn p_term_count(&self) -> usize {
        faces(self.n).len()
    }

    fn expand_monomial(&self, m: &Monomial) -> (LinComb<Face>, PolyForm) {
        if let Some(hit) = self.cache.lock().expect("cache lock").get(m) {
            return hit.clone();
        }
        let n = self.n;
        let a = PolyForm::from((n, m.clone()));
        let mut p = LinComb::new();
        let mut s = PolyForm::zero(n);
        let mut chain = Vec::new();
        self.walk(&a, 0, &mut chain, &mut p, &mut s);
        let out = (p, s);
        self.cache.lock().expect("cache lock").insert(m.clone(), out.clone());
        out
    }

    // `current` is h^{chain[k−1]} ⋯ h^{chain[0]} a; extend the chain by each vertex ≥ start
    fn walk(&self, current: &PolyForm, start: usize, chain: &mut Vec<usize>, p: &mut LinComb<Face>, s: &mut PolyForm) {
        let n = self.n;
        for v in start..=n {
            chain.push(v);
            let value = current.eval_vertex(v).expect("vertex in range");
            p.add_term(chain.clone(), value);
            if chain.len() <= n {
                let next = current.poincare_h(v).expect("vertex in range");
                if !next.is_zero() {
                    let mut w = whitney_form(chain, n).expect("valid face");
                    if chain.len() % 2 == 0 {
                        w = w.neg();
                    }
                    s.add_assign(&w.wedge(&next).expect("same dimension"));
                    self.walk(&next, v + 1, chain, p, s);
                }
            }
            chain.pop();
        }
    }

    /// `p_n(a)` as a combination of Whitney forms.
    pub fn project(&self, a: &PolyForm) -> Result<WhitneyElement> {
        self.check(a)?;
        let mut coeffs = LinComb::new();
        for (m, c) in a.terms().iter() {
            coeffs.add_scaled(&self.expand_monomial(m).0, c);
        }
        WhitneyElement::new(self.n, coeffs)
    }

    /// `p_n(a)` realized as a form.
    pub fn p(&self, a: &PolyForm) -> Result<PolyForm> {
        Ok(self.project(a)?.realize())
    }

    /// The inclusion `i_n: W_n → Ω_n`.
    pub fn i(&self, w: &WhitneyElement) -> Result<PolyForm> {
        if w.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: w.dim() });
        }
        Ok(w.realize())
    }

    /// The Dupont homotopy `s_n(a)`.
    pub fn s(&self, a: &PolyForm) -> Result<PolyForm> {
        self.check(a)?;
        let mut out = PolyForm::zero(self.n);
        for (m, c) in a.terms().iter() {
            out.add_scaled(&self.expand_monomial(m).1, c);
        }
        Ok(out)
    }

    fn check(&self, a: &PolyForm) -> Result<()> {
        if a.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: a.dim() });
        }
        Ok(())
    }

    /// Verifies the contraction identities and side conditions on all monomials
    /// of polynomial degree at most `max_poly_degree`.
    pub fn verify(&self, max_poly_degree: u32) -> Result<DupontReport> {
        let n = self.n;
        let mut report = DupontReport { n, checked: 0, s_terms: self.s_term_count(), rank: 0, failures: Vec::new() };
        let mut images = Vec::new();
        for m in monomial_basis(n, max_poly_degree) {
            let a = PolyForm::from((n, m));
            report.checked += 1;
            let pa = self.p(&a)?;
            let sa = self.s(&a)?;
            let homotopy = self.s(&a.d())?.add(&sa.d())?;
            if homotopy != a.sub(&pa)? {
                report.failures.push(format!("ds + sd ≠ 1 − p on {a}"));
            }
            if self.p(&pa)? != pa {
                report.failures.push(format!("p² ≠ p on {a}"));
            }
            if self.p(&a.d())? != pa.d() {
                report.failures.push(format!("pd ≠ dp on {a}"));
            }
            if !self.s(&sa)?.is_zero() {
                report.failures.push(format!("s² ≠ 0 on {a}"));
            }
            if !self.p(&sa)?.is_zero() {
                report.failures.push(format!("ps ≠ 0 on {a}"));
            }
            images.push(self.project(&a)?.coeffs);
        }
        for f in faces(n) {
            let w = whitney_form(&f, n)?;
            if !self.s(&w)?.is_zero() {
                report.failures.push(format!("s i ≠ 0 on ω{f:?}"));
            }
            if self.project(&w)? != WhitneyElement::basis(n, &f)? {
                report.failures.push(format!("p does not fix ω{f:?}"));
            }
            images.push(self.project(&w)?.coeffs);
        }
        report.rank = crate::linalg::rank(&images);
        Ok(report)
    }
}

/// Outcome of [`Dupont::verify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DupontReport {
    pub n: usize,
    pub checked: usize,
    pub s_terms: usize,
    pub rank: usize,
    pub failures: Vec<String>,
}

impl DupontReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.rank + 1 == 1 << (self.n + 1) && self.s_terms + 2 == 1 << (self.n + 1)
    }
}

/// The Dupont contraction on `Δⁿ`, verified on monomials of degree ≤ 2 at construction.
pub fn dupont_contraction(n: usize) -> Result<Dupont> {
    let c = Dupont::new(n);
    let report = c.verify(2)?;
    if let Some(first) = report.failures.first() {
        return Err(Error::SideCondition { axiom: "dupont".into(), detail: first.clone() });
    }
    Ok(c)
}

/// `∫_{Δⁿ} t^a dt_1 ∧ ⋯ ∧ dt_n = a! / (n + |a|)!`, the standard simplex integral.
pub fn simplex_integral(exp: &[u32]) -> Q {
    let n = exp.len();
    let total: u32 = exp.iter().sum();
    let mut num = Q::one();
    for &e in exp {
        num *= factorial(e as usize);
    }
    num / factorial(n + total as usize)
}

/// Pairs a top-degree form with the fundamental class of `Δⁿ`.
pub fn integrate_top(a: &PolyForm) -> Q {
    let n = a.dim();
    let mut acc = Q::zero();
    for (m, c) in a.terms().iter() {
        if m.form_degree() == n {
            acc += c * simplex_integral(&m.exp);
        }
    }
    acc
}

/// Pullback of forms along the face inclusion missing vertex `j`.
pub fn face_pullback(a: &PolyForm, j: usize) -> Result<PolyForm> {
    a.pullback(&AffineSimplexMap::face(a.dim(), j)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn t(n: usize, i: usize) -> PolyForm {
        PolyForm::t(n, i).unwrap()
    }
    fn dt(n: usize, i: usize) -> PolyForm {
        PolyForm::dt(n, i).unwrap()
    }

    #[test]
    fn whitney_examples() {
        assert_eq!(whitney_form(&[2], 3).unwrap(), t(3, 2));
        assert_eq!(whitney_form(&[0, 1], 1).unwrap(), dt(1, 1));
        let expected = t(2, 0)
            .wedge(&dt(2, 1).wedge(&dt(2, 2)).unwrap())
            .unwrap()
            .sub(&t(2, 1).wedge(&dt(2, 0).wedge(&dt(2, 2)).unwrap()).unwrap())
            .unwrap()
            .add(&t(2, 2).wedge(&dt(2, 0).wedge(&dt(2, 1)).unwrap()).unwrap())
            .unwrap()
            .scale(&qi(2));
        let w = whitney_form(&[0, 1, 2], 2).unwrap();
        assert_eq!(w, expected);
        assert_eq!(w, PolyForm::monomial(2, &[0, 0], &[1, 2], qi(2)).unwrap());
        assert!(matches!(whitney_form(&[1, 0], 2), Err(Error::NonIncreasingFace(_))));
    }

    #[test]
    fn whitney_differential_is_coboundary() {
        for n in 0..=3 {
            for f in faces(n) {
                let w = WhitneyElement::basis(n, &f).unwrap();
                assert_eq!(w.realize().d(), w.d().realize(), "face {f:?}");
            }
        }
    }

    #[test]
    fn projection_examples() {
        let d1 = Dupont::new(1);
        let w01 = whitney_form(&[0, 1], 1).unwrap();
        assert_eq!(d1.p(&w01).unwrap(), w01);
        let a = t(1, 1).wedge(&dt(1, 1)).unwrap();
        assert_eq!(d1.p(&a).unwrap(), w01.scale(&q(1, 2)));
        let d2 = Dupont::new(2);
        let b = PolyForm::monomial(2, &[1, 1], &[1, 2], qi(1)).unwrap();
        let pb = d2.project(&b).unwrap();
        // ∫_{Δ²} ω_{012} = 1, so the coefficient is the integral of b
        assert_eq!(pb, WhitneyElement::basis(2, &[0, 1, 2]).unwrap().scale_for_test(&simplex_integral(&[1, 1])));
        assert_eq!(integrate_top(&whitney_form(&[0, 1, 2], 2).unwrap()), qi(1));
        assert_eq!(simplex_integral(&[1, 1]), q(1, 24));
    }

    impl WhitneyElement {
        fn scale_for_test(&self, c: &Q) -> WhitneyElement {
            WhitneyElement { n: self.n, coeffs: self.coeffs.scaled(c) }
        }
    }

    #[test]
    fn homotopy_examples() {
        let d1 = Dupont::new(1);
        assert!(d1.s(&dt(1, 1)).unwrap().is_zero());
        let a = t(1, 1).wedge(&dt(1, 1)).unwrap();
        let expected = PolyForm::monomial(1, &[2], &[], q(1, 2)).unwrap().sub(&t(1, 1).scale(&q(1, 2))).unwrap();
        assert_eq!(d1.s(&a).unwrap(), expected);
        for n in 0..=3 {
            assert!(Dupont::new(n).s(&PolyForm::constant(n, qi(7))).unwrap().is_zero());
        }
        assert!(d1.s(&PolyForm::zero(2)).is_err());
    }

    #[test]
    fn term_counts() {
        assert_eq!(Dupont::new(0).s_term_count(), 0);
        for n in 1..=4 {
            assert_eq!(Dupont::new(n).s_term_count() + 2, 1 << (n + 1));
            assert_eq!(Dupont::new(n).p_term_count() + 1, 1 << (n + 1));
        }
    }

    #[test]
    fn small_contractions_verify() {
        for n in 0..=2 {
            let report = Dupont::new(n).verify(3).unwrap();
            assert!(report.passed(), "{report:?}");
        }
        let c0 = dupont_contraction(0).unwrap();
        let f = PolyForm::constant(0, qi(3));
        assert_eq!(c0.p(&f).unwrap(), f);
        assert!(c0.s(&f).unwrap().is_zero());
    }

    #[test]
    fn homotopy_is_natural_for_faces() {
        for n in 1..=3usize {
            let big = Dupont::new(n);
            let small = Dupont::new(n - 1);
            for m in monomial_basis(n, 2) {
                let a = PolyForm::from((n, m));
                for j in 0..=n {
                    let lhs = face_pullback(&big.s(&a).unwrap(), j).unwrap();
                    let rhs = small.s(&face_pullback(&a, j).unwrap()).unwrap();
                    assert_eq!(lhs, rhs, "n={n} j={j} a={a}");
                }
            }
        }
    }
}
