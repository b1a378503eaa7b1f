//! The curved L∞-algebras `Ω_n ⊗ L` and `W_n ⊗ L`.

use std::collections::BTreeMap;
use std::fmt;

use crate::coalg::{Brackets, Cutoff, GradedBasis};
use crate::dupont::{whitney_coboundary, Face, WhitneyElement};
use crate::error::{Error, Result};
use crate::forms::{AffineSimplexMap, Monomial, PolyForm};
use crate::linf::{self, AlgElement, CurvedLinf};
use crate::lincomb::LinComb;
use crate::rational::{qi, sign_q, Q};

/// A basis element `t^a dt_S ⊗ x`.
pub type TensorKey = (Monomial, usize);

/// A basis element `ω_F ⊗ x`.
pub type WhitneyKey = (Face, usize);

/// An element of `Ω_n ⊗ L`: one form per basis vector of `L`.
#[derive(Clone, PartialEq, Eq)]
pub struct FormValuedElement {
    n: usize,
    comps: BTreeMap<usize, PolyForm>,
}

impl fmt::Debug for FormValuedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormValued[n={}]{{", self.n)?;
        for (i, (k, v)) in self.comps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        write!(f, "}}")
    }
}

impl FormValuedElement {
    pub fn zero(n: usize) -> Self {
        FormValuedElement { n, comps: BTreeMap::new() }
    }

    pub fn new(n: usize, comps: BTreeMap<usize, PolyForm>) -> Result<Self> {
        for form in comps.values() {
            if form.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: form.dim() });
            }
        }
        let comps = comps.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(FormValuedElement { n, comps })
    }

    /// `α ⊗ x`.
    pub fn simple(form: PolyForm, x: &AlgElement) -> Self {
        let n = form.dim();
        let comps = x.iter().map(|(k, c)| (*k, form.scale(c))).collect();
        FormValuedElement::new(n, comps).expect("single dimension")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &BTreeMap<usize, PolyForm> {
        &self.comps
    }

    pub fn component(&self, k: usize) -> PolyForm {
        self.comps.get(&k).cloned().unwrap_or_else(|| PolyForm::zero(self.n))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn to_lincomb(&self) -> LinComb<TensorKey> {
        let mut out = LinComb::new();
        for (k, form) in &self.comps {
            for (m, c) in form.terms().iter() {
                out.add_term((m.clone(), *k), c.clone());
            }
        }
        out
    }

    pub fn from_lincomb(n: usize, x: &LinComb<TensorKey>) -> Self {
        let mut by_basis: BTreeMap<usize, LinComb<Monomial>> = BTreeMap::new();
        for ((m, k), c) in x.iter() {
            by_basis.entry(*k).or_default().add_term(m.clone(), c.clone());
        }
        let comps = by_basis
            .into_iter()
            .map(|(k, terms)| (k, PolyForm::from_terms(n, terms).expect("monomials on the same simplex")))
            .collect();
        FormValuedElement::new(n, comps).expect("monomials on the same simplex")
    }

    /// The part of form degree `k`.
    pub fn form_degree_part(&self, k: usize) -> Self {
        let comps = self.comps.iter().map(|(b, v)| (*b, v.degree_part(k))).collect();
        FormValuedElement::new(self.n, comps).expect("same simplex")
    }

    /// The part of total degree `d` (form degree plus the degree in `L`).
    pub fn total_degree_part(&self, l: &CurvedLinf, d: i32) -> Self {
        let mut comps = BTreeMap::new();
        for (b, v) in &self.comps {
            let k = d - l.basis()[*b].deg;
            if (0..=self.n as i32).contains(&k) {
                comps.insert(*b, v.degree_part(k as usize));
            }
        }
        FormValuedElement::new(self.n, comps).expect("same simplex")
    }

    /// Minimum weight of the supporting basis vectors of `L`.
    pub fn weight(&self, l: &CurvedLinf) -> Option<u32> {
        self.comps.keys().map(|k| l.basis()[*k].weight).min()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(Self::from_lincomb(self.n, &(&self.to_lincomb() + &other.to_lincomb())))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-qi(1)))
    }

    pub fn scale(&self, c: &Q) -> Self {
        FormValuedElement::new(self.n, self.comps.iter().map(|(k, v)| (*k, v.scale(c))).collect()).expect("same simplex")
    }

    /// Coefficient-wise pullback along an affine simplex map into `Δⁿ`.
    pub fn restrict(&self, map: &AffineSimplexMap) -> Result<Self> {
        if map.target() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: map.target() });
        }
        let mut comps = BTreeMap::new();
        for (k, v) in &self.comps {
            comps.insert(*k, v.pullback(map)?);
        }
        FormValuedElement::new(map.source(), comps)
    }

    /// Values at vertex `i` as an element of `L` (the 0-form part evaluated there).
    pub fn eval_vertex(&self, i: usize) -> Result<AlgElement> {
        let mut out = LinComb::new();
        for (k, v) in &self.comps {
            out.add_term(*k, v.eval_vertex(i)?);
        }
        Ok(out)
    }

    /// Applies a linear map of `L` coefficient-wise.
    pub fn map_values(&self, f: impl Fn(usize) -> AlgElement) -> Self {
        let x = self.to_lincomb().map_linear(|(m, k)| f(*k).map_keys(|j| (m.clone(), *j)));
        Self::from_lincomb(self.n, &x)
    }
}

/// `Ω_n ⊗ L` with its induced curved L∞ structure.
#[derive(Clone, Debug)]
pub struct TensorAlgebra {
    n: usize,
    l: CurvedLinf,
}

impl TensorAlgebra {
    pub fn new(n: usize, l: &CurvedLinf) -> Self {
        TensorAlgebra { n, l: l.clone() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn algebra(&self) -> &CurvedLinf {
        &self.l
    }

    pub fn cut(&self) -> Cutoff {
        self.l.cut()
    }

    /// `{x_1, …, x_k}` on form-valued elements.
    pub fn bracket_elements(&self, xs: &[FormValuedElement]) -> Result<FormValuedElement> {
        for x in xs {
            if x.n != self.n {
                return Err(Error::DimensionMismatch { expected: self.n, found: x.n });
            }
        }
        let mut out = LinComb::new();
        let parts: Vec<LinComb<TensorKey>> = xs.iter().map(|x| x.to_lincomb()).collect();
        let mut stack: Vec<(Vec<TensorKey>, Q)> = vec![(Vec::new(), qi(1))];
        for part in &parts {
            let mut next = Vec::new();
            for (keys, c) in &stack {
                for (k, ck) in part.iter() {
                    let mut keys = keys.clone();
                    keys.push(k.clone());
                    next.push((keys, c * ck));
                }
            }
            stack = next;
        }
        for (keys, c) in stack {
            out.add_scaled(&self.bracket(&keys), &c);
        }
        Ok(FormValuedElement::from_lincomb(self.n, &out))
    }

    /// `Σ (1/k!) {x, …, x}`; zero iff `x` is a Maurer–Cartan element of `Ω_n ⊗ L`.
    pub fn mc_residual(&self, x: &FormValuedElement) -> Result<FormValuedElement> {
        if x.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.n });
        }
        let r = linf::residual(self, &x.to_lincomb(), self.cut())?;
        Ok(FormValuedElement::from_lincomb(self.n, &r))
    }

    /// The weight-preserving part of the differential, `d ⊗ 1 + 1 ⊗ δ₀`.
    pub fn linear_d(&self, key: &TensorKey) -> LinComb<TensorKey> {
        let (m, x) = key;
        let alpha = PolyForm::from((self.n, m.clone()));
        let mut out = LinComb::new();
        for (dm, c) in alpha.d().terms().iter() {
            out.add_term((dm.clone(), *x), c.clone());
        }
        let sign = koszul(m.form_degree() as i32);
        for (y, c) in self.l.linear_part(*x).iter() {
            out.add_term((m.clone(), *y), c * &sign);
        }
        out
    }
}

fn koszul(parity: i32) -> Q {
    sign_q(parity.rem_euclid(2) == 1)
}

impl GradedBasis for TensorAlgebra {
    type Key = TensorKey;
    fn degree(&self, k: &TensorKey) -> i32 {
        k.0.form_degree() as i32 + self.l.basis()[k.1].deg
    }
    fn weight(&self, k: &TensorKey) -> u32 {
        self.l.basis()[k.1].weight
    }
}

impl Brackets for TensorAlgebra {
    fn bracket(&self, args: &[TensorKey]) -> LinComb<TensorKey> {
        let n = self.n;
        match args.len() {
            0 => self.l.bracket(&[]).map_keys(|y| (Monomial::one(n), *y)),
            1 => {
                let (m, x) = &args[0];
                let alpha = PolyForm::from((n, m.clone()));
                let mut out = LinComb::new();
                for (dm, c) in alpha.d().terms().iter() {
                    out.add_term((dm.clone(), *x), c.clone());
                }
                let sign = koszul(m.form_degree() as i32);
                for (y, c) in self.l.bracket(&[*x]).iter() {
                    out.add_term((m.clone(), *y), c * &sign);
                }
                out
            }
            _ => {
                let xs: Vec<usize> = args.iter().map(|a| a.1).collect();
                let value = self.l.bracket(&xs);
                if value.is_zero() {
                    return LinComb::new();
                }
                let mut parity = 0i32;
                for j in 0..args.len() {
                    for i in 0..j {
                        parity += self.l.basis()[args[i].1].deg * args[j].0.form_degree() as i32;
                    }
                }
                let mut form = PolyForm::one(n);
                for (m, _) in args {
                    form = form.wedge(&PolyForm::from((n, m.clone()))).expect("same simplex");
                    if form.is_zero() {
                        return LinComb::new();
                    }
                }
                let sign = koszul(parity);
                let mut out = LinComb::new();
                for (m, c) in form.terms().iter() {
                    for (y, cy) in value.iter() {
                        out.add_term((m.clone(), *y), c * cy * &sign);
                    }
                }
                out
            }
        }
    }

    fn max_arity(&self) -> usize {
        self.l.arity_cap()
    }
}

/// The graded basis of `W_n ⊗ L`.
#[derive(Clone, Debug)]
pub struct WhitneyTensor {
    n: usize,
    l: CurvedLinf,
}

impl WhitneyTensor {
    pub fn new(n: usize, l: &CurvedLinf) -> Self {
        WhitneyTensor { n, l: l.clone() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn algebra(&self) -> &CurvedLinf {
        &self.l
    }

    /// `δ ⊗ 1 + 1 ⊗ δ₀` on `ω_F ⊗ x`.
    pub fn linear_d(&self, key: &WhitneyKey) -> LinComb<WhitneyKey> {
        let (face, x) = key;
        let mut out = LinComb::new();
        for (g, c) in whitney_coboundary(face, self.n).iter() {
            out.add_term((g.clone(), *x), c.clone());
        }
        let sign = koszul(face.len() as i32 - 1);
        for (y, c) in self.l.linear_part(*x).iter() {
            out.add_term((face.clone(), *y), c * &sign);
        }
        out
    }

    /// All basis keys `ω_F ⊗ x`.
    pub fn keys(&self) -> Vec<WhitneyKey> {
        let mut out = Vec::new();
        for f in crate::dupont::faces(self.n) {
            for x in 0..self.l.dim() {
                out.push((f.clone(), x));
            }
        }
        out
    }

    /// Realizes `Σ c ω_F ⊗ x` as a form-valued element.
    pub fn realize(&self, y: &LinComb<WhitneyKey>) -> FormValuedElement {
        let mut by_basis: BTreeMap<usize, LinComb<Face>> = BTreeMap::new();
        for ((f, x), c) in y.iter() {
            by_basis.entry(*x).or_default().add_term(f.clone(), c.clone());
        }
        let comps = by_basis
            .into_iter()
            .map(|(x, coeffs)| (x, WhitneyElement::new(self.n, coeffs).expect("faces of the simplex").realize()))
            .collect();
        FormValuedElement::new(self.n, comps).expect("same simplex")
    }
}

impl GradedBasis for WhitneyTensor {
    type Key = WhitneyKey;
    fn degree(&self, k: &WhitneyKey) -> i32 {
        k.0.len() as i32 - 1 + self.l.basis()[k.1].deg
    }
    fn weight(&self, k: &WhitneyKey) -> u32 {
        self.l.basis()[k.1].weight
    }
}
