//! Finitely presented nilpotent curved L∞-algebras and their morphisms.
//!
//! Brackets have degree +1 and are graded symmetric. A presentation stores
//! one structure constant per canonically sorted multiset of basis vectors;
//! any other argument order is resolved through the Koszul sign.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::coalg::{self, Brackets, Cutoff, GradedBasis, Word, Words};
use crate::error::{Error, Result};
use crate::linalg;
use crate::lincomb::LinComb;
use crate::rational::Q;
use crate::sign::sort_graded;

/// An element of a presented algebra: a combination of basis indices.
pub type AlgElement = LinComb<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisVector {
    pub name: String,
    pub deg: i32,
    pub weight: u32,
}

impl BasisVector {
    pub fn new(name: impl Into<String>, deg: i32, weight: u32) -> Self {
        BasisVector { name: name.into(), deg, weight }
    }
}

/// A curved L∞-algebra with finitely many basis vectors, truncated above weight `cutoff`.
#[derive(Clone, PartialEq, Eq)]
pub struct CurvedLinf {
    basis: Vec<BasisVector>,
    brackets: BTreeMap<Word<usize>, AlgElement>,
    cutoff: u32,
    arity_cap: usize,
    // entries given in a form graded symmetry forbids or that disagree after sorting
    asymmetric: Vec<(Vec<usize>, String)>,
}

impl fmt::Debug for CurvedLinf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurvedLinf")
            .field("basis", &self.basis)
            .field("brackets", &self.brackets)
            .field("cutoff", &self.cutoff)
            .field("arity_cap", &self.arity_cap)
            .finish()
    }
}

impl CurvedLinf {
    pub fn new(basis: Vec<BasisVector>, cutoff: u32, arity_cap: usize) -> Result<Self> {
        let mut seen = HashMap::new();
        for (i, b) in basis.iter().enumerate() {
            if b.weight == 0 {
                return Err(Error::Invalid(format!("basis vector {} has weight 0; weights start at 1", b.name)));
            }
            if seen.insert(b.name.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate basis name {}", b.name)));
            }
        }
        Ok(CurvedLinf { basis, brackets: BTreeMap::new(), cutoff, arity_cap, asymmetric: Vec::new() })
    }

    /// The zero algebra.
    pub fn zero(cutoff: u32) -> Self {
        CurvedLinf::new(Vec::new(), cutoff, cutoff as usize).expect("empty basis is valid")
    }

    pub fn basis(&self) -> &[BasisVector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn arity_cap(&self) -> usize {
        self.arity_cap
    }

    pub fn cut(&self) -> Cutoff {
        Cutoff::new(self.cutoff)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].name
    }

    /// Stored structure constants, keyed by sorted input multisets.
    pub fn brackets(&self) -> &BTreeMap<Word<usize>, AlgElement> {
        &self.brackets
    }

    /// Sets `{inputs} = out`; the inputs may be in any order.
    pub fn set_bracket(&mut self, inputs: &[usize], out: AlgElement) -> Result<()> {
        for &i in inputs.iter().chain(out.keys()) {
            if i >= self.dim() {
                return Err(Error::IndexOutOfRange { index: i, n: self.dim() });
            }
        }
        let out = out.filtered(|k| self.basis[*k].weight <= self.cutoff);
        match sort_graded(inputs, |k| self.basis[*k].deg) {
            None => {
                if !out.is_zero() {
                    self.asymmetric.push((inputs.to_vec(), "repeated odd argument with nonzero value".into()));
                }
            }
            Some((negative, sorted)) => {
                let out = if negative { -&out } else { out };
                if let Some(prev) = self.brackets.get(&sorted) {
                    if *prev != out {
                        self.asymmetric.push((inputs.to_vec(), "conflicts with an earlier entry for a permutation".into()));
                    }
                }
                if out.is_zero() {
                    self.brackets.remove(&sorted);
                } else {
                    self.brackets.insert(sorted, out);
                }
            }
        }
        Ok(())
    }

    /// Adds to an existing structure constant.
    pub fn add_to_bracket(&mut self, inputs: &[usize], out: &AlgElement) -> Result<()> {
        let current = self.bracket(inputs);
        let Some((negative, sorted)) = sort_graded(inputs, |k| self.basis[*k].deg) else {
            return self.set_bracket(inputs, out.clone());
        };
        let current = if negative { -&current } else { current };
        let delta = if negative { -out } else { out.clone() };
        self.brackets.remove(&sorted);
        self.set_bracket(&sorted, &current + &delta)
    }

    pub fn with_cutoff(&self, cutoff: u32) -> CurvedLinf {
        let mut out = self.clone();
        out.cutoff = cutoff;
        for v in out.brackets.values_mut() {
            v.retain(|k| self.basis[*k].weight <= cutoff);
        }
        out.brackets.retain(|_, v| !v.is_zero());
        out
    }

    /// Replaces the arity cap; fails if a stored bracket has larger arity.
    pub fn with_arity_cap(&self, arity_cap: usize) -> Result<CurvedLinf> {
        if let Some(w) = self.brackets.keys().find(|w| w.len() > arity_cap) {
            return Err(Error::CutoffOverflow(format!("bracket {{{}}} has arity {} above the arity cap {arity_cap}", self.names(w).join(", "), w.len())));
        }
        let mut out = self.clone();
        out.arity_cap = arity_cap;
        Ok(out)
    }

    pub fn element_from_names(&self, terms: &[(&str, Q)]) -> Result<AlgElement> {
        let mut out = LinComb::new();
        for (name, c) in terms {
            let i = self.index_of(name).ok_or_else(|| Error::Invalid(format!("unknown basis vector {name}")))?;
            out.add_term(i, c.clone());
        }
        Ok(out)
    }

    /// Minimum weight of the support; `None` for zero.
    pub fn weight_of(&self, x: &AlgElement) -> Option<u32> {
        x.keys().map(|k| self.basis[*k].weight).min()
    }

    /// The degree-`d` component.
    pub fn degree_part(&self, x: &AlgElement, d: i32) -> AlgElement {
        x.filtered(|k| self.basis[*k].deg == d)
    }

    /// All canonical words on the basis of weight ≤ cutoff, including the empty word.
    pub fn words(&self) -> Vec<Word<usize>> {
        let letters: Vec<usize> = (0..self.dim()).collect();
        coalg::words_up_to(self, &letters, self.cutoff)
    }

    /// The weight-preserving part `δ₀` of the unary bracket, on a basis vector.
    pub fn linear_part(&self, k: usize) -> AlgElement {
        let w = self.basis[k].weight;
        self.bracket(&[k]).filtered(|j| self.basis[*j].weight == w)
    }

    /// Checks symmetry, degree and filtration conditions and the generalized
    /// Jacobi identity on every word of weight ≤ cutoff.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (inputs, why) in &self.asymmetric {
            report.push(ViolationKind::Symmetry, self.names(inputs), why.clone());
        }
        for (inputs, out) in &self.brackets {
            let deg: i32 = inputs.iter().map(|k| self.basis[*k].deg).sum::<i32>() + 1;
            let weight: u32 = inputs.iter().map(|k| self.basis[*k].weight).sum();
            if inputs.len() > self.arity_cap {
                report.push(ViolationKind::Arity, self.names(inputs), format!("arity {} exceeds cap {}", inputs.len(), self.arity_cap));
            }
            for k in out.keys() {
                if self.basis[*k].deg != deg {
                    report.push(ViolationKind::Degree, self.names(inputs), format!("output {} has degree {}, expected {deg}", self.name(*k), self.basis[*k].deg));
                }
                if self.basis[*k].weight < weight.max(1) {
                    report.push(ViolationKind::Weight, self.names(inputs), format!("output {} has weight {}, expected ≥ {}", self.name(*k), self.basis[*k].weight, weight.max(1)));
                }
            }
        }
        let cut = self.cut();
        for w in self.words() {
            report.checked += 1;
            let j = match jacobiator(self, &w, cut) {
                Ok(j) => j,
                Err(e) => {
                    report.push(ViolationKind::Jacobi, self.names(&w), e.to_string());
                    continue;
                }
            };
            if !j.is_zero() {
                report.push(ViolationKind::Jacobi, self.names(&w), format!("Σ ± {{{{x_I}}, x_J}} = {}", self.format(&j)));
            }
        }
        report
    }

    pub fn names(&self, w: &[usize]) -> Vec<String> {
        w.iter().map(|k| self.basis[*k].name.clone()).collect()
    }

    /// Human-readable element.
    pub fn format(&self, x: &AlgElement) -> String {
        if x.is_zero() {
            return "0".into();
        }
        x.iter().map(|(k, c)| format!("({c}){}", self.name(*k))).collect::<Vec<_>>().join(" + ")
    }

    /// `Σ_n (1/n!) {x, …, x}`; zero iff `x` is Maurer–Cartan.
    pub fn curvature_residual(&self, x: &AlgElement) -> Result<AlgElement> {
        residual(self, x, self.cut())
    }

    /// `L × M` with componentwise brackets; basis names get the prefixes.
    pub fn product(a: &CurvedLinf, b: &CurvedLinf, prefix_a: &str, prefix_b: &str) -> Result<CurvedLinf> {
        let mut basis: Vec<BasisVector> = a.basis.iter().map(|v| BasisVector::new(format!("{prefix_a}{}", v.name), v.deg, v.weight)).collect();
        basis.extend(b.basis.iter().map(|v| BasisVector::new(format!("{prefix_b}{}", v.name), v.deg, v.weight)));
        let mut out = CurvedLinf::new(basis, a.cutoff.min(b.cutoff), a.arity_cap.max(b.arity_cap))?;
        for (inputs, v) in &a.brackets {
            out.add_to_bracket(inputs, v)?;
        }
        let shift = a.dim();
        for (inputs, v) in &b.brackets {
            let ins: Vec<usize> = inputs.iter().map(|k| k + shift).collect();
            out.add_to_bracket(&ins, &v.map_keys(|k| k + shift))?;
        }
        Ok(out)
    }
}

impl GradedBasis for CurvedLinf {
    type Key = usize;
    fn degree(&self, k: &usize) -> i32 {
        self.basis[*k].deg
    }
    fn weight(&self, k: &usize) -> u32 {
        self.basis[*k].weight
    }
}

impl Brackets for CurvedLinf {
    fn bracket(&self, args: &[usize]) -> AlgElement {
        if args.len() > self.arity_cap {
            return LinComb::new();
        }
        let Some((negative, sorted)) = sort_graded(args, |k| self.basis[*k].deg) else {
            return LinComb::new();
        };
        match self.brackets.get(&sorted) {
            None => LinComb::new(),
            Some(v) => {
                if negative {
                    -v
                } else {
                    v.clone()
                }
            }
        }
    }

    fn max_arity(&self) -> usize {
        self.arity_cap
    }
}

/// `π₁ δ² w`, the generalized Jacobi expression on a word.
pub fn jacobiator<S: Brackets + ?Sized>(s: &S, w: &[S::Key], cut: Cutoff) -> Result<LinComb<S::Key>> {
    let inner = coalg::codifferential(s, w, cut)?;
    let mut out = LinComb::new();
    for (u, c) in inner.iter() {
        if u.len() <= s.max_arity() {
            out.add_scaled(&truncate(s, &s.bracket(u), cut), c);
        }
    }
    Ok(out)
}

/// `Σ (1/n!) {xⁿ} = π₁ δ exp(x)` for any structure.
pub fn residual<S: Brackets + ?Sized>(s: &S, x: &LinComb<S::Key>, cut: Cutoff) -> Result<LinComb<S::Key>> {
    let e = coalg::exp_element(s, x, cut)?;
    let mut out = LinComb::new();
    for (u, c) in e.iter() {
        if u.len() <= s.max_arity() {
            out.add_scaled(&truncate(s, &s.bracket(u), cut), c);
        }
    }
    Ok(out)
}

fn truncate<S: GradedBasis + ?Sized>(s: &S, x: &LinComb<S::Key>, cut: Cutoff) -> LinComb<S::Key> {
    x.filtered(|k| s.weight(k) <= cut.weight)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    Symmetry,
    Degree,
    Weight,
    Arity,
    Jacobi,
    Morphism,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Symmetry => "symmetry",
            ViolationKind::Degree => "degree",
            ViolationKind::Weight => "filtration",
            ViolationKind::Arity => "arity",
            ViolationKind::Jacobi => "jacobi",
            ViolationKind::Morphism => "morphism",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub arity: usize,
    pub inputs: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, kind: ViolationKind, inputs: Vec<String>, detail: String) {
        self.violations.push(Violation { kind, arity: inputs.len(), inputs, detail });
    }
}

/// A morphism of curved L∞-algebras, `f = (f_(0), f_(1), …)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinfMorphism {
    source: CurvedLinf,
    target: CurvedLinf,
    components: BTreeMap<Word<usize>, AlgElement>,
    arity_cap: usize,
}

impl LinfMorphism {
    pub fn new(source: CurvedLinf, target: CurvedLinf, arity_cap: usize) -> Self {
        LinfMorphism { source, target, components: BTreeMap::new(), arity_cap }
    }

    /// A strict morphism from the images of the source basis vectors.
    pub fn strict(source: CurvedLinf, target: CurvedLinf, images: &[AlgElement]) -> Result<Self> {
        if images.len() != source.dim() {
            return Err(Error::DimensionMismatch { expected: source.dim(), found: images.len() });
        }
        let cap = source.cutoff as usize;
        let mut f = LinfMorphism::new(source, target, cap.max(1));
        for (i, img) in images.iter().enumerate() {
            f.set_component(&[i], img.clone())?;
        }
        Ok(f)
    }

    pub fn identity(l: &CurvedLinf) -> Self {
        let images: Vec<AlgElement> = (0..l.dim()).map(LinComb::basis).collect();
        LinfMorphism::strict(l.clone(), l.clone(), &images).expect("square")
    }

    pub fn source(&self) -> &CurvedLinf {
        &self.source
    }

    pub fn target(&self) -> &CurvedLinf {
        &self.target
    }

    pub fn arity_cap(&self) -> usize {
        self.arity_cap
    }

    pub fn components(&self) -> &BTreeMap<Word<usize>, AlgElement> {
        &self.components
    }

    pub fn is_strict(&self) -> bool {
        self.components.keys().all(|k| k.len() == 1)
    }

    pub fn cut(&self) -> Cutoff {
        Cutoff::new(self.source.cutoff.min(self.target.cutoff))
    }

    /// Sets `f_(k)(inputs) = out`; inputs in any order.
    pub fn set_component(&mut self, inputs: &[usize], out: AlgElement) -> Result<()> {
        for &i in inputs {
            if i >= self.source.dim() {
                return Err(Error::IndexOutOfRange { index: i, n: self.source.dim() });
            }
        }
        for &o in out.keys() {
            if o >= self.target.dim() {
                return Err(Error::IndexOutOfRange { index: o, n: self.target.dim() });
            }
        }
        let Some((negative, sorted)) = sort_graded(inputs, |k| self.source.basis[*k].deg) else {
            if out.is_zero() {
                return Ok(());
            }
            return Err(Error::Invalid("component on a repeated odd argument must vanish".into()));
        };
        let out = out.filtered(|k| self.target.basis[*k].weight <= self.target.cutoff);
        let out = if negative { -&out } else { out };
        if out.is_zero() {
            self.components.remove(&sorted);
        } else {
            self.components.insert(sorted, out);
        }
        Ok(())
    }

    /// `f_(k)(args)` for source basis vectors in any order.
    pub fn component(&self, args: &[usize]) -> AlgElement {
        if args.len() > self.arity_cap {
            return LinComb::new();
        }
        let Some((negative, sorted)) = sort_graded(args, |k| self.source.basis[*k].deg) else {
            return LinComb::new();
        };
        match self.components.get(&sorted) {
            None => LinComb::new(),
            Some(v) => {
                if negative {
                    -v
                } else {
                    v.clone()
                }
            }
        }
    }

    /// The linear part `d f = f_(1)` on a basis vector.
    pub fn linear(&self, k: usize) -> AlgElement {
        self.component(&[k])
    }

    /// `C(f)` on a word of the source.
    pub fn coalgebra_map(&self, w: &[usize]) -> Result<Words<usize>> {
        coalg::coalgebra_map(&self.source, &self.target, w, self.cut(), |args| self.component(args))
    }

    pub fn coalgebra_map_sum(&self, x: &Words<usize>) -> Result<Words<usize>> {
        let mut out = LinComb::new();
        for (w, c) in x.iter() {
            out.add_scaled(&self.coalgebra_map(w)?, c);
        }
        Ok(out)
    }

    /// The action on Maurer–Cartan elements, `f(x) = Σ (1/k!) f_(k)(x, …, x)`.
    pub fn apply(&self, x: &AlgElement) -> Result<AlgElement> {
        let e = coalg::exp_element(&self.source, x, self.cut())?;
        let mut out = LinComb::new();
        for (u, c) in e.iter() {
            out.add_scaled(&self.component(u), c);
        }
        Ok(out)
    }

    /// Checks degree and filtration of components and `π₁ C(f) δ = π₁ δ C(f)` on all words.
    pub fn check(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (inputs, out) in &self.components {
            let deg: i32 = inputs.iter().map(|k| self.source.basis[*k].deg).sum();
            let weight: u32 = inputs.iter().map(|k| self.source.basis[*k].weight).sum();
            for k in out.keys() {
                if self.target.basis[*k].deg != deg {
                    report.push(ViolationKind::Degree, self.source.names(inputs), format!("component has output {} of wrong degree", self.target.name(*k)));
                }
                if self.target.basis[*k].weight < weight.max(1) {
                    report.push(ViolationKind::Weight, self.source.names(inputs), format!("component has output {} of low weight", self.target.name(*k)));
                }
            }
        }
        let cut = self.cut();
        for w in self.source.words() {
            if coalg::word_weight(&self.source, &w) > cut.weight {
                continue;
            }
            report.checked += 1;
            let lhs = (|| -> Result<AlgElement> {
                let dw = coalg::codifferential(&self.source, &w, cut)?;
                let mut out = LinComb::new();
                for (u, c) in dw.iter() {
                    out.add_scaled(&self.component(u), c);
                }
                Ok(out)
            })();
            let rhs = (|| -> Result<AlgElement> {
                let fw = self.coalgebra_map(&w)?;
                let mut out = LinComb::new();
                for (u, c) in fw.iter() {
                    out.add_scaled(&truncate(&self.target, &self.target.bracket(u), cut), c);
                }
                Ok(out)
            })();
            match (lhs, rhs) {
                (Ok(l), Ok(r)) if l == r => {}
                (Ok(l), Ok(r)) => report.push(
                    ViolationKind::Morphism,
                    self.source.names(&w),
                    format!("f∘δ = {} but δ∘f = {}", self.target.format(&l), self.target.format(&r)),
                ),
                (Err(e), _) | (_, Err(e)) => report.push(ViolationKind::Morphism, self.source.names(&w), e.to_string()),
            }
        }
        report
    }

    /// The composite `g ∙ f` (apply `self = f` first).
    pub fn then(&self, g: &LinfMorphism) -> Result<LinfMorphism> {
        compose_morphisms(g, self)
    }
}

/// `g ∙ f`, computed as `π₁ C(g) C(f)` on every source word of weight ≤ cutoff.
pub fn compose_morphisms(g: &LinfMorphism, f: &LinfMorphism) -> Result<LinfMorphism> {
    if f.target != g.source {
        return Err(Error::Invalid("target of the first morphism differs from the source of the second".into()));
    }
    let cap = f.arity_cap.max(g.arity_cap);
    let mut out = LinfMorphism::new(f.source.clone(), g.target.clone(), cap);
    let cut = Cutoff::new(f.source.cutoff.min(f.target.cutoff).min(g.target.cutoff));
    for w in f.source.words() {
        let fw = coalg::coalgebra_map(&f.source, &f.target, &w, cut, |args| f.component(args))?;
        let mut value = LinComb::new();
        for (u, c) in fw.iter() {
            value.add_scaled(&g.component(u), c);
        }
        let value = truncate(&g.target, &value, cut);
        if value.is_zero() {
            continue;
        }
        if w.len() > cap {
            return Err(Error::CutoffOverflow(format!(
                "composite has a nonzero component of arity {} above the arity cap {cap}",
                w.len()
            )));
        }
        out.components.insert(w, value);
    }
    Ok(out)
}

/// Transports the structure of `base` along a coalgebra automorphism.
///
/// `phi` lists components `φ_(k)` for `k ≠ 1` on the basis of `base`
/// (`φ_(1)` is the identity). Returns `(L', φ)` with `φ: L' → base` a
/// morphism and `L'` on the same basis, whose codifferential is
/// `C(φ)⁻¹ δ C(φ)`.
pub fn conjugate(base: &CurvedLinf, phi: &BTreeMap<Word<usize>, AlgElement>) -> Result<(CurvedLinf, LinfMorphism)> {
    let cap = base.cutoff as usize;
    let mut morph = LinfMorphism::new(base.clone(), base.clone(), cap.max(1));
    for i in 0..base.dim() {
        morph.set_component(&[i], LinComb::basis(i))?;
    }
    for (inputs, out) in phi {
        if inputs.len() == 1 {
            return Err(Error::Invalid("the linear part of a conjugating automorphism is the identity".into()));
        }
        morph.set_component(inputs, out.clone())?;
    }
    let cut = base.cut();
    let mut twisted = CurvedLinf::new(base.basis.clone(), base.cutoff, cap)?;
    for w in base.words() {
        let fw = morph.coalgebra_map(&w)?;
        let dfw = coalg::codifferential_sum(base, &fw, cut)?;
        let value = coalg::pi1(&inverse_unipotent(&morph, &dfw)?);
        if !value.is_zero() {
            twisted.set_bracket(&w, value)?;
        }
    }
    let mut phi_out = LinfMorphism::new(twisted.clone(), base.clone(), cap.max(1));
    phi_out.components = morph.components.clone();
    Ok((twisted, phi_out))
}

// C(φ)⁻¹ = Σ_j (1 − C(φ))^j, a finite sum since 1 − C(φ) raises 2·weight − length
fn inverse_unipotent(morph: &LinfMorphism, x: &Words<usize>) -> Result<Words<usize>> {
    let mut out = x.clone();
    let mut term = x.clone();
    loop {
        let mapped = morph.coalgebra_map_sum(&term)?;
        let next = &term - &mapped;
        if next.is_zero() {
            break;
        }
        out += &next;
        term = next;
    }
    Ok(out)
}

/// Basis keys of a fibered product `pL × N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberedProduct {
    /// The algebra on `pL × N`: first the kernel basis of `d f`, then the basis of `N`.
    pub algebra: CurvedLinf,
    /// The kernel basis vectors, as elements of `L`.
    pub kernel: Vec<AlgElement>,
    /// The strict projection `F: P → N`.
    pub to_n: LinfMorphism,
    /// `G: P → L` in the gauge `p G_(1)(ζ) = pζ`, `p G_(n) = 0` otherwise.
    pub to_l: LinfMorphism,
}

/// The fibered product `L ×_M N` of a fibration `f: L → M` (certified by a
/// section `s` of `d f`, given on the basis of `M`) with `g: N → M`.
pub fn fibered_product(f: &LinfMorphism, section: &[AlgElement], g: &LinfMorphism) -> Result<FiberedProduct> {
    let l = f.source();
    let m = f.target();
    let n = g.source();
    if g.target() != m {
        return Err(Error::Invalid("f and g have different targets".into()));
    }
    if section.len() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: section.len() });
    }
    let df = |x: &AlgElement| x.map_linear(|k| f.linear(*k));
    for (j, sj) in section.iter().enumerate() {
        for k in sj.keys() {
            if l.basis[*k].deg != m.basis[j].deg || l.basis[*k].weight < m.basis[j].weight {
                return Err(Error::NotASection(format!("s({}) is not of matching degree and filtration", m.name(j))));
            }
        }
        if df(sj) != LinComb::basis(j) {
            return Err(Error::NotASection(format!("d f(s({})) = {}", m.name(j), m.format(&df(sj)))));
        }
    }
    let s = |y: &AlgElement| y.map_linear(|k| section[*k].clone());
    let p = |x: &AlgElement| x - &s(&df(x));
    let cutoff = l.cutoff.min(m.cutoff).min(n.cutoff);
    let cut = Cutoff::new(cutoff);

    // filtered kernel basis of d f, per degree, heaviest columns first
    let mut kernel: Vec<AlgElement> = Vec::new();
    let mut kernel_basis: Vec<BasisVector> = Vec::new();
    let mut degrees: Vec<i32> = l.basis.iter().map(|b| b.deg).collect();
    degrees.sort();
    degrees.dedup();
    for d in degrees {
        let mut cols: Vec<usize> = (0..l.dim()).filter(|&k| l.basis[k].deg == d).collect();
        cols.sort_by(|a, b| l.basis[*b].weight.cmp(&l.basis[*a].weight).then(a.cmp(b)));
        let images: Vec<AlgElement> = cols.iter().map(|&k| f.linear(k)).collect();
        for v in linalg::kernel(&cols, &images) {
            let weight = l.weight_of(&v).expect("nonzero kernel vector");
            let mut name = format!("k{}", kernel.len());
            while n.index_of(&name).is_some() {
                name.push('\'');
            }
            kernel_basis.push(BasisVector::new(name, d, weight));
            kernel.push(v);
        }
    }
    let nk = kernel.len();
    let mut basis = kernel_basis;
    basis.extend(n.basis.iter().cloned());
    let mut pb = CurvedLinf::new(basis, cutoff, cutoff as usize)?;

    // F: P → N strict
    let f_images: Vec<AlgElement> = (0..pb.dim()).map(|i| if i < nk { LinComb::new() } else { LinComb::basis(i - nk) }).collect();
    let big_f = LinfMorphism::strict(pb.clone(), n.clone(), &f_images)?;

    // G: P → L, solved word by word
    let mut big_g = LinfMorphism::new(pb.clone(), l.clone(), cutoff as usize);
    let words = pb.words();
    for w in &words {
        let target = {
            let fw = big_f.coalgebra_map(w)?;
            let mut t = LinComb::new();
            for (u, c) in fw.iter() {
                t.add_scaled(&g.component(u), c);
            }
            truncate(m, &t, cut)
        };
        let mut z: AlgElement = if w.len() == 1 && w[0] < nk { kernel[w[0]].clone() } else { LinComb::new() };
        for _ in 0..=cutoff + 1 {
            big_g.set_component(w, z.clone())?;
            let gw = big_g.coalgebra_map(w)?;
            let mut lhs = LinComb::new();
            for (u, c) in gw.iter() {
                lhs.add_scaled(&f.component(u), c);
            }
            let err = &target - &truncate(m, &lhs, cut);
            if err.is_zero() {
                break;
            }
            z = &z + &s(&err);
        }
        big_g.set_component(w, z)?;
    }

    // brackets: N-part from N, pL-part from p π₁ δ_L C(G)
    for w in &words {
        if w.len() > pb.arity_cap {
            continue;
        }
        let mut value = LinComb::new();
        let fw = big_f.coalgebra_map(w)?;
        for (u, c) in fw.iter() {
            value.add_scaled(&truncate(n, &n.bracket(u), cut).map_keys(|k| k + nk), c);
        }
        let gw = big_g.coalgebra_map(w)?;
        let mut top = LinComb::new();
        for (u, c) in gw.iter() {
            top.add_scaled(&truncate(l, &l.bracket(u), cut), c);
        }
        let top = p(&top);
        if !top.is_zero() {
            let ks: Vec<usize> = (0..nk).collect();
            let coords = linalg::solve(&ks, &kernel, &top)
                .ok_or_else(|| Error::Invalid("projected bracket leaves the kernel of d f".into()))?;
            value += &coords;
        }
        pb.set_bracket(w, value)?;
    }
    let mut to_n = big_f;
    to_n.source = pb.clone();
    let mut to_l = big_g;
    to_l.source = pb.clone();
    Ok(FiberedProduct { algebra: pb, kernel, to_n, to_l })
}
