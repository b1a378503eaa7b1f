//! Nilpotent Lie algebras, the gauge locus `γ`, holonomy and horn fillers.

use std::collections::BTreeMap;

use crate::coalg::Brackets;
use crate::dupont::{integrate_top, Dupont};
use crate::error::{Error, Result};
use crate::forms::{AffineSimplexMap, FormFamily, PolyForm, Shape};
use crate::linf::{AlgElement, BasisVector, CurvedLinf};
use crate::lincomb::LinComb;
use crate::perturb::{Contraction, DupontTensor, Perturbed};
use crate::rational::{q, qi};
use crate::tensor::{FormValuedElement, TensorAlgebra, TensorKey, WhitneyKey};

/// A nilpotent Lie algebra with a weight grading compatible with the bracket.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    names: Vec<String>,
    weights: Vec<u32>,
    brackets: BTreeMap<(usize, usize), AlgElement>,
}

impl LieAlgebra {
    pub fn new(basis: &[(&str, u32)]) -> Self {
        LieAlgebra {
            names: basis.iter().map(|(n, _)| n.to_string()).collect(),
            weights: basis.iter().map(|(_, w)| *w).collect(),
            brackets: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    /// Sets `[e_a, e_b] = out` (and `[e_b, e_a] = −out`).
    pub fn set_bracket(&mut self, a: usize, b: usize, out: AlgElement) -> Result<()> {
        let n = self.dim();
        for &k in [a, b].iter().chain(out.keys()) {
            if k >= n {
                return Err(Error::IndexOutOfRange { index: k, n });
            }
        }
        if a == b {
            return Err(Error::Invalid("[e, e] = 0 in a Lie algebra".into()));
        }
        let (key, value) = if a < b { ((a, b), out) } else { ((b, a), -&out) };
        if value.is_zero() {
            self.brackets.remove(&key);
        } else {
            self.brackets.insert(key, value);
        }
        Ok(())
    }

    pub fn basis_bracket(&self, a: usize, b: usize) -> AlgElement {
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => LinComb::new(),
            std::cmp::Ordering::Less => self.brackets.get(&(a, b)).cloned().unwrap_or_default(),
            std::cmp::Ordering::Greater => self.brackets.get(&(b, a)).map(|v| -v).unwrap_or_default(),
        }
    }

    pub fn bracket(&self, x: &AlgElement, y: &AlgElement) -> AlgElement {
        let mut out = LinComb::new();
        for (a, ca) in x.iter() {
            for (b, cb) in y.iter() {
                out.add_scaled(&self.basis_bracket(*a, *b), &(ca * cb));
            }
        }
        out
    }

    /// Nilpotency class bound from the weights: the top weight.
    pub fn max_weight(&self) -> u32 {
        self.weights.iter().copied().max().unwrap_or(1)
    }

    pub fn abelian(dim: usize) -> Self {
        let names: Vec<String> = (0..dim).map(|i| format!("e{i}")).collect();
        let basis: Vec<(&str, u32)> = names.iter().map(|n| (n.as_str(), 1)).collect();
        LieAlgebra::new(&basis)
    }

    /// `X, Y, Z` with `[X, Y] = Z`.
    pub fn heisenberg() -> Self {
        let mut g = LieAlgebra::new(&[("X", 1), ("Y", 1), ("Z", 2)]);
        g.set_bracket(0, 1, LinComb::basis(2)).expect("in range");
        g
    }

    /// The free 3-step nilpotent Lie algebra on `X, Y`:
    /// `Z = [X, Y]`, `U = [X, Z]`, `V = [Y, Z]`.
    pub fn free_three_step() -> Self {
        let mut g = LieAlgebra::new(&[("X", 1), ("Y", 1), ("Z", 2), ("U", 3), ("V", 3)]);
        g.set_bracket(0, 1, LinComb::basis(2)).expect("in range");
        g.set_bracket(0, 2, LinComb::basis(3)).expect("in range");
        g.set_bracket(1, 2, LinComb::basis(4)).expect("in range");
        g
    }

    /// Violations of antisymmetry-compatible Jacobi and of the weight grading.
    pub fn check(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.dim();
        for ((a, b), v) in &self.brackets {
            for k in v.keys() {
                if self.weights[*k] < self.weights[*a] + self.weights[*b] {
                    out.push(format!("[{}, {}] lowers the weight", self.names[*a], self.names[*b]));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let ea = LinComb::basis(a);
                    let eb = LinComb::basis(b);
                    let ec = LinComb::basis(c);
                    let j = &(&self.bracket(&ea, &self.bracket(&eb, &ec)) + &self.bracket(&eb, &self.bracket(&ec, &ea)))
                        + &self.bracket(&ec, &self.bracket(&ea, &eb));
                    if !j.is_zero() {
                        out.push(format!("Jacobi fails on {}, {}, {}", self.names[a], self.names[b], self.names[c]));
                    }
                }
            }
        }
        out
    }
}

/// Sign `s` in `{e_a, e_b} = s·[e_a, e_b]` for the shifted algebra `L = 𝔤[−1]`.
///
/// With `s = −1`, the Maurer–Cartan equation for `A ∈ Ω¹ ⊗ 𝔤` reads
/// `dA − ½[A, A] = 0`, and a horn with edges `X` then `Y` is filled by the edge
/// `BCH(X, Y)`.
pub const LIE_SIGN: i64 = -1;

/// Places `𝔤` in degree −1 of a curved L∞-algebra with `{e_a, e_b} = s·[e_a, e_b]`.
///
/// Basis indices are preserved, so elements of `𝔤` and of the shifted algebra
/// have the same coordinates; this is the only place where the shift happens.
pub fn wrap_lie(g: &LieAlgebra, cutoff: u32) -> CurvedLinf {
    let basis = g.names.iter().zip(&g.weights).map(|(n, w)| BasisVector::new(n.clone(), -1, *w)).collect();
    let mut l = CurvedLinf::new(basis, cutoff, 2).expect("distinct names");
    for ((a, b), v) in &g.brackets {
        l.set_bracket(&[*a, *b], v.scaled(&qi(LIE_SIGN))).expect("in range");
    }
    l
}

/// Inverse of [`wrap_lie`] on structure constants.
pub fn unwrap_lie(l: &CurvedLinf) -> Result<LieAlgebra> {
    let basis: Vec<(&str, u32)> = l.basis().iter().map(|b| (b.name.as_str(), b.weight)).collect();
    if l.basis().iter().any(|b| b.deg != -1) {
        return Err(Error::Invalid("a shifted Lie algebra is concentrated in degree −1".into()));
    }
    let mut g = LieAlgebra::new(&basis);
    for (inputs, v) in l.brackets() {
        if inputs.len() != 2 {
            return Err(Error::Invalid(format!("bracket of arity {} in a shifted Lie algebra", inputs.len())));
        }
        g.set_bracket(inputs[0], inputs[1], v.scaled(&qi(LIE_SIGN)))?;
    }
    Ok(g)
}

/// The cone `C𝔤`: `s𝔤` in degree −2 (indices `0..m`) and `𝔤` in degree −1
/// (indices `m..2m`), with `{sa} = a`, `{a, b} = s·[a, b]`, `{a, sb} = s·s[a, b]`.
pub fn cone(g: &LieAlgebra, cutoff: u32) -> CurvedLinf {
    let m = g.dim();
    let mut basis: Vec<BasisVector> = g.names.iter().zip(&g.weights).map(|(n, w)| BasisVector::new(format!("s{n}"), -2, *w)).collect();
    basis.extend(g.names.iter().zip(&g.weights).map(|(n, w)| BasisVector::new(n.clone(), -1, *w)));
    let mut l = CurvedLinf::new(basis, cutoff, 2).expect("distinct names");
    for a in 0..m {
        l.set_bracket(&[a], LinComb::basis(m + a)).expect("in range");
    }
    for ((a, b), v) in &g.brackets {
        let v = v.scaled(&qi(LIE_SIGN));
        l.set_bracket(&[m + a, m + b], v.map_keys(|k| m + k)).expect("in range");
        l.set_bracket(&[m + a, *b], v.clone()).expect("in range");
        l.set_bracket(&[*a, m + b], -&v).expect("in range");
    }
    l
}

/// Truncated Baker–Campbell–Hausdorff series `log(eˣeʸ)` through brackets of length `depth ≤ 4`.
pub fn bch_oracle(g: &LieAlgebra, x: &AlgElement, y: &AlgElement, depth: usize) -> Result<AlgElement> {
    if depth == 0 || depth > 4 {
        return Err(Error::Depth(depth));
    }
    let b = |u: &AlgElement, v: &AlgElement| g.bracket(u, v);
    let mut out = x + y;
    if depth >= 2 {
        out.add_scaled(&b(x, y), &q(1, 2));
    }
    if depth >= 3 {
        let xy = b(x, y);
        out.add_scaled(&b(x, &xy), &q(1, 12));
        out.add_scaled(&b(y, &b(y, x)), &q(1, 12));
    }
    if depth >= 4 {
        out.add_scaled(&b(y, &b(x, &b(x, y))), &q(-1, 24));
    }
    Ok(out)
}

/// The Maurer–Cartan residual of a simplex in `Ω_n ⊗ L`.
pub fn mc_residual(l: &CurvedLinf, x: &FormValuedElement) -> Result<FormValuedElement> {
    TensorAlgebra::new(x.dim(), l).mc_residual(x)
}

fn coefficientwise(x: &FormValuedElement, f: impl Fn(&PolyForm) -> Result<PolyForm>) -> Result<FormValuedElement> {
    let mut comps = BTreeMap::new();
    for (k, v) in x.components() {
        comps.insert(*k, f(v)?);
    }
    FormValuedElement::new(x.dim(), comps)
}

/// True iff `s_n` vanishes on `x` coefficient-wise.
pub fn gamma_check(x: &FormValuedElement) -> Result<bool> {
    if x.dim() == 0 {
        return Ok(true);
    }
    let d = Dupont::new(x.dim());
    Ok(coefficientwise(x, |a| d.s(a))?.is_zero())
}

/// True iff the component of form degree `n` vanishes.
pub fn is_thin(x: &FormValuedElement) -> bool {
    x.form_degree_part(x.dim()).is_zero()
}

/// `ω_01 ⊗ v` on `Δ¹`.
pub fn edge(v: &AlgElement) -> FormValuedElement {
    FormValuedElement::simple(PolyForm::dt(1, 1).expect("Δ¹"), v)
}

/// `∫_{Δ¹}` of a 1-simplex, coefficient-wise; recovers `v` from `ω_01 ⊗ v`.
pub fn edge_value(x: &FormValuedElement) -> Result<AlgElement> {
    if x.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: x.dim() });
    }
    Ok(x.components().iter().map(|(k, v)| (*k, integrate_top(v))).collect())
}

/// The result of the holonomy retraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Holonomy {
    /// `MC(p_μ) x` in `W_n ⊗ L`.
    pub whitney: LinComb<WhitneyKey>,
    /// `MC(i_μ) MC(p_μ) x`, the point of `γ_n` representing `x`.
    pub simplex: FormValuedElement,
}

/// The retraction `ρ: MC_n(L) → γ_n(L)`.
pub fn rho(l: &CurvedLinf, x: &FormValuedElement) -> Result<Holonomy> {
    let n = x.dim();
    let c = DupontTensor::new(n, l);
    let pert = Perturbed::new(&c, c.algebra(), l.cut());
    let y = pert.pushforward_mc(&x.to_lincomb())?;
    let z = pert.pullback_mc(&y)?;
    Ok(Holonomy { whitney: y, simplex: FormValuedElement::from_lincomb(n, &z) })
}

/// `MC(i_μ)` for the Dupont contraction: the point of `γ_n` with Whitney coordinates `y`.
pub fn gamma_from_whitney(l: &CurvedLinf, n: usize, y: &LinComb<WhitneyKey>) -> Result<FormValuedElement> {
    let c = DupontTensor::new(n, l);
    let pert = Perturbed::new(&c, c.algebra(), l.cut());
    Ok(FormValuedElement::from_lincomb(n, &pert.pullback_mc(y)?))
}

/// Horn data for [`fill_horn`]: simplices on the facets `j ≠ i` of `Δⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Horn {
    pub n: usize,
    pub missing: usize,
    pub faces: BTreeMap<usize, FormValuedElement>,
}

impl Horn {
    pub fn new(n: usize, missing: usize, faces: BTreeMap<usize, FormValuedElement>) -> Result<Self> {
        if n == 0 || missing > n {
            return Err(Error::IndexOutOfRange { index: missing, n });
        }
        let expected: Vec<usize> = (0..=n).filter(|&j| j != missing).collect();
        let present: Vec<usize> = faces.keys().copied().collect();
        if present != expected {
            return Err(Error::IncompatibleFamily(format!("expected facets {expected:?}, got {present:?}")));
        }
        for x in faces.values() {
            if x.dim() + 1 != n {
                return Err(Error::DimensionMismatch { expected: n - 1, found: x.dim() });
            }
        }
        Ok(Horn { n, missing, faces })
    }

    /// The horn `Λ²_1` with edges `a` on `[0, 1]` and `b` on `[1, 2]`.
    pub fn from_edges(a: &FormValuedElement, b: &FormValuedElement) -> Result<Self> {
        let mut faces = BTreeMap::new();
        faces.insert(0, b.clone());
        faces.insert(2, a.clone());
        Horn::new(2, 1, faces)
    }

    // σ: an extension to Δⁿ restricting to the horn, per basis vector of L
    fn extend(&self) -> Result<FormValuedElement> {
        let mut keys: Vec<usize> = self.faces.values().flat_map(|x| x.components().keys().copied()).collect();
        keys.sort();
        keys.dedup();
        let mut comps = BTreeMap::new();
        for k in keys {
            let faces: BTreeMap<usize, PolyForm> = self.faces.iter().map(|(j, x)| (*j, x.component(k))).collect();
            let family = FormFamily::new(self.n, Shape::Horn(self.missing), faces)?;
            comps.insert(k, family.extend()?);
        }
        FormValuedElement::new(self.n, comps)
    }
}

/// The combined homotopy `P^i = p_n h^i + s_n` on forms.
pub fn horn_homotopy(d: &Dupont, i: usize, a: &PolyForm) -> Result<PolyForm> {
    d.p(&a.poincare_h(i)?)?.add(&d.s(a)?)
}

/// Fills a horn of Maurer–Cartan simplices by iterating
/// `x_{k+1} = x_0 − P^i Σ_{ℓ≠1} (1/ℓ!) {x_k^ℓ}` with
/// `x_0 = ε^i y + {P^i σy}` exactly `W` times.
pub fn fill_horn(l: &CurvedLinf, horn: &Horn) -> Result<FormValuedElement> {
    fill_horn_with(l, horn, &horn.extend()?)
}

/// [`fill_horn`] seeded with a caller-supplied extension `σ` of the horn data to `Δⁿ`.
pub fn fill_horn_with(l: &CurvedLinf, horn: &Horn, sigma: &FormValuedElement) -> Result<FormValuedElement> {
    let n = horn.n;
    let i = horn.missing;
    for (j, x) in &horn.faces {
        let r = mc_residual(l, x)?;
        if !r.is_zero() {
            return Err(Error::NonzeroResidual(format!("facet {j}: {r:?}")));
        }
    }
    if sigma.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: sigma.dim() });
    }
    for (j, y) in &horn.faces {
        if &face(sigma, *j)? != y {
            return Err(Error::IncompatibleFamily(format!("extension does not restrict to facet {j}")));
        }
    }
    let d = Dupont::new(n);
    let t = TensorAlgebra::new(n, l);
    let sigma = sigma.clone();
    let p_i = |x: &FormValuedElement| coefficientwise(x, |a| horn_homotopy(&d, i, a));
    let unary = |x: &FormValuedElement| -> FormValuedElement {
        let v = x.to_lincomb().map_linear(|k: &TensorKey| t.bracket(std::slice::from_ref(k)));
        FormValuedElement::from_lincomb(n, &v)
    };
    let eps = coefficientwise(&sigma, |a| a.eval_vertex_form(i))?;
    let x0 = eps.add(&unary(&p_i(&sigma)?))?;
    let mut x = x0.clone();
    for _ in 0..l.cutoff() {
        let nonlinear = t.mc_residual(&x)?.sub(&unary(&x))?;
        x = x0.sub(&p_i(&nonlinear)?)?;
    }
    let r = t.mc_residual(&x)?;
    if !r.is_zero() {
        return Err(Error::NonzeroResidual(format!("filler: {r:?}")));
    }
    for (j, y) in &horn.faces {
        if &x.restrict(&AffineSimplexMap::face(n, *j)?)? != y {
            return Err(Error::IncompatibleFamily(format!("filler does not restrict to facet {j}")));
        }
    }
    Ok(x)
}

/// The facet of a simplex opposite vertex `j`.
pub fn face(x: &FormValuedElement, j: usize) -> Result<FormValuedElement> {
    x.restrict(&AffineSimplexMap::face(x.dim(), j)?)
}

/// `Λ²_1` composition of edges `a` then `b`, returned as the Lie element of the third edge.
pub fn compose_edges(l: &CurvedLinf, a: &AlgElement, b: &AlgElement) -> Result<AlgElement> {
    let filler = fill_horn(l, &Horn::from_edges(&edge(a), &edge(b))?)?;
    edge_value(&face(&filler, 1)?)
}

/// The Dupont contraction on `Ω_n ⊗ L` restricted to `γ`-data: checks `d P^i + P^i d = 1 − ε^i`
/// on all monomials of polynomial degree ≤ `max_poly_degree`.
pub fn verify_horn_homotopy(n: usize, i: usize, max_poly_degree: u32) -> Result<bool> {
    let d = Dupont::new(n);
    for m in crate::forms::monomial_basis(n, max_poly_degree) {
        let a = PolyForm::from((n, m));
        let lhs = horn_homotopy(&d, i, &a)?.d().add(&horn_homotopy(&d, i, &a.d())?)?;
        let rhs = a.sub(&a.eval_vertex_form(i)?)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Keys of the Dupont contraction's small side for an `n`-simplex.
pub fn whitney_keys(l: &CurvedLinf, n: usize) -> Vec<WhitneyKey> {
    DupontTensor::new(n, l).small().keys()
}
