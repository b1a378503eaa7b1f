//! Polynomial differential forms on the standard simplex.
//!
//! A form on `Δⁿ` is stored in normal coordinates: the barycentric
//! coordinate `t_0` and its differential are eliminated through
//! `t_0 = 1 − Σ t_i`, `dt_0 = −Σ dt_i`, so every form is a unique sparse
//! combination of monomials `t^a dt_S` with `S ⊆ {1..n}`.

use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::lincomb::LinComb;
use crate::rational::{binomial, factorial, Q};

/// `t_1^{a_1} ⋯ t_n^{a_n} dt_{j_1} ∧ ⋯ ∧ dt_{j_k}`; bit `j − 1` of `ds` marks `dt_j`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial {
    pub exp: Vec<u32>,
    pub ds: u32,
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial { exp: vec![0; n], ds: 0 }
    }

    pub fn form_degree(&self) -> usize {
        self.ds.count_ones() as usize
    }

    pub fn poly_degree(&self) -> u32 {
        self.exp.iter().sum()
    }

    /// Indices `j ≥ 1` of the `dt_j` factors, increasing.
    pub fn dt_indices(&self) -> Vec<usize> {
        (1..=self.exp.len()).filter(|j| self.ds & (1 << (j - 1)) != 0).collect()
    }

    fn with_ds(exp: Vec<u32>, dts: &[usize]) -> Self {
        let ds = dts.iter().fold(0u32, |acc, &j| acc | (1 << (j - 1)));
        Monomial { exp, ds }
    }
}

/// Sign and mask of `dt_A ∧ dt_B`, or `None` if a factor repeats.
fn wedge_masks(a: u32, b: u32) -> Option<(bool, u32)> {
    if a & b != 0 {
        return None;
    }
    // each dt in b moves left past the elements of a greater than it
    let mut parity = 0u32;
    let mut rest = b;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        rest &= rest - 1;
        parity += (a >> (bit + 1)).count_ones();
    }
    Some((parity % 2 == 1, a | b))
}

/// A polynomial differential form on `Δⁿ` with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyForm {
    n: usize,
    terms: LinComb<Monomial>,
}

impl fmt::Debug for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyForm[n={}]{}", self.n, self)
    }
}

impl fmt::Display for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (j, &e) in m.exp.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, " t{}", j + 1)?,
                    _ => write!(f, " t{}^{}", j + 1, e)?,
                }
            }
            for j in m.dt_indices() {
                write!(f, " dt{j}")?;
            }
        }
        Ok(())
    }
}

impl PolyForm {
    pub fn zero(n: usize) -> Self {
        PolyForm { n, terms: LinComb::new() }
    }

    pub fn constant(n: usize, c: Q) -> Self {
        PolyForm { n, terms: LinComb::single(Monomial::one(n), c) }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Q::one())
    }

    /// Builds a form from raw terms; fails if a key does not fit `Δⁿ`.
    pub fn from_terms(n: usize, terms: LinComb<Monomial>) -> Result<Self> {
        for m in terms.keys() {
            if m.exp.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.exp.len() });
            }
            if n < 32 && m.ds >> n != 0 {
                return Err(Error::IndexOutOfRange { index: 32 - m.ds.leading_zeros() as usize, n });
            }
        }
        Ok(PolyForm { n, terms })
    }

    /// `coef · t^exp dt_{dts[0]} ∧ ⋯`, with `dts` given as indices in `1..=n` (any order).
    pub fn monomial(n: usize, exp: &[u32], dts: &[usize], coef: Q) -> Result<Self> {
        if exp.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: exp.len() });
        }
        let mut out = Self::constant(n, coef);
        let mut poly = Monomial::one(n);
        poly.exp = exp.to_vec();
        out = out.wedge(&PolyForm { n, terms: LinComb::basis(poly) })?;
        for &j in dts {
            if j == 0 || j > n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
            out = out.wedge(&Self::dt(n, j)?)?;
        }
        Ok(out)
    }

    /// The barycentric coordinate `t_i`, `0 ≤ i ≤ n`.
    pub fn t(n: usize, i: usize) -> Result<Self> {
        if i > n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        if i == 0 {
            let mut terms = LinComb::basis(Monomial::one(n));
            for j in 1..=n {
                let mut m = Monomial::one(n);
                m.exp[j - 1] = 1;
                terms.add_term(m, -Q::one());
            }
            return Ok(PolyForm { n, terms });
        }
        let mut m = Monomial::one(n);
        m.exp[i - 1] = 1;
        Ok(PolyForm { n, terms: LinComb::basis(m) })
    }

    /// The differential `dt_i`, `0 ≤ i ≤ n`.
    pub fn dt(n: usize, i: usize) -> Result<Self> {
        if i > n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        let mut terms = LinComb::new();
        if i == 0 {
            for j in 1..=n {
                terms.add_term(Monomial::with_ds(vec![0; n], &[j]), -Q::one());
            }
        } else {
            terms.add_term(Monomial::with_ds(vec![0; n], &[i]), Q::one());
        }
        Ok(PolyForm { n, terms })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &LinComb<Monomial> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    /// Form degree if homogeneous; `None` for zero or mixed-degree forms.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(Monomial::form_degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// The component of form degree `k`.
    pub fn degree_part(&self, k: usize) -> PolyForm {
        PolyForm { n: self.n, terms: self.terms.filtered(|m| m.form_degree() == k) }
    }

    /// Highest total polynomial degree among the terms.
    pub fn poly_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::poly_degree).max().unwrap_or(0)
    }

    fn check_dim(&self, other: &PolyForm) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    pub fn add(&self, other: &PolyForm) -> Result<PolyForm> {
        self.check_dim(other)?;
        Ok(PolyForm { n: self.n, terms: &self.terms + &other.terms })
    }

    pub fn sub(&self, other: &PolyForm) -> Result<PolyForm> {
        self.check_dim(other)?;
        Ok(PolyForm { n: self.n, terms: &self.terms - &other.terms })
    }

    pub fn add_assign(&mut self, other: &PolyForm) {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.terms += &other.terms;
    }

    pub fn add_scaled(&mut self, other: &PolyForm, c: &Q) {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.terms.add_scaled(&other.terms, c);
    }

    pub fn scale(&self, c: &Q) -> PolyForm {
        PolyForm { n: self.n, terms: self.terms.scaled(c) }
    }

    pub fn neg(&self) -> PolyForm {
        PolyForm { n: self.n, terms: -&self.terms }
    }

    /// Graded-commutative product.
    pub fn wedge(&self, other: &PolyForm) -> Result<PolyForm> {
        self.check_dim(other)?;
        let mut terms = LinComb::new();
        for (ma, ca) in self.terms.iter() {
            for (mb, cb) in other.terms.iter() {
                if let Some((m, negative)) = wedge_monomials(ma, mb) {
                    let c = ca * cb;
                    terms.add_term(m, if negative { -c } else { c });
                }
            }
        }
        Ok(PolyForm { n: self.n, terms })
    }

    /// The de Rham differential.
    pub fn d(&self) -> PolyForm {
        let mut terms = LinComb::new();
        for (m, c) in self.terms.iter() {
            for j in 1..=self.n {
                let a = m.exp[j - 1];
                if a == 0 || m.ds & (1 << (j - 1)) != 0 {
                    continue;
                }
                let below = (m.ds & ((1u32 << (j - 1)) - 1)).count_ones();
                let mut exp = m.exp.clone();
                exp[j - 1] -= 1;
                let key = Monomial { exp, ds: m.ds | (1 << (j - 1)) };
                let coef = c * Q::from_integer(a.into());
                terms.add_term(key, if below % 2 == 1 { -coef } else { coef });
            }
        }
        PolyForm { n: self.n, terms }
    }

    /// Evaluation at the vertex `e_i`; positive-degree components contribute 0.
    pub fn eval_vertex(&self, i: usize) -> Result<Q> {
        if i > self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        let mut acc = Q::zero();
        for (m, c) in self.terms.iter() {
            if m.ds != 0 {
                continue;
            }
            let survives = m.exp.iter().enumerate().all(|(j, &e)| e == 0 || j + 1 == i);
            if survives {
                acc += c;
            }
        }
        Ok(acc)
    }

    /// The constant form `ε^i(a)·1`.
    pub fn eval_vertex_form(&self, i: usize) -> Result<PolyForm> {
        Ok(PolyForm::constant(self.n, self.eval_vertex(i)?))
    }

    /// Pullback along an affine map of simplices whose target is this form's simplex.
    pub fn pullback(&self, map: &AffineSimplexMap) -> Result<PolyForm> {
        if map.target != self.n {
            return Err(Error::DimensionMismatch { expected: map.target, found: self.n });
        }
        let m = map.source;
        let coords: Vec<PolyForm> = (1..=self.n).map(|j| map.coordinate(j)).collect();
        let diffs: Vec<PolyForm> = coords.iter().map(PolyForm::d).collect();
        let mut powers: Vec<Vec<PolyForm>> = coords.iter().map(|c| vec![PolyForm::one(m), c.clone()]).collect();
        let mut out = PolyForm::zero(m);
        for (mono, c) in self.terms.iter() {
            let mut img = PolyForm::constant(m, c.clone());
            for (j, &e) in mono.exp.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[j].len() <= e as usize {
                    let next = powers[j].last().unwrap().wedge(&coords[j])?;
                    powers[j].push(next);
                }
                img = img.wedge(&powers[j][e as usize])?;
            }
            for j in mono.dt_indices() {
                img = img.wedge(&diffs[j - 1])?;
            }
            out.add_assign(&img);
        }
        Ok(out)
    }

    /// The Poincaré homotopy `h^i` of the dilation flow centred at vertex `i`.
    ///
    /// Substitutes `t_j ↦ u t_j + (1−u)δ_ij`, `dt_j ↦ u dt_j + (t_j − δ_ij) du`,
    /// keeps the terms linear in `du`, moves `du` to the front and integrates
    /// over `u ∈ [0,1]`. With this convention `d h^i + h^i d = 1 − ε^i`.
    pub fn poincare_h(&self, i: usize) -> Result<PolyForm> {
        if i > self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        let mut out = PolyForm::zero(self.n);
        for (m, c) in self.terms.iter() {
            out.add_assign(&poincare_monomial(self.n, i, m).scale(c));
        }
        Ok(out)
    }

    /// Restriction to the facet opposite vertex `j`.
    pub fn restrict_to_facet(&self, j: usize) -> Result<PolyForm> {
        self.pullback(&AffineSimplexMap::face(self.n, j)?)
    }
}

fn wedge_monomials(a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
    let (negative, ds) = wedge_masks(a.ds, b.ds)?;
    let exp = a.exp.iter().zip(&b.exp).map(|(x, y)| x + y).collect();
    Some((Monomial { exp, ds }, negative))
}

/// `∫_0^1 u^p (1−u)^q du = p! q! / (p+q+1)!`.
fn beta(p: u32, q: u32) -> Q {
    factorial(p as usize) * factorial(q as usize) / factorial((p + q + 1) as usize)
}

fn poincare_monomial(n: usize, i: usize, m: &Monomial) -> PolyForm {
    let dts = m.dt_indices();
    let k = dts.len();
    let mut out = PolyForm::zero(n);
    if k == 0 {
        return out;
    }
    let a_i = if i >= 1 { m.exp[i - 1] } else { 0 };
    let a_rest: u32 = m.poly_degree() - a_i;
    // Σ_m C(a_i, m) B(p, q) t^{a with a_i ↦ m}
    let mut poly = LinComb::new();
    for mm in 0..=a_i {
        let p = a_rest + mm + (k as u32 - 1);
        let q = a_i - mm;
        let mut exp = m.exp.clone();
        if i >= 1 {
            exp[i - 1] = mm;
        }
        poly.add_term(Monomial { exp, ds: 0 }, binomial(a_i as usize, mm as usize) * beta(p, q));
    }
    let poly = PolyForm { n, terms: poly };
    for (r, &jr) in dts.iter().enumerate() {
        let mut factor = PolyForm::t(n, jr).expect("index in range");
        if jr == i {
            factor = factor.sub(&PolyForm::one(n)).expect("same dimension");
        }
        let rest: Vec<usize> = dts.iter().copied().filter(|&j| j != jr).collect();
        let dmono = PolyForm { n, terms: LinComb::basis(Monomial::with_ds(vec![0; n], &rest)) };
        let mut term = poly.wedge(&factor).expect("same dimension").wedge(&dmono).expect("same dimension");
        if r % 2 == 1 {
            term = term.neg();
        }
        out.add_assign(&term);
    }
    out
}

/// An affine map `Δᵐ → Δⁿ`, recorded by expressing each target barycentric
/// coordinate `t_j` as a combination `Σ_k c_{jk} s_k` of source coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSimplexMap {
    source: usize,
    target: usize,
    rows: Vec<Vec<Q>>,
}

impl AffineSimplexMap {
    /// `rows[j][k]` is the coefficient of `s_k` in `t_j`; each column must sum to 1.
    pub fn new(source: usize, target: usize, rows: Vec<Vec<Q>>) -> Result<Self> {
        if rows.len() != target + 1 {
            return Err(Error::MalformedMap(format!("expected {} rows, got {}", target + 1, rows.len())));
        }
        for (j, row) in rows.iter().enumerate() {
            if row.len() != source + 1 {
                return Err(Error::MalformedMap(format!("row {j} has {} entries, expected {}", row.len(), source + 1)));
            }
        }
        for k in 0..=source {
            let total: Q = rows.iter().map(|r| r[k].clone()).sum();
            if !total.is_one() {
                return Err(Error::MalformedMap(format!("coordinates do not sum to 1 (column {k} sums to {total})")));
            }
        }
        Ok(AffineSimplexMap { source, target, rows })
    }

    /// The simplicial map sending source vertex `k` to target vertex `vertex_map[k]`.
    pub fn from_vertex_map(source: usize, target: usize, vertex_map: &[usize]) -> Result<Self> {
        if vertex_map.len() != source + 1 {
            return Err(Error::MalformedMap(format!("vertex map has {} entries, expected {}", vertex_map.len(), source + 1)));
        }
        let mut rows = vec![vec![Q::zero(); source + 1]; target + 1];
        for (k, &v) in vertex_map.iter().enumerate() {
            if v > target {
                return Err(Error::IndexOutOfRange { index: v, n: target });
            }
            rows[v][k] = Q::one();
        }
        Self::new(source, target, rows)
    }

    /// The face inclusion `δ_j: Δ^{n−1} → Δⁿ` missing vertex `j`.
    pub fn face(n: usize, j: usize) -> Result<Self> {
        if n == 0 || j > n {
            return Err(Error::IndexOutOfRange { index: j, n });
        }
        let vm: Vec<usize> = (0..=n).filter(|&v| v != j).collect();
        Self::from_vertex_map(n - 1, n, &vm)
    }

    /// Inclusion of the face spanned by the increasing vertex list `face`.
    pub fn face_inclusion(n: usize, face: &[usize]) -> Result<Self> {
        if face.is_empty() || face.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NonIncreasingFace(face.to_vec()));
        }
        Self::from_vertex_map(face.len() - 1, n, face)
    }

    /// The degeneracy `Δ^{n+1} → Δⁿ` hitting vertex `j` twice.
    pub fn degeneracy(n: usize, j: usize) -> Result<Self> {
        if j > n {
            return Err(Error::IndexOutOfRange { index: j, n });
        }
        let vm: Vec<usize> = (0..=n + 1).map(|k| if k <= j { k } else { k - 1 }).collect();
        Self::from_vertex_map(n + 1, n, &vm)
    }

    /// The vertex `e_i: Δ⁰ → Δⁿ`.
    pub fn vertex(n: usize, i: usize) -> Result<Self> {
        Self::from_vertex_map(0, n, &[i])
    }

    /// `σ_{i,J}: Δⁿ → Δⁿ`, sending the vertices in `collapse` to `e_i` and fixing the rest.
    pub fn collapse(n: usize, i: usize, collapse: &[usize]) -> Result<Self> {
        if i > n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        let vm: Vec<usize> = (0..=n).map(|v| if collapse.contains(&v) { i } else { v }).collect();
        Self::from_vertex_map(n, n, &vm)
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// `self ∘ first`, where `first: Δˡ → Δᵐ` and `self: Δᵐ → Δⁿ`.
    pub fn compose(&self, first: &AffineSimplexMap) -> Result<Self> {
        if first.target != self.source {
            return Err(Error::DimensionMismatch { expected: self.source, found: first.target });
        }
        let rows = (0..=self.target)
            .map(|j| {
                (0..=first.source)
                    .map(|k| (0..=self.source).map(|mid| &self.rows[j][mid] * &first.rows[mid][k]).sum())
                    .collect()
            })
            .collect();
        Self::new(first.source, self.target, rows)
    }

    /// The pulled-back coordinate `t_j` as a 0-form on the source.
    fn coordinate(&self, j: usize) -> PolyForm {
        let mut out = PolyForm::zero(self.source);
        for k in 0..=self.source {
            let c = &self.rows[j][k];
            if !c.is_zero() {
                out.add_scaled(&PolyForm::t(self.source, k).expect("index in range"), c);
            }
        }
        out
    }
}

/// Which subcomplex of `∂Δⁿ` a [`FormFamily`] lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Boundary,
    /// The horn `Λⁿ_i`: every facet except the one opposite vertex `i`.
    Horn(usize),
}

/// Forms on the facets of a boundary or horn, keyed by the omitted vertex.
///
/// The facet opposite `j` is identified with `Δ^{n−1}` through its vertices in
/// increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormFamily {
    n: usize,
    shape: Shape,
    faces: BTreeMap<usize, PolyForm>,
}

impl FormFamily {
    pub fn new(n: usize, shape: Shape, faces: BTreeMap<usize, PolyForm>) -> Result<Self> {
        if n == 0 && shape != Shape::Boundary {
            return Err(Error::IncompatibleFamily("Δ⁰ has no horns".into()));
        }
        let expected: Vec<usize> = match shape {
            Shape::Boundary => (0..=n).collect(),
            Shape::Horn(i) => {
                if i > n {
                    return Err(Error::IndexOutOfRange { index: i, n });
                }
                (0..=n).filter(|&j| j != i).collect()
            }
        };
        let present: Vec<usize> = faces.keys().copied().collect();
        if n > 0 && present != expected {
            return Err(Error::IncompatibleFamily(format!("expected facets {expected:?}, got {present:?}")));
        }
        if n == 0 && !faces.is_empty() {
            return Err(Error::IncompatibleFamily("∂Δ⁰ is empty".into()));
        }
        for (j, f) in &faces {
            if f.dim() + 1 != n {
                return Err(Error::IncompatibleFamily(format!("facet {j} has dimension {}, expected {}", f.dim(), n - 1)));
            }
        }
        let family = FormFamily { n, shape, faces };
        family.check_compatible()?;
        Ok(family)
    }

    /// Restricts a global form to the facets of the given shape.
    pub fn restrict(form: &PolyForm, shape: Shape) -> Result<Self> {
        let n = form.dim();
        let keep: Vec<usize> = match shape {
            Shape::Boundary => (0..=n).collect(),
            Shape::Horn(i) => (0..=n).filter(|&j| j != i).collect(),
        };
        let mut faces = BTreeMap::new();
        if n > 0 {
            for j in keep {
                faces.insert(j, form.restrict_to_facet(j)?);
            }
        }
        Self::new(n, shape, faces)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn faces(&self) -> &BTreeMap<usize, PolyForm> {
        &self.faces
    }

    fn check_compatible(&self) -> Result<()> {
        if self.n < 2 {
            return Ok(());
        }
        let keys: Vec<usize> = self.faces.keys().copied().collect();
        for (a, &j) in keys.iter().enumerate() {
            for &k in &keys[a + 1..] {
                // j < k: inside ∂_j vertex k has local index k−1; inside ∂_k vertex j keeps index j
                let from_j = self.faces[&j].restrict_to_facet(k - 1)?;
                let from_k = self.faces[&k].restrict_to_facet(j)?;
                if from_j != from_k {
                    return Err(Error::IncompatibleFamily(format!(
                        "facets {j} and {k} disagree on their common face: {from_j} vs {from_k}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The form on a proper face `face ⊂ {0..n}` (increasing), read off a facet containing it.
    fn face_form(&self, face: &[usize]) -> Result<PolyForm> {
        let j = (0..=self.n)
            .find(|j| !face.contains(j) && self.faces.contains_key(j))
            .ok_or_else(|| Error::IncompatibleFamily(format!("face {face:?} is not covered")))?;
        let local: Vec<usize> = face.iter().map(|&v| if v > j { v - 1 } else { v }).collect();
        self.faces[&j].pullback(&AffineSimplexMap::face_inclusion(self.n - 1, &local)?)
    }

    /// Fills the missing facet of a horn from its own boundary.
    fn complete_horn(&self) -> Result<FormFamily> {
        let Shape::Horn(i) = self.shape else {
            return Ok(self.clone());
        };
        let missing: Vec<usize> = (0..=self.n).filter(|&v| v != i).collect();
        let m = self.n - 1;
        let mut sub = BTreeMap::new();
        if m > 0 {
            for (local, _) in missing.iter().enumerate() {
                let face: Vec<usize> = missing.iter().enumerate().filter(|(l, _)| *l != local).map(|(_, &v)| v).collect();
                sub.insert(local, self.face_form(&face)?);
            }
        }
        let boundary = FormFamily::new(m, Shape::Boundary, sub)?;
        let mut faces = self.faces.clone();
        faces.insert(i, boundary.extend()?);
        FormFamily::new(self.n, Shape::Boundary, faces)
    }

    /// A form on `Δⁿ` restricting to this family; linear in the family.
    ///
    /// On `∂Δⁿ` this is `Σ_i t_i Σ_{∅≠J⊆[n]∖i} (−1)^{|J|−1} σ_{i,J}^* ω`. A horn is
    /// first completed to a boundary family by extending over its missing facet.
    pub fn extend(&self) -> Result<PolyForm> {
        if let Shape::Horn(_) = self.shape {
            return self.complete_horn()?.extend();
        }
        let n = self.n;
        let mut out = PolyForm::zero(n);
        for i in 0..=n {
            let others: Vec<usize> = (0..=n).filter(|&v| v != i).collect();
            let mut inner = PolyForm::zero(n);
            for size in 1..=others.len() {
                for collapse in crate::sign::combinations(&others, size) {
                    let face: Vec<usize> = (0..=n).filter(|v| !collapse.contains(v)).collect();
                    let on_face = self.face_form(&face)?;
                    let pos = |v: usize| face.iter().position(|&f| f == v).expect("vertex on face");
                    let vm: Vec<usize> = (0..=n).map(|v| if collapse.contains(&v) { pos(i) } else { pos(v) }).collect();
                    let pulled = on_face.pullback(&AffineSimplexMap::from_vertex_map(n, face.len() - 1, &vm)?)?;
                    if size % 2 == 1 {
                        inner.add_assign(&pulled);
                    } else {
                        inner.add_assign(&pulled.neg());
                    }
                }
            }
            out.add_assign(&PolyForm::t(n, i)?.wedge(&inner)?);
        }
        Ok(out)
    }
}

/// Extends a boundary or horn family over the whole simplex.
pub fn extend_section(family: &FormFamily) -> Result<PolyForm> {
    family.extend()
}

/// All monomials on `Δⁿ` of polynomial degree at most `max_poly_degree`, every form degree.
pub fn monomial_basis(n: usize, max_poly_degree: u32) -> Vec<Monomial> {
    let mut exps: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for e in &exps {
            let used: u32 = e.iter().sum();
            for a in 0..=(max_poly_degree - used) {
                let mut f = e.clone();
                f.push(a);
                next.push(f);
            }
        }
        exps = next;
    }
    let mut out = Vec::new();
    for e in exps {
        for ds in 0..(1u32 << n) {
            out.push(Monomial { exp: e.clone(), ds });
        }
    }
    out
}

impl From<(usize, Monomial)> for PolyForm {
    fn from((n, m): (usize, Monomial)) -> Self {
        PolyForm { n, terms: LinComb::basis(m) }
    }
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
    fn wedge_examples() {
        assert!(dt(1, 1).wedge(&dt(1, 1)).unwrap().is_zero());
        assert_eq!(t(1, 1).wedge(&dt(1, 1)).unwrap(), PolyForm::monomial(1, &[1], &[1], qi(1)).unwrap());
        // (t0 dt1) ∧ (t1 dt2) = t0 t1 dt1∧dt2 = (1 − t1 − t2) t1 dt1∧dt2
        let a = t(2, 0).wedge(&dt(2, 1)).unwrap();
        let b = t(2, 1).wedge(&dt(2, 2)).unwrap();
        let ab = a.wedge(&b).unwrap();
        let expected = PolyForm::monomial(2, &[1, 0], &[1, 2], qi(1))
            .unwrap()
            .add(&PolyForm::monomial(2, &[2, 0], &[1, 2], qi(-1)).unwrap())
            .unwrap()
            .add(&PolyForm::monomial(2, &[1, 1], &[1, 2], qi(-1)).unwrap())
            .unwrap();
        assert_eq!(ab, expected);
        assert_eq!(b.wedge(&a).unwrap(), ab.neg());
        assert!(PolyForm::zero(1).wedge(&PolyForm::zero(2)).is_err());
    }

    #[test]
    fn dt0_is_minus_sum() {
        let s = dt(2, 0).add(&dt(2, 1)).unwrap().add(&dt(2, 2)).unwrap();
        assert!(s.is_zero());
        let s = t(3, 0).add(&t(3, 1)).unwrap().add(&t(3, 2)).unwrap().add(&t(3, 3)).unwrap();
        assert_eq!(s, PolyForm::one(3));
    }

    #[test]
    fn differential_examples() {
        assert_eq!(t(1, 1).d(), dt(1, 1));
        // d(t1(1 − t1)) = (1 − 2 t1) dt1
        let f = t(1, 1).wedge(&t(1, 0)).unwrap();
        let expected = dt(1, 1).sub(&t(1, 1).wedge(&dt(1, 1)).unwrap().scale(&qi(2))).unwrap();
        assert_eq!(f.d(), expected);
        assert!(t(2, 1).wedge(&t(2, 2)).unwrap().d().d().is_zero());
    }

    #[test]
    fn pullback_examples() {
        // vertex 1 of Δ¹
        let v1 = AffineSimplexMap::vertex(1, 1).unwrap();
        assert_eq!(t(1, 1).pullback(&v1).unwrap(), PolyForm::one(0));
        let collapse = AffineSimplexMap::collapse(1, 0, &[1]).unwrap();
        assert!(t(1, 1).pullback(&collapse).unwrap().is_zero());
        // the vertex map (0,1,1): Δ² → Δ¹ sends t1 to t1 + t2
        let deg = AffineSimplexMap::from_vertex_map(2, 1, &[0, 1, 1]).unwrap();
        assert_eq!(deg, AffineSimplexMap::degeneracy(1, 1).unwrap());
        let img = dt(1, 1).pullback(&deg).unwrap();
        assert_eq!(img, dt(2, 1).add(&dt(2, 2)).unwrap());
        assert_eq!(t(1, 1).pullback(&deg).unwrap().d(), img);
        assert!(t(1, 1).pullback(&AffineSimplexMap::face(2, 0).unwrap()).is_err());
    }

    #[test]
    fn malformed_maps_are_rejected() {
        let bad = AffineSimplexMap::new(1, 1, vec![vec![qi(1), qi(0)], vec![qi(1), qi(1)]]);
        assert!(matches!(bad, Err(Error::MalformedMap(_))));
        let half = AffineSimplexMap::new(0, 1, vec![vec![q(1, 2)], vec![q(1, 2)]]).unwrap();
        assert_eq!(t(1, 1).pullback(&half).unwrap(), PolyForm::constant(0, q(1, 2)));
    }

    #[test]
    fn vertex_evaluation() {
        assert_eq!(t(1, 1).eval_vertex(1).unwrap(), qi(1));
        assert_eq!(dt(1, 1).eval_vertex(0).unwrap(), qi(0));
        let f = t(1, 0).wedge(&t(1, 1)).unwrap().add(&PolyForm::constant(1, qi(3))).unwrap();
        assert_eq!(f.eval_vertex(0).unwrap(), qi(3));
        assert!(f.eval_vertex(2).is_err());
    }

    #[test]
    fn poincare_examples() {
        assert!(t(2, 1).poincare_h(0).unwrap().is_zero());
        assert_eq!(dt(1, 1).poincare_h(0).unwrap(), t(1, 1));
        let f = t(1, 1).wedge(&dt(1, 1)).unwrap();
        assert_eq!(f.poincare_h(0).unwrap(), PolyForm::monomial(1, &[2], &[], q(1, 2)).unwrap());
        assert!(f.poincare_h(2).is_err());
    }

    #[test]
    fn homotopy_identity_exhaustive() {
        for n in 0..=3usize {
            for m in monomial_basis(n, if n == 3 { 3 } else { 4 }) {
                let a = PolyForm::from((n, m));
                for i in 0..=n {
                    let lhs = a.poincare_h(i).unwrap().d().add(&a.d().poincare_h(i).unwrap()).unwrap();
                    let rhs = a.sub(&a.eval_vertex_form(i).unwrap()).unwrap();
                    assert_eq!(lhs, rhs, "n={n} i={i} a={a}");
                    assert!(a.poincare_h(i).unwrap().poincare_h(i).unwrap().is_zero(), "h² ≠ 0 on {a}");
                }
            }
        }
    }

    #[test]
    fn boundary_extension_examples() {
        // constant family
        let fam = FormFamily::restrict(&PolyForm::constant(2, qi(5)), Shape::Boundary).unwrap();
        assert_eq!(fam.extend().unwrap(), PolyForm::constant(2, qi(5)));
        // ∂Δ¹ data a at vertex 0, b at vertex 1 ↦ a(1 − t1) + b t1
        let mut faces = BTreeMap::new();
        faces.insert(0, PolyForm::constant(0, qi(7))); // facet opposite 0 is vertex 1
        faces.insert(1, PolyForm::constant(0, qi(2))); // vertex 0
        let fam = FormFamily::new(1, Shape::Boundary, faces).unwrap();
        let expected = PolyForm::constant(1, qi(2)).add(&t(1, 1).scale(&qi(5))).unwrap();
        assert_eq!(fam.extend().unwrap(), expected);
    }

    #[test]
    fn extension_restricts_back() {
        let omega = t(2, 1)
            .wedge(&t(2, 2))
            .unwrap()
            .add(&t(2, 1).wedge(&dt(2, 2)).unwrap())
            .unwrap()
            .add(&PolyForm::monomial(2, &[0, 0], &[1, 2], qi(3)).unwrap())
            .unwrap();
        for shape in [Shape::Boundary, Shape::Horn(1), Shape::Horn(0), Shape::Horn(2)] {
            let fam = FormFamily::restrict(&omega, shape).unwrap();
            let ext = fam.extend().unwrap();
            assert_eq!(FormFamily::restrict(&ext, shape).unwrap(), fam, "{shape:?}");
        }
    }

    #[test]
    fn incompatible_family_is_rejected() {
        let mut faces = BTreeMap::new();
        faces.insert(0, t(1, 1));
        faces.insert(1, t(1, 1));
        faces.insert(2, PolyForm::zero(1));
        // facets 0 and 1 share vertex 2; ∂_0 has it at local 1 (value 1), ∂_1 at local 1 (value 1) – fine;
        // facets 1 and 2 share vertex 0: ∂_1 local 0 value 0, ∂_2 local 0 value 0 – fine;
        // facets 0 and 2 share vertex 1: ∂_0 local 0 value 0, ∂_2 local 1 value 0 – fine.
        assert!(FormFamily::new(2, Shape::Boundary, faces.clone()).is_ok());
        faces.insert(2, PolyForm::one(1));
        assert!(matches!(FormFamily::new(2, Shape::Boundary, faces), Err(Error::IncompatibleFamily(_))));
    }
}
