//! Contractions, homological perturbation, the tensor trick and homotopy transfer.

use std::collections::BTreeMap;
use std::sync::Mutex;

use crate::coalg::{self, Brackets, Cutoff, GradedBasis, Word, Words};
use crate::dupont::{whitney_form, Dupont};
use crate::error::{Error, Result};
use crate::forms::PolyForm;
use crate::linalg::{self, Echelon};
use crate::linf::{self, AlgElement, BasisVector, CurvedLinf, LinfMorphism};
use crate::lincomb::LinComb;
use crate::rational::{binomial, qi, sign_q, Q};
use crate::tensor::{TensorAlgebra, TensorKey, WhitneyKey, WhitneyTensor};

pub type BigKey<C> = <<C as Contraction>::Big as GradedBasis>::Key;
pub type SmallKey<C> = <<C as Contraction>::Small as GradedBasis>::Key;

/// `(V, D) ⇄ (W, d)` with `ip + Dh + hD = 1_V`, `pi = 1_W` and `h² = ph = hi = 0`.
pub trait Contraction {
    type Big: GradedBasis;
    type Small: GradedBasis;
    fn big(&self) -> &Self::Big;
    fn small(&self) -> &Self::Small;
    fn big_d(&self, k: &BigKey<Self>) -> LinComb<BigKey<Self>>;
    fn small_d(&self, k: &SmallKey<Self>) -> LinComb<SmallKey<Self>>;
    fn p(&self, k: &BigKey<Self>) -> LinComb<SmallKey<Self>>;
    fn i(&self, k: &SmallKey<Self>) -> LinComb<BigKey<Self>>;
    fn h(&self, k: &BigKey<Self>) -> LinComb<BigKey<Self>>;

    fn ip(&self, k: &BigKey<Self>) -> LinComb<BigKey<Self>> {
        self.p(k).map_linear(|w| self.i(w))
    }
}

/// A finite graded, weighted basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisSpace {
    pub basis: Vec<BasisVector>,
}

impl BasisSpace {
    pub fn new(basis: Vec<BasisVector>) -> Self {
        BasisSpace { basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

impl GradedBasis for BasisSpace {
    type Key = usize;
    fn degree(&self, k: &usize) -> i32 {
        self.basis[*k].deg
    }
    fn weight(&self, k: &usize) -> u32 {
        self.basis[*k].weight
    }
}

pub type Matrix = Vec<LinComb<usize>>;

fn apply(m: &Matrix, x: &LinComb<usize>) -> LinComb<usize> {
    x.map_linear(|k| m[*k].clone())
}

fn compose(a: &Matrix, b: &Matrix) -> Matrix {
    b.iter().map(|col| apply(a, col)).collect()
}

/// A contraction of finite-dimensional filtered complexes, stored column by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixContraction {
    big: BasisSpace,
    small: BasisSpace,
    big_d: Matrix,
    small_d: Matrix,
    p: Matrix,
    i: Matrix,
    h: Matrix,
}

impl MatrixContraction {
    /// Checks the contraction identities; a homotopy violating the side
    /// conditions is replaced by `h' = (1 − ip) h (1 − ip)`, then `h'' = h' D h'`.
    pub fn new(big: BasisSpace, small: BasisSpace, big_d: Matrix, small_d: Matrix, p: Matrix, i: Matrix, h: Matrix) -> Result<Self> {
        let mut c = MatrixContraction { big, small, big_d, small_d, p, i, h };
        c.check_shapes()?;
        c.check_identities()?;
        if !c.side_conditions_hold() {
            let n = c.big.dim();
            let one_minus_ip: Matrix = (0..n).map(|k| &LinComb::basis(k) - &apply(&c.i, &c.p[k])).collect();
            let h1 = compose(&one_minus_ip, &compose(&c.h, &one_minus_ip));
            let h2 = compose(&h1, &compose(&c.big_d, &h1));
            c.h = h2;
            c.check_identities()?;
            if !c.side_conditions_hold() {
                return Err(Error::SideCondition { axiom: "h² = ph = hi = 0".into(), detail: "normalization did not converge".into() });
            }
        }
        Ok(c)
    }

    /// The contraction of `(V, D)` onto its cohomology, built block by block in
    /// each weight: `V = C ⊕ B ⊕ H` with `B = im D`, `ker D = B ⊕ H`, `h = D⁻¹` on `B`.
    pub fn from_complex(basis: Vec<BasisVector>, big_d: Matrix) -> Result<Self> {
        let space = BasisSpace::new(basis);
        let n = space.dim();
        if big_d.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: big_d.len() });
        }
        for (k, col) in big_d.iter().enumerate() {
            for j in col.keys() {
                if space.weight(j) != space.weight(&k) {
                    return Err(Error::Invalid(format!("differential does not preserve the weight of {}", space.basis[k].name)));
                }
            }
        }
        let mut p: Matrix = vec![LinComb::new(); n];
        let mut h: Matrix = vec![LinComb::new(); n];
        let mut i: Matrix = Vec::new();
        let mut small_basis: Vec<BasisVector> = Vec::new();
        let mut weights: Vec<u32> = space.basis.iter().map(|b| b.weight).collect();
        weights.sort();
        weights.dedup();
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
        enum Role {
            C(usize),
            B(usize),
            H(usize),
        }
        for w in weights {
            let block: Vec<usize> = (0..n).filter(|&k| space.basis[k].weight == w).collect();
            let mut image = Echelon::new();
            let mut roles: Vec<Role> = Vec::new();
            let mut cols: Vec<LinComb<usize>> = Vec::new();
            let mut preimage: Vec<usize> = Vec::new();
            for &k in &block {
                if image.insert(&big_d[k]) {
                    roles.push(Role::C(k));
                    cols.push(LinComb::basis(k));
                    roles.push(Role::B(preimage.len()));
                    cols.push(big_d[k].clone());
                    preimage.push(k);
                }
            }
            let mut degrees: Vec<i32> = block.iter().map(|k| space.basis[*k].deg).collect();
            degrees.sort();
            degrees.dedup();
            let mut span = image;
            for d in degrees {
                let dom: Vec<usize> = block.iter().copied().filter(|k| space.basis[*k].deg == d).collect();
                let images: Vec<LinComb<usize>> = dom.iter().map(|k| big_d[*k].clone()).collect();
                for v in linalg::kernel(&dom, &images) {
                    if span.insert(&v) {
                        let j = small_basis.len();
                        let name = match v.iter().next() {
                            Some((k, c)) if v.len() == 1 && c == &qi(1) => space.basis[*k].name.clone(),
                            _ => format!("h{j}"),
                        };
                        small_basis.push(BasisVector::new(name, d, w));
                        roles.push(Role::H(j));
                        cols.push(v.clone());
                        i.push(v);
                    }
                }
            }
            for &k in &block {
                let coords = linalg::solve(&roles, &cols, &LinComb::basis(k))
                    .ok_or_else(|| Error::Invalid("splitting does not span".into()))?;
                for (role, c) in coords.iter() {
                    match role {
                        Role::H(j) => p[k].add_term(*j, c.clone()),
                        Role::B(j) => h[k].add_term(preimage[*j], c.clone()),
                        Role::C(_) => {}
                    }
                }
            }
        }
        let names_unique = {
            let mut names: Vec<&str> = small_basis.iter().map(|b| b.name.as_str()).collect();
            names.sort();
            names.dedup();
            names.len() == small_basis.len()
        };
        if !names_unique {
            for (j, b) in small_basis.iter_mut().enumerate() {
                b.name = format!("h{j}");
            }
        }
        let m = small_basis.len();
        MatrixContraction::new(space, BasisSpace::new(small_basis), big_d, vec![LinComb::new(); m], p, i, h)
    }

    /// The contraction of an algebra onto the cohomology of `δ₀`.
    pub fn for_algebra(l: &CurvedLinf) -> Result<Self> {
        let d: Matrix = (0..l.dim()).map(|k| l.linear_part(k)).collect();
        MatrixContraction::from_complex(l.basis().to_vec(), d)
    }

    pub fn big_space(&self) -> &BasisSpace {
        &self.big
    }

    pub fn small_space(&self) -> &BasisSpace {
        &self.small
    }

    pub fn matrices(&self) -> (&Matrix, &Matrix, &Matrix, &Matrix, &Matrix) {
        (&self.big_d, &self.small_d, &self.p, &self.i, &self.h)
    }

    pub fn is_contractible(&self) -> bool {
        self.small.dim() == 0
    }

    fn check_shapes(&self) -> Result<()> {
        let (n, m) = (self.big.dim(), self.small.dim());
        for (name, mat, rows, cols, shift) in [
            ("D", &self.big_d, n, n, 1),
            ("d", &self.small_d, m, m, 1),
            ("p", &self.p, m, n, 0),
            ("i", &self.i, n, m, 0),
            ("h", &self.h, n, n, -1),
        ] {
            if mat.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: mat.len() });
            }
            let (src, dst): (&BasisSpace, &BasisSpace) = match name {
                "D" | "h" => (&self.big, &self.big),
                "d" => (&self.small, &self.small),
                "p" => (&self.big, &self.small),
                _ => (&self.small, &self.big),
            };
            for (k, col) in mat.iter().enumerate() {
                for j in col.keys() {
                    if *j >= rows {
                        return Err(Error::IndexOutOfRange { index: *j, n: rows });
                    }
                    if dst.degree(j) != src.degree(&k) + shift {
                        return Err(Error::Invalid(format!("{name} does not have degree {shift}")));
                    }
                    if dst.weight(j) < src.weight(&k) {
                        return Err(Error::Invalid(format!("{name} lowers the filtration weight")));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_identities(&self) -> Result<()> {
        for k in 0..self.big.dim() {
            let x = LinComb::basis(k);
            let lhs = &(&apply(&self.i, &self.p[k]) + &apply(&self.big_d, &self.h[k])) + &apply(&self.h, &self.big_d[k]);
            if lhs != x {
                return Err(Error::SideCondition { axiom: "ip + Dh + hD = 1".into(), detail: format!("fails on {}", self.big.basis[k].name) });
            }
            if apply(&self.p, &self.big_d[k]) != apply(&self.small_d, &self.p[k]) {
                return Err(Error::SideCondition { axiom: "pD = dp".into(), detail: format!("fails on {}", self.big.basis[k].name) });
            }
            if !apply(&self.big_d, &self.big_d[k]).is_zero() {
                return Err(Error::SideCondition { axiom: "D² = 0".into(), detail: format!("fails on {}", self.big.basis[k].name) });
            }
        }
        for j in 0..self.small.dim() {
            if apply(&self.p, &self.i[j]) != LinComb::basis(j) {
                return Err(Error::SideCondition { axiom: "pi = 1".into(), detail: format!("fails on {}", self.small.basis[j].name) });
            }
            if apply(&self.big_d, &self.i[j]) != apply(&self.i, &self.small_d[j]) {
                return Err(Error::SideCondition { axiom: "Di = id".into(), detail: format!("fails on {}", self.small.basis[j].name) });
            }
        }
        Ok(())
    }

    fn side_conditions_hold(&self) -> bool {
        (0..self.big.dim()).all(|k| apply(&self.h, &self.h[k]).is_zero() && apply(&self.p, &self.h[k]).is_zero())
            && (0..self.small.dim()).all(|j| apply(&self.h, &self.i[j]).is_zero())
    }
}

impl Contraction for MatrixContraction {
    type Big = BasisSpace;
    type Small = BasisSpace;
    fn big(&self) -> &BasisSpace {
        &self.big
    }
    fn small(&self) -> &BasisSpace {
        &self.small
    }
    fn big_d(&self, k: &usize) -> LinComb<usize> {
        self.big_d[*k].clone()
    }
    fn small_d(&self, k: &usize) -> LinComb<usize> {
        self.small_d[*k].clone()
    }
    fn p(&self, k: &usize) -> LinComb<usize> {
        self.p[*k].clone()
    }
    fn i(&self, k: &usize) -> LinComb<usize> {
        self.i[*k].clone()
    }
    fn h(&self, k: &usize) -> LinComb<usize> {
        self.h[*k].clone()
    }
}

/// The Dupont contraction tensored with `L`: `Ω_n ⊗ L ⇄ W_n ⊗ L` via `p ⊗ 1`, `i ⊗ 1`, `s ⊗ 1`.
#[derive(Debug)]
pub struct DupontTensor {
    dupont: Dupont,
    big: TensorAlgebra,
    small: WhitneyTensor,
}

impl DupontTensor {
    pub fn new(n: usize, l: &CurvedLinf) -> Self {
        DupontTensor { dupont: Dupont::new(n), big: TensorAlgebra::new(n, l), small: WhitneyTensor::new(n, l) }
    }

    pub fn dupont(&self) -> &Dupont {
        &self.dupont
    }

    pub fn algebra(&self) -> &TensorAlgebra {
        &self.big
    }

    pub fn whitney(&self) -> &WhitneyTensor {
        &self.small
    }
}

impl Contraction for DupontTensor {
    type Big = TensorAlgebra;
    type Small = WhitneyTensor;
    fn big(&self) -> &TensorAlgebra {
        &self.big
    }
    fn small(&self) -> &WhitneyTensor {
        &self.small
    }
    fn big_d(&self, k: &TensorKey) -> LinComb<TensorKey> {
        self.big.linear_d(k)
    }
    fn small_d(&self, k: &WhitneyKey) -> LinComb<WhitneyKey> {
        self.small.linear_d(k)
    }
    fn p(&self, k: &TensorKey) -> LinComb<WhitneyKey> {
        let a = PolyForm::from((self.dupont.dim(), k.0.clone()));
        let w = self.dupont.project(&a).expect("same simplex");
        w.coeffs().map_keys(|f| (f.clone(), k.1))
    }
    fn i(&self, k: &WhitneyKey) -> LinComb<TensorKey> {
        let form = whitney_form(&k.0, self.dupont.dim()).expect("face of the simplex");
        form.terms().map_keys(|m| (m.clone(), k.1))
    }
    fn h(&self, k: &TensorKey) -> LinComb<TensorKey> {
        let a = PolyForm::from((self.dupont.dim(), k.0.clone()));
        let s = self.dupont.s(&a).expect("same simplex");
        s.terms().map_keys(|m| (m.clone(), k.1))
    }
}

/// `𝐩 = ⊕ p^{⊗n}` on one word.
pub fn lift_p<C: Contraction + ?Sized>(c: &C, w: &[BigKey<C>], cut: Cutoff) -> Result<Words<SmallKey<C>>> {
    let mut out: Words<SmallKey<C>> = LinComb::basis(Vec::new());
    for letter in w {
        out = coalg::product(c.small(), &out, &coalg::embed(&c.p(letter)), cut)?;
        if out.is_zero() {
            break;
        }
    }
    Ok(out)
}

/// `𝐢 = ⊕ i^{⊗n}` on one word.
pub fn lift_i<C: Contraction + ?Sized>(c: &C, w: &[SmallKey<C>], cut: Cutoff) -> Result<Words<BigKey<C>>> {
    let mut out: Words<BigKey<C>> = LinComb::basis(Vec::new());
    for letter in w {
        out = coalg::product(c.big(), &out, &coalg::embed(&c.i(letter)), cut)?;
        if out.is_zero() {
            break;
        }
    }
    Ok(out)
}

/// The symmetrized homotopy
/// `𝐡 = (1/n) Σ_k Σ_{S ⊆ [n]∖k} binom(n−1, |S|)⁻¹ (ip on S) ⊗ h at k ⊗ (1 elsewhere)` on one word.
pub fn lift_h<C: Contraction + ?Sized>(c: &C, w: &[BigKey<C>], cut: Cutoff) -> Result<Words<BigKey<C>>> {
    let n = w.len();
    let mut out = LinComb::new();
    if n == 0 {
        return Ok(out);
    }
    let big = c.big();
    let hs: Vec<LinComb<BigKey<C>>> = w.iter().map(|x| c.h(x)).collect();
    let ips: Vec<LinComb<BigKey<C>>> = w.iter().map(|x| c.ip(x)).collect();
    let ids: Vec<LinComb<BigKey<C>>> = w.iter().map(|x| LinComb::basis(x.clone())).collect();
    let inv_n = Q::new(1.into(), (n as i64).into());
    for k in 0..n {
        if hs[k].is_zero() {
            continue;
        }
        let parity: i32 = w[..k].iter().map(|x| big.degree(x)).sum();
        let sign = sign_q(parity.rem_euclid(2) == 1);
        let others: Vec<usize> = (0..n).filter(|&j| j != k).collect();
        for mask in 0u32..(1 << others.len()) {
            let size = mask.count_ones() as usize;
            let coef = &inv_n * &sign / binomial(n - 1, size);
            let mut word: Words<BigKey<C>> = LinComb::single(Vec::new(), coef);
            for j in 0..n {
                let factor = if j == k {
                    &hs[j]
                } else {
                    let pos = others.iter().position(|&o| o == j).expect("other slot");
                    if mask & (1 << pos) != 0 {
                        &ips[j]
                    } else {
                        &ids[j]
                    }
                };
                word = coalg::product(big, &word, &coalg::embed(factor), cut)?;
                if word.is_zero() {
                    break;
                }
            }
            out += &word;
        }
    }
    Ok(out)
}

fn extend<K: Ord + Clone, T: Ord + Clone>(x: &Words<K>, mut f: impl FnMut(&Word<K>) -> Result<Words<T>>) -> Result<Words<T>> {
    let mut out = LinComb::new();
    for (w, c) in x.iter() {
        out.add_scaled(&f(w)?, c);
    }
    Ok(out)
}

/// Perturbation of the lifted contraction `C(V) ⇄ C(W)` by `μ = δ − D`.
pub struct Perturbed<'a, C: Contraction, L: Brackets<Key = BigKey<C>>> {
    c: &'a C,
    l: &'a L,
    cut: Cutoff,
    max_steps: usize,
    d_mu_cache: Mutex<BTreeMap<Word<SmallKey<C>>, Words<SmallKey<C>>>>,
}

impl<'a, C: Contraction, L: Brackets<Key = BigKey<C>>> Perturbed<'a, C, L> {
    pub fn new(c: &'a C, l: &'a L, cut: Cutoff) -> Self {
        // 2·weight − length strictly increases under μ𝐡, and is bounded by 2W
        let max_steps = 2 * cut.weight as usize + 2;
        Perturbed { c, l, cut, max_steps, d_mu_cache: Mutex::new(BTreeMap::new()) }
    }

    pub fn contraction(&self) -> &C {
        self.c
    }

    pub fn cut(&self) -> Cutoff {
        self.cut
    }

    /// `μ = δ − D̂` on a word of the big side.
    pub fn mu(&self, w: &[BigKey<C>]) -> Result<Words<BigKey<C>>> {
        let delta = coalg::codifferential(self.l, w, self.cut)?;
        let d = coalg::coderivation(self.c.big(), w, 1, self.cut, |args| {
            if args.len() == 1 {
                self.c.big_d(&args[0])
            } else {
                LinComb::new()
            }
        })?;
        Ok(&delta - &d)
    }

    pub fn mu_sum(&self, x: &Words<BigKey<C>>) -> Result<Words<BigKey<C>>> {
        extend(x, |w| self.mu(w))
    }

    pub fn h_sum(&self, x: &Words<BigKey<C>>) -> Result<Words<BigKey<C>>> {
        extend(x, |w| lift_h(self.c, w, self.cut))
    }

    pub fn p_sum(&self, x: &Words<BigKey<C>>) -> Result<Words<SmallKey<C>>> {
        extend(x, |w| lift_p(self.c, w, self.cut))
    }

    pub fn i_sum(&self, x: &Words<SmallKey<C>>) -> Result<Words<BigKey<C>>> {
        extend(x, |w| lift_i(self.c, w, self.cut))
    }

    // Σ_j (−T)^j x for a nilpotent T
    fn geometric(&self, x: &Words<BigKey<C>>, mut t: impl FnMut(&Words<BigKey<C>>) -> Result<Words<BigKey<C>>>) -> Result<Words<BigKey<C>>> {
        let mut out = x.clone();
        let mut term = x.clone();
        for _ in 0..self.max_steps {
            term = -&t(&term)?;
            if term.is_zero() {
                return Ok(out);
            }
            out += &term;
        }
        Err(Error::NotFiltrationRaising(format!("perturbation series did not terminate in {} steps", self.max_steps)))
    }

    /// `(1 + μ𝐡)⁻¹ x`.
    pub fn resolvent_mu_h(&self, x: &Words<BigKey<C>>) -> Result<Words<BigKey<C>>> {
        self.geometric(x, |y| self.mu_sum(&self.h_sum(y)?))
    }

    /// `(1 + 𝐡μ)⁻¹ x`.
    pub fn resolvent_h_mu(&self, x: &Words<BigKey<C>>) -> Result<Words<BigKey<C>>> {
        self.geometric(x, |y| self.h_sum(&self.mu_sum(y)?))
    }

    /// `𝐩_μ = 𝐩 (1 + μ𝐡)⁻¹`.
    pub fn p_mu(&self, x: &Words<BigKey<C>>) -> Result<Words<SmallKey<C>>> {
        self.p_sum(&self.resolvent_mu_h(x)?)
    }

    /// `𝐢_μ = (1 + 𝐡μ)⁻¹ 𝐢`.
    pub fn i_mu(&self, x: &Words<SmallKey<C>>) -> Result<Words<BigKey<C>>> {
        self.resolvent_h_mu(&self.i_sum(x)?)
    }

    /// `𝐡_μ = (1 + 𝐡μ)⁻¹ 𝐡`.
    pub fn h_mu(&self, x: &Words<BigKey<C>>) -> Result<Words<BigKey<C>>> {
        self.resolvent_h_mu(&self.h_sum(x)?)
    }

    /// `d_μ = 𝐝 + 𝐩_μ μ 𝐢` on one word of the small side.
    pub fn d_mu_word(&self, w: &[SmallKey<C>]) -> Result<Words<SmallKey<C>>> {
        if let Some(hit) = self.d_mu_cache.lock().expect("cache lock").get(w) {
            return Ok(hit.clone());
        }
        let d = coalg::coderivation(self.c.small(), w, 1, self.cut, |args| {
            if args.len() == 1 {
                self.c.small_d(&args[0])
            } else {
                LinComb::new()
            }
        })?;
        let iw = lift_i(self.c, w, self.cut)?;
        let rest = self.p_mu(&self.mu_sum(&iw)?)?;
        let out = &d + &rest;
        self.d_mu_cache.lock().expect("cache lock").insert(w.to_vec(), out.clone());
        Ok(out)
    }

    pub fn d_mu(&self, x: &Words<SmallKey<C>>) -> Result<Words<SmallKey<C>>> {
        extend(x, |w| self.d_mu_word(w))
    }

    /// `MC(p_μ) x = π₁ 𝐩_μ exp(x)`; requires `x` to be Maurer–Cartan.
    pub fn pushforward_mc(&self, x: &LinComb<BigKey<C>>) -> Result<LinComb<SmallKey<C>>> {
        let r = linf::residual(self.l, x, self.cut)?;
        if !r.is_zero() {
            return Err(Error::NonzeroResidual(format!("{} terms", r.len())));
        }
        let e = coalg::exp_element(self.c.big(), x, self.cut)?;
        Ok(coalg::pi1(&self.p_mu(&e)?))
    }

    /// `MC(i_μ) y = π₁ 𝐢_μ exp(y)`.
    pub fn pullback_mc(&self, y: &LinComb<SmallKey<C>>) -> Result<LinComb<BigKey<C>>> {
        let e = coalg::exp_element(self.c.small(), y, self.cut)?;
        Ok(coalg::pi1(&self.i_mu(&e)?))
    }

    /// The transferred structure as a bracket oracle on the small side.
    pub fn transferred(&self) -> Transferred<'_, 'a, C, L> {
        Transferred { pert: self }
    }
}

/// The transferred curved L∞ structure, `{w_1, …, w_k}̆ = π₁ d_μ(w_1 ⋯ w_k)`.
pub struct Transferred<'p, 'a, C: Contraction, L: Brackets<Key = BigKey<C>>> {
    pert: &'p Perturbed<'a, C, L>,
}

impl<C: Contraction, L: Brackets<Key = BigKey<C>>> GradedBasis for Transferred<'_, '_, C, L> {
    type Key = SmallKey<C>;
    fn degree(&self, k: &Self::Key) -> i32 {
        self.pert.c.small().degree(k)
    }
    fn weight(&self, k: &Self::Key) -> u32 {
        self.pert.c.small().weight(k)
    }
}

impl<C: Contraction, L: Brackets<Key = BigKey<C>>> Brackets for Transferred<'_, '_, C, L> {
    fn bracket(&self, args: &[Self::Key]) -> LinComb<Self::Key> {
        let mut word = LinComb::new();
        coalg::push_word(self.pert.c.small(), &mut word, args.to_vec(), qi(1), self.pert.cut).expect("within cutoff");
        let mut out = LinComb::new();
        for (w, c) in word.iter() {
            let dw = self.pert.d_mu_word(w).expect("within cutoff");
            out.add_scaled(&coalg::pi1(&dw), c);
        }
        out
    }

    fn max_arity(&self) -> usize {
        self.pert.cut.length
    }
}

/// The transferred algebra with its comparison morphisms.
#[derive(Clone, Debug)]
pub struct Transfer {
    pub algebra: CurvedLinf,
    pub p_mu: LinfMorphism,
    pub i_mu: LinfMorphism,
}

/// Transfers the structure of `l` along a contraction of its underlying space.
pub fn transfer_structure(l: &CurvedLinf, c: &MatrixContraction, arity_cap: usize) -> Result<Transfer> {
    if c.big.basis != l.basis() {
        return Err(Error::Invalid("contraction is not on the basis of the algebra".into()));
    }
    for k in 0..l.dim() {
        let diff = &l.linear_part(k) - &c.big_d[k];
        if !diff.is_zero() {
            return Err(Error::NotFiltrationRaising(format!("{{x}} − Dx keeps the weight of {}", l.name(k))));
        }
    }
    let cut = l.cut();
    let pert = Perturbed::new(c, l, cut);
    let small = c.small_space();
    let mut algebra = CurvedLinf::new(small.basis.clone(), l.cutoff(), arity_cap)?;
    let letters: Vec<usize> = (0..small.dim()).collect();
    for w in coalg::words_up_to(small, &letters, l.cutoff()) {
        let value = coalg::pi1(&pert.d_mu_word(&w)?);
        if value.is_zero() {
            continue;
        }
        if w.len() > arity_cap {
            return Err(Error::CutoffOverflow(format!("transferred bracket of arity {} above the arity cap {arity_cap}", w.len())));
        }
        algebra.set_bracket(&w, value)?;
    }
    let cap = l.cutoff() as usize;
    let mut p_mu = LinfMorphism::new(l.clone(), algebra.clone(), cap);
    for w in l.words() {
        let value = coalg::pi1(&pert.p_mu(&LinComb::basis(w.clone()))?);
        p_mu.set_component(&w, value)?;
    }
    let mut i_mu = LinfMorphism::new(algebra.clone(), l.clone(), cap);
    for w in algebra.words() {
        let value = coalg::pi1(&pert.i_mu(&LinComb::basis(w.clone()))?);
        i_mu.set_component(&w, value)?;
    }
    Ok(Transfer { algebra, p_mu, i_mu })
}

/// Solves the gauge-fixed curved Maurer–Cartan equation in a contractible
/// algebra by iterating `Φ(x) = x − h Σ (1/n!) {xⁿ}` exactly `W` times from `seed`.
pub fn kuranishi_solve(l: &CurvedLinf, c: &MatrixContraction, seed: &AlgElement) -> Result<AlgElement> {
    if !c.is_contractible() {
        return Err(Error::NotContractible(format!("cohomology of dimension {}", c.small_space().dim())));
    }
    let h = |x: &AlgElement| apply(&c.h, x);
    if !h(seed).is_zero() {
        return Err(Error::Invalid("seed is not in the kernel of h".into()));
    }
    let mut x = seed.clone();
    for _ in 0..l.cutoff() {
        let r = l.curvature_residual(&x)?;
        x = &x - &h(&r);
    }
    let r = l.curvature_residual(&x)?;
    if !r.is_zero() {
        return Err(Error::NonzeroResidual(l.format(&r)));
    }
    Ok(x)
}

/// Projects an element onto `ker h` by `x ↦ x − D h x`.
pub fn gauge_seed(c: &MatrixContraction, x: &AlgElement) -> AlgElement {
    x - &apply(&c.big_d, &apply(&c.h, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn two_term() -> (Vec<BasisVector>, Matrix) {
        (vec![BasisVector::new("a", 0, 1), BasisVector::new("b", 1, 1)], vec![LinComb::basis(1), LinComb::new()])
    }

    #[test]
    fn acyclic_pair() {
        let (basis, d) = two_term();
        let c = MatrixContraction::from_complex(basis, d).unwrap();
        assert!(c.is_contractible());
        assert_eq!(c.h(&1), LinComb::basis(0));
        assert!(c.h(&0).is_zero());
    }

    #[test]
    fn user_homotopy_is_normalized() {
        let basis = vec![
            BasisVector::new("z0", -1, 1),
            BasisVector::new("z1", 0, 1),
            BasisVector::new("a", 0, 1),
            BasisVector::new("b", 1, 1),
        ];
        let big = BasisSpace::new(basis);
        let small = BasisSpace::new(vec![BasisVector::new("z0", -1, 1), BasisVector::new("z1", 0, 1)]);
        let d = vec![LinComb::new(), LinComb::new(), LinComb::basis(3), LinComb::new()];
        let p = vec![LinComb::basis(0), LinComb::basis(1), LinComb::new(), LinComb::new()];
        let i = vec![LinComb::basis(0), LinComb::basis(1)];
        // h z1 = z0 keeps ip + Dh + hD = 1 but breaks ph = 0
        let h = vec![LinComb::new(), LinComb::basis(0), LinComb::new(), LinComb::basis(2)];
        let small_d = vec![LinComb::new(), LinComb::new()];
        let c = MatrixContraction::new(big.clone(), small.clone(), d.clone(), small_d.clone(), p.clone(), i.clone(), h).unwrap();
        assert!(c.h(&1).is_zero());
        assert_eq!(c.h(&3), LinComb::basis(2));
        let bad = MatrixContraction::new(big, small, d, small_d, p, i, vec![LinComb::new(); 4]);
        assert!(matches!(bad, Err(Error::SideCondition { .. })));
    }

    #[test]
    fn homotopy_lift_small_lengths() {
        let (basis, d) = two_term();
        let c = MatrixContraction::from_complex(basis, d).unwrap();
        let cut = Cutoff::new(4);
        assert_eq!(lift_h(&c, &[1], cut).unwrap(), LinComb::basis(vec![0]));
        // ip = 0, so the length-2 lift is ½(h ⊗ 1 + 1 ⊗ h) on b·b = 0 (b is odd) and on a·b
        let got = lift_h(&c, &[0, 1], cut).unwrap();
        // ½ (1 ⊗ h)(a b) = ½ (−1)^{|a|} a·a
        assert_eq!(got, LinComb::single(vec![0, 0], q(1, 2)));
    }

    #[test]
    fn curved_pair_kuranishi() {
        let mut l = CurvedLinf::new(vec![BasisVector::new("b", 0, 1), BasisVector::new("c", 1, 1)], 3, 3).unwrap();
        l.set_bracket(&[], LinComb::basis(1)).unwrap();
        l.set_bracket(&[0], LinComb::basis(1)).unwrap();
        let c = MatrixContraction::for_algebra(&l).unwrap();
        let x = kuranishi_solve(&l, &c, &LinComb::new()).unwrap();
        assert_eq!(x, LinComb::single(0, qi(-1)));
        let t = transfer_structure(&l, &c, 3).unwrap();
        assert_eq!(t.algebra.dim(), 0);
        assert!(t.algebra.brackets().is_empty());
    }

    #[test]
    fn abelian_transfer_is_abelian() {
        let l = CurvedLinf::new(vec![BasisVector::new("a", 0, 1), BasisVector::new("b", 1, 1), BasisVector::new("e", 0, 2)], 3, 3).unwrap();
        let mut l2 = l.clone();
        l2.set_bracket(&[0], LinComb::basis(1)).unwrap();
        for alg in [l, l2] {
            let c = MatrixContraction::for_algebra(&alg).unwrap();
            let t = transfer_structure(&alg, &c, 3).unwrap();
            assert!(t.algebra.brackets().is_empty());
            assert!(t.algebra.validate().is_valid());
        }
    }

    #[test]
    fn mu_zero_gives_identity_perturbation() {
        let (basis, d) = two_term();
        let mut l = CurvedLinf::new(basis.clone(), 3, 3).unwrap();
        l.set_bracket(&[0], LinComb::basis(1)).unwrap();
        let c = MatrixContraction::from_complex(basis, d).unwrap();
        let pert = Perturbed::new(&c, &l, l.cut());
        for w in l.words() {
            let x = LinComb::basis(w.clone());
            assert!(pert.mu(&w).unwrap().is_zero());
            assert_eq!(pert.p_mu(&x).unwrap(), pert.p_sum(&x).unwrap());
            assert_eq!(pert.h_mu(&x).unwrap(), pert.h_sum(&x).unwrap());
        }
    }
}
