//! Truncated symmetric coalgebras `C(V)` on graded, weighted bases.
//!
//! A word is a canonically sorted list of basis letters standing for their
//! graded-symmetric product; reordering letters costs the Koszul sign.

use num_traits::{One, Zero};
use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::lincomb::LinComb;
use crate::rational::{inv_factorial, Q};
use crate::sign::{permutation_sign, sort_graded};

/// A graded basis with filtration weights.
pub trait GradedBasis {
    type Key: Ord + Clone + Debug;
    fn degree(&self, k: &Self::Key) -> i32;
    fn weight(&self, k: &Self::Key) -> u32;
}

/// A curved L∞ structure given on basis letters.
pub trait Brackets: GradedBasis {
    /// `{x_1, …, x_k}` for basis letters in any order; arity 0 is the curvature.
    fn bracket(&self, args: &[Self::Key]) -> LinComb<Self::Key>;
    /// Brackets of higher arity vanish.
    fn max_arity(&self) -> usize;
}

pub type Word<K> = Vec<K>;
pub type Words<K> = LinComb<Word<K>>;
pub type WordPairs<K> = LinComb<(Word<K>, Word<K>)>;

/// Words of weight above `weight` are dropped; a surviving word longer than
/// `length` is an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cutoff {
    pub weight: u32,
    pub length: usize,
}

impl Cutoff {
    pub fn new(weight: u32) -> Self {
        Cutoff { weight, length: weight as usize }
    }

    pub fn with_length(weight: u32, length: usize) -> Self {
        Cutoff { weight, length }
    }
}

pub fn word_weight<S: GradedBasis + ?Sized>(s: &S, w: &[S::Key]) -> u32 {
    w.iter().map(|k| s.weight(k)).sum()
}

pub fn word_degree<S: GradedBasis + ?Sized>(s: &S, w: &[S::Key]) -> i32 {
    w.iter().map(|k| s.degree(k)).sum()
}

fn admit<S: GradedBasis + ?Sized>(s: &S, w: &[S::Key], cut: Cutoff) -> Result<bool> {
    if word_weight(s, w) > cut.weight {
        return Ok(false);
    }
    if w.len() > cut.length {
        return Err(Error::CutoffOverflow(format!(
            "word of length {} and weight {} exceeds word-length cutoff {}",
            w.len(),
            word_weight(s, w),
            cut.length
        )));
    }
    Ok(true)
}

/// Adds `coef · letters` (in the given order) to `out`, normalized and truncated.
pub fn push_word<S: GradedBasis + ?Sized>(s: &S, out: &mut Words<S::Key>, letters: Vec<S::Key>, coef: Q, cut: Cutoff) -> Result<()> {
    if coef.is_zero() {
        return Ok(());
    }
    let Some((negative, sorted)) = sort_graded(&letters, |k| s.degree(k)) else {
        return Ok(());
    };
    if admit(s, &sorted, cut)? {
        out.add_term(sorted, if negative { -coef } else { coef });
    }
    Ok(())
}

/// The word of a single element, `x ↦ x` in length 1.
pub fn embed<K: Ord + Clone>(x: &LinComb<K>) -> Words<K> {
    x.map_keys(|k| vec![k.clone()])
}

/// Length-1 component.
pub fn pi1<K: Ord + Clone>(w: &Words<K>) -> LinComb<K> {
    let mut out = LinComb::new();
    for (word, c) in w.iter() {
        if word.len() == 1 {
            out.add_term(word[0].clone(), c.clone());
        }
    }
    out
}

/// Restriction to words of the given length.
pub fn length_part<K: Ord + Clone>(w: &Words<K>, len: usize) -> Words<K> {
    w.filtered(|word| word.len() == len)
}

/// The graded-commutative product of words.
pub fn product<S: GradedBasis + ?Sized>(s: &S, a: &Words<S::Key>, b: &Words<S::Key>, cut: Cutoff) -> Result<Words<S::Key>> {
    let mut out = LinComb::new();
    for (wa, ca) in a.iter() {
        for (wb, cb) in b.iter() {
            let mut letters = wa.clone();
            letters.extend(wb.iter().cloned());
            push_word(s, &mut out, letters, ca * cb, cut)?;
        }
    }
    Ok(out)
}

/// `exp(x) = Σ xⁿ/n!`, truncated by weight. Requires every letter of `x` to have weight ≥ 1.
pub fn exp_element<S: GradedBasis + ?Sized>(s: &S, x: &LinComb<S::Key>, cut: Cutoff) -> Result<Words<S::Key>> {
    let one: Words<S::Key> = LinComb::basis(Vec::new());
    let xw = embed(x).filtered(|w| word_weight(s, w) <= cut.weight);
    let mut out = one.clone();
    let mut power = one;
    let mut k = 0usize;
    loop {
        k += 1;
        power = product(s, &power, &xw, cut)?;
        if power.is_zero() {
            break;
        }
        out.add_scaled(&power, &inv_factorial(k));
    }
    Ok(out)
}

/// All `(I, J)` unshuffles of a word with Koszul signs: `∇w = Σ ± w_I ⊗ w_J`.
pub fn coproduct<S: GradedBasis + ?Sized>(s: &S, w: &[S::Key]) -> WordPairs<S::Key> {
    let n = w.len();
    let degs: Vec<i32> = w.iter().map(|k| s.degree(k)).collect();
    let mut out = LinComb::new();
    for mask in 0u32..(1 << n) {
        let left: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let right: Vec<usize> = (0..n).filter(|i| mask & (1 << i) == 0).collect();
        let order: Vec<usize> = left.iter().chain(&right).copied().collect();
        let negative = permutation_sign(&degs, &order);
        let a: Vec<S::Key> = left.iter().map(|&i| w[i].clone()).collect();
        let b: Vec<S::Key> = right.iter().map(|&i| w[i].clone()).collect();
        out.add_term((a, b), if negative { -Q::one() } else { Q::one() });
    }
    out
}

/// `∇` extended linearly.
pub fn coproduct_sum<S: GradedBasis + ?Sized>(s: &S, x: &Words<S::Key>) -> WordPairs<S::Key> {
    let mut out = LinComb::new();
    for (w, c) in x.iter() {
        out.add_scaled(&coproduct(s, w), c);
    }
    out
}

/// `(f ⊗ g)(a ⊗ b) = (−1)^{|g||a|} f(a) ⊗ g(b)` for maps on words, with `g` of degree `g_degree`.
pub fn tensor_apply<S: GradedBasis + ?Sized, T: GradedBasis + ?Sized>(
    s: &S,
    pairs: &WordPairs<S::Key>,
    g_degree: i32,
    mut f: impl FnMut(&Word<S::Key>) -> Result<Words<T::Key>>,
    mut g: impl FnMut(&Word<S::Key>) -> Result<Words<T::Key>>,
) -> Result<WordPairs<T::Key>>
where
    T::Key: Ord + Clone,
{
    let mut out = LinComb::new();
    for ((a, b), c) in pairs.iter() {
        let fa = f(a)?;
        if fa.is_zero() {
            continue;
        }
        let gb = g(b)?;
        let negative = (g_degree * word_degree(s, a)).rem_euclid(2) == 1;
        let c = if negative { -c.clone() } else { c.clone() };
        for (x, cx) in fa.iter() {
            for (y, cy) in gb.iter() {
                out.add_term((x.clone(), y.clone()), &c * cx * cy);
            }
        }
    }
    Ok(out)
}

/// Drops pairs whose total weight exceeds the cutoff.
pub fn truncate_pairs<S: GradedBasis + ?Sized>(s: &S, pairs: &WordPairs<S::Key>, cut: Cutoff) -> WordPairs<S::Key> {
    pairs.filtered(|(a, b)| word_weight(s, a) + word_weight(s, b) <= cut.weight)
}

/// The coderivation `Σ_{(I,J)} ± op(x_I) · x_J` determined by `op` on letters.
///
/// `op` is applied to every sub-multiset of the word up to `max_arity`,
/// including the empty one.
pub fn coderivation<S: GradedBasis + ?Sized>(
    s: &S,
    w: &[S::Key],
    max_arity: usize,
    cut: Cutoff,
    mut op: impl FnMut(&[S::Key]) -> LinComb<S::Key>,
) -> Result<Words<S::Key>> {
    let n = w.len();
    let degs: Vec<i32> = w.iter().map(|k| s.degree(k)).collect();
    let mut out = LinComb::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize > max_arity {
            continue;
        }
        let inner: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let rest: Vec<usize> = (0..n).filter(|i| mask & (1 << i) == 0).collect();
        let args: Vec<S::Key> = inner.iter().map(|&i| w[i].clone()).collect();
        let value = op(&args);
        if value.is_zero() {
            continue;
        }
        let order: Vec<usize> = inner.iter().chain(&rest).copied().collect();
        let negative = permutation_sign(&degs, &order);
        for (letter, c) in value.iter() {
            let mut letters = Vec::with_capacity(rest.len() + 1);
            letters.push(letter.clone());
            letters.extend(rest.iter().map(|&i| w[i].clone()));
            push_word(s, &mut out, letters, if negative { -c.clone() } else { c.clone() }, cut)?;
        }
    }
    Ok(out)
}

/// The Chevalley–Eilenberg codifferential `δ` on one word.
pub fn codifferential<S: Brackets + ?Sized>(s: &S, w: &[S::Key], cut: Cutoff) -> Result<Words<S::Key>> {
    coderivation(s, w, s.max_arity(), cut, |args| s.bracket(args))
}

/// `δ` extended linearly.
pub fn codifferential_sum<S: Brackets + ?Sized>(s: &S, x: &Words<S::Key>, cut: Cutoff) -> Result<Words<S::Key>> {
    let mut out = LinComb::new();
    for (w, c) in x.iter() {
        out.add_scaled(&codifferential(s, w, cut)?, c);
    }
    Ok(out)
}

/// The coalgebra morphism `C(f)` on one word, from components `f_(k)` on letters.
///
/// Sums over set partitions of the word into nonempty blocks, multiplied by
/// `exp(f_(0))`.
pub fn coalgebra_map<S: GradedBasis + ?Sized, T: GradedBasis + ?Sized>(
    s: &S,
    t: &T,
    w: &[S::Key],
    cut: Cutoff,
    mut f: impl FnMut(&[S::Key]) -> LinComb<T::Key>,
) -> Result<Words<T::Key>> {
    let n = w.len();
    let degs: Vec<i32> = w.iter().map(|k| s.degree(k)).collect();
    let mut body: Words<T::Key> = LinComb::new();
    for blocks in set_partitions(n) {
        let order: Vec<usize> = blocks.iter().flatten().copied().collect();
        let negative = permutation_sign(&degs, &order);
        let mut partial: Words<T::Key> = LinComb::single(Vec::new(), if negative { -Q::one() } else { Q::one() });
        for block in &blocks {
            let args: Vec<S::Key> = block.iter().map(|&i| w[i].clone()).collect();
            let value = f(&args);
            if value.is_zero() {
                partial = LinComb::new();
                break;
            }
            partial = product(t, &partial, &embed(&value), cut)?;
            if partial.is_zero() {
                break;
            }
        }
        body += &partial;
    }
    let f0 = f(&[]);
    if f0.is_zero() {
        return Ok(body);
    }
    let e = exp_element(t, &f0, cut)?;
    product(t, &e, &body, cut)
}

/// All set partitions of `0..n` into nonempty blocks, each block increasing,
/// blocks ordered by their first element.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    fn rec(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            rec(i + 1, n, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        rec(i + 1, n, blocks, out);
        blocks.pop();
    }
    rec(0, n, &mut blocks, &mut out);
    out
}

/// All canonical words of weight at most `max_weight` on the given letters
/// (including the empty word), skipping vanishing ones.
pub fn words_up_to<S: GradedBasis + ?Sized>(s: &S, letters: &[S::Key], max_weight: u32) -> Vec<Word<S::Key>> {
    let mut sorted = letters.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec<S: GradedBasis + ?Sized>(s: &S, letters: &[S::Key], start: usize, budget: u32, cur: &mut Vec<S::Key>, out: &mut Vec<Word<S::Key>>) {
        out.push(cur.clone());
        for i in start..letters.len() {
            let k = &letters[i];
            let w = s.weight(k);
            if w > budget {
                continue;
            }
            if s.degree(k).rem_euclid(2) == 1 && cur.last() == Some(k) {
                continue;
            }
            cur.push(k.clone());
            rec(s, letters, i, budget - w, cur, out);
            cur.pop();
        }
    }
    rec(s, &sorted, 0, max_weight, &mut cur, &mut out);
    out
}
