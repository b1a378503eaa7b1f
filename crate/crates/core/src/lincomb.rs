//! Sparse finite linear combinations over an ordered key set.

use num_traits::{One, Zero};
use std::collections::btree_map::{self, BTreeMap};
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use crate::rational::Q;

/// A finite formal sum `Σ c_k · k` with nonzero rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinComb<K: Ord> {
    terms: BTreeMap<K, Q>,
}

impl<K: Ord + Debug> Debug for LinComb<K> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map()
            .entries(self.terms.iter().map(|(k, c)| (k, c.to_string())))
            .finish()
    }
}

impl<K: Ord> Default for LinComb<K> {
    fn default() -> Self {
        LinComb { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> LinComb<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(key: K, coef: Q) -> Self {
        let mut out = Self::new();
        out.add_term(key, coef);
        out
    }

    pub fn basis(key: K) -> Self {
        Self::single(key, Q::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coef(&self, key: &K) -> Q {
        self.terms.get(key).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> btree_map::Iter<'_, K, Q> {
        self.terms.iter()
    }

    pub fn keys(&self) -> btree_map::Keys<'_, K, Q> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, key: K, coef: Q) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            btree_map::Entry::Vacant(e) => {
                e.insert(coef);
            }
            btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coef;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += coef * other`.
    pub fn add_scaled(&mut self, other: &LinComb<K>, coef: &Q) {
        if coef.is_zero() {
            return;
        }
        for (k, c) in other.iter() {
            self.add_term(k.clone(), c * coef);
        }
    }

    pub fn scaled(&self, coef: &Q) -> Self {
        if coef.is_zero() {
            return Self::new();
        }
        LinComb { terms: self.terms.iter().map(|(k, c)| (k.clone(), c * coef)).collect() }
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&K) -> bool) {
        self.terms.retain(|k, _| keep(k));
    }

    pub fn filtered(&self, mut keep: impl FnMut(&K) -> bool) -> Self {
        LinComb {
            terms: self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, c)| (k.clone(), c.clone())).collect(),
        }
    }

    /// Applies a linear map given on keys.
    pub fn map_linear<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> LinComb<K2>) -> LinComb<K2> {
        let mut out = LinComb::new();
        for (k, c) in self.iter() {
            out.add_scaled(&f(k), c);
        }
        out
    }

    /// Relabels keys; colliding images are summed.
    pub fn map_keys<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> K2) -> LinComb<K2> {
        let mut out = LinComb::new();
        for (k, c) in self.iter() {
            out.add_term(f(k), c.clone());
        }
        out
    }

    pub fn into_terms(self) -> BTreeMap<K, Q> {
        self.terms
    }
}

impl<K: Ord + Clone> FromIterator<(K, Q)> for LinComb<K> {
    fn from_iter<I: IntoIterator<Item = (K, Q)>>(iter: I) -> Self {
        let mut out = LinComb::new();
        for (k, c) in iter {
            out.add_term(k, c);
        }
        out
    }
}

impl<'a, K: Ord + Clone> IntoIterator for &'a LinComb<K> {
    type Item = (&'a K, &'a Q);
    type IntoIter = btree_map::Iter<'a, K, Q>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.iter()
    }
}

impl<K: Ord + Clone> AddAssign<&LinComb<K>> for LinComb<K> {
    fn add_assign(&mut self, rhs: &LinComb<K>) {
        for (k, c) in rhs.iter() {
            self.add_term(k.clone(), c.clone());
        }
    }
}

impl<K: Ord + Clone> SubAssign<&LinComb<K>> for LinComb<K> {
    fn sub_assign(&mut self, rhs: &LinComb<K>) {
        for (k, c) in rhs.iter() {
            self.add_term(k.clone(), -c.clone());
        }
    }
}

impl<K: Ord + Clone> Add<&LinComb<K>> for &LinComb<K> {
    type Output = LinComb<K>;
    fn add(self, rhs: &LinComb<K>) -> LinComb<K> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<K: Ord + Clone> Sub<&LinComb<K>> for &LinComb<K> {
    type Output = LinComb<K>;
    fn sub(self, rhs: &LinComb<K>) -> LinComb<K> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<K: Ord + Clone> Neg for &LinComb<K> {
    type Output = LinComb<K>;
    fn neg(self) -> LinComb<K> {
        LinComb { terms: self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect() }
    }
}
