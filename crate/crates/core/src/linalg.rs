//! Exact Gaussian elimination on sparse vectors.

use num_traits::Zero;

use crate::lincomb::LinComb;
use crate::rational::Q;

/// An incrementally built row-echelon basis; each row is keyed by its leading (smallest) key.
#[derive(Clone, Debug, Default)]
pub struct Echelon<K: Ord + Clone> {
    rows: Vec<(K, LinComb<K>)>,
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; the remainder is zero iff `v` lies in the span.
    pub fn reduce(&self, v: &LinComb<K>) -> LinComb<K> {
        let mut v = v.clone();
        for (lead, row) in &self.rows {
            let c = v.coef(lead);
            if !c.is_zero() {
                v.add_scaled(row, &-c);
            }
        }
        v
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &LinComb<K>) -> bool {
        let r = self.reduce(v);
        let Some((lead, c)) = r.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let r = r.scaled(&c.recip());
        for (_, row) in self.rows.iter_mut() {
            let c = row.coef(&lead);
            if !c.is_zero() {
                row.add_scaled(&r, &-c);
            }
        }
        self.rows.push((lead, r));
        true
    }

    pub fn contains(&self, v: &LinComb<K>) -> bool {
        self.reduce(v).is_zero()
    }
}

/// Rank of a family of sparse vectors.
pub fn rank<K: Ord + Clone>(vectors: &[LinComb<K>]) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

/// Kernel of the linear map sending `domain[j]` to `images[j]`, as combinations of domain keys.
///
/// Basis vectors are produced in the order the domain is listed; each one
/// involves only its own key and keys listed before it.
pub fn kernel<D: Ord + Clone, K: Ord + Clone>(domain: &[D], images: &[LinComb<K>]) -> Vec<LinComb<D>> {
    assert_eq!(domain.len(), images.len());
    // augmented rows (image, tracking combination); leads on the image part
    let mut rows: Vec<(K, LinComb<K>, LinComb<D>)> = Vec::new();
    let mut out = Vec::new();
    for (d, img) in domain.iter().zip(images) {
        let mut v = img.clone();
        let mut track = LinComb::basis(d.clone());
        for (lead, row, tr) in &rows {
            let c = v.coef(lead);
            if !c.is_zero() {
                v.add_scaled(row, &-c.clone());
                track.add_scaled(tr, &-c);
            }
        }
        match v.iter().next().map(|(k, c)| (k.clone(), c.clone())) {
            None => out.push(track),
            Some((lead, c)) => {
                let inv = c.recip();
                rows.push((lead, v.scaled(&inv), track.scaled(&inv)));
            }
        }
    }
    out
}

/// Solves `Σ x_j images[j] = target`, if possible.
pub fn solve<D: Ord + Clone, K: Ord + Clone>(domain: &[D], images: &[LinComb<K>], target: &LinComb<K>) -> Option<LinComb<D>> {
    let mut rows: Vec<(K, LinComb<K>, LinComb<D>)> = Vec::new();
    for (d, img) in domain.iter().zip(images) {
        let mut v = img.clone();
        let mut track = LinComb::basis(d.clone());
        for (lead, row, tr) in &rows {
            let c = v.coef(lead);
            if !c.is_zero() {
                v.add_scaled(row, &-c.clone());
                track.add_scaled(tr, &-c);
            }
        }
        if let Some((lead, c)) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())) {
            let inv = c.recip();
            rows.push((lead, v.scaled(&inv), track.scaled(&inv)));
        }
    }
    let mut rest = target.clone();
    let mut x = LinComb::new();
    for (lead, row, tr) in &rows {
        let c: Q = rest.coef(lead);
        if !c.is_zero() {
            rest.add_scaled(row, &-c.clone());
            x.add_scaled(tr, &c);
        }
    }
    rest.is_zero().then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    fn v(entries: &[(u8, i64)]) -> LinComb<u8> {
        entries.iter().map(|&(k, c)| (k, qi(c))).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let imgs = vec![v(&[(0, 1), (1, 1)]), v(&[(1, 1)]), v(&[(0, 1)])];
        assert_eq!(rank(&imgs), 2);
        let ker = kernel(&['a', 'b', 'c'], &imgs);
        assert_eq!(ker.len(), 1);
        let k = &ker[0];
        assert_eq!(k.coef(&'b'), -k.coef(&'a'));
        assert_eq!(k.coef(&'c'), -k.coef(&'a'));
        assert!(!k.is_zero());
        let x = solve(&['a', 'b', 'c'], &imgs, &v(&[(0, 2), (1, 5)])).unwrap();
        let mut back = LinComb::new();
        for (d, c) in x.iter() {
            let idx = (*d as u8 - b'a') as usize;
            back.add_scaled(&imgs[idx], c);
        }
        assert_eq!(back, v(&[(0, 2), (1, 5)]));
        assert!(solve(&['b'], &imgs[1..2], &v(&[(0, 1)])).is_none());
    }
}
