//! Koszul signs for rearranging graded symbols.
//!
//! Every module that permutes graded letters (bracket arguments, coalgebra
//! words, form factors) goes through these routines.

/// Parity of the Koszul sign for reordering `(x_0, …, x_{n-1})` as
/// `(x_{order[0]}, x_{order[1]}, …)`. Returns `true` for a minus sign.
pub fn permutation_sign(degrees: &[i32], order: &[usize]) -> bool {
    debug_assert_eq!(degrees.len(), order.len());
    let mut parity = 0i64;
    for a in 0..order.len() {
        for b in (a + 1)..order.len() {
            if order[a] > order[b] {
                parity += (degrees[order[a]] as i64) * (degrees[order[b]] as i64);
            }
        }
    }
    parity.rem_euclid(2) == 1
}

/// Sorts graded letters into canonical (ascending) order, tracking the Koszul sign.
///
/// Returns `None` when the graded-symmetric product vanishes, i.e. an odd
/// letter occurs twice.
pub fn sort_graded<K: Ord + Clone>(items: &[K], degree: impl Fn(&K) -> i32) -> Option<(bool, Vec<K>)> {
    let mut v: Vec<K> = items.to_vec();
    let mut negative = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            if (degree(&v[j - 1]) * degree(&v[j])).rem_euclid(2) == 1 {
                negative = !negative;
            }
            v.swap(j - 1, j);
            j -= 1;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] && degree(&w[0]).rem_euclid(2) == 1 {
            return None;
        }
    }
    Some((negative, v))
}

/// All ways of splitting positions `0..n` into consecutive blocks of the
/// given sizes, each block increasing (the `(n_1,…,n_k)`-unshuffles).
pub fn unshuffles(n: usize, sizes: &[usize]) -> Vec<Vec<Vec<usize>>> {
    debug_assert_eq!(sizes.iter().sum::<usize>(), n);
    let mut out = Vec::new();
    let mut used = vec![false; n];
    let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(sizes.len());
    fill_blocks(sizes, &mut used, &mut blocks, &mut out);
    out
}

fn fill_blocks(sizes: &[usize], used: &mut [bool], blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
    if blocks.len() == sizes.len() {
        out.push(blocks.clone());
        return;
    }
    let size = sizes[blocks.len()];
    let free: Vec<usize> = (0..used.len()).filter(|&i| !used[i]).collect();
    for combo in combinations(&free, size) {
        for &i in &combo {
            used[i] = true;
        }
        blocks.push(combo.clone());
        fill_blocks(sizes, used, blocks, out);
        blocks.pop();
        for &i in &combo {
            used[i] = false;
        }
    }
}

/// Increasing `k`-element subsequences of `items`.
pub fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(items: &[usize], start: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, i + 1, k, cur, out);
            cur.pop();
        }
    }
    rec(items, 0, k, &mut cur, &mut out);
    out
}

/// Ordered compositions of `n` into exactly `k` non-negative parts.
pub fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(rest: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == k {
            cur.push(rest);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in 0..=rest {
            cur.push(first);
            rec(rest - first, k, cur, out);
            cur.pop();
        }
    }
    if k == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, k, &mut cur, &mut out);
    out
}

/// Multisets of size `k` drawn from `0..m`, as non-decreasing index vectors.
pub fn multisets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(m: usize, start: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(m, i, k, cur, out);
            cur.pop();
        }
    }
    rec(m, 0, k, &mut cur, &mut out);
    out
}
