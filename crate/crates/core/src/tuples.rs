//! Deterministic enumeration of tuples, subsets and parameter grids.

/// Calls `f` on every injective `k`-tuple over `0..n` in lexicographic order.
/// Stops early when `f` returns `false`.
pub fn for_each_injective(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut tuple = Vec::with_capacity(k);
    let mut used = vec![false; n];
    injective_rec(n, k, &mut tuple, &mut used, &mut f);
}

fn injective_rec(
    n: usize,
    k: usize,
    tuple: &mut Vec<usize>,
    used: &mut [bool],
    f: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if tuple.len() == k {
        return f(tuple);
    }
    for i in 0..n {
        if used[i] {
            continue;
        }
        used[i] = true;
        tuple.push(i);
        let go_on = injective_rec(n, k, tuple, used, f);
        tuple.pop();
        used[i] = false;
        if !go_on {
            return false;
        }
    }
    true
}

/// [`for_each_injective`] restricted to tuples starting with `first`.
pub fn for_each_injective_from(n: usize, k: usize, first: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k == 0 || k > n || first >= n {
        return;
    }
    let mut tuple = Vec::with_capacity(k);
    let mut used = vec![false; n];
    used[first] = true;
    tuple.push(first);
    injective_rec(n, k, &mut tuple, &mut used, &mut f);
}

/// [`for_each_subset`] restricted to subsets whose smallest element is `first`.
pub fn for_each_subset_from(n: usize, k: usize, first: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k == 0 || first + k > n {
        return;
    }
    let mut subset = vec![first; k];
    for_each_subset(n - first - 1, k - 1, |tail| {
        for (slot, t) in subset[1..].iter_mut().zip(tail) {
            *slot = first + 1 + t;
        }
        f(&subset)
    });
}

/// Calls `f` on every `k`-subset of `0..n` (sorted) in lexicographic order.
/// Stops early when `f` returns `false`.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !f(&idx) {
            return;
        }
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        if idx[i] >= n - k + i {
            return;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Number of `k`-subsets of an `n`-set, saturating.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// Positive rationals `p/q` with `1 ≤ p, q ≤ level` in lowest terms that
/// first appear at `level` (i.e. `max(p, q) = level`), sorted by value.
pub fn rational_level(level: u64) -> Vec<(u64, u64)> {
    if level == 0 {
        return Vec::new();
    }
    let mut out: Vec<(u64, u64)> = (1..=level)
        .flat_map(|other| [(level, other), (other, level)])
        .filter(|&(p, q)| num_integer::gcd(p, q) == 1)
        .collect();
    out.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
    out.dedup();
    out
}

/// Enumerates all pairs of positive rationals, level by level: level `k`
/// holds the pairs whose larger numerator/denominator is exactly `k`.
pub fn rational_pairs() -> impl Iterator<Item = ((u64, u64), (u64, u64))> {
    (1u64..).flat_map(|level| {
        let upto: Vec<(u64, u64)> = (1..=level).flat_map(rational_level).collect();
        let fresh = rational_level(level);
        let mut out = Vec::new();
        for a in &upto {
            for b in &upto {
                if fresh.contains(a) || fresh.contains(b) {
                    out.push((*a, *b));
                }
            }
        }
        out.sort_by(|x, y| {
            (x.0 .0 * y.0 .1)
                .cmp(&(y.0 .0 * x.0 .1))
                .then((x.1 .0 * y.1 .1).cmp(&(y.1 .0 * x.1 .1)))
        });
        out
    })
}

/// Nonnegative rationals: `0`, then each positive level in turn.
pub fn nonnegative_rationals() -> impl Iterator<Item = (u64, u64)> {
    std::iter::once((0, 1)).chain((1u64..).flat_map(rational_level))
}

/// Cantor enumeration of `(i, j)` with `i < rows` and `j ≥ 0`.
pub fn diagonal_pairs(rows: usize) -> impl Iterator<Item = (usize, usize)> {
    (0usize..).flat_map(move |s| (0..=s).filter(move |&i| i < rows).map(move |i| (i, s - i)))
}
