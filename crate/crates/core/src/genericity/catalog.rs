//! Small bundled target spaces.

use crate::metric::FinMetric;
use crate::scalar::Scalar;
use crate::tuples::for_each_injective;

/// Distances used by the catalog: `1`, `3/2` and `2`. Any choice of them
/// satisfies the triangle inequality.
pub fn catalog_values<T: Scalar>() -> [T; 3] {
    [T::one(), T::ratio(3, 2), T::two()]
}

/// Every labeled metric on `n` points (`f0, f1, ...`) with entries in
/// [`catalog_values`], in lexicographic order of the upper triangle.
pub fn all_catalog_metrics<T: Scalar>(n: usize) -> Vec<FinMetric<T>> {
    let values = catalog_values::<T>();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let total = 3usize.pow(pairs.len() as u32);
    let labels: Vec<String> = (0..n).map(|i| format!("f{i}")).collect();
    (0..total)
        .map(|code| {
            let mut digits = vec![0usize; pairs.len()];
            let mut c = code;
            for slot in digits.iter_mut().rev() {
                *slot = c % 3;
                c /= 3;
            }
            let mut m = vec![vec![0usize; n]; n];
            for (&(i, j), &v) in pairs.iter().zip(&digits) {
                m[i][j] = v;
                m[j][i] = v;
            }
            FinMetric::from_fn(labels.clone(), |i, j| values[m[i][j]].clone()).expect("catalog entries form a metric")
        })
        .collect()
}

/// Upper-triangle codes of `d` under relabeling by `perm`.
fn code_under(codes: &[Vec<usize>], perm: &[usize]) -> Vec<usize> {
    let n = perm.len();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| codes[perm[i]][perm[j]])
        .collect()
}

/// One representative per isometry class of [`all_catalog_metrics`] for
/// `n = 1..=4`, ordered by size and then by code.
pub fn starter_catalog<T: Scalar>() -> Vec<FinMetric<T>> {
    let values = catalog_values::<T>();
    let mut out = Vec::new();
    for n in 1..=4 {
        let mut seen = std::collections::BTreeSet::new();
        for d in all_catalog_metrics::<T>(n) {
            let codes: Vec<Vec<usize>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { 0 } else { values.iter().position(|v| *v == d.d(i, j)).unwrap() })
                        .collect()
                })
                .collect();
            let own = code_under(&codes, &(0..n).collect::<Vec<_>>());
            let mut canon = own.clone();
            for_each_injective(n, n, |perm| {
                let c = code_under(&codes, perm);
                if c < canon {
                    canon = c;
                }
                true
            });
            if canon == own && seen.insert(canon) {
                out.push(d);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational as Q;

    #[test]
    fn counts() {
        assert_eq!(all_catalog_metrics::<Q>(3).len(), 27);
        assert_eq!(all_catalog_metrics::<Q>(1).len(), 1);
        let cat = starter_catalog::<Q>();
        let by_size: Vec<usize> = (1..=4).map(|n| cat.iter().filter(|d| d.len() == n).count()).collect();
        // 3 two-point classes; 10 triangles (multisets of 3 values)
        assert_eq!(&by_size[..3], &[1, 3, 10]);
        // Pólya count of 3-colourings of the edges of K4
        assert_eq!(by_size[3], 66);
    }
}
