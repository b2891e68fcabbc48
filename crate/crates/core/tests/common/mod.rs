//! Generators and naive reference implementations shared by the
//! integration tests.
#![allow(dead_code)]

use finmet::genericity::catalog::all_catalog_metrics;
use finmet::scalar::rat;
use finmet::{FinMetric, LabeledMatrix, Metric, Rational};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn random_rational(rng: &mut impl Rng, max_num: i64) -> Rational {
    let den = rng.random_range(1..=6);
    rat(rng.random_range(1..=max_num), den)
}

fn max_r(a: Rational, b: Rational) -> Rational {
    if b > a { b } else { a }
}

fn min_r(a: Rational, b: Rational) -> Rational {
    if b < a { b } else { a }
}

/// Shortest-path closure of random positive weights: tight triangles and
/// many ties.
pub fn path_metric(rng: &mut impl Rng, labels: Vec<String>) -> Metric {
    let n = labels.len();
    let mut w = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = random_rational(rng, 12);
            w[i][j] = v.clone();
            w[j][i] = v;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = w[i][k].clone() + w[k][j].clone();
                if via < w[i][j] {
                    w[i][j] = via;
                }
            }
        }
    }
    FinMetric::from_fn(labels, |i, j| w[i][j].clone()).unwrap()
}

/// Entries drawn from `[1, 2]`, which always form a metric.
pub fn band_metric(rng: &mut impl Rng, labels: Vec<String>) -> Metric {
    FinMetric::from_fn(labels, |_, _| Rational::one() + rat(rng.random_range(0..=12), 12)).unwrap()
}

pub fn random_metric(rng: &mut impl Rng, labels: Vec<String>) -> Metric {
    if rng.random_bool(0.5) {
        path_metric(rng, labels)
    } else {
        band_metric(rng, labels)
    }
}

/// Adds points to `d` one at a time as `f(p) = min_a (c_a + d(a, p))` with
/// every `c_a ≥ diam/2`, so that `f` is 1-Lipschitz with `f(p) + f(q) ≥ d(p, q)`.
pub fn extend(rng: &mut impl Rng, d: &Metric, new: &[String]) -> Metric {
    let mut cur = d.clone();
    for label in new {
        let n = cur.len();
        let half = cur.diameter() / rat(2, 1);
        let mut anchors: Vec<(usize, Rational)> = Vec::new();
        for a in 0..n {
            if rng.random_bool(0.6) {
                anchors.push((a, half.clone() + random_rational(rng, 4)));
            }
        }
        let anchors = if anchors.is_empty() { vec![(0, half.clone() + Rational::one())] } else { anchors };
        let f: Vec<Rational> = (0..n)
            .map(|p| anchors.iter().map(|(a, c)| c.clone() + cur.d(*a, p)).reduce(min_r).unwrap())
            .collect();
        let labels: Vec<String> = cur.labels().iter().cloned().chain([label.clone()]).collect();
        cur = FinMetric::from_fn(labels, |i, j| if j == n { f[i].clone() } else { cur.d(i, j) }).unwrap();
    }
    cur
}

pub fn shuffled(rng: &mut impl Rng, d: &Metric) -> Metric {
    let mut labels = d.labels().to_vec();
    labels.shuffle(rng);
    d.reordered(&labels).unwrap()
}

/// `k` pairwise disjoint nonempty label subsets.
pub fn random_parts(rng: &mut impl Rng, labels: &[String], k: usize) -> Vec<Vec<String>> {
    let mut pool = labels.to_vec();
    pool.shuffle(rng);
    let mut parts = Vec::with_capacity(k);
    let mut rest = &pool[..];
    for i in 0..k {
        let left = k - i - 1;
        if rest.len() <= left {
            break;
        }
        let size = rng.random_range(1..=(rest.len() - left).min(4));
        parts.push(rest[..size].to_vec());
        rest = &rest[size..];
    }
    parts
}

/// All metrics on 1..=5 points with entries in {1, 3/2, 2}.
pub fn corpus() -> Vec<Metric> {
    (1..=5).flat_map(all_catalog_metrics::<Rational>).collect()
}

pub fn random_corpus(count: usize, n: usize, seed: u64) -> Vec<Metric> {
    let mut r = rng(seed);
    (0..count).map(|_| random_metric(&mut r, names("p", n))).collect()
}

pub fn is_metric(m: &Metric) -> bool {
    let matrix: LabeledMatrix<Rational> = LabeledMatrix::from_rows(m.labels().to_vec(), m.rows()).unwrap();
    matrix.violations(true).is_empty()
}

pub fn all_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn grow(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for p in 0..n {
            if !cur.contains(&p) {
                cur.push(p);
                grow(n, k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    grow(n, k, &mut Vec::new(), &mut out);
    out
}

pub fn all_subsets(n: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect()).collect()
}

pub fn ipow(b: &Rational, e: u32) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * b.clone())
}

pub mod oracle {
    use super::*;

    pub fn ultrametric(d: &Metric) -> Rational {
        let e = |i: usize, j: usize| d.d(i, j);
        all_tuples(d.len(), 3)
            .iter()
            .map(|t| e(t[0], t[2]) - max_r(e(t[0], t[1]), e(t[1], t[2])))
            .reduce(max_r)
            .unwrap_or_else(Rational::zero)
    }

    pub fn ptolemy_at(d: &Metric, t: &[usize]) -> Rational {
        let e = |i: usize, j: usize| d.d(t[i], t[j]);
        e(0, 2) * e(1, 3) - e(0, 1) * e(2, 3) - e(0, 3) * e(1, 2)
    }

    pub fn ptolemy(d: &Metric) -> Rational {
        all_tuples(d.len(), 4).iter().map(|t| ptolemy_at(d, t)).reduce(max_r).unwrap_or_else(Rational::zero)
    }

    pub fn four_point_at(d: &Metric, t: &[usize]) -> Rational {
        let e = |i: usize, j: usize| d.d(t[i], t[j]);
        e(0, 2) + e(1, 3) - max_r(e(0, 1) + e(2, 3), e(0, 3) + e(1, 2))
    }

    pub fn hyperbolicity(d: &Metric) -> Rational {
        all_tuples(d.len(), 4)
            .iter()
            .map(|t| four_point_at(d, t) / rat(2, 1))
            .fold(Rational::zero(), max_r)
    }

    pub fn spread(d: &Metric, s: &[usize]) -> Rational {
        let pairs: Vec<Rational> =
            s.iter().enumerate().flat_map(|(k, &i)| s[k + 1..].iter().map(move |&j| d.d(i, j))).collect();
        let diam = pairs.iter().cloned().reduce(max_r).unwrap();
        let sep = pairs.into_iter().reduce(min_r).unwrap();
        diam / sep
    }

    /// `card^q − C^q·ratio^p` for `α = p/q`.
    pub fn doubling_excess(card: usize, ratio: &Rational, c: &Rational, p: u32, q: u32) -> Rational {
        ipow(&rat(card as i64, 1), q) - ipow(c, q) * ipow(ratio, p)
    }

    /// Largest excess over subsets with `2 ≤ |A| ≤ max_subset`.
    pub fn doubling(d: &Metric, c: &Rational, p: u32, q: u32, max_subset: usize) -> Rational {
        all_subsets(d.len())
            .iter()
            .filter(|s| s.len() >= 2 && s.len() <= max_subset)
            .map(|s| doubling_excess(s.len(), &spread(d, s), c, p, q))
            .reduce(max_r)
            .unwrap_or_else(Rational::zero)
    }

    pub fn chain_ratio(d: &Metric, chain: &[usize]) -> Rational {
        let gap = chain.windows(2).map(|w| d.d(w[0], w[1])).reduce(max_r).unwrap();
        gap / d.d(chain[0], chain[chain.len() - 1])
    }

    /// Minimum over every injective chain with `2 ≤ N ≤ max_chain` points.
    pub fn ud_modulus(d: &Metric, max_chain: usize) -> Rational {
        let n = d.len();
        (2..=max_chain.min(n))
            .flat_map(|k| all_tuples(n, k))
            .map(|c| chain_ratio(d, &c))
            .reduce(min_r)
            .unwrap()
    }
}
