//! Extremal constants of the metric inequalities, doubling and uniform
//! disconnectedness, computed by exhaustive tuple scans.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::FinMetric;
use crate::scalar::{ipow, smax, Scalar};
use crate::tuples::for_each_subset_from;

/// Result of an extremal scan.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectReport<T> {
    pub property: String,
    /// Positive means the property is violated.
    pub defect: T,
    /// The maximizing tuple, if any tuple was scanned.
    pub witness: Option<Vec<String>>,
    /// Whether the whole tuple space was scanned.
    pub exhaustive: bool,
}

impl<T: Scalar> DefectReport<T> {
    pub fn violated(&self) -> bool {
        self.defect.is_positive()
    }
}

/// A scan maximum together with its tuple, ordered by value and then by
/// lexicographically smaller tuple.
#[derive(Debug, Clone)]
pub(crate) struct Best<T> {
    pub value: T,
    pub tuple: Vec<usize>,
}

pub(crate) fn pick<T: Scalar>(a: Option<Best<T>>, b: Option<Best<T>>) -> Option<Best<T>> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            if b.value > a.value || (b.value == a.value && b.tuple < a.tuple) {
                Some(b)
            } else {
                Some(a)
            }
        }
    }
}

pub(crate) fn offer<T: Scalar>(best: &mut Option<Best<T>>, value: T, tuple: &[usize]) {
    let better = match best {
        None => true,
        Some(b) => value > b.value || (value == b.value && tuple < b.tuple.as_slice()),
    };
    if better {
        *best = Some(Best { value, tuple: tuple.to_vec() });
    }
}

/// Runs `scan(first)` for every first index in parallel and keeps the best.
pub(crate) fn par_scan<T: Scalar>(n: usize, scan: impl Fn(usize) -> Option<Best<T>> + Sync + Send) -> Option<Best<T>> {
    (0..n).into_par_iter().map(scan).reduce(|| None, pick)
}

fn labels_of<T: Scalar>(d: &FinMetric<T>, tuple: &[usize]) -> Vec<String> {
    tuple.iter().map(|&i| d.label(i).to_string()).collect()
}

fn report<T: Scalar>(property: &str, d: &FinMetric<T>, best: Option<Best<T>>) -> DefectReport<T> {
    match best {
        Some(b) => DefectReport {
            property: property.into(),
            defect: b.value,
            witness: Some(labels_of(d, &b.tuple)),
            exhaustive: true,
        },
        None => DefectReport { property: property.into(), defect: T::zero(), witness: None, exhaustive: true },
    }
}

/// `d(a1,a3) − max(d(a1,a2), d(a2,a3))` over ordered triples.
pub fn ultrametric_defect<T: Scalar>(d: &FinMetric<T>) -> DefectReport<T> {
    report("ultrametric", d, ultrametric_best(d))
}

pub(crate) fn ultrametric_value<T: Scalar>(d: &FinMetric<T>, a: &[usize]) -> T {
    d.d(a[0], a[2]) - smax(d.d(a[0], a[1]), d.d(a[1], a[2]))
}

fn ultrametric_best<T: Scalar>(d: &FinMetric<T>) -> Option<Best<T>> {
    let n = d.len();
    // reversing a triple leaves the value unchanged: keep a1 < a3
    par_scan(n, |a1| {
        let mut best = None;
        for a2 in 0..n {
            for a3 in a1 + 1..n {
                if a2 != a1 && a2 != a3 {
                    let t = [a1, a2, a3];
                    offer(&mut best, ultrametric_value(d, &t), &t);
                }
            }
        }
        best
    })
}

/// The three pairings of a sorted 4-set into diagonals `{a1,a3}`, `{a2,a4}`,
/// each written as its lexicographically smallest tuple.
fn diagonal_pairings(w: usize, x: usize, y: usize, z: usize) -> [[usize; 4]; 3] {
    [[w, x, y, z], [w, x, z, y], [w, y, x, z]]
}

fn scan_quadruples<T: Scalar>(d: &FinMetric<T>, value: impl Fn(&[usize]) -> T + Sync) -> Option<Best<T>> {
    let n = d.len();
    par_scan(n, |w| {
        let mut best = None;
        for x in w + 1..n {
            for y in x + 1..n {
                for z in y + 1..n {
                    for t in diagonal_pairings(w, x, y, z) {
                        offer(&mut best, value(&t), &t);
                    }
                }
            }
        }
        best
    })
}

pub(crate) fn ptolemy_value<T: Scalar>(d: &FinMetric<T>, a: &[usize]) -> T {
    let e = |i: usize, j: usize| d.d(a[i], a[j]);
    e(0, 2) * e(1, 3) - e(0, 1) * e(2, 3) - e(0, 3) * e(1, 2)
}

/// `d13·d24 − d12·d34 − d14·d23` over ordered 4-tuples.
pub fn ptolemy_defect<T: Scalar>(d: &FinMetric<T>) -> DefectReport<T> {
    report("ptolemy", d, scan_quadruples(d, |t| ptolemy_value(d, t)))
}

/// `d13 + d24 − max(d12 + d34, d14 + d23)`.
pub(crate) fn four_point_value<T: Scalar>(d: &FinMetric<T>, a: &[usize]) -> T {
    let e = |i: usize, j: usize| d.d(a[i], a[j]);
    e(0, 2) + e(1, 3) - smax(e(0, 1) + e(2, 3), e(0, 3) + e(1, 2))
}

/// Largest four-point excess over all 4-tuples; `None` below 4 points.
pub(crate) fn four_point_best<T: Scalar>(d: &FinMetric<T>) -> Option<Best<T>> {
    scan_quadruples(d, |t| four_point_value(d, t))
}

/// The least `δ ≥ 0` for which the four-point condition holds.
///
/// The witness is reported only when `δ > 0`.
pub fn hyperbolicity_delta<T: Scalar>(d: &FinMetric<T>) -> DefectReport<T> {
    match four_point_best(d) {
        Some(b) if b.value.is_positive() => DefectReport {
            property: "hyperbolicity".into(),
            defect: b.value.half(),
            witness: Some(labels_of(d, &b.tuple)),
            exhaustive: true,
        },
        _ => DefectReport { property: "hyperbolicity".into(), defect: T::zero(), witness: None, exhaustive: true },
    }
}

/// A positive rational exponent `num/den` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exponent {
    pub num: u32,
    pub den: u32,
}

impl Exponent {
    /// Largest numerator or denominator accepted.
    pub const MAX_TERM: u32 = 1024;

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::NonpositiveParameter(format!("alpha = {num}/{den}")));
        }
        let g = num_integer::gcd(num, den);
        let e = Exponent { num: num / g, den: den / g };
        if e.num > Self::MAX_TERM || e.den > Self::MAX_TERM {
            return Err(Error::UnsupportedExponent(format!("{}/{}", e.num, e.den)));
        }
        Ok(e)
    }

    pub fn from_scalar<T: Scalar>(alpha: &T) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(Error::NonpositiveParameter(format!("alpha = {}", alpha.to_text())));
        }
        let exact = alpha.to_exact().ok_or_else(|| Error::UnsupportedExponent(alpha.to_text()))?;
        let too_big = || Error::UnsupportedExponent(alpha.to_text());
        let num = exact.numer().to_u32().ok_or_else(too_big)?;
        let den = exact.denom().to_u32().ok_or_else(too_big)?;
        Self::new(num, den)
    }

    pub fn value<T: Scalar>(&self) -> T {
        T::ratio(self.num as i64, self.den as i64)
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// `card^q − C^q·ratio^p` for `α = p/q`: positive iff `card > C·ratio^α`.
pub fn doubling_excess<T: Scalar>(card: usize, ratio: &T, c: &T, alpha: Exponent) -> T {
    let card = T::from_int(card as i64);
    ipow(&card, alpha.den) - ipow(c, alpha.den) * ipow(ratio, alpha.num)
}

/// `diam(A) / min_sep(A)` for a subset of at least two points.
pub fn spread_ratio<T: Scalar>(d: &FinMetric<T>, subset: &[usize]) -> T {
    let sep = d.min_sep_of(subset).expect("subset has two points");
    d.diam_of(subset) / sep
}

/// Scans subsets of size `max_subset` down to 2 for the largest
/// [`doubling_excess`]. Ties keep the larger subset, then the
/// lexicographically smaller one.
pub fn doubling_check<T: Scalar>(d: &FinMetric<T>, c: &T, alpha: &T, max_subset: usize) -> Result<DefectReport<T>> {
    if !c.is_positive() {
        return Err(Error::NonpositiveParameter(format!("C = {}", c.to_text())));
    }
    if max_subset < 2 {
        return Err(Error::NonpositiveParameter(format!("max_subset = {max_subset} (needs at least 2)")));
    }
    let alpha = Exponent::from_scalar(alpha)?;
    let n = d.len();
    let top = max_subset.min(n);
    let mut best: Option<Best<T>> = None;
    for k in (2..=top).rev() {
        let level = par_scan(n, |first| {
            let mut best = None;
            for_each_subset_from(n, k, first, |subset| {
                offer(&mut best, doubling_excess(k, &spread_ratio(d, subset), c, alpha), subset);
                true
            });
            best
        });
        if let Some(l) = level {
            if best.as_ref().is_none_or(|b| l.value > b.value) {
                best = Some(l);
            }
        }
    }
    let mut rep = report("doubling", d, best);
    rep.exhaustive = max_subset >= n;
    Ok(rep)
}

/// Smallest ratio `max gap / end-to-end distance` over injective chains.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulusReport<T> {
    pub modulus: T,
    /// A chain attaining the modulus.
    pub chain: Vec<String>,
    /// Whether chains of every length were allowed.
    pub exhaustive: bool,
}

/// Uniform-disconnectedness modulus over chains of at most `max_chain` points.
///
/// Computed by a min-bottleneck recursion on walks with a bounded number of
/// hops; a walk shortcuts to an injective chain without raising its largest
/// gap. The reported chain is optimal, though not necessarily the
/// lexicographically smallest optimal chain.
pub fn ud_modulus<T: Scalar>(d: &FinMetric<T>, max_chain: usize) -> Result<ModulusReport<T>> {
    let n = d.len();
    if n < 2 {
        return Err(Error::SpaceTooSmall);
    }
    if max_chain < 2 {
        return Err(Error::NonpositiveParameter(format!("max_chain = {max_chain} (needs at least 2)")));
    }
    let hops = max_chain.min(n) - 1;
    // layers[k][u*n+v]: best bottleneck over walks with at most k+1 hops
    // and the penultimate point used by the k-th layer (None = inherited)
    let mut layers: Vec<Vec<T>> = vec![(0..n * n).map(|i| d.d(i / n, i % n)).collect()];
    let mut via: Vec<Vec<Option<usize>>> = vec![vec![None; n * n]];
    for _ in 1..hops {
        let prev = layers.last().unwrap();
        let rows: Vec<(Vec<T>, Vec<Option<usize>>)> = (0..n)
            .into_par_iter()
            .map(|u| {
                let mut vals = Vec::with_capacity(n);
                let mut from = Vec::with_capacity(n);
                for v in 0..n {
                    let mut best = prev[u * n + v].clone();
                    let mut arg = None;
                    for w in 0..n {
                        if w == u || w == v {
                            continue;
                        }
                        let cand = smax(prev[u * n + w].clone(), d.d(w, v));
                        if cand < best {
                            best = cand;
                            arg = Some(w);
                        }
                    }
                    vals.push(best);
                    from.push(arg);
                }
                (vals, from)
            })
            .collect();
        let (vals, from): (Vec<Vec<T>>, Vec<Vec<Option<usize>>>) = rows.into_iter().unzip();
        layers.push(vals.concat());
        via.push(from.concat());
    }
    let last = layers.last().unwrap();
    let mut best: Option<(T, usize, usize)> = None;
    for u in 0..n {
        for v in u + 1..n {
            let r = last[u * n + v].clone() / d.d(u, v);
            if best.as_ref().is_none_or(|b| r < b.0) {
                best = Some((r, u, v));
            }
        }
    }
    let (modulus, u, v) = best.expect("at least one pair");
    let walk = unwind(&via, n, layers.len() - 1, u, v);
    let chain = shortcut(walk);
    Ok(ModulusReport {
        modulus,
        chain: chain.iter().map(|&i| d.label(i).to_string()).collect(),
        exhaustive: max_chain >= n,
    })
}

fn unwind(via: &[Vec<Option<usize>>], n: usize, layer: usize, u: usize, v: usize) -> Vec<usize> {
    let mut k = layer;
    loop {
        match via[k][u * n + v] {
            Some(w) => {
                let mut walk = unwind(via, n, k - 1, u, w);
                walk.push(v);
                return walk;
            }
            None if k == 0 => return vec![u, v],
            None => k -= 1,
        }
    }
}

/// Removes loops so that every point occurs once.
fn shortcut(walk: Vec<usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(walk.len());
    for p in walk {
        if let Some(pos) = out.iter().position(|&q| q == p) {
            out.truncate(pos + 1);
        } else {
            out.push(p);
        }
    }
    out
}

/// `max_i d(z_i, z_{i+1}) / d(z_1, z_N)` for a chain of at least two points.
pub fn chain_ratio<T: Scalar>(d: &FinMetric<T>, chain: &[usize]) -> T {
    let gap = chain
        .windows(2)
        .map(|w| d.d(w[0], w[1]))
        .fold(T::zero(), smax);
    gap / d.d(chain[0], chain[chain.len() - 1])
}

/// `⌊1/δ⌋` for `δ > 0`.
pub(crate) fn floor_reciprocal<T: Scalar>(delta: &T) -> Result<usize> {
    let exact = delta
        .to_exact()
        .filter(|v| v.is_positive())
        .ok_or_else(|| Error::NonpositiveParameter(format!("delta = {}", delta.to_text())))?;
    let floor: BigInt = (exact.recip()).floor().to_integer();
    floor
        .to_usize()
        .ok_or_else(|| Error::NonpositiveParameter(format!("delta = {}", delta.to_text())))
}
