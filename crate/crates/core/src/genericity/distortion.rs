//! Labeled distortion between equal-size spaces, optimal rescaling, and the
//! search for rescaled copies of a target inside a space.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::FinMetric;
use crate::scalar::{smax, Scalar};
use crate::transmissible::{SingularSpace, TransParam};
use crate::tuples::{diagonal_pairs, for_each_subset};

/// Largest space accepted by the permutation scans.
pub const MAX_PERMUTATION_POINTS: usize = 9;

/// A bijection from the target's points (by index) into the source.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching<T> {
    pub distortion: T,
    /// `sigma[i]` is the source index matched with target point `i`.
    pub sigma: Vec<usize>,
}

fn check_sizes(a: usize, f: usize) -> Result<()> {
    if a != f {
        return Err(Error::CardinalityMismatch(a, f));
    }
    if a > MAX_PERMUTATION_POINTS {
        return Err(Error::TooLarge(a, MAX_PERMUTATION_POINTS));
    }
    Ok(())
}

/// `max_{i<j} |dA(σi, σj) − dF(i, j)|` minimized over bijections σ; the
/// lexicographically smallest optimal σ is returned.
pub fn min_distortion<T: Scalar>(da: &FinMetric<T>, df: &FinMetric<T>) -> Result<Matching<T>> {
    check_sizes(da.len(), df.len())?;
    let n = da.len();
    let mut best: Option<Matching<T>> = None;
    let mut sigma = Vec::with_capacity(n);
    let mut used = vec![false; n];
    permute(n, &mut sigma, &mut used, &mut best, &|sigma: &[usize], k: usize| {
        // distortion added by placing target point k
        (0..k).map(|i| (da.d(sigma[i], sigma[k]) - df.d(i, k)).abs()).fold(T::zero(), smax)
    }, T::zero());
    Ok(best.unwrap_or(Matching { distortion: T::zero(), sigma: vec![] }))
}

/// Depth-first scan of bijections in lexicographic order, pruning any
/// prefix that cannot strictly improve on the best so far.
fn permute<T: Scalar>(
    n: usize,
    sigma: &mut Vec<usize>,
    used: &mut [bool],
    best: &mut Option<Matching<T>>,
    step: &impl Fn(&[usize], usize) -> T,
    partial: T,
) {
    if best.as_ref().is_some_and(|b| partial >= b.distortion) {
        return;
    }
    let k = sigma.len();
    if k == n {
        *best = Some(Matching { distortion: partial, sigma: sigma.clone() });
        return;
    }
    for s in 0..n {
        if used[s] {
            continue;
        }
        used[s] = true;
        sigma.push(s);
        let next = smax(partial.clone(), step(sigma, k));
        permute(n, sigma, used, best, step, next);
        sigma.pop();
        used[s] = false;
    }
}

/// Optimal rescaling of the source onto the target for a fixed matching.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleFit<T> {
    /// The scale `z`; the source is compared as `z^{-1}·dA`.
    pub z: T,
    pub distortion: T,
}

/// Pairwise source and target distances under `sigma`.
fn paired<T: Scalar>(da: &FinMetric<T>, df: &FinMetric<T>, sigma: &[usize]) -> Vec<(T, T)> {
    let n = df.len();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| (da.d(sigma[i], sigma[j]), df.d(i, j)))
        .collect()
}

/// Least `t ≥ 0` such that some `w` has `|w·a_p − b_p| ≤ t` for every pair:
/// the interval constraints `(b_p − t)/a_p ≤ w ≤ (b_q + t)/a_q` are
/// compatible exactly when `t·(a_p + a_q) ≥ b_p·a_q − b_q·a_p`.
fn optimal_t<T: Scalar>(pairs: &[(T, T)]) -> T {
    let mut t = T::zero();
    for (ap, bp) in pairs {
        for (aq, bq) in pairs {
            let cand = (bp.clone() * aq.clone() - bq.clone() * ap.clone()) / (ap.clone() + aq.clone());
            t = smax(t, cand);
        }
    }
    t
}

fn fit<T: Scalar>(pairs: &[(T, T)]) -> Result<ScaleFit<T>> {
    if pairs.is_empty() {
        return Ok(ScaleFit { z: T::one(), distortion: T::zero() });
    }
    if pairs.iter().any(|(a, _)| !a.is_positive()) {
        return Err(Error::DegenerateTarget);
    }
    let t = optimal_t(pairs);
    // smallest optimal w, i.e. the largest optimal z
    let w = pairs
        .iter()
        .map(|(a, b)| (b.clone() - t.clone()) / a.clone())
        .reduce(smax)
        .expect("nonempty");
    if !w.is_positive() {
        return Err(Error::DegenerateTarget);
    }
    Ok(ScaleFit { z: T::one() / w, distortion: t })
}

/// `z` minimizing `max_{i<j} |z^{-1}·dA(σi, σj) − dF(i, j)|`, exactly.
pub fn best_scale<T: Scalar>(da: &FinMetric<T>, df: &FinMetric<T>, sigma: &[usize]) -> Result<ScaleFit<T>> {
    if da.len() != df.len() {
        return Err(Error::CardinalityMismatch(da.len(), df.len()));
    }
    check_bijection(sigma, da.len())?;
    fit(&paired(da, df, sigma))
}

fn check_bijection(sigma: &[usize], n: usize) -> Result<()> {
    if sigma.len() != n {
        return Err(Error::CardinalityMismatch(sigma.len(), n));
    }
    let mut seen = vec![false; n];
    for &s in sigma {
        if s >= n || seen[s] {
            return Err(Error::TupleNotInjective);
        }
        seen[s] = true;
    }
    Ok(())
}

/// `max_{i<j} |z^{-1}·d(a_i, a_j) − dF(i, j)|` for a tuple `a` of `d`.
pub fn scaled_distortion<T: Scalar>(d: &FinMetric<T>, a: &[usize], df: &FinMetric<T>, z: &T) -> T {
    let n = a.len();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| (d.d(a[i], a[j]) / z.clone() - df.d(i, j)).abs())
        .fold(T::zero(), smax)
}

/// Joint minimum over bijections and scales for one subset of `d`.
fn best_over_matchings<T: Scalar>(d: &FinMetric<T>, subset: &[usize], df: &FinMetric<T>) -> (T, Vec<usize>, T) {
    let n = subset.len();
    let sub = d.restrict_idx(subset);
    let mut best: Option<Matching<T>> = None;
    let mut sigma = Vec::with_capacity(n);
    let mut used = vec![false; n];
    // the optimal t over the pairs placed so far bounds the final t from below
    permute(n, &mut sigma, &mut used, &mut best, &|sigma: &[usize], k: usize| {
        let n = k + 1;
        let pairs: Vec<(T, T)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| (sub.d(sigma[i], sigma[j]), df.d(i, j)))
            .collect();
        optimal_t(&pairs)
    }, T::zero());
    let m = best.expect("at least one bijection");
    let fit = fit(&paired(&sub, df, &m.sigma)).expect("metric distances are positive");
    let sigma = m.sigma.iter().map(|&s| subset[s]).collect();
    (fit.distortion, sigma, fit.z)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RichnessQuery<T: Scalar> {
    pub target: FinMetric<T>,
    pub epsilon: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RichnessReport<T> {
    /// Whether some subset came within `epsilon` of the target.
    pub found: bool,
    /// Source labels matched with the target's points, in target order.
    pub matched: Vec<String>,
    pub z: T,
    pub distortion: T,
    pub subsets_scanned: usize,
    /// Whether every subset of the right size was scanned.
    pub exhaustive: bool,
}

const CHUNK: usize = 1024;

/// Scans subsets of the target's size in lexicographic order (at most
/// `subset_budget` of them) for the smallest distortion over matchings and
/// scales. Returns the first subset below `epsilon`, otherwise the best seen
/// (earliest on ties).
pub fn richness_search<T: Scalar>(
    d: &FinMetric<T>,
    query: &RichnessQuery<T>,
    subset_budget: Option<usize>,
) -> Result<RichnessReport<T>> {
    let k = query.target.len();
    let n = d.len();
    if k > n {
        return Err(Error::TargetTooLarge { target: k, space: n });
    }
    if k > MAX_PERMUTATION_POINTS {
        return Err(Error::TooLarge(k, MAX_PERMUTATION_POINTS));
    }
    if !query.epsilon.is_positive() {
        return Err(Error::NonpositiveParameter(format!("epsilon = {}", query.epsilon.to_text())));
    }
    let budget = subset_budget.unwrap_or(usize::MAX);
    let mut best: Option<(T, Vec<usize>, T)> = None;
    let mut scanned = 0usize;
    let mut chunk: Vec<Vec<usize>> = Vec::with_capacity(CHUNK);
    let mut complete = true;
    let mut hit = false;

    let flush = |chunk: &mut Vec<Vec<usize>>, best: &mut Option<(T, Vec<usize>, T)>| -> bool {
        let results: Vec<(T, Vec<usize>, T)> =
            chunk.par_iter().map(|s| best_over_matchings(d, s, &query.target)).collect();
        chunk.clear();
        for r in results {
            if r.0 < query.epsilon {
                *best = Some(r);
                return true;
            }
            if best.as_ref().is_none_or(|b| r.0 < b.0) {
                *best = Some(r);
            }
        }
        false
    };

    for_each_subset(n, k, |s| {
        if scanned == budget {
            complete = false;
            return false;
        }
        scanned += 1;
        chunk.push(s.to_vec());
        if chunk.len() == CHUNK && flush(&mut chunk, &mut best) {
            hit = true;
            return false;
        }
        true
    });
    if !hit && !chunk.is_empty() {
        hit = flush(&mut chunk, &mut best);
    }
    let (distortion, sigma, z) = best.unwrap_or((T::zero(), vec![], T::one()));
    Ok(RichnessReport {
        found: hit,
        matched: sigma.iter().map(|&i| d.label(i).to_string()).collect(),
        z,
        distortion,
        subsets_scanned: scanned,
        exhaustive: complete,
    })
}

/// Rich pseudo-cones: for target `n` and precision `m`, tuples of the
/// target's size rescaled by `z` must stay at distortion `≥ 2^{-m}`.
#[derive(Debug, Clone)]
pub struct Richness<T: Scalar> {
    pub targets: Vec<FinMetric<T>>,
}

impl<T: Scalar> Richness<T> {
    pub fn precision(m: u32) -> T {
        T::one() / crate::scalar::ipow(&T::two(), m)
    }
}

impl<T: Scalar> TransParam<T> for Richness<T> {
    /// Target index and precision exponent `m ≥ 1`.
    type Q = (usize, u32);
    type Z = T;
    type P = T;

    fn name(&self) -> String {
        "richness".into()
    }

    fn q_enum(&self) -> Box<dyn Iterator<Item = (usize, u32)> + '_> {
        if self.targets.is_empty() {
            return Box::new(std::iter::empty());
        }
        Box::new(diagonal_pairs(self.targets.len()).map(|(n, j)| (n, j as u32 + 1)))
    }

    fn q_is_finite(&self) -> bool {
        self.targets.is_empty()
    }

    fn arity(&self, q: &(usize, u32), points: usize) -> Vec<usize> {
        let k = self.targets[q.0].len();
        if k <= points {
            vec![k]
        } else {
            vec![]
        }
    }

    /// The optimal scale for the tuple; it minimizes `phi` over all `z`.
    fn z_strategy(&self, q: &(usize, u32), a: &[usize], d: &FinMetric<T>) -> Vec<T> {
        let pairs: Vec<(T, T)> = {
            let df = &self.targets[q.0];
            let n = a.len();
            (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| (d.d(a[i], a[j]), df.d(i, j)))
                .collect()
        };
        fit(&pairs).map(|f| vec![f.z]).unwrap_or_default()
    }

    fn phi(&self, q: &(usize, u32), a: &[usize], z: &T, d: &FinMetric<T>) -> T {
        scaled_distortion(d, a, &self.targets[q.0], z)
    }

    fn in_target(&self, q: &(usize, u32), p: &T) -> bool {
        *p >= Self::precision(q.1)
    }

    fn singular(&self) -> bool {
        true
    }

    /// The target itself scaled to diameter `eps`, seen at scale
    /// `z = eps/diam(F)`.
    fn singular_space(&self, q: &(usize, u32), eps: &T, size: Option<usize>) -> Result<SingularSpace<T, T>> {
        if !eps.is_positive() {
            return Err(Error::NonpositiveParameter(format!("eps = {}", eps.to_text())));
        }
        let target = self.targets.get(q.0).ok_or_else(|| Error::NotSingular(self.name()))?;
        let k = target.len();
        if size.is_some_and(|s| s != k) {
            return Err(Error::CardinalityMismatch(size.unwrap_or(k), k));
        }
        let diam = target.diameter();
        let (space, z) = if diam.is_zero() {
            (target.clone(), T::one())
        } else {
            {
            let z = eps.clone() / diam;
            (target.scale(&z)?, z)
        }
        };
        Ok(SingularSpace { space, tuple: (0..k).collect(), z })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational as Q;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("p{i}")).collect()
    }

    fn path3() -> FinMetric<Q> {
        FinMetric::line(&[rat(0, 1), rat(1, 1), rat(2, 1)]).unwrap()
    }

    #[test]
    fn distortion_examples() {
        let d = path3();
        let m = min_distortion(&d, &d).unwrap();
        assert_eq!(m.distortion, rat(0, 1));
        assert_eq!(m.sigma, vec![0, 1, 2]);
        let shuffled = d.reordered(&["2", "0", "1"]).unwrap();
        assert_eq!(min_distortion(&shuffled, &d).unwrap().distortion, rat(0, 1));
        let one = FinMetric::equilateral(names(2), rat(1, 1)).unwrap();
        let two = FinMetric::equilateral(names(2), rat(2, 1)).unwrap();
        assert_eq!(min_distortion(&one, &two).unwrap().distortion, rat(1, 1));
        assert_eq!(min_distortion(&one, &d), Err(Error::CardinalityMismatch(2, 3)));
        let big = FinMetric::equilateral(names(10), rat(1, 1)).unwrap();
        assert_eq!(min_distortion(&big, &big), Err(Error::TooLarge(10, 9)));
    }

    #[test]
    fn scale_examples() {
        let d = path3();
        let scaled = d.scale(&rat(3, 1)).unwrap();
        let f = best_scale(&scaled, &d, &[0, 1, 2]).unwrap();
        assert_eq!(f, ScaleFit { z: rat(3, 1), distortion: rat(0, 1) });

        let eps = rat(1, 5);
        let eq = FinMetric::equilateral(names(3), eps.clone()).unwrap();
        let f = best_scale(&eq, &d, &[0, 1, 2]).unwrap();
        assert_eq!(f.distortion, rat(1, 2));
        assert_eq!(eps / f.z, rat(3, 2));

        let a = FinMetric::equilateral(names(2), rat(5, 1)).unwrap();
        let b = FinMetric::equilateral(names(2), rat(2, 1)).unwrap();
        assert_eq!(best_scale(&a, &b, &[0, 1]).unwrap(), ScaleFit { z: rat(5, 2), distortion: rat(0, 1) });
        assert!(best_scale(&a, &b, &[0, 0]).is_err());
    }

    #[test]
    fn richness_examples() {
        let pair = FinMetric::equilateral(names(2), rat(1, 1)).unwrap();
        let d = FinMetric::line(&[rat(0, 1), rat(3, 1), rat(7, 1)]).unwrap();
        let q = RichnessQuery { target: pair, epsilon: rat(1, 100) };
        let r = richness_search(&d, &q, None).unwrap();
        assert!(r.found);
        assert_eq!(r.distortion, rat(0, 1));
        assert_eq!(r.z, rat(3, 1));

        let eq = FinMetric::equilateral(names(5), rat(1, 1)).unwrap();
        let q = RichnessQuery { target: path3(), epsilon: rat(1, 4) };
        let r = richness_search(&eq, &q, None).unwrap();
        assert!(!r.found);
        assert!(r.exhaustive);
        assert_eq!(r.distortion, rat(1, 2));
        assert_eq!(r.subsets_scanned, 10);

        let r = richness_search(&eq, &q, Some(3)).unwrap();
        assert!(!r.exhaustive);
        assert_eq!(r.subsets_scanned, 3);
        let big = RichnessQuery { target: eq.clone(), epsilon: rat(1, 4) };
        assert!(matches!(richness_search(&path3(), &big, None), Err(Error::TargetTooLarge { .. })));
    }

    #[test]
    fn geometric_line_contains_every_pair_scale() {
        let pts: Vec<Q> = (0..6).map(|i| rat(1, 1 << i)).collect();
        let d = FinMetric::line(&pts).unwrap();
        let pair = FinMetric::equilateral(names(2), rat(1, 1)).unwrap();
        let r = richness_search(&d, &RichnessQuery { target: pair, epsilon: rat(1, 1000) }, None).unwrap();
        assert!(r.found);
        let i = d.indices_of(&r.matched).unwrap();
        assert_eq!(r.z, d.d(i[0], i[1]));
    }

    #[test]
    fn richness_parameter() {
        let p = Richness { targets: vec![path3()] };
        let eq = FinMetric::equilateral(names(4), rat(1, 1)).unwrap();
        assert!(crate::transmissible::anti_witness(&p, &eq, &(0, 1)).unwrap().is_none());
        let s = p.singular_space(&(0, 3), &rat(1, 8), None).unwrap();
        assert_eq!(s.space.diameter(), rat(1, 8));
        assert_eq!(p.phi(&(0, 3), &s.tuple, &s.z, &s.space), rat(0, 1));
    }
}
