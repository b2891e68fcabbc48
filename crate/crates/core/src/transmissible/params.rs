//! The registered parameters.

use num_traits::{Signed, ToPrimitive};

use super::cycl0::{self, Cycl0Options};
use super::defects::{chain_ratio, doubling_excess, floor_reciprocal, spread_ratio, Exponent};
use super::inequality::{cycle_canonical, Descriptor, Inequality};
use super::{anti_witness, SingularSpace, TransParam};
use crate::error::{Error, Result};
use crate::genericity::catalog::starter_catalog;
use crate::metric::FinMetric;
use crate::scalar::{smax, Scalar};
use crate::tuples::{nonnegative_rationals, rational_pairs};

/// Representative of a 4-tuple under the symmetries of the diagonal
/// pairing `{a1,a3}`, `{a2,a4}`.
fn diagonal_canonical(a: &[usize]) -> bool {
    a[0] < a[1] && a[0] < a[2] && a[0] < a[3] && a[1] < a[3]
}

/// Scales `space` to diameter `eps`.
fn scaled_to<T: Scalar>(space: &FinMetric<T>, eps: &T) -> Result<FinMetric<T>> {
    if !eps.is_positive() {
        return Err(Error::NonpositiveParameter(format!("eps = {}", eps.to_text())));
    }
    let diam = space.diameter();
    if diam.is_zero() {
        return Ok(space.clone());
    }
    space.scale(&(eps.clone() / diam))
}

/// Grows `space` to `size` points by repeatedly adding a twin of the last
/// point at half the current minimal separation.
pub fn pad<T: Scalar>(space: FinMetric<T>, size: usize) -> Result<FinMetric<T>> {
    let mut space = space;
    let mut k = 0;
    while space.len() < size {
        let n = space.len();
        let sep = space.min_sep_of(&(0..n).collect::<Vec<_>>()).ok_or(Error::SpaceTooSmall)?;
        let last = n - 1;
        let mut labels = space.labels().to_vec();
        let mut fresh = format!("{}+{k}", space.label(last));
        while labels.contains(&fresh) {
            k += 1;
            fresh = format!("{}+{k}", space.label(last));
        }
        labels.push(fresh);
        let old = space.clone();
        space = FinMetric::from_fn(labels, |i, j| {
            let i = i.min(last);
            if j == n && i == last {
                sep.half()
            } else {
                old.d(i, j.min(last))
            }
        })?;
        k += 1;
    }
    Ok(space)
}

fn stored_violator<T: Scalar>(stored: FinMetric<T>, eps: &T, size: Option<usize>) -> Result<SingularSpace<T, ()>> {
    let arity = stored.len();
    let space = scaled_to(&stored, eps)?;
    let space = pad(space, size.unwrap_or(arity))?;
    Ok(SingularSpace { space, tuple: (0..arity).collect(), z: () })
}

fn names(prefix: &str, k: usize) -> Vec<String> {
    (0..k).map(|i| format!("{prefix}{i}")).collect()
}

/// `max(d12, d23) ≥ d13`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Ultrametric;

impl<T: Scalar> TransParam<T> for Ultrametric {
    type Q = ();
    type Z = ();
    type P = T;

    fn name(&self) -> String {
        "ultrametric".into()
    }

    fn q_enum(&self) -> Box<dyn Iterator<Item = ()> + '_> {
        Box::new(std::iter::once(()))
    }

    fn q_is_finite(&self) -> bool {
        true
    }

    fn arity(&self, _q: &(), points: usize) -> Vec<usize> {
        if points >= 3 {
            vec![3]
        } else {
            vec![]
        }
    }

    fn z_strategy(&self, _q: &(), _a: &[usize], _d: &FinMetric<T>) -> Vec<()> {
        vec![()]
    }

    fn phi(&self, _q: &(), a: &[usize], _z: &(), d: &FinMetric<T>) -> T {
        Descriptor::Ultrametric.value(d, a)
    }

    fn in_target(&self, _q: &(), p: &T) -> bool {
        !p.is_negative()
    }

    fn canonical(&self, a: &[usize]) -> bool {
        a[0] < a[2]
    }

    fn singular(&self) -> bool {
        true
    }

    fn singular_space(&self, _q: &(), eps: &T, size: Option<usize>) -> Result<SingularSpace<T, ()>> {
        let line = FinMetric::line(&[T::zero(), eps.half(), eps.clone()])?;
        let space = pad(line, size.unwrap_or(3))?;
        Ok(SingularSpace { space, tuple: vec![0, 1, 2], z: () })
    }
}

/// `d12·d34 + d14·d23 ≥ d13·d24`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Ptolemy;

impl<T: Scalar> TransParam<T> for Ptolemy {
    type Q = ();
    type Z = ();
    type P = T;

    fn name(&self) -> String {
        "ptolemy".into()
    }

    fn q_enum(&self) -> Box<dyn Iterator<Item = ()> + '_> {
        Box::new(std::iter::once(()))
    }

    fn q_is_finite(&self) -> bool {
        true
    }

    fn arity(&self, _q: &(), points: usize) -> Vec<usize> {
        if points >= 4 {
            vec![4]
        } else {
            vec![]
        }
    }

    fn z_strategy(&self, _q: &(), _a: &[usize], _d: &FinMetric<T>) -> Vec<()> {
        vec![()]
    }

    fn phi(&self, _q: &(), a: &[usize], _z: &(), d: &FinMetric<T>) -> T {
        Descriptor::Ptolemy.value(d, a)
    }

    fn in_target(&self, _q: &(), p: &T) -> bool {
        !p.is_negative()
    }

    fn canonical(&self, a: &[usize]) -> bool {
        diagonal_canonical(a)
    }

    fn singular(&self) -> bool {
        true
    }

    fn singular_space(&self, _q: &(), eps: &T, size: Option<usize>) -> Result<SingularSpace<T, ()>> {
        let c4 = FinMetric::from_fn(names("c", 4), |i, j| if (j - i) % 2 == 1 { T::one() } else { T::two() })?;
        stored_violator(c4, eps, size)
    }
}

/// Four-point condition with constant `q = δ`, one parameter per `δ ≥ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Hyperbolicity;

impl<T: Scalar> TransParam<T> for Hyperbolicity {
    type Q = T;
    type Z = ();
    type P = T;

    fn name(&self) -> String {
        "hyperbolicity".into()
    }

    fn q_enum(&self) -> Box<dyn Iterator<Item = T> + '_> {
        Box::new(nonnegative_rationals().map(|(p, q)| T::ratio(p as i64, q as i64)))
    }

    fn q_is_finite(&self) -> bool {
        false
    }

    fn arity(&self, _q: &T, points: usize) -> Vec<usize> {
        if points >= 4 {
            vec![4]
        } else {
            vec![]
        }
    }

    fn z_strategy(&self, _q: &T, _a: &[usize], _d: &FinMetric<T>) -> Vec<()> {
        vec![()]
    }

    fn phi(&self, q: &T, a: &[usize], _z: &(), d: &FinMetric<T>) -> T {
        Descriptor::Hyperbolicity { delta: q.clone() }.value(d, a)
    }

    fn in_target(&self, _q: &T, p: &T) -> bool {
        !p.is_negative()
    }

    fn canonical(&self, a: &[usize]) -> bool {
        diagonal_canonical(a)
    }
}

/// A user inequality `f ≥ 0`. Singular when a catalog space violates it
/// and the violation survives scaling.
#[derive(Debug, Clone)]
pub struct InequalityParam<T>(pub Inequality<T>);

impl<T: Scalar> TransParam<T> for InequalityParam<T> {
    type Q = ();
    type Z = ();
    type P = T;

    fn name(&self) -> String {
        self.0.text.clone()
    }

    fn q_enum(&self) -> Box<dyn Iterator<Item = ()> + '_> {
        Box::new(std::iter::once(()))
    }

    fn q_is_finite(&self) -> bool {
        true
    }

    fn arity(&self, _q: &(), points: usize) -> Vec<usize> {
        if points >= self.0.n {
            vec![self.0.n]
        } else {
            vec![]
        }
    }

    fn z_strategy(&self, _q: &(), _a: &[usize], _d: &FinMetric<T>) -> Vec<()> {
        vec![()]
    }

    fn phi(&self, _q: &(), a: &[usize], _z: &(), d: &FinMetric<T>) -> T {
        self.0.value(d, a)
    }

    fn in_target(&self, _q: &(), p: &T) -> bool {
        !p.is_negative()
    }

    fn singular(&self) -> bool {
        self.singular_space(&(), &T::one(), None).is_ok()
    }

    fn singular_space(&self, q: &(), eps: &T, size: Option<usize>) -> Result<SingularSpace<T, ()>> {
        for space in starter_catalog::<T>().into_iter().filter(|s| s.len() == self.0.n) {
            let Some(w) = anti_witness(self, &space, q)? else { continue };
            let ordered = space.reordered(&w.tuple)?;
            let scaled = scaled_to(&ordered, eps)?;
            let tuple: Vec<usize> = (0..self.0.n).collect();
            if !self.in_target(q, &self.phi(q, &tuple, &(), &scaled)) {
                return Ok(SingularSpace { space: pad(scaled, size.unwrap_or(self.0.n))?, tuple, z: () });
            }
        }
        Err(Error::NotSingular(self.name()))
    }
}

/// Parameter `(C, α)` of the doubling condition.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublingQ<T> {
    pub c: T,
    pub alpha: Exponent,
}

/// `card(A) ≤ C·(diam A / min_sep A)^α` for subsets of at most
/// `max_subset` points.
#[derive(Debug, Clone, Copy)]
pub struct Doubling {
    pub max_subset: usize,
}

impl Default for Doubling {
    fn default() -> Self {
        Doubling { max_subset: usize::MAX }
    }
}

impl<T: Scalar> TransParam<T> for Doubling {
    type Q = DoublingQ<T>;
    type Z = ();
    /// Subset size and spread ratio.
    type P = (usize, T);

    fn name(&self) -> String {
        "doubling".into()
    }

    fn q_enum(&self) -> Box<dyn Iterator<Item = DoublingQ<T>> + '_> {
        Box::new(rational_pairs().map(|((cp, cq), (ap, aq))| DoublingQ {
            c: T::ratio(cp as i64, cq as i64),
            alpha: Exponent::new(ap as u32, aq as u32).expect("small exponent"),
        }))
    }

    fn q_is_finite(&self) -> bool {
        false
    }

    fn arity(&self, _q: &DoublingQ<T>, points: usize) -> Vec<usize> {
        (2..=self.max_subset.min(points)).rev().collect()
    }

    fn z_strategy(&self, _q: &DoublingQ<T>, _a: &[usize], _d: &FinMetric<T>) -> Vec<()> {
        vec![()]
    }

    fn phi(&self, _q: &DoublingQ<T>, a: &[usize], _z: &(), d: &FinMetric<T>) -> (usize, T) {
        (a.len(), spread_ratio(d, a))
    }

    fn in_target(&self, q: &DoublingQ<T>, p: &(usize, T)) -> bool {
        !doubling_excess(p.0, &p.1, &q.c, q.alpha).is_positive()
    }

    fn order_free(&self) -> bool {
        true
    }

    fn scan_is_exhaustive(&self, _q: &DoublingQ<T>, points: usize) -> bool {
        self.max_subset >= points
    }

    fn singular(&self) -> bool {
        true
    }

    /// Equilateral space on `⌈C⌉ + 2` points.
    fn singular_space(&self, q: &DoublingQ<T>, eps: &T, size: Option<usize>) -> Result<SingularSpace<T, ()>> {
        let ceil = q
            .c
            .to_exact()
            .filter(|c| c.is_positive())
            .and_then(|c| c.ceil().to_integer().to_usize())
            .ok_or_else(|| Error::NonpositiveParameter(format!("C = {}", q.c.to_text())))?;
        let k = size.unwrap_or(0).max(ceil + 2);
        if k > self.max_subset {
            return Err(Error::TooLarge(k, self.max_subset));
        }
        if !eps.is_positive() {
            return Err(Error::NonpositiveParameter(format!("eps = {}", eps.to_text())));
        }
        let space = FinMetric::equilateral(names("e", k), eps.clone())?;
        Ok(SingularSpace { space, tuple: (0..k).collect(), z: () })
    }
}

/// No injective chain has every gap below `δ` times its end-to-end
/// distance; one parameter per `δ = 1/k`, `k ≥ 2`.
#[derive(Debug, Clone, Copy)]
pub struct UniformDisconnected {
    pub max_chain: usize,
}

impl Default for UniformDisconnected {
    fn default() -> Self {
        UniformDisconnected { max_chain: usize::MAX }
    }
}

impl<T: Scalar> TransParam<T> for UniformDisconnected {
    type Q = T;
    type Z = ();
    /// Largest gap and end-to-end distance.
    type P = (T, T);

    fn name(&self) -> String {
        "uniform-disconnectedness".into()
    }

    fn q_enum(&self) -> Box<dyn Iterator<Item = T> + '_> {
        Box::new((2i64..).map(|k| T::ratio(1, k)))
    }

    fn q_is_finite(&self) -> bool {
        false
    }

    fn arity(&self, _q: &T, points: usize) -> Vec<usize> {
        (2..=self.max_chain.min(points)).collect()
    }

    fn z_strategy(&self, _q: &T, _a: &[usize], _d: &FinMetric<T>) -> Vec<()> {
        vec![()]
    }

    fn phi(&self, _q: &T, a: &[usize], _z: &(), d: &FinMetric<T>) -> (T, T) {
        let gap = a.windows(2).map(|w| d.d(w[0], w[1])).fold(T::zero(), smax);
        (gap, d.d(a[0], a[a.len() - 1]))
    }

    fn in_target(&self, q: &T, p: &(T, T)) -> bool {
        p.0 >= q.clone() * p.1.clone()
    }

    fn canonical(&self, a: &[usize]) -> bool {
        a[0] < a[a.len() - 1]
    }

    fn scan_is_exhaustive(&self, _q: &T, points: usize) -> bool {
        self.max_chain >= points
    }

    fn singular(&self) -> bool {
        true
    }

    /// The arithmetic chain `{ε·i/n}` with `1/n < δ`.
    fn singular_space(&self, q: &T, eps: &T, size: Option<usize>) -> Result<SingularSpace<T, ()>> {
        let n = floor_reciprocal(q)? + 1;
        let k = size.unwrap_or(0).max(n + 1);
        if k > self.max_chain {
            return Err(Error::TooLarge(k, self.max_chain));
        }
        if !eps.is_positive() {
            return Err(Error::NonpositiveParameter(format!("eps = {}", eps.to_text())));
        }
        let steps = (k - 1) as i64;
        let points: Vec<T> = (0..k as i64).map(|i| eps.clone() * T::ratio(i, steps)).collect();
        let space = FinMetric::line(&points)?;
        debug_assert!(chain_ratio(&space, &(0..k).collect::<Vec<_>>()) < q.clone());
        Ok(SingularSpace { space, tuple: (0..k).collect(), z: () })
    }
}

/// Planar realizability of `m`-cycles. The evaluator is the solver's best
/// smallest slack, so verdicts inherit its heuristic nature.
#[derive(Debug, Clone)]
pub struct Cycl0 {
    pub m: usize,
    pub options: Cycl0Options,
}

impl<T: Scalar> TransParam<T> for Cycl0 {
    type Q = ();
    type Z = ();
    type P = f64;

    fn name(&self) -> String {
        format!("cycl0(m={})", self.m)
    }

    fn q_enum(&self) -> Box<dyn Iterator<Item = ()> + '_> {
        Box::new(std::iter::once(()))
    }

    fn q_is_finite(&self) -> bool {
        true
    }

    fn arity(&self, _q: &(), points: usize) -> Vec<usize> {
        if points >= self.m && self.m >= 3 {
            vec![self.m]
        } else {
            vec![]
        }
    }

    fn z_strategy(&self, _q: &(), _a: &[usize], _d: &FinMetric<T>) -> Vec<()> {
        vec![()]
    }

    fn phi(&self, _q: &(), a: &[usize], _z: &(), d: &FinMetric<T>) -> f64 {
        cycl0::cycl0_check_idx(d, a, &self.options).expect("valid cycle").min_slack()
    }

    fn in_target(&self, _q: &(), p: &f64) -> bool {
        *p >= -self.options.tol
    }

    fn canonical(&self, a: &[usize]) -> bool {
        cycle_canonical(a)
    }
}
