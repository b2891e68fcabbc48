//! Transmissible parameters: properties decided by an evaluator on finite
//! injective tuples, together with their anti-property certificates.

pub mod cycl0;
pub mod defects;
pub mod inequality;
pub mod params;

use std::fmt::Debug;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::FinMetric;
use crate::scalar::Scalar;
use crate::tuples::{for_each_injective_from, for_each_subset_from};

pub use cycl0::{cycl0_check, Cycl0Options, Cycl0Outcome};
pub use defects::{
    doubling_check, hyperbolicity_delta, ptolemy_defect, ud_modulus, ultrametric_defect, DefectReport, Exponent,
    ModulusReport,
};
pub use inequality::{check_inequality, subhomogeneity_probe, Descriptor, Expr, Inequality, ProbeReport};
pub use params::{Cycl0, Doubling, DoublingQ, Hyperbolicity, InequalityParam, Ptolemy, Ultrametric, UniformDisconnected};

/// A space on which a parameter fails, sized to order.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpace<T: Scalar, Z> {
    pub space: FinMetric<T>,
    /// Indices of the violating tuple within `space`.
    pub tuple: Vec<usize>,
    pub z: Z,
}

/// A transmissible parameter: an enumerable index set `Q`, admissible tuple
/// sizes per index, auxiliary values `Z`, an evaluator into `P` that only
/// looks at the tuple's points, and a target set per index.
pub trait TransParam<T: Scalar>: Sync {
    type Q: Clone + Debug + Send + Sync;
    type Z: Clone + Debug + Send + Sync;
    type P: Clone + Debug + PartialEq + Send;

    fn name(&self) -> String;

    fn q_enum(&self) -> Box<dyn Iterator<Item = Self::Q> + '_>;

    /// Whether `q_enum` is finite.
    fn q_is_finite(&self) -> bool;

    /// Admissible tuple sizes not exceeding `points`, in scan order.
    fn arity(&self, q: &Self::Q, points: usize) -> Vec<usize>;

    /// Auxiliary values to try for the tuple `a`; may only depend on `d`
    /// restricted to `a`.
    fn z_strategy(&self, q: &Self::Q, a: &[usize], d: &FinMetric<T>) -> Vec<Self::Z>;

    fn phi(&self, q: &Self::Q, a: &[usize], z: &Self::Z, d: &FinMetric<T>) -> Self::P;

    fn in_target(&self, q: &Self::Q, p: &Self::P) -> bool;

    /// `phi` ignores the order of the tuple, so sorted tuples suffice.
    fn order_free(&self) -> bool {
        false
    }

    /// Whether `a` is the lexicographically smallest tuple among those with
    /// the same `phi` by symmetry; scans skip the others.
    fn canonical(&self, _a: &[usize]) -> bool {
        true
    }

    /// Whether the admissible sizes cover every tuple of a `points`-point space.
    fn scan_is_exhaustive(&self, _q: &Self::Q, _points: usize) -> bool {
        true
    }

    fn singular(&self) -> bool {
        false
    }

    /// A violating space of diameter at most `eps`, with `size` points when
    /// given (at least the minimal violating size).
    fn singular_space(&self, _q: &Self::Q, _eps: &T, _size: Option<usize>) -> Result<SingularSpace<T, Self::Z>> {
        Err(Error::NotSingular(self.name()))
    }
}

/// An anti-property certificate: `phi(q, tuple, z)` lies outside the target.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<Q, Z, P> {
    pub q: Q,
    pub z: Z,
    pub tuple: Vec<String>,
    pub value: P,
}

pub type WitnessOf<T, W> = Witness<<W as TransParam<T>>::Q, <W as TransParam<T>>::Z, <W as TransParam<T>>::P>;

/// The first tuple (sizes in arity order, tuples lexicographic, then
/// `z_strategy` order) whose value misses the target.
pub fn anti_witness<T: Scalar, W: TransParam<T>>(
    param: &W,
    d: &FinMetric<T>,
    q: &W::Q,
) -> Result<Option<WitnessOf<T, W>>> {
    let n = d.len();
    let sizes = param.arity(q, n);
    if sizes.is_empty() {
        return Err(Error::ArityExceedsSpace { points: n });
    }
    for k in sizes {
        let found = (0..n).into_par_iter().find_map_first(|first| {
            let mut hit = None;
            let mut visit = |a: &[usize]| {
                if !param.canonical(a) {
                    return true;
                }
                for z in param.z_strategy(q, a, d) {
                    let p = param.phi(q, a, &z, d);
                    if !param.in_target(q, &p) {
                        hit = Some((a.to_vec(), z, p));
                        return false;
                    }
                }
                true
            };
            if param.order_free() {
                for_each_subset_from(n, k, first, &mut visit);
            } else {
                for_each_injective_from(n, k, first, &mut visit);
            }
            hit
        });
        if let Some((a, z, value)) = found {
            return Ok(Some(Witness {
                q: q.clone(),
                z,
                tuple: a.iter().map(|&i| d.label(i).to_string()).collect(),
                value,
            }));
        }
    }
    Ok(None)
}

/// Re-evaluates `phi` on the tuple named by `labels`.
pub fn evaluate<T: Scalar, W: TransParam<T>, S: AsRef<str>>(
    param: &W,
    d: &FinMetric<T>,
    q: &W::Q,
    labels: &[S],
    z: &W::Z,
) -> Result<W::P> {
    let a = d.indices_of(labels)?;
    for (k, i) in a.iter().enumerate() {
        if a[..k].contains(i) {
            return Err(Error::TupleNotInjective);
        }
    }
    Ok(param.phi(q, &a, z, d))
}

/// Whether `w` is a witness on `d` (which must contain its tuple).
pub fn is_witness<T: Scalar, W: TransParam<T>>(param: &W, d: &FinMetric<T>, w: &WitnessOf<T, W>) -> Result<bool> {
    if !param.arity(&w.q, d.len()).contains(&w.tuple.len()) {
        return Ok(false);
    }
    let p = evaluate(param, d, &w.q, &w.tuple, &w.z)?;
    Ok(p == w.value && !param.in_target(&w.q, &p))
}

/// `phi` on `d` equals `phi` on `d` restricted to the tuple's points.
pub fn restriction_agrees<T: Scalar, W: TransParam<T>>(
    param: &W,
    d: &FinMetric<T>,
    q: &W::Q,
    a: &[usize],
    z: &W::Z,
) -> bool {
    let sub = d.restrict_idx(a);
    let local: Vec<usize> = (0..a.len()).collect();
    param.phi(q, a, z, d) == param.phi(q, &local, z, &sub)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<Q, Wt> {
    /// No tuple violates `q`.
    Satisfied { q: Q },
    /// Every enumerated index has a witness. `exact` when the index set was
    /// enumerated in full.
    AntiSatisfied { witnesses: Vec<Wt>, exact: bool },
    /// Some index had no witness in a scan that was not exhaustive, or the
    /// budget was zero.
    Unknown { checked: usize },
}

/// Looks for an index `q` (among the first `q_budget`) without witnesses.
pub fn satisfies_property<T: Scalar, W: TransParam<T>>(
    param: &W,
    d: &FinMetric<T>,
    q_budget: usize,
) -> Verdict<W::Q, WitnessOf<T, W>> {
    let mut witnesses = Vec::new();
    let mut inconclusive = false;
    let mut enumerated_all = param.q_is_finite();
    let mut iter = param.q_enum();
    let mut checked = 0;
    while checked < q_budget {
        let Some(q) = iter.next() else { break };
        checked += 1;
        match anti_witness(param, d, &q) {
            Ok(Some(w)) => witnesses.push(w),
            Ok(None) if param.scan_is_exhaustive(&q, d.len()) => return Verdict::Satisfied { q },
            Ok(None) => inconclusive = true,
            Err(_) => return Verdict::Satisfied { q },
        }
    }
    if param.q_is_finite() && iter.next().is_some() {
        enumerated_all = false;
    }
    if inconclusive || checked == 0 {
        Verdict::Unknown { checked }
    } else {
        Verdict::AntiSatisfied { witnesses, exact: enumerated_all }
    }
}
