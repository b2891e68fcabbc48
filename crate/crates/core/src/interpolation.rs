//! Exact metric interpolation: prescribe metrics on disjoint subsets and
//! obtain a metric on the whole space that restricts to each of them and
//! moves the base metric by exactly the largest prescribed change.

use crate::embed::{kuratowski, EmbedMode, EmbeddedPoints};
use crate::error::{Error, Result};
use crate::gluing::{disjoint_sum, family_defect, support_gluing, SubsetFamily, SupportGluing};
use crate::metric::{FinMetric, LabeledMatrix};
use crate::scalar::{smax, Scalar};

/// Intermediate objects of the construction, kept for inspection.
#[derive(Debug, Clone)]
pub struct InterpolationTrace<T: Scalar> {
    /// The doubled-support gluing `h` on `X ⊔ ⊔B_i`.
    pub gluing: SupportGluing<T>,
    /// Based Kuratowski embedding `H` of the gluing.
    pub embedding: EmbeddedPoints<T>,
    /// Selection `F` on `X`: `H(τ(x))` on the family's union, `H(x)` elsewhere.
    pub selection: EmbeddedPoints<T>,
    /// Extension `r` of the disjoint sum of the targets to all of `X`.
    pub extension: FinMetric<T>,
    /// `l = min(r, η/2)`.
    pub cap: FinMetric<T>,
}

#[derive(Debug, Clone)]
pub struct InterpolationResult<T: Scalar> {
    pub m: FinMetric<T>,
    pub eta: T,
    /// A pair inside some block where `|m − d| = η`; `None` when `η = 0`.
    pub witness_pair: Option<(String, String)>,
    /// `None` for the `η = 0` short circuit.
    pub trace: Option<InterpolationTrace<T>>,
}

/// Extends `e` (on `A ⊆ X`) to `X` by putting every point outside `A` at
/// the constant distance `C = max(diam(e)/2, 1)` from everything.
///
/// Output follows the label order of `d`.
pub fn constant_bridge_extend<T: Scalar>(e: &FinMetric<T>, d: &FinMetric<T>) -> Result<FinMetric<T>> {
    constant_bridge_extend_labels(e, d.labels())
}

pub fn constant_bridge_extend_labels<T: Scalar>(e: &FinMetric<T>, x_labels: &[String]) -> Result<FinMetric<T>> {
    let mut inner: Vec<Option<usize>> = Vec::with_capacity(x_labels.len());
    for l in x_labels {
        inner.push(e.index_of(l));
    }
    let covered = inner.iter().filter(|i| i.is_some()).count();
    if covered != e.len() {
        let missing = e
            .labels()
            .iter()
            .find(|l| !x_labels.contains(l))
            .expect("some label of e is missing from X");
        return Err(Error::SubsetNotContained(missing.clone()));
    }
    let c = smax(e.diameter().half(), T::one());
    let m = LabeledMatrix::from_fn(x_labels.to_vec(), |i, j| match (inner[i], inner[j]) {
        (Some(a), Some(b)) => e.d(a, b),
        _ => c.clone(),
    })?;
    Ok(FinMetric::trusted(m))
}

/// Interpolates `d` towards `metrics[i]` on `family.parts()[i]`.
///
/// The result `m` satisfies `m|A_i² = e_i` and `sup_dist(m, d) = η`
/// exactly, where `η = max_i sup_dist(e_i, d|A_i)`.
pub fn interpolate<T: Scalar>(
    d: &FinMetric<T>,
    family: &SubsetFamily,
    metrics: &[FinMetric<T>],
) -> Result<InterpolationResult<T>> {
    let (eta, witness_pair) = family_defect(d, family, metrics)?;
    if eta.is_zero() {
        return Ok(InterpolationResult { m: d.clone(), eta, witness_pair: None, trace: None });
    }

    let gluing = support_gluing(d, family, metrics)?;
    let embedding = kuratowski(&gluing.glued, &EmbedMode::Based(d.label(0).to_string()))?;

    let selection_coords = d
        .labels()
        .iter()
        .map(|x| {
            let source = gluing.tau(x).unwrap_or(x);
            let z = gluing.glued.index_of(source).expect("gluing contains X and its copies");
            embedding.point(z).to_vec()
        })
        .collect();
    let selection = EmbeddedPoints::new(d.labels().to_vec(), selection_coords)?;

    let extension = constant_bridge_extend(&disjoint_sum(metrics)?, d)?;
    let cap = extension.min_cap(&eta.half())?;
    let bounded = kuratowski(&cap, &EmbedMode::Bounded)?;

    // E(x) = (F(x), l_x) under the max norm of the product.
    let product = EmbeddedPoints::new(
        d.labels().to_vec(),
        (0..d.len())
            .map(|x| selection.point(x).iter().chain(bounded.point(x)).cloned().collect())
            .collect(),
    )?;
    let m = FinMetric::trusted(LabeledMatrix::from_fn(d.labels().to_vec(), |i, j| product.supdiff(i, j))?);

    Ok(InterpolationResult {
        m,
        eta,
        witness_pair,
        trace: Some(InterpolationTrace { gluing, embedding, selection, extension, cap }),
    })
}

/// [`interpolate`] with a single block.
pub fn interpolate_single<T: Scalar>(
    d: &FinMetric<T>,
    subset: &[String],
    e: &FinMetric<T>,
) -> Result<InterpolationResult<T>> {
    let family = SubsetFamily::new(vec![subset.to_vec()])?;
    interpolate(d, &family, std::slice::from_ref(e))
}
