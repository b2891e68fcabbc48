//! Amalgamation of finite metrics: bridged doubles, gluing over a shared
//! part, separated disjoint unions, and the doubled-support gluing used by
//! interpolation.
//!
//! Every construction replaces the infimum of the classical formulas with a
//! minimum over a finite index set, so all outputs are exact.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::metric::{FinMetric, LabeledMatrix};
use crate::scalar::{smin, Scalar};

/// Label given to the copy of `label` in the `block`-th doubled block.
pub fn copy_label(label: &str, block: usize) -> String {
    format!("{label}#copy{block}")
}

/// Pairwise-disjoint nonempty subsets of one space's labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetFamily {
    parts: Vec<Vec<String>>,
}

impl SubsetFamily {
    /// Checks shape only; membership is checked by [`SubsetFamily::check_on`].
    pub fn new(parts: Vec<Vec<String>>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (i, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(Error::FamilyInvalid(format!("part {i} is empty")));
            }
            for l in part {
                if !seen.insert(l.as_str()) {
                    return Err(Error::FamilyInvalid(format!("label {l:?} appears twice")));
                }
            }
        }
        Ok(SubsetFamily { parts })
    }

    pub fn parts(&self) -> &[Vec<String>] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Every label must be a point of `d`.
    pub fn check_on<T: Scalar>(&self, d: &FinMetric<T>) -> Result<()> {
        for l in self.parts.iter().flatten() {
            if d.index_of(l).is_none() {
                return Err(Error::FamilyInvalid(format!("label {l:?} is not a point of the space")));
            }
        }
        Ok(())
    }
}

/// Two metrics on the same set realized on a doubled set, corresponding
/// points at distance `r/2`.
#[derive(Debug, Clone)]
pub struct BridgedDouble<T: Scalar> {
    pub base: FinMetric<T>,
    /// `copies[i]` is the label of the copy of `base.labels()[i]`.
    pub copies: Vec<String>,
    pub glued: FinMetric<T>,
    pub bridge: T,
}

/// Glues `d` and a relabeled copy of `e` so that `glued(x, τ(x)) = r/2`.
///
/// Requires `r > 0` and `sup_dist(d, e) ≤ r`; `e` may list the labels in any order.
pub fn bridge_double<T: Scalar>(d: &FinMetric<T>, e: &FinMetric<T>, r: &T) -> Result<BridgedDouble<T>> {
    bridge_double_tagged(d, e, r, 0)
}

fn bridge_double_tagged<T: Scalar>(
    d: &FinMetric<T>,
    e: &FinMetric<T>,
    r: &T,
    block: usize,
) -> Result<BridgedDouble<T>> {
    if !r.is_positive() {
        return Err(Error::NonpositiveBridge(r.to_text()));
    }
    if !d.same_label_set(e) {
        return Err(Error::LabelMismatch);
    }
    let e = e.reordered(d.labels())?;
    let gap = d.sup_dist(&e)?;
    if gap > *r {
        return Err(Error::BridgeTooSmall { bridge: r.to_text(), sup_dist: gap.to_text() });
    }
    let n = d.len();
    let copies: Vec<String> = d.labels().iter().map(|l| copy_label(l, block)).collect();
    for c in &copies {
        if d.index_of(c).is_some() {
            return Err(Error::LabelCollision(c.clone()));
        }
    }
    let half = r.half();
    // cross[x][y] = min_a d(x, a) + r/2 + e(a, y)
    let cross: Vec<Vec<T>> = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    (0..n)
                        .map(|a| d.d(x, a) + half.clone() + e.d(a, y))
                        .reduce(smin)
                        .expect("nonempty space")
                })
                .collect()
        })
        .collect();
    let labels: Vec<String> = d.labels().iter().cloned().chain(copies.iter().cloned()).collect();
    let glued = FinMetric::trusted_fn(labels, |i, j| match (i < n, j < n) {
        (true, true) => d.d(i, j),
        (false, false) => e.d(i - n, j - n),
        (true, false) => cross[i][j - n].clone(),
        (false, true) => cross[j][i - n].clone(),
    });
    Ok(BridgedDouble { base: d.clone(), copies, glued, bridge: r.clone() })
}

/// Glues two metrics that agree on their shared labels `Z ≠ ∅`; cross
/// distances are `min_z dX(x, z) + dY(z, y)`. Output lists `dX`'s labels
/// first, then the remaining labels of `dY`.
pub fn amalgam_shared<T: Scalar>(dx: &FinMetric<T>, dy: &FinMetric<T>) -> Result<FinMetric<T>> {
    let shared: Vec<(usize, usize)> = dx
        .labels()
        .iter()
        .enumerate()
        .filter_map(|(i, l)| dy.index_of(l).map(|j| (i, j)))
        .collect();
    if shared.is_empty() {
        return Err(Error::DisjointLabelSets);
    }
    for (a, &(xi, yi)) in shared.iter().enumerate() {
        for &(xj, yj) in &shared[a + 1..] {
            if dx.get(xi, xj) != dy.get(yi, yj) {
                return Err(Error::OverlapDisagreement(dx.label(xi).into(), dx.label(xj).into()));
            }
        }
    }
    let extra: Vec<usize> = (0..dy.len()).filter(|&j| dx.index_of(dy.label(j)).is_none()).collect();
    let nx = dx.len();
    let cross: Vec<Vec<T>> = (0..nx)
        .map(|x| {
            extra
                .iter()
                .map(|&y| {
                    shared
                        .iter()
                        .map(|&(zx, zy)| dx.d(x, zx) + dy.d(zy, y))
                        .reduce(smin)
                        .expect("shared part is nonempty")
                })
                .collect()
        })
        .collect();
    let labels: Vec<String> = dx
        .labels()
        .iter()
        .cloned()
        .chain(extra.iter().map(|&j| dy.label(j).to_string()))
        .collect();
    Ok(FinMetric::trusted_fn(labels, |i, j| match (i < nx, j < nx) {
        (true, true) => dx.d(i, j),
        (false, false) => dy.d(extra[i - nx], extra[j - nx]),
        (true, false) => cross[i][j - nx].clone(),
        (false, true) => cross[j][i - nx].clone(),
    }))
}

/// Joins disjoint spaces through anchors `a ∈ X`, `b ∈ Y`:
/// `h(x, y) = dX(x, a) + r + dY(b, y)`, so every cross distance is at least `r`.
pub fn amalgam_disjoint<T: Scalar>(
    dx: &FinMetric<T>,
    dy: &FinMetric<T>,
    r: &T,
    a: &str,
    b: &str,
) -> Result<FinMetric<T>> {
    if let Some(l) = dy.labels().iter().find(|l| dx.index_of(l).is_some()) {
        return Err(Error::LabelCollision(l.clone()));
    }
    if !r.is_positive() {
        return Err(Error::NonpositiveSeparation(r.to_text()));
    }
    let a = dx.index_of(a).ok_or_else(|| Error::UnknownAnchor(a.to_string()))?;
    let b = dy.index_of(b).ok_or_else(|| Error::UnknownAnchor(b.to_string()))?;
    let nx = dx.len();
    let labels: Vec<String> = dx.labels().iter().chain(dy.labels()).cloned().collect();
    let m = LabeledMatrix::from_fn(labels, |i, j| match (i < nx, j < nx) {
        (true, true) => dx.d(i, j),
        (false, false) => dy.d(i - nx, j - nx),
        (true, false) => dx.d(i, a) + r.clone() + dy.d(b, j - nx),
        (false, true) => dx.d(j, a) + r.clone() + dy.d(b, i - nx),
    })?;
    Ok(FinMetric::trusted(m))
}

/// Left fold of [`amalgam_disjoint`] with `r = 1`, anchored at the first
/// label of the accumulated space and of each incoming block.
pub fn disjoint_sum<T: Scalar>(family: &[FinMetric<T>]) -> Result<FinMetric<T>> {
    let (first, rest) = family.split_first().ok_or(Error::EmptyFamily)?;
    let one = T::one();
    rest.iter().try_fold(first.clone(), |acc, block| {
        let a = acc.label(0).to_string();
        amalgam_disjoint(&acc, block, &one, &a, block.label(0))
    })
}

/// A base space glued to one doubled copy of each family member.
#[derive(Debug, Clone)]
pub struct SupportGluing<T: Scalar> {
    pub base: FinMetric<T>,
    pub family: SubsetFamily,
    /// `copies[i][k]` is the copy of `family.parts()[i][k]`.
    pub copies: Vec<Vec<String>>,
    pub glued: FinMetric<T>,
    pub eta: T,
}

impl<T: Scalar> SupportGluing<T> {
    /// Copy label of a point of the family's union, if any.
    pub fn tau(&self, label: &str) -> Option<&str> {
        self.family.parts().iter().zip(&self.copies).find_map(|(part, copies)| {
            part.iter().position(|l| l == label).map(|k| copies[k].as_str())
        })
    }
}

/// `η = max_i sup_dist(e_i, d|A_i)`, plus the block index and pair (labels)
/// attaining it.
pub fn family_defect<T: Scalar>(
    d: &FinMetric<T>,
    family: &SubsetFamily,
    metrics: &[FinMetric<T>],
) -> Result<(T, Option<(String, String)>)> {
    family.check_on(d)?;
    if metrics.len() != family.len() {
        return Err(Error::FamilyInvalid(format!(
            "{} part(s) but {} metric(s)",
            family.len(),
            metrics.len()
        )));
    }
    let mut eta = T::zero();
    let mut pair = None;
    for (part, e) in family.parts().iter().zip(metrics) {
        let restricted = d.restrict(part)?;
        let (gap, at) = restricted.sup_dist_with_pair(e)?;
        if gap > eta {
            eta = gap;
            pair = at.map(|(i, j)| (restricted.label(i).to_string(), restricted.label(j).to_string()));
        }
    }
    Ok((eta, pair))
}

/// Builds a metric on `X ⊔ ⊔B_i` with `h|X² = d`, `h|B_i² = e_i` (relabeled)
/// and `h(x, τ(x)) = η/2` on the union of the family.
///
/// Each block `A_i` is doubled by [`bridge_double`] with `r = η`, then
/// amalgamated into the accumulated space along `A_i`.
pub fn support_gluing<T: Scalar>(
    d: &FinMetric<T>,
    family: &SubsetFamily,
    metrics: &[FinMetric<T>],
) -> Result<SupportGluing<T>> {
    let (eta, _) = family_defect(d, family, metrics)?;
    if eta.is_zero() {
        return Err(Error::ZeroEta);
    }
    let mut glued = d.clone();
    let mut copies = Vec::with_capacity(family.len());
    for (i, (part, e)) in family.parts().iter().zip(metrics).enumerate() {
        let block = bridge_double_tagged(&d.restrict(part)?, e, &eta, i)?;
        if let Some(c) = block.copies.iter().find(|c| glued.index_of(c).is_some()) {
            return Err(Error::LabelCollision(c.clone()));
        }
        glued = amalgam_shared(&glued, &block.glued)?;
        copies.push(block.copies);
    }
    Ok(SupportGluing { base: d.clone(), family: family.clone(), copies, glued, eta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational as Q;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn equi(v: &[&str], eps: Q) -> FinMetric<Q> {
        FinMetric::equilateral(names(v), eps).unwrap()
    }

    #[test]
    fn bridge_two_point_example() {
        let d = equi(&["x", "y"], rat(1, 1));
        let b = bridge_double(&d, &d, &rat(1, 1)).unwrap();
        let g = &b.glued;
        assert_eq!(*g.dist("x", "x#copy0").unwrap(), rat(1, 2));
        assert_eq!(*g.dist("y", "y#copy0").unwrap(), rat(1, 2));
        // min(d(x,x) + 1/2 + e(x,y), d(x,y) + 1/2 + e(y,y)) = 3/2
        assert_eq!(*g.dist("x", "y#copy0").unwrap(), rat(3, 2));
        assert_eq!(g.restrict(&["x", "y"]).unwrap(), d);
        assert!(g.violations(true).is_empty());
    }

    #[test]
    fn bridge_errors() {
        let d = equi(&["x", "y"], rat(1, 1));
        let e = equi(&["x", "y"], rat(3, 1));
        assert!(matches!(bridge_double(&d, &e, &rat(1, 1)), Err(Error::BridgeTooSmall { .. })));
        assert!(matches!(bridge_double(&d, &e, &rat(0, 1)), Err(Error::NonpositiveBridge(_))));
        let f = equi(&["x", "z"], rat(1, 1));
        assert_eq!(bridge_double(&d, &f, &rat(1, 1)).unwrap_err(), Error::LabelMismatch);
        assert!(bridge_double(&d, &e, &rat(2, 1)).is_ok());
    }

    #[test]
    fn shared_examples() {
        let x = equi(&["z", "x"], rat(1, 1));
        assert_eq!(amalgam_shared(&x, &x).unwrap(), x);
        let y = equi(&["z", "y"], rat(2, 1));
        let h = amalgam_shared(&x, &y).unwrap();
        assert_eq!(*h.dist("x", "y").unwrap(), rat(3, 1));

        // shared pair {p, q} at distance 1, pendant u near both on one side,
        // pendant v near both on the other.
        let dx = equi(&["p", "q", "u"], rat(1, 1));
        let dy = FinMetric::from_fn(names(&["p", "q", "v"]), |i, j| match (i, j) {
            (0, 1) => rat(1, 1),
            (0, 2) => rat(1, 1),
            _ => rat(3, 2),
        })
        .unwrap();
        let h = amalgam_shared(&dx, &dy).unwrap();
        // min(1 + 1, 1 + 3/2)
        assert_eq!(*h.dist("u", "v").unwrap(), rat(2, 1));
        assert!(h.violations(true).is_empty());
    }

    #[test]
    fn shared_errors() {
        let x = equi(&["a", "b"], rat(1, 1));
        let y = equi(&["c", "d"], rat(1, 1));
        assert_eq!(amalgam_shared(&x, &y).unwrap_err(), Error::DisjointLabelSets);
        let y = equi(&["a", "b", "c"], rat(2, 1));
        assert_eq!(
            amalgam_shared(&x, &y).unwrap_err(),
            Error::OverlapDisagreement("a".into(), "b".into())
        );
    }

    #[test]
    fn disjoint_examples() {
        let x = FinMetric::singleton("x");
        let y = FinMetric::singleton("y");
        let h = amalgam_disjoint::<Q>(&x, &y, &rat(1, 1), "x", "y").unwrap();
        assert_eq!(*h.dist("x", "y").unwrap(), rat(1, 1));

        let line = FinMetric::line(&[rat(0, 1), rat(1, 1)]).unwrap();
        let h = amalgam_disjoint(&line, &y, &rat(2, 1), "0", "y").unwrap();
        assert_eq!(*h.dist("1", "y").unwrap(), rat(3, 1));
        assert_eq!(*h.dist("0", "y").unwrap(), rat(2, 1));

        assert_eq!(
            amalgam_disjoint(&line, &line, &rat(1, 1), "0", "0").unwrap_err(),
            Error::LabelCollision("0".into())
        );
        assert!(matches!(
            amalgam_disjoint(&line, &y, &rat(0, 1), "0", "y"),
            Err(Error::NonpositiveSeparation(_))
        ));
        assert_eq!(
            amalgam_disjoint(&line, &y, &rat(1, 1), "7", "y").unwrap_err(),
            Error::UnknownAnchor("7".into())
        );
    }

    #[test]
    fn disjoint_sum_examples() {
        let x: FinMetric<Q> = FinMetric::singleton("x");
        assert_eq!(disjoint_sum(std::slice::from_ref(&x)).unwrap(), x);
        let y = FinMetric::singleton("y");
        let z = FinMetric::singleton("z");
        let h = disjoint_sum(&[x.clone(), y.clone()]).unwrap();
        assert_eq!(*h.dist("x", "y").unwrap(), rat(1, 1));
        // x--y at 1; z joins through anchor x: h(x,z) = 1, h(y,z) = d(y,x) + 1 = 2.
        let h = disjoint_sum(&[x.clone(), y, z]).unwrap();
        assert_eq!(*h.dist("x", "y").unwrap(), rat(1, 1));
        assert_eq!(*h.dist("x", "z").unwrap(), rat(1, 1));
        assert_eq!(*h.dist("y", "z").unwrap(), rat(2, 1));
        assert!(h.violations(true).is_empty());
        assert_eq!(disjoint_sum::<Q>(&[]).unwrap_err(), Error::EmptyFamily);
        assert_eq!(disjoint_sum(&[x.clone(), x]).unwrap_err(), Error::LabelCollision("x".into()));
    }

    #[test]
    fn support_gluing_example() {
        let d = equi(&["x1", "x2", "x3"], rat(1, 1));
        let family = SubsetFamily::new(vec![names(&["x1", "x2"])]).unwrap();
        let e = equi(&["x1", "x2"], rat(3, 1));
        let s = support_gluing(&d, &family, std::slice::from_ref(&e)).unwrap();
        assert_eq!(s.eta, rat(2, 1));
        assert_eq!(s.tau("x1"), Some("x1#copy0"));
        assert_eq!(s.tau("x3"), None);
        assert_eq!(*s.glued.dist("x1", "x1#copy0").unwrap(), rat(1, 1));
        assert_eq!(*s.glued.dist("x1#copy0", "x2#copy0").unwrap(), rat(3, 1));
        assert_eq!(s.glued.restrict(d.labels()).unwrap(), d);
        assert!(s.glued.violations(true).is_empty());
    }

    #[test]
    fn support_gluing_two_blocks_with_mismatched_cross_distances() {
        let d = FinMetric::line(&[rat(0, 1), rat(1, 1), rat(5, 1), rat(7, 1)]).unwrap();
        let family = SubsetFamily::new(vec![names(&["0", "1"]), names(&["5", "7"])]).unwrap();
        let e0 = equi(&["0", "1"], rat(2, 1));
        let e1 = equi(&["5", "7"], rat(5, 2));
        let s = support_gluing(&d, &family, &[e0.clone(), e1.clone()]).unwrap();
        assert_eq!(s.eta, rat(1, 1));
        assert!(s.glued.violations(true).is_empty());
        assert_eq!(s.glued.restrict(d.labels()).unwrap(), d);
        for (part, copies) in family.parts().iter().zip(&s.copies) {
            for (a, c) in part.iter().zip(copies) {
                assert_eq!(*s.glued.dist(a, c).unwrap(), rat(1, 2));
            }
        }
        assert_eq!(*s.glued.dist("0#copy0", "1#copy0").unwrap(), rat(2, 1));
        assert_eq!(*s.glued.dist("5#copy1", "7#copy1").unwrap(), rat(5, 2));
    }

    #[test]
    fn support_gluing_errors() {
        let d = equi(&["a", "b", "c"], rat(1, 1));
        let family = SubsetFamily::new(vec![names(&["a"]), names(&["b"])]).unwrap();
        let singles = [FinMetric::singleton("a"), FinMetric::singleton("b")];
        assert_eq!(support_gluing(&d, &family, &singles).unwrap_err(), Error::ZeroEta);
        assert!(matches!(SubsetFamily::new(vec![names(&["a"]), names(&["a"])]), Err(Error::FamilyInvalid(_))));
        assert!(matches!(SubsetFamily::new(vec![vec![]]), Err(Error::FamilyInvalid(_))));
        let bad = SubsetFamily::new(vec![names(&["q"])]).unwrap();
        assert!(matches!(
            support_gluing(&d, &bad, &[FinMetric::singleton("q")]),
            Err(Error::FamilyInvalid(_))
        ));
        let wrong = SubsetFamily::new(vec![names(&["a", "b"])]).unwrap();
        assert_eq!(
            support_gluing(&d, &wrong, &[equi(&["a", "c"], rat(2, 1))]).unwrap_err(),
            Error::LabelMismatch
        );
    }
}
