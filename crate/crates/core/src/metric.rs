//! Finite metric spaces as labeled distance matrices.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result, Violation};
use crate::scalar::{smax, smin, Scalar};

/// A square, labeled matrix of scalars with no metric guarantees attached.
///
/// Storage is row-major; labels are distinct and define the row order.
#[derive(Clone)]
pub struct LabeledMatrix<T> {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    entries: Vec<T>,
}

impl<T: Scalar> LabeledMatrix<T> {
    /// Builds a matrix from rows, checking shape and label uniqueness only.
    pub fn from_rows(labels: Vec<String>, rows: Vec<Vec<T>>) -> Result<Self> {
        let n = labels.len();
        if rows.len() != n {
            return Err(Error::NonSquare { row: rows.len(), len: rows.len(), expected: n });
        }
        if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::NonSquare { row, len: r.len(), expected: n });
        }
        let entries = rows.into_iter().flatten().collect();
        Self::from_flat(labels, entries)
    }

    fn from_flat(labels: Vec<String>, entries: Vec<T>) -> Result<Self> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        debug_assert_eq!(entries.len(), labels.len() * labels.len());
        Ok(LabeledMatrix { labels, index, entries })
    }

    /// Builds a symmetric matrix from a function of index pairs `i < j`.
    pub fn from_fn(labels: Vec<String>, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let n = labels.len();
        let mut entries = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                entries[j * n + i] = v.clone();
                entries[i * n + j] = v;
            }
        }
        Self::from_flat(labels, entries)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Resolves labels to indices, failing on the first unknown one.
    pub fn indices_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|l| self.index_of(l.as_ref()).ok_or_else(|| Error::UnknownLabel(l.as_ref().to_string())))
            .collect()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.labels.len() + j]
    }

    /// Distance between two labeled points.
    pub fn dist(&self, a: &str, b: &str) -> Result<&T> {
        let i = self.index_of(a).ok_or_else(|| Error::UnknownLabel(a.to_string()))?;
        let j = self.index_of(b).ok_or_else(|| Error::UnknownLabel(b.to_string()))?;
        Ok(self.get(i, j))
    }

    pub fn row(&self, i: usize) -> &[T] {
        let n = self.labels.len();
        &self.entries[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }

    /// Same label set, regardless of order.
    pub fn same_label_set(&self, other: &Self) -> bool {
        self.len() == other.len() && self.labels.iter().all(|l| other.index.contains_key(l))
    }

    /// Every broken metric axiom. `strict` additionally demands positive
    /// off-diagonal entries.
    pub fn violations(&self, strict: bool) -> Vec<Violation> {
        let n = self.len();
        let lab = |i: usize| self.labels[i].clone();
        let mut out = Vec::new();
        let mut symmetric = true;
        for i in 0..n {
            if !self.get(i, i).is_zero() {
                out.push(Violation::NonzeroDiagonal { i: lab(i) });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && self.get(i, j).is_negative() {
                    out.push(Violation::NegativeEntry { i: lab(i), j: lab(j) });
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.get(i, j) != self.get(j, i) {
                    symmetric = false;
                    out.push(Violation::AsymmetricPair { i: lab(i), j: lab(j) });
                }
                if strict && (self.get(i, j).is_zero() || self.get(j, i).is_zero()) {
                    out.push(Violation::ZeroOffDiagonal { i: lab(i), j: lab(j) });
                }
            }
        }
        for i in 0..n {
            // On symmetric input (i, j, k) and (k, j, i) are the same violation.
            let k_start = if symmetric { i + 1 } else { 0 };
            for k in k_start..n {
                if k == i {
                    continue;
                }
                let direct = self.get(i, k);
                for j in 0..n {
                    if j == i || j == k {
                        continue;
                    }
                    if *direct > self.get(i, j).clone() + self.get(j, k).clone() {
                        out.push(Violation::TriangleViolation { i: lab(i), j: lab(j), k: lab(k) });
                    }
                }
            }
        }
        out
    }
}

impl<T: PartialEq> PartialEq for LabeledMatrix<T> {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.entries == other.entries
    }
}

impl<T: Scalar> fmt::Debug for LabeledMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:?}", self.labels)?;
        for i in 0..self.len() {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_text()).collect();
            writeln!(f, "  {} [{}]", self.labels[i], row.join(", "))?;
        }
        Ok(())
    }
}

/// A symmetric matrix with zero diagonal, nonnegative entries and the
/// triangle inequality, but possibly zero off-diagonal entries.
#[derive(Clone, PartialEq)]
pub struct PseudoFinMetric<T>(LabeledMatrix<T>);

/// A finite metric space: labeled points with an exact distance matrix.
#[derive(Clone, PartialEq)]
pub struct FinMetric<T>(LabeledMatrix<T>);

impl<T> std::ops::Deref for PseudoFinMetric<T> {
    type Target = LabeledMatrix<T>;
    fn deref(&self) -> &LabeledMatrix<T> {
        &self.0
    }
}

impl<T> std::ops::Deref for FinMetric<T> {
    type Target = LabeledMatrix<T>;
    fn deref(&self) -> &LabeledMatrix<T> {
        &self.0
    }
}

impl<T: Scalar> fmt::Debug for FinMetric<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinMetric {:?}", self.0)
    }
}

impl<T: Scalar> fmt::Debug for PseudoFinMetric<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PseudoFinMetric {:?}", self.0)
    }
}

impl<T: Scalar> PseudoFinMetric<T> {
    pub fn new(matrix: LabeledMatrix<T>) -> Result<Self> {
        let violations = matrix.violations(false);
        if violations.is_empty() {
            Ok(PseudoFinMetric(matrix))
        } else {
            Err(Error::Invalid(violations))
        }
    }

    /// Promotes to a metric when all off-diagonal entries are positive.
    pub fn into_metric(self) -> Result<FinMetric<T>> {
        FinMetric::new(self.0)
    }
}

/// Checks all four metric axioms, listing every violation on failure.
pub fn validate<T: Scalar>(labels: Vec<String>, rows: Vec<Vec<T>>) -> Result<FinMetric<T>> {
    FinMetric::new(LabeledMatrix::from_rows(labels, rows)?)
}

impl<T: Scalar> FinMetric<T> {
    pub fn new(matrix: LabeledMatrix<T>) -> Result<Self> {
        let violations = matrix.violations(true);
        if violations.is_empty() {
            Ok(FinMetric(matrix))
        } else {
            Err(Error::Invalid(violations))
        }
    }

    /// Builds a metric from a symmetric pair function and validates it.
    pub fn from_fn(labels: Vec<String>, f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        Self::new(LabeledMatrix::from_fn(labels, f)?)
    }

    /// For constructions that are metrics by construction. Validated in
    /// debug builds.
    pub(crate) fn trusted(matrix: LabeledMatrix<T>) -> Self {
        debug_assert!(
            matrix.violations(true).is_empty(),
            "construction produced an invalid metric: {:?}",
            matrix.violations(true)
        );
        FinMetric(matrix)
    }

    pub(crate) fn trusted_fn(labels: Vec<String>, f: impl FnMut(usize, usize) -> T) -> Self {
        Self::trusted(LabeledMatrix::from_fn(labels, f).expect("distinct labels"))
    }

    /// The one-point space.
    pub fn singleton(label: impl Into<String>) -> Self {
        Self::trusted_fn(vec![label.into()], |_, _| T::zero())
    }

    /// All distinct points at distance `eps`.
    pub fn equilateral(labels: Vec<String>, eps: T) -> Result<Self> {
        if !eps.is_positive() {
            return Err(Error::NonpositiveConstant(eps.to_text()));
        }
        LabeledMatrix::from_fn(labels, |_, _| eps.clone()).map(Self::trusted)
    }

    /// Points of the real line with the absolute-difference metric; labels
    /// are the coordinates' text forms.
    pub fn line(points: &[T]) -> Result<Self> {
        let labels = points.iter().map(|p| p.to_text()).collect();
        Self::from_fn(labels, |i, j| (points[i].clone() - points[j].clone()).abs())
    }

    pub fn as_matrix(&self) -> &LabeledMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> LabeledMatrix<T> {
        self.0
    }

    /// Entry `(i, j)` cloned.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> T {
        self.get(i, j).clone()
    }

    /// Renames points, keeping the matrix.
    pub fn relabel(&self, mut rename: impl FnMut(&str) -> String) -> Result<Self> {
        let labels = self.labels().iter().map(|l| rename(l)).collect();
        Ok(FinMetric(LabeledMatrix::from_flat(labels, self.0.entries.clone())?))
    }

    /// Reorders to match `labels` (a permutation of this space's labels).
    pub fn reordered<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::LabelMismatch);
        }
        let idx = self.indices_of(labels).map_err(|_| Error::LabelMismatch)?;
        let new_labels = idx.iter().map(|&i| self.labels()[i].clone()).collect::<Vec<_>>();
        LabeledMatrix::from_fn(new_labels, |a, b| self.d(idx[a], idx[b]))
            .map_err(|_| Error::LabelMismatch)
            .map(FinMetric)
    }

    /// Max over pairs of `|d(x, y) - e(x, y)|`; the labels must coincide as sets.
    pub fn sup_dist(&self, other: &Self) -> Result<T> {
        sup_dist(self, other)
    }

    pub fn diam<S: AsRef<str>>(&self, subset: &[S]) -> Result<T> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(self.diam_of(&self.indices_of(subset)?))
    }

    /// Diameter of a set of point indices (0 for fewer than two points).
    pub fn diam_of(&self, idx: &[usize]) -> T {
        let mut best = T::zero();
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                if *self.get(i, j) > best {
                    best = self.d(i, j);
                }
            }
        }
        best
    }

    /// Diameter of the whole space.
    pub fn diameter(&self) -> T {
        self.diam_of(&(0..self.len()).collect::<Vec<_>>())
    }

    pub fn min_sep<S: AsRef<str>>(&self, subset: &[S]) -> Result<T> {
        let idx = self.indices_of(subset)?;
        self.min_sep_of(&idx).ok_or(Error::SubsetTooSmall(idx.len()))
    }

    /// Smallest distance between distinct listed points; `None` below two points.
    pub fn min_sep_of(&self, idx: &[usize]) -> Option<T> {
        let mut best: Option<T> = None;
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                if i == j {
                    continue;
                }
                let v = self.get(i, j);
                if best.as_ref().is_none_or(|b| v < b) {
                    best = Some(v.clone());
                }
            }
        }
        best
    }

    /// The induced metric on `subset`, in the given order.
    pub fn restrict<S: AsRef<str>>(&self, subset: &[S]) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let idx = self.indices_of(subset)?;
        let labels = idx.iter().map(|&i| self.labels()[i].clone()).collect();
        Ok(Self::trusted(LabeledMatrix::from_fn(labels, |a, b| self.d(idx[a], idx[b]))?))
    }

    /// Induced metric on point indices (which must be distinct).
    pub fn restrict_idx(&self, idx: &[usize]) -> Self {
        let labels = idx.iter().map(|&i| self.labels()[i].clone()).collect();
        Self::trusted_fn(labels, |a, b| self.d(idx[a], idx[b]))
    }

    /// Multiplies every distance by `c > 0`.
    pub fn scale(&self, c: &T) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::NonpositiveConstant(c.to_text()));
        }
        Ok(self.map_entries(|v| v * c.clone()))
    }

    /// Replaces every off-diagonal entry by `min(entry, c)` for `c > 0`.
    pub fn min_cap(&self, c: &T) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::NonpositiveConstant(c.to_text()));
        }
        Ok(self.map_entries(|v| smin(v, c.clone())))
    }

    fn map_entries(&self, f: impl Fn(T) -> T) -> Self {
        let n = self.len();
        Self::trusted_fn(self.labels().to_vec(), |i, j| {
            debug_assert!(i < n && j < n);
            f(self.d(i, j))
        })
    }

    /// Largest entry of `|self - other|` together with the pair attaining it
    /// (first pair in row-major order on ties; none when the metrics are
    /// equal). Labels must coincide as sets.
    pub fn sup_dist_with_pair(&self, other: &Self) -> Result<(T, Option<(usize, usize)>)> {
        if !self.same_label_set(other) {
            return Err(Error::LabelMismatch);
        }
        let map: Vec<usize> = self
            .labels()
            .iter()
            .map(|l| other.index_of(l).expect("same label set"))
            .collect();
        let mut best = T::zero();
        let mut pair = None;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let diff = (self.d(i, j) - other.d(map[i], map[j])).abs();
                if diff > best {
                    best = diff;
                    pair = Some((i, j));
                }
            }
        }
        Ok((best, pair))
    }

    /// Converts every entry to another scalar type.
    pub fn convert<U: Scalar>(&self, f: impl Fn(&T) -> U) -> LabeledMatrix<U> {
        LabeledMatrix::from_fn(self.labels().to_vec(), |i, j| f(self.get(i, j)))
            .expect("labels already distinct")
    }
}

/// The sup-distance between two metrics on the same label set.
pub fn sup_dist<T: Scalar>(d: &FinMetric<T>, e: &FinMetric<T>) -> Result<T> {
    d.sup_dist_with_pair(e).map(|(v, _)| v)
}

/// Maximum of an iterator of scalars; `None` if empty.
pub fn max_of<T: Scalar>(it: impl IntoIterator<Item = T>) -> Option<T> {
    it.into_iter().reduce(smax)
}
