//! Kuratowski embeddings into sup-norm coordinate spaces.

use crate::error::{Error, Result};
use crate::metric::{FinMetric, LabeledMatrix, PseudoFinMetric};
use crate::scalar::{smax, Scalar};

/// Where the embedding is anchored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbedMode {
    /// `x -> d_x - d_o` for a base point `o`.
    Based(String),
    /// `x -> d_x`.
    Bounded,
}

/// Labeled points in `R^k` under the sup norm.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedPoints<T> {
    labels: Vec<String>,
    coords: Vec<Vec<T>>,
}

impl<T: Scalar> EmbeddedPoints<T> {
    /// All coordinate vectors must share one dimension.
    pub fn new(labels: Vec<String>, coords: Vec<Vec<T>>) -> Result<Self> {
        if labels.len() != coords.len() {
            return Err(Error::LabelMismatch);
        }
        if let Some(first) = coords.first() {
            if let Some((row, c)) = coords.iter().enumerate().find(|(_, c)| c.len() != first.len()) {
                return Err(Error::NonSquare { row, len: c.len(), expected: first.len() });
            }
        }
        Ok(EmbeddedPoints { labels, coords })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn coords(&self) -> &[Vec<T>] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i]
    }

    pub fn dim(&self) -> usize {
        self.coords.first().map_or(0, Vec::len)
    }

    /// `‖p_i − p_j‖∞`.
    pub fn supdiff(&self, i: usize, j: usize) -> T {
        sup_norm_diff(&self.coords[i], &self.coords[j])
    }

    /// The pairwise sup-norm differences.
    pub fn pseudo_metric(&self) -> PseudoFinMetric<T> {
        let m = LabeledMatrix::from_fn(self.labels.clone(), |i, j| self.supdiff(i, j))
            .expect("labels of an embedding are distinct");
        PseudoFinMetric::new(m).expect("sup-norm differences always form a pseudometric")
    }
}

/// `‖a − b‖∞` for equal-length vectors.
pub fn sup_norm_diff<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| smax(acc, (x.clone() - y.clone()).abs()))
}

/// Embeds `d` isometrically: `K(x) = d_x − d_o` (based) or `L(x) = d_x` (bounded).
pub fn kuratowski<T: Scalar>(d: &FinMetric<T>, mode: &EmbedMode) -> Result<EmbeddedPoints<T>> {
    let n = d.len();
    let coords = match mode {
        EmbedMode::Bounded => (0..n).map(|x| d.row(x).to_vec()).collect(),
        EmbedMode::Based(o) => {
            let o = d.index_of(o).ok_or_else(|| Error::UnknownLabel(o.clone()))?;
            (0..n)
                .map(|x| (0..n).map(|p| d.d(x, p) - d.d(o, p)).collect())
                .collect()
        }
    };
    EmbeddedPoints::new(d.labels().to_vec(), coords)
}
