//! Finite metric spaces with exact arithmetic: gluing, interpolation,
//! transmissible properties and genericity constructions.

pub mod embed;
pub mod error;
pub mod genericity;
pub mod gluing;
pub mod interpolation;
pub mod io;
pub mod metric;
pub mod scalar;
pub mod transmissible;
pub mod tuples;

pub use error::{Error, Result};
pub use metric::{FinMetric, LabeledMatrix};
pub use scalar::Scalar;

pub type Rational = num_rational::BigRational;
pub type Metric = FinMetric<Rational>;
pub type MetricF64 = FinMetric<f64>;
