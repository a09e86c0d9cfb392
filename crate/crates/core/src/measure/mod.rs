//! Weak-star geometry on empirical measures.
//!
//! A fixed countable family of test functions, each bounded by 1 in sup norm,
//! induces a metric on probability measures: the i-th absolute difference of
//! integrals is weighted by 2^-i. Truncating the series after `I` terms costs
//! at most 2^(1-I), so distances are always reported together with their
//! truncation depth and tail bound.
//!
//! The center Lyapunov exponent is an affine functional of the measure; its
//! sign (outside a tolerance band) decides the stable index.

mod family;
mod functional;
mod metric;

pub use family::{test_function, FiberWave, TestFunction, TorusPhase};
pub use functional::{center_exponent, classify_index, convex_combine, IndexClass};
pub use metric::{integrate, weak_star_distance, MeasureDistanceReport, DEFAULT_METRIC_DEPTH};

use crate::model::SkewError;
use crate::orbit::OrbitError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeasureError {
    /// Measures of different phase spaces, or a test function applied to a
    /// point of the wrong phase space.
    #[error("phase space kinds do not match")]
    KindMismatch,
    /// Test function indices start at 1 and stop at the enumeration cap.
    #[error("test function index {0} is outside the enumerated family")]
    IndexOutOfRange(usize),
    #[error("metric truncation depth must be at least 1")]
    ZeroDepth,
    /// Convex coefficients must be nonnegative and sum to 1.
    #[error("convex coefficients sum to {0}, expected 1")]
    BadWeights(f64),
    #[error("empty convex combination")]
    Empty,
    #[error(transparent)]
    Model(#[from] SkewError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}
