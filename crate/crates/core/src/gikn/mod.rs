//! Good approximations between periodic orbits and the descending
//! construction built on them.
//!
//! An orbit approximates a shorter one well when a large fraction of its
//! points shadow the short orbit for a full short-orbit period, with the
//! matched points spread evenly over the short orbit (balanced projection
//! preimages). The descend step manufactures such approximations: it repeats
//! a mildly hyperbolic orbit's word and appends a short excursion through
//! the region of opposite center behavior, trading a controlled fraction of
//! the center exponent for an orbit of longer period. Iterating descend with
//! a summable tolerance schedule and a positively-bounded proportion product
//! yields a sequence of periodic measures converging to a non-hyperbolic
//! limit; the convergence certificate checks exactly those hypotheses.

mod approx;
mod descend;
mod sequence;

pub use approx::{check_good_approximation, verify_certificate, ApproximationOutcome};
pub use descend::{descend_step, opposite_region_available, DescendParams};
pub use sequence::{
    build_gikn_sequence, certify_convergence, limit_support_estimate, ConvergenceReport,
    EpsSchedule, GiknSequence, GiknStep, SupportEstimate,
};

use crate::measure::MeasureError;
use crate::model::SkewError;
use crate::orbit::OrbitError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Witness that one periodic orbit approximates another at quality
/// `(eps, kappa)`: a `kappa` fraction of the long orbit's points shadow the
/// short orbit within `eps` for a full short period, spread evenly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodApproximationCertificate {
    /// Shadowing tolerance the witness was checked at.
    pub eps: f64,
    /// Achieved matched proportion `|witness| / period(long)`.
    pub kappa: f64,
    /// Matched point indices into the long orbit's cycle, ascending.
    pub witness: Vec<usize>,
    /// Short-orbit index each witness point projects to, aligned with
    /// `witness`.
    pub projection: Vec<usize>,
    /// Constant preimage count of the projection onto the short orbit.
    pub cardinality: usize,
}

#[derive(Debug, Error)]
pub enum GiknError {
    #[error("construction requires a symbolic system and word itineraries")]
    UnsupportedBase,
    #[error("parent exponent {exponent:e} above the descend smallness threshold {max:e}")]
    ExponentTooLarge { exponent: f64, max: f64 },
    #[error("parent orbit is neutral within {0:e}; descend needs a hyperbolic parent")]
    NeutralParent(f64),
    #[error("no region of opposite center behavior: covering/expansion evidence failed")]
    NoOppositeRegion,
    #[error("no repeat count within {max_reps} and excursion length within {max_excursion} lands the exponent window")]
    ExponentWindow {
        max_reps: usize,
        max_excursion: usize,
    },
    #[error("approximation certificate failed: required kappa {kappa_required}, achieved {kappa_achieved} (eps* = {eps_star:e})")]
    CertificateFailed {
        kappa_required: f64,
        kappa_achieved: f64,
        eps_star: f64,
    },
    #[error("bad tolerance schedule: {0}")]
    BadSchedule(&'static str),
    #[error("bad parameters: {0}")]
    BadParams(&'static str),
    #[error("sequence too short: {0} elements")]
    TooShort(usize),
    #[error("persisted sequence is malformed: {0}")]
    BadPersistence(&'static str),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Model(#[from] SkewError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}
