//! Quasi-hyperbolic strings, spliced pseudo-orbits, and periodic shadowing.
//!
//! The pipeline here turns a mixture target (anchor orbit weight alpha,
//! remaining weight on a target measure) into a pseudo-orbit plan whose
//! segment verifies quasi-hyperbolicity at the square root of the mixture
//! rate, then closes the plan into a genuine periodic orbit and measures how
//! far the orbit strays from the plan. Shadowing constants are empirical:
//! estimated from sample runs, never proved.

mod plan;
mod quasi;
mod solve;

pub use plan::{assemble_pseudo_orbit, perturbed_orbit_plan, PlanOptions, PseudoOrbitPlan};
pub use quasi::{
    check_quasi_hyperbolic, quasi_any_cut, quasi_log_scan, BundleSide, QuasiHyperbolicString,
    QuasiStatus, SplittingSpec,
};
pub use solve::{estimate_shadowing_constant, shadow_periodic, ShadowOutcome, ShadowingConstants};

use crate::measure::MeasureError;
use crate::model::SkewError;
use crate::orbit::OrbitError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ShadowError {
    #[error("verification rate must lie in (0, 1), got {0}")]
    BadRate(f64),
    #[error("anchor orbit is neutral: exponent {exponent:e} within tolerance {tol:e}")]
    AnchorNeutral { exponent: f64, tol: f64 },
    #[error("mixture exponent {0:e} is within the neutral tolerance; perturb the weight")]
    NonHyperbolicMixture(f64),
    #[error("anchor weight must lie in (0, 1], got {0}")]
    BadAlpha(f64),
    #[error("torus pseudo-orbits are built by perturbing genuine orbits, not by splicing")]
    TorusSpliceUnsupported,
    #[error("target measure is not realizable as a followed segment: {0}")]
    TargetUnrealizable(&'static str),
    #[error("plan constraints not met within a budget of {0} steps")]
    PlanBudget(usize),
    #[error("plan {what} = {value:e} exceeds eps = {eps:e}")]
    PlanTolerance {
        what: &'static str,
        value: f64,
        eps: f64,
    },
    #[error("segment fails the quasi-hyperbolic check at rate {rate}: {side:?} side, index {index}")]
    QuasiFailed {
        rate: f64,
        side: BundleSide,
        index: usize,
    },
    #[error("root iteration did not converge within {0} iterations")]
    SolverDiverged(usize),
    #[error("closed orbit re-iteration residual {0:e} above tolerance")]
    NotPeriodic(f64),
    #[error("constant estimation needs at least 3 successful samples spanning a decade of jump sizes")]
    InsufficientSamples,
    #[error(transparent)]
    Model(#[from] SkewError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}
