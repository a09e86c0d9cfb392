//! Reproducible experiment drivers over the orbit/measure/shadow/gikn stack.
//!
//! Each driver consumes an [`ExperimentConfig`], builds the configured
//! system, and produces a typed run report plus a flat table that renders to
//! CSV and JSON lines. All drivers are deterministic: the config seed is
//! recorded in every output header for provenance, but no driver consumes
//! randomness. Pass/fail cells are recomputable from values recorded in the
//! same row.
//!
//! The three drivers:
//!
//! * [`run_experiment_convex`]: realizes convex mixtures of an expanding and
//!   a contracting fixed-point measure as single periodic orbits and checks
//!   distance and exponent against the mixture.
//! * [`run_experiment_nonhyp_approx`]: builds a near-neutral orbit as a
//!   descending-sequence proxy and approximates its measure by hyperbolic
//!   orbits of the opposite index at a decreasing tolerance schedule.
//! * [`run_experiment_gap_bound`]: interleaves an expanding cell with
//!   contracting anchor orbits across a decade of anchor exponents and fits
//!   the linear law relating achieved distance to the mixture gap.

mod config;
mod convex;
mod gap;
mod nonhyp;
mod table;

pub use config::{
    BudgetSpec, ExperimentConfig, ExperimentKind, GapSpec, GiknSpec, GridSpec, ScheduleSpec,
    SystemSpec, ToleranceSpec,
};
pub use convex::{run_experiment_convex, ConvexRow, ConvexRun};
pub use gap::{run_experiment_gap_bound, GapRow, GapRun};
pub use nonhyp::{run_experiment_nonhyp_approx, NonhypRow, NonhypRun};
pub use table::{resolve_output_dir, Cell, ExperimentRow, ExperimentTable, OUTPUT_DIR_ENV};

use crate::gikn::GiknError;
use crate::measure::MeasureError;
use crate::model::SkewError;
use crate::orbit::OrbitError;
use crate::shadow::ShadowError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    /// Malformed or inconsistent configuration; maps to CLI exit code 2.
    #[error("config: {0}")]
    Config(String),
    /// The configured system lacks an ingredient the driver needs.
    #[error("system unsuitable: {0}")]
    Unsuitable(&'static str),
    /// The descending sequence never reached the neutral band, so there is
    /// no non-hyperbolic target to approximate.
    #[error("target still hyperbolic after {steps} steps: exponent {exponent:e}")]
    StillHyperbolic { exponent: f64, steps: usize },
    #[error(transparent)]
    Model(#[from] SkewError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Shadow(#[from] ShadowError),
    #[error(transparent)]
    Gikn(#[from] GiknError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl ExperimentError {
    /// True for errors the CLI reports as configuration problems (exit 2)
    /// rather than run failures (exit 1).
    pub fn is_config(&self) -> bool {
        matches!(self, ExperimentError::Config(_))
    }
}
