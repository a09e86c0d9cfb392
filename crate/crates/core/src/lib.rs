//! Numerical toolkit for approximating invariant measures of partially
//! hyperbolic skew products by periodic orbits.
//!
//! The crate is organised around one pipeline:
//!
//! * [`model`] defines the dynamical systems: circle fiber maps driven by a
//!   hyperbolic toral automorphism or by a full shift on two symbols.
//! * [`orbit`] enumerates base periodic orbits, locates fiber fixed points of
//!   composed fiber maps, and solves for periodic fiber paths over long words.
//! * [`measure`] evaluates empirical measures against a fixed countable family
//!   of test functions and computes truncated weak-star distances.
//! * [`pliss`] selects times with uniform averaged expansion along a sequence.
//! * [`shadow`] checks quasi-hyperbolicity of orbit segments, assembles
//!   pseudo-orbit plans that mix an anchor orbit with a target orbit, and
//!   closes plans into genuine periodic orbits by Newton iteration.
//! * [`gikn`] certifies that one periodic orbit is a good approximation of
//!   another and drives the descending construction that produces sequences of
//!   orbits with controlled exponent decay and summable approximation errors.
//! * [`experiment`] wires the above into reproducible table-producing runs.

pub mod gikn;
pub mod measure;
pub mod model;
pub mod numeric;
pub mod orbit;
pub mod pliss;
pub mod shadow;

pub use gikn::{
    DescendParams, EpsSchedule, GiknSequence, GoodApproximationCertificate,
};
pub use measure::{IndexClass, MeasureDistanceReport, TestFunction};
pub use model::{
    BasePoint, CircleArc, CircleFiberMap, Modulation, PhasePoint, ShiftBase, SkewProductSystem,
    SymbolicPoint, SymbolicSkew, TorusBase, TorusSkew,
};
pub use orbit::{
    EmpiricalMeasure, FiberFixedPoint, Itinerary, OrbitSegment, PeriodicOrbit, Stability,
    TorusRational,
};
pub use shadow::{
    PseudoOrbitPlan, QuasiHyperbolicString, ShadowOutcome, ShadowingConstants, SplittingSpec,
};
