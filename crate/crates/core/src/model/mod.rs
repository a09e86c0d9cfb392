//! Model systems: circle fiber maps, hyperbolic base dynamics, and the skew
//! products combining them.

mod base;
mod blender;
mod fiber;
mod skew;

pub use base::{BaseError, ShiftBase, TorusBase};
pub use blender::{
    covering_check, expansion_factor_check, BlenderError, CircleArc, CoveringCertificate,
    CoveringFailure,
};
pub use fiber::{CircleFiberMap, FiberMapError};
pub use skew::{
    BasePoint, Modulation, PhasePoint, PhaseSpaceKind, SkewError, SkewProductSystem,
    SymbolicPoint, SymbolicSkew, TorusSkew, MAX_SKEW_STEPS,
};
