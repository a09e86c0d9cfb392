//! Periodic orbits of the skew products: base enumeration, fiber fixed
//! points, long-word fiber path solving, orbit segments, and empirical
//! measures.

mod enumerate;
mod fiber_fixed;
mod path;
mod periodic;
mod segment;

pub use enumerate::{
    minimal_rotation, primitive_period, shift_words, torus_periodic_points,
    torus_periodic_points_oracle,
};
pub use fiber_fixed::{find_fiber_fixed_points, ComposedFiberMap, FiberFixedPoint, FixedPointScan};
pub use path::{
    compose_backward, compose_forward, newton_polish, periodic_fiber_path, word_exponent,
    word_fiber_path, FiberPath, PathMode, PathOptions, RotationPolicy,
};
pub use periodic::{periodic_orbits, OrbitBudget};
pub use segment::{EmpiricalMeasure, OrbitSegment};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{PhasePoint, SkewError, SkewProductSystem, SymbolicPoint, TorusBase};

/// Errors raised by orbit construction and enumeration.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum OrbitError {
    #[error(transparent)]
    Model(#[from] SkewError),
    #[error("enumeration budget exceeded: {what} would need {needed} > limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: usize,
        limit: usize,
    },
    #[error("no periodic fiber path found over the requested word")]
    PathNotFound,
    #[error("itinerary does not match the system's base")]
    ItineraryMismatch,
    #[error("empty word or zero period requested")]
    EmptyWord,
    #[error("atom weights must be nonnegative and sum to 1, got sum {0}")]
    BadWeights(f64),
    #[error("empirical measure mixes points from different phase spaces")]
    MixedMeasure,
    #[error("orbit data is inconsistent: {0}")]
    Inconsistent(&'static str),
}

/// Exact rational point of the 2-torus with a shared denominator; the natural
/// coordinates for periodic points of an integer automorphism. Always stored
/// reduced with `0 <= num < den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusRational {
    num: [i64; 2],
    den: i64,
}

impl TorusRational {
    pub fn new(num: [i64; 2], den: i64) -> Result<Self, OrbitError> {
        if den <= 0 {
            return Err(OrbitError::Inconsistent("denominator must be positive"));
        }
        let n0 = num[0].rem_euclid(den);
        let n1 = num[1].rem_euclid(den);
        let g = gcd(gcd(n0, n1), den);
        Ok(TorusRational {
            num: [n0 / g, n1 / g],
            den: den / g,
        })
    }

    pub fn num(&self) -> [i64; 2] {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn floats(&self) -> [f64; 2] {
        [
            self.num[0] as f64 / self.den as f64,
            self.num[1] as f64 / self.den as f64,
        ]
    }

    /// Exact image under the automorphism; the denominator never grows.
    pub fn apply(&self, base: &TorusBase) -> TorusRational {
        let m = base.matrix();
        let n0 = (m[0][0] * self.num[0] + m[0][1] * self.num[1]).rem_euclid(self.den);
        let n1 = (m[1][0] * self.num[0] + m[1][1] * self.num[1]).rem_euclid(self.den);
        TorusRational::new([n0, n1], self.den).expect("den stays positive")
    }

    /// Exact base period under the automorphism (first return time).
    pub fn base_period(&self, base: &TorusBase, cap: usize) -> Option<usize> {
        let mut p = self.apply(base);
        for k in 1..=cap {
            if p == *self {
                return Some(k);
            }
            p = p.apply(base);
        }
        None
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a.max(1)
}

/// Base itinerary of a periodic orbit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Itinerary {
    /// Symbol word read cyclically (symbolic base).
    Word(Vec<u8>),
    /// Exact rational starting point (torus base).
    Torus(TorusRational),
}

impl Itinerary {
    pub fn len_hint(&self) -> Option<usize> {
        match self {
            Itinerary::Word(w) => Some(w.len()),
            Itinerary::Torus(_) => None,
        }
    }
}

/// Stability type of a periodic orbit along its center direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Attracting,
    Repelling,
    /// The center multiplier is within 1e-8 of 1.
    Neutral,
}

/// Window inside which a center multiplier counts as neutral, expressed on
/// the log scale per full period.
const NEUTRAL_LOG_WINDOW: f64 = 1e-8;

/// A periodic orbit of the skew product, stored as its base itinerary plus
/// the fiber coordinate above each base position.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub itinerary: Itinerary,
    pub period: usize,
    /// Fiber coordinate at step i; `fiber_path[0]` sits over the itinerary's
    /// starting base position.
    pub fiber_path: Vec<f64>,
    /// Averaged log center derivative along the orbit.
    pub center_exponent: f64,
    pub stability: Stability,
    /// Max one-step closure error of the stored path under re-iteration.
    pub step_defect: f64,
}

impl PeriodicOrbit {
    /// Builds the orbit record from an itinerary and a fiber path, recomputing
    /// the exponent, stability, and defect from the system.
    pub fn from_fiber_path(
        system: &SkewProductSystem,
        itinerary: Itinerary,
        fiber_path: Vec<f64>,
    ) -> Result<Self, OrbitError> {
        if fiber_path.is_empty() {
            return Err(OrbitError::EmptyWord);
        }
        let period = fiber_path.len();
        let mut orbit = PeriodicOrbit {
            itinerary,
            period,
            fiber_path,
            center_exponent: 0.0,
            stability: Stability::Neutral,
            step_defect: 0.0,
        };
        let points = orbit.points(system)?;
        let mut clog_sum = 0.0;
        let mut defect = 0.0_f64;
        for (i, p) in points.iter().enumerate() {
            clog_sum += system.center_log_derivative(p)?;
            let image = system.apply(p, 1)?;
            let next = &points[(i + 1) % period];
            defect = defect.max(system.phase_dist(&image, next)?);
        }
        orbit.center_exponent = clog_sum / period as f64;
        orbit.stability = stability_from_log(orbit.center_exponent * period as f64);
        orbit.step_defect = defect;
        Ok(orbit)
    }

    pub fn fiber_start(&self) -> f64 {
        self.fiber_path[0]
    }

    /// Center multiplier over one full period, `exp(period * exponent)`;
    /// saturates at the float range for very long expanding orbits.
    pub fn multiplier(&self) -> f64 {
        (self.center_exponent * self.period as f64).exp()
    }

    /// The orbit's phase points in dynamical order.
    pub fn points(&self, system: &SkewProductSystem) -> Result<Vec<PhasePoint>, OrbitError> {
        match (&self.itinerary, system) {
            (Itinerary::Word(word), SkewProductSystem::Symbolic(_)) => {
                if word.len() != self.period {
                    return Err(OrbitError::Inconsistent("word length != period"));
                }
                let cycle = std::sync::Arc::new(word.clone());
                (0..self.period)
                    .map(|i| {
                        Ok(PhasePoint::symbolic(
                            SymbolicPoint::periodic_at(std::sync::Arc::clone(&cycle), i)?,
                            self.fiber_path[i],
                        ))
                    })
                    .collect()
            }
            (Itinerary::Torus(start), SkewProductSystem::Torus(sys)) => {
                let mut pts = Vec::with_capacity(self.period);
                let mut x = *start;
                for i in 0..self.period {
                    pts.push(PhasePoint::torus(x.floats(), self.fiber_path[i]));
                    x = x.apply(sys.base());
                }
                if x != *start {
                    return Err(OrbitError::Inconsistent(
                        "base point does not close up at the stated period",
                    ));
                }
                Ok(pts)
            }
            _ => Err(OrbitError::ItineraryMismatch),
        }
    }

    /// Uniform empirical measure on the orbit.
    pub fn measure(&self, system: &SkewProductSystem) -> Result<EmpiricalMeasure, OrbitError> {
        Ok(EmpiricalMeasure::uniform(self.points(system)?))
    }

    /// Re-iterates the stored path and returns the max one-step closure error.
    pub fn validate(&self, system: &SkewProductSystem) -> Result<f64, OrbitError> {
        let points = self.points(system)?;
        let mut defect = 0.0_f64;
        for (i, p) in points.iter().enumerate() {
            let image = system.apply(p, 1)?;
            defect = defect.max(system.phase_dist(&image, &points[(i + 1) % self.period])?);
        }
        Ok(defect)
    }

    /// Canonical key for deduplication: itinerary rotated to its
    /// lexicographically minimal form (symbolic), or the smallest rational
    /// point on the base cycle (torus).
    pub fn canonical_key(&self, system: &SkewProductSystem) -> Result<CanonicalOrbitKey, OrbitError> {
        match (&self.itinerary, system) {
            (Itinerary::Word(word), SkewProductSystem::Symbolic(_)) => {
                let r = minimal_rotation(word);
                let rotated: Vec<u8> = (0..word.len()).map(|i| word[(r + i) % word.len()]).collect();
                // Quantize the fiber start so float jitter between equivalent
                // solves does not split keys.
                let t = (self.fiber_path[r] * 1e10).round() as i64;
                Ok(CanonicalOrbitKey::Word(rotated, t))
            }
            (Itinerary::Torus(start), SkewProductSystem::Torus(sys)) => {
                let mut best = *start;
                let mut x = start.apply(sys.base());
                let mut best_idx = 0usize;
                for i in 1..self.period {
                    if x < best {
                        best = x;
                        best_idx = i;
                    }
                    x = x.apply(sys.base());
                }
                let t = (self.fiber_path[best_idx] * 1e10).round() as i64;
                Ok(CanonicalOrbitKey::Torus(best, t))
            }
            _ => Err(OrbitError::ItineraryMismatch),
        }
    }
}

/// Deduplication key for periodic orbits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonicalOrbitKey {
    Word(Vec<u8>, i64),
    Torus(TorusRational, i64),
}

pub(crate) fn stability_from_log(log_multiplier: f64) -> Stability {
    if log_multiplier.abs() < NEUTRAL_LOG_WINDOW {
        Stability::Neutral
    } else if log_multiplier < 0.0 {
        Stability::Attracting
    } else {
        Stability::Repelling
    }
}
