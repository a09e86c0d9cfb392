//! Circle fiber maps of degree one with sinusoidal nonlinearity.

use crate::numeric::{cos2pi, mod1, sin2pi, TAU};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised when constructing a [`CircleFiberMap`].
#[derive(Clone, Debug, Error, PartialEq)]
pub enum FiberMapError {
    /// Diffeomorphism requirement: the derivative 1 + a*cos(2*pi*t) must stay
    /// positive, so |a| < 1.
    #[error("nonlinearity amplitude must satisfy |a| < 1, got {0}")]
    AmplitudeTooLarge(f64),
    /// The rotation offset must be a finite canonical circle coordinate.
    #[error("rotation offset must be finite and lie in [0, 1), got {0}")]
    OffsetOutOfRange(f64),
}

/// Orientation-preserving circle diffeomorphism
/// `t -> t + beta + (a / 2*pi) * sin(2*pi*t)  (mod 1)`.
///
/// The derivative is `1 + a*cos(2*pi*t)`, pinched in `[1 - |a|, 1 + |a|]`, so
/// `|a| < 1` keeps the map a diffeomorphism. `a` controls how strongly the
/// fiber contracts near `t = 1/2` (for `a > 0`) or expands there (`a < 0`);
/// `beta` is a rigid rotation offset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleFiberMap {
    a: f64,
    beta: f64,
}

impl CircleFiberMap {
    /// Validates `|a| < 1` and `beta` in [0, 1).
    pub fn new(a: f64, beta: f64) -> Result<Self, FiberMapError> {
        if !a.is_finite() || a.abs() >= 1.0 {
            return Err(FiberMapError::AmplitudeTooLarge(a));
        }
        if !beta.is_finite() || !(0.0..1.0).contains(&beta) {
            return Err(FiberMapError::OffsetOutOfRange(beta));
        }
        Ok(CircleFiberMap { a, beta })
    }

    /// Nonlinearity amplitude.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Rotation offset.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Same map with the amplitude replaced; used for base-modulated fibers
    /// where the effective amplitude never exceeds the original in magnitude.
    pub(crate) fn with_amplitude(&self, a: f64) -> CircleFiberMap {
        CircleFiberMap { a, beta: self.beta }
    }

    /// Lift of the map to the real line. Commutes with integer translations,
    /// so it can be applied to any representative.
    #[inline]
    pub fn lift(&self, x: f64) -> f64 {
        x + self.beta + (self.a / TAU) * sin2pi(x)
    }

    /// The circle map itself.
    #[inline]
    pub fn apply(&self, t: f64) -> f64 {
        mod1(self.lift(t))
    }

    /// Derivative `1 + a*cos(2*pi*t)`, always positive.
    #[inline]
    pub fn deriv(&self, t: f64) -> f64 {
        1.0 + self.a * cos2pi(t)
    }

    /// Log of the derivative; the one-step center expansion rate.
    #[inline]
    pub fn log_deriv(&self, t: f64) -> f64 {
        self.deriv(t).ln()
    }

    /// Inverse map. The lift is a strictly increasing homeomorphism of the
    /// line commuting with integer translation, so every solution of
    /// `lift(t) = y (mod 1)` gives the same circle point. One integer level is
    /// fixed up front and a bracketed Newton iteration solves the resulting
    /// strictly monotone scalar equation; bisection fallback makes the search
    /// globally convergent (an unguarded Newton step can overshoot the flat
    /// part of the lift and orbit the circle forever).
    pub fn invert(&self, y: f64) -> f64 {
        // Inverting the rotation part leaves a residual below |a|/(2*pi) < 1/6
        // in absolute value, so the nearest integer level is the right branch.
        let start = y - self.beta;
        let target = y + (self.lift(start) - y).round();
        let g = |t: f64| self.lift(t) - target;

        let mut g0 = g(start);
        if g0.abs() < 1e-15 {
            return mod1(start);
        }
        // Expand toward the root until the residual changes sign. The lift
        // gains a full unit per unit step, so this terminates quickly.
        let (mut lo, mut hi) = (start, start);
        let mut step = 0.25;
        if g0 > 0.0 {
            loop {
                lo -= step;
                if g(lo) <= 0.0 {
                    break;
                }
                step *= 2.0;
            }
        } else {
            loop {
                hi += step;
                if g(hi) >= 0.0 {
                    break;
                }
                step *= 2.0;
            }
        }

        let mut t = 0.5 * (lo + hi);
        for _ in 0..100 {
            g0 = g(t);
            if g0.abs() < 1e-15 {
                break;
            }
            if g0 > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let next = t - g0 / self.deriv(t);
            t = if next > lo && next < hi {
                next
            } else {
                0.5 * (lo + hi)
            };
        }
        mod1(t)
    }
}
