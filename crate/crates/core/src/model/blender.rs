//! Interval certificates for blender-like behavior of fiber map pairs: joint
//! covering of a band by the two fiber images, and uniform expansion of one
//! map on a region.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::fiber::CircleFiberMap;
use crate::numeric::{mod1, TAU};

/// Closed arc on the circle R/Z, anchored at `start` (canonical coordinate)
/// with length `len` strictly between 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleArc {
    start: f64,
    len: f64,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum BlenderError {
    #[error("arc length must lie in (0, 1), got {0}")]
    BadArcLength(f64),
    #[error("margin must be nonnegative and keep the fattened arc shorter than the circle")]
    BadMargin(f64),
}

impl CircleArc {
    pub fn new(start: f64, len: f64) -> Result<Self, BlenderError> {
        if !(len.is_finite() && 0.0 < len && len < 1.0) {
            return Err(BlenderError::BadArcLength(len));
        }
        Ok(CircleArc {
            start: mod1(start),
            len,
        })
    }

    /// Arc centered at `c` with half-width `r`.
    pub fn centered(c: f64, r: f64) -> Result<Self, BlenderError> {
        Self::new(c - r, 2.0 * r)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn len(&self) -> f64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Whether the class of `t` lies on the (closed) arc.
    pub fn contains(&self, t: f64) -> bool {
        let rel = mod1(t - self.start);
        rel <= self.len || rel >= 1.0 - 1e-15
    }
}

/// Witness that the two fiber images jointly cover the arc fattened by the
/// requested margin.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoveringCertificate {
    pub arc: CircleArc,
    pub margin: f64,
    /// Images of the arc under the two maps, as arcs.
    pub images: [CircleArc; 2],
}

/// A sub-arc of the fattened target left uncovered by both images.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoveringFailure {
    pub uncovered: CircleArc,
    /// Length of the largest uncovered gap.
    pub deficit: f64,
}

/// Checks that `f0(arc)` together with `f1(arc)` covers the arc fattened by
/// `margin` on both sides. Works in lift coordinates: each image is a single
/// interval because the maps are monotone of degree one.
pub fn covering_check(
    f0: &CircleFiberMap,
    f1: &CircleFiberMap,
    arc: &CircleArc,
    margin: f64,
) -> Result<Result<CoveringCertificate, CoveringFailure>, BlenderError> {
    if !(margin.is_finite() && margin >= 0.0) || arc.len + 2.0 * margin >= 1.0 {
        return Err(BlenderError::BadMargin(margin));
    }
    let a = arc.start - margin;
    let b = arc.start + arc.len + margin;
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    let mut images = [*arc; 2];
    for (idx, f) in [f0, f1].iter().enumerate() {
        let lo = f.lift(arc.start);
        let hi = f.lift(arc.start + arc.len);
        images[idx] = CircleArc::new(mod1(lo), (hi - lo).min(1.0 - 1e-12))?;
        // All integer translates of [lo, hi] that can meet [a, b].
        let k_min = (a - hi).floor() as i64;
        let k_max = (b - lo).ceil() as i64;
        for k in k_min..=k_max {
            let l = lo + k as f64;
            let h = hi + k as f64;
            if h > a && l < b {
                pieces.push((l.max(a), h.min(b)));
            }
        }
    }
    pieces.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut covered_to = a;
    let mut best_gap: Option<(f64, f64)> = None;
    for &(l, h) in &pieces {
        if l > covered_to {
            let gap = (covered_to, l);
            if best_gap.map_or(true, |g| gap.1 - gap.0 > g.1 - g.0) {
                best_gap = Some(gap);
            }
            covered_to = covered_to.max(h);
        } else {
            covered_to = covered_to.max(h);
        }
    }
    if covered_to < b {
        let gap = (covered_to, b);
        if best_gap.map_or(true, |g| gap.1 - gap.0 > g.1 - g.0) {
            best_gap = Some(gap);
        }
    }
    Ok(match best_gap {
        None => Ok(CoveringCertificate {
            arc: *arc,
            margin,
            images,
        }),
        Some((lo, hi)) => Err(CoveringFailure {
            uncovered: CircleArc::new(mod1(lo), hi - lo)?,
            deficit: hi - lo,
        }),
    })
}

/// Outcome of a sampled uniform-expansion check with a rigorous slope bound.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub verified: bool,
    /// Certified lower bound for the derivative on the region.
    pub inf_bound: f64,
    pub samples: usize,
}

/// Certifies `f' >= tau` on the region by dense sampling plus the global
/// second-derivative bound `|f''| <= 2*pi*|a|` of the sinusoidal family.
pub fn expansion_factor_check(f: &CircleFiberMap, region: &CircleArc, tau: f64) -> ExpansionReport {
    let n = ((region.len / 5e-5).ceil() as usize).clamp(32, 200_000);
    let h = region.len / n as f64;
    let mut min_sample = f64::MAX;
    for i in 0..=n {
        let t = region.start + i as f64 * h;
        min_sample = min_sample.min(f.deriv(t));
    }
    let inf_bound = min_sample - TAU * f.a().abs() * h / 2.0;
    ExpansionReport {
        verified: inf_bound >= tau,
        inf_bound,
        samples: n + 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn default_pair() -> (CircleFiberMap, CircleFiberMap) {
        (
            CircleFiberMap::new(0.8, 1e-6).unwrap(),
            CircleFiberMap::new(-0.8, 0.0).unwrap(),
        )
    }

    #[test]
    fn arc_validation_and_membership() {
        assert!(CircleArc::new(0.2, 0.0).is_err());
        assert!(CircleArc::new(0.2, 1.0).is_err());
        let arc = CircleArc::new(0.9, 0.2).unwrap();
        assert!(arc.contains(0.95));
        assert!(arc.contains(0.05));
        assert!(arc.contains(0.9));
        assert!(arc.contains(0.1));
        assert!(!arc.contains(0.5));
    }

    #[test]
    fn band_is_jointly_covered_with_margin() {
        let (f0, f1) = default_pair();
        let arc = CircleArc::centered(0.5, 0.05).unwrap();
        let cert = covering_check(&f0, &f1, &arc, 0.01).unwrap().unwrap();
        assert_eq!(cert.margin, 0.01);
        // The expanding map's image alone stretches past both fattened ends.
        let img1 = cert.images[1];
        assert!(img1.len() > 0.12);
    }

    #[test]
    fn covering_fails_away_from_the_band() {
        let (f0, f1) = default_pair();
        // Around t = 0.1 both images drift toward the contracting side and a
        // gap opens between them.
        let arc = CircleArc::centered(0.1, 0.05).unwrap();
        let fail = covering_check(&f0, &f1, &arc, 0.01)
            .unwrap()
            .unwrap_err();
        assert!(fail.deficit > 0.02, "deficit = {}", fail.deficit);
        assert!(fail.uncovered.start() > 0.03 && fail.uncovered.start() < 0.09);
    }

    #[test]
    fn covering_rejects_bad_margin() {
        let (f0, f1) = default_pair();
        let arc = CircleArc::centered(0.5, 0.05).unwrap();
        assert!(matches!(
            covering_check(&f0, &f1, &arc, -0.5),
            Err(BlenderError::BadMargin(_))
        ));
        assert!(matches!(
            covering_check(&f0, &f1, &arc, 0.5),
            Err(BlenderError::BadMargin(_))
        ));
    }

    #[test]
    fn expanding_map_verifies_on_band() {
        let (_, f1) = default_pair();
        let band = CircleArc::centered(0.5, 0.05).unwrap();
        let report = expansion_factor_check(&f1, &band, 1.5);
        assert!(report.verified);
        // Minimum over the band sits at the endpoints: 1 + 0.8*cos(0.9*pi).
        let expected = 1.0 - 0.8 * (0.9 * std::f64::consts::PI).cos();
        assert!((report.inf_bound - expected).abs() < 1e-3);
        assert!(!expansion_factor_check(&f1, &band, 1.77).verified);
    }

    #[test]
    fn contracting_map_fails_expansion_check() {
        let (f0, _) = default_pair();
        let band = CircleArc::centered(0.5, 0.05).unwrap();
        assert!(!expansion_factor_check(&f0, &band, 1.5).verified);
    }

    proptest! {
        #[test]
        fn covering_is_monotone_in_margin(
            c in 0.35..0.65f64,
            r in 0.02..0.08f64,
            m1 in 0.0..0.02f64,
            m2 in 0.0..0.02f64,
        ) {
            // If the covering holds with the larger margin it holds with the
            // smaller one.
            let (f0, f1) = default_pair();
            let arc = CircleArc::centered(c, r).unwrap();
            let (lo, hi) = if m1 < m2 { (m1, m2) } else { (m2, m1) };
            let big = covering_check(&f0, &f1, &arc, hi).unwrap();
            let small = covering_check(&f0, &f1, &arc, lo).unwrap();
            if big.is_ok() {
                prop_assert!(small.is_ok());
            }
        }

        #[test]
        fn expansion_bound_is_monotone_in_tau(
            c in 0.4..0.6f64,
            r in 0.01..0.1f64,
            tau1 in 1.0..2.0f64,
            tau2 in 1.0..2.0f64,
        ) {
            let (_, f1) = default_pair();
            let band = CircleArc::centered(c, r).unwrap();
            let (lo, hi) = if tau1 < tau2 { (tau1, tau2) } else { (tau2, tau1) };
            if expansion_factor_check(&f1, &band, hi).verified {
                prop_assert!(expansion_factor_check(&f1, &band, lo).verified);
            }
        }
    }
}
