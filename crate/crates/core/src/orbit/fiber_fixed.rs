//! Fixed points of composed circle fiber maps, located by a sign-change scan
//! of the lift displacement plus bisection and Newton polish.

use serde::{Deserialize, Serialize};

use super::{stability_from_log, Stability};
use crate::model::CircleFiberMap;
use crate::numeric::mod1;

/// Composition `f_{k-1} o ... o f_1 o f_0` of circle fiber maps, evaluated
/// through lifts so displacement counts are meaningful.
#[derive(Clone, Debug)]
pub struct ComposedFiberMap {
    maps: Vec<CircleFiberMap>,
}

impl ComposedFiberMap {
    pub fn new(maps: Vec<CircleFiberMap>) -> Self {
        ComposedFiberMap { maps }
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// Composed lift; commutes with integer translation.
    pub fn lift(&self, x: f64) -> f64 {
        self.maps.iter().fold(x, |acc, f| f.lift(acc))
    }

    pub fn apply(&self, t: f64) -> f64 {
        mod1(self.lift(t))
    }

    /// Chain-rule derivative along the composition.
    pub fn deriv(&self, t: f64) -> f64 {
        let mut x = t;
        let mut dp = 1.0;
        for f in &self.maps {
            dp *= f.deriv(x);
            x = f.lift(x);
        }
        dp
    }

    /// Lift displacement `lift(t) - t`; fixed points of the circle map are the
    /// parameters where this is an integer.
    pub fn displacement(&self, t: f64) -> f64 {
        self.lift(t) - t
    }
}

/// A fixed point of a composed fiber map together with its multiplier.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FiberFixedPoint {
    pub t: f64,
    pub multiplier: f64,
    pub stability: Stability,
}

/// Result of a fixed-point scan.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixedPointScan {
    pub points: Vec<FiberFixedPoint>,
    /// Set when the composition is the identity to sampling precision: every
    /// point is fixed and `points` holds the grid samples only.
    pub degenerate_family: bool,
    /// Human-readable remark, e.g. when no fixed point exists because the
    /// displacement range misses the integers.
    pub note: Option<String>,
}

/// Locates all fixed points of the composition on a uniform grid of the given
/// resolution, refining each candidate to `|displacement - k| < tol`.
///
/// The displacement is continuous and changes by exactly the winding (zero
/// here, since each factor has degree one) around the circle, so every fixed
/// point shows up as a crossing of an integer level between adjacent grid
/// samples once the grid resolves the oscillation.
pub fn find_fiber_fixed_points(
    maps: &ComposedFiberMap,
    grid: usize,
    tol: f64,
) -> FixedPointScan {
    let grid = grid.max(16);
    let h = 1.0 / grid as f64;
    let disp: Vec<f64> = (0..=grid).map(|i| maps.displacement(i as f64 * h)).collect();
    let max_abs = disp.iter().fold(0.0_f64, |m, &d| m.max(d.abs()));
    let max_dev = (0..=grid)
        .map(|i| (maps.deriv(i as f64 * h) - 1.0).abs())
        .fold(0.0_f64, f64::max);
    if max_abs < 1e-13 && max_dev < 1e-8 {
        // Identity composition: the whole circle is fixed.
        let points = (0..grid)
            .map(|i| FiberFixedPoint {
                t: i as f64 * h,
                multiplier: 1.0,
                stability: Stability::Neutral,
            })
            .collect();
        return FixedPointScan {
            points,
            degenerate_family: true,
            note: Some("identity composition: every fiber point is fixed".into()),
        };
    }

    let lo = disp.iter().cloned().fold(f64::MAX, f64::min);
    let hi = disp.iter().cloned().fold(f64::MIN, f64::max);
    let mut points: Vec<FiberFixedPoint> = Vec::new();
    let k_lo = lo.floor() as i64;
    let k_hi = hi.ceil() as i64;
    for k in k_lo..=k_hi {
        let kf = k as f64;
        if kf < lo - 1.0 || kf > hi + 1.0 {
            continue;
        }
        for i in 0..grid {
            let a = disp[i] - kf;
            let b = disp[i + 1] - kf;
            let t = if a == 0.0 {
                Some(i as f64 * h)
            } else if a * b < 0.0 {
                Some(bisect(maps, kf, i as f64 * h, (i + 1) as f64 * h, a, tol))
            } else {
                None
            };
            if let Some(mut t) = t {
                t = polish(maps, kf, t, tol);
                let resid = (maps.displacement(t) - kf).abs();
                if resid < tol {
                    push_dedup(&mut points, maps, mod1(t), h);
                }
            }
        }
    }
    points.sort_by(|p, q| p.t.total_cmp(&q.t));
    let note = if points.is_empty() {
        Some(format!(
            "no fixed point: displacement range [{lo:.6}, {hi:.6}] stays away from the integers"
        ))
    } else {
        None
    };
    FixedPointScan {
        points,
        degenerate_family: false,
        note,
    }
}

fn bisect(maps: &ComposedFiberMap, k: f64, mut a: f64, mut b: f64, fa: f64, tol: f64) -> f64 {
    let mut sign_a = fa.signum();
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        let fm = maps.displacement(m) - k;
        if fm.abs() < tol * 0.5 || (b - a) < 1e-16 {
            return m;
        }
        if fm.signum() == sign_a {
            a = m;
            sign_a = fm.signum();
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn polish(maps: &ComposedFiberMap, k: f64, mut t: f64, tol: f64) -> f64 {
    for _ in 0..8 {
        let g = maps.displacement(t) - k;
        if g.abs() < tol * 1e-3 {
            break;
        }
        let dg = maps.deriv(t) - 1.0;
        if dg.abs() < 1e-12 {
            break;
        }
        t -= g / dg;
    }
    t
}

fn push_dedup(points: &mut Vec<FiberFixedPoint>, maps: &ComposedFiberMap, t: f64, h: f64) {
    let sep = (h * 1e-3).max(1e-12);
    if points
        .iter()
        .any(|p| crate::numeric::circle_dist(p.t, t) < sep)
    {
        return;
    }
    let m = maps.deriv(t);
    points.push(FiberFixedPoint {
        t,
        multiplier: m,
        stability: stability_from_log(m.ln()),
    });
}
