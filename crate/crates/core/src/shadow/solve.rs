//! Solving for the true periodic orbit near a pseudo-orbit, and estimating
//! the shadowing constant from solved samples.

use super::plan::PseudoOrbitPlan;
use super::ShadowError;
use crate::model::{BasePoint, SkewProductSystem};
use crate::numeric::{circle_dist, mod1};
use crate::orbit::{periodic_fiber_path, Itinerary, PathOptions, PeriodicOrbit, RotationPolicy};
use serde::{Deserialize, Serialize};

/// Shadowing-bound parameters: a true orbit is expected within `l * d` of any
/// pseudo-orbit with jumps at most `d <= d0`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ShadowingConstants {
    pub l: f64,
    pub d0: f64,
}

impl Default for ShadowingConstants {
    fn default() -> Self {
        ShadowingConstants { l: 2.0, d0: 1e-2 }
    }
}

/// A solved shadowing instance. The bound check is diagnostic: a violated
/// bound is reported, not raised as an error.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShadowOutcome {
    pub orbit: PeriodicOrbit,
    /// Max pointwise distance from the orbit to the plan.
    pub max_distance: f64,
    /// `max_distance / jump`; zero for an exact (jump-free) plan.
    pub ratio: f64,
    /// Whether `max_distance <= l * jump` held.
    pub bound_ok: bool,
}

/// Max closure residual accepted when re-iterating a solved orbit.
const RESIDUAL_TOL: f64 = 1e-9;

/// Newton controls for the torus solver.
const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITERS: usize = 60;
const NEWTON_STEP_CAP: f64 = 0.1;
const NEWTON_MAX_BACKTRACKS: usize = 30;

/// Finds the true periodic orbit shadowing `plan` and reports its distance
/// to the plan against the expected bound `constants.l * plan.jump`.
pub fn shadow_periodic(
    system: &SkewProductSystem,
    plan: &PseudoOrbitPlan,
    constants: &ShadowingConstants,
) -> Result<ShadowOutcome, ShadowError> {
    if plan.is_empty() {
        return Err(ShadowError::TargetUnrealizable("empty plan"));
    }
    let orbit = match system {
        SkewProductSystem::Symbolic(sym) => {
            let word = plan.word()?;
            let template: Vec<f64> = plan.points.iter().map(|p| p.t).collect();
            let opts = PathOptions {
                rotations: RotationPolicy::ZeroOnly,
                ..PathOptions::default()
            };
            let path = periodic_fiber_path(sym, &word, Some(&template), plan.points[0].t, &opts)
                .ok_or(ShadowError::SolverDiverged(opts.max_periods))?;
            PeriodicOrbit::from_fiber_path(system, Itinerary::Word(word), path.path)?
        }
        SkewProductSystem::Torus(_) => shadow_periodic_torus(system, plan)?,
    };
    if orbit.step_defect > RESIDUAL_TOL {
        return Err(ShadowError::NotPeriodic(orbit.step_defect));
    }

    let orbit_points = orbit.points(system)?;
    let mut max_distance = 0.0f64;
    for (p, q) in orbit_points.iter().zip(&plan.points) {
        max_distance = max_distance.max(system.phase_dist(p, q)?);
    }
    let (ratio, bound_ok) = if plan.jump > 0.0 {
        (
            max_distance / plan.jump,
            max_distance <= constants.l * plan.jump,
        )
    } else {
        (0.0, max_distance <= 1e-12)
    };
    Ok(ShadowOutcome {
        orbit,
        max_distance,
        ratio,
        bound_ok,
    })
}

/// Damped Newton in lifted coordinates for torus plans. The plan's base
/// cycle must be the anchor's rational cycle; the solved base is snapped back
/// to that rational and only the fiber path is kept from the solve.
fn shadow_periodic_torus(
    system: &SkewProductSystem,
    plan: &PseudoOrbitPlan,
) -> Result<PeriodicOrbit, ShadowError> {
    let sys = system.as_torus().expect("checked by caller");
    let n = plan.len();
    let m = sys.base().matrix();
    let reps: Vec<([f64; 2], f64)> = plan
        .points
        .iter()
        .map(|p| match &p.base {
            BasePoint::Torus(x) => Ok((*x, p.t)),
            BasePoint::Symbolic(_) => Err(ShadowError::TargetUnrealizable(
                "symbolic points in a torus plan",
            )),
        })
        .collect::<Result<_, _>>()?;

    // Gluing integers per step, frozen from the plan representatives so the
    // lifted return map stays smooth across Newton iterations.
    let mut glue = Vec::with_capacity(n);
    for i in 0..n {
        let (x, t) = reps[i];
        let (xn, tn) = reps[(i + 1) % n];
        let bx = [
            m[0][0] as f64 * x[0] + m[0][1] as f64 * x[1],
            m[1][0] as f64 * x[0] + m[1][1] as f64 * x[1],
        ];
        let ft = sys.fiber_at(x).lift(t);
        glue.push([
            (bx[0] - xn[0]).round(),
            (bx[1] - xn[1]).round(),
            (ft - tn).round(),
        ]);
    }

    // G(v) = F_glued^n(v) - v and its Jacobian, both in lifted coordinates.
    let eval = |v: [f64; 3]| -> ([f64; 3], [[f64; 3]; 3]) {
        let mut x = [v[0], v[1]];
        let mut t = v[2];
        let mut jac = identity3();
        for g in &glue {
            let fib = sys.fiber_at(x);
            let step = [
                [m[0][0] as f64, m[0][1] as f64, 0.0],
                [m[1][0] as f64, m[1][1] as f64, 0.0],
                [sys.fiber_dx1(x, t), 0.0, fib.deriv(t)],
            ];
            jac = mat_mul(step, jac);
            let xn = [
                m[0][0] as f64 * x[0] + m[0][1] as f64 * x[1] - g[0],
                m[1][0] as f64 * x[0] + m[1][1] as f64 * x[1] - g[1],
            ];
            t = fib.lift(t) - g[2];
            x = xn;
        }
        ([x[0] - v[0], x[1] - v[1], t - v[2]], jac)
    };

    let mut v = [reps[0].0[0], reps[0].0[1], reps[0].1];
    let (mut gval, mut jac) = eval(v);
    let mut gnorm = norm_inf(gval);
    let mut iters = 0;
    while gnorm > NEWTON_TOL {
        iters += 1;
        if iters > NEWTON_MAX_ITERS {
            return Err(ShadowError::SolverDiverged(NEWTON_MAX_ITERS));
        }
        let dg = [
            [jac[0][0] - 1.0, jac[0][1], jac[0][2]],
            [jac[1][0], jac[1][1] - 1.0, jac[1][2]],
            [jac[2][0], jac[2][1], jac[2][2] - 1.0],
        ];
        let mut step = solve3(dg, [-gval[0], -gval[1], -gval[2]])
            .ok_or(ShadowError::SolverDiverged(iters))?;
        let cap = norm_inf(step);
        if cap > NEWTON_STEP_CAP {
            let s = NEWTON_STEP_CAP / cap;
            step = [step[0] * s, step[1] * s, step[2] * s];
        }
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..=NEWTON_MAX_BACKTRACKS {
            let trial = [
                v[0] + scale * step[0],
                v[1] + scale * step[1],
                v[2] + scale * step[2],
            ];
            let (tg, tj) = eval(trial);
            let tn = norm_inf(tg);
            if tn < gnorm {
                v = trial;
                gval = tg;
                jac = tj;
                gnorm = tn;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            return Err(ShadowError::SolverDiverged(iters));
        }
    }

    // Snap the base to the anchor's exact rational cycle and keep only the
    // solved fiber start; the path is rebuilt by genuine iteration.
    let start = match &plan.anchor.itinerary {
        Itinerary::Torus(r) => *r,
        Itinerary::Word(_) => {
            return Err(ShadowError::TargetUnrealizable(
                "torus plan with a symbolic anchor",
            ))
        }
    };
    let mut fiber_path = Vec::with_capacity(n);
    let mut x = start;
    let mut t = mod1(v[2]);
    for _ in 0..n {
        fiber_path.push(t);
        t = sys.fiber_at(x.floats()).apply(t);
        x = x.apply(sys.base());
    }
    let closure = circle_dist(t, fiber_path[0]);
    if closure > RESIDUAL_TOL {
        return Err(ShadowError::NotPeriodic(closure));
    }
    Ok(PeriodicOrbit::from_fiber_path(
        system,
        Itinerary::Torus(start),
        fiber_path,
    )?)
}

fn identity3() -> [[f64; 3]; 3] {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

fn mat_mul(a: [[f64; 3]; 3], b: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut c = [[0.0; 3]; 3];
    for (i, row) in c.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn norm_inf(v: [f64; 3]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// 3x3 linear solve by Gaussian elimination with partial pivoting; `None`
/// when the matrix is numerically singular.
fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0f64; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| {
            m[i][col]
                .abs()
                .partial_cmp(&m[j][col].abs())
                .expect("finite entries")
        })?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = [0.0f64; 3];
    for i in (0..3).rev() {
        let mut s = m[i][3];
        for k in i + 1..3 {
            s -= m[i][k] * x[k];
        }
        x[i] = s / m[i][i];
    }
    Some(x)
}

/// Fits shadowing constants from solved samples `(jump, max_distance)`:
/// `l` doubles the worst observed ratio and `d0` is the largest jump that
/// solved. Requires at least three samples spanning a decade of jumps.
pub fn estimate_shadowing_constant(
    samples: &[(f64, f64)],
) -> Result<ShadowingConstants, ShadowError> {
    if samples.len() < 3 {
        return Err(ShadowError::InsufficientSamples);
    }
    let mut min_d = f64::INFINITY;
    let mut max_d = 0.0f64;
    let mut worst = 0.0f64;
    for &(d, dist) in samples {
        if !(d > 0.0) || !dist.is_finite() {
            return Err(ShadowError::InsufficientSamples);
        }
        min_d = min_d.min(d);
        max_d = max_d.max(d);
        worst = worst.max(dist / d);
    }
    if max_d / min_d < 10.0 * (1.0 - 1e-12) {
        return Err(ShadowError::InsufficientSamples);
    }
    Ok(ShadowingConstants {
        l: (2.0 * worst).max(1.0),
        d0: max_d,
    })
}
