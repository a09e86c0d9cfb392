//! Assembly of spliced pseudo-orbit plans.
//!
//! A plan realizes the mixture `alpha * anchor + (1 - alpha) * target` by
//! following the target realization for t steps and then looping the anchor
//! orbit for m steps, with m/t close to alpha/(1-alpha). Both arcs are
//! genuine orbit pieces, so the only discontinuities are the two seams where
//! the fiber coordinate jumps between the target and anchor paths. The
//! spliced string must verify quasi-hyperbolicity at the square root of the
//! mixture rate at some cyclic cut; the verified cut is recorded.
//!
//! Torus systems do not support splicing (base arcs of a toral automorphism
//! cannot be concatenated freely); their pseudo-orbits are built by bumping
//! one fiber coordinate of a genuine periodic orbit instead.

use super::quasi::{quasi_log_scan, QuasiStatus, SplittingSpec};
use super::ShadowError;
use crate::measure::{center_exponent, weak_star_distance, DEFAULT_METRIC_DEPTH};
use crate::model::{BasePoint, PhasePoint, SkewProductSystem};
use crate::numeric::{circle_dist, mod1};
use crate::orbit::{EmpiricalMeasure, OrbitSegment, PeriodicOrbit};
use serde::{Deserialize, Serialize};

/// Knobs of plan assembly that are not part of the mixture itself.
#[derive(Clone, Copy, Debug)]
pub struct PlanOptions {
    /// Exponents within this band of zero count as neutral.
    pub neutral_tol: f64,
    /// Truncation depth of the target-closeness check.
    pub metric_depth: usize,
    /// Max total plan length in steps.
    pub budget: usize,
    /// Pin the following-arc length instead of searching for the smallest
    /// length that meets the alignment gate. Must be a multiple of the
    /// target orbit's period (orbit targets) or equal to the atom count
    /// (segment targets).
    pub follow_steps: Option<usize>,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            neutral_tol: 1e-6,
            metric_depth: DEFAULT_METRIC_DEPTH,
            budget: 100_000,
            follow_steps: None,
        }
    }
}

/// A spliced pseudo-orbit: following arc, anchor padding, seam data, and the
/// verification outcome.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PseudoOrbitPlan {
    /// Pseudo-orbit points in cyclic order. Consecutive images agree with
    /// the next point up to `jump`.
    pub points: Vec<PhasePoint>,
    /// Steps spent following the target realization.
    pub follow_steps: usize,
    /// Steps spent looping the anchor.
    pub padding_steps: usize,
    /// Alignment steps needed to contract a unit-order fiber offset into a
    /// jump/2 neighborhood of the anchor at its own contraction rate.
    pub settle_steps: usize,
    /// The padding orbit.
    pub anchor: PeriodicOrbit,
    /// Anchor weight of the planned mixture.
    pub alpha: f64,
    /// Max fiber discontinuity across the seams.
    pub jump: f64,
    /// Exponent of the planned mixture.
    pub mixture_exponent: f64,
    /// Verification rate (square root of the mixture rate).
    pub rate: f64,
    pub split: SplittingSpec,
    /// Cyclic cut at which the spliced string verifies.
    pub verified_cut: usize,
}

impl PseudoOrbitPlan {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Base word read off the points (symbolic plans).
    pub fn word(&self) -> Result<Vec<u8>, ShadowError> {
        self.points
            .iter()
            .map(|p| match &p.base {
                BasePoint::Symbolic(s) => Ok(s.current()?),
                BasePoint::Torus(_) => Err(ShadowError::TorusSpliceUnsupported),
            })
            .collect()
    }

    /// The plan's points as a segment (clogs evaluated at the plan values).
    pub fn segment(&self, system: &SkewProductSystem) -> Result<OrbitSegment, ShadowError> {
        Ok(OrbitSegment::from_points(system, self.points.clone())?)
    }

    /// Max distance from each point's image to its cyclic successor; equals
    /// the seam jumps for a well-formed plan.
    pub fn endpoint_gap(&self, system: &SkewProductSystem) -> Result<f64, ShadowError> {
        let n = self.points.len();
        let mut gap = 0.0f64;
        for (i, p) in self.points.iter().enumerate() {
            let image = system.apply(p, 1)?;
            gap = gap.max(system.phase_dist(&image, &self.points[(i + 1) % n])?);
        }
        Ok(gap)
    }
}

/// First cyclic cut at which the clog string verifies, if any.
fn verifying_cut(
    clogs: &[f64],
    strong_logs: (f64, f64),
    rate: f64,
    split: SplittingSpec,
) -> Result<Result<usize, QuasiStatus>, ShadowError> {
    let n = clogs.len();
    let mut first_failure = None;
    let mut rotated = Vec::with_capacity(n);
    for cut in 0..n {
        rotated.clear();
        rotated.extend_from_slice(&clogs[cut..]);
        rotated.extend_from_slice(&clogs[..cut]);
        let status = quasi_log_scan(&rotated, strong_logs, rate, split)?;
        if status.is_verified() {
            return Ok(Ok(cut));
        }
        if first_failure.is_none() {
            first_failure = Some(status);
        }
    }
    Ok(Err(first_failure.unwrap_or(QuasiStatus::Verified)))
}

/// Number of anchor steps that contract a unit-order fiber offset to d/2.
fn settle_steps(jump: f64, anchor_exponent: f64) -> usize {
    if jump <= 0.0 {
        return 0;
    }
    ((jump / 2.0).ln() / -anchor_exponent.abs()).ceil().max(0.0) as usize
}

/// Plan the mixture `alpha * anchor + (1 - alpha) * target` over a symbolic
/// system. See the module docs for the construction; `eps` bounds both the
/// alignment gate |m/t - alpha/(1-alpha)| + 2 N_d / t and the weak-star
/// distance from the following arc's measure to the target.
pub fn assemble_pseudo_orbit(
    system: &SkewProductSystem,
    target: &EmpiricalMeasure,
    anchor: &PeriodicOrbit,
    alpha: f64,
    eps: f64,
    opts: &PlanOptions,
) -> Result<PseudoOrbitPlan, ShadowError> {
    let symbolic = match system {
        SkewProductSystem::Symbolic(s) => s,
        SkewProductSystem::Torus(_) => return Err(ShadowError::TorusSpliceUnsupported),
    };
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(ShadowError::BadAlpha(alpha));
    }
    let lam_anchor = anchor.center_exponent;
    if lam_anchor.abs() <= opts.neutral_tol {
        return Err(ShadowError::AnchorNeutral {
            exponent: lam_anchor,
            tol: opts.neutral_tol,
        });
    }

    // Degenerate mixture: one anchor loop, no seams.
    if alpha == 1.0 {
        let points = anchor.points(system)?;
        let clogs: Vec<f64> = OrbitSegment::from_points(system, points.clone())?
            .clogs()
            .to_vec();
        let rate = (-lam_anchor.abs() / 2.0).exp();
        let split = SplittingSpec::for_exponent(lam_anchor);
        let strong = symbolic.proxy_rates();
        let cut = match verifying_cut(&clogs, (strong.0.ln(), strong.1.ln()), rate, split)? {
            Ok(cut) => cut,
            Err(QuasiStatus::Violated { side, index }) => {
                return Err(ShadowError::QuasiFailed { rate, side, index })
            }
            Err(QuasiStatus::Verified) => 0,
        };
        return Ok(PseudoOrbitPlan {
            points,
            follow_steps: 0,
            padding_steps: anchor.period,
            settle_steps: 0,
            anchor: anchor.clone(),
            alpha,
            jump: 0.0,
            mixture_exponent: lam_anchor,
            rate,
            split,
            verified_cut: cut,
        });
    }

    let lam_target = center_exponent(system, target)?;
    let mixture = alpha * lam_anchor + (1.0 - alpha) * lam_target;
    if mixture.abs() <= opts.neutral_tol {
        return Err(ShadowError::NonHyperbolicMixture(mixture));
    }
    let rate = (-mixture.abs() / 2.0).exp();
    let split = SplittingSpec::for_exponent(mixture);

    // The following arc replays the forward itinerary of the target's first
    // atom; for an orbit measure this is the orbit itself.
    let first = &target.atoms()[0].0;
    let target_period = match &first.base {
        BasePoint::Symbolic(s) => {
            if s.is_purely_periodic() {
                s.canonical_cycle()
                    .map(|(w, _)| crate::orbit::primitive_period(&w))
                    .unwrap_or(target.len())
            } else {
                target.len()
            }
        }
        BasePoint::Torus(_) => return Err(ShadowError::TorusSpliceUnsupported),
    };
    let periodic_target = matches!(&first.base, BasePoint::Symbolic(s) if s.is_purely_periodic());

    // Seam size: both seams jump between the target's start fiber and the
    // anchor's start fiber (each arc closes up on its own side).
    let follow_start_fiber = first.t;
    let jump = circle_dist(follow_start_fiber, anchor.fiber_start());
    let n_settle = settle_steps(jump, lam_anchor);
    let ratio = alpha / (1.0 - alpha);
    let anchor_period = anchor.period;

    let gate = |t: usize, m: usize| (m as f64 / t as f64 - ratio).abs() + 2.0 * n_settle as f64 / t as f64;
    let loops_for = |t: usize| ((t as f64 * ratio / anchor_period as f64).round() as usize).max(1);

    let (t_steps, loops) = match opts.follow_steps {
        Some(t) => {
            let valid = if periodic_target {
                t >= target_period && t % target_period == 0
            } else {
                t == target.len()
            };
            if !valid {
                return Err(ShadowError::TargetUnrealizable(
                    "pinned follow length does not match the target realization",
                ));
            }
            (t, loops_for(t))
        }
        None => {
            if periodic_target {
                let mut found = None;
                let mut reps = 1usize;
                loop {
                    let t = reps * target_period;
                    let loops = loops_for(t);
                    if t + loops * anchor_period > opts.budget {
                        break;
                    }
                    if gate(t, loops * anchor_period) < eps {
                        found = Some((t, loops));
                        break;
                    }
                    reps += 1;
                }
                found.ok_or(ShadowError::PlanBudget(opts.budget))?
            } else {
                let t = target.len();
                (t, loops_for(t))
            }
        }
    };
    let m_steps = loops * anchor_period;
    if t_steps + m_steps > opts.budget {
        return Err(ShadowError::PlanBudget(opts.budget));
    }
    let gate_value = gate(t_steps, m_steps);
    if gate_value >= eps {
        return Err(ShadowError::PlanTolerance {
            what: "alignment gate",
            value: gate_value,
            eps,
        });
    }

    // Build the following arc by iterating the system from the first atom.
    let follow = OrbitSegment::from_start(system, first, t_steps)?;
    let follow_measure = follow.measure();
    let closeness = weak_star_distance(&follow_measure, target, opts.metric_depth)?.value;
    if closeness >= eps {
        return Err(ShadowError::PlanTolerance {
            what: "following-arc measure distance",
            value: closeness,
            eps,
        });
    }

    let mut points = follow.points().to_vec();
    let loop_points = anchor.points(system)?;
    for _ in 0..loops {
        points.extend(loop_points.iter().cloned());
    }

    let segment = OrbitSegment::from_points(system, points.clone())?;
    let strong = symbolic.proxy_rates();
    let cut = match verifying_cut(segment.clogs(), (strong.0.ln(), strong.1.ln()), rate, split)? {
        Ok(cut) => cut,
        Err(QuasiStatus::Violated { side, index }) => {
            return Err(ShadowError::QuasiFailed { rate, side, index })
        }
        Err(QuasiStatus::Verified) => 0,
    };

    Ok(PseudoOrbitPlan {
        points,
        follow_steps: t_steps,
        padding_steps: m_steps,
        settle_steps: n_settle,
        anchor: anchor.clone(),
        alpha,
        jump,
        mixture_exponent: mixture,
        rate,
        split,
        verified_cut: cut,
    })
}

/// Torus pseudo-orbit: a genuine periodic orbit with one fiber coordinate
/// bumped at index `k` (1-based within the cycle, keeping the start exact).
/// The bump is scaled by the local fiber derivative so the largest resulting
/// discontinuity is exactly `d`.
pub fn perturbed_orbit_plan(
    system: &SkewProductSystem,
    orbit: &PeriodicOrbit,
    d: f64,
    k: usize,
) -> Result<PseudoOrbitPlan, ShadowError> {
    if !matches!(system, SkewProductSystem::Torus(_)) {
        return Err(ShadowError::TargetUnrealizable(
            "perturbed-orbit plans are the torus pseudo-orbit construction",
        ));
    }
    if k == 0 || k >= orbit.period {
        return Err(ShadowError::TargetUnrealizable(
            "bump index must be inside the cycle (1..period)",
        ));
    }
    let mut points = orbit.points(system)?;
    let fiber_deriv = system.center_log_derivative(&points[k])?.exp();
    let delta = d / fiber_deriv.max(1.0);
    points[k].t = mod1(points[k].t + delta);

    let segment = OrbitSegment::from_points(system, points.clone())?;
    let lam = orbit.center_exponent;
    let rate = (-lam.abs() / 2.0).exp();
    let split = SplittingSpec::for_exponent(lam);
    let (ss, uu) = system.strong_rates();
    let cut = match verifying_cut(segment.clogs(), (ss.ln(), uu.ln()), rate, split)? {
        Ok(cut) => cut,
        Err(QuasiStatus::Violated { side, index }) => {
            return Err(ShadowError::QuasiFailed { rate, side, index })
        }
        Err(QuasiStatus::Verified) => 0,
    };

    Ok(PseudoOrbitPlan {
        points,
        follow_steps: orbit.period,
        padding_steps: 0,
        settle_steps: 0,
        anchor: orbit.clone(),
        alpha: 1.0,
        jump: d,
        mixture_exponent: lam,
        rate,
        split,
        verified_cut: cut,
    })
}
