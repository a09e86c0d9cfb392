//! Iterated descent: tolerance schedules, the constructed orbit sequence,
//! the convergence certificate over its measures, and a finite estimate of
//! the limit support.

use super::approx::KAPPA_SLACK;
use super::descend::{descend_step, DescendParams};
use super::{GiknError, GoodApproximationCertificate};
use crate::measure::weak_star_distance;
use crate::model::{PhasePoint, SkewProductSystem};
use crate::orbit::PeriodicOrbit;
use serde::{Deserialize, Serialize};

/// Geometric tolerance schedule `eps_n = eps0 * factor^n`. Construction
/// rejects non-summable schedules outright.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsSchedule {
    eps0: f64,
    factor: f64,
}

impl EpsSchedule {
    pub fn geometric(eps0: f64, factor: f64) -> Result<Self, GiknError> {
        if !(eps0.is_finite() && eps0 > 0.0) {
            return Err(GiknError::BadSchedule("eps0 must be positive and finite"));
        }
        if !(factor > 0.0 && factor < 1.0) {
            return Err(GiknError::BadSchedule(
                "factor must lie in (0, 1); the tolerance sum diverges otherwise",
            ));
        }
        Ok(EpsSchedule { eps0, factor })
    }

    pub fn eps(&self, n: usize) -> f64 {
        self.eps0 * self.factor.powi(n as i32)
    }

    /// Value of the full series; finite by construction.
    pub fn total(&self) -> f64 {
        self.eps0 / (1.0 - self.factor)
    }
}

/// One element of a constructed sequence: the orbit, and for every element
/// after the seed the certificate binding it to its predecessor together
/// with the thresholds it was requested at.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GiknStep {
    pub orbit: PeriodicOrbit,
    pub certificate: Option<GoodApproximationCertificate>,
    pub eps: Option<f64>,
    pub kappa_required: Option<f64>,
}

/// A descending sequence of periodic orbits with per-step certificates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GiknSequence {
    pub params: DescendParams,
    pub steps: Vec<GiknStep>,
}

/// First line of the JSONL persistence; the remaining lines are steps.
#[derive(Serialize, Deserialize)]
struct JsonlHeader {
    params: DescendParams,
    steps: usize,
}

impl GiknSequence {
    pub fn new(params: DescendParams, seed: PeriodicOrbit) -> Self {
        GiknSequence {
            params,
            steps: vec![GiknStep {
                orbit: seed,
                certificate: None,
                eps: None,
                kappa_required: None,
            }],
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn orbits(&self) -> impl Iterator<Item = &PeriodicOrbit> {
        self.steps.iter().map(|s| &s.orbit)
    }

    pub fn last_orbit(&self) -> &PeriodicOrbit {
        &self.steps.last().expect("sequences are never empty").orbit
    }

    /// Center exponents along the sequence.
    pub fn exponents(&self) -> Vec<f64> {
        self.orbits().map(|o| o.center_exponent).collect()
    }

    /// Running sum of the tolerances the certificates were requested at.
    pub fn eps_sum(&self) -> f64 {
        self.steps.iter().filter_map(|s| s.eps).sum()
    }

    /// Running product of the achieved proportions.
    pub fn kappa_product(&self) -> f64 {
        self.steps
            .iter()
            .filter_map(|s| s.certificate.as_ref())
            .map(|c| c.kappa)
            .product()
    }

    /// Serializes as JSON lines: a header with the parameters, then one
    /// step (orbit plus certificate) per line.
    pub fn to_jsonl(&self) -> Result<String, GiknError> {
        let mut out = serde_json::to_string(&JsonlHeader {
            params: self.params,
            steps: self.steps.len(),
        })?;
        for step in &self.steps {
            out.push('\n');
            out.push_str(&serde_json::to_string(step)?);
        }
        out.push('\n');
        Ok(out)
    }

    /// Parses the JSONL form and re-checks the structural invariants: a
    /// certificate-free seed, certified later steps, and strictly
    /// increasing periods.
    pub fn from_jsonl(text: &str) -> Result<Self, GiknError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: JsonlHeader = serde_json::from_str(
            lines.next().ok_or(GiknError::BadPersistence("empty input"))?,
        )?;
        header.params.validate()?;
        let steps = lines
            .map(serde_json::from_str::<GiknStep>)
            .collect::<Result<Vec<_>, _>>()?;
        if steps.is_empty() {
            return Err(GiknError::BadPersistence("no steps"));
        }
        if steps.len() != header.steps {
            return Err(GiknError::BadPersistence("step count differs from header"));
        }
        if steps[0].certificate.is_some() {
            return Err(GiknError::BadPersistence("seed must not carry a certificate"));
        }
        if steps[1..].iter().any(|s| s.certificate.is_none()) {
            return Err(GiknError::BadPersistence("non-seed step lacks a certificate"));
        }
        if steps.windows(2).any(|w| w[0].orbit.period >= w[1].orbit.period) {
            return Err(GiknError::BadPersistence("periods must strictly increase"));
        }
        Ok(GiknSequence {
            params: header.params,
            steps,
        })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), std::io::Error> {
        let text = self
            .to_jsonl()
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))?;
        std::fs::write(path, text)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, GiknError> {
        let text = std::fs::read_to_string(path)
            .map_err(|_| GiknError::BadPersistence("unreadable file"))?;
        Self::from_jsonl(&text)
    }
}

/// Iterates [`descend_step`] from the seed, requesting tolerance
/// `schedule.eps(n)` at step `n` and recording the demanded proportion
/// `1 - rho * |exponent|` alongside each certificate. Stops after `n_steps`
/// steps; descend errors propagate.
pub fn build_gikn_sequence(
    system: &SkewProductSystem,
    seed: &PeriodicOrbit,
    schedule: &EpsSchedule,
    params: &DescendParams,
    n_steps: usize,
) -> Result<GiknSequence, GiknError> {
    params.validate()?;
    let defect = seed.validate(system)?;
    if defect > 1e-8 {
        return Err(GiknError::BadParams("seed orbit does not close"));
    }
    let mut seq = GiknSequence::new(*params, seed.clone());
    for n in 0..n_steps {
        let eps = schedule.eps(n);
        let parent = seq.last_orbit().clone();
        let kappa_required = (1.0 - params.rho * parent.center_exponent.abs()).max(0.0);
        let (child, certificate) = descend_step(system, &parent, eps, params)?;
        seq.steps.push(GiknStep {
            orbit: child,
            certificate: Some(certificate),
            eps: Some(eps),
            kappa_required: Some(kappa_required),
        });
    }
    Ok(seq)
}

/// Convergence evidence for a constructed sequence. Shortfalls are flags,
/// not errors; the caller decides what a FAIL means for the run.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    /// Sum of the requested tolerances.
    pub eps_sum: f64,
    /// Product of the achieved proportions.
    pub kappa_product: f64,
    /// Center exponents along the sequence.
    pub exponents: Vec<f64>,
    /// Truncated weak-star distances between consecutive measures.
    pub pair_distances: Vec<f64>,
    /// Distance between the first and last measures.
    pub total_distance: f64,
    /// `(2 + 4 rho_fit / (1 - zeta)) |exponent_0|` plus the truncation tail.
    pub distance_bound: f64,
    /// Empirical proportion-loss constant: max of
    /// `(1 - kappa_achieved) / |parent exponent|` over the steps.
    pub rho_fit: f64,
    /// Fitted Cauchy constant: max of `pair_distance / eps` over the steps.
    pub cauchy_factor: f64,
    /// `1 - (2 rho_fit / (1 - zeta)) |exponent_0|`, the floor the proportion
    /// product is compared against.
    pub kappa_floor: f64,
    /// Test-function depth the distances were truncated at.
    pub depth: usize,
    /// Exponents strictly decrease in absolute value.
    pub exponents_monotone: bool,
    /// `kappa_product` clears `kappa_floor` (up to proportion slack).
    pub kappa_above_floor: bool,
    /// `total_distance` is within `distance_bound`.
    pub distance_within_bound: bool,
}

/// Evaluates the convergence evidence for `seq` with weak-star distances
/// truncated at `depth` test functions.
pub fn certify_convergence(
    system: &SkewProductSystem,
    seq: &GiknSequence,
    depth: usize,
) -> Result<ConvergenceReport, GiknError> {
    if seq.len() < 2 {
        return Err(GiknError::TooShort(seq.len()));
    }
    let measures = seq
        .orbits()
        .map(|o| o.measure(system))
        .collect::<Result<Vec<_>, _>>()?;
    let exponents = seq.exponents();

    let mut pair_distances = Vec::with_capacity(measures.len() - 1);
    let mut cauchy_factor = 0.0f64;
    for (n, pair) in measures.windows(2).enumerate() {
        let d = weak_star_distance(&pair[0], &pair[1], depth)?.value;
        if let Some(eps) = seq.steps[n + 1].eps {
            cauchy_factor = cauchy_factor.max(d / eps);
        }
        pair_distances.push(d);
    }
    let total = weak_star_distance(&measures[0], &measures[measures.len() - 1], depth)?;

    let mut rho_fit = 0.0f64;
    for (n, step) in seq.steps.iter().enumerate().skip(1) {
        if let Some(cert) = &step.certificate {
            let parent = exponents[n - 1].abs();
            if parent > 0.0 {
                rho_fit = rho_fit.max((1.0 - cert.kappa) / parent);
            }
        }
    }

    let lambda0 = exponents[0].abs();
    let spread = 1.0 - seq.params.zeta;
    let kappa_floor = 1.0 - 2.0 * rho_fit / spread * lambda0;
    let distance_bound = (2.0 + 4.0 * rho_fit / spread) * lambda0 + total.tail_bound;
    let kappa_product = seq.kappa_product();

    Ok(ConvergenceReport {
        eps_sum: seq.eps_sum(),
        kappa_product,
        exponents_monotone: exponents
            .windows(2)
            .all(|w| w[1].abs() < w[0].abs()),
        kappa_above_floor: kappa_product > kappa_floor - KAPPA_SLACK,
        distance_within_bound: total.value <= distance_bound,
        exponents,
        pair_distances,
        total_distance: total.value,
        distance_bound,
        rho_fit,
        cauchy_factor,
        kappa_floor,
        depth,
    })
}

/// Finite stand-in for the limit support: the union of the orbits from
/// position `n` on, plus the Hausdorff distances between consecutive tail
/// unions (expected to shrink as the tail stabilizes).
#[derive(Clone, Debug)]
pub struct SupportEstimate {
    pub points: Vec<PhasePoint>,
    pub hausdorff: Vec<f64>,
}

fn hausdorff(system: &SkewProductSystem, a: &[PhasePoint], b: &[PhasePoint]) -> f64 {
    let one_sided = |from: &[PhasePoint], to: &[PhasePoint]| {
        from.iter()
            .map(|p| {
                to.iter()
                    .map(|q| system.phase_dist(p, q).expect("points share a phase space"))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}

/// Computes the tail-union support estimate starting at position `n`.
pub fn limit_support_estimate(
    system: &SkewProductSystem,
    seq: &GiknSequence,
    n: usize,
) -> Result<SupportEstimate, GiknError> {
    if n >= seq.len() {
        return Err(GiknError::TooShort(seq.len()));
    }
    // Tail unions, innermost first: tails[j] = union of orbits n+j ..
    let mut tails: Vec<Vec<PhasePoint>> = Vec::with_capacity(seq.len() - n);
    for k in (n..seq.len()).rev() {
        let mut u = seq.steps[k].orbit.points(system)?;
        if let Some(prev) = tails.last() {
            u.extend(prev.iter().cloned());
        }
        tails.push(u);
    }
    tails.reverse();
    let hausdorff = tails
        .windows(2)
        .map(|w| hausdorff(system, &w[0], &w[1]))
        .collect();
    Ok(SupportEstimate {
        points: tails.into_iter().next().expect("n < len"),
        hausdorff,
    })
}
