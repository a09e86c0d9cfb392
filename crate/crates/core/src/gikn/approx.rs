//! Checking whether one periodic orbit approximates another well.
//!
//! The long orbit γ₁ approximates the short orbit γ₂ at quality `(ε, κ)`
//! when a κ fraction of γ₁'s points each stay within ε of γ₂ for a full
//! γ₂-period of iterates, and the matched points project onto γ₂ with a
//! constant preimage count. The checker either produces a certificate or
//! reports the best thresholds that would have been achievable.

use super::{GiknError, GoodApproximationCertificate};
use crate::model::{PhasePoint, SkewProductSystem};
use crate::orbit::PeriodicOrbit;

/// Slack for proportion comparisons; absorbs the float division in
/// `kappa = c* . period2 / period1` without admitting a genuinely short
/// witness set.
pub(crate) const KAPPA_SLACK: f64 = 1e-12;

/// Result of [`check_good_approximation`]: either a certificate, or the
/// thresholds the pair actually supports.
#[derive(Clone, Debug, PartialEq)]
pub enum ApproximationOutcome {
    Certified(GoodApproximationCertificate),
    /// No certificate at the requested quality. `eps_star` is the smallest
    /// tolerance at which every short-orbit point would acquire at least one
    /// witness; `kappa_star` is the proportion achieved at the requested
    /// tolerance.
    Short { eps_star: f64, kappa_star: f64 },
}

impl ApproximationOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, ApproximationOutcome::Certified(_))
    }

    pub fn certificate(self) -> Option<GoodApproximationCertificate> {
        match self {
            ApproximationOutcome::Certified(cert) => Some(cert),
            ApproximationOutcome::Short { .. } => None,
        }
    }
}

/// Max phase distance along a length-`n2` window: the long orbit read from
/// cyclic index `i`, the short orbit from cyclic index `k`. Returns early
/// once the running max reaches `cap`; the returned value is then a lower
/// bound that already ties or beats the cap, which is all comparisons
/// against `cap` need.
fn window_dist(
    system: &SkewProductSystem,
    long: &[PhasePoint],
    short: &[PhasePoint],
    i: usize,
    k: usize,
    cap: f64,
) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..short.len() {
        let p = &long[(i + j) % long.len()];
        let q = &short[(k + j) % short.len()];
        let d = system
            .phase_dist(p, q)
            .expect("orbit points live in the system's phase space");
        if d > worst {
            worst = d;
            if worst >= cap {
                return worst;
            }
        }
    }
    worst
}

/// Smallest tolerance at which the projection would be onto: the max over
/// short-orbit indices of the best window distance any long-orbit point
/// achieves there.
fn onto_threshold(
    system: &SkewProductSystem,
    long: &[PhasePoint],
    short: &[PhasePoint],
) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..short.len() {
        let mut best = f64::INFINITY;
        for i in 0..long.len() {
            let d = window_dist(system, long, short, i, k, best);
            if d < best {
                best = d;
            }
        }
        if best > worst {
            worst = best;
        }
    }
    worst
}

/// Checks whether `long` approximates `short` at quality `(eps, kappa)`.
///
/// Each long-orbit point is matched to the short-orbit phase minimizing the
/// full-window max distance (first index on ties) and kept when that
/// distance is strictly below `eps`. Matches are then balanced: every
/// short-orbit point keeps its `c*` closest witnesses, where `c*` is the
/// minimum match count over the short orbit, so the projection has constant
/// preimage cardinality. The achieved proportion is `c* . |short| / |long|`;
/// the outcome is certified when it reaches `kappa` (within [`KAPPA_SLACK`]).
///
/// Falling short is a value, not an error: the caller decides whether to
/// retry with a longer orbit or a looser tolerance.
pub fn check_good_approximation(
    system: &SkewProductSystem,
    long: &PeriodicOrbit,
    short: &PeriodicOrbit,
    eps: f64,
    kappa: f64,
) -> Result<ApproximationOutcome, GiknError> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(GiknError::BadParams("eps must be positive and finite"));
    }
    if !(0.0..=1.0).contains(&kappa) {
        return Err(GiknError::BadParams("kappa must lie in [0, 1]"));
    }
    let p1 = long.points(system)?;
    let p2 = short.points(system)?;
    let n1 = p1.len();
    let n2 = p2.len();

    // Argmin pass: for every long-orbit point the closest short-orbit phase.
    // Capping each scan at the incumbent keeps it exact for strict
    // improvement while skipping most of the window.
    let mut groups: Vec<Vec<(f64, usize)>> = vec![Vec::new(); n2];
    for i in 0..n1 {
        let mut best = f64::INFINITY;
        let mut best_k = 0usize;
        for k in 0..n2 {
            let d = window_dist(system, &p1, &p2, i, k, best);
            if d < best {
                best = d;
                best_k = k;
            }
        }
        if best < eps {
            groups[best_k].push((best, i));
        }
    }

    let cstar = groups.iter().map(Vec::len).min().unwrap_or(0);
    if cstar == 0 {
        return Ok(ApproximationOutcome::Short {
            eps_star: onto_threshold(system, &p1, &p2),
            kappa_star: 0.0,
        });
    }
    let kappa_achieved = (cstar * n2) as f64 / n1 as f64;
    if kappa_achieved + KAPPA_SLACK < kappa {
        return Ok(ApproximationOutcome::Short {
            eps_star: onto_threshold(system, &p1, &p2),
            kappa_star: kappa_achieved,
        });
    }

    // Balance: each short-orbit point keeps its c* closest witnesses, ties
    // broken by long-orbit index so the certificate is deterministic.
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(cstar * n2);
    for (k, group) in groups.iter_mut().enumerate() {
        group.sort_by(|a, b| a.partial_cmp(b).expect("distances are finite"));
        pairs.extend(group.iter().take(cstar).map(|&(_, i)| (i, k)));
    }
    pairs.sort_unstable();
    let (witness, projection) = pairs.into_iter().unzip();

    Ok(ApproximationOutcome::Certified(GoodApproximationCertificate {
        eps,
        kappa: kappa_achieved,
        witness,
        projection,
        cardinality: cstar,
    }))
}

/// Re-derives every claim a certificate makes from the two orbits alone.
///
/// Checks shape (aligned witness/projection arrays, strictly ascending
/// in-range witnesses, in-range projections), the constant preimage count,
/// the strict `eps` window bound on every matched pair, and the claimed
/// proportion. Returns whether all of them hold.
pub fn verify_certificate(
    system: &SkewProductSystem,
    long: &PeriodicOrbit,
    short: &PeriodicOrbit,
    cert: &GoodApproximationCertificate,
) -> Result<bool, GiknError> {
    let p1 = long.points(system)?;
    let p2 = short.points(system)?;
    let n1 = p1.len();
    let n2 = p2.len();

    if cert.witness.len() != cert.projection.len()
        || cert.cardinality == 0
        || cert.witness.len() != cert.cardinality * n2
        || !(cert.eps > 0.0)
    {
        return Ok(false);
    }
    if cert.witness.windows(2).any(|w| w[0] >= w[1]) {
        return Ok(false);
    }
    if cert.witness.iter().any(|&i| i >= n1) || cert.projection.iter().any(|&k| k >= n2) {
        return Ok(false);
    }

    let mut counts = vec![0usize; n2];
    for (&i, &k) in cert.witness.iter().zip(&cert.projection) {
        counts[k] += 1;
        if window_dist(system, &p1, &p2, i, k, f64::INFINITY) >= cert.eps {
            return Ok(false);
        }
    }
    if counts.iter().any(|&c| c != cert.cardinality) {
        return Ok(false);
    }
    Ok(cert.witness.len() as f64 / n1 as f64 + KAPPA_SLACK >= cert.kappa)
}
