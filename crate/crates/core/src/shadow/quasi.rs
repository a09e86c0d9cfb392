//! Verification of quasi-hyperbolic strings.
//!
//! A segment of length n with per-step bundle growth bounds verifies at rate
//! `r` in (0, 1) when every prefix product over the contracting side stays
//! below r^k and every suffix mininorm product over the expanding side stays
//! above r^-(n-k). Both families are checked in log space with an additive
//! slack of 1e-12.

use super::ShadowError;
use crate::model::{SkewProductSystem, SymbolicSkew};
use crate::orbit::OrbitSegment;
use serde::{Deserialize, Serialize};

/// Which coarse bundle carries the center direction. The strong stable
/// always sits on the contracting side and the strong unstable on the
/// expanding side; the center joins exactly one of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplittingSpec {
    /// Contracting side = strong stable alone; center rides with the
    /// strong unstable.
    CenterWithUnstable,
    /// Contracting side = strong stable plus center; expanding side is the
    /// strong unstable alone.
    CenterWithStable,
}

impl SplittingSpec {
    /// Splitting that puts the center on the side matching the sign of an
    /// exponent: contracting for negative values.
    pub fn for_exponent(exponent: f64) -> SplittingSpec {
        if exponent < 0.0 {
            SplittingSpec::CenterWithStable
        } else {
            SplittingSpec::CenterWithUnstable
        }
    }

    fn center_contracting_side(self) -> bool {
        matches!(self, SplittingSpec::CenterWithStable)
    }
}

/// Side of the splitting named in a violation report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BundleSide {
    /// The side required to contract.
    Contracting,
    /// The side required to expand.
    Expanding,
}

/// Outcome of a scan. Contracting-side indices are prefix lengths in 1..=n;
/// expanding-side indices are suffix start positions in 0..n, reported for
/// the shortest failing suffix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuasiStatus {
    Verified,
    Violated { side: BundleSide, index: usize },
}

impl QuasiStatus {
    pub fn is_verified(&self) -> bool {
        matches!(self, QuasiStatus::Verified)
    }
}

/// A checked segment together with the rate and splitting it was checked at.
#[derive(Clone, Debug)]
pub struct QuasiHyperbolicString {
    pub segment: OrbitSegment,
    pub rate: f64,
    pub split: SplittingSpec,
    pub status: QuasiStatus,
}

/// Additive log-space slack absorbing rounding in the product comparisons.
const LOG_SLACK: f64 = 1e-12;

/// Core scan over per-step center log-derivatives. `strong_logs` holds the
/// logs of the strong stable and strong unstable per-step rates.
pub fn quasi_log_scan(
    clogs: &[f64],
    strong_logs: (f64, f64),
    rate: f64,
    split: SplittingSpec,
) -> Result<QuasiStatus, ShadowError> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(ShadowError::BadRate(rate));
    }
    let n = clogs.len();
    let (stable_log, unstable_log) = strong_logs;
    let center_in_e = split.center_contracting_side();
    let lr = rate.ln();

    // Contracting side: prefix sums must stay below k * log(rate).
    let mut acc = 0.0;
    for (i, &clog) in clogs.iter().enumerate() {
        acc += if center_in_e {
            stable_log.max(clog)
        } else {
            stable_log
        };
        let k = i + 1;
        if acc > k as f64 * lr + LOG_SLACK {
            return Ok(QuasiStatus::Violated {
                side: BundleSide::Contracting,
                index: k,
            });
        }
    }

    // Expanding side: suffix sums must stay above -(n - k) * log(rate),
    // scanned from the shortest suffix outward.
    acc = 0.0;
    for k in (0..n).rev() {
        acc += if center_in_e {
            unstable_log
        } else {
            clogs[k].min(unstable_log)
        };
        if acc < -((n - k) as f64) * lr - LOG_SLACK {
            return Ok(QuasiStatus::Violated {
                side: BundleSide::Expanding,
                index: k,
            });
        }
    }
    Ok(QuasiStatus::Verified)
}

/// Check a stored orbit segment at the given rate and splitting.
pub fn check_quasi_hyperbolic(
    system: &SkewProductSystem,
    segment: &OrbitSegment,
    rate: f64,
    split: SplittingSpec,
) -> Result<QuasiHyperbolicString, ShadowError> {
    let (ss, uu) = system.strong_rates();
    let status = quasi_log_scan(segment.clogs(), (ss.ln(), uu.ln()), rate, split)?;
    Ok(QuasiHyperbolicString {
        segment: segment.clone(),
        rate,
        split,
        status,
    })
}

/// Try every cyclic cut of a periodic word over a symbolic system, returning
/// the first cut whose fiber path verifies. The fiber values are read off
/// the genuine orbit through `root`.
pub fn quasi_any_cut(
    system: &SymbolicSkew,
    word: &[u8],
    root: f64,
    rate: f64,
    split: SplittingSpec,
) -> Result<Option<usize>, ShadowError> {
    let n = word.len();
    let mut starts = Vec::with_capacity(n + 1);
    let mut t = root;
    starts.push(t);
    for &s in word {
        t = system.map(s).apply(t);
        starts.push(t);
    }
    for cut in 0..n {
        let mut clogs = Vec::with_capacity(n);
        let mut tt = starts[cut];
        for i in 0..n {
            let s = word[(cut + i) % n];
            clogs.push(system.map(s).log_deriv(tt));
            tt = system.map(s).apply(tt);
        }
        let (ss, uu) = system.proxy_rates();
        if quasi_log_scan(&clogs, (ss.ln(), uu.ln()), rate, split)?.is_verified() {
            return Ok(Some(cut));
        }
    }
    Ok(None)
}
