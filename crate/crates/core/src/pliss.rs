//! Selection of times with uniformly controlled ergodic averages.
//!
//! Given one-step quantities a_1..a_n and a threshold c, time k qualifies
//! when every window ending at k averages at least c:
//!
//! ```text
//!   (a_{k-j+1} + ... + a_k) / j >= c   for all 1 <= j <= k.
//! ```
//!
//! Writing S_k for the prefix sums of (a_i - c), this is S_k >= max(S_0..
//! S_{k-1}), so one left-to-right scan with a running prefix maximum finds
//! all qualifying times in linear time. When the average of the whole string
//! exceeds c2 > c and the entries are bounded above by A, at least a fraction
//! (c2 - c) / (A - c) of all times qualifies; the exact-arithmetic path is
//! used in tests to pin that bound down without rounding slack.

use num::rational::BigRational;
use num::Zero;

/// Inputs of a qualifying-time scan.
#[derive(Clone, Copy, Debug)]
pub struct PlissQuery<'a> {
    /// One-step quantities a_1..a_n, stored 0-indexed.
    pub values: &'a [f64],
    /// Required window average.
    pub threshold: f64,
    /// Additive slack absorbing float rounding: window sums are accepted at
    /// `>= -slack` after subtracting the threshold.
    pub slack: f64,
}

impl<'a> PlissQuery<'a> {
    /// Query with the default rounding slack of 1e-12.
    pub fn new(values: &'a [f64], threshold: f64) -> Self {
        PlissQuery {
            values,
            threshold,
            slack: 1e-12,
        }
    }
}

/// Output of a scan: the qualifying times and their density.
#[derive(Clone, Debug, PartialEq)]
pub struct PlissResult {
    /// Qualifying times, 1-based and ascending.
    pub times: Vec<usize>,
    /// `times.len() / n`; zero for the empty input.
    pub fraction: f64,
}

/// Linear-time scan for all qualifying times.
pub fn pliss_times(q: &PlissQuery) -> PlissResult {
    let n = q.values.len();
    let mut times = Vec::new();
    let mut prefix = 0.0f64;
    let mut best = 0.0f64;
    for (idx, a) in q.values.iter().enumerate() {
        prefix += a - q.threshold;
        if prefix >= best - q.slack {
            times.push(idx + 1);
        }
        if prefix > best {
            best = prefix;
        }
    }
    let fraction = if n == 0 {
        0.0
    } else {
        times.len() as f64 / n as f64
    };
    PlissResult { times, fraction }
}

/// Quadratic reference: checks every window of every time directly, summing
/// each window afresh instead of differencing prefix sums.
pub fn pliss_times_oracle(q: &PlissQuery) -> Vec<usize> {
    let n = q.values.len();
    let mut times = Vec::new();
    for k in 1..=n {
        let mut sum = 0.0f64;
        let mut ok = true;
        for m in (0..k).rev() {
            sum += q.values[m];
            if sum - (k - m) as f64 * q.threshold < -q.slack {
                ok = false;
                break;
            }
        }
        if ok {
            times.push(k);
        }
    }
    times
}

/// Exact-arithmetic scan. No slack: rationals compare exactly.
pub fn pliss_times_exact(values: &[BigRational], threshold: &BigRational) -> Vec<usize> {
    let mut times = Vec::new();
    let mut prefix = BigRational::zero();
    let mut best = BigRational::zero();
    for (idx, a) in values.iter().enumerate() {
        prefix += a - threshold;
        if prefix >= best {
            times.push(idx + 1);
        }
        if prefix > best {
            best = prefix.clone();
        }
    }
    times
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;
    use proptest::prelude::*;

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn worked_example_with_a_boundary_time() {
        let values = [0.5, -0.5, 1.0, 1.0, -1.0, 1.0];
        let r = pliss_times(&PlissQuery::new(&values, 0.0));
        // Time 6 holds with equality (S_6 = S_4 = 2), kept by the slack.
        assert_eq!(r.times, vec![1, 3, 4, 6]);
        assert!((r.fraction - 4.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn extreme_sequences() {
        let up = [1.0; 5];
        assert_eq!(pliss_times(&PlissQuery::new(&up, 0.5)).times, vec![1, 2, 3, 4, 5]);
        let down = [-1.0; 5];
        assert!(pliss_times(&PlissQuery::new(&down, 0.0)).times.is_empty());
        let empty = pliss_times(&PlissQuery::new(&[], 0.0));
        assert!(empty.times.is_empty());
        assert_eq!(empty.fraction, 0.0);
    }

    #[test]
    fn raising_the_threshold_thins_the_times() {
        let values = [0.5, -0.5, 1.0, 1.0, -1.0, 1.0];
        let r = pliss_times(&PlissQuery::new(&values, 0.5));
        assert_eq!(r.times, vec![1, 4]);
    }

    #[test]
    fn exact_scan_matches_the_example() {
        let values: Vec<BigRational> = [1, -1, 2, 2, -2, 2].iter().map(|&k| rat(k, 2)).collect();
        assert_eq!(pliss_times_exact(&values, &rat(0, 1)), vec![1, 3, 4, 6]);
    }

    fn grid() -> impl Strategy<Value = Vec<i32>> {
        proptest::collection::vec(-128i32..=128, 0..80)
    }

    proptest! {
        #[test]
        fn scan_matches_oracle_on_the_grid(values in grid(), c in -64i32..=64) {
            let floats: Vec<f64> = values.iter().map(|&k| k as f64 / 64.0).collect();
            let q = PlissQuery::new(&floats, c as f64 / 64.0);
            prop_assert_eq!(pliss_times(&q).times, pliss_times_oracle(&q));
        }

        #[test]
        fn scan_matches_exact_arithmetic_on_the_grid(values in grid(), c in -64i32..=64) {
            // Entries are dyadic with tiny magnitude, so float sums are exact
            // and the slack never changes a verdict.
            let floats: Vec<f64> = values.iter().map(|&k| k as f64 / 64.0).collect();
            let q = PlissQuery { values: &floats, threshold: c as f64 / 64.0, slack: 0.0 };
            let rats: Vec<BigRational> = values.iter().map(|&k| rat(k as i64, 64)).collect();
            prop_assert_eq!(pliss_times(&q).times, pliss_times_exact(&rats, &rat(c as i64, 64)));
        }

        #[test]
        fn qualifying_times_are_shift_invariant(values in grid(), c in -64i32..=64, shift in -64i32..=64) {
            let base: Vec<f64> = values.iter().map(|&k| k as f64 / 64.0).collect();
            let moved: Vec<f64> = base.iter().map(|v| v + shift as f64 / 64.0).collect();
            let q0 = PlissQuery::new(&base, c as f64 / 64.0);
            let q1 = PlissQuery::new(&moved, (c + shift) as f64 / 64.0);
            prop_assert_eq!(pliss_times(&q0).times, pliss_times(&q1).times);
        }

        #[test]
        fn density_respects_the_classical_lower_bound(values in grid(), gap in 1i32..=32) {
            let n = values.len();
            prop_assume!(n > 0);
            let rats: Vec<BigRational> = values.iter().map(|&k| rat(k as i64, 64)).collect();
            let mean: BigRational = rats.iter().sum::<BigRational>() / rat(n as i64, 1);
            let c = &mean - rat(gap as i64, 64);
            let bound_top = rat(*values.iter().max().unwrap() as i64, 64);
            let ell = pliss_times_exact(&rats, &c).len();
            // ell / n >= (mean - c) / (A - c), compared by cross-multiplying.
            let lhs = rat(ell as i64, n as i64) * (&bound_top - &c);
            let rhs = &mean - &c;
            prop_assert!(lhs >= rhs, "ell = {ell}, n = {n}");
        }
    }
}
