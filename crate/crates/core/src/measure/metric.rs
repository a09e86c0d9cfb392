//! Truncated weak-star distance between empirical measures.

use super::family::test_function;
use super::{MeasureError, TestFunction};
use crate::orbit::EmpiricalMeasure;

/// Default truncation depth. The discarded tail is below 2^-63.
pub const DEFAULT_METRIC_DEPTH: usize = 64;

/// A truncated weak-star distance, with the truncation made explicit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureDistanceReport {
    /// Sum of |integral differences| / 2^i over the first `depth` functions.
    pub value: f64,
    /// Number of leading test functions included.
    pub depth: usize,
    /// Bound on the discarded tail: 2^(1 - depth).
    pub tail_bound: f64,
}

/// Integral of a test function against an atomic measure.
pub fn integrate(f: &TestFunction, mu: &EmpiricalMeasure) -> Result<f64, MeasureError> {
    let mut acc = 0.0;
    for (p, w) in mu.atoms() {
        acc += w * f.evaluate(p)?;
    }
    Ok(acc)
}

/// Weak-star distance truncated at `depth` terms.
pub fn weak_star_distance(
    mu: &EmpiricalMeasure,
    nu: &EmpiricalMeasure,
    depth: usize,
) -> Result<MeasureDistanceReport, MeasureError> {
    if depth == 0 {
        return Err(MeasureError::ZeroDepth);
    }
    let kind = mu.space_kind();
    if nu.space_kind() != kind {
        return Err(MeasureError::KindMismatch);
    }
    // Deepest (smallest-weighted) terms first, so they are not absorbed by
    // rounding against the leading ones.
    let mut value = 0.0;
    for i in (1..=depth).rev() {
        let f = test_function(kind, i)?;
        let diff = integrate(&f, mu)? - integrate(&f, nu)?;
        value += diff.abs() * 0.5f64.powi(i as i32);
    }
    Ok(MeasureDistanceReport {
        value,
        depth,
        tail_bound: 0.5f64.powi(depth as i32 - 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PhasePoint, SymbolicPoint};
    use proptest::prelude::*;

    fn atom(sym: u8, t: f64, w: f64) -> (PhasePoint, f64) {
        (
            PhasePoint::symbolic(SymbolicPoint::periodic(vec![sym]).unwrap(), t),
            w,
        )
    }

    fn sym_measure(spec: &[(u8, f64, f64)]) -> EmpiricalMeasure {
        EmpiricalMeasure::new(spec.iter().map(|&(s, t, w)| atom(s, t, w)).collect()).unwrap()
    }

    #[test]
    fn identical_measures_have_zero_distance() {
        let mu = sym_measure(&[(0, 0.25, 0.5), (1, 0.75, 0.5)]);
        let r = weak_star_distance(&mu, &mu, 40).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.depth, 40);
        assert!((r.tail_bound - 0.5f64.powi(39)).abs() < 1e-300);
    }

    #[test]
    fn distance_matches_frozen_reference_values() {
        // Frozen from an independent implementation of the same series.
        let mu1 = sym_measure(&[(0, 0.3, 1.0)]);
        let nu1 = sym_measure(&[(1, 0.7, 1.0)]);
        let r1 = weak_star_distance(&mu1, &nu1, 20).unwrap();
        assert!(
            (r1.value - 0.7866293547378768).abs() < 1e-13,
            "got {}",
            r1.value
        );

        let mu2 = sym_measure(&[(0, 0.25, 0.5), (1, 0.75, 0.5)]);
        let nu2 = sym_measure(&[(1, 0.5, 1.0)]);
        let r2 = weak_star_distance(&mu2, &nu2, 26).unwrap();
        assert!(
            (r2.value - 0.35005851089954376).abs() < 1e-13,
            "got {}",
            r2.value
        );
    }

    #[test]
    fn torus_measures_use_the_character_family() {
        let mu = EmpiricalMeasure::uniform(vec![PhasePoint::torus([0.1, 0.2], 0.3)]);
        let nu = EmpiricalMeasure::uniform(vec![PhasePoint::torus([0.1, 0.2], 0.8)]);
        // The two points differ only in t; the first character cos(2*pi*t)
        // separates them: |cos(0.6*pi) - cos(1.6*pi)| / 2.
        let r = weak_star_distance(&mu, &nu, 1).unwrap();
        let expect = (crate::numeric::cos2pi(0.3) - crate::numeric::cos2pi(0.8)).abs() / 2.0;
        assert!((r.value - expect).abs() < 1e-15);
    }

    #[test]
    fn mixed_kinds_are_rejected() {
        let mu = sym_measure(&[(0, 0.5, 1.0)]);
        let nu = EmpiricalMeasure::uniform(vec![PhasePoint::torus([0.0, 0.0], 0.0)]);
        assert!(matches!(
            weak_star_distance(&mu, &nu, 8),
            Err(MeasureError::KindMismatch)
        ));
        assert!(matches!(
            weak_star_distance(&mu, &mu, 0),
            Err(MeasureError::ZeroDepth)
        ));
    }

    fn arb_sym_measure() -> impl Strategy<Value = EmpiricalMeasure> {
        proptest::collection::vec((0u8..2, 0.0..1.0f64, 0.05..1.0f64), 1..5).prop_map(|raw| {
            let total: f64 = raw.iter().map(|r| r.2).sum();
            sym_measure(
                &raw.iter()
                    .map(|&(s, t, w)| (s, t, w / total))
                    .collect::<Vec<_>>(),
            )
        })
    }

    proptest! {
        #[test]
        fn deeper_truncations_grow_within_the_tail_bound(
            mu in arb_sym_measure(),
            nu in arb_sym_measure(),
            d1 in 1usize..30,
            extra in 0usize..30,
        ) {
            let shallow = weak_star_distance(&mu, &nu, d1).unwrap();
            let deep = weak_star_distance(&mu, &nu, d1 + extra).unwrap();
            prop_assert!(deep.value + 1e-12 >= shallow.value);
            prop_assert!(deep.value <= shallow.value + shallow.tail_bound + 1e-12);
        }

        #[test]
        fn metric_axioms_hold(
            mu in arb_sym_measure(),
            nu in arb_sym_measure(),
            rho in arb_sym_measure(),
        ) {
            let duv = weak_star_distance(&mu, &nu, 32).unwrap().value;
            let dvu = weak_star_distance(&nu, &mu, 32).unwrap().value;
            let duw = weak_star_distance(&mu, &rho, 32).unwrap().value;
            let dwv = weak_star_distance(&rho, &nu, 32).unwrap().value;
            prop_assert_eq!(duv, dvu);
            prop_assert!(duv <= duw + dwv + 1e-12);
            prop_assert!(duv >= 0.0 && duv <= 2.0);
        }
    }
}
