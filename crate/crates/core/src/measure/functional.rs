//! Affine functionals of empirical measures: the center exponent, the index
//! classification it induces, and convex combinations.

use super::MeasureError;
use crate::model::SkewProductSystem;
use crate::orbit::EmpiricalMeasure;

/// Hyperbolicity class of a measure, decided by the sign of its center
/// exponent outside a tolerance band around zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexClass {
    /// Center exponent above the band: the center joins the unstable bundle.
    Expanding,
    /// Center exponent below the band: one extra stable direction.
    Contracting,
    /// Exponent inside the band: not hyperbolic at this resolution.
    Neutral,
}

impl IndexClass {
    /// Stable index given the number of stable directions the base
    /// contributes on its own.
    pub fn stable_index(self, base_stable: usize) -> Option<usize> {
        match self {
            IndexClass::Expanding => Some(base_stable),
            IndexClass::Contracting => Some(base_stable + 1),
            IndexClass::Neutral => None,
        }
    }
}

/// Integral of the fiber log-derivative: the center Lyapunov exponent when
/// the measure is invariant.
pub fn center_exponent(
    system: &SkewProductSystem,
    mu: &EmpiricalMeasure,
) -> Result<f64, MeasureError> {
    let mut acc = 0.0;
    for (p, w) in mu.atoms() {
        acc += w * system.center_log_derivative(p)?;
    }
    Ok(acc)
}

/// Classify by the sign of the exponent relative to a tolerance band.
pub fn classify_index(exponent: f64, tol: f64) -> IndexClass {
    if exponent > tol {
        IndexClass::Expanding
    } else if exponent < -tol {
        IndexClass::Contracting
    } else {
        IndexClass::Neutral
    }
}

/// Convex combination of measures over the same phase space. Coefficients
/// must be nonnegative and sum to 1; atoms are concatenated with scaled
/// weights (use [`EmpiricalMeasure::merged`] to coalesce duplicates).
pub fn convex_combine(
    parts: &[(EmpiricalMeasure, f64)],
) -> Result<EmpiricalMeasure, MeasureError> {
    if parts.is_empty() {
        return Err(MeasureError::Empty);
    }
    let total: f64 = parts.iter().map(|(_, w)| w).sum();
    if parts.iter().any(|(_, w)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
        return Err(MeasureError::BadWeights(total));
    }
    let kind = parts[0].0.space_kind();
    if parts.iter().any(|(m, _)| m.space_kind() != kind) {
        return Err(MeasureError::KindMismatch);
    }
    let mut atoms = Vec::new();
    for (m, w) in parts {
        for (p, pw) in m.atoms() {
            atoms.push((p.clone(), w * pw));
        }
    }
    Ok(EmpiricalMeasure::new(atoms)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PhasePoint, SymbolicPoint};
    use proptest::prelude::*;

    fn delta(sym: u8, t: f64) -> EmpiricalMeasure {
        EmpiricalMeasure::uniform(vec![PhasePoint::symbolic(
            SymbolicPoint::periodic(vec![sym]).unwrap(),
            t,
        )])
    }

    #[test]
    fn exponent_of_band_fixed_points_matches_the_map_derivatives() {
        let sys = SkewProductSystem::default_symbolic();
        // The expanding branch fixes 1/2 with derivative 1.8 exactly.
        let e1 = center_exponent(&sys, &delta(1, 0.5)).unwrap();
        assert!((e1 - 1.8f64.ln()).abs() < 1e-14);
        // The contracting branch fixes a point 1.25e-6 above 1/2 where its
        // derivative is 0.2 up to O(1e-10).
        let e0 = center_exponent(&sys, &delta(0, 0.5000012500000001)).unwrap();
        assert!((e0 - 0.2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn two_atom_targets_interpolate_the_branch_rates() {
        let sys = SkewProductSystem::default_symbolic();
        let alpha = 0.7;
        let mu = convex_combine(&[
            (delta(1, 0.5), alpha),
            (delta(0, 0.5000012500000001), 1.0 - alpha),
        ])
        .unwrap();
        let e = center_exponent(&sys, &mu).unwrap();
        let expect = alpha * 1.8f64.ln() + (1.0 - alpha) * 0.2f64.ln();
        assert!((e - expect).abs() < 1e-9);
    }

    #[test]
    fn classification_bands_and_index_shift() {
        assert_eq!(classify_index(0.1, 1e-3), IndexClass::Expanding);
        assert_eq!(classify_index(-0.1, 1e-3), IndexClass::Contracting);
        assert_eq!(classify_index(5e-4, 1e-3), IndexClass::Neutral);
        assert_eq!(classify_index(-5e-4, 1e-3), IndexClass::Neutral);

        assert_eq!(IndexClass::Expanding.stable_index(1), Some(1));
        assert_eq!(IndexClass::Contracting.stable_index(1), Some(2));
        assert_eq!(IndexClass::Neutral.stable_index(1), None);
    }

    #[test]
    fn combine_rejects_bad_inputs() {
        assert!(matches!(convex_combine(&[]), Err(MeasureError::Empty)));
        let bad = convex_combine(&[(delta(0, 0.1), 0.4), (delta(1, 0.2), 0.4)]);
        assert!(matches!(bad, Err(MeasureError::BadWeights(_))));
        let torus = EmpiricalMeasure::uniform(vec![PhasePoint::torus([0.0, 0.0], 0.0)]);
        let mixed = convex_combine(&[(delta(0, 0.1), 0.5), (torus, 0.5)]);
        assert!(matches!(mixed, Err(MeasureError::KindMismatch)));
    }

    proptest! {
        #[test]
        fn exponent_is_affine_in_the_measure(
            t1 in 0.0..1.0f64,
            t2 in 0.0..1.0f64,
            s in 0.0..1.0f64,
            sym1 in 0u8..2,
            sym2 in 0u8..2,
        ) {
            let sys = SkewProductSystem::default_symbolic();
            let mu = delta(sym1, t1);
            let nu = delta(sym2, t2);
            let mix = convex_combine(&[(mu.clone(), s), (nu.clone(), 1.0 - s)]).unwrap();
            let lhs = center_exponent(&sys, &mix).unwrap();
            let rhs = s * center_exponent(&sys, &mu).unwrap()
                + (1.0 - s) * center_exponent(&sys, &nu).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
