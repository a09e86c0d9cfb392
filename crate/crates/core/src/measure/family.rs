//! The countable test-function family that induces the weak-star metric.
//!
//! Symbolic side: indicators of centered symbol windows times fiber waves.
//! Windows of radius r are enumerated in lexicographic order, each carrying
//! 13 waves (the indicator itself, then cos/sin pairs at fiber frequencies
//! 1 through 6). Radius-0 windows come first, so the leading 26 functions
//! depend only on the current symbol and the fiber coordinate.
//!
//! Torus side: real characters cos/sin(2*pi*k.v) of the 3-torus (x1, x2, t),
//! enumerated by sup-norm shells of the frequency vector k; within a shell,
//! canonical representatives (first nonzero component positive) in
//! lexicographic order, cosine before sine.

use super::MeasureError;
use crate::model::{BasePoint, PhasePoint, PhaseSpaceKind};
use crate::numeric::{cos2pi, sin2pi};

/// Fiber factor attached to a symbol window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiberWave {
    /// Constant 1: the bare window indicator.
    One,
    /// cos(2*pi*f*t).
    Cos(u32),
    /// sin(2*pi*f*t).
    Sin(u32),
}

/// Cosine or sine character on the torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorusPhase {
    Cos,
    Sin,
}

/// One member of the family; sup norm at most 1 in every case.
#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    /// Indicator of the symbol window centered at the current base position,
    /// times a fiber wave. `window` has odd length 2r+1 and constrains the
    /// symbols at offsets -r..=r.
    Cylinder { window: Vec<u8>, wave: FiberWave },
    /// cos/sin(2*pi*(k1*x1 + k2*x2 + k3*t)) on the 3-torus.
    Character { k: [i64; 3], phase: TorusPhase },
}

/// Waves per window: indicator plus cos/sin at frequencies 1..=6.
const WAVES_PER_WINDOW: usize = 13;
/// Largest symbol window radius in the enumeration.
const MAX_WINDOW_RADIUS: usize = 3;
/// Largest sup-norm shell of torus frequency vectors.
const MAX_SHELL: i64 = 6;

fn wave_of(j: usize) -> FiberWave {
    if j == 0 {
        FiberWave::One
    } else {
        let f = ((j + 1) / 2) as u32;
        if j % 2 == 1 {
            FiberWave::Cos(f)
        } else {
            FiberWave::Sin(f)
        }
    }
}

/// Canonical frequency vectors of sup norm exactly `r`, lexicographic.
fn shell_vectors(r: i64) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for k1 in -r..=r {
        for k2 in -r..=r {
            for k3 in -r..=r {
                let k = [k1, k2, k3];
                if k.iter().map(|c| c.abs()).max() != Some(r) {
                    continue;
                }
                match k.iter().find(|&&c| c != 0) {
                    Some(&c) if c > 0 => out.push(k),
                    _ => {}
                }
            }
        }
    }
    out
}

/// The i-th test function (1-based) of the family for the given phase space.
pub fn test_function(kind: PhaseSpaceKind, i: usize) -> Result<TestFunction, MeasureError> {
    if i == 0 {
        return Err(MeasureError::IndexOutOfRange(0));
    }
    match kind {
        PhaseSpaceKind::Symbolic => {
            let mut base = 0usize;
            for r in 0..=MAX_WINDOW_RADIUS {
                let len = 2 * r + 1;
                let patterns = 1usize << len;
                let block = patterns * WAVES_PER_WINDOW;
                if i <= base + block {
                    let rel = i - base - 1;
                    let pat = rel / WAVES_PER_WINDOW;
                    let j = rel % WAVES_PER_WINDOW;
                    let window = (0..len)
                        .map(|b| ((pat >> (len - 1 - b)) & 1) as u8)
                        .collect();
                    return Ok(TestFunction::Cylinder {
                        window,
                        wave: wave_of(j),
                    });
                }
                base += block;
            }
            Err(MeasureError::IndexOutOfRange(i))
        }
        PhaseSpaceKind::Torus => {
            let mut base = 0usize;
            for r in 1..=MAX_SHELL {
                let vectors = shell_vectors(r);
                let block = vectors.len() * 2;
                if i <= base + block {
                    let rel = i - base - 1;
                    let phase = if rel % 2 == 0 {
                        TorusPhase::Cos
                    } else {
                        TorusPhase::Sin
                    };
                    return Ok(TestFunction::Character {
                        k: vectors[rel / 2],
                        phase,
                    });
                }
                base += block;
            }
            Err(MeasureError::IndexOutOfRange(i))
        }
    }
}

impl TestFunction {
    /// Phase space this function is defined on.
    pub fn space_kind(&self) -> PhaseSpaceKind {
        match self {
            TestFunction::Cylinder { .. } => PhaseSpaceKind::Symbolic,
            TestFunction::Character { .. } => PhaseSpaceKind::Torus,
        }
    }

    /// Evaluate at a phase point. Fails on a phase-space mismatch, or when a
    /// symbol window reaches past the stored history of an eventually
    /// periodic base point.
    pub fn evaluate(&self, p: &PhasePoint) -> Result<f64, MeasureError> {
        match (self, &p.base) {
            (TestFunction::Cylinder { window, wave }, BasePoint::Symbolic(s)) => {
                let r = (window.len() / 2) as i64;
                for (b, &want) in window.iter().enumerate() {
                    if s.symbol_at(b as i64 - r)? != want {
                        return Ok(0.0);
                    }
                }
                Ok(match wave {
                    FiberWave::One => 1.0,
                    FiberWave::Cos(f) => cos2pi(*f as f64 * p.t),
                    FiberWave::Sin(f) => sin2pi(*f as f64 * p.t),
                })
            }
            (TestFunction::Character { k, phase }, BasePoint::Torus(x)) => {
                let arg = k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * p.t;
                Ok(match phase {
                    TorusPhase::Cos => cos2pi(arg),
                    TorusPhase::Sin => sin2pi(arg),
                })
            }
            _ => Err(MeasureError::KindMismatch),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SymbolicPoint;
    use proptest::prelude::*;

    fn sym_point(cycle: Vec<u8>, t: f64) -> PhasePoint {
        PhasePoint::symbolic(SymbolicPoint::periodic(cycle).unwrap(), t)
    }

    #[test]
    fn leading_block_reads_only_the_current_symbol() {
        for (i, want) in [
            (1, TestFunction::Cylinder { window: vec![0], wave: FiberWave::One }),
            (2, TestFunction::Cylinder { window: vec![0], wave: FiberWave::Cos(1) }),
            (3, TestFunction::Cylinder { window: vec![0], wave: FiberWave::Sin(1) }),
            (12, TestFunction::Cylinder { window: vec![0], wave: FiberWave::Cos(6) }),
            (13, TestFunction::Cylinder { window: vec![0], wave: FiberWave::Sin(6) }),
            (14, TestFunction::Cylinder { window: vec![1], wave: FiberWave::One }),
            (26, TestFunction::Cylinder { window: vec![1], wave: FiberWave::Sin(6) }),
        ] {
            assert_eq!(test_function(PhaseSpaceKind::Symbolic, i).unwrap(), want);
        }
    }

    #[test]
    fn radius_one_block_spans_expected_indices() {
        // 26 radius-0 functions, then 8 * 13 = 104 radius-1 functions.
        assert_eq!(
            test_function(PhaseSpaceKind::Symbolic, 27).unwrap(),
            TestFunction::Cylinder { window: vec![0, 0, 0], wave: FiberWave::One }
        );
        assert_eq!(
            test_function(PhaseSpaceKind::Symbolic, 130).unwrap(),
            TestFunction::Cylinder { window: vec![1, 1, 1], wave: FiberWave::Sin(6) }
        );
        assert_eq!(
            test_function(PhaseSpaceKind::Symbolic, 131).unwrap(),
            TestFunction::Cylinder { window: vec![0; 5], wave: FiberWave::One }
        );
        // Total: 13 * (2 + 8 + 32 + 128).
        assert!(test_function(PhaseSpaceKind::Symbolic, 2210).is_ok());
        assert!(matches!(
            test_function(PhaseSpaceKind::Symbolic, 2211),
            Err(MeasureError::IndexOutOfRange(2211))
        ));
        assert!(matches!(
            test_function(PhaseSpaceKind::Symbolic, 0),
            Err(MeasureError::IndexOutOfRange(0))
        ));
    }

    #[test]
    fn torus_shells_enumerate_canonical_vectors() {
        assert_eq!(
            test_function(PhaseSpaceKind::Torus, 1).unwrap(),
            TestFunction::Character { k: [0, 0, 1], phase: TorusPhase::Cos }
        );
        assert_eq!(
            test_function(PhaseSpaceKind::Torus, 2).unwrap(),
            TestFunction::Character { k: [0, 0, 1], phase: TorusPhase::Sin }
        );
        // Shell 1 has (3^3 - 1) / 2 = 13 canonical vectors, 26 functions.
        assert_eq!(
            test_function(PhaseSpaceKind::Torus, 26).unwrap(),
            TestFunction::Character { k: [1, 1, 1], phase: TorusPhase::Sin }
        );
        assert_eq!(
            test_function(PhaseSpaceKind::Torus, 27).unwrap(),
            TestFunction::Character { k: [0, 0, 2], phase: TorusPhase::Cos }
        );
        // Shell r holds 12r^2 + 1 canonical vectors.
        assert_eq!(shell_vectors(2).len(), 49);
        assert_eq!(shell_vectors(6).len(), 433);
    }

    #[test]
    fn window_indicator_matches_symbols_around_position() {
        let p = sym_point(vec![0, 1], 0.3);
        let ind0 = test_function(PhaseSpaceKind::Symbolic, 1).unwrap();
        let ind1 = test_function(PhaseSpaceKind::Symbolic, 14).unwrap();
        assert_eq!(ind0.evaluate(&p).unwrap(), 1.0);
        assert_eq!(ind1.evaluate(&p).unwrap(), 0.0);

        // Window [1, 0, 1] matches the [0, 1] cycle seen from an even index.
        let f = TestFunction::Cylinder { window: vec![1, 0, 1], wave: FiberWave::One };
        assert_eq!(f.evaluate(&p).unwrap(), 1.0);
        let g = TestFunction::Cylinder { window: vec![0, 0, 0], wave: FiberWave::One };
        assert_eq!(g.evaluate(&p).unwrap(), 0.0);
    }

    #[test]
    fn waves_multiply_the_indicator() {
        let t = 0.37;
        let p = sym_point(vec![1], t);
        let f = TestFunction::Cylinder { window: vec![1], wave: FiberWave::Cos(3) };
        assert!((f.evaluate(&p).unwrap() - cos2pi(3.0 * t)).abs() < 1e-15);
        let g = TestFunction::Cylinder { window: vec![0], wave: FiberWave::Cos(3) };
        assert_eq!(g.evaluate(&p).unwrap(), 0.0);
    }

    #[test]
    fn character_evaluates_on_torus_points() {
        let p = PhasePoint::torus([0.2, 0.6], 0.15);
        let f = TestFunction::Character { k: [1, -1, 2], phase: TorusPhase::Sin };
        let arg = 0.2 - 0.6 + 2.0 * 0.15;
        assert!((f.evaluate(&p).unwrap() - sin2pi(arg)).abs() < 1e-15);
    }

    #[test]
    fn wide_window_exhausts_stored_history() {
        let s = SymbolicPoint::with_history(vec![1], vec![0]).unwrap();
        let p = PhasePoint::symbolic(s, 0.5);
        // Radius-2 window needs offsets -2..=2 but history starts at -1.
        let f = TestFunction::Cylinder { window: vec![0; 5], wave: FiberWave::One };
        assert!(matches!(f.evaluate(&p), Err(MeasureError::Model(_))));
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let f = test_function(PhaseSpaceKind::Symbolic, 1).unwrap();
        let p = PhasePoint::torus([0.0, 0.0], 0.0);
        assert!(matches!(f.evaluate(&p), Err(MeasureError::KindMismatch)));
    }

    proptest! {
        #[test]
        fn every_function_is_bounded_by_one(
            i in 1usize..200,
            x1 in 0.0..1.0f64,
            x2 in 0.0..1.0f64,
            t in 0.0..1.0f64,
            word in proptest::collection::vec(0u8..2, 1..6),
        ) {
            let f = test_function(PhaseSpaceKind::Torus, i).unwrap();
            let p = PhasePoint::torus([x1, x2], t);
            prop_assert!(f.evaluate(&p).unwrap().abs() <= 1.0);

            let g = test_function(PhaseSpaceKind::Symbolic, i).unwrap();
            let q = sym_point(word, t);
            prop_assert!(g.evaluate(&q).unwrap().abs() <= 1.0);
        }
    }
}
