//! Enumeration of periodic base orbits: rational lattice points for toral
//! automorphisms, admissible cyclic words for subshifts.

use super::{OrbitError, TorusRational};
use crate::model::{ShiftBase, TorusBase};

/// Index of the lexicographically minimal rotation of `word` (leftmost such
/// rotation on ties).
pub fn minimal_rotation(word: &[u8]) -> usize {
    let n = word.len();
    let mut best = 0usize;
    for r in 1..n {
        for i in 0..n {
            let a = word[(r + i) % n];
            let b = word[(best + i) % n];
            if a != b {
                if a < b {
                    best = r;
                }
                break;
            }
        }
    }
    best
}

/// Smallest period of `word` viewed as a cyclic sequence.
pub fn primitive_period(word: &[u8]) -> usize {
    let n = word.len();
    for d in 1..n {
        if n % d == 0 && (0..n).all(|i| word[i] == word[(i + d) % n]) {
            return d;
        }
    }
    n
}

/// All points of the 2-torus fixed by the n-th power of the automorphism.
///
/// Every such point is rational with denominator `D = |det(A^n - I)|`; the
/// method scans the D x D grid for solutions of the congruence
/// `(A^n - I) x = 0 (mod D)` and returns them sorted. The count always equals
/// `|trace(A^n) - 2|`.
pub fn torus_periodic_points(base: &TorusBase, n: u32) -> Result<Vec<TorusRational>, OrbitError> {
    let (m, d) = power_minus_identity(base, n)?;
    let budget = 3000usize;
    if d as usize > budget {
        return Err(OrbitError::BudgetExceeded {
            what: "torus lattice denominator",
            needed: d as usize,
            limit: budget,
        });
    }
    let mut out = Vec::new();
    for p in 0..d {
        for q in 0..d {
            let r0 = (m[0][0] * p + m[0][1] * q).rem_euclid(d);
            let r1 = (m[1][0] * p + m[1][1] * q).rem_euclid(d);
            if r0 == 0 && r1 == 0 {
                out.push(TorusRational::new([p, q], d)?);
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Independent check of the same set: iterates the automorphism exactly on
/// every rational grid point and keeps those that return after n steps.
pub fn torus_periodic_points_oracle(
    base: &TorusBase,
    n: u32,
) -> Result<Vec<TorusRational>, OrbitError> {
    let (_, d) = power_minus_identity(base, n)?;
    let mut out = Vec::new();
    for p in 0..d {
        for q in 0..d {
            let x = TorusRational::new([p, q], d)?;
            let mut y = x;
            for _ in 0..n {
                y = y.apply(base);
            }
            if y == x {
                out.push(x);
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn power_minus_identity(base: &TorusBase, n: u32) -> Result<([[i64; 2]; 2], i64), OrbitError> {
    if n == 0 {
        return Err(OrbitError::EmptyWord);
    }
    let p = base.pow(n).map_err(|_| OrbitError::BudgetExceeded {
        what: "matrix power",
        needed: n as usize,
        limit: 60,
    })?;
    let m = [[p[0][0] - 1, p[0][1]], [p[1][0], p[1][1] - 1]];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    // det(A^n - I) = 2 - trace(A^n) for determinant-one matrices; hyperbolic
    // matrices make it nonzero.
    let d = det.abs();
    if d == 0 {
        return Err(OrbitError::Inconsistent("power of base is not hyperbolic"));
    }
    Ok((m, d))
}

/// All admissible cyclic words of length n over {0, 1}. With
/// `dedup_rotations` the list keeps one representative per rotation class
/// (the minimal rotation) and drops non-primitive words, i.e. it enumerates
/// genuine period-n base orbits.
pub fn shift_words(
    base: &ShiftBase,
    n: u32,
    dedup_rotations: bool,
) -> Result<Vec<Vec<u8>>, OrbitError> {
    if n == 0 {
        return Err(OrbitError::EmptyWord);
    }
    if n > 24 {
        return Err(OrbitError::BudgetExceeded {
            what: "word length",
            needed: n as usize,
            limit: 24,
        });
    }
    let n = n as usize;
    let mut out = Vec::new();
    for bits in 0u32..(1u32 << n) {
        let word: Vec<u8> = (0..n).map(|i| ((bits >> (n - 1 - i)) & 1) as u8).collect();
        if !base.admits_cycle(&word) {
            continue;
        }
        if dedup_rotations {
            if primitive_period(&word) != n || minimal_rotation(&word) != 0 {
                continue;
            }
        }
        out.push(word);
    }
    Ok(out)
}
