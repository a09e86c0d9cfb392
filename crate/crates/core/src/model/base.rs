//! Base dynamics: hyperbolic toral automorphisms and subshifts on two symbols.

use crate::numeric::mod1;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by base-system constructors and cocycle queries.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum BaseError {
    #[error("matrix must have determinant +1, got {0}")]
    NotUnimodular(i64),
    #[error("matrix must be hyperbolic: |trace| > 2 required, got trace {0}")]
    NotHyperbolic(i64),
    #[error("transition matrix must be primitive (some power strictly positive)")]
    NotPrimitive,
    #[error("integer overflow computing matrix power {0}")]
    PowerOverflow(u32),
}

/// Hyperbolic automorphism of the 2-torus given by an integer matrix with
/// determinant +1 and |trace| > 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusBase {
    m: [[i64; 2]; 2],
}

impl TorusBase {
    pub fn new(m: [[i64; 2]; 2]) -> Result<Self, BaseError> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det != 1 {
            return Err(BaseError::NotUnimodular(det));
        }
        let tr = m[0][0] + m[1][1];
        if tr.abs() <= 2 {
            return Err(BaseError::NotHyperbolic(tr));
        }
        Ok(TorusBase { m })
    }

    /// The standard example `[[2, 1], [1, 0 + 1]]` with expansion
    /// `(3 + sqrt 5) / 2`.
    pub fn standard() -> Self {
        TorusBase {
            m: [[2, 1], [1, 1]],
        }
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.m
    }

    pub fn trace(&self) -> i64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Eigenvalue moduli `(lambda_s, lambda_u)` with
    /// `lambda_s = 1 / lambda_u < 1 < lambda_u`.
    pub fn eigen_rates(&self) -> (f64, f64) {
        let tr = self.trace().abs() as f64;
        let lu = (tr + (tr * tr - 4.0).sqrt()) / 2.0;
        (1.0 / lu, lu)
    }

    /// One step of the automorphism on canonical torus coordinates.
    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        [
            mod1(self.m[0][0] as f64 * x[0] + self.m[0][1] as f64 * x[1]),
            mod1(self.m[1][0] as f64 * x[0] + self.m[1][1] as f64 * x[1]),
        ]
    }

    /// One step of the inverse automorphism (the inverse of a determinant-one
    /// matrix is its adjugate).
    pub fn apply_inv(&self, x: [f64; 2]) -> [f64; 2] {
        let inv = [
            [self.m[1][1], -self.m[0][1]],
            [-self.m[1][0], self.m[0][0]],
        ];
        [
            mod1(inv[0][0] as f64 * x[0] + inv[0][1] as f64 * x[1]),
            mod1(inv[1][0] as f64 * x[0] + inv[1][1] as f64 * x[1]),
        ]
    }

    /// Integer matrix power with overflow checking.
    pub fn pow(&self, n: u32) -> Result<[[i64; 2]; 2], BaseError> {
        let mut acc: [[i64; 2]; 2] = [[1, 0], [0, 1]];
        for _ in 0..n {
            acc = mat_mul(acc, self.m).ok_or(BaseError::PowerOverflow(n))?;
        }
        Ok(acc)
    }

    /// Exact stable/unstable expansion factors of the n-step cocycle:
    /// `(lambda_s^n, lambda_u^n)`. Their product is 1 up to rounding.
    pub fn cocycle_rates(&self, n: u32) -> (f64, f64) {
        let (ls, lu) = self.eigen_rates();
        (ls.powi(n as i32), lu.powi(n as i32))
    }
}

fn mat_mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> Option<[[i64; 2]; 2]> {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let p0 = a[i][0].checked_mul(b[0][j])?;
            let p1 = a[i][1].checked_mul(b[1][j])?;
            out[i][j] = p0.checked_add(p1)?;
        }
    }
    Some(out)
}

/// Subshift of finite type on the alphabet {0, 1}; `transitions[i][j]` allows
/// the word `ij`. The full shift allows everything.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftBase {
    transitions: [[bool; 2]; 2],
}

impl ShiftBase {
    /// Requires primitivity so that periodic words of every sufficiently long
    /// length exist and the shift is topologically mixing.
    pub fn new(transitions: [[bool; 2]; 2]) -> Result<Self, BaseError> {
        let base = ShiftBase { transitions };
        if !base.is_primitive() {
            return Err(BaseError::NotPrimitive);
        }
        Ok(base)
    }

    /// Full two-shift: every transition allowed.
    pub fn full() -> Self {
        ShiftBase {
            transitions: [[true, true], [true, true]],
        }
    }

    pub fn allows(&self, from: u8, to: u8) -> bool {
        self.transitions[from as usize][to as usize]
    }

    /// A 2x2 zero-one matrix is primitive iff some power up to 4 is strictly
    /// positive.
    pub fn is_primitive(&self) -> bool {
        let mut p = self.transitions;
        for _ in 0..4 {
            if p.iter().flatten().all(|&e| e) {
                return true;
            }
            let mut q = [[false; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    q[i][j] = (0..2).any(|k| p[i][k] && self.transitions[k][j]);
                }
            }
            p = q;
        }
        p.iter().flatten().all(|&e| e)
    }

    /// Whether `word` is admissible as a cyclic itinerary (every adjacent pair
    /// including the wrap-around is an allowed transition).
    pub fn admits_cycle(&self, word: &[u8]) -> bool {
        if word.is_empty() {
            return false;
        }
        word.iter().enumerate().all(|(i, &s)| {
            let next = word[(i + 1) % word.len()];
            s < 2 && next < 2 && self.allows(s, next)
        })
    }
}
