//! Finite orbit segments and the empirical measures they induce.

use serde::{Deserialize, Serialize};

use super::OrbitError;
use crate::model::{BasePoint, PhasePoint, PhaseSpaceKind, SkewProductSystem};

/// A finite forward run of the skew product: the visited points plus the log
/// center derivative sampled at each of them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitSegment {
    points: Vec<PhasePoint>,
    clogs: Vec<f64>,
}

impl OrbitSegment {
    /// Iterates `n` steps starting from `start` (the start itself is the
    /// first sample; its image after `n` steps is not included).
    pub fn from_start(
        system: &SkewProductSystem,
        start: &PhasePoint,
        n: usize,
    ) -> Result<Self, OrbitError> {
        if n == 0 {
            return Err(OrbitError::EmptyWord);
        }
        let mut points = Vec::with_capacity(n);
        let mut clogs = Vec::with_capacity(n);
        let mut p = start.clone();
        for _ in 0..n {
            clogs.push(system.center_log_derivative(&p)?);
            points.push(p.clone());
            p = system.apply(&p, 1)?;
        }
        Ok(OrbitSegment { points, clogs })
    }

    /// Wraps an externally assembled point sequence, recomputing the center
    /// log derivatives. The points need not lie on a genuine orbit.
    pub fn from_points(
        system: &SkewProductSystem,
        points: Vec<PhasePoint>,
    ) -> Result<Self, OrbitError> {
        if points.is_empty() {
            return Err(OrbitError::EmptyWord);
        }
        let clogs = points
            .iter()
            .map(|p| system.center_log_derivative(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(OrbitSegment { points, clogs })
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn clogs(&self) -> &[f64] {
        &self.clogs
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Birkhoff average of the log center derivative over the segment.
    pub fn birkhoff_center(&self) -> f64 {
        self.clogs.iter().sum::<f64>() / self.clogs.len() as f64
    }

    /// Uniform empirical measure on the segment's points.
    pub fn measure(&self) -> EmpiricalMeasure {
        EmpiricalMeasure::uniform(self.points.clone())
    }
}

/// A finitely supported probability measure on one of the phase spaces.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    atoms: Vec<(PhasePoint, f64)>,
}

impl EmpiricalMeasure {
    /// Validates nonnegative weights summing to 1 (within 1e-12) and a
    /// homogeneous phase space.
    pub fn new(atoms: Vec<(PhasePoint, f64)>) -> Result<Self, OrbitError> {
        if atoms.is_empty() {
            return Err(OrbitError::EmptyWord);
        }
        let kind = atoms[0].0.space_kind();
        if atoms.iter().any(|(p, _)| p.space_kind() != kind) {
            return Err(OrbitError::MixedMeasure);
        }
        let sum: f64 = atoms.iter().map(|(_, w)| w).sum();
        if atoms.iter().any(|(_, w)| *w < 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(OrbitError::BadWeights(sum));
        }
        Ok(EmpiricalMeasure { atoms })
    }

    /// Equal weight on every point. Panics on an empty point list.
    pub fn uniform(points: Vec<PhasePoint>) -> Self {
        assert!(!points.is_empty(), "empirical measure needs at least one atom");
        let w = 1.0 / points.len() as f64;
        EmpiricalMeasure {
            atoms: points.into_iter().map(|p| (p, w)).collect(),
        }
    }

    pub fn atoms(&self) -> &[(PhasePoint, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn space_kind(&self) -> PhaseSpaceKind {
        self.atoms[0].0.space_kind()
    }

    /// Merges atoms sitting at identical points (bit-identical coordinates;
    /// symbolic points compare by canonical cycle). Points with history are
    /// never merged.
    pub fn merged(&self) -> EmpiricalMeasure {
        let mut keyed: Vec<(MergeKey, PhasePoint, f64)> = Vec::with_capacity(self.atoms.len());
        'outer: for (idx, (p, w)) in self.atoms.iter().enumerate() {
            let key = merge_key(p, idx);
            for entry in keyed.iter_mut() {
                if entry.0 == key {
                    entry.2 += *w;
                    continue 'outer;
                }
            }
            keyed.push((key, p.clone(), *w));
        }
        EmpiricalMeasure {
            atoms: keyed.into_iter().map(|(_, p, w)| (p, w)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum MergeKey {
    Torus(u64, u64, u64),
    Symbolic(Vec<u8>, usize, u64),
    Unique(usize),
}

fn merge_key(p: &PhasePoint, idx: usize) -> MergeKey {
    match &p.base {
        BasePoint::Torus(x) => MergeKey::Torus(x[0].to_bits(), x[1].to_bits(), p.t.to_bits()),
        BasePoint::Symbolic(s) => match s.canonical_cycle() {
            Some((word, phase)) => MergeKey::Symbolic(word, phase, p.t.to_bits()),
            None => MergeKey::Unique(idx),
        },
    }
}
