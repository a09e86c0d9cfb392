//! Skew products: hyperbolic base dynamics driving circle fiber maps.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::base::{ShiftBase, TorusBase};
use super::fiber::CircleFiberMap;
use crate::numeric::{circle_dist, cos2pi};

/// Iteration budget for a single `apply` call; guards runaway loops when a
/// caller requests an absurd step count.
pub const MAX_SKEW_STEPS: i64 = 5_000_000;

/// Errors raised by skew-product evaluation.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum SkewError {
    /// A symbolic point with a finite past was asked for a symbol before the
    /// start of its stored window.
    #[error("symbol window exhausted: position {0} precedes the stored history")]
    WindowExhausted(i64),
    /// Requested more steps than the per-call budget.
    #[error("iteration budget exceeded: |{0}| > {MAX_SKEW_STEPS}")]
    IterationBudget(i64),
    /// Symbols must be 0 or 1.
    #[error("invalid symbol {0}; the alphabet is {{0, 1}}")]
    InvalidSymbol(u8),
    /// Itineraries must be nonempty and admissible for the base shift.
    #[error("itinerary is empty or not admissible for the base shift")]
    BadItinerary,
    /// Operation mixing points of different phase spaces.
    #[error("phase points belong to different phase spaces")]
    MixedSpaces,
    /// Fiber amplitude versus base rates violates partial hyperbolicity.
    #[error("partial hyperbolicity fails: need 1 + |a| < {need_above} and 1 - |a| > {need_below}, got |a| = {amp}")]
    NotPartiallyHyperbolic {
        amp: f64,
        need_above: f64,
        need_below: f64,
    },
    /// Symbolic proxy rates must dominate every fiber derivative.
    #[error("proxy rates must satisfy ss < min fiber derivative and uu > max fiber derivative")]
    BadProxyRates,
}

/// A point of the two-sided shift: a current position inside an eventually
/// periodic symbol stream. Purely periodic points (empty history) can be
/// shifted both ways forever; points with a finite recorded history refuse to
/// step back past its start.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymbolicPoint {
    history: Arc<Vec<u8>>,
    cycle: Arc<Vec<u8>>,
    pos: i64,
}

impl SymbolicPoint {
    /// Purely periodic point reading `cycle` forever, currently at phase 0.
    pub fn periodic(cycle: Vec<u8>) -> Result<Self, SkewError> {
        Self::periodic_at(Arc::new(cycle), 0)
    }

    /// Purely periodic point at the given phase of `cycle`.
    pub fn periodic_at(cycle: Arc<Vec<u8>>, phase: usize) -> Result<Self, SkewError> {
        if cycle.is_empty() {
            return Err(SkewError::BadItinerary);
        }
        if let Some(&s) = cycle.iter().find(|&&s| s > 1) {
            return Err(SkewError::InvalidSymbol(s));
        }
        Ok(SymbolicPoint {
            history: Arc::new(Vec::new()),
            pos: (phase % cycle.len()) as i64,
            cycle,
        })
    }

    /// Point that first reads the finite `history` window and then repeats
    /// `cycle`; the current position is the start of the window.
    pub fn with_history(history: Vec<u8>, cycle: Vec<u8>) -> Result<Self, SkewError> {
        if cycle.is_empty() {
            return Err(SkewError::BadItinerary);
        }
        if let Some(&s) = history.iter().chain(cycle.iter()).find(|&&s| s > 1) {
            return Err(SkewError::InvalidSymbol(s));
        }
        Ok(SymbolicPoint {
            history: Arc::new(history),
            cycle: Arc::new(cycle),
            pos: 0,
        })
    }

    /// Symbol at signed offset `off` from the current position.
    pub fn symbol_at(&self, off: i64) -> Result<u8, SkewError> {
        let p = self.pos + off;
        let l = self.cycle.len() as i64;
        if self.history.is_empty() {
            return Ok(self.cycle[p.rem_euclid(l) as usize]);
        }
        if p < 0 {
            return Err(SkewError::WindowExhausted(p));
        }
        let h = self.history.len() as i64;
        if p < h {
            Ok(self.history[p as usize])
        } else {
            Ok(self.cycle[((p - h) % l) as usize])
        }
    }

    /// Symbol read at the current position.
    pub fn current(&self) -> Result<u8, SkewError> {
        self.symbol_at(0)
    }

    fn shifted(&self, by: i64) -> SymbolicPoint {
        SymbolicPoint {
            history: Arc::clone(&self.history),
            cycle: Arc::clone(&self.cycle),
            pos: self.pos + by,
        }
    }

    /// True when the stream has no transient history.
    pub fn is_purely_periodic(&self) -> bool {
        self.history.is_empty()
    }

    /// For purely periodic points: the primitive cycle in its lexicographically
    /// minimal rotation together with the current phase inside it. Returns
    /// `None` for points with history.
    pub fn canonical_cycle(&self) -> Option<(Vec<u8>, usize)> {
        if !self.history.is_empty() {
            return None;
        }
        let n = self.cycle.len();
        let mut prim = n;
        for d in 1..n {
            if n % d == 0 && (0..n).all(|i| self.cycle[i] == self.cycle[(i + d) % n]) {
                prim = d;
                break;
            }
        }
        let word = &self.cycle[..prim];
        let mut best = 0usize;
        for r in 1..prim {
            for i in 0..prim {
                let a = word[(r + i) % prim];
                let b = word[(best + i) % prim];
                if a != b {
                    if a < b {
                        best = r;
                    }
                    break;
                }
            }
        }
        let canonical: Vec<u8> = (0..prim).map(|i| word[(best + i) % prim]).collect();
        let pos_mod = self.pos.rem_euclid(prim as i64) as usize;
        let phase = (pos_mod + prim - best) % prim;
        Some((canonical, phase))
    }
}

/// Which of the two supported phase spaces a point or measure lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseSpaceKind {
    Torus,
    Symbolic,
}

/// Position in the base system.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum BasePoint {
    Torus([f64; 2]),
    Symbolic(SymbolicPoint),
}

/// A point of the skew product: base position plus fiber coordinate in [0, 1).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhasePoint {
    pub base: BasePoint,
    pub t: f64,
}

impl PhasePoint {
    pub fn torus(x: [f64; 2], t: f64) -> Self {
        PhasePoint {
            base: BasePoint::Torus(x),
            t,
        }
    }

    pub fn symbolic(p: SymbolicPoint, t: f64) -> Self {
        PhasePoint {
            base: BasePoint::Symbolic(p),
            t,
        }
    }

    pub fn space_kind(&self) -> PhaseSpaceKind {
        match &self.base {
            BasePoint::Torus(_) => PhaseSpaceKind::Torus,
            BasePoint::Symbolic(_) => PhaseSpaceKind::Symbolic,
        }
    }
}

/// How the fiber amplitude depends on the base point (torus systems).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Modulation {
    /// Same fiber map over every base point.
    Constant,
    /// Amplitude scaled by cos(2*pi*x1); vanishes on the circle x1 = 1/4.
    #[default]
    CosX1,
}

/// Skew product over a hyperbolic toral automorphism.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusSkew {
    base: TorusBase,
    fiber: CircleFiberMap,
    modulation: Modulation,
}

impl TorusSkew {
    /// Enforces the partial hyperbolicity margin: every fiber derivative must
    /// lie strictly between the base contraction and expansion rates, i.e.
    /// `lambda_s < 1 - |a|` and `1 + |a| < lambda_u`.
    pub fn new(
        base: TorusBase,
        fiber: CircleFiberMap,
        modulation: Modulation,
    ) -> Result<Self, SkewError> {
        let (ls, lu) = base.eigen_rates();
        let amp = fiber.a().abs();
        if 1.0 + amp >= lu || 1.0 - amp <= ls {
            return Err(SkewError::NotPartiallyHyperbolic {
                amp,
                need_above: lu,
                need_below: ls,
            });
        }
        Ok(TorusSkew {
            base,
            fiber,
            modulation,
        })
    }

    pub fn base(&self) -> &TorusBase {
        &self.base
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    pub fn fiber_template(&self) -> CircleFiberMap {
        self.fiber
    }

    /// Fiber map attached to the base point `x`.
    pub fn fiber_at(&self, x: [f64; 2]) -> CircleFiberMap {
        match self.modulation {
            Modulation::Constant => self.fiber,
            Modulation::CosX1 => self.fiber.with_amplitude(self.fiber.a() * cos2pi(x[0])),
        }
    }

    /// Partial derivative of the fiber image with respect to x1 at `(x, t)`;
    /// zero for constant modulation.
    pub fn fiber_dx1(&self, x: [f64; 2], t: f64) -> f64 {
        match self.modulation {
            Modulation::Constant => 0.0,
            Modulation::CosX1 => {
                -self.fiber.a() * crate::numeric::sin2pi(x[0]) * crate::numeric::sin2pi(t)
            }
        }
    }
}

/// Skew product over a subshift: one fiber map per symbol, applied according
/// to the symbol currently read.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymbolicSkew {
    base: ShiftBase,
    maps: [CircleFiberMap; 2],
    /// Proxy contraction rate of the strong-stable direction used by cone
    /// checks; must stay below every fiber derivative.
    ss_rate: f64,
    /// Proxy expansion rate of the strong-unstable direction; must dominate
    /// every fiber derivative.
    uu_rate: f64,
}

/// Default strong-stable proxy rate for symbolic systems.
pub(crate) const DEFAULT_SS_RATE: f64 = 0.125;
/// Default strong-unstable proxy rate for symbolic systems.
pub(crate) const DEFAULT_UU_RATE: f64 = 2.5;

impl SymbolicSkew {
    pub fn new(base: ShiftBase, maps: [CircleFiberMap; 2]) -> Result<Self, SkewError> {
        Self::with_proxy_rates(base, maps, DEFAULT_SS_RATE, DEFAULT_UU_RATE)
    }

    /// The proxy rates stand in for the missing geometric strong bundles of a
    /// symbolic model; domination requires them to bracket all fiber rates.
    pub fn with_proxy_rates(
        base: ShiftBase,
        maps: [CircleFiberMap; 2],
        ss_rate: f64,
        uu_rate: f64,
    ) -> Result<Self, SkewError> {
        let min_deriv = maps.iter().map(|f| 1.0 - f.a().abs()).fold(f64::MAX, f64::min);
        let max_deriv = maps.iter().map(|f| 1.0 + f.a().abs()).fold(f64::MIN, f64::max);
        if !(ss_rate > 0.0 && ss_rate < min_deriv && uu_rate > max_deriv) {
            return Err(SkewError::BadProxyRates);
        }
        Ok(SymbolicSkew {
            base,
            maps,
            ss_rate,
            uu_rate,
        })
    }

    pub fn base(&self) -> &ShiftBase {
        &self.base
    }

    pub fn map(&self, symbol: u8) -> &CircleFiberMap {
        &self.maps[symbol as usize]
    }

    pub fn maps(&self) -> &[CircleFiberMap; 2] {
        &self.maps
    }

    pub fn proxy_rates(&self) -> (f64, f64) {
        (self.ss_rate, self.uu_rate)
    }
}

/// A skew product system over one of the supported bases.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum SkewProductSystem {
    Torus(TorusSkew),
    Symbolic(SymbolicSkew),
}

impl SkewProductSystem {
    /// Symbol-0 fiber map of the default symbolic system: mild contraction
    /// toward t = 1/2 with a tiny rotation offset that separates its band
    /// fixed point from 1/2.
    pub fn default_symbolic() -> Self {
        let f0 = CircleFiberMap::new(0.8, 1e-6).unwrap();
        let f1 = CircleFiberMap::new(-0.8, 0.0).unwrap();
        SkewProductSystem::Symbolic(SymbolicSkew::new(ShiftBase::full(), [f0, f1]).unwrap())
    }

    /// Default torus system: the standard automorphism driving a fiber of
    /// amplitude 1/2 whose strength is modulated by cos(2*pi*x1). The
    /// amplitude keeps the margin `1 + |a| < lambda_u` and `1 - |a| > lambda_s`.
    pub fn default_torus() -> Self {
        let base = TorusBase::standard();
        let fiber = CircleFiberMap::new(0.5, 0.0).unwrap();
        SkewProductSystem::Torus(TorusSkew::new(base, fiber, Modulation::CosX1).unwrap())
    }

    pub fn as_symbolic(&self) -> Option<&SymbolicSkew> {
        match self {
            SkewProductSystem::Symbolic(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_torus(&self) -> Option<&TorusSkew> {
        match self {
            SkewProductSystem::Torus(s) => Some(s),
            _ => None,
        }
    }

    /// One forward step.
    fn step(&self, p: &PhasePoint) -> Result<PhasePoint, SkewError> {
        match (self, &p.base) {
            (SkewProductSystem::Torus(sys), BasePoint::Torus(x)) => {
                let t = sys.fiber_at(*x).apply(p.t);
                Ok(PhasePoint::torus(sys.base.apply(*x), t))
            }
            (SkewProductSystem::Symbolic(sys), BasePoint::Symbolic(w)) => {
                let s = w.current()?;
                let t = sys.maps[s as usize].apply(p.t);
                Ok(PhasePoint::symbolic(w.shifted(1), t))
            }
            _ => Err(SkewError::MixedSpaces),
        }
    }

    /// One backward step; the fiber map to invert is the one attached to the
    /// preceding base position.
    fn step_back(&self, p: &PhasePoint) -> Result<PhasePoint, SkewError> {
        match (self, &p.base) {
            (SkewProductSystem::Torus(sys), BasePoint::Torus(x)) => {
                let xp = sys.base.apply_inv(*x);
                let t = sys.fiber_at(xp).invert(p.t);
                Ok(PhasePoint::torus(xp, t))
            }
            (SkewProductSystem::Symbolic(sys), BasePoint::Symbolic(w)) => {
                let s = w.symbol_at(-1)?;
                let t = sys.maps[s as usize].invert(p.t);
                Ok(PhasePoint::symbolic(w.shifted(-1), t))
            }
            _ => Err(SkewError::MixedSpaces),
        }
    }

    /// Iterate the skew product `steps` times (backward for negative counts).
    pub fn apply(&self, p: &PhasePoint, steps: i64) -> Result<PhasePoint, SkewError> {
        if steps.abs() > MAX_SKEW_STEPS {
            return Err(SkewError::IterationBudget(steps));
        }
        let mut q = p.clone();
        if steps >= 0 {
            for _ in 0..steps {
                q = self.step(&q)?;
            }
        } else {
            for _ in 0..(-steps) {
                q = self.step_back(&q)?;
            }
        }
        Ok(q)
    }

    /// Log of the center (fiber) derivative at `p`; the one-step Birkhoff
    /// increment of the center exponent.
    pub fn center_log_derivative(&self, p: &PhasePoint) -> Result<f64, SkewError> {
        match (self, &p.base) {
            (SkewProductSystem::Torus(sys), BasePoint::Torus(x)) => {
                Ok(sys.fiber_at(*x).log_deriv(p.t))
            }
            (SkewProductSystem::Symbolic(sys), BasePoint::Symbolic(w)) => {
                let s = w.current()?;
                Ok(sys.maps[s as usize].log_deriv(p.t))
            }
            _ => Err(SkewError::MixedSpaces),
        }
    }

    /// Phase-space distance. On the torus this is the max of the coordinate
    /// circle distances; on the symbolic side two points over comparable
    /// itineraries are compared by their fiber drift alone, which is the
    /// quantity every shadowing statement in this crate controls.
    pub fn phase_dist(&self, p: &PhasePoint, q: &PhasePoint) -> Result<f64, SkewError> {
        match (&p.base, &q.base) {
            (BasePoint::Torus(x), BasePoint::Torus(y)) => {
                let d = circle_dist(x[0], y[0])
                    .max(circle_dist(x[1], y[1]))
                    .max(circle_dist(p.t, q.t));
                Ok(d)
            }
            (BasePoint::Symbolic(_), BasePoint::Symbolic(_)) => Ok(circle_dist(p.t, q.t)),
            _ => Err(SkewError::MixedSpaces),
        }
    }

    /// Contraction and expansion rates of the strong bundles (per step).
    pub fn strong_rates(&self) -> (f64, f64) {
        match self {
            SkewProductSystem::Torus(sys) => sys.base.eigen_rates(),
            SkewProductSystem::Symbolic(sys) => sys.proxy_rates(),
        }
    }
}
