//! Experiment configuration: TOML in, validated knobs out.
//!
//! Every field has a default, so an empty document is a valid config and the
//! CLI can run every experiment without a file. Unknown keys are rejected:
//! a typo in a tolerance name must not silently run with the default.

use super::ExperimentError;
use crate::model::{
    CircleFiberMap, Modulation, ShiftBase, SkewProductSystem, SymbolicSkew, TorusBase, TorusSkew,
};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

/// Which driver a config is for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Convex,
    Nonhyp,
    Gap,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::Convex => "convex",
            ExperimentKind::Nonhyp => "nonhyp",
            ExperimentKind::Gap => "gap",
        })
    }
}

/// System selector. The symbolic system is the full 2-shift driving two
/// sinusoidal circle maps; the torus system is the standard automorphism
/// driving one modulated circle map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SystemSpec {
    Symbolic {
        #[serde(default = "default_a0")]
        a0: f64,
        #[serde(default = "default_c0")]
        c0: f64,
        #[serde(default = "default_a1")]
        a1: f64,
        #[serde(default)]
        c1: f64,
    },
    Torus {
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
}

fn default_a0() -> f64 {
    0.8
}
fn default_c0() -> f64 {
    1e-6
}
fn default_a1() -> f64 {
    -0.8
}
fn default_amplitude() -> f64 {
    0.5
}

impl Default for SystemSpec {
    fn default() -> Self {
        SystemSpec::Symbolic {
            a0: default_a0(),
            c0: default_c0(),
            a1: default_a1(),
            c1: 0.0,
        }
    }
}

impl SystemSpec {
    pub fn build(&self) -> Result<SkewProductSystem, ExperimentError> {
        match *self {
            SystemSpec::Symbolic { a0, c0, a1, c1 } => {
                let f0 = CircleFiberMap::new(a0, c0)
                    .map_err(|e| ExperimentError::Config(format!("fiber map 0: {e}")))?;
                let f1 = CircleFiberMap::new(a1, c1)
                    .map_err(|e| ExperimentError::Config(format!("fiber map 1: {e}")))?;
                let skew = SymbolicSkew::new(ShiftBase::full(), [f0, f1])
                    .map_err(|e| ExperimentError::Config(format!("symbolic system: {e}")))?;
                Ok(SkewProductSystem::Symbolic(skew))
            }
            SystemSpec::Torus { amplitude } => {
                let fiber = CircleFiberMap::new(amplitude, 0.0)
                    .map_err(|e| ExperimentError::Config(format!("torus fiber: {e}")))?;
                let skew = TorusSkew::new(TorusBase::standard(), fiber, Modulation::CosX1)
                    .map_err(|e| ExperimentError::Config(format!("torus system: {e}")))?;
                Ok(SkewProductSystem::Torus(skew))
            }
        }
    }

    /// One-line description used in output headers.
    pub fn label(&self) -> String {
        match *self {
            SystemSpec::Symbolic { a0, c0, a1, c1 } => {
                format!("symbolic full-2-shift a0={a0:e} c0={c0:e} a1={a1:e} c1={c1:e}")
            }
            SystemSpec::Torus { amplitude } => {
                format!("torus [[2,1],[1,1]] amplitude={amplitude:e} cos-x1 modulation")
            }
        }
    }
}

/// Mixture-weight grid shared by the drivers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub alphas: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            alphas: (0..=10).map(|k| k as f64 / 10.0).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceSpec {
    /// Row gate on the truncated distance to the target mixture.
    pub eps_target: f64,
    /// Row gate on |achieved exponent - mixture exponent|.
    pub exponent_tol: f64,
    /// Band around zero that counts as a neutral center exponent.
    pub tol_hyp: f64,
    /// Truncation depth of recorded weak-star distances.
    pub metric_depth: usize,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        ToleranceSpec {
            eps_target: 0.05,
            exponent_tol: 0.02,
            tol_hyp: 0.02,
            metric_depth: 20,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetSpec {
    /// Longest orbit period a driver may realize.
    pub max_period: usize,
    /// Max descending steps when hunting a near-neutral target.
    pub max_iterations: usize,
    /// Steps in one convex mixture cell.
    pub cell_steps: usize,
}

impl Default for BudgetSpec {
    fn default() -> Self {
        BudgetSpec {
            max_period: 4096,
            max_iterations: 6,
            cell_steps: 20,
        }
    }
}

/// Decreasing tolerance schedule for the approximation experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleSpec {
    pub eps0: f64,
    pub factor: f64,
    pub steps: usize,
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        ScheduleSpec {
            eps0: 0.10,
            factor: 0.65,
            steps: 3,
        }
    }
}

/// Knobs of the descending-sequence construction used for target building.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GiknSpec {
    /// Seed orbit word over {0, 1}.
    pub seed_word: String,
    pub eps0: f64,
    pub factor: f64,
    pub rho: f64,
    pub zeta: f64,
}

impl Default for GiknSpec {
    fn default() -> Self {
        GiknSpec {
            seed_word: "1111100".to_string(),
            eps0: 0.06,
            factor: 0.7,
            rho: 6.0,
            zeta: 0.5,
        }
    }
}

/// Knobs of the interleaving construction behind the gap experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GapSpec {
    /// Junk-step multiplier: orbits carry about rho0 * q_steps * |lambda_q|
    /// extra contracting steps modeling the transition debt.
    pub rho0: f64,
    /// Expanding cell word.
    pub cell: String,
    /// Contracting anchor words, expected to span a decade of exponents.
    pub anchors: Vec<String>,
    /// Minimum total anchor steps per row.
    pub q_target: usize,
}

impl Default for GapSpec {
    fn default() -> Self {
        GapSpec {
            rho0: 1.3,
            cell: "111111100".to_string(),
            anchors: vec![
                "111111111111100000".to_string(),
                "1111100".to_string(),
                "1111111110000".to_string(),
            ],
            q_target: 120,
        }
    }
}

/// Full experiment configuration. Deserializes from TOML; every field has a
/// default so a partial or empty document is valid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Optional driver pin; when present it must match the driver invoked.
    pub experiment: Option<ExperimentKind>,
    /// Recorded in every output header; no driver consumes randomness.
    pub seed: u64,
    pub system: SystemSpec,
    pub grid: GridSpec,
    pub tolerances: ToleranceSpec,
    pub budgets: BudgetSpec,
    pub schedule: ScheduleSpec,
    pub gikn: GiknSpec,
    pub gap: GapSpec,
}

impl ExperimentConfig {
    /// Defaults with the driver pinned.
    pub fn default_for(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment: Some(kind),
            ..ExperimentConfig::default()
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ExperimentError> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn build_system(&self) -> Result<SkewProductSystem, ExperimentError> {
        self.system.build()
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |msg: String| Err(ExperimentError::Config(msg));
        if self.grid.alphas.is_empty() {
            return bad("grid.alphas must be non-empty".into());
        }
        for &a in &self.grid.alphas {
            if !a.is_finite() || !(0.0..=1.0).contains(&a) {
                return bad(format!("grid.alphas entry {a} outside [0, 1]"));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.eps_target", t.eps_target),
            ("tolerances.exponent_tol", t.exponent_tol),
            ("tolerances.tol_hyp", t.tol_hyp),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if t.metric_depth == 0 {
            return bad("tolerances.metric_depth must be at least 1".into());
        }
        let b = &self.budgets;
        if b.max_period == 0 || b.max_iterations == 0 || b.cell_steps == 0 {
            return bad("budgets must be at least 1".into());
        }
        for (name, eps0, factor) in [
            ("schedule", self.schedule.eps0, self.schedule.factor),
            ("gikn", self.gikn.eps0, self.gikn.factor),
        ] {
            if !eps0.is_finite() || eps0 <= 0.0 {
                return bad(format!("{name}.eps0 must be positive, got {eps0}"));
            }
            if !factor.is_finite() || !(0.0 < factor && factor < 1.0) {
                return bad(format!("{name}.factor must lie in (0, 1), got {factor}"));
            }
        }
        if self.schedule.steps == 0 {
            return bad("schedule.steps must be at least 1".into());
        }
        if !self.gikn.rho.is_finite() || self.gikn.rho <= 0.0 {
            return bad(format!("gikn.rho must be positive, got {}", self.gikn.rho));
        }
        if !(0.0 < self.gikn.zeta && self.gikn.zeta < 1.0) {
            return bad(format!("gikn.zeta must lie in (0, 1), got {}", self.gikn.zeta));
        }
        parse_word(&self.gikn.seed_word).map_err(|e| prefix("gikn.seed_word", e))?;
        if !self.gap.rho0.is_finite() || self.gap.rho0 <= 0.0 {
            return bad(format!("gap.rho0 must be positive, got {}", self.gap.rho0));
        }
        parse_word(&self.gap.cell).map_err(|e| prefix("gap.cell", e))?;
        if self.gap.anchors.is_empty() {
            return bad("gap.anchors must be non-empty".into());
        }
        for w in &self.gap.anchors {
            parse_word(w).map_err(|e| prefix("gap.anchors", e))?;
        }
        if self.gap.q_target == 0 {
            return bad("gap.q_target must be at least 1".into());
        }
        Ok(())
    }
}

fn prefix(field: &str, e: ExperimentError) -> ExperimentError {
    ExperimentError::Config(format!("{field}: {e}"))
}

/// Parses a word over {0, 1} from its character form.
pub(crate) fn parse_word(s: &str) -> Result<Vec<u8>, ExperimentError> {
    if s.is_empty() {
        return Err(ExperimentError::Config("empty word".into()));
    }
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(ExperimentError::Config(format!(
                "word character {other:?} is not 0 or 1"
            ))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_default_config() {
        let cfg = ExperimentConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.grid.alphas.len(), 11);
        assert_eq!(cfg.grid.alphas[0], 0.0);
        assert_eq!(cfg.grid.alphas[10], 1.0);
    }

    #[test]
    fn toml_roundtrip_preserves_the_config() {
        let mut cfg = ExperimentConfig::default_for(ExperimentKind::Gap);
        cfg.seed = 7;
        cfg.grid.alphas = vec![0.25, 0.75];
        let text = cfg.to_toml_string();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        let err = ExperimentConfig::from_toml_str("epsilon_target = 0.1").unwrap_err();
        assert!(err.is_config());
        let err = ExperimentConfig::from_toml_str("[tolerances]\neps = 0.1").unwrap_err();
        assert!(err.is_config());
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        for text in [
            "[grid]\nalphas = [0.5, 1.5]",
            "[grid]\nalphas = []",
            "[tolerances]\neps_target = 0.0",
            "[tolerances]\nmetric_depth = 0",
            "[schedule]\nfactor = 1.0",
            "[gikn]\nzeta = 0.0",
            "[gikn]\nseed_word = \"11a\"",
            "[gap]\nanchors = []",
            "[gap]\ncell = \"\"",
        ] {
            let err = ExperimentConfig::from_toml_str(text).unwrap_err();
            assert!(err.is_config(), "expected config error for {text:?}");
        }
    }

    #[test]
    fn default_systems_build() {
        let cfg = ExperimentConfig::default();
        let sys = cfg.build_system().unwrap();
        assert!(sys.as_symbolic().is_some());
        let torus = ExperimentConfig::from_toml_str("[system]\nkind = \"torus\"").unwrap();
        assert!(torus.build_system().unwrap().as_torus().is_some());
        assert!(torus.system.label().starts_with("torus"));
    }

    #[test]
    fn bad_system_parameters_are_config_errors() {
        let err = ExperimentConfig::from_toml_str("[system]\nkind = \"symbolic\"\na0 = 1.5")
            .unwrap()
            .build_system()
            .unwrap_err();
        assert!(err.is_config());
        // Amplitude 0.7 breaks the torus domination margin (1.7 > lambda_u is
        // false, but 1 - 0.7 = 0.3 < lambda_s = 0.382).
        let err = ExperimentConfig::from_toml_str("[system]\nkind = \"torus\"\namplitude = 0.7")
            .unwrap()
            .build_system()
            .unwrap_err();
        assert!(err.is_config());
    }

    #[test]
    fn word_parsing() {
        assert_eq!(parse_word("1101").unwrap(), vec![1, 1, 0, 1]);
        assert!(parse_word("").is_err());
        assert!(parse_word("12").is_err());
    }
}
