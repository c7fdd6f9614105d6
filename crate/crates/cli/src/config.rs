//! Experiment configuration files.
//!
//! One experiment per file, TOML syntax: flat keys grouped under section
//! headers. Every section is optional.
//!
//! ```toml
//! experiment = "chsh"
//!
//! [state]
//! presets = ["H", "V", "D", "A", "L", "R", "mixed:0.84", "maximally-mixed"]
//!
//! [[state.explicit]]
//! name = "tilted"
//! matrix = "0.8 0  0.1 0.1  0.1 -0.1  0.2 0"
//!
//! [scheme]
//! presets = ["chsh"]
//!
//! [noise]
//! visibility = 0.91
//!
//! [sampling]
//! mean_total = 1e5
//! trials = 10
//! seed = 7
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use qtemporal::inequalities::{preset_chsh_scheme, preset_hardy_scheme, HardyConstraint};
use qtemporal::photonic::{NoiseModel, Polarization, PpbsConfig};
use qtemporal::qcore::{ComplexMatrix, DensityMatrix, Observable, PolarizationState};
use qtemporal::seqmeas::MeasurementScheme;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config")]
    Parse(#[from] toml::de::Error),
    #[error("config names experiment `{found}` but `{expected}` was requested")]
    ExperimentMismatch { expected: Experiment, found: Experiment },
    #[error("unknown state preset `{0}`")]
    UnknownState(String),
    #[error("unknown scheme preset `{0}`")]
    UnknownScheme(String),
    #[error("invalid explicit state `{name}`: {reason}")]
    InvalidMatrix { name: String, reason: String },
    #[error("invalid explicit scheme `{name}`: {reason}")]
    InvalidScheme { name: String, reason: String },
    #[error("invalid value: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Hardy,
    Chsh,
    StateScan,
    HardySpatialMax,
    PpbsCheck,
    ProcessPredict,
    Montecarlo,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Hardy,
        Experiment::Chsh,
        Experiment::StateScan,
        Experiment::HardySpatialMax,
        Experiment::PpbsCheck,
        Experiment::ProcessPredict,
        Experiment::Montecarlo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Hardy => "hardy",
            Experiment::Chsh => "chsh",
            Experiment::StateScan => "state-scan",
            Experiment::HardySpatialMax => "hardy-spatial-max",
            Experiment::PpbsCheck => "ppbs-check",
            Experiment::ProcessPredict => "process-predict",
            Experiment::Montecarlo => "montecarlo",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| ConfigError::Invalid(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Structured,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Structured => "json",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitState {
    pub name: String,
    /// Whitespace-separated real/imaginary pairs, row-major.
    pub matrix: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    pub presets: Option<Vec<String>>,
    #[serde(default)]
    pub explicit: Vec<ExplicitState>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum QuantityKind {
    #[default]
    S,
    H,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitScheme {
    pub name: String,
    pub a0: [f64; 3],
    pub a1: [f64; 3],
    pub b0: [f64; 3],
    pub b1: [f64; 3],
    #[serde(default)]
    pub quantity: QuantityKind,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    pub presets: Option<Vec<String>>,
    #[serde(default)]
    pub explicit: Vec<ExplicitScheme>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub visibility: f64,
    pub depolarization: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            visibility: 1.0,
            depolarization: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingSection {
    /// Mean coincidences per setting pair; count simulation is off when unset.
    pub mean_total: Option<f64>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for SamplingSection {
    fn default() -> Self {
        Self {
            mean_total: None,
            trials: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSection {
    pub restarts: usize,
    pub tolerance: f64,
    /// `paradox` or `unconstrained`.
    pub constraint: String,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        Self {
            restarts: 200,
            tolerance: 1e-8,
            constraint: "paradox".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PpbsSection {
    pub eta_interfering: f64,
    pub eta_pass: f64,
    pub compensation: bool,
    /// `H` or `V`.
    pub interfering: String,
    /// Random two-qubit inputs used to check the success probability.
    pub samples: usize,
}

impl Default for PpbsSection {
    fn default() -> Self {
        Self {
            eta_interfering: 1.0 / 3.0,
            eta_pass: 1.0,
            compensation: true,
            interfering: "V".into(),
            samples: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSection {
    pub samples: usize,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self { samples: 10_000 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessSection {
    /// Target fidelity with the ideal CZ; overrides `noise.depolarization`.
    pub fidelity: Option<f64>,
}

/// Parsed experiment file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    #[serde(default)]
    pub state: StateSection,
    #[serde(default)]
    pub scheme: SchemeSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub sampling: SamplingSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub optimizer: OptimizerSection,
    #[serde(default)]
    pub ppbs: PpbsSection,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(default)]
    pub process: ProcessSection,
}

impl FromStr for ExperimentConfig {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(toml::from_str(s)?)
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        text.parse()
    }

    /// Checks that a config naming an experiment agrees with the requested one.
    pub fn check_experiment(&self, requested: Experiment) -> Result<(), ConfigError> {
        match self.experiment {
            Some(found) if found != requested => Err(ConfigError::ExperimentMismatch {
                expected: requested,
                found,
            }),
            _ => Ok(()),
        }
    }

    pub fn noise_model(&self) -> Result<NoiseModel, ConfigError> {
        NoiseModel::new(self.noise.visibility, self.noise.depolarization)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn ppbs_config(&self) -> Result<PpbsConfig, ConfigError> {
        let interfering = match self.ppbs.interfering.as_str() {
            "H" => Polarization::H,
            "V" => Polarization::V,
            other => {
                return Err(ConfigError::Invalid(format!(
                    "interfering polarization `{other}` (expected H or V)"
                )))
            }
        };
        Ok(PpbsConfig {
            eta_interfering: self.ppbs.eta_interfering,
            eta_pass: self.ppbs.eta_pass,
            compensation: self.ppbs.compensation,
            interfering,
        })
    }

    pub fn mean_total(&self) -> Result<Option<f64>, ConfigError> {
        match self.sampling.mean_total {
            Some(n) if !(n.is_finite() && n > 0.0) => Err(ConfigError::Invalid(format!(
                "sampling.mean_total {n} must be positive"
            ))),
            other => Ok(other),
        }
    }

    pub fn constraint(&self) -> Result<HardyConstraint, ConfigError> {
        match self.optimizer.constraint.as_str() {
            "paradox" => Ok(HardyConstraint::Paradox),
            "unconstrained" => Ok(HardyConstraint::Unconstrained),
            other => Err(ConfigError::Invalid(format!(
                "optimizer constraint `{other}` (expected paradox or unconstrained)"
            ))),
        }
    }

    /// Input states in config order: presets first, then explicit matrices.
    /// Falls back to `defaults` when the section names no state at all.
    pub fn states(&self, defaults: &[PolarizationState]) -> Result<Vec<NamedState>, ConfigError> {
        let mut out = Vec::new();
        let presets: Vec<String> = match &self.state.presets {
            Some(p) => p.clone(),
            None if self.state.explicit.is_empty() => defaults.iter().map(|s| s.name()).collect(),
            None => Vec::new(),
        };
        for name in presets {
            let preset =
                PolarizationState::parse(&name).ok_or_else(|| ConfigError::UnknownState(name.clone()))?;
            let rho = preset
                .density()
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
            out.push(NamedState { name, rho });
        }
        for ex in &self.state.explicit {
            let rho = parse_matrix(&ex.matrix).map_err(|reason| ConfigError::InvalidMatrix {
                name: ex.name.clone(),
                reason,
            })?;
            out.push(NamedState {
                name: ex.name.clone(),
                rho,
            });
        }
        Ok(out)
    }

    pub fn schemes(&self, defaults: &[&str]) -> Result<Vec<NamedScheme>, ConfigError> {
        let mut out = Vec::new();
        let presets: Vec<String> = match &self.scheme.presets {
            Some(p) => p.clone(),
            None if self.scheme.explicit.is_empty() => defaults.iter().map(|s| s.to_string()).collect(),
            None => Vec::new(),
        };
        for name in presets {
            out.push(preset_scheme(&name).ok_or(ConfigError::UnknownScheme(name))?);
        }
        for ex in &self.scheme.explicit {
            let obs = |label: &str, v: [f64; 3]| {
                Observable::new(label, v).map_err(|e| ConfigError::InvalidScheme {
                    name: ex.name.clone(),
                    reason: format!("{label}: {e}"),
                })
            };
            out.push(NamedScheme {
                name: ex.name.clone(),
                scheme: MeasurementScheme::new(
                    obs("A0", ex.a0)?,
                    obs("A1", ex.a1)?,
                    obs("B0", ex.b0)?,
                    obs("B1", ex.b1)?,
                ),
                quantity: ex.quantity,
            });
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct NamedState {
    pub name: String,
    pub rho: DensityMatrix,
}

#[derive(Debug, Clone)]
pub struct NamedScheme {
    pub name: String,
    pub scheme: MeasurementScheme,
    /// Inequality naturally tested with this scheme.
    pub quantity: QuantityKind,
}

pub const SCHEME_PRESETS: [&str; 2] = ["hardy", "chsh"];

pub fn preset_scheme(name: &str) -> Option<NamedScheme> {
    match name {
        "hardy" => Some(NamedScheme {
            name: name.into(),
            scheme: preset_hardy_scheme(),
            quantity: QuantityKind::H,
        }),
        "chsh" => Some(NamedScheme {
            name: name.into(),
            scheme: preset_chsh_scheme(),
            quantity: QuantityKind::S,
        }),
        _ => None,
    }
}

/// Parses `re im re im ...` into a validated 2x2 or 4x4 density matrix.
pub fn parse_matrix(text: &str) -> Result<DensityMatrix, String> {
    let values: Vec<f64> = text
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()?;
    let dim = match values.len() {
        8 => 2,
        32 => 4,
        n => return Err(format!("expected 8 or 32 numbers, got {n}")),
    };
    let data = values
        .chunks(2)
        .map(|c| num_complex::Complex64::new(c[0], c[1]))
        .collect();
    let m = ComplexMatrix::from_vec(dim, data).map_err(|e| e.to_string())?;
    DensityMatrix::new(m).map_err(|e| e.to_string())
}
