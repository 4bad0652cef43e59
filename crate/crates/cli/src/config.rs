//! Experiment configuration documents and command-line overrides.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sgs_core::sgs::LnVxConfig;
use sgs_core::signal::SignalKind;
use sgs_core::{EnsSchedule, Method};

use crate::error::{CliError, Result};

pub const FULL_SCALE_GRAPHS: usize = 100;
pub const FULL_SCALE_EMBEDDINGS: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GraphModel {
    #[serde(rename = "ERM")]
    Erm,
    #[serde(rename = "SBM")]
    Sbm,
}

impl GraphModel {
    pub fn name(self) -> &'static str {
        match self {
            Self::Erm => "ERM",
            Self::Sbm => "SBM",
        }
    }

    pub(crate) fn stream(self) -> u64 {
        match self {
            Self::Erm => 1,
            Self::Sbm => 2,
        }
    }
}

/// One of the four graph/signal combinations compared against the GFT.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TrialClass {
    #[serde(rename = "ERM-Rand")]
    ErmRand,
    #[serde(rename = "ERM-Pulse")]
    ErmPulse,
    #[serde(rename = "SBM-Rand")]
    SbmRand,
    #[serde(rename = "SBM-Pulse")]
    SbmPulse,
}

impl TrialClass {
    pub const ALL: [TrialClass; 4] = [Self::ErmRand, Self::ErmPulse, Self::SbmRand, Self::SbmPulse];

    pub fn name(self) -> &'static str {
        match self {
            Self::ErmRand => "ERM-Rand",
            Self::ErmPulse => "ERM-Pulse",
            Self::SbmRand => "SBM-Rand",
            Self::SbmPulse => "SBM-Pulse",
        }
    }

    pub fn model(self) -> GraphModel {
        match self {
            Self::ErmRand | Self::ErmPulse => GraphModel::Erm,
            Self::SbmRand | Self::SbmPulse => GraphModel::Sbm,
        }
    }

    pub fn signal(self) -> SignalKind {
        match self {
            Self::ErmRand | Self::SbmRand => SignalKind::Random,
            Self::ErmPulse | Self::SbmPulse => SignalKind::Pulse,
        }
    }

    pub fn is_pulse(self) -> bool {
        self.signal() == SignalKind::Pulse
    }

    pub(crate) fn stream(self) -> u64 {
        10 + self as u64
    }
}

impl fmt::Display for TrialClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TrialClass {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('_', "-");
        Self::ALL
            .into_iter()
            .find(|c| c.name().to_ascii_uppercase() == key)
            .ok_or_else(|| CliError::Config(format!("invalid trial class {s:?}")))
    }
}

/// Tasks 1 and 2: SGS methods against the GFT and against each other.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareConfig {
    pub seed: u64,
    pub nodes: usize,
    pub erm_p: f64,
    pub classes: Vec<TrialClass>,
    /// Graphs per class. Rand and Pulse classes of one model share graphs.
    pub trials: usize,
    pub k_max: Option<usize>,
    pub methods: Vec<Method>,
    pub ens: EnsSchedule,
    pub ln_vx: LnVxConfig,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            seed: 11,
            nodes: 50,
            erm_p: 0.1,
            classes: TrialClass::ALL.to_vec(),
            trials: 20,
            k_max: None,
            methods: Method::ALL.to_vec(),
            ens: EnsSchedule::default(),
            ln_vx: LnVxConfig::default(),
        }
    }
}

/// Task 3: regularized low-pass filtering on the Caveman variant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LowPassConfig {
    pub seed: u64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub w_eps_grid: Vec<f64>,
    pub clusters: usize,
    pub k_max: Option<usize>,
    pub methods: Vec<Method>,
    pub ens: EnsSchedule,
    pub ln_vx: LnVxConfig,
}

impl Default for LowPassConfig {
    fn default() -> Self {
        Self {
            seed: 3,
            epochs: 3500,
            learning_rate: sgs_core::embed::TrainConfig::default().learning_rate,
            w_eps_grid: (0..=10).map(|i| i as f64 / 10.0).collect(),
            clusters: 4,
            k_max: None,
            methods: Method::ALL.to_vec(),
            ens: EnsSchedule::task3(),
            ln_vx: LnVxConfig {
                trials: 20,
                ..LnVxConfig::default()
            },
        }
    }
}

/// Tasks 4 to 8: diagnostics of over-smoothed embedding learning.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnoseConfig {
    pub seed: u64,
    /// Independent embedding trainings.
    pub trials: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub dim: usize,
    pub clusters: usize,
    /// ARI and AMI both at least this make a good embedding.
    pub good_threshold: f64,
    /// ARI and AMI both at most this make a bad embedding.
    pub bad_threshold: f64,
    /// Snapshot stride for the trajectories differentiated in Task 6.
    pub trajectory_stride: usize,
    pub k_max: Option<usize>,
    pub methods: Vec<Method>,
    pub ens: EnsSchedule,
    pub ln_vx: LnVxConfig,
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        Self {
            seed: 5,
            trials: 200,
            epochs: 1000,
            learning_rate: 0.02,
            dim: 3,
            clusters: 4,
            good_threshold: 0.8,
            bad_threshold: 0.3,
            trajectory_stride: 1,
            k_max: None,
            methods: Method::ALL.to_vec(),
            ens: EnsSchedule::task3(),
            ln_vx: LnVxConfig {
                trials: 20,
                ..LnVxConfig::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum ExperimentConfig {
    Task1(CompareConfig),
    Task2(CompareConfig),
    Task3(LowPassConfig),
    Diagnose(DiagnoseConfig),
}

impl ExperimentConfig {
    pub fn task_name(&self) -> &'static str {
        match self {
            Self::Task1(_) => "task1",
            Self::Task2(_) => "task2",
            Self::Task3(_) => "task3",
            Self::Diagnose(_) => "diagnose",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Self::Task1(c) | Self::Task2(c) => c.seed,
            Self::Task3(c) => c.seed,
            Self::Diagnose(c) => c.seed,
        }
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str| if ok { Ok(()) } else { Err(CliError::Config(what.to_string())) };
        match self {
            Self::Task1(c) | Self::Task2(c) => {
                check(c.trials >= 1, "trials must be at least 1")?;
                check(c.nodes >= 10, "nodes must be at least 10")?;
                check(c.erm_p > 0.0 && c.erm_p < 1.0, "erm_p must lie in (0, 1)")?;
                check(!c.classes.is_empty(), "no trial classes")?;
                check(!c.methods.is_empty(), "no methods")?;
                check(c.ln_vx.trials >= 1, "ln_vx.trials must be at least 1")?;
            }
            Self::Task3(c) => {
                check(c.epochs >= 1, "epochs must be at least 1")?;
                check(c.learning_rate > 0.0, "learning_rate must be positive")?;
                check(!c.w_eps_grid.is_empty(), "empty w_eps grid")?;
                check(c.w_eps_grid.iter().all(|w| *w >= 0.0 && w.is_finite()), "w_eps values must be non-negative")?;
                check((1..=13).contains(&c.clusters), "clusters must lie in 1..=13")?;
                check(c.methods.contains(&Method::Ens), "Task 3 analyses ENS; include it in methods")?;
                check(c.ln_vx.trials >= 1, "ln_vx.trials must be at least 1")?;
            }
            Self::Diagnose(c) => {
                check(c.trials >= 2, "trials must be at least 2")?;
                check(c.epochs >= 1, "epochs must be at least 1")?;
                check(c.learning_rate > 0.0, "learning_rate must be positive")?;
                check(c.dim >= 1, "dim must be at least 1")?;
                check((1..=13).contains(&c.clusters), "clusters must lie in 1..=13")?;
                check(c.bad_threshold < c.good_threshold, "bad_threshold must be below good_threshold")?;
                check(c.trajectory_stride >= 1, "trajectory_stride must be at least 1")?;
                check(c.methods.contains(&Method::Ens), "diagnostics analyse ENS; include it in methods")?;
                check(c.ln_vx.trials >= 1, "ln_vx.trials must be at least 1")?;
            }
        }
        Ok(())
    }
}

/// Values supplied on the command line; each replaces the config field.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub k_max: Option<usize>,
    pub methods: Option<Vec<Method>>,
    pub ens: Option<EnsSchedule>,
    pub ln_vx_trials: Option<usize>,
    pub full_scale: bool,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        macro_rules! common {
            ($c:expr) => {{
                if let Some(s) = self.seed {
                    $c.seed = s;
                }
                if let Some(k) = self.k_max {
                    $c.k_max = Some(k);
                }
                if let Some(m) = &self.methods {
                    $c.methods = m.clone();
                }
                if let Some(e) = &self.ens {
                    $c.ens = e.clone();
                }
                if let Some(t) = self.ln_vx_trials {
                    $c.ln_vx.trials = t;
                }
            }};
        }
        match cfg {
            ExperimentConfig::Task1(c) | ExperimentConfig::Task2(c) => {
                common!(c);
                if self.full_scale {
                    c.trials = FULL_SCALE_GRAPHS;
                }
                if let Some(t) = self.trials {
                    c.trials = t;
                }
            }
            ExperimentConfig::Task3(c) => {
                common!(c);
                if self.trials.is_some() {
                    return Err(CliError::Config(
                        "task3 runs one fixed sweep; use --ln-vx-trials for LN-VX learning trials".into(),
                    ));
                }
            }
            ExperimentConfig::Diagnose(c) => {
                common!(c);
                if self.full_scale {
                    c.trials = FULL_SCALE_EMBEDDINGS;
                }
                if let Some(t) = self.trials {
                    c.trials = t;
                }
            }
        }
        Ok(())
    }
}

pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    let methods = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.parse::<Method>().map_err(CliError::from))
        .collect::<Result<Vec<_>>>()?;
    if methods.is_empty() {
        return Err(CliError::Config("empty method list".into()));
    }
    Ok(methods)
}
