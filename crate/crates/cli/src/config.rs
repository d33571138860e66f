// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration files.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use renewal_core::numerics::TimeGrid;
use renewal_core::qops::{c, CMatrix, DensityMatrix, Hamiltonian, KrausChannel, Observable};
use renewal_core::renewal::{WaitingTime, WaitingTimeRegistry};
use renewal_core::response::Drive;
use renewal_core::trajectories::Model;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Schema(String),
}

pub(crate) fn schema(msg: impl fmt::Display) -> ConfigError {
    ConfigError::Schema(msg.to_string())
}

/// Row-major complex matrix, each entry `[re, im]`.
pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[cfg_attr(test, derive(schemars::JsonSchema))]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Name of a registered experiment.
    pub experiment: String,
    pub waiting_time: WaitingTimeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ages: Vec<Age>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationSpec>,
    /// CSV destination; `--out` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[cfg_attr(test, derive(schemars::JsonSchema))]
#[serde(deny_unknown_fields)]
pub struct WaitingTimeSpec {
    /// Registered variant, e.g. `bi-exponential`.
    pub variant: String,
    /// Variant parameters, checked by the variant itself.
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[cfg_attr(test, derive(schemars::JsonSchema))]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub hamiltonian: MatrixSpec,
    pub channel: ChannelSpec,
    pub initial: MatrixSpec,
    /// Measured operator `A`.
    pub observable: MatrixSpec,
    /// Operator `O` applied at the earlier time of a correlation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<MatrixSpec>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[cfg_attr(test, derive(schemars::JsonSchema))]
#[serde(rename_all = "kebab-case")]
pub enum ChannelSpec {
    SigmaZFlip,
    CompleteDephasing,
    Depolarizing,
    Kraus(Vec<MatrixSpec>),
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[cfg_attr(test, derive(schemars::JsonSchema))]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub step: f64,
    pub span: f64,
}

/// Finite age or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[cfg_attr(test, derive(schemars::JsonSchema))]
#[serde(untagged)]
pub enum Age {
    Finite(f64),
    Infinite(Infinity),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[cfg_attr(test, derive(schemars::JsonSchema))]
pub enum Infinity {
    #[serde(rename = "inf")]
    Inf,
}

impl fmt::Display for Age {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Age::Finite(t) => write!(f, "{t}"),
            Age::Infinite(_) => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[cfg_attr(test, derive(schemars::JsonSchema))]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    #[serde(rename = "N")]
    pub realizations: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[cfg_attr(test, derive(schemars::JsonSchema))]
#[serde(rename_all = "lowercase")]
pub enum DriveShape {
    Cos,
    Const,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[cfg_attr(test, derive(schemars::JsonSchema))]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub lambda: f64,
    /// Drive frequency `ω`.
    #[serde(default)]
    pub omega: f64,
    /// Rabi frequency `Ω` of the free flow.
    #[serde(rename = "Omega", default)]
    pub big_omega: f64,
    pub xi: DriveShape,
    /// `S_Z` before the first event.
    #[serde(default)]
    pub initial: f64,
    /// Evaluate the event-time response outside its validated special case.
    #[serde(default)]
    pub experimental: bool,
}

impl PerturbationSpec {
    pub fn drive(&self) -> Drive {
        match self.xi {
            DriveShape::Cos => Drive::Cos { omega: self.omega },
            DriveShape::Const => Drive::Const { value: 1.0 },
        }
    }
}

/// A parsed config together with the raw bytes it came from.
pub struct Loaded {
    pub config: ExperimentConfig,
    pub bytes: Vec<u8>,
}

pub fn load(path: &Path) -> Result<Loaded, ConfigError> {
    let bytes = std::fs::read(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let config = serde_json::from_slice(&bytes).map_err(|e| schema(format!("{}: {e}", path.display())))?;
    Ok(Loaded { config, bytes })
}

/// Validated configuration with the shared pieces already built.
pub struct Setup {
    pub config: ExperimentConfig,
    pub waiting: Arc<dyn WaitingTime>,
    pub grid: TimeGrid,
}

impl Setup {
    pub fn new(config: ExperimentConfig) -> Result<Self, ConfigError> {
        let GridSpec { step, span } = config.grid;
        if !(step.is_finite() && span.is_finite() && step > 0.0 && span >= step) {
            return Err(schema(format!("grid needs 0 < step ≤ span, got step {step}, span {span}")));
        }
        let grid = TimeGrid::with_span(step, span).map_err(schema)?;
        let waiting = WaitingTimeRegistry::with_builtins()
            .build(&config.waiting_time.variant, &config.waiting_time.params)
            .map_err(schema)?;
        for age in &config.ages {
            if let Age::Finite(t) = age {
                if !(t.is_finite() && *t >= 0.0) {
                    return Err(schema(format!("ages must be nonnegative, got {t}")));
                }
                if !on_grid(*t, step) {
                    return Err(schema(format!("age {t} is not a multiple of the grid step {step}")));
                }
            }
        }
        if let Some(e) = config.ensemble {
            if e.realizations == 0 {
                return Err(schema("ensemble.N must be at least 1"));
            }
        }
        if let Some(p) = config.perturbation {
            for (name, v) in [("lambda", p.lambda), ("omega", p.omega), ("Omega", p.big_omega), ("initial", p.initial)] {
                if !v.is_finite() {
                    return Err(schema(format!("perturbation.{name} must be finite")));
                }
            }
        }
        Ok(Self { config, waiting, grid })
    }

    pub fn finite_ages(&self) -> Vec<f64> {
        self.config
            .ages
            .iter()
            .filter_map(|a| match a {
                Age::Finite(t) => Some(*t),
                Age::Infinite(_) => None,
            })
            .collect()
    }

    pub fn model_spec(&self) -> Result<&ModelSpec, ConfigError> {
        self.config.model.as_ref().ok_or_else(|| schema("this experiment needs a `model` section"))
    }

    pub fn ensemble(&self) -> Result<EnsembleSpec, ConfigError> {
        self.config.ensemble.ok_or_else(|| schema("this experiment needs an `ensemble` section"))
    }

    pub fn perturbation(&self) -> Result<PerturbationSpec, ConfigError> {
        self.config
            .perturbation
            .ok_or_else(|| schema("this experiment needs a `perturbation` section"))
    }

    pub fn require_ages(&self) -> Result<(), ConfigError> {
        if self.config.ages.is_empty() {
            Err(schema("this experiment needs a nonempty `ages` list"))
        } else {
            Ok(())
        }
    }

    /// Rejects sections the experiment would silently ignore.
    pub fn reject_unused(&self, sections: &[&str]) -> Result<(), ConfigError> {
        for s in sections {
            let present = match *s {
                "model" => self.config.model.is_some(),
                "ages" => !self.config.ages.is_empty(),
                "ensemble" => self.config.ensemble.is_some(),
                "perturbation" => self.config.perturbation.is_some(),
                _ => false,
            };
            if present {
                return Err(schema(format!(
                    "`{s}` is not used by the {} experiment",
                    self.config.experiment
                )));
            }
        }
        Ok(())
    }
}

fn on_grid(t: f64, step: f64) -> bool {
    let k = (t / step).round();
    (k * step - t).abs() <= 1e-9 * t.max(step)
}

pub fn matrix(spec: &MatrixSpec, what: &str) -> Result<CMatrix, ConfigError> {
    let n = spec.len();
    if n == 0 || spec.iter().any(|row| row.len() != n) {
        return Err(schema(format!("{what} must be a nonempty square matrix")));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        let [re, im] = spec[i][j];
        c(re, im)
    }))
}

/// Model, initial state, measured operator and optional earlier operator.
pub struct BuiltModel {
    pub model: Model,
    pub initial: DensityMatrix,
    pub observable: Observable,
    pub operator: Option<Observable>,
}

impl ModelSpec {
    pub fn build(&self, waiting: Arc<dyn WaitingTime>) -> Result<BuiltModel, ConfigError> {
        let h = Hamiltonian::new(matrix(&self.hamiltonian, "model.hamiltonian")?)
            .map_err(|e| schema(format!("model.hamiltonian: {e}")))?;
        let channel = match &self.channel {
            ChannelSpec::SigmaZFlip => KrausChannel::sigma_z_flip(),
            ChannelSpec::CompleteDephasing => KrausChannel::complete_dephasing(),
            ChannelSpec::Depolarizing => KrausChannel::depolarizing(),
            ChannelSpec::Kraus(ops) => {
                let ops = ops
                    .iter()
                    .map(|m| matrix(m, "model.channel.kraus"))
                    .collect::<Result<Vec<_>, _>>()?;
                KrausChannel::new(ops).map_err(|e| schema(format!("model.channel: {e}")))?
            }
        };
        let model = Model::new(h, channel, waiting).map_err(|e| schema(format!("model: {e}")))?;
        let initial = DensityMatrix::new(matrix(&self.initial, "model.initial")?)
            .map_err(|e| schema(format!("model.initial: {e}")))?;
        let observable = Observable::new(matrix(&self.observable, "model.observable")?)
            .map_err(|e| schema(format!("model.observable: {e}")))?;
        let operator = match &self.operator {
            None => None,
            Some(m) => Some(
                Observable::new(matrix(m, "model.operator")?)
                    .map_err(|e| schema(format!("model.operator: {e}")))?,
            ),
        };
        for (name, d) in [
            ("initial", initial.dim()),
            ("observable", observable.matrix().nrows()),
            ("operator", operator.as_ref().map_or(model.dim(), |o| o.matrix().nrows())),
        ] {
            if d != model.dim() {
                return Err(schema(format!("model.{name} has dimension {d}, expected {}", model.dim())));
            }
        }
        Ok(BuiltModel {
            model,
            initial,
            observable,
            operator,
        })
    }
}
