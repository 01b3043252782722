//! Resolved parameter sets of each command. Every field has a default that
//! reproduces the corresponding figure or the standard validation grid, so
//! all commands run without arguments. A JSON config file may set any
//! subset of fields; a run manifest is accepted as well and its
//! `parameters` object is used.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analytic::FadingModel;
use crate::montecarlo::CorrelationError;

use super::CliError;

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// `0, step, 2 step, ..., last` computed as `i / denom` to avoid drift.
fn grid(count: usize, denom: f64) -> Vec<f64> {
    (0..count).map(|i| i as f64 / denom).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig1Params {
    pub alpha: f64,
    pub lambda: f64,
    pub p: f64,
    pub fading: FadingModel,
    pub epsilons: Vec<f64>,
    pub separations: Vec<f64>,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for Fig1Params {
    fn default() -> Self {
        Fig1Params {
            alpha: 4.0,
            lambda: 1.0,
            p: 1.0,
            fading: FadingModel::None,
            epsilons: vec![1.0, 0.1, 0.01],
            separations: grid(31, 10.0),
            seed: 0,
            out: PathBuf::from("fig1.csv"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig2Params {
    pub alpha: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub theta: f64,
    pub link_distance: f64,
    pub p_grid: Vec<f64>,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for Fig2Params {
    fn default() -> Self {
        Fig2Params {
            alpha: 4.0,
            epsilon: 0.0,
            lambda: 1.0,
            theta: 1.0,
            link_distance: 0.5,
            p_grid: grid(21, 20.0),
            seed: 0,
            out: PathBuf::from("fig2.csv"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MomentsParams {
    pub lambda: f64,
    pub p: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub fading: FadingModel,
    pub replications: usize,
    pub truncation_tolerance: f64,
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
}

impl Default for MomentsParams {
    fn default() -> Self {
        MomentsParams {
            lambda: 1.0,
            p: 0.5,
            alpha: 4.0,
            epsilon: 1.0,
            fading: FadingModel::Rayleigh,
            replications: 20_000,
            truncation_tolerance: crate::montecarlo::DEFAULT_TRUNCATION_TOLERANCE,
            seed: 1,
            workers: default_workers(),
            out: PathBuf::from("moments.csv"),
        }
    }
}

/// One cell of the validation grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ValidationCell {
    /// Mean, variance and temporal correlation at one location.
    Moments {
        lambda: f64,
        p: f64,
        alpha: f64,
        epsilon: f64,
        fading: FadingModel,
    },
    /// Correlation of two locations `separation` apart in distinct slots.
    Correlation {
        lambda: f64,
        p: f64,
        alpha: f64,
        epsilon: f64,
        fading: FadingModel,
        separation: f64,
    },
    /// Rayleigh link success, joint success and their ratio.
    Outage {
        lambda: f64,
        p: f64,
        alpha: f64,
        epsilon: f64,
        link_distance: f64,
        theta: f64,
    },
}

pub fn default_grid() -> Vec<ValidationCell> {
    vec![
        ValidationCell::Moments {
            lambda: 1.0,
            p: 0.5,
            alpha: 4.0,
            epsilon: 1.0,
            fading: FadingModel::Rayleigh,
        },
        ValidationCell::Moments {
            lambda: 1.0,
            p: 0.7,
            alpha: 4.0,
            epsilon: 1.0,
            fading: FadingModel::None,
        },
        ValidationCell::Moments {
            lambda: 2.0,
            p: 0.3,
            alpha: 5.0,
            epsilon: 0.5,
            fading: FadingModel::Nakagami(2.0),
        },
        ValidationCell::Correlation {
            lambda: 1.0,
            p: 1.0,
            alpha: 4.0,
            epsilon: 1.0,
            fading: FadingModel::Rayleigh,
            separation: 1.0,
        },
        ValidationCell::Outage {
            lambda: 1.0,
            p: 0.5,
            alpha: 4.0,
            epsilon: 0.0,
            link_distance: 0.5,
            theta: 1.0,
        },
        ValidationCell::Outage {
            lambda: 1.0,
            p: 0.3,
            alpha: 4.0,
            epsilon: 0.1,
            link_distance: 0.5,
            theta: 2.0,
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateParams {
    pub grid: Vec<ValidationCell>,
    pub replications: usize,
    pub truncation_tolerance: f64,
    pub correlation_error: CorrelationError,
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
}

impl Default for ValidateParams {
    fn default() -> Self {
        ValidateParams {
            grid: default_grid(),
            replications: 20_000,
            truncation_tolerance: crate::montecarlo::DEFAULT_TRUNCATION_TOLERANCE,
            correlation_error: CorrelationError::Fisher,
            seed: 1,
            workers: default_workers(),
            out: PathBuf::from("validate.csv"),
        }
    }
}

/// Built-in defaults, overlaid by the config file when one is given.
pub fn load<P: DeserializeOwned + Default>(config: Option<&Path>) -> Result<P, CliError> {
    let Some(path) = config else {
        return Ok(P::default());
    };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: invalid JSON: {e}", path.display())))?;
    let value = match value.get("parameters") {
        Some(inner) if value.get("command").is_some() => inner.clone(),
        _ => value,
    };
    serde_json::from_value(value)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
