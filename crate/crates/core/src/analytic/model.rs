use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pathloss::PathLossModel;

/// Unit-mean power fading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FadingModel {
    /// Nakagami-m power fading, Gamma(shape m, mean 1); `m >= 0.5`.
    Nakagami(f64),
    /// Unit-mean exponential power, identical in law to `Nakagami(1)`.
    Rayleigh,
    /// Deterministic unit gain, the `m -> infinity` limit.
    None,
}

impl FadingModel {
    pub fn nakagami(m: f64) -> Result<Self> {
        let f = FadingModel::Nakagami(m);
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FadingModel::Nakagami(m) if !(m.is_finite() && m >= 0.5) => Err(
                Error::InvalidParameter(format!("Nakagami parameter must be finite and >= 0.5, got {m}")),
            ),
            _ => Ok(()),
        }
    }

    /// Nakagami shape parameter; `None` for the no-fading limit.
    pub fn shape(&self) -> Option<f64> {
        match *self {
            FadingModel::Nakagami(m) => Some(m),
            FadingModel::Rayleigh => Some(1.0),
            FadingModel::None => None,
        }
    }

    pub fn mean(&self) -> f64 {
        1.0
    }

    /// `E[h^2]`: `(m + 1) / m` for Nakagami-m.
    pub fn second_moment(&self) -> f64 {
        match self.shape() {
            Some(m) => (m + 1.0) / m,
            None => 1.0,
        }
    }

    pub fn is_rayleigh(&self) -> bool {
        self.shape() == Some(1.0)
    }
}

impl fmt::Display for FadingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FadingModel::Nakagami(m) => write!(f, "nakagami:{m}"),
            FadingModel::Rayleigh => f.write_str("rayleigh"),
            FadingModel::None => f.write_str("none"),
        }
    }
}

impl FromStr for FadingModel {
    type Err = Error;

    /// Accepts `none`, `rayleigh` and `nakagami:<m>`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "none" => Ok(FadingModel::None),
            "rayleigh" => Ok(FadingModel::Rayleigh),
            other => {
                let m = other
                    .strip_prefix("nakagami:")
                    .or_else(|| other.strip_prefix("nakagami="))
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "unknown fading model '{s}' (expected none, rayleigh or nakagami:<m>)"
                        ))
                    })?;
                let m: f64 = m.parse().map_err(|_| {
                    Error::InvalidParameter(format!("invalid Nakagami parameter in '{s}'"))
                })?;
                FadingModel::nakagami(m)
            }
        }
    }
}

/// Density, ALOHA probability, path loss and fading of the network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetworkConfig {
    pub lambda: f64,
    pub p: f64,
    pub pathloss: PathLossModel,
    pub fading: FadingModel,
}

impl NetworkConfig {
    pub fn new(lambda: f64, p: f64, pathloss: PathLossModel, fading: FadingModel) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "density must be positive and finite, got {lambda}"
            )));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "ALOHA transmit probability must lie in [0, 1], got {p}"
            )));
        }
        fading.validate()?;
        Ok(NetworkConfig {
            lambda,
            p,
            pathloss,
            fading,
        })
    }

    /// Density of the transmitting set in any one slot.
    pub fn active_density(&self) -> f64 {
        self.p * self.lambda
    }
}

/// The desired link: transmitter at the origin, receiver at distance
/// `link_distance`, success when the SIR exceeds `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkConfig {
    pub link_distance: f64,
    pub theta: f64,
}

impl LinkConfig {
    pub fn new(link_distance: f64, theta: f64) -> Result<Self> {
        if !(link_distance.is_finite() && link_distance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "link distance must be positive, got {link_distance}"
            )));
        }
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "SIR threshold must be positive, got {theta}"
            )));
        }
        Ok(LinkConfig {
            link_distance,
            theta,
        })
    }

    /// `a = theta / g(z)`: the link succeeds iff `h > a * I`.
    pub fn threshold_scale(&self, pathloss: &PathLossModel) -> f64 {
        self.theta / pathloss.gain(self.link_distance)
    }
}
