//! Closed-form and quadrature evaluation of the interference moments, the
//! spatio-temporal correlation coefficient and the Rayleigh link-success
//! probabilities.
//!
//! Correlations are always between two distinct slots `k != l`; within one
//! slot the interference at one location is perfectly correlated with
//! itself and nothing is computed for that case.

mod model;
mod outage;

pub use model::{FadingModel, LinkConfig, NetworkConfig};
pub use outage::{
    conditional_ratio, exceedance_integrals, exceedance_integrals_by_quadrature,
    joint_success_probability, success_probability,
    ExceedanceIntegrals,
};

use crate::error::{Error, Result};
use crate::pathloss::PathLossModel;

/// `E[I] = p * lambda * int g`.
pub fn mean_interference(cfg: &NetworkConfig) -> Result<f64> {
    Ok(cfg.active_density() * cfg.pathloss.integral_g()?)
}

/// `E[I^2] = p lambda E[h^2] int g^2 + (p lambda int g)^2`.
pub fn second_moment(cfg: &NetworkConfig) -> Result<f64> {
    let mean = mean_interference(cfg)?;
    Ok(interference_variance(cfg)? + mean * mean)
}

pub fn interference_variance(cfg: &NetworkConfig) -> Result<f64> {
    Ok(cfg.active_density() * cfg.fading.second_moment() * cfg.pathloss.integral_g_squared()?)
}

/// Variance in its explicit form for Nakagami-m fading,
/// `2 pi^2 (alpha - 2) p lambda / (eps^{2 - 2/alpha} alpha^2 sin(2 pi/alpha)) * (m + 1)/m`.
///
/// Kept separate from [`interference_variance`] as an independent route.
pub fn nakagami_variance_closed_form(cfg: &NetworkConfig) -> Result<f64> {
    let pl = &cfg.pathloss;
    if pl.is_singular() {
        return Err(Error::Divergence(
            "interference variance under singular path loss".into(),
        ));
    }
    let alpha = pl.alpha();
    let fading_factor = match cfg.fading.shape() {
        Some(m) => (m + 1.0) / m,
        None => 1.0,
    };
    let pi2 = std::f64::consts::PI.powi(2);
    Ok(2.0 * pi2 * (alpha - 2.0) * cfg.p * cfg.lambda
        / (pl.epsilon().powf(2.0 - 2.0 / alpha)
            * alpha
            * alpha
            * (2.0 * std::f64::consts::PI / alpha).sin())
        * fading_factor)
}

/// `E[I_k(u) I_l(v)]` for `k != l` and `|u - v| = separation`:
/// `p^2 lambda int g(x) g(x - d) dx + (p lambda int g)^2`.
pub fn cross_moment(cfg: &NetworkConfig, separation: f64) -> Result<f64> {
    let mean = mean_interference(cfg)?;
    let cross = cfg.pathloss.cross_integral(separation)?;
    Ok(cfg.p * cfg.p * cfg.lambda * cross + mean * mean)
}

/// Correlation coefficient of `I_k(u)` and `I_l(v)`, `k != l`:
/// `p int g(x) g(x - d) dx / (E[h^2] int g^2)`.
pub fn spatial_temporal_correlation(cfg: &NetworkConfig, separation: f64) -> Result<f64> {
    let denom = cfg.fading.second_moment() * cfg.pathloss.integral_g_squared()?;
    let cross = cfg.pathloss.cross_integral(separation)?;
    Ok(cfg.p * cross / denom)
}

/// `zeta / p` as plotted against separation; independent of `p` and `lambda`.
pub fn normalized_spatial_correlation(
    pathloss: &PathLossModel,
    fading: &FadingModel,
    separation: f64,
) -> Result<f64> {
    let denom = fading.second_moment() * pathloss.integral_g_squared()?;
    Ok(pathloss.cross_integral(separation)? / denom)
}

/// Temporal correlation at one location, `p / E[h^2]`.
pub fn temporal_correlation(cfg: &NetworkConfig) -> f64 {
    cfg.p / cfg.fading.second_moment()
}

/// Correlation between two distinct locations in the limit of the singular
/// path loss (`epsilon -> 0`), which is zero for every positive separation.
///
/// Zero separation is the temporal coefficient and is rejected here; use
/// [`temporal_correlation`].
pub fn singular_limit_correlation(separation: f64) -> Result<f64> {
    if separation.is_nan() || separation < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "separation must be non-negative, got {separation}"
        )));
    }
    if separation == 0.0 {
        return Err(Error::InvalidParameter(
            "zero separation is the temporal correlation, not a spatial limit".into(),
        ));
    }
    Ok(0.0)
}
