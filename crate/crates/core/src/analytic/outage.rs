//! Link success under Rayleigh fading.
//!
//! With `a = theta / g(z)`, a slot succeeds iff `h > a I`. Averaging over the
//! desired-link fading, the interferer fading, ALOHA and finally the PGFL of
//! the PPP reduces every probability to two planar integrals of the
//! exceedance kernel `q(x) = a g(x) / (1 + a g(x))`:
//!
//! * `P(A) = exp(-lambda p J1)`, `J1 = int q`
//! * `P(A_k, A_l) = exp(-lambda (2 p J1 - p^2 J2))`, `J2 = int q^2`
//! * `P(A_k | A_l) / P(A_l) = exp(lambda p^2 J2)`
//!
//! The kernel is bounded by 1, so the singular law is admissible here.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::pathloss::PathLossModel;
use crate::quadrature::{self, QuadratureOptions};

use super::model::{LinkConfig, NetworkConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExceedanceIntegrals {
    /// `int a g / (1 + a g) dx`
    pub first: f64,
    /// `int (a g / (1 + a g))^2 dx`
    pub second: f64,
}

/// Exact exceedance integrals for the `g_eps` family.
///
/// `a g_eps / (1 + a g_eps) = c / (1 + |x|^alpha / s)` with `s = a + eps` and
/// `c = a / s`, so both integrals scale the unit-softening ones by
/// `s^{2/alpha}`. For `eps = 0` this is `a^{2/alpha}` times the csc forms.
pub fn exceedance_integrals(pathloss: &PathLossModel, a: f64) -> Result<ExceedanceIntegrals> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold scale must be positive, got {a}"
        )));
    }
    let alpha = pathloss.alpha();
    let s = a + pathloss.epsilon();
    let c = a / s;
    let area = s.powf(2.0 / alpha);
    Ok(ExceedanceIntegrals {
        first: c * area * PathLossModel::unit_integral(alpha),
        second: c * c * area * PathLossModel::unit_integral_squared(alpha),
    })
}

/// The same integrals by radial quadrature of the kernel.
pub fn exceedance_integrals_by_quadrature(
    pathloss: &PathLossModel,
    a: f64,
    opts: QuadratureOptions,
) -> Result<ExceedanceIntegrals> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold scale must be positive, got {a}"
        )));
    }
    let alpha = pathloss.alpha();
    let eps = pathloss.epsilon();
    let kernel = move |r: f64| a / (a + eps + r.powf(alpha));
    let first = quadrature::integrate_radial(|r| 2.0 * PI * r * kernel(r), opts)?.value;
    let second = quadrature::integrate_radial(|r| 2.0 * PI * r * kernel(r).powi(2), opts)?.value;
    Ok(ExceedanceIntegrals { first, second })
}

fn require_rayleigh(net: &NetworkConfig) -> Result<()> {
    if net.fading.is_rayleigh() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "link-success formulas require Rayleigh fading, got {}",
            net.fading
        )))
    }
}

fn integrals(net: &NetworkConfig, link: &LinkConfig) -> Result<ExceedanceIntegrals> {
    require_rayleigh(net)?;
    exceedance_integrals(&net.pathloss, link.threshold_scale(&net.pathloss))
}

/// `P(A_l)`.
pub fn success_probability(net: &NetworkConfig, link: &LinkConfig) -> Result<f64> {
    let j = integrals(net, link)?;
    Ok((-net.lambda * net.p * j.first).exp())
}

/// `P(A_k, A_l)` for two distinct slots.
pub fn joint_success_probability(net: &NetworkConfig, link: &LinkConfig) -> Result<f64> {
    let j = integrals(net, link)?;
    let p = net.p;
    Ok((-net.lambda * (2.0 * p * j.first - p * p * j.second)).exp())
}

/// `P(A_k | A_l) / P(A_l) = P(A_k, A_l) / P(A_l)^2`.
pub fn conditional_ratio(net: &NetworkConfig, link: &LinkConfig) -> Result<f64> {
    let j = integrals(net, link)?;
    Ok((net.lambda * net.p * net.p * j.second).exp())
}
