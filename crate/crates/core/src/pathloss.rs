//! Radial path-loss family `g(x) = 1 / (epsilon + |x|^alpha)` and its
//! planar integrals.
//!
//! `epsilon = 0` is the singular law `|x|^{-alpha}`. It can be evaluated away
//! from the origin, but every moment integral over it diverges at the origin
//! and is reported as [`Error::Divergence`].

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureOptions, QuadratureResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathLossModel {
    alpha: f64,
    epsilon: f64,
}

impl PathLossModel {
    pub fn new(alpha: f64, epsilon: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 2.0) {
            return Err(Error::InvalidParameter(format!(
                "path-loss exponent must exceed 2, got {alpha}"
            )));
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "path-loss softening must be finite and non-negative, got {epsilon}"
            )));
        }
        Ok(PathLossModel { alpha, epsilon })
    }

    /// The unbounded law `|x|^{-alpha}`.
    pub fn singular(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn is_singular(&self) -> bool {
        self.epsilon == 0.0
    }

    pub fn evaluate(&self, distance: f64) -> Result<f64> {
        if !(distance >= 0.0) {
            return Err(Error::Domain(format!(
                "distance must be non-negative, got {distance}"
            )));
        }
        if self.is_singular() && distance == 0.0 {
            return Err(Error::Domain(
                "singular path loss has infinite gain at distance 0".into(),
            ));
        }
        Ok(self.gain(distance))
    }

    /// Unchecked gain for hot loops; infinite at the origin of the singular law.
    #[inline]
    pub(crate) fn gain(&self, distance: f64) -> f64 {
        1.0 / (self.epsilon + distance.powf(self.alpha))
    }

    /// Gain from a squared distance, skipping the square root for even
    /// integer exponents.
    #[inline]
    pub(crate) fn gain_from_squared(&self, distance_sq: f64) -> f64 {
        if self.alpha == 4.0 {
            1.0 / (self.epsilon + distance_sq * distance_sq)
        } else {
            1.0 / (self.epsilon + distance_sq.powf(0.5 * self.alpha))
        }
    }

    fn require_regular(&self, what: &str) -> Result<()> {
        if self.is_singular() {
            Err(Error::Divergence(format!(
                "{what} of the singular path loss diverges at the origin"
            )))
        } else {
            Ok(())
        }
    }

    /// `(2 pi^2 / alpha) csc(2 pi / alpha)`, the planar integral of
    /// `1 / (1 + |x|^alpha)`.
    pub(crate) fn unit_integral(alpha: f64) -> f64 {
        2.0 * PI * PI / alpha / (2.0 * PI / alpha).sin()
    }

    /// `2 pi^2 (alpha - 2) / (alpha^2 sin(2 pi / alpha))`, the planar integral
    /// of `1 / (1 + |x|^alpha)^2`.
    pub(crate) fn unit_integral_squared(alpha: f64) -> f64 {
        2.0 * PI * PI * (alpha - 2.0) / (alpha * alpha * (2.0 * PI / alpha).sin())
    }

    /// Planar integral of `g`.
    pub fn integral_g(&self) -> Result<f64> {
        self.require_regular("the integral of g")?;
        Ok(Self::unit_integral(self.alpha) * self.epsilon.powf(2.0 / self.alpha - 1.0))
    }

    /// Planar integral of `g^2`.
    pub fn integral_g_squared(&self) -> Result<f64> {
        self.require_regular("the integral of g^2")?;
        Ok(Self::unit_integral_squared(self.alpha) * self.epsilon.powf(2.0 / self.alpha - 2.0))
    }

    /// `int g(x) g(x - d e1) dx` over the plane, with default tolerances.
    pub fn cross_integral(&self, separation: f64) -> Result<f64> {
        self.cross_integral_with(separation, QuadratureOptions::default())
            .map(|r| r.value)
    }

    /// Cross integral in polar coordinates centred on one of the two points,
    /// so that the second factor depends on the law of cosines distance.
    pub fn cross_integral_with(
        &self,
        separation: f64,
        opts: QuadratureOptions,
    ) -> Result<QuadratureResult> {
        self.require_regular("the cross integral")?;
        if !(separation.is_finite() && separation >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "separation must be finite and non-negative, got {separation}"
            )));
        }
        let d = separation;
        quadrature::integrate_polar(
            |r, theta| {
                let other_sq = (r * r + d * d - 2.0 * r * d * theta.cos()).max(0.0);
                self.gain(r) * self.gain_from_squared(other_sq) * r
            },
            opts,
        )
    }
}
