//! Interference and link-outage correlation in slotted-ALOHA Poisson
//! networks.
//!
//! [`analytic`] evaluates the first and second interference moments, the
//! spatio-temporal correlation coefficient and the Rayleigh link-success
//! probabilities; [`montecarlo`] simulates the same network so that every
//! analytic quantity can be checked against an estimate with a standard
//! error. [`cli`] wires both into the `aloha-corr` command.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod montecarlo;
pub mod pathloss;
pub mod quadrature;
pub mod stochastic;

pub use error::{Error, Result};
