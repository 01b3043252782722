//! Reproducible sampling of PPP realizations, ALOHA indicators and fading.
//!
//! Every replication owns a ChaCha8 key derived from
//! `(master_seed, replication_index)` by a SplitMix64 mix; point positions,
//! transmit indicators, interferer fading and desired-link fading each use
//! their own ChaCha stream under that key. Nothing depends on which thread
//! runs a replication.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson};
use serde::Serialize;

use crate::analytic::FadingModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_sq(other).sqrt()
    }

    pub fn centroid(points: &[Point]) -> Point {
        if points.is_empty() {
            return Point::ORIGIN;
        }
        let n = points.len() as f64;
        let (sx, sy) = points
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Point::new(sx / n, sy / n)
    }
}

/// Sub-stream labels within one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Positions = 1,
    Indicators = 2,
    Fading = 3,
    LinkFading = 4,
    Bootstrap = 5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub replication_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, replication_index: u64) -> Self {
        SeedSpec {
            master_seed,
            replication_index,
        }
    }

    pub fn rng(&self, stream: Stream) -> ChaCha8Rng {
        let mut state = splitmix64(self.master_seed ^ 0x6a09_e667_f3bc_c908)
            ^ self.replication_index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream as u64);
        rng
    }
}

/// SplitMix64 finalizer applied to `x + golden gamma`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Disk-shaped simulation window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub center: Point,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub points: Vec<Point>,
    pub window: Window,
}

/// PPP of intensity `lambda` restricted to the window.
pub fn sample_ppp(lambda: f64, window: Window, seed: SeedSpec) -> Result<Realization> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "density must be positive, got {lambda}"
        )));
    }
    if !(window.radius.is_finite() && window.radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "window radius must be positive, got {}",
            window.radius
        )));
    }
    let mut rng = seed.rng(Stream::Positions);
    let mean = lambda * PI * window.radius * window.radius;
    let count = Poisson::new(mean)
        .map_err(|e| Error::InvalidParameter(format!("Poisson mean {mean}: {e}")))?
        .sample(&mut rng) as usize;
    let points = (0..count)
        .map(|_| {
            let r = window.radius * rng.random::<f64>().sqrt();
            let phi = 2.0 * PI * rng.random::<f64>();
            Point::new(window.center.x + r * phi.cos(), window.center.y + r * phi.sin())
        })
        .collect();
    Ok(Realization { points, window })
}

/// Power-fading sampler with unit mean.
#[derive(Debug, Clone, Copy)]
pub enum FadingSampler {
    Gamma(Gamma<f64>),
    Exponential,
    Unit,
}

impl FadingSampler {
    pub fn new(model: &FadingModel) -> Result<Self> {
        model.validate()?;
        Ok(match *model {
            FadingModel::Rayleigh => FadingSampler::Exponential,
            FadingModel::Nakagami(1.0) => FadingSampler::Exponential,
            FadingModel::Nakagami(m) => FadingSampler::Gamma(
                Gamma::new(m, 1.0 / m).map_err(|e| Error::InvalidParameter(e.to_string()))?,
            ),
            FadingModel::None => FadingSampler::Unit,
        })
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, FadingSampler::Unit)
    }
}

impl Distribution<f64> for FadingSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            FadingSampler::Gamma(g) => g.sample(rng),
            FadingSampler::Exponential => Exp1.sample(rng),
            FadingSampler::Unit => 1.0,
        }
    }
}

/// One slot: which points transmit, and the fading from every point to
/// every receiver (`fading[point * receivers + receiver]`).
#[derive(Debug, Clone, PartialEq)]
pub struct SlotDraw {
    pub transmitting: Vec<bool>,
    pub fading: Vec<f64>,
    pub receivers: usize,
}

impl SlotDraw {
    pub fn fading(&self, point: usize, receiver: usize) -> f64 {
        self.fading[point * self.receivers + receiver]
    }
}

/// Draws `num_slots` independent ALOHA slots over a fixed realization.
///
/// Indicators are drawn slot by slot in point order, fading slot by slot,
/// point by point, receiver by receiver.
pub fn sample_slots(
    realization: &Realization,
    p: f64,
    num_slots: usize,
    fading: &FadingModel,
    receivers: &[Point],
    seed: SeedSpec,
) -> Result<Vec<SlotDraw>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "transmit probability must lie in [0, 1], got {p}"
        )));
    }
    if num_slots == 0 {
        return Err(Error::InvalidParameter("at least one slot is required".into()));
    }
    let sampler = FadingSampler::new(fading)?;
    let n = realization.points.len();
    let mut indicators = seed.rng(Stream::Indicators);
    let mut gains = seed.rng(Stream::Fading);
    let slots = (0..num_slots)
        .map(|_| {
            let transmitting = (0..n).map(|_| indicators.random_bool(p)).collect();
            let fading = (0..n * receivers.len())
                .map(|_| sampler.sample(&mut gains))
                .collect();
            SlotDraw {
                transmitting,
                fading,
                receivers: receivers.len(),
            }
        })
        .collect();
    Ok(slots)
}
