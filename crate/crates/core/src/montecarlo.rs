//! Monte Carlo simulation of the slotted-ALOHA interference field.
//!
//! Each replication draws one PPP realization in a disk window and a number
//! of ALOHA slots over it, then records `I_k(u)` for every receiver `u` and
//! slot `k`. Replications are independent and may run on any number of
//! rayon workers; results are gathered in replication order so the sample
//! is a pure function of the plan.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{exceedance_integrals, LinkConfig, NetworkConfig};
use crate::error::{Error, Result};
use crate::pathloss::PathLossModel;
use crate::stochastic::{sample_ppp, sample_slots, Point, SeedSpec, Stream, Window};

/// Fewer replications than this make standard errors meaningless.
pub const MIN_REPLICATIONS: usize = 100;

pub const DEFAULT_TRUNCATION_TOLERANCE: f64 = 1e-3;
pub const DEFAULT_MAX_WINDOW_RADIUS: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationPlan {
    pub net: NetworkConfig,
    /// Present for outage experiments: the desired transmitter sits at the
    /// origin and the single receiver at `(link_distance, 0)`.
    pub link: Option<LinkConfig>,
    pub receivers: Vec<Point>,
    pub num_slots: usize,
    pub replications: usize,
    pub master_seed: u64,
    /// Bound on the relative bias of the mean caused by the finite window.
    pub truncation_tolerance: f64,
    pub max_window_radius: f64,
}

impl SimulationPlan {
    /// Two-slot interference experiment at the given receivers.
    pub fn interference(
        net: NetworkConfig,
        receivers: Vec<Point>,
        replications: usize,
        master_seed: u64,
    ) -> Self {
        SimulationPlan {
            net,
            link: None,
            receivers,
            num_slots: 2,
            replications,
            master_seed,
            truncation_tolerance: DEFAULT_TRUNCATION_TOLERANCE,
            max_window_radius: DEFAULT_MAX_WINDOW_RADIUS,
        }
    }

    /// Two receivers at `(-d/2, 0)` and `(d/2, 0)`.
    pub fn separated_pair(
        net: NetworkConfig,
        separation: f64,
        replications: usize,
        master_seed: u64,
    ) -> Self {
        let h = 0.5 * separation;
        Self::interference(
            net,
            vec![Point::new(-h, 0.0), Point::new(h, 0.0)],
            replications,
            master_seed,
        )
    }

    /// Two-slot link experiment with the receiver at `(|z|, 0)`.
    pub fn outage(net: NetworkConfig, link: LinkConfig, replications: usize, master_seed: u64) -> Self {
        SimulationPlan {
            link: Some(link),
            receivers: vec![Point::new(link.link_distance, 0.0)],
            ..Self::interference(net, Vec::new(), replications, master_seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.receivers.is_empty() {
            return Err(Error::Config("at least one receiver is required".into()));
        }
        if self.num_slots < 2 {
            return Err(Error::Config(format!(
                "at least two slots are required, got {}",
                self.num_slots
            )));
        }
        if self.replications == 0 {
            return Err(Error::Config("at least one replication is required".into()));
        }
        if !(self.truncation_tolerance.is_finite() && self.truncation_tolerance > 0.0) {
            return Err(Error::Config(format!(
                "truncation tolerance must be positive, got {}",
                self.truncation_tolerance
            )));
        }
        if self.link.is_none() && self.net.pathloss.is_singular() {
            return Err(Error::Divergence(
                "interference moments under singular path loss are infinite; use epsilon > 0".into(),
            ));
        }
        Ok(())
    }

    pub fn window(&self) -> Result<Window> {
        let center = Point::centroid(&self.receivers);
        let radius = choose_window_radius(
            &self.net,
            &self.receivers,
            self.link.as_ref(),
            self.truncation_tolerance,
            self.max_window_radius,
        )?;
        Ok(Window { center, radius })
    }
}

/// Radius of the disk window, centred on the receivers' centroid, beyond
/// which the omitted mean interference (or, for link experiments, the
/// omitted exceedance integral) is at most `eta` times the full value at
/// every receiver.
///
/// With `g(r) <= r^{-alpha}` the tail beyond distance `t` is bounded by
/// `2 pi t^{2 - alpha} / (alpha - 2)` (times `a` for the exceedance kernel);
/// receivers off-centre by `s` see the tail from `R - s`. The radius is at
/// least `s + 10 eps^{1/alpha}`.
pub fn choose_window_radius(
    net: &NetworkConfig,
    receivers: &[Point],
    link: Option<&LinkConfig>,
    eta: f64,
    max_radius: f64,
) -> Result<f64> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::Config(format!("truncation tolerance must be positive, got {eta}")));
    }
    let pl = &net.pathloss;
    let alpha = pl.alpha();
    let center = Point::centroid(receivers);
    let spread = receivers
        .iter()
        .map(|r| r.distance(&center))
        .fold(0.0, f64::max);
    let floor = spread + 10.0 * pl.epsilon().powf(1.0 / alpha);

    // Tail weight and full integral of the kernel whose truncation is bounded.
    let (weight, full) = match link {
        Some(link) => {
            let a = link.threshold_scale(pl);
            (a, exceedance_integrals(pl, a)?.first)
        }
        None => (1.0, pl.integral_g()?),
    };
    let tail = (2.0 * PI * weight / ((alpha - 2.0) * eta * full)).powf(1.0 / (alpha - 2.0));
    let radius = floor.max(spread + tail);
    if !radius.is_finite() || radius > max_radius {
        return Err(Error::Config(format!(
            "window radius {radius} exceeds the maximum {max_radius} \
             (alpha = {alpha}, truncation tolerance = {eta})"
        )));
    }
    Ok(radius)
}

/// `I_k(u)` for every replication, receiver and slot, plus the desired-link
/// fading for link experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceSample {
    pub replications: usize,
    pub receivers: usize,
    pub slots: usize,
    pub window: Window,
    pub master_seed: u64,
    values: Vec<f64>,
    link_fading: Option<Vec<f64>>,
}

impl InterferenceSample {
    pub fn get(&self, replication: usize, receiver: usize, slot: usize) -> f64 {
        self.values[(replication * self.receivers + receiver) * self.slots + slot]
    }

    /// `I_slot(receiver)` across replications.
    pub fn series(&self, receiver: usize, slot: usize) -> Vec<f64> {
        (0..self.replications)
            .map(|i| self.get(i, receiver, slot))
            .collect()
    }

    pub fn link_fading(&self, replication: usize, slot: usize) -> Option<f64> {
        self.link_fading
            .as_ref()
            .map(|h| h[replication * self.slots + slot])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

struct Replication {
    interference: Vec<f64>,
    link_fading: Vec<f64>,
}

fn simulate_replication(plan: &SimulationPlan, window: Window, index: usize) -> Result<Replication> {
    let seed = SeedSpec::new(plan.master_seed, index as u64);
    let net = &plan.net;
    let realization = sample_ppp(net.lambda, window, seed)?;
    let slots = sample_slots(
        &realization,
        net.p,
        plan.num_slots,
        &net.fading,
        &plan.receivers,
        seed,
    )?;

    let n_rx = plan.receivers.len();
    let n_pts = realization.points.len();
    // gains[point * n_rx + receiver]
    let mut gains = Vec::with_capacity(n_pts * n_rx);
    for x in &realization.points {
        for (j, u) in plan.receivers.iter().enumerate() {
            let d2 = x.distance_sq(u);
            if d2 == 0.0 && net.pathloss.is_singular() {
                return Err(Error::SingularGeometry { receiver: j });
            }
            gains.push(net.pathloss.gain_from_squared(d2));
        }
    }

    let mut interference = vec![0.0; n_rx * plan.num_slots];
    for (k, slot) in slots.iter().enumerate() {
        for (i, _) in slot.transmitting.iter().enumerate().filter(|(_, &on)| on) {
            for j in 0..n_rx {
                let idx = i * n_rx + j;
                interference[j * plan.num_slots + k] += slot.fading[idx] * gains[idx];
            }
        }
    }

    let link_fading = if plan.link.is_some() {
        let mut rng = seed.rng(Stream::LinkFading);
        (0..plan.num_slots).map(|_| Exp1.sample(&mut rng)).collect()
    } else {
        Vec::new()
    };
    Ok(Replication {
        interference,
        link_fading,
    })
}

/// Runs every replication of the plan on the current rayon pool.
pub fn simulate(plan: &SimulationPlan) -> Result<InterferenceSample> {
    plan.validate()?;
    let window = plan.window()?;
    let reps: Vec<Replication> = (0..plan.replications)
        .into_par_iter()
        .map(|i| simulate_replication(plan, window, i))
        .collect::<Result<_>>()?;

    let mut values = Vec::with_capacity(plan.replications * plan.receivers.len() * plan.num_slots);
    let mut link = plan
        .link
        .map(|_| Vec::with_capacity(plan.replications * plan.num_slots));
    for rep in reps {
        values.extend_from_slice(&rep.interference);
        if let Some(link) = link.as_mut() {
            link.extend_from_slice(&rep.link_fading);
        }
    }
    Ok(InterferenceSample {
        replications: plan.replications,
        receivers: plan.receivers.len(),
        slots: plan.num_slots,
        window,
        master_seed: plan.master_seed,
        values,
        link_fading: link,
    })
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateWithError {
    pub value: f64,
    pub std_error: f64,
    pub n: usize,
}

impl EstimateWithError {
    /// Standardized deviation from `reference`.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.value - reference;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }

    pub fn within(&self, reference: f64, sigmas: f64) -> bool {
        self.z_score(reference).abs() <= sigmas
    }
}

fn require_replications(n: usize) -> Result<()> {
    if n < MIN_REPLICATIONS {
        Err(Error::Statistical(format!(
            "{n} replications; at least {MIN_REPLICATIONS} are required"
        )))
    } else {
        Ok(())
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

fn mean_with_error(xs: &[f64]) -> EstimateWithError {
    EstimateWithError {
        value: mean(xs),
        std_error: (variance(xs) / xs.len() as f64).sqrt(),
        n: xs.len(),
    }
}

/// Mean and variance of `I`, pooled over receivers and slots.
///
/// All cells are identically distributed, but cells of one replication are
/// dependent, so standard errors come from replication-level aggregates.
pub fn estimate_moments(
    sample: &InterferenceSample,
) -> Result<(EstimateWithError, EstimateWithError)> {
    let n = sample.replications;
    require_replications(n)?;
    let cells = sample.receivers * sample.slots;
    let mut cell_means = vec![0.0; cells];
    for (i, v) in sample.values.iter().enumerate() {
        cell_means[i % cells] += v;
    }
    cell_means.iter_mut().for_each(|m| *m /= n as f64);

    let per_rep_mean: Vec<f64> = sample
        .values
        .chunks_exact(cells)
        .map(mean)
        .collect();
    let per_rep_sq: Vec<f64> = sample
        .values
        .chunks_exact(cells)
        .map(|c| {
            c.iter()
                .zip(&cell_means)
                .map(|(v, m)| (v - m).powi(2))
                .sum::<f64>()
                / cells as f64
        })
        .collect();

    let bessel = n as f64 / (n as f64 - 1.0);
    let sq = mean_with_error(&per_rep_sq);
    Ok((
        mean_with_error(&per_rep_mean),
        EstimateWithError {
            value: sq.value * bessel,
            std_error: sq.std_error * bessel,
            n,
        },
    ))
}

/// How the standard error of a correlation estimate is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationError {
    /// `(1 - r^2) / sqrt(n - 3)`, the Fisher z standard error mapped back.
    #[default]
    Fisher,
    /// Standard deviation of the replicate correlations over resamples.
    Bootstrap { resamples: usize },
}

impl CorrelationError {
    pub fn bootstrap() -> Self {
        CorrelationError::Bootstrap { resamples: 1000 }
    }
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx > 0.0 && syy > 0.0 {
        Some(sxy / (sxx * syy).sqrt())
    } else {
        None
    }
}

fn bootstrap_std<F>(n: usize, resamples: usize, seed: SeedSpec, mut stat: F) -> f64
where
    F: FnMut(&[usize]) -> Option<f64>,
{
    let mut rng = seed.rng(Stream::Bootstrap);
    let mut idx = vec![0usize; n];
    let mut values = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        idx.iter_mut().for_each(|i| *i = rng.random_range(0..n));
        if let Some(v) = stat(&idx) {
            values.push(v);
        }
    }
    if values.len() < 2 {
        0.0
    } else {
        variance(&values).sqrt()
    }
}

/// Pearson correlation across replications of `I_k(u)` and `I_l(v)`, `k != l`.
pub fn estimate_correlation(
    sample: &InterferenceSample,
    at: (usize, usize),
    and: (usize, usize),
    method: CorrelationError,
) -> Result<EstimateWithError> {
    let ((u, k), (v, l)) = (at, and);
    if k == l {
        return Err(Error::InvalidParameter(
            "correlation is defined between distinct slots only".into(),
        ));
    }
    if u >= sample.receivers || v >= sample.receivers || k >= sample.slots || l >= sample.slots {
        return Err(Error::InvalidParameter(format!(
            "receiver/slot out of range: ({u}, {k}), ({v}, {l})"
        )));
    }
    let n = sample.replications;
    require_replications(n)?;
    let x = sample.series(u, k);
    let y = sample.series(v, l);
    let r = pearson(&x, &y).ok_or_else(|| {
        Error::UndefinedCorrelation("one of the interference series has zero variance".into())
    })?;
    let std_error = match method {
        CorrelationError::Fisher => (1.0 - r * r) / (n as f64 - 3.0).sqrt(),
        CorrelationError::Bootstrap { resamples } => {
            let seed = SeedSpec::new(sample.master_seed, (u * sample.slots + k) as u64);
            let (mut xs, mut ys) = (vec![0.0; n], vec![0.0; n]);
            bootstrap_std(n, resamples, seed, |idx| {
                for (t, &i) in idx.iter().enumerate() {
                    xs[t] = x[i];
                    ys[t] = y[i];
                }
                pearson(&xs, &ys)
            })
        }
    };
    Ok(EstimateWithError {
        value: r,
        std_error,
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageEstimate {
    /// `P(A)`, pooled over the two slots.
    pub success: EstimateWithError,
    /// `P(A_k, A_l)`.
    pub joint: EstimateWithError,
    /// `P(A_k, A_l) / P(A)^2`.
    pub ratio: EstimateWithError,
}

/// Below this many replications in any cell of the 2x2 outcome table the
/// delta method is replaced by the bootstrap.
const MIN_CELL_COUNT: usize = 50;
const OUTAGE_BOOTSTRAP_RESAMPLES: usize = 1000;

/// Link success in slots 0 and 1: `h g(z) > theta I`.
pub fn outage_from_sample(
    sample: &InterferenceSample,
    link: &LinkConfig,
    pathloss: &PathLossModel,
) -> Result<OutageEstimate> {
    let n = sample.replications;
    require_replications(n)?;
    if sample.slots < 2 || sample.link_fading.is_none() {
        return Err(Error::Config(
            "sample carries no desired-link fading; simulate an outage plan".into(),
        ));
    }
    let signal = pathloss.gain(link.link_distance);
    let outcomes: Vec<(bool, bool)> = (0..n)
        .map(|i| {
            let ok = |k: usize| {
                let h = sample.link_fading(i, k).expect("link fading present");
                h * signal > link.theta * sample.get(i, 0, k)
            };
            (ok(0), ok(1))
        })
        .collect();

    let single: Vec<f64> = outcomes
        .iter()
        .map(|&(a, b)| (a as u8 + b as u8) as f64 / 2.0)
        .collect();
    let both: Vec<f64> = outcomes.iter().map(|&(a, b)| (a && b) as u8 as f64).collect();
    let success = mean_with_error(&single);
    let joint = mean_with_error(&both);
    if joint.value == 0.0 {
        return Err(Error::Statistical(
            "no replication succeeded in both slots; the ratio is undefined".into(),
        ));
    }
    let ratio_of = |s: f64, j: f64| j / (s * s);
    let ratio = ratio_of(success.value, joint.value);

    let mut table = [0usize; 4];
    for &(a, b) in &outcomes {
        table[(a as usize) << 1 | b as usize] += 1;
    }
    let std_error = if table.iter().any(|&c| c < MIN_CELL_COUNT) {
        let seed = SeedSpec::new(sample.master_seed, u64::MAX);
        bootstrap_std(n, OUTAGE_BOOTSTRAP_RESAMPLES, seed, |idx| {
            let (mut s, mut j) = (0.0, 0.0);
            for &i in idx {
                s += single[i];
                j += both[i];
            }
            (j > 0.0).then(|| ratio_of(s / n as f64, j / n as f64))
        })
    } else {
        // Delta method on log(J) - 2 log(S).
        let influence: Vec<f64> = single
            .iter()
            .zip(&both)
            .map(|(s, j)| j / joint.value - 2.0 * s / success.value)
            .collect();
        ratio * (variance(&influence) / n as f64).sqrt()
    };
    Ok(OutageEstimate {
        success,
        joint,
        ratio: EstimateWithError {
            value: ratio,
            std_error,
            n,
        },
    })
}

/// Simulates a link plan and estimates `P(A)`, `P(A_k, A_l)` and their ratio.
pub fn estimate_outage(plan: &SimulationPlan) -> Result<OutageEstimate> {
    let link = plan
        .link
        .ok_or_else(|| Error::Config("outage estimation needs a link configuration".into()))?;
    if !plan.net.fading.is_rayleigh() {
        return Err(Error::InvalidParameter(format!(
            "outage estimation assumes Rayleigh fading, got {}",
            plan.net.fading
        )));
    }
    let sample = simulate(plan)?;
    outage_from_sample(&sample, &link, &plan.net.pathloss)
}
