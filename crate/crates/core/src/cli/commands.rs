use crate::analytic::{self, FadingModel, LinkConfig, NetworkConfig};
use crate::error::Error;
use crate::montecarlo::{
    estimate_correlation, estimate_moments, outage_from_sample, simulate, with_workers,
    EstimateWithError, SimulationPlan,
};
use crate::pathloss::PathLossModel;
use crate::stochastic::{splitmix64, Point};

use super::output::{format_number, Table};
use super::params::{Fig1Params, Fig2Params, MomentsParams, ValidateParams, ValidationCell};
use super::CliError;

pub const FIG1_HEADER: [&str; 3] = ["epsilon", "separation", "zeta_over_p"];
pub const FIG2_HEADER: [&str; 3] = ["p", "p_success", "p_cond"];
pub const MOMENTS_HEADER: [&str; 5] = ["quantity", "analytic", "mc_value", "mc_stderr", "z_score"];
pub const VALIDATE_HEADER: [&str; 7] = [
    "quantity",
    "params",
    "analytic",
    "mc_value",
    "mc_stderr",
    "z_score",
    "pass",
];

/// Rows pass when within this many standard errors of the analytic value.
pub const PASS_SIGMAS: f64 = 3.0;

fn usage(e: Error) -> CliError {
    match e {
        Error::NonConvergence { .. } => CliError::Core(e),
        other => CliError::Usage(other.to_string()),
    }
}

/// `zeta / p` on the (epsilon, separation) grid.
pub fn fig1(params: &Fig1Params) -> Result<Table, CliError> {
    if !(params.p > 0.0 && params.p <= 1.0) {
        return Err(CliError::Usage(format!(
            "p must lie in (0, 1] for zeta / p, got {}",
            params.p
        )));
    }
    if let Some(eps) = params.epsilons.iter().find(|&&e| !(e > 0.0)) {
        return Err(CliError::Usage(format!(
            "every epsilon must be positive for the correlation curve, got {eps}"
        )));
    }
    if let Some(d) = params.separations.iter().find(|&&d| !(d >= 0.0 && d.is_finite())) {
        return Err(CliError::Usage(format!("invalid separation {d}")));
    }
    let mut table = Table::new(&FIG1_HEADER);
    for &eps in &params.epsilons {
        let pl = PathLossModel::new(params.alpha, eps).map_err(usage)?;
        NetworkConfig::new(params.lambda, params.p, pl, params.fading).map_err(usage)?;
        for &d in &params.separations {
            let z = analytic::normalized_spatial_correlation(&pl, &params.fading, d)?;
            table.push(vec![format_number(eps), format_number(d), format_number(z)]);
        }
    }
    Ok(table)
}

/// Analytic `P(A_l)` and `P(A_k | A_l)` along the ALOHA probability grid.
pub fn fig2(params: &Fig2Params) -> Result<Table, CliError> {
    let pl = PathLossModel::new(params.alpha, params.epsilon).map_err(usage)?;
    let link = LinkConfig::new(params.link_distance, params.theta).map_err(usage)?;
    let mut table = Table::new(&FIG2_HEADER);
    for &p in &params.p_grid {
        let net = NetworkConfig::new(params.lambda, p, pl, FadingModel::Rayleigh).map_err(usage)?;
        let success = analytic::success_probability(&net, &link)?;
        let ratio = analytic::conditional_ratio(&net, &link)?;
        table.push(vec![
            format_number(p),
            format_number(success),
            format_number(ratio * success),
        ]);
    }
    Ok(table)
}

fn row_values(analytic: f64, mc: Option<EstimateWithError>) -> Vec<String> {
    match mc {
        Some(e) => vec![
            format_number(analytic),
            format_number(e.value),
            format_number(e.std_error),
            format_number(e.z_score(analytic)),
        ],
        None => vec![format_number(analytic), String::new(), String::new(), String::new()],
    }
}

pub fn moments(params: &MomentsParams) -> Result<Table, CliError> {
    let pl = PathLossModel::new(params.alpha, params.epsilon).map_err(usage)?;
    let net = NetworkConfig::new(params.lambda, params.p, pl, params.fading).map_err(usage)?;
    let mean = analytic::mean_interference(&net).map_err(usage)?;
    let var = analytic::interference_variance(&net).map_err(usage)?;
    let mut plan = SimulationPlan::interference(net, vec![Point::ORIGIN], params.replications, params.seed);
    plan.truncation_tolerance = params.truncation_tolerance;
    let sample = with_workers(params.workers, || simulate(&plan)).map_err(usage)?.map_err(usage)?;
    let (m, v) = estimate_moments(&sample)?;

    let mut table = Table::new(&MOMENTS_HEADER);
    for (name, exact, est) in [("mean", mean, m), ("variance", var, v)] {
        let mut row = vec![name.to_string()];
        row.extend(row_values(exact, Some(est)));
        table.push(row);
    }
    Ok(table)
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub table: Table,
    pub failures: usize,
}

struct Row {
    quantity: &'static str,
    analytic: f64,
    estimate: Result<EstimateWithError, Error>,
    /// Extra absolute allowance, used for the truncation bias of means.
    allowance: f64,
}

impl Row {
    fn exact(quantity: &'static str, analytic: f64, estimate: Result<EstimateWithError, Error>) -> Self {
        Row {
            quantity,
            analytic,
            estimate,
            allowance: 0.0,
        }
    }

    fn passes(&self) -> bool {
        match &self.estimate {
            Ok(e) => (e.value - self.analytic).abs() <= PASS_SIGMAS * e.std_error + self.allowance,
            Err(_) => false,
        }
    }
}

fn describe(cell: &ValidationCell) -> String {
    let f = format_number;
    match cell {
        ValidationCell::Moments { lambda, p, alpha, epsilon, fading } => format!(
            "lambda={};p={};alpha={};epsilon={};fading={fading}",
            f(*lambda), f(*p), f(*alpha), f(*epsilon)
        ),
        ValidationCell::Correlation { lambda, p, alpha, epsilon, fading, separation } => format!(
            "lambda={};p={};alpha={};epsilon={};fading={fading};separation={}",
            f(*lambda), f(*p), f(*alpha), f(*epsilon), f(*separation)
        ),
        ValidationCell::Outage { lambda, p, alpha, epsilon, link_distance, theta } => format!(
            "lambda={};p={};alpha={};epsilon={};link_distance={};theta={}",
            f(*lambda), f(*p), f(*alpha), f(*epsilon), f(*link_distance), f(*theta)
        ),
    }
}

fn run_cell(cell: &ValidationCell, params: &ValidateParams, seed: u64) -> Result<Vec<Row>, CliError> {
    let net_of = |lambda, p, alpha, epsilon, fading| -> Result<NetworkConfig, CliError> {
        let pl = PathLossModel::new(alpha, epsilon).map_err(usage)?;
        NetworkConfig::new(lambda, p, pl, fading).map_err(usage)
    };
    let reps = params.replications;
    let eta = params.truncation_tolerance;
    let rows = match *cell {
        ValidationCell::Moments { lambda, p, alpha, epsilon, fading } => {
            let net = net_of(lambda, p, alpha, epsilon, fading)?;
            let mean = analytic::mean_interference(&net).map_err(usage)?;
            let var = analytic::interference_variance(&net).map_err(usage)?;
            let zeta_t = analytic::temporal_correlation(&net);
            let mut plan = SimulationPlan::interference(net, vec![Point::ORIGIN], reps, seed);
            plan.truncation_tolerance = eta;
            let sample = simulate(&plan);
            let moments = sample.as_ref().map_err(Clone::clone).and_then(estimate_moments);
            let corr = sample.as_ref().map_err(Clone::clone).and_then(|s| {
                estimate_correlation(s, (0, 0), (0, 1), params.correlation_error)
            });
            vec![
                Row {
                    quantity: "mean",
                    analytic: mean,
                    estimate: moments.clone().map(|m| m.0),
                    allowance: eta * mean.abs(),
                },
                Row::exact("variance", var, moments.map(|m| m.1)),
                Row::exact("temporal_correlation", zeta_t, corr),
            ]
        }
        ValidationCell::Correlation { lambda, p, alpha, epsilon, fading, separation } => {
            let net = net_of(lambda, p, alpha, epsilon, fading)?;
            let zeta = analytic::spatial_temporal_correlation(&net, separation).map_err(usage)?;
            let mut plan = SimulationPlan::separated_pair(net, separation, reps, seed);
            plan.truncation_tolerance = eta;
            let est = simulate(&plan).and_then(|s| {
                estimate_correlation(&s, (0, 0), (1, 1), params.correlation_error)
            });
            vec![Row::exact("spatial_correlation", zeta, est)]
        }
        ValidationCell::Outage { lambda, p, alpha, epsilon, link_distance, theta } => {
            let net = net_of(lambda, p, alpha, epsilon, FadingModel::Rayleigh)?;
            let link = LinkConfig::new(link_distance, theta).map_err(usage)?;
            let s = analytic::success_probability(&net, &link).map_err(usage)?;
            let j = analytic::joint_success_probability(&net, &link).map_err(usage)?;
            let r = analytic::conditional_ratio(&net, &link).map_err(usage)?;
            let mut plan = SimulationPlan::outage(net, link, reps, seed);
            plan.truncation_tolerance = eta;
            let est = simulate(&plan).and_then(|smp| outage_from_sample(&smp, &link, &net.pathloss));
            vec![
                Row::exact("p_success", s, est.clone().map(|e| e.success)),
                Row::exact("p_joint", j, est.clone().map(|e| e.joint)),
                Row::exact("conditional_ratio", r, est.map(|e| e.ratio)),
            ]
        }
    };
    Ok(rows)
}

/// Analytic value against Monte Carlo estimate for every cell of the grid.
///
/// Simulation failures (too few replications, undefined correlations)
/// become failed rows with empty estimate columns.
pub fn validate(params: &ValidateParams) -> Result<ValidationReport, CliError> {
    if params.grid.is_empty() {
        return Err(CliError::Usage("the validation grid is empty".into()));
    }
    let mut table = Table::new(&VALIDATE_HEADER);
    let mut failures = 0;
    for (index, cell) in params.grid.iter().enumerate() {
        let seed = splitmix64(params.seed ^ splitmix64(index as u64));
        let rows = with_workers(params.workers, || run_cell(cell, params, seed)).map_err(usage)??;
        let described = describe(cell);
        for row in rows {
            let pass = row.passes();
            failures += usize::from(!pass);
            let mut cols = vec![row.quantity.to_string(), described.clone()];
            cols.extend(row_values(row.analytic, row.estimate.ok()));
            cols.push(pass.to_string());
            table.push(cols);
        }
    }
    Ok(ValidationReport { table, failures })
}
