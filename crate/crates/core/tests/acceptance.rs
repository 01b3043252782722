//! Acceptance suite. Every criterion prints one `criterion N: PASS|FAIL` line
//! before asserting, so `cargo test --test acceptance -- --nocapture
//! --test-threads 1` gives a readable report.

use std::f64::consts::PI;
use std::fs;
use std::process::Command;
use std::time::Instant;

use aloha_corr::analytic::{self, FadingModel, LinkConfig, NetworkConfig};
use aloha_corr::montecarlo::{
    estimate_correlation, estimate_moments, estimate_outage, simulate, CorrelationError,
    SimulationPlan,
};
use aloha_corr::pathloss::PathLossModel;
use aloha_corr::quadrature::{integrate_radial, QuadratureOptions, Tolerance};
use aloha_corr::stochastic::Point;

fn report(criterion: u32, started: Instant, failures: &[String]) {
    let secs = started.elapsed().as_secs_f64();
    if failures.is_empty() {
        println!("criterion {criterion}: PASS ({secs:.1} s)");
    } else {
        println!("criterion {criterion}: FAIL ({secs:.1} s): {}", failures.join("; "));
    }
    assert!(failures.is_empty(), "criterion {criterion}: {}", failures.join("; "));
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn net(lambda: f64, p: f64, alpha: f64, eps: f64, fading: FadingModel) -> NetworkConfig {
    NetworkConfig::new(lambda, p, PathLossModel::new(alpha, eps).unwrap(), fading).unwrap()
}

const ALPHAS: [f64; 4] = [2.5, 3.0, 4.0, 6.0];
const EPSILONS: [f64; 3] = [0.01, 0.1, 1.0];
const SCALES: [f64; 3] = [0.01, 0.0625, 1.0];
const PS: [f64; 3] = [0.1, 0.5, 1.0];
const LAMBDAS: [f64; 3] = [0.5, 1.0, 2.0];

#[test]
fn criterion_1_closed_forms_against_quadrature() {
    let started = Instant::now();
    let opts = QuadratureOptions::with_tolerance(Tolerance::new(0.0, 1e-10).unwrap());
    let mut failures = Vec::new();
    let mut check = |what: String, closed: f64, quad: f64| {
        if !(rel_err(closed, quad) <= 1e-6) {
            failures.push(format!("{what}: closed {closed} vs quadrature {quad}"));
        }
    };

    for &alpha in &ALPHAS {
        for &eps in &EPSILONS {
            let pl = PathLossModel::new(alpha, eps).unwrap();
            let g = move |r: f64| 1.0 / (eps + r.powf(alpha));
            let int_g = integrate_radial(|r| 2.0 * PI * r * g(r), opts).unwrap().value;
            let int_g2 = integrate_radial(|r| 2.0 * PI * r * g(r).powi(2), opts).unwrap().value;
            check(format!("int g a={alpha} e={eps}"), pl.integral_g().unwrap(), int_g);
            check(format!("int g^2 a={alpha} e={eps}"), pl.integral_g_squared().unwrap(), int_g2);
            for &p in &PS {
                for &lambda in &LAMBDAS {
                    for fading in [FadingModel::Rayleigh, FadingModel::Nakagami(2.0), FadingModel::Nakagami(0.5)] {
                        let cfg = net(lambda, p, alpha, eps, fading);
                        let quad = p * lambda * fading.second_moment() * int_g2;
                        check(
                            format!("variance a={alpha} e={eps} p={p} l={lambda} {fading}"),
                            analytic::nakagami_variance_closed_form(&cfg).unwrap(),
                            quad,
                        );
                    }
                }
            }
        }
        for &a in &SCALES {
            let q = move |r: f64| a / (a + r.powf(alpha));
            let j2 = integrate_radial(|r| 2.0 * PI * r * q(r).powi(2), opts).unwrap().value;
            for &p in &PS {
                for &lambda in &LAMBDAS {
                    let csc = 1.0 / (2.0 * PI / alpha).sin();
                    let closed = (2.0 * lambda * a.powf(2.0 / alpha) * p * p * PI * PI
                        * (alpha - 2.0)
                        / (alpha * alpha)
                        * csc)
                        .exp();
                    check(
                        format!("singular ratio a={alpha} scale={a} p={p} l={lambda}"),
                        closed,
                        (lambda * p * p * j2).exp(),
                    );
                    // The library's ratio at a link whose threshold scale is `a`.
                    let cfg = net(lambda, p, alpha, 0.0, FadingModel::Rayleigh);
                    let link = LinkConfig::new(1.0, a).unwrap();
                    check(
                        format!("library ratio a={alpha} scale={a} p={p} l={lambda}"),
                        analytic::conditional_ratio(&cfg, &link).unwrap(),
                        closed,
                    );
                }
            }
        }
    }
    report(1, started, &failures);
}

const REPLICATIONS: usize = 20_000;

#[test]
fn criterion_2_temporal_correlation() {
    let started = Instant::now();
    let mut failures = Vec::new();
    for (p, fading, seed, expected) in [
        (0.5, FadingModel::Rayleigh, 2, 0.25),
        (0.7, FadingModel::None, 3, 0.7),
    ] {
        let cfg = net(1.0, p, 4.0, 1.0, fading);
        let sample =
            simulate(&SimulationPlan::interference(cfg, vec![Point::ORIGIN], REPLICATIONS, seed)).unwrap();
        let zeta = estimate_correlation(&sample, (0, 0), (0, 1), CorrelationError::Fisher).unwrap();
        println!("  zeta_t {fading} p={p}: {:.5} +- {:.5}", zeta.value, zeta.std_error);
        if !zeta.within(expected, 3.0) {
            failures.push(format!("{fading} p={p}: {zeta:?} vs {expected}"));
        }
    }
    report(2, started, &failures);
}

#[test]
fn criterion_3_moments() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let quarter = PI * PI / 4.0;
    for (fading, seed, variance) in [
        (FadingModel::Rayleigh, 4, quarter),
        (FadingModel::None, 5, PI * PI / 8.0),
    ] {
        let cfg = net(1.0, 0.5, 4.0, 1.0, fading);
        let sample =
            simulate(&SimulationPlan::interference(cfg, vec![Point::ORIGIN], REPLICATIONS, seed)).unwrap();
        let (mean, var) = estimate_moments(&sample).unwrap();
        println!(
            "  {fading}: mean {:.5} +- {:.5}, variance {:.5} +- {:.5}",
            mean.value, mean.std_error, var.value, var.std_error
        );
        let allowed = (3.0 * mean.std_error).max(0.002 * quarter);
        if (mean.value - quarter).abs() > allowed {
            failures.push(format!("{fading} mean {mean:?} vs {quarter}"));
        }
        if !var.within(variance, 3.0) {
            failures.push(format!("{fading} variance {var:?} vs {variance}"));
        }
    }
    report(3, started, &failures);
}

#[test]
fn criterion_4_spatial_curve() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let eps_grid = [1.0, 0.1, 0.01];
    let d_grid = [0.0, 0.25, 0.5, 1.0, 2.0];
    for fading in [FadingModel::None, FadingModel::Rayleigh] {
        let curves: Vec<Vec<f64>> = eps_grid
            .iter()
            .map(|&eps| {
                let pl = PathLossModel::new(4.0, eps).unwrap();
                d_grid
                    .iter()
                    .map(|&d| analytic::normalized_spatial_correlation(&pl, &fading, d).unwrap())
                    .collect()
            })
            .collect();
        for (eps, curve) in eps_grid.iter().zip(&curves) {
            let at_zero = 1.0 / fading.second_moment();
            if rel_err(curve[0], at_zero) > 1e-8 {
                failures.push(format!("{fading} eps={eps}: d=0 gives {} not {at_zero}", curve[0]));
            }
            if curve.windows(2).any(|w| w[1] > w[0]) {
                failures.push(format!("{fading} eps={eps}: increasing in d: {curve:?}"));
            }
        }
        for (j, &d) in d_grid.iter().enumerate().skip(1) {
            if curves.windows(2).any(|w| w[1][j] > w[0][j]) {
                failures.push(format!("{fading} d={d}: increases as eps decreases"));
            }
        }
    }
    let unit = PathLossModel::new(4.0, 1.0).unwrap();
    for &eps in &eps_grid {
        let pl = PathLossModel::new(4.0, eps).unwrap();
        for &d in &d_grid {
            let direct = analytic::normalized_spatial_correlation(&pl, &FadingModel::None, d).unwrap();
            let scaled = analytic::normalized_spatial_correlation(
                &unit,
                &FadingModel::None,
                d * eps.powf(-0.25),
            )
            .unwrap();
            if rel_err(direct, scaled) > 1e-5 {
                failures.push(format!("scaling eps={eps} d={d}: {direct} vs {scaled}"));
            }
        }
    }

    let cfg = net(1.0, 1.0, 4.0, 1.0, FadingModel::Rayleigh);
    let exact = analytic::spatial_temporal_correlation(&cfg, 1.0).unwrap();
    let sample = simulate(&SimulationPlan::separated_pair(cfg, 1.0, REPLICATIONS, 6)).unwrap();
    let zeta = estimate_correlation(&sample, (0, 0), (1, 1), CorrelationError::Fisher).unwrap();
    println!("  zeta(d=1): {:.5} +- {:.5} vs {exact:.5}", zeta.value, zeta.std_error);
    if !zeta.within(exact, 3.0) {
        failures.push(format!("MC zeta(1) {zeta:?} vs {exact}"));
    }
    report(4, started, &failures);
}

fn fig2_network(lambda: f64, p: f64) -> NetworkConfig {
    net(lambda, p, 4.0, 0.0, FadingModel::Rayleigh)
}

#[test]
fn criterion_5_outage_probabilities() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let cfg = fig2_network(1.0, 0.5);
    let link = LinkConfig::new(0.5, 1.0).unwrap();
    let success = analytic::success_probability(&cfg, &link).unwrap();
    let joint = analytic::joint_success_probability(&cfg, &link).unwrap();
    let ratio = analytic::conditional_ratio(&cfg, &link).unwrap();
    let targets = [("p_success", success, 0.53970), ("p_joint", joint, 0.33990), ("ratio", ratio, 1.16674)];
    for (name, value, target) in targets {
        println!("  analytic {name}: {value:.6} (target {target} +- 1e-4)");
        if (value - target).abs() > 1e-4 {
            failures.push(format!("analytic {name} {value:.6} differs from {target} by more than 1e-4"));
        }
    }

    let est = estimate_outage(&SimulationPlan::outage(cfg, link, 100_000, 7)).unwrap();
    for ((name, _, target), e) in targets.iter().zip([est.success, est.joint, est.ratio]) {
        println!("  MC {name}: {:.5} +- {:.5}", e.value, e.std_error);
        if !e.within(*target, 3.0) {
            failures.push(format!("MC {name} {e:?} vs {target}"));
        }
    }
    // One-sided 99% test of ratio > 1.
    let z = est.ratio.z_score(1.0);
    if z <= 2.326 {
        failures.push(format!("MC ratio not above 1 at 99%: z = {z}"));
    }
    report(5, started, &failures);
}

#[test]
fn criterion_6_ratio_monotonicity() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let ratio = |lambda: f64, p: f64, theta: f64| {
        analytic::conditional_ratio(&fig2_network(lambda, p), &LinkConfig::new(0.5, theta).unwrap())
            .unwrap()
    };
    let sweeps: [(&str, Vec<f64>); 3] = [
        ("theta", [0.5, 1.0, 2.0].iter().map(|&t| ratio(1.0, 0.5, t)).collect()),
        ("lambda", [0.5, 1.0, 2.0].iter().map(|&l| ratio(l, 0.5, 1.0)).collect()),
        ("p", [0.25, 0.5, 1.0].iter().map(|&p| ratio(1.0, p, 1.0)).collect()),
    ];
    for (name, values) in &sweeps {
        println!("  ratio along {name}: {values:?}");
        if values.windows(2).any(|w| w[1] <= w[0]) {
            failures.push(format!("not strictly increasing in {name}: {values:?}"));
        }
    }
    report(6, started, &failures);
}

#[test]
fn criterion_7_validate_is_worker_independent() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: &str, out: &str| {
        Command::new(env!("CARGO_BIN_EXE_aloha-corr"))
            .current_dir(dir.path())
            .args(["validate", "--seed", "11", "--workers", workers, "--out", out])
            .output()
            .unwrap()
    };
    let one = run("1", "one.csv");
    let eight = run("8", "eight.csv");
    let mut failures = Vec::new();
    for (label, out) in [("1 worker", &one), ("8 workers", &eight)] {
        // Exit status 2 (a row outside 3 SE) still produces the full table.
        if !matches!(out.status.code(), Some(0 | 2)) {
            failures.push(format!("{label}: {}", String::from_utf8_lossy(&out.stderr)));
        }
    }
    if failures.is_empty() {
        let a = fs::read(dir.path().join("one.csv")).unwrap();
        let b = fs::read(dir.path().join("eight.csv")).unwrap();
        if a != b {
            failures.push("CSV differs between 1 and 8 workers".into());
        }
    }
    report(7, started, &failures);
}
