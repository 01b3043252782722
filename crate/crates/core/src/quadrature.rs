//! Adaptive Gauss-Kronrod integration.
//!
//! All integrals in this crate are over the plane or the half line. The
//! half line is compactified with `r = (1 - s) / s`, `s` in `(0, 1]`, which is
//! the map `r = t / (1 - t)` written in the reflected variable `s = 1 - t` so
//! that the point at infinity sits at `s = 0`, where floating point has its
//! finest resolution. Slowly decaying tails such as `r^{-3/2}` turn into
//! integrable endpoint singularities that global bisection resolves.
//!
//! Planar integrals in polar form are evaluated as an outer radial integral
//! over inner angular integrals. The inner error estimates are carried into
//! the outer estimate so that the reported error bounds the whole integral.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

// 15-point Kronrod abscissae; the odd entries are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const PANEL_EVALUATIONS: usize = 15;

/// Combined absolute / relative stopping rule: the integrator stops once the
/// error estimate is below `max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Result<Self> {
        if !(abs >= 0.0 && rel >= 0.0) || (abs == 0.0 && rel == 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be non-negative and not both zero (abs {abs}, rel {rel})"
            )));
        }
        Ok(Tolerance { abs, rel })
    }

    pub fn absolute(abs: f64) -> Result<Self> {
        Self::new(abs, 0.0)
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-10,
            rel: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub tol: Tolerance,
    /// Maximum number of integrand evaluations, inner evaluations included.
    pub max_evaluations: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            tol: Tolerance::default(),
            max_evaluations: 1_000_000,
        }
    }
}

impl QuadratureOptions {
    pub fn with_tolerance(tol: Tolerance) -> Self {
        QuadratureOptions {
            tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

struct Budget {
    used: Cell<usize>,
    max: usize,
}

impl Budget {
    fn new(max: usize) -> Self {
        Budget {
            used: Cell::new(0),
            max,
        }
    }

    fn can_afford(&self, n: usize) -> bool {
        self.used.get() + n <= self.max
    }

    fn charge(&self, n: usize) {
        self.used.set(self.used.get() + n);
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// A sampled integrand value together with the absolute error already
/// committed in producing it (zero for plain function values).
type Sample = (f64, f64);

// Budget charging is left to the sampling closures so that nested
// integrals only charge leaf evaluations.
fn gauss_kronrod<S>(sample: &mut S, lo: f64, hi: f64) -> Result<Panel>
where
    S: FnMut(f64) -> Result<Sample>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let (fc, ec) = sample(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut carried = WGK[7] * ec;

    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let (f1, e1) = sample(center - dx)?;
        let (f2, e2) = sample(center + dx)?;
        kronrod += w * (f1 + f2);
        carried += w * (e1 + e2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs() + carried * half.abs();
    Ok(Panel {
        lo,
        hi,
        value,
        error,
    })
}

fn adaptive<S>(
    sample: &mut S,
    lo: f64,
    hi: f64,
    initial_panels: usize,
    tol: Tolerance,
    budget: &Budget,
) -> Result<QuadratureResult>
where
    S: FnMut(f64) -> Result<Sample>,
{
    let start = budget.used.get();
    let mut heap = BinaryHeap::new();
    let width = (hi - lo) / initial_panels as f64;
    for i in 0..initial_panels {
        if !budget.can_afford(PANEL_EVALUATIONS) {
            return Err(non_convergence(&heap, budget.used.get() - start));
        }
        let a = lo + width * i as f64;
        let b = if i + 1 == initial_panels {
            hi
        } else {
            lo + width * (i + 1) as f64
        };
        heap.push(gauss_kronrod(sample, a, b)?);
    }

    let (mut value, mut error) = totals(&heap);
    loop {
        if error <= tol.target(value) {
            // Re-sum to shed the drift of the running totals.
            (value, error) = totals(&heap);
            if error <= tol.target(value) {
                return Ok(QuadratureResult {
                    value,
                    abs_error_estimate: error,
                    evaluations: budget.used.get() - start,
                });
            }
        }
        if !budget.can_afford(2 * PANEL_EVALUATIONS) {
            return Err(non_convergence(&heap, budget.used.get() - start));
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Panel cannot be bisected in floating point.
            heap.push(worst);
            return Err(non_convergence(&heap, budget.used.get() - start));
        }
        let halves = gauss_kronrod(sample, worst.lo, mid)
            .and_then(|left| Ok((left, gauss_kronrod(sample, mid, worst.hi)?)));
        let (left, right) = match halves {
            Ok(pair) => pair,
            Err(Error::NonConvergence { .. }) => {
                // An inner integral ran out of budget; report the outer state.
                heap.push(worst);
                return Err(non_convergence(&heap, budget.used.get() - start));
            }
            Err(e) => return Err(e),
        };
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
}

fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    heap.iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}

fn non_convergence(heap: &BinaryHeap<Panel>, evaluations: usize) -> Error {
    let (value, abs_error) = if heap.is_empty() {
        (0.0, f64::INFINITY)
    } else {
        totals(heap)
    };
    Error::NonConvergence {
        value,
        abs_error,
        evaluations,
    }
}

fn finite(x: f64, at: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Domain(format!("integrand is not finite ({x}) at {at}")))
    }
}

/// Integrates `f` over the finite interval `[lo, hi]`.
pub fn integrate<F>(mut f: F, lo: f64, hi: f64, opts: QuadratureOptions) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "integration bounds must be finite with lo < hi (got [{lo}, {hi}])"
        )));
    }
    let budget = Budget::new(opts.max_evaluations);
    let mut sample = |x: f64| {
        budget.charge(1);
        finite(f(x), x).map(|v| (v, 0.0))
    };
    adaptive(&mut sample, lo, hi, 1, opts.tol, &budget)
}

/// Integrates `f` over `[0, infinity)`.
pub fn integrate_radial<F>(mut f: F, opts: QuadratureOptions) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    let budget = Budget::new(opts.max_evaluations);
    let mut sample = |s: f64| {
        budget.charge(1);
        let r = (1.0 - s) / s;
        finite(f(r) / (s * s), r).map(|v| (v, 0.0))
    };
    adaptive(&mut sample, 0.0, 1.0, 1, opts.tol, &budget)
}

/// Integrates `f(radius, angle)` over `(0, infinity) x [0, 2 pi)`.
///
/// The integrand is taken as given: the area element `r` is not inserted,
/// callers integrating over the plane include it themselves.
pub fn integrate_polar<F>(mut f: F, opts: QuadratureOptions) -> Result<QuadratureResult>
where
    F: FnMut(f64, f64) -> f64,
{
    let budget = Budget::new(opts.max_evaluations);
    let inner_tol = Tolerance {
        abs: opts.tol.abs * 1e-2,
        rel: opts.tol.rel * 1e-1,
    };
    let mut outer = |s: f64| -> Result<Sample> {
        let r = (1.0 - s) / s;
        let jacobian = 1.0 / (s * s);
        let mut inner = |theta: f64| {
            budget.charge(1);
            finite(f(r, theta), r).map(|v| (v, 0.0))
        };
        let res = adaptive(&mut inner, 0.0, 2.0 * PI, 4, inner_tol, &budget)?;
        Ok((res.value * jacobian, res.abs_error_estimate * jacobian))
    };
    adaptive(&mut outer, 0.0, 1.0, 1, opts.tol, &budget)
}
