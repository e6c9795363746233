//! Saturation-level estimators.
//!
//! The division estimators locate the characteristic point of a cumulative
//! series and divide the observed level there by the characteristic fraction
//! `ρ_n`. The polynomial estimator fits a low-degree trend and uses the peak of
//! its second derivative instead. The least-squares logistic fit is the
//! whole-curve baseline.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::derivpoly::characteristic_level;
use crate::error::{Error, Result};
use crate::logistic::LogisticParams;
use crate::series::{
    central_diff, find_characteristic_point, second_diff, CharacteristicPoint, DiffKind,
    SelectionPolicy, SeriesKind, TimeSeries,
};

/// Whether division uses `ρ_n` at full precision or truncated to the three
/// significant digits quoted in print (0.211, 0.0917, 0.0413).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantMode {
    #[default]
    Exact,
    PaperRounded,
}

impl FromStr for ConstantMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(ConstantMode::Exact),
            "paper" | "paper-rounded" => Ok(ConstantMode::PaperRounded),
            other => Err(Error::Domain(format!("unknown constant mode '{other}'"))),
        }
    }
}

/// `ρ_n` under the given mode.
pub fn level_constant(n: usize, mode: ConstantMode) -> Result<f64> {
    let exact = characteristic_level(n)?;
    Ok(match mode {
        ConstantMode::Exact => exact,
        ConstantMode::PaperRounded => truncate_significant(exact, 3),
    })
}

fn truncate_significant(x: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    // round first to shed representation noise such as 0.4999999…
    let shifted = (x * scale * 1e6).round() / 1e6;
    shifted.trunc() / scale
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Scd,
    Sld,
    Polyfit,
    Nlls,
    /// Zero of the n-th derivative located through the (n−1)-th difference.
    HigherOrder(usize),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Scd => f.write_str("scd"),
            Method::Sld => f.write_str("sld"),
            Method::Polyfit => f.write_str("polyfit"),
            Method::Nlls => f.write_str("nlls"),
            Method::HigherOrder(n) => write!(f, "order-{n}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scd" => Ok(Method::Scd),
            "sld" => Ok(Method::Sld),
            "polyfit" => Ok(Method::Polyfit),
            "nlls" => Ok(Method::Nlls),
            other => other
                .strip_prefix("order-")
                .and_then(|n| n.parse().ok())
                .map(Method::HigherOrder)
                .ok_or_else(|| Error::Domain(format!("unknown method '{other}'"))),
        }
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A diagnostic attached to an estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Diagnostic {
    Flag(bool),
    Number(f64),
    Numbers(Vec<f64>),
    Text(String),
    Texts(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaturationEstimate {
    pub method: Method,
    pub u_max_hat: f64,
    /// Divisor applied to the characteristic value; `None` for the
    /// whole-curve fit.
    pub constant_used: Option<f64>,
    pub char_point: Option<CharacteristicPoint>,
    pub diagnostics: BTreeMap<String, Diagnostic>,
}

impl SaturationEstimate {
    fn new(method: Method, u_max_hat: f64, constant_used: Option<f64>, ts: &TimeSeries) -> Self {
        let mut diagnostics = BTreeMap::new();
        let max_obs = ts.max_value();
        diagnostics.insert("max_observed".into(), Diagnostic::Number(max_obs));
        if u_max_hat.is_nan() || u_max_hat <= max_obs {
            diagnostics.insert("below_max_observed".into(), Diagnostic::Flag(true));
        }
        Self {
            method,
            u_max_hat,
            constant_used,
            char_point: None,
            diagnostics,
        }
    }
}

fn require_cumulative(ts: &TimeSeries) -> Result<()> {
    if ts.kind() != SeriesKind::Cumulative {
        return Err(Error::Domain(
            "estimators need a cumulative series; cumulate it first".into(),
        ));
    }
    Ok(())
}

fn division_estimate(
    ts: &TimeSeries,
    kind: DiffKind,
    n: usize,
    method: Method,
    mode: ConstantMode,
    policy: SelectionPolicy,
) -> Result<SaturationEstimate> {
    require_cumulative(ts)?;
    let ds = second_diff(ts, kind)?;
    let point = find_characteristic_point(&ds, policy)?;
    let constant = level_constant(n, mode)?;
    let mut est =
        SaturationEstimate::new(method, point.series_value / constant, Some(constant), ts);
    if !point.ambiguity.is_empty() {
        est.diagnostics.insert(
            "rival_labels".into(),
            Diagnostic::Texts(point.ambiguity.iter().map(|r| r.label.clone()).collect()),
        );
        est.diagnostics.insert(
            "rival_estimates".into(),
            Diagnostic::Numbers(
                point
                    .ambiguity
                    .iter()
                    .map(|r| r.series_value / constant)
                    .collect(),
            ),
        );
    }
    est.char_point = Some(point);
    Ok(est)
}

/// Characteristic point on the second central difference, divided by `ρ_3`.
pub fn estimate_scd(
    ts: &TimeSeries,
    mode: ConstantMode,
    policy: SelectionPolicy,
) -> Result<SaturationEstimate> {
    if ts.len() < 4 {
        return Err(Error::TooShort {
            needed: 4,
            got: ts.len(),
        });
    }
    division_estimate(ts, DiffKind::Scd, 3, Method::Scd, mode, policy)
}

/// As [`estimate_scd`], on the second left difference.
pub fn estimate_sld(
    ts: &TimeSeries,
    mode: ConstantMode,
    policy: SelectionPolicy,
) -> Result<SaturationEstimate> {
    if ts.len() < 4 {
        return Err(Error::TooShort {
            needed: 4,
            got: ts.len(),
        });
    }
    division_estimate(ts, DiffKind::Sld, 3, Method::Sld, mode, policy)
}

/// Characteristic point of the n-th derivative (`n ≥ 3`), found as the first
/// peak of the (n−1)-th central difference and divided by `ρ_n`.
pub fn higher_order_estimate(
    ts: &TimeSeries,
    n: usize,
    mode: ConstantMode,
    policy: SelectionPolicy,
) -> Result<SaturationEstimate> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "higher-order estimate needs n >= 3, got {n}"
        )));
    }
    if ts.len() < n + 2 {
        return Err(Error::TooShort {
            needed: n + 2,
            got: ts.len(),
        });
    }
    if n == 3 {
        let mut est = estimate_scd(ts, mode, policy)?;
        est.method = Method::HigherOrder(3);
        return Ok(est);
    }
    require_cumulative(ts)?;
    let ds = central_diff(ts, n - 1)?;
    let point = find_characteristic_point(&ds, policy)?;
    let constant = level_constant(n, mode)?;
    let mut est = SaturationEstimate::new(
        Method::HigherOrder(n),
        point.series_value / constant,
        Some(constant),
        ts,
    );
    est.char_point = Some(point);
    Ok(est)
}

/// Least-squares polynomial over the sample index `x = 0, 1, …`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyFit {
    pub degree: usize,
    /// Ascending powers of `x`.
    pub coefficients: Vec<f64>,
    /// Fitted abscissa range `[0, len − 1]`.
    pub domain: (f64, f64),
    pub rmse: f64,
}

impl PolyFit {
    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coefficients, x)
    }

    /// Value of the `order`-th derivative at `x`.
    pub fn eval_derivative(&self, order: usize, x: f64) -> f64 {
        horner(&derivative(&self.coefficients, order), x)
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn derivative(coeffs: &[f64], order: usize) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    for _ in 0..order {
        c = c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &v)| v * i as f64)
            .collect();
    }
    c
}

/// Fits a polynomial of `degree` by Householder QR on a Vandermonde matrix
/// in the rescaled abscissa `x / (len − 1)`.
pub fn fit_polynomial_lsm(ts: &TimeSeries, degree: usize) -> Result<PolyFit> {
    if degree == 0 {
        return Err(Error::Domain("polynomial degree must be at least 1".into()));
    }
    let n = ts.len();
    if n <= degree {
        return Err(Error::TooShort {
            needed: degree + 1,
            got: n,
        });
    }
    let span = (n - 1) as f64;
    let design = DMatrix::from_fn(n, degree + 1, |i, j| (i as f64 / span).powi(j as i32));
    let y = DVector::from_column_slice(ts.values());

    let qr = design.clone().qr();
    let r = qr.r();
    let diag_max = r.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if r.diagonal().iter().any(|v| v.abs() <= 1e-12 * diag_max) {
        return Err(Error::Numerical("design matrix is rank deficient".into()));
    }
    let qty = qr.q().transpose() * &y;
    let scaled = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Numerical("singular triangular factor".into()))?;

    let residual = &design * &scaled - &y;
    let rmse = (residual.norm_squared() / n as f64).sqrt();
    let coefficients = scaled
        .iter()
        .enumerate()
        .map(|(j, c)| c / span.powi(j as i32))
        .collect();
    Ok(PolyFit {
        degree,
        coefficients,
        domain: (0.0, span),
        rmse,
    })
}

/// Number of grid cells used to locate the peak of `f''` for degrees above 4.
const VERTEX_GRID: usize = 2000;

/// Fits a polynomial trend, locates the maximum of its second derivative
/// over the fitted range, and divides the trend value there by `ρ_3`.
pub fn polyfit_estimate(
    ts: &TimeSeries,
    degree: usize,
    mode: ConstantMode,
) -> Result<SaturationEstimate> {
    if degree < 4 || degree % 2 == 1 {
        return Err(Error::Domain(format!(
            "polynomial estimate needs an even degree >= 4, got {degree}"
        )));
    }
    require_cumulative(ts)?;
    let fit = fit_polynomial_lsm(ts, degree)?;
    let (lo, hi) = fit.domain;

    let (x_star, clamped) = if degree == 4 {
        let c = &fit.coefficients;
        // f'' = 12 c4 x² + 6 c3 x + 2 c2
        let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if c[4] >= -1e-9 * scale {
            return Err(Error::Numerical(
                "second derivative of the trend has no maximum".into(),
            ));
        }
        let vertex = -c[3] / (4.0 * c[4]);
        let x = vertex.clamp(lo, hi);
        (x, x != vertex)
    } else {
        let f2 = |x: f64| fit.eval_derivative(2, x);
        let step = (hi - lo) / VERTEX_GRID as f64;
        let best = (0..=VERTEX_GRID)
            .map(|i| lo + step * i as f64)
            .fold((lo, f64::NEG_INFINITY), |(bx, bv), x| {
                let v = f2(x);
                if v > bv {
                    (x, v)
                } else {
                    (bx, bv)
                }
            })
            .0;
        if best <= lo || best >= hi {
            (best.clamp(lo, hi), true)
        } else {
            (
                refine_peak(&fit, (best - step).max(lo), (best + step).min(hi)),
                false,
            )
        }
    };

    let level = fit.eval(x_star);
    let constant = level_constant(3, mode)?;
    let mut est = SaturationEstimate::new(Method::Polyfit, level / constant, Some(constant), ts);
    est.diagnostics.insert(
        "coefficients".into(),
        Diagnostic::Numbers(fit.coefficients.clone()),
    );
    est.diagnostics
        .insert("x_star".into(), Diagnostic::Number(x_star));
    est.diagnostics
        .insert("f_at_x_star".into(), Diagnostic::Number(level));
    est.diagnostics
        .insert("rmse".into(), Diagnostic::Number(fit.rmse));
    est.diagnostics
        .insert("clamped_to_domain".into(), Diagnostic::Flag(clamped));
    Ok(est)
}

/// Bisection on `f'''` inside a bracket around a grid maximum of `f''`.
fn refine_peak(fit: &PolyFit, mut lo: f64, mut hi: f64) -> f64 {
    let f3 = |x: f64| fit.eval_derivative(3, x);
    if f3(lo) <= 0.0 || f3(hi) >= 0.0 {
        return 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f3(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Result of the least-squares logistic fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogisticFit {
    pub params: LogisticParams,
    pub rmse: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Saturation multiples of `max(y)` used to seed the fit.
pub const NLLS_SEED_MULTIPLES: [f64; 4] = [1.05, 1.5, 3.0, 10.0];
const NLLS_MAX_ITERATIONS: usize = 200;
const NLLS_STEP_TOLERANCE: f64 = 1e-10;

/// Least-squares logistic fit with the sample index as time.
pub fn fit_logistic_nlls(ts: &TimeSeries) -> Result<LogisticFit> {
    let times: Vec<f64> = (0..ts.len()).map(|i| i as f64).collect();
    fit_logistic_nlls_at(&times, ts.values())
}

/// Least-squares logistic fit at explicit sample times.
///
/// Each seed fixes a saturation level `U`, linearises
/// `ln((U − y)/y) = ln a − c t` to obtain `a` and `c`, and is then refined by
/// damped Gauss–Newton steps. The lowest-RMSE result wins, ties going to the
/// lower saturation level.
pub fn fit_logistic_nlls_at(times: &[f64], values: &[f64]) -> Result<LogisticFit> {
    if times.len() != values.len() {
        return Err(Error::Domain("times and values differ in length".into()));
    }
    if values.len() < 4 {
        return Err(Error::TooShort {
            needed: 4,
            got: values.len(),
        });
    }
    if values.iter().any(|&y| !y.is_finite() || y <= 0.0) {
        return Err(Error::Domain(
            "logistic fit needs finite positive values".into(),
        ));
    }
    let y_max = values.iter().copied().fold(f64::MIN, f64::max);

    let mut best: Option<LogisticFit> = None;
    for multiple in NLLS_SEED_MULTIPLES {
        let u = multiple * y_max;
        let z: Vec<f64> = values.iter().map(|&y| ((u - y) / y).ln()).collect();
        let (intercept, slope) = linear_regression(times, &z);
        let seed = [
            u,
            intercept.exp().max(f64::MIN_POSITIVE),
            (-slope).max(1e-6),
        ];
        let Some(fit) = refine(times, values, y_max, seed) else {
            continue;
        };
        let better = match &best {
            None => true,
            Some(b) => fit
                .rmse
                .total_cmp(&b.rmse)
                .then(fit.params.u_max().total_cmp(&b.params.u_max()))
                .is_lt(),
        };
        if better {
            best = Some(fit);
        }
    }
    best.ok_or_else(|| Error::Numerical("no seed produced a valid logistic fit".into()))
}

fn linear_regression(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

fn sum_sq(times: &[f64], values: &[f64], p: &[f64; 3]) -> f64 {
    times
        .iter()
        .zip(values)
        .map(|(&t, &y)| {
            let r = p[0] / (1.0 + p[1] * (-p[2] * t).exp()) - y;
            r * r
        })
        .sum()
}

/// Levenberg–Marquardt iterations with multiplicative damping updates.
/// Steps that leave `u_max > max(y), a > 0, c > 0` are rejected.
fn refine(times: &[f64], values: &[f64], y_max: f64, seed: [f64; 3]) -> Option<LogisticFit> {
    let feasible =
        |p: &[f64; 3]| p[0] > y_max && p[1] > 0.0 && p[2] > 0.0 && p.iter().all(|v| v.is_finite());
    if !feasible(&seed) {
        return None;
    }
    let mut p = seed;
    let mut cost = sum_sq(times, values, &p);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < NLLS_MAX_ITERATIONS {
        iterations += 1;
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        for (&t, &y) in times.iter().zip(values) {
            let e = (-p[2] * t).exp();
            let d = 1.0 + p[1] * e;
            let r = p[0] / d - y;
            let j = Vector3::new(1.0 / d, -p[0] * e / (d * d), p[0] * p[1] * t * e / (d * d));
            jtj += j * j.transpose();
            jtr += j * r;
        }
        if jtr.amax() == 0.0 {
            converged = true;
            break;
        }

        let mut accepted = false;
        while lambda < 1e30 {
            let mut damped = jtj;
            for i in 0..3 {
                damped[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
            }
            let Some(step) = damped.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            let trial_cost = if feasible(&trial) {
                sum_sq(times, values, &trial)
            } else {
                f64::INFINITY
            };
            if trial_cost <= cost {
                let rel = (0..3).map(|i| (step[i] / p[i]).abs()).fold(0.0, f64::max);
                p = trial;
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if rel < NLLS_STEP_TOLERANCE {
                    converged = true;
                }
                break;
            }
            lambda *= 2.0;
        }
        if converged {
            break;
        }
        if !accepted {
            // the damping has saturated, so no descent direction remains
            converged = true;
            break;
        }
    }

    let params = LogisticParams::new(p[0], p[1], p[2]).ok()?;
    Some(LogisticFit {
        params,
        rmse: (cost / times.len() as f64).sqrt(),
        converged,
        iterations,
    })
}

/// Whole-curve baseline reported in the same shape as the division estimates.
pub fn nlls_estimate(ts: &TimeSeries) -> Result<SaturationEstimate> {
    let fit = fit_logistic_nlls(ts)?;
    let mut est = SaturationEstimate::new(Method::Nlls, fit.params.u_max(), None, ts);
    est.diagnostics
        .insert("a".into(), Diagnostic::Number(fit.params.a()));
    est.diagnostics
        .insert("c".into(), Diagnostic::Number(fit.params.c()));
    est.diagnostics
        .insert("rmse".into(), Diagnostic::Number(fit.rmse));
    est.diagnostics
        .insert("converged".into(), Diagnostic::Flag(fit.converged));
    est.diagnostics.insert(
        "iterations".into(),
        Diagnostic::Number(fit.iterations as f64),
    );
    Ok(est)
}
