//! Deterministic clean and noisy logistic series, and a harness that runs
//! every estimator on truncated prefixes of them.
//!
//! Noise is additive Gaussian on levels. Variates are pinned to a specific
//! algorithm so output depends only on the spec:
//!
//! * uniform stream: the i-th uniform is the SplitMix64 finaliser applied to
//!   `seed + (i + 1)·0x9E3779B97F4A7C15` (wrapping), mapped to
//!   `((x >> 11) + 0.5)·2⁻⁵³`, so it lies strictly inside `(0, 1)`;
//! * normal variate: Acklam's rational approximation of the inverse normal
//!   CDF (relative error below 1.2e−9), without a refinement step.
//!
//! Only IEEE arithmetic, `sqrt`, `ln` and `exp` are involved.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{
    estimate_scd, estimate_sld, fit_logistic_nlls, polyfit_estimate, ConstantMode,
};
use crate::logistic::LogisticParams;
use crate::series::{SelectionPolicy, SeriesKind, TimeSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGenSpec")]
pub struct GenSpec {
    pub params: LogisticParams,
    pub n_points: usize,
    #[serde(default)]
    pub t_start: f64,
    pub t_step: f64,
    #[serde(default)]
    pub noise_sd: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Deserialize)]
struct RawGenSpec {
    params: LogisticParams,
    n_points: usize,
    #[serde(default)]
    t_start: f64,
    t_step: f64,
    #[serde(default)]
    noise_sd: f64,
    #[serde(default)]
    seed: u64,
}

impl TryFrom<RawGenSpec> for GenSpec {
    type Error = Error;

    fn try_from(r: RawGenSpec) -> Result<Self> {
        GenSpec::new(
            r.params, r.n_points, r.t_start, r.t_step, r.noise_sd, r.seed,
        )
    }
}

impl GenSpec {
    pub fn new(
        params: LogisticParams,
        n_points: usize,
        t_start: f64,
        t_step: f64,
        noise_sd: f64,
        seed: u64,
    ) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::Domain(format!(
                "need at least 3 points, got {n_points}"
            )));
        }
        if !(t_step > 0.0 && t_step.is_finite()) || !t_start.is_finite() {
            return Err(Error::Domain(format!(
                "bad time grid: start {t_start}, step {t_step}"
            )));
        }
        if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
            return Err(Error::Domain(format!(
                "noise standard deviation must be >= 0, got {noise_sd}"
            )));
        }
        Ok(Self {
            params,
            n_points,
            t_start,
            t_step,
            noise_sd,
            seed,
        })
    }

    /// Noise-free spec.
    pub fn clean(
        params: LogisticParams,
        n_points: usize,
        t_start: f64,
        t_step: f64,
    ) -> Result<Self> {
        Self::new(params, n_points, t_start, t_step, 0.0, 0)
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t_start + i as f64 * self.t_step
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The i-th uniform of the stream for `seed`, in `(0, 1)`.
pub fn uniform(seed: u64, i: u64) -> f64 {
    let x = splitmix64(seed.wrapping_add(i.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)));
    ((x >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Acklam's inverse normal CDF for `p ∈ (0, 1)`.
pub fn inverse_normal_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    }
}

/// Samples the curve on the spec's grid and adds seeded Gaussian noise.
/// Labels are the sample times.
pub fn generate(spec: &GenSpec) -> TimeSeries {
    let (labels, values) = (0..spec.n_points)
        .map(|i| {
            let t = spec.time(i);
            let mut y = spec.params.eval(t);
            if spec.noise_sd > 0.0 {
                y += spec.noise_sd * inverse_normal_cdf(uniform(spec.seed, i as u64));
            }
            (t.to_string(), y)
        })
        .unzip();
    TimeSeries::new(labels, values, SeriesKind::Cumulative)
        .expect("labels and values built together")
}

/// Estimators exercised by [`benchmark_estimators`], in column order.
pub const BENCH_METHODS: [&str; 4] = ["scd", "sld", "polyfit", "nlls"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub spec_index: usize,
    pub truncation: usize,
    pub method: String,
    pub u_max_true: f64,
    pub u_max_hat: Option<f64>,
    pub relative_error: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn cell(&self, spec_index: usize, truncation: usize, method: &str) -> Option<&BenchRow> {
        self.rows.iter().find(|r| {
            r.spec_index == spec_index && r.truncation == truncation && r.method == method
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub specs: Vec<GenSpec>,
    pub truncations: Vec<usize>,
}

/// Runs every estimator on the first `truncation` samples of every spec.
/// Failures are recorded in their cell.
pub fn benchmark_estimators(specs: &[GenSpec], truncations: &[usize]) -> BenchReport {
    let mut rows = Vec::new();
    for (spec_index, spec) in specs.iter().enumerate() {
        let full = generate(spec);
        let u_max_true = spec.params.u_max();
        for &truncation in truncations {
            for method in BENCH_METHODS {
                let outcome = if truncation > spec.n_points {
                    Err(Error::Domain(format!(
                        "truncation {truncation} exceeds {} points",
                        spec.n_points
                    )))
                } else {
                    run_method(method, &full.truncated(truncation))
                };
                let (u_max_hat, relative_error, error) = match outcome {
                    Ok(u) => (Some(u), Some((u - u_max_true).abs() / u_max_true), None),
                    Err(e) => (None, None, Some(e.to_string())),
                };
                rows.push(BenchRow {
                    spec_index,
                    truncation,
                    method: method.to_string(),
                    u_max_true,
                    u_max_hat,
                    relative_error,
                    error,
                });
            }
        }
    }
    BenchReport { rows }
}

fn run_method(method: &str, ts: &TimeSeries) -> Result<f64> {
    let policy = SelectionPolicy::FirstLocalMax;
    let mode = ConstantMode::Exact;
    match method {
        "scd" => estimate_scd(ts, mode, policy).map(|e| e.u_max_hat),
        "sld" => estimate_sld(ts, mode, policy).map(|e| e.u_max_hat),
        "polyfit" => polyfit_estimate(ts, 4, mode).map(|e| e.u_max_hat),
        "nlls" => fit_logistic_nlls(ts).map(|f| f.params.u_max()),
        other => Err(Error::Domain(format!("unknown benchmark method '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_curve() -> LogisticParams {
        LogisticParams::new(7.0, 17.0, 1.5).unwrap()
    }

    #[test]
    fn clean_generation() {
        let spec = GenSpec::new(reference_curve(), 5, 0.0, 1.0, 0.0, 99).unwrap();
        let ts = generate(&spec);
        assert!((ts.values()[0] - 7.0 / 18.0).abs() < 1e-15);
        for (i, &v) in ts.values().iter().enumerate() {
            assert_eq!(v, reference_curve().eval(i as f64));
        }
        assert_eq!(ts.kind(), SeriesKind::Cumulative);
        assert_eq!(ts.labels()[2], "2");
    }

    #[test]
    fn deterministic_noise() {
        let spec = GenSpec::new(reference_curve(), 50, 0.0, 0.2, 0.05, 42).unwrap();
        let a = generate(&spec);
        let b = generate(&spec);
        assert!(a
            .values()
            .iter()
            .zip(b.values())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
        let other = generate(&GenSpec {
            seed: 43,
            ..spec.clone()
        });
        assert_ne!(a.values(), other.values());
    }

    #[test]
    fn uniform_stream_pinned() {
        // frozen from the documented algorithm
        let first: Vec<f64> = (0..3).map(|i| uniform(42, i)).collect();
        assert!(first.iter().all(|u| *u > 0.0 && *u < 1.0));
        assert_eq!(splitmix64(0), 0);
        assert_eq!(splitmix64(GOLDEN_GAMMA), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn normal_quantiles() {
        assert_eq!(inverse_normal_cdf(0.5), 0.0);
        assert!((inverse_normal_cdf(0.975) - 1.959963984540054).abs() < 1e-8);
        assert!((inverse_normal_cdf(0.01) + 2.326347874040841).abs() < 1e-8);
        let n = 20_000;
        let draws: Vec<f64> = (0..n).map(|i| inverse_normal_cdf(uniform(7, i))).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.03);
        assert!((var - 1.0).abs() < 0.05);
    }

    #[test]
    fn spec_validation() {
        assert!(GenSpec::new(reference_curve(), 2, 0.0, 1.0, 0.0, 0).is_err());
        assert!(GenSpec::new(reference_curve(), 5, 0.0, 0.0, 0.0, 0).is_err());
        assert!(GenSpec::new(reference_curve(), 5, 0.0, 1.0, -1.0, 0).is_err());
    }

    #[test]
    fn empty_benchmark() {
        assert!(benchmark_estimators(&[], &[10, 20]).rows.is_empty());
    }

    #[test]
    fn benchmark_cells() {
        let lp = LogisticParams::new(1000.0, 200.0, 0.4).unwrap();
        let spec = GenSpec::clean(lp, 41, 0.0, 1.0).unwrap();
        let t2 = lp.characteristic_time(2).unwrap();
        let past_inflection = t2.ceil() as usize + 3;
        let report = benchmark_estimators(&[spec], &[6, past_inflection, 60]);
        assert_eq!(report.rows.len(), 3 * BENCH_METHODS.len());

        let early = report.cell(0, 6, "scd").unwrap();
        assert!(early
            .error
            .as_deref()
            .unwrap()
            .contains("no strict local maximum"));
        let late = report.cell(0, past_inflection, "scd").unwrap();
        assert!(late.relative_error.unwrap() < 0.05);
        assert!(report.cell(0, 60, "nlls").unwrap().error.is_some());
    }
}
