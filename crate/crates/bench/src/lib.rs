//! Inputs shared by the criterion benches.

use logistic_horizon::{generate, GenSpec, LogisticParams, TimeSeries};

/// Clean logistic series with `n` unit-spaced samples starting at 0.
pub fn clean_series(n: usize) -> TimeSeries {
    let params = LogisticParams::new(1000.0, 200.0, 0.4).expect("valid parameters");
    generate(&GenSpec::clean(params, n, 0.0, 1.0).expect("valid spec"))
}

/// Same curve with additive Gaussian noise of `sd`.
pub fn noisy_series(n: usize, sd: f64, seed: u64) -> TimeSeries {
    let params = LogisticParams::new(1000.0, 200.0, 0.4).expect("valid parameters");
    generate(&GenSpec::new(params, n, 0.0, 1.0, sd, seed).expect("valid spec"))
}
