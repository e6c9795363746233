//! Saturation-level estimation for time series with a logistic trend.
//!
//! The n-th time derivative of a logistic curve is a polynomial in the curve's
//! own value whose coefficients are Eulerian numbers. Its least positive root
//! `ρ_n` gives the fraction of the saturation level reached when that
//! derivative first vanishes: `ρ_2 = 1/2` at the inflection point and
//! `ρ_3 ≈ 0.2113` where the second derivative peaks. Locating the peak of a
//! discrete second difference in early data and dividing the observed level
//! there by `ρ_3` forecasts the saturation level long before the inflection is
//! visible.
//!
//! ```
//! use logistic_horizon::{estimate_scd, fixtures, ConstantMode, SelectionPolicy};
//!
//! let weekly_totals = fixtures::loyalty_tnlc_window();
//! let est = estimate_scd(&weekly_totals, ConstantMode::PaperRounded, SelectionPolicy::FirstLocalMax)?;
//! assert_eq!(est.u_max_hat.trunc(), 477_611.0);
//! # Ok::<(), logistic_horizon::Error>(())
//! ```

pub mod derivpoly;
pub mod error;
pub mod estimate;
pub mod eulerian;
pub mod fixtures;
pub mod logistic;
pub mod series;
pub mod synthetic;

pub use derivpoly::{
    build_poly, characteristic_level, eval_poly, logistic_nth_derivative, poly_roots,
    riccati_nth_derivative, DerivativePolynomial, RiccatiParams, MAX_DERIVATIVE_ORDER,
};
pub use error::{Error, Result};
pub use estimate::{
    estimate_scd, estimate_sld, fit_logistic_nlls, fit_logistic_nlls_at, fit_polynomial_lsm,
    higher_order_estimate, level_constant, nlls_estimate, polyfit_estimate, ConstantMode,
    Diagnostic, LogisticFit, Method, PolyFit, SaturationEstimate,
};
pub use eulerian::{
    count_ascents, eulerian_explicit, eulerian_number, eulerian_row, EulerianTriangle,
};
pub use fixtures::Fixture;
pub use logistic::{
    characteristic_time, level_crossing_time, logistic_eval, params_from_initial, LogisticParams,
};
pub use series::{
    central_diff, cumulate, find_characteristic_point, second_central_diff, second_diff,
    second_left_diff, CharacteristicPoint, DiffKind, DiffSeries, Rival, SelectionPolicy,
    SeriesKind, TimeSeries,
};
pub use synthetic::{benchmark_estimators, generate, BenchConfig, BenchReport, BenchRow, GenSpec};
