//! The logistic function `u(t) = u_max / (1 + a·e^{−ct})`.

use serde::{Deserialize, Serialize};

use crate::derivpoly::characteristic_level;
use crate::error::{Error, Result};

/// Parameters of a growing logistic curve.
///
/// `u0 = u_max / (1 + a)` is the value at `t = 0` and `c1 = c / u_max` is the
/// coefficient of `u' = c1·u·(u_max − u)`; both are derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct LogisticParams {
    u_max: f64,
    a: f64,
    c: f64,
}

#[derive(Deserialize)]
struct RawParams {
    u_max: f64,
    a: f64,
    c: f64,
}

impl TryFrom<RawParams> for LogisticParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Self::new(raw.u_max, raw.a, raw.c)
    }
}

impl LogisticParams {
    pub fn new(u_max: f64, a: f64, c: f64) -> Result<Self> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(u_max) || !positive(a) || !positive(c) {
            return Err(Error::Domain(format!(
                "logistic parameters must be finite and positive, got u_max={u_max}, a={a}, c={c}"
            )));
        }
        Ok(Self { u_max, a, c })
    }

    /// Parameters from the saturation level, the value at `t = 0`, and the rate.
    pub fn from_initial(u_max: f64, u0: f64, c: f64) -> Result<Self> {
        if !(u0 > 0.0 && u0 < u_max) {
            return Err(Error::Domain(format!(
                "initial value must lie in (0, {u_max}), got {u0}"
            )));
        }
        Self::new(u_max, (u_max - u0) / u0, c)
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn u0(&self) -> f64 {
        self.u_max / (1.0 + self.a)
    }

    pub fn c1(&self) -> f64 {
        self.c / self.u_max
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.u_max / (1.0 + self.a * (-self.c * t).exp())
    }

    /// The unique time at which the curve passes through `level`.
    pub fn level_crossing_time(&self, level: f64) -> Result<f64> {
        if !(level > 0.0 && level < self.u_max) {
            return Err(Error::Domain(format!(
                "level must lie in (0, {}), got {level}",
                self.u_max
            )));
        }
        Ok((self.a * level / (self.u_max - level)).ln() / self.c)
    }

    /// First time at which the n-th derivative vanishes (`n ≥ 2`).
    pub fn characteristic_time(&self, n: usize) -> Result<f64> {
        self.level_crossing_time(characteristic_level(n)? * self.u_max)
    }
}

pub fn logistic_eval(lp: &LogisticParams, t: f64) -> f64 {
    lp.eval(t)
}

pub fn params_from_initial(u_max: f64, u0: f64, c: f64) -> Result<LogisticParams> {
    LogisticParams::from_initial(u_max, u0, c)
}

pub fn level_crossing_time(lp: &LogisticParams, level: f64) -> Result<f64> {
    lp.level_crossing_time(level)
}

pub fn characteristic_time(lp: &LogisticParams, n: usize) -> Result<f64> {
    lp.characteristic_time(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivpoly::logistic_nth_derivative;

    fn reference_curve() -> LogisticParams {
        LogisticParams::new(7.0, 17.0, 1.5).unwrap()
    }

    #[test]
    fn evaluation() {
        assert!((reference_curve().eval(0.0) - 7.0 / 18.0).abs() < 1e-15);
        assert_eq!(LogisticParams::new(1.0, 1.0, 1.0).unwrap().eval(0.0), 0.5);
        assert!((reference_curve().eval(40.0) - 7.0).abs() < 1e-9);
    }

    #[test]
    fn from_initial() {
        assert!((params_from_initial(7.0, 7.0 / 18.0, 1.5).unwrap().a() - 17.0).abs() < 1e-12);
        assert_eq!(params_from_initial(1.0, 0.5, 1.0).unwrap().a(), 1.0);
        assert_eq!(params_from_initial(100.0, 1.0, 0.2).unwrap().a(), 99.0);
        let lp = params_from_initial(100.0, 1.0, 0.2).unwrap();
        assert!((lp.eval(0.0) - 1.0).abs() < 1e-12);
        assert!((lp.u0() - 1.0).abs() < 1e-12);
        assert!((lp.c1() - 0.002).abs() < 1e-15);
        for (u_max, u0, c) in [
            (1.0, 0.0, 1.0),
            (1.0, 1.0, 1.0),
            (1.0, 2.0, 1.0),
            (1.0, 0.5, 0.0),
            (1.0, 0.5, -1.0),
        ] {
            assert!(matches!(
                params_from_initial(u_max, u0, c),
                Err(Error::Domain(_))
            ));
        }
    }

    #[test]
    fn crossing_times() {
        let t = reference_curve().level_crossing_time(3.5).unwrap();
        assert!((t - 17f64.ln() / 1.5).abs() < 1e-12);
        assert_eq!(
            LogisticParams::new(1.0, 1.0, 1.0)
                .unwrap()
                .level_crossing_time(0.5)
                .unwrap(),
            0.0
        );
        assert!(reference_curve().level_crossing_time(0.0).is_err());
        assert!(reference_curve().level_crossing_time(7.0).is_err());
        for level in [0.01, 0.5, 3.0, 6.99] {
            let t = reference_curve().level_crossing_time(level).unwrap();
            assert!((reference_curve().eval(t) - level).abs() <= 1e-10 * level);
        }
    }

    #[test]
    fn crossing_at_third_derivative_zero() {
        // bisection oracle on the sign change of u''' around the ρ₃ level
        let lp = reference_curve();
        let f = |t: f64| logistic_nth_derivative(&lp, 3, t).unwrap();
        let (mut lo, mut hi) = (0.0, lp.level_crossing_time(3.5).unwrap());
        assert!(f(lo) > 0.0 && f(hi) < 0.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = lp
            .level_crossing_time(7.0 * (0.5 - 3f64.sqrt() / 6.0))
            .unwrap();
        assert!((t - lo).abs() < 1e-9);
    }

    #[test]
    fn characteristic_times() {
        assert_eq!(
            LogisticParams::new(1.0, 1.0, 1.0)
                .unwrap()
                .characteristic_time(2)
                .unwrap(),
            0.0
        );
        let lp = LogisticParams::new(1.0, 17.0, 1.5).unwrap();
        assert!((lp.characteristic_time(2).unwrap() - 17f64.ln() / 1.5).abs() < 1e-12);

        let lp = reference_curve();
        let t3 = lp.characteristic_time(3).unwrap();
        assert!((lp.eval(t3) - 7.0 * 0.2113248654).abs() < 1e-9);
        assert!((lp.eval(t3) - 1.4793).abs() < 1e-4);
        assert!(logistic_nth_derivative(&lp, 3, t3).unwrap().abs() < 1e-8);

        let t2 = lp.characteristic_time(2).unwrap();
        assert!((lp.eval(t2) / 3.5 - 1.0).abs() < 1e-12);

        let times: Vec<f64> = (2..=5)
            .map(|n| lp.characteristic_time(n).unwrap())
            .collect();
        assert!(times.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn satisfies_differential_equation() {
        let lp = reference_curve();
        let h = 1e-5;
        for i in 0..=150 {
            let t = -5.0 + 0.1 * i as f64;
            let u = lp.eval(t);
            assert!(u > 0.0 && u < 7.0);
            assert!(lp.eval(t + 0.1) > u);
            let numeric = (lp.eval(t + h) - lp.eval(t - h)) / (2.0 * h);
            let exact = lp.c1() * u * (lp.u_max() - u);
            assert!((numeric - exact).abs() <= 1e-6 * exact.abs(), "t={t}");
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(LogisticParams::new(0.0, 1.0, 1.0).is_err());
        assert!(LogisticParams::new(1.0, -1.0, 1.0).is_err());
        assert!(LogisticParams::new(1.0, 1.0, -0.5).is_err());
    }
}
