//! Derivative polynomials of Riccati solutions.
//!
//! If `u' = r(u − u1)(u − u2)` then every time derivative of `u` is a
//! polynomial in `u` whose coefficients are Eulerian numbers:
//!
//! ```text
//! u^(n) = r^n Σ_{k=0}^{n−1} ⟨n,k⟩ (u − u1)^{k+1} (u − u2)^{n−k}
//! ```
//!
//! For the normalised logistic case (`u1 = 0`, `u2 = 1`, `r = −1`) this is
//! `P_{n+1}(u) = (−1)^n Σ_k ⟨n,k⟩ u^{k+1} (u − 1)^{n−k}`. Its roots are simple,
//! lie in `[0, 1]`, and the least positive one, `ρ_n`, is the fraction of the
//! saturation level at which the n-th derivative of the logistic curve first
//! vanishes.

use crate::error::{Error, Result};
use crate::eulerian::{binomial, eulerian_row};
use crate::logistic::LogisticParams;

/// Largest derivative order accepted by [`build_poly`] and [`poly_roots`].
pub const MAX_DERIVATIVE_ORDER: usize = 25;

/// Coefficients of the Riccati right-hand side `r(u − u1)(u − u2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiParams {
    r: f64,
    u1: f64,
    u2: f64,
}

impl RiccatiParams {
    /// Real, distinct roots only.
    pub fn new(r: f64, u1: f64, u2: f64) -> Result<Self> {
        if r == 0.0 || !r.is_finite() {
            return Err(Error::Domain(format!(
                "Riccati coefficient r must be finite and non-zero, got {r}"
            )));
        }
        if !u1.is_finite() || !u2.is_finite() || u1 == u2 {
            return Err(Error::Domain(format!(
                "Riccati roots must be finite and distinct, got {u1}, {u2}"
            )));
        }
        Ok(Self { r, u1, u2 })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn u1(&self) -> f64 {
        self.u1
    }

    pub fn u2(&self) -> f64 {
        self.u2
    }
}

/// `P_{n+1}(u)` in both exact monomial form and Eulerian factored form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivativePolynomial {
    deriv_order: usize,
    coeffs: Vec<i128>,
    eulerian_row: Vec<u128>,
}

impl DerivativePolynomial {
    pub fn deriv_order(&self) -> usize {
        self.deriv_order
    }

    pub fn poly_order(&self) -> usize {
        self.deriv_order + 1
    }

    /// Ascending monomial coefficients `c_0 … c_{n+1}`.
    pub fn monomial_coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    /// `⟨n,0⟩ … ⟨n,n⟩`, the weights of the factored form.
    pub fn eulerian_row(&self) -> &[u128] {
        &self.eulerian_row
    }

    /// Value from the factored Eulerian sum.
    pub fn eval(&self, u: f64) -> f64 {
        let n = self.deriv_order;
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * eulerian_sum(&self.weights(), u, u - 1.0)
    }

    /// Value from the expanded monomial form (Horner). Loses accuracy near
    /// `u = 1/2` for large orders; kept for cross-checks.
    pub fn eval_monomial(&self, u: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * u + c as f64)
    }

    /// Exact monomial coefficients of `P'_{n+1}(u)`.
    pub fn derivative_coeffs(&self) -> Vec<i128> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as i128)
            .collect()
    }

    fn weights(&self) -> Vec<f64> {
        weights(&self.eulerian_row, self.deriv_order)
    }
}

/// Eulerian row `n` as floats, without the trailing zero.
fn weights(row: &[u128], n: usize) -> Vec<f64> {
    row[..n].iter().map(|&e| e as f64).collect()
}

/// `Σ_{k=0}^{m} w_k a^k b^{m−k}` by homogeneous Horner, `m = w.len() − 1`.
fn homogeneous_sum(w: &[f64], a: f64, b: f64) -> f64 {
    let mut iter = w.iter().rev();
    let Some(&first) = iter.next() else {
        return 0.0;
    };
    let mut acc = first;
    let mut b_pow = 1.0;
    for &wk in iter {
        b_pow *= b;
        acc = acc * a + wk * b_pow;
    }
    acc
}

/// `Σ_{k=0}^{n−1} w_k a^{k+1} b^{n−k}` where `n = w.len()`.
fn eulerian_sum(w: &[f64], a: f64, b: f64) -> f64 {
    a * b * homogeneous_sum(w, a, b)
}

fn check_order(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::Domain(format!(
            "derivative order must be at least {min}, got {n}"
        )));
    }
    if n > MAX_DERIVATIVE_ORDER {
        return Err(Error::ArithmeticRange(format!(
            "derivative order {n} exceeds the supported maximum {MAX_DERIVATIVE_ORDER}"
        )));
    }
    Ok(())
}

/// Builds `P_{n+1}` for derivative order `n ≥ 1`.
pub fn build_poly(n: usize) -> Result<DerivativePolynomial> {
    check_order(n, 1)?;
    let row = eulerian_row(n)?;
    let range = || Error::ArithmeticRange(format!("coefficients of P_{} exceed i128", n + 1));

    let mut coeffs = vec![0i128; n + 2];
    for (k, &e) in row[..n].iter().enumerate() {
        let e = i128::try_from(e).map_err(|_| range())?;
        // u^{k+1} (u − 1)^{n−k} = Σ_j C(n−k, j) (−1)^{n−k−j} u^{k+1+j}
        let m = n - k;
        for j in 0..=m {
            let mut term = e.checked_mul(binomial(m, j)?).ok_or_else(range)?;
            if (m - j) % 2 == 1 {
                term = -term;
            }
            let slot = &mut coeffs[k + 1 + j];
            *slot = slot.checked_add(term).ok_or_else(range)?;
        }
    }
    if n % 2 == 1 {
        for c in &mut coeffs {
            *c = -*c;
        }
    }
    Ok(DerivativePolynomial {
        deriv_order: n,
        coeffs,
        eulerian_row: row,
    })
}

pub fn eval_poly(p: &DerivativePolynomial, u: f64) -> f64 {
    p.eval(u)
}

/// `u^(n)` for a solution of `u' = r(u − u1)(u − u2)`, as a function of the
/// current value `u`.
pub fn riccati_nth_derivative(params: &RiccatiParams, n: usize, u: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("derivative order must be at least 1".into()));
    }
    let row = eulerian_row(n)?;
    let exp = i32::try_from(n).map_err(|_| Error::ArithmeticRange(format!("order {n}")))?;
    let sum = eulerian_sum(&weights(&row, n), u - params.u1, u - params.u2);
    Ok(params.r.powi(exp) * sum)
}

/// `u^(n)(t)` of the logistic curve, evaluated through its derivative
/// polynomial at `u = u(t)`.
pub fn logistic_nth_derivative(lp: &LogisticParams, n: usize, t: f64) -> Result<f64> {
    let u = lp.eval(t);
    if n == 1 {
        return Ok(lp.c() / lp.u_max() * u * (lp.u_max() - u));
    }
    let params = RiccatiParams::new(-lp.c() / lp.u_max(), 0.0, lp.u_max())?;
    riccati_nth_derivative(&params, n, u)
}

/// All `n + 1` roots of `P_{n+1}` in ascending order.
///
/// `P_{n+2} = P'_{n+1} · P_2`, so the roots of `P_{n+2}` are `0`, `1` and the
/// critical points of `P_{n+1}`. By Rolle each critical point sits alone
/// between two consecutive roots of `P_{n+1}`, and bisection there cannot
/// miss.
pub fn poly_roots(n: usize) -> Result<Vec<f64>> {
    check_order(n, 1)?;
    let mut roots = vec![0.0, 1.0];
    for m in 1..n {
        // P'_{m+1}(u) = (−1)^m Σ_{k=0}^{m} ⟨m+1,k⟩ u^k (u−1)^{m−k}; the sign is
        // irrelevant for bisection.
        let w = weights(&eulerian_row(m + 1)?, m + 1);
        let slope = |u: f64| homogeneous_sum(&w, u, u - 1.0);
        let mut next = Vec::with_capacity(roots.len() + 1);
        next.push(0.0);
        for pair in roots.windows(2) {
            next.push(bisect(slope, pair[0], pair[1], m + 2)?);
        }
        next.push(1.0);
        roots = next;
    }
    Ok(roots)
}

/// Bisects to full double precision. Requires a strict sign change.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, poly_order: usize) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::InternalConsistency(format!(
            "no sign change of P'_{} on [{lo}, {hi}]",
            poly_order - 1
        )));
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
}

/// `ρ_n`, the least positive root of `P_{n+1}`: the fraction of the
/// saturation level at which the n-th derivative of the logistic curve first
/// vanishes. `ρ_2 = 1/2` (inflection), `ρ_3 ≈ 0.2113`.
pub fn characteristic_level(n: usize) -> Result<f64> {
    check_order(n, 2)?;
    Ok(poly_roots(n)?[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eulerian::eulerian_number;
    use proptest::prelude::*;

    fn closed_form_levels() -> [(usize, f64); 4] {
        [
            (2, 0.5),
            (3, 0.5 - 3f64.sqrt() / 6.0),
            (4, 0.5 - 6f64.sqrt() / 6.0),
            (5, 0.5 - (30.0 * (15.0 + 105f64.sqrt())).sqrt() / 60.0),
        ]
    }

    fn mul(a: &[i128], b: &[i128]) -> Vec<i128> {
        let mut out = vec![0i128; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    fn factorial(n: usize) -> i128 {
        (1..=n as i128).product()
    }

    #[test]
    fn low_order_coefficients() {
        assert_eq!(build_poly(1).unwrap().monomial_coeffs(), &[0, 1, -1]);
        assert_eq!(build_poly(2).unwrap().monomial_coeffs(), &[0, 1, -3, 2]);
        // −6u(u−1)(u² − u + 1/6) expanded by hand
        assert_eq!(
            build_poly(3).unwrap().monomial_coeffs(),
            &[0, 1, -7, 12, -6]
        );
        let p = build_poly(3).unwrap();
        assert_eq!(p.poly_order(), 4);
        assert_eq!(p.eulerian_row(), &[1, 4, 1, 0]);
    }

    #[test]
    fn order_bounds() {
        assert!(matches!(build_poly(0), Err(Error::Domain(_))));
        assert!(matches!(
            build_poly(MAX_DERIVATIVE_ORDER + 1),
            Err(Error::ArithmeticRange(_))
        ));
        assert!(build_poly(MAX_DERIVATIVE_ORDER).is_ok());
        assert!(matches!(characteristic_level(1), Err(Error::Domain(_))));
    }

    #[test]
    fn structural_coefficients() {
        for n in 1..=MAX_DERIVATIVE_ORDER {
            let p = build_poly(n).unwrap();
            let c = p.monomial_coeffs();
            assert_eq!(c[0], 0);
            assert_eq!(c.iter().sum::<i128>(), 0);
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(*c.last().unwrap(), sign * factorial(n), "n = {n}");
        }
    }

    #[test]
    fn chain_rule_identity() {
        let p2 = build_poly(1).unwrap();
        for n in 1..=12 {
            let lhs = build_poly(n + 1).unwrap();
            let rhs = mul(
                &build_poly(n).unwrap().derivative_coeffs(),
                p2.monomial_coeffs(),
            );
            assert_eq!(lhs.monomial_coeffs(), rhs.as_slice(), "n = {n}");
        }
    }

    #[test]
    fn evaluation_examples() {
        let p3 = build_poly(2).unwrap();
        let p4 = build_poly(3).unwrap();
        assert_eq!(eval_poly(&p3, 0.5), 0.0);
        assert_eq!(eval_poly(&p4, 0.0), 0.0);
        // −6 · (0.5)(−0.5)(−√3/6)(√3/6) = −6 · (−0.25) · (−1/12)
        let oracle = -6.0 * 0.5 * -0.5 * (-(3f64.sqrt()) / 6.0) * (3f64.sqrt() / 6.0);
        assert!((eval_poly(&p4, 0.5) - oracle).abs() < 1e-15);
        assert!((eval_poly(&p4, 0.5) - (-0.125)).abs() < 1e-15);
    }

    #[test]
    fn factored_matches_monomial() {
        for n in 1..=10 {
            let p = build_poly(n).unwrap();
            for i in 0..=50 {
                let u = i as f64 / 50.0;
                let scale = factorial(n) as f64;
                assert!(
                    (p.eval(u) - p.eval_monomial(u)).abs() <= 1e-12 * scale,
                    "n={n} u={u}"
                );
            }
        }
    }

    #[test]
    fn riccati_examples() {
        let unit = RiccatiParams::new(1.0, 0.0, 1.0).unwrap();
        assert_eq!(riccati_nth_derivative(&unit, 2, 0.0).unwrap(), 0.0);
        let flipped = RiccatiParams::new(-1.0, 0.0, 1.0).unwrap();
        assert_eq!(riccati_nth_derivative(&flipped, 2, 0.5).unwrap(), 0.0);
        // 1·(−8) + 4·4 + 1·(−2)
        let shifted = RiccatiParams::new(1.0, 2.0, 5.0).unwrap();
        let direct: f64 = (0..3)
            .map(|k| {
                eulerian_number(3, k).unwrap() as f64
                    * 1f64.powi(k as i32 + 1)
                    * (-2f64).powi(3 - k as i32)
            })
            .sum();
        assert_eq!(direct, 6.0);
        assert!((riccati_nth_derivative(&shifted, 3, 3.0).unwrap() - 6.0).abs() < 1e-12);
        assert!(riccati_nth_derivative(&shifted, 0, 3.0).is_err());
    }

    #[test]
    fn riccati_params_validation() {
        assert!(RiccatiParams::new(0.0, 0.0, 1.0).is_err());
        assert!(RiccatiParams::new(1.0, 2.0, 2.0).is_err());
        assert!(RiccatiParams::new(f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn logistic_derivative_examples() {
        let lp = LogisticParams::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(logistic_nth_derivative(&lp, 2, 0.0).unwrap(), 0.0);
        assert_eq!(logistic_nth_derivative(&lp, 1, 0.0).unwrap(), 0.25);
    }

    #[test]
    fn root_examples() {
        assert_eq!(poly_roots(1).unwrap(), vec![0.0, 1.0]);
        assert_eq!(poly_roots(2).unwrap(), vec![0.0, 0.5, 1.0]);
        let r3 = poly_roots(3).unwrap();
        let expected = [0.0, 0.5 - 3f64.sqrt() / 6.0, 0.5 + 3f64.sqrt() / 6.0, 1.0];
        for (a, b) in r3.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let r5 = poly_roots(5).unwrap();
        assert_eq!(r5.len(), 6);
        assert!((r5[1] - 0.041316).abs() < 1e-6);
    }

    #[test]
    fn closed_form_levels_match() {
        for (n, exact) in closed_form_levels() {
            assert!(
                (characteristic_level(n).unwrap() - exact).abs() < 1e-12,
                "n = {n}"
            );
        }
        assert_eq!(characteristic_level(2).unwrap(), 0.5);
    }

    #[test]
    fn roots_are_roots_and_simple() {
        for n in 1..=MAX_DERIVATIVE_ORDER {
            let p = build_poly(n).unwrap();
            let roots = poly_roots(n).unwrap();
            assert_eq!(roots.len(), n + 1);
            let scale = factorial(n) as f64;
            for &r in &roots {
                assert!(p.eval(r).abs() <= 1e-12 * scale, "n={n} root={r}");
            }
            if n <= 10 {
                for w in roots.windows(2) {
                    assert!(w[1] - w[0] > 1e-10);
                }
                let dp = DerivativePolynomial {
                    deriv_order: n,
                    coeffs: p.derivative_coeffs(),
                    eulerian_row: vec![],
                };
                for &r in &roots {
                    assert!(
                        dp.eval_monomial(r).abs() > 1e-6,
                        "n={n} root={r} not simple"
                    );
                }
            }
        }
    }

    #[test]
    fn levels_decrease() {
        let levels: Vec<f64> = (2..=MAX_DERIVATIVE_ORDER)
            .map(|n| characteristic_level(n).unwrap())
            .collect();
        assert!(levels.windows(2).all(|w| w[1] < w[0]));
        assert!(levels.iter().all(|&l| l > 0.0 && l <= 0.5));
    }

    proptest! {
        #[test]
        fn reflection_symmetry(m in 2usize..=13, x in -0.5f64..=0.5) {
            let p = build_poly(m - 1).unwrap();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let scale = factorial(m - 1) as f64;
            prop_assert!((p.eval(0.5 + x) - sign * p.eval(0.5 - x)).abs() <= 1e-10 * scale);
        }
    }
}
