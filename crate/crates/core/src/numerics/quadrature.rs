//! Double-exponential (tanh–sinh) quadrature at arbitrary precision.
//!
//! The step is halved level by level until two successive estimates agree
//! to within the requested tolerance. Only used as an independent check of
//! closed-form and AGM based results.

use super::real::BigReal;
use crate::error::{Error, Result};

const MAX_LEVEL: u32 = 12;

/// Integral of `f` over `[a, b]` to within `tol` (estimated).
pub fn adaptive_quadrature<F>(f: F, a: &BigReal, b: &BigReal, tol: &BigReal) -> Result<BigReal>
where
    F: Fn(&BigReal) -> BigReal,
{
    let digits = a.digits().max(b.digits()).max(tol.digits());
    let two = BigReal::from_i64(2, digits);
    let center = (a + b) / &two;
    let half_width = (b - a) / &two;
    let half_pi = BigReal::pi(digits) / &two;

    // Nodes beyond t_max carry weights below 10^-digits.
    let t_max = (2.0 * f64::from(digits) * std::f64::consts::LN_10 / std::f64::consts::PI).ln() + 1.0;

    // Weighted integrand at abscissa t, on both sides of the center.
    let node = |t: &BigReal| -> BigReal {
        let u = &half_pi * t.sinh();
        let ch = u.cosh();
        let th = u.sinh() / &ch;
        let weight = &half_pi * t.cosh() / (&ch * &ch);
        let offset = &half_width * &th;
        let left = f(&(&center - &offset));
        let right = f(&(&center + &offset));
        weight * (left + right)
    };

    let mut h = BigReal::from_i64(1, digits);
    let mut sum = &half_pi * f(&center);
    let mut k = 1i64;
    while (k as f64) <= t_max {
        sum = sum + node(&BigReal::from_i64(k, digits));
        k += 1;
    }
    let mut estimate = &half_width * &h * &sum;

    for level in 1..=MAX_LEVEL {
        h = &h / &two;
        // New nodes sit at odd multiples of the halved step.
        let steps = (t_max * f64::from(1u32 << level)).ceil() as i64;
        let mut j = 1i64;
        while j <= steps {
            let t = &h * BigReal::from_i64(j, digits);
            sum = sum + node(&t);
            j += 2;
        }
        let next = &half_width * &h * &sum;
        let change = (&next - &estimate).abs();
        estimate = next;
        if level >= 3 && change <= *tol {
            return Ok(estimate);
        }
    }
    Err(Error::Integration(format!(
        "quadrature did not reach tolerance {} within {MAX_LEVEL} levels",
        tol.to_decimal(3)
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrand() {
        let digits = 40;
        let a = BigReal::zero(digits);
        let b = BigReal::pi(digits) / BigReal::from_i64(2, digits);
        let tol = BigReal::parse("1e-35", digits).unwrap();
        let v = adaptive_quadrature(|_| BigReal::one(digits), &a, &b, &tol).unwrap();
        assert!((&v - &b).abs() < BigReal::parse("1e-34", digits).unwrap());
    }

    #[test]
    fn polynomial_integrand() {
        // integral of x^3 over [0, 2] = 4
        let digits = 30;
        let tol = BigReal::parse("1e-25", digits).unwrap();
        let v = adaptive_quadrature(
            |x| x.powi(3),
            &BigReal::zero(digits),
            &BigReal::from_i64(2, digits),
            &tol,
        )
        .unwrap();
        assert!((&v - BigReal::from_i64(4, digits)).abs() < BigReal::parse("1e-24", digits).unwrap());
    }
}
