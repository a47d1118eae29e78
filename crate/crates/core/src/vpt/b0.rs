//! Variational approximations `b0^(N)` of the leading strong-coupling
//! coefficient.
//!
//! With `Omega = sqrt(g) Omega0` and `g -> infinity`, the re-expanded
//! approximation tends to `sqrt(g) b0^(N)(Omega0)` where
//! `b0^(N)(Omega0) = sum_n d_n Omega0^(1-2n)`. The inner sum over the
//! binomial index collapses to
//! `d_n = (-1)^(N-n) binom(-1/2 - n, N - n) w_n`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{binomial, lowest_level_optimum, VariationalRecord};
use crate::error::{Error, Result};
use crate::exact_freq::b0_exact;
use crate::lindstedt::WeakSeries;
use crate::numerics::{BigReal, PolynomialR, Rational};

/// `d_0..d_N` in closed form.
pub fn b0_polynomial(series: &WeakSeries, order: usize) -> Result<Vec<Rational>> {
    series.check_order(order)?;
    Ok((0..=order)
        .map(|n| {
            let alpha = Rational::new(BigInt::from(-1 - 2 * n as i64), BigInt::from(2));
            let mut d = binomial(&alpha, order - n) * series.w(n);
            if (order - n) % 2 == 1 {
                d = -d;
            }
            d
        })
        .collect())
}

/// `d_0..d_N` from the unsummed form `w_n sum_{k <= N-n} binom(1/2 - n, k) (-1)^k`.
pub fn b0_double_sum(series: &WeakSeries, order: usize) -> Result<Vec<Rational>> {
    series.check_order(order)?;
    Ok((0..=order)
        .map(|n| {
            let alpha = Rational::new(BigInt::from(1 - 2 * n as i64), BigInt::from(2));
            let sum = (0..=order - n).fold(Rational::zero(), |acc, k| {
                let b = binomial(&alpha, k);
                if k % 2 == 1 {
                    acc - b
                } else {
                    acc + b
                }
            });
            sum * series.w(n)
        })
        .collect())
}

/// `b0^(N)(Omega0) = sum_n d_n Omega0^(1-2n)`
pub fn b0_value(d: &[Rational], omega0_var: &BigReal) -> BigReal {
    let digits = omega0_var.digits();
    let u = (omega0_var * omega0_var).recip();
    let sum = d
        .iter()
        .rev()
        .fold(BigReal::zero(digits), |acc, c| acc * &u + BigReal::from_rational(c, digits));
    sum * omega0_var
}

/// Odd orders have an extremum, even orders a turning point.
pub fn expected_b0_level(order: usize) -> usize {
    if order % 2 == 1 {
        1
    } else {
        2
    }
}

/// Minimal-sensitivity value of `b0^(N)(Omega0)`.
///
/// Positive roots of the derivative conditions in `u = Omega0^-2` are
/// isolated exactly and refined to `digits`. The lowest level with a root
/// is used; the record is flagged when that level differs from
/// [`expected_b0_level`] or the chosen root has even multiplicity. Among
/// several roots the one closest to `prev` wins, or without `prev` the one
/// closest to the first-order optimum `sqrt(3)/2`.
pub fn optimize_b0(
    series: &WeakSeries,
    order: usize,
    prev: Option<&BigReal>,
    digits: u32,
) -> Result<VariationalRecord> {
    if order == 0 {
        return Err(Error::Usage("the strong-coupling limit needs order >= 1".into()));
    }
    let d = b0_polynomial(series, order)?;
    let reduced = PolynomialR::new(d.clone());
    let seed = match prev {
        Some(p) => p.with_digits(digits),
        None => BigReal::from_i64(3, digits).sqrt() / BigReal::from_i64(2, digits),
    };
    let opt = lowest_level_optimum(&reduced, &Rational::one(), order, &seed, digits, order)?;
    let omega_opt = opt.u.sqrt().recip();
    let value = reduced.eval_real(&opt.u) * &omega_opt;
    let rel_error = value.rel_diff(&b0_exact(digits));
    Ok(VariationalRecord {
        order,
        omega_opt,
        value,
        derivative_level: opt.level,
        rel_error: Some(rel_error),
        flagged: opt.flagged || opt.level != expected_b0_level(order),
        candidates: opt.candidates,
    })
}
