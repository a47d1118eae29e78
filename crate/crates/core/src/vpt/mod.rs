//! Variational resummation of the weak-coupling series.
//!
//! The harmonic frequency is traded for a variational parameter through
//! `w0 = Omega sqrt(1 + g r)`, `r = (w0^2 - Omega^2) / (g Omega^2)`; the
//! truncated series is re-expanded in `g` at fixed `r` and the free
//! parameter is fixed where the result is least sensitive to it.
//!
//! Every optimization condition is handled in `u = Omega^-2`: writing
//! `w(Omega) = u^(-1/2) R(u)` for a polynomial `R`, the `k`-th derivative
//! with respect to `Omega` is `Omega^(1-k)` times the polynomial
//! `sum_j r_j (1-2j)(-2j)...(2-2j-k) u^j`, so its positive zeros are
//! positive roots of an ordinary rational polynomial.

mod b0;
mod study;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_freq::omega_exact;
use crate::lindstedt::WeakSeries;
use crate::numerics::{positive_roots, BigReal, PolynomialR, Rational};

pub use b0::{b0_double_sum, b0_polynomial, b0_value, expected_b0_level, optimize_b0};
pub use study::{convergence_study, fit_orders, ConvergenceFit, ConvergenceStudy, PrecisionPolicy, StudyOrder};

/// Generalized binomial `alpha (alpha-1) ... (alpha-k+1) / k!`.
pub fn binomial(alpha: &Rational, k: usize) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k {
        let i = Rational::from_integer(BigInt::from(i));
        acc = acc * (alpha - &i) / (&i + Rational::one());
    }
    acc
}

/// Falling factorial `a (a-1) ... (a-k+1)`.
fn falling(a: i64, k: usize) -> Rational {
    (0..k as i64).fold(Rational::one(), |acc, i| acc * BigInt::from(a - i))
}

/// `w^(N)(g, Omega) = sum_n sum_{k <= N-n} c[n][k] Omega^(1-2n) (w0^2/Omega^2 - 1)^k g^n`
/// with `c[n][k] = w_n binom(1/2 - n, k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VariationalPolynomial {
    coeffs: Vec<Vec<Rational>>,
}

/// Re-expansion of the series truncated at order `order`.
pub fn reexpand(series: &WeakSeries, order: usize) -> Result<VariationalPolynomial> {
    series.check_order(order)?;
    let coeffs = (0..=order)
        .map(|n| {
            let alpha = Rational::new(BigInt::from(1 - 2 * n as i64), BigInt::from(2));
            (0..=order - n)
                .map(|k| series.w(n) * binomial(&alpha, k))
                .collect()
        })
        .collect();
    Ok(VariationalPolynomial { coeffs })
}

impl VariationalPolynomial {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `c[n][k]`
    pub fn coeff(&self, n: usize, k: usize) -> &Rational {
        &self.coeffs[n][k]
    }

    /// Monomial form: the key `(n, i)` holds the coefficient of
    /// `g^n w0^(2i) Omega^(1 - 2(n+i))`.
    pub fn expanded_terms(&self) -> BTreeMap<(usize, usize), Rational> {
        let mut out: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (n, row) in self.coeffs.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                // (w0^2/Omega^2 - 1)^k = sum_i binom(k, i) (-1)^(k-i) (w0^2/Omega^2)^i
                for i in 0..=k {
                    let mut term = c * binomial(&Rational::from_integer(BigInt::from(k)), i);
                    if (k - i) % 2 == 1 {
                        term = -term;
                    }
                    *out.entry((n, i)).or_insert_with(Rational::zero) += term;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// `R(u)` with `w^(N)(g, Omega) = u^(-1/2) R(u)`, `u = Omega^-2`.
    pub fn reduced(&self, g: &Rational, omega0: &Rational) -> PolynomialR {
        let w2 = omega0 * omega0;
        let mut r = vec![Rational::zero(); self.order() + 1];
        for ((n, i), c) in self.expanded_terms() {
            r[n + i] += c * pow(g, n) * pow(&w2, i);
        }
        PolynomialR::new(r)
    }

    /// Exact value at rational arguments.
    pub fn eval_exact(&self, g: &Rational, omega0: &Rational, omega: &Rational) -> Rational {
        let x = omega0 * omega0 / (omega * omega) - Rational::one();
        let inv2 = Rational::one() / (omega * omega);
        let mut total = Rational::zero();
        for (n, row) in self.coeffs.iter().enumerate() {
            let inner = row
                .iter()
                .rev()
                .fold(Rational::zero(), |acc, c| acc * &x + c);
            total += inner * omega * pow(&inv2, n) * pow(g, n);
        }
        total
    }

    pub fn eval(&self, g: &BigReal, omega0: &BigReal, omega: &BigReal) -> BigReal {
        let digits = g.digits().max(omega0.digits()).max(omega.digits());
        let x = omega0 * omega0 / (omega * omega) - BigReal::one(digits);
        let y = g / (omega * omega);
        let total = self
            .coeffs
            .iter()
            .rev()
            .fold(BigReal::zero(digits), |acc, row| {
                let inner = row
                    .iter()
                    .rev()
                    .fold(BigReal::zero(digits), |a, c| a * &x + BigReal::from_rational(c, digits));
                acc * &y + inner
            });
        total * omega
    }
}

fn pow(x: &Rational, n: usize) -> Rational {
    (0..n).fold(Rational::one(), |acc, _| acc * x)
}

/// `Omega^(k-1) d^k/dOmega^k [u^(-1/2) R(u)]` as a polynomial in `u`.
pub fn condition_polynomial(reduced: &PolynomialR, level: usize) -> PolynomialR {
    reduced.map_by_degree(|j| falling(1 - 2 * j as i64, level))
}

/// Optimum of a variational approximation `w(Omega) = u^(-1/2) R(u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VariationalRecord {
    pub order: usize,
    /// Optimal variational parameter.
    pub omega_opt: BigReal,
    /// Approximation at the optimum.
    pub value: BigReal,
    /// Order of the lowest derivative with a positive zero (1 = extremum).
    pub derivative_level: usize,
    /// Relative deviation from the exact value.
    pub rel_error: Option<BigReal>,
    /// Set when the optimum is not a clean simple zero at the expected level.
    pub flagged: bool,
    /// Number of positive zeros found at `derivative_level`.
    pub candidates: usize,
}

pub(crate) struct Optimum {
    pub level: usize,
    pub u: BigReal,
    pub flagged: bool,
    pub candidates: usize,
}

/// Lowest derivative level with a positive zero in `u = v * scale`, and the
/// zero whose `Omega = u^(-1/2)` lies closest to `seed`.
pub(crate) fn lowest_level_optimum(
    reduced: &PolynomialR,
    scale: &Rational,
    max_level: usize,
    seed: &BigReal,
    digits: u32,
    order: usize,
) -> Result<Optimum> {
    for level in 1..=max_level {
        let cond = condition_polynomial(reduced, level).scale_argument(scale);
        let roots = positive_roots(&cond, digits);
        if roots.is_empty() {
            continue;
        }
        let scale_real = BigReal::from_rational(scale, digits);
        let best = roots
            .iter()
            .map(|r| {
                let u = &r.value * &scale_real;
                let dist = (u.sqrt().recip() - seed).abs();
                (u, dist, r.is_flagged())
            })
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite distances"))
            .expect("non-empty");
        return Ok(Optimum {
            level,
            u: best.0,
            flagged: best.2,
            candidates: roots.len(),
        });
    }
    Err(Error::Optimization {
        order,
        reason: format!("no positive zero of any derivative up to level {max_level}"),
    })
}

/// Minimal-sensitivity optimum of `w^(N)(g, Omega)`.
///
/// Tries the first derivative, then the second, and so on up to `N`; among
/// the positive zeros at the first level that has any, takes the one
/// closest to `prev`, or without `prev` the one closest to the first-order
/// optimum `sqrt(w0^2 + 3g/4)`.
pub fn optimize_omega(
    poly: &VariationalPolynomial,
    g: &BigReal,
    omega0: &BigReal,
    prev: Option<&BigReal>,
) -> Result<VariationalRecord> {
    if g.is_negative() || !omega0.is_positive() {
        return Err(Error::Domain(format!(
            "need g >= 0 and omega0 > 0, got g = {g}, omega0 = {omega0}"
        )));
    }
    let digits = g.digits().max(omega0.digits());
    let order = poly.order();
    let exact = omega_exact(g, omega0)?.omega;

    // At g = 0 every order collapses to w0 and Omega = w0 is a zero of
    // even multiplicity of the first derivative.
    if g.is_zero() {
        let value = omega0.with_digits(digits);
        return Ok(VariationalRecord {
            order,
            omega_opt: value.clone(),
            rel_error: Some(value.rel_diff(&exact)),
            value,
            derivative_level: 1,
            flagged: false,
            candidates: 1,
        });
    }
    if order == 0 {
        return Err(Error::Optimization {
            order,
            reason: "the zeroth order is linear in Omega and has no stationary point".into(),
        });
    }

    let guard = digits + 2 * order as u32 + 10;
    let gq = g.to_rational();
    let w0q = omega0.to_rational();
    let reduced = poly.reduced(&gq, &w0q);
    let scale = Rational::one() / (&w0q * &w0q + &gq);
    let seed = match prev {
        Some(p) => p.with_digits(guard),
        None => {
            let w0 = omega0.with_digits(guard);
            (&w0 * &w0 + g.with_digits(guard) * BigReal::from_i64(3, guard) / BigReal::from_i64(4, guard))
                .sqrt()
        }
    };
    let opt = lowest_level_optimum(&reduced, &scale, order, &seed, guard, order)?;
    let value = reduced.eval_real(&opt.u) / opt.u.sqrt();
    let value = value.with_digits(digits);
    Ok(VariationalRecord {
        order,
        omega_opt: opt.u.sqrt().recip().with_digits(digits),
        rel_error: Some(value.rel_diff(&exact)),
        value,
        derivative_level: opt.level,
        flagged: opt.flagged,
        candidates: opt.candidates,
    })
}
