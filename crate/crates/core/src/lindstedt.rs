//! Poincaré–Lindstedt recursion for the Duffing oscillator.
//!
//! With `xi = w t` and `q(xi) = x(xi / w)`, the rescaled problem
//! `w^2 q'' + w0^2 q + g q^3 = 0` is expanded as `w = w0 sum w_n eps^n`,
//! `q = sum q_n eps^n`, `eps = g / w0^2`. Order `n` gives
//! `q_n'' + q_n = f_n` with `q_n(0) = q_n'(0) = 0`; the `cos xi` component
//! of `f_n` must vanish, which fixes `w_n`. Everything runs at `w0 = 1` in
//! exact rationals; dimensions come back only in
//! [`WeakSeries::frequency_partial_sum`].

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{parse_rational, rational_to_string, BigReal, Rational};
use crate::trig_series::TrigPoly;

/// Weak-coupling coefficients `w_0..w_N` of the frequency together with the
/// solution coefficients `q_0..q_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeakSeries {
    omega_coeffs: Vec<Rational>,
    solution_coeffs: Vec<TrigPoly>,
}

/// `f_n = known + w_n * multiplier`, with the single unknown `w_n` split off.
#[derive(Clone, Debug, PartialEq)]
pub struct Inhomogeneity {
    pub known: TrigPoly,
    pub multiplier: TrigPoly,
}

impl Inhomogeneity {
    pub fn with_omega(&self, w_n: &Rational) -> TrigPoly {
        let mut f = self.known.clone();
        f.add_scaled(&self.multiplier, w_n);
        f
    }
}

/// Everything the recursion needs to produce the next order.
#[derive(Clone, Debug)]
pub struct RecursionState {
    omega: Vec<Rational>,
    solution: Vec<TrigPoly>,
    second_derivs: Vec<TrigPoly>,
    // pair_products[k] = sum_{m + l = k} q_m q_l
    pair_products: Vec<TrigPoly>,
}

impl Default for RecursionState {
    fn default() -> Self {
        Self::new()
    }
}

impl RecursionState {
    /// Order zero: `w_0 = 1`, `q_0 = cos xi`.
    pub fn new() -> Self {
        let q0 = TrigPoly::cos(1);
        RecursionState {
            omega: vec![Rational::one()],
            second_derivs: vec![q0.second_derivative()],
            pair_products: vec![&q0 * &q0],
            solution: vec![q0],
        }
    }

    /// The order the next call to [`solve_order`](Self::solve_order) produces.
    pub fn next_order(&self) -> usize {
        self.omega.len()
    }

    pub fn series(&self) -> WeakSeries {
        WeakSeries {
            omega_coeffs: self.omega.clone(),
            solution_coeffs: self.solution.clone(),
        }
    }

    pub fn into_series(self) -> WeakSeries {
        WeakSeries {
            omega_coeffs: self.omega,
            solution_coeffs: self.solution,
        }
    }

    /// Inhomogeneity of the next order `n`:
    ///
    /// `f_n = -2 w_n q_0'' - 2 sum_{l=1}^{n-1} w_l q_{n-l}''
    ///        - sum_{m=1}^{n-1} sum_{l=1}^{n-m} w_m w_l q_{n-m-l}''
    ///        - sum_{m+l+j = n-1} q_m q_l q_j`
    pub fn inhomogeneity(&self) -> Inhomogeneity {
        let n = self.next_order();
        let w = &self.omega;
        let mut known = TrigPoly::zero();

        for (l, w_l) in w.iter().enumerate().take(n).skip(1) {
            known.add_scaled(&self.second_derivs[n - l], &(w_l * BigInt::from(-2)));
        }
        // Double sum grouped by j = m + l; every w involved has index < n.
        for j in 2..=n {
            let s = (1..j).fold(Rational::zero(), |acc, m| acc + &w[m] * &w[j - m]);
            known.add_scaled(&self.second_derivs[n - j], &-s);
        }
        let minus_one = -Rational::one();
        for k in 0..n {
            let cubic = &self.pair_products[k] * &self.solution[n - 1 - k];
            known.add_scaled(&cubic, &minus_one);
        }

        Inhomogeneity {
            known,
            multiplier: self.second_derivs[0].scale(&Rational::from_integer(BigInt::from(-2))),
        }
    }

    /// Solves the next order: `w_n` from the secular condition, then `q_n`
    /// with `q_n(0) = q_n'(0) = 0`. Does not advance the state.
    pub fn solve_order(&self) -> Result<(Rational, TrigPoly)> {
        let n = self.next_order();
        let inh = self.inhomogeneity();
        let m1 = inh.multiplier.coefficient(1);
        if m1.is_zero() {
            return Err(Error::Invariant(format!(
                "order {n}: cos(xi) multiplier of w_n vanishes"
            )));
        }
        let w_n = -inh.known.coefficient(1) / m1;
        let f = inh.with_omega(&w_n);
        if !f.coefficient(1).is_zero() {
            return Err(Error::Invariant(format!("order {n}: secular term survives")));
        }

        // Particular solution c/(1 - k^2) cos(k xi) for each harmonic k != 1,
        // plus the homogeneous cos(xi) that makes q_n(0) = 0.
        let mut q = TrigPoly::zero();
        let mut at_zero = Rational::zero();
        for (k, c) in f.terms() {
            let k2 = BigInt::from(u64::from(k) * u64::from(k));
            let a = c / Rational::from_integer(BigInt::one() - k2);
            at_zero += &a;
            q.add_term(k, a);
        }
        q.add_term(1, -at_zero);

        if !q.value_at_zero().is_zero() {
            return Err(Error::Invariant(format!("order {n}: q_n(0) != 0")));
        }
        if &q.second_derivative() + &q != f {
            return Err(Error::Invariant(format!("order {n}: q_n'' + q_n != f_n")));
        }
        Ok((w_n, q))
    }

    /// Solves the next order and appends it.
    pub fn advance(&mut self) -> Result<()> {
        let (w_n, q_n) = self.solve_order()?;
        self.omega.push(w_n);
        self.second_derivs.push(q_n.second_derivative());
        self.solution.push(q_n);

        let n = self.solution.len() - 1;
        // Symmetric convolution: each unordered pair once.
        let mut pair = TrigPoly::zero();
        let two = Rational::from_integer(BigInt::from(2));
        for m in 0..=n / 2 {
            let l = n - m;
            let prod = &self.solution[m] * &self.solution[l];
            if m == l {
                pair.add_scaled(&prod, &Rational::one());
            } else {
                pair.add_scaled(&prod, &two);
            }
        }
        self.pair_products.push(pair);
        Ok(())
    }
}

/// Weak-coupling series through order `order`.
pub fn weak_series(order: usize) -> WeakSeries {
    let mut state = RecursionState::new();
    for _ in 0..order {
        state
            .advance()
            .expect("Lindstedt recursion postconditions hold for the Duffing system");
    }
    state.into_series()
}

#[derive(Serialize, Deserialize)]
struct HarmonicEntry {
    k: u32,
    c: String,
}

#[derive(Serialize, Deserialize)]
struct OrderEntry {
    n: usize,
    w: String,
    q: Vec<HarmonicEntry>,
}

impl WeakSeries {
    pub fn from_parts(omega_coeffs: Vec<Rational>, solution_coeffs: Vec<TrigPoly>) -> Result<Self> {
        if omega_coeffs.is_empty() || omega_coeffs.len() != solution_coeffs.len() {
            return Err(Error::Usage(
                "weak series needs matching, non-empty coefficient lists".into(),
            ));
        }
        Ok(WeakSeries {
            omega_coeffs,
            solution_coeffs,
        })
    }

    /// Highest order `N` held.
    pub fn order(&self) -> usize {
        self.omega_coeffs.len() - 1
    }

    pub fn omega_coeffs(&self) -> &[Rational] {
        &self.omega_coeffs
    }

    pub fn solution_coeffs(&self) -> &[TrigPoly] {
        &self.solution_coeffs
    }

    pub fn w(&self, n: usize) -> &Rational {
        &self.omega_coeffs[n]
    }

    pub fn q(&self, n: usize) -> &TrigPoly {
        &self.solution_coeffs[n]
    }

    /// The first `order + 1` coefficients.
    pub fn truncated(&self, order: usize) -> Result<WeakSeries> {
        self.check_order(order)?;
        Ok(WeakSeries {
            omega_coeffs: self.omega_coeffs[..=order].to_vec(),
            solution_coeffs: self.solution_coeffs[..=order].to_vec(),
        })
    }

    pub fn check_order(&self, order: usize) -> Result<()> {
        if order > self.order() {
            return Err(Error::Usage(format!(
                "order {order} requested but the series only reaches {}",
                self.order()
            )));
        }
        Ok(())
    }

    /// `sum_{n=0}^{order} w_n w0^(1-2n) g^n`
    pub fn frequency_partial_sum(
        &self,
        order: usize,
        g: &BigReal,
        omega0: &BigReal,
    ) -> Result<BigReal> {
        self.check_order(order)?;
        if !omega0.is_positive() {
            return Err(Error::Domain("omega0 must be positive".into()));
        }
        let digits = g.digits().max(omega0.digits());
        let x = g / (omega0 * omega0);
        let sum = self.omega_coeffs[..=order]
            .iter()
            .rev()
            .fold(BigReal::zero(digits), |acc, w| {
                acc * &x + BigReal::from_rational(w, digits)
            });
        Ok(sum * omega0)
    }

    /// JSON array of `{"n", "w", "q": [{"k", "c"}]}` with `num/den` strings.
    pub fn to_json(&self) -> String {
        let entries: Vec<OrderEntry> = self
            .omega_coeffs
            .iter()
            .zip(&self.solution_coeffs)
            .enumerate()
            .map(|(n, (w, q))| OrderEntry {
                n,
                w: rational_to_string(w),
                q: q
                    .terms()
                    .map(|(k, c)| HarmonicEntry {
                        k,
                        c: rational_to_string(c),
                    })
                    .collect(),
            })
            .collect();
        serde_json::to_string_pretty(&entries).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<WeakSeries> {
        let entries: Vec<OrderEntry> = serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "weak series JSON",
            input: e.to_string(),
        })?;
        let mut omega = Vec::with_capacity(entries.len());
        let mut solution = Vec::with_capacity(entries.len());
        for (i, e) in entries.into_iter().enumerate() {
            if e.n != i {
                return Err(Error::Parse {
                    what: "weak series JSON",
                    input: format!("entry {i} carries n = {}", e.n),
                });
            }
            omega.push(parse_rational(&e.w)?);
            let terms = e
                .q
                .into_iter()
                .map(|h| Ok((h.k, parse_rational(&h.c)?)))
                .collect::<Result<Vec<_>>>()?;
            solution.push(TrigPoly::from_terms(terms));
        }
        WeakSeries::from_parts(omega, solution)
    }
}
