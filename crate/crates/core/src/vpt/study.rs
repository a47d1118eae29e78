//! Convergence of `b0^(N)` towards `b0` and the exponential error law
//! `ln(rel_error) = alpha + beta N`.

use serde::Serialize;
use serde_json::Value;

use super::{optimize_b0, VariationalRecord};
use crate::error::Result;
use crate::lindstedt::WeakSeries;
use crate::numerics::{fit_line, BigReal};

/// Working precision per order: `base + per_order * N` decimal digits,
/// never below a requested floor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub base: u32,
    pub per_order: u32,
    pub floor: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            base: 30,
            per_order: 2,
            floor: 15,
        }
    }
}

impl PrecisionPolicy {
    pub fn digits(&self, order: usize) -> u32 {
        (self.base + self.per_order * order as u32).max(self.floor)
    }
}

/// Least-squares line through `(N, ln rel_error)`.
#[derive(Clone, Debug)]
pub struct ConvergenceFit {
    pub alpha: BigReal,
    pub beta: BigReal,
    /// First and last order inside the fit window.
    pub fitted_range: (usize, usize),
    /// Root-mean-square deviation in units of `ln rel_error`.
    pub residual: BigReal,
    pub points: usize,
}

/// Outcome at one order; failures are kept, not fatal.
#[derive(Clone, Debug)]
pub struct StudyOrder {
    pub order: usize,
    pub digits: u32,
    pub outcome: std::result::Result<VariationalRecord, String>,
}

#[derive(Clone, Debug)]
pub struct ConvergenceStudy {
    pub orders: Vec<StudyOrder>,
    pub fit: Option<ConvergenceFit>,
    pub policy: PrecisionPolicy,
}

/// `b0^(N)` for `N = 1..max_order`, each order seeded with the previous
/// optimum, and a line fit over the orders `[max_order - fit_last, max_order]`.
pub fn convergence_study(
    series: &WeakSeries,
    max_order: usize,
    fit_last: usize,
    policy: PrecisionPolicy,
) -> Result<ConvergenceStudy> {
    series.check_order(max_order)?;
    let mut orders = Vec::with_capacity(max_order);
    let mut prev: Option<BigReal> = None;
    for n in 1..=max_order {
        let digits = policy.digits(n);
        let outcome = optimize_b0(series, n, prev.as_ref(), digits).map_err(|e| e.to_string());
        if let Ok(rec) = &outcome {
            prev = Some(rec.omega_opt.clone());
        }
        orders.push(StudyOrder {
            order: n,
            digits,
            outcome,
        });
    }
    let lo = max_order.saturating_sub(fit_last).max(1);
    let fit = fit_orders(&orders, lo, max_order);
    Ok(ConvergenceStudy {
        orders,
        fit,
        policy,
    })
}

/// Line fit over the successful orders in `[lo, hi]`; `None` with fewer
/// than two usable points.
pub fn fit_orders(orders: &[StudyOrder], lo: usize, hi: usize) -> Option<ConvergenceFit> {
    let points: Vec<(BigReal, BigReal)> = orders
        .iter()
        .filter(|o| (lo..=hi).contains(&o.order))
        .filter_map(|o| {
            let rec = o.outcome.as_ref().ok()?;
            let err = rec.rel_error.as_ref()?;
            if !err.is_positive() {
                return None;
            }
            Some((BigReal::from_i64(o.order as i64, err.digits()), err.ln()))
        })
        .collect();
    let first = orders.iter().find(|o| o.order >= lo)?.order;
    let last = orders.iter().rev().find(|o| o.order <= hi)?.order;
    let line = fit_line(&points).ok()?;
    Some(ConvergenceFit {
        alpha: line.alpha,
        beta: line.beta,
        fitted_range: (first, last),
        residual: line.residual,
        points: points.len(),
    })
}

#[derive(Serialize)]
struct PrecisionSummary {
    base: u32,
    per_order: u32,
    min_digits: u32,
    max_digits: u32,
}

#[derive(Serialize)]
struct FitSummary {
    alpha: Value,
    beta: Value,
    range: [usize; 2],
    residual: Value,
    points: usize,
    precision: PrecisionSummary,
    flagged: Vec<usize>,
    failed: Vec<usize>,
}

/// JSON number carrying exactly the printed digits.
fn number(v: &BigReal, digits: u32) -> Value {
    serde_json::from_str(&v.to_decimal(digits)).expect("decimal renders as a JSON number")
}

impl ConvergenceStudy {
    pub fn records(&self) -> impl Iterator<Item = &VariationalRecord> {
        self.orders.iter().filter_map(|o| o.outcome.as_ref().ok())
    }

    pub fn flagged_orders(&self) -> Vec<usize> {
        self.records().filter(|r| r.flagged).map(|r| r.order).collect()
    }

    pub fn failed_orders(&self) -> Vec<usize> {
        self.orders
            .iter()
            .filter(|o| o.outcome.is_err())
            .map(|o| o.order)
            .collect()
    }

    /// `N,omega0_opt,b0_N,rel_error,ln_rel_error,derivative_level`; a failed
    /// order keeps its row with empty numeric fields.
    pub fn to_csv(&self, digits: u32) -> String {
        let mut out = String::from("N,omega0_opt,b0_N,rel_error,ln_rel_error,derivative_level\n");
        for o in &self.orders {
            match &o.outcome {
                Ok(rec) => {
                    let err = rec.rel_error.clone().unwrap_or_else(|| BigReal::zero(digits));
                    let ln = if err.is_positive() {
                        err.ln().to_decimal(digits)
                    } else {
                        String::new()
                    };
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        o.order,
                        rec.omega_opt.to_decimal(digits),
                        rec.value.to_decimal(digits),
                        err.to_decimal(digits),
                        ln,
                        rec.derivative_level
                    ));
                }
                Err(_) => out.push_str(&format!("{},,,,,\n", o.order)),
            }
        }
        out
    }

    /// `{"alpha", "beta", "range", "residual", ...}`, or `None` without a fit.
    pub fn fit_json(&self, digits: u32) -> Option<String> {
        let fit = self.fit.as_ref()?;
        let summary = FitSummary {
            alpha: number(&fit.alpha, digits),
            beta: number(&fit.beta, digits),
            range: [fit.fitted_range.0, fit.fitted_range.1],
            residual: number(&fit.residual, digits),
            points: fit.points,
            precision: PrecisionSummary {
                base: self.policy.base,
                per_order: self.policy.per_order,
                min_digits: self.orders.iter().map(|o| o.digits).min().unwrap_or(0),
                max_digits: self.orders.iter().map(|o| o.digits).max().unwrap_or(0),
            },
            flagged: self.flagged_orders(),
            failed: self.failed_orders(),
        };
        Some(serde_json::to_string_pretty(&summary).expect("plain data serializes"))
    }
}
