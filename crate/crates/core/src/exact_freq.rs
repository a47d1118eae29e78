//! Exact frequency of the Duffing oscillator through the complete elliptic
//! integral of the first kind, its strong-coupling coefficients, and a
//! direct numerical integration used as an independent oracle.

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::lindstedt::WeakSeries;
use crate::numerics::ode::{self, Tolerances};
use crate::numerics::{agm, BigReal};

/// Highest strong-coupling coefficient index that can be requested.
pub const MAX_STRONG_ORDER: usize = 4;

/// `K(k^2) = pi / (2 agm(1, sqrt(1 - k^2)))` for `0 <= k^2 < 1`.
pub fn elliptic_k(k_sq: &BigReal) -> Result<BigReal> {
    let digits = k_sq.digits();
    let one = BigReal::one(digits);
    if k_sq.is_negative() || k_sq >= &one {
        return Err(Error::Domain(format!(
            "elliptic K needs 0 <= k^2 < 1, got {k_sq}"
        )));
    }
    let m = agm(&one, &(&one - k_sq).sqrt())?;
    Ok(BigReal::pi(digits) / (m * BigReal::from_i64(2, digits)))
}

/// Leading strong-coupling coefficient `b0 = pi / (2 K(1/2))`.
pub fn b0_exact(digits: u32) -> BigReal {
    let half = BigReal::from_i64(1, digits) / BigReal::from_i64(2, digits);
    let k = elliptic_k(&half).expect("1/2 lies inside the domain of K");
    BigReal::pi(digits) / (k * BigReal::from_i64(2, digits))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactFrequency {
    pub g: BigReal,
    pub omega0: BigReal,
    pub omega: BigReal,
    /// Elliptic parameter `g / (2 (w0^2 + g))`, always in `[0, 1/2)`.
    pub modulus_sq: BigReal,
}

/// `w = pi sqrt(w0^2 + g) / (2 K(g / (2 (w0^2 + g))))`
pub fn omega_exact(g: &BigReal, omega0: &BigReal) -> Result<ExactFrequency> {
    check_parameters(g, omega0)?;
    let digits = g.digits().max(omega0.digits());
    let g = g.with_digits(digits);
    let omega0 = omega0.with_digits(digits);
    let total = &omega0 * &omega0 + &g;
    let modulus_sq = &g / (&total * BigReal::from_i64(2, digits));
    let k = elliptic_k(&modulus_sq)?;
    let omega = BigReal::pi(digits) * total.sqrt() / (k * BigReal::from_i64(2, digits));
    Ok(ExactFrequency {
        g,
        omega0,
        omega,
        modulus_sq,
    })
}

fn check_parameters(g: &BigReal, omega0: &BigReal) -> Result<()> {
    if g.is_negative() {
        return Err(Error::Domain(format!("coupling g must be >= 0, got {g}")));
    }
    if !omega0.is_positive() {
        return Err(Error::Domain(format!("omega0 must be > 0, got {omega0}")));
    }
    Ok(())
}

/// Coefficients of `w = sqrt(g) sum_m b_m (w0^2 / g)^m` for large `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct StrongCoefficients {
    /// `b_0..b_M`; `b_0` from the closed form, the rest from scheme A.
    pub b: Vec<BigReal>,
    /// The same coefficients from the independent scheme B.
    pub cross_check: Vec<BigReal>,
}

impl StrongCoefficients {
    pub fn order(&self) -> usize {
        self.b.len() - 1
    }

    /// Largest relative disagreement between the two schemes over `b_1..b_M`.
    pub fn max_scheme_disagreement(&self) -> Option<BigReal> {
        self.b
            .iter()
            .zip(&self.cross_check)
            .skip(1)
            .map(|(a, b)| a.rel_diff(b))
            .reduce(BigReal::max)
    }

    /// `sqrt(g) sum_{m <= order} b_m (w0^2 / g)^m`
    pub fn partial_sum(&self, order: usize, g: &BigReal, omega0: &BigReal) -> Result<BigReal> {
        if order > self.order() {
            return Err(Error::Usage(format!(
                "strong order {order} requested but only {} coefficients were computed",
                self.order()
            )));
        }
        if !g.is_positive() {
            return Err(Error::Domain("strong-coupling sums need g > 0".into()));
        }
        let digits = g.digits().max(omega0.digits());
        let eps = omega0 * omega0 / g;
        let sum = self.b[..=order]
            .iter()
            .rev()
            .fold(BigReal::zero(digits), |acc, b| acc * &eps + b);
        Ok(sum * g.sqrt())
    }
}

/// `h(eps) = w(g = 1/eps, w0 = 1) sqrt(eps) = pi sqrt(1 + eps) / (2 K(1 / (2 (1 + eps))))`,
/// analytic at `eps = 0` with Taylor coefficients `b_m`.
fn scaled_frequency(eps: &BigReal) -> Result<BigReal> {
    let digits = eps.digits();
    let one = BigReal::one(digits);
    let two = BigReal::from_i64(2, digits);
    let s = &one + eps;
    let k = elliptic_k(&(&one / (&two * &s)))?;
    Ok(BigReal::pi(digits) * s.sqrt() / (k * two))
}

/// `b_0..b_M` with `M <= 4`, each accurate to `digits` significant digits.
///
/// `b_0` is the closed form. The others are Taylor coefficients of the
/// analytic function `h(eps)` (see `scaled_frequency`), obtained twice:
///
/// * scheme A: Richardson extrapolation in `eps` on the halving sequence
///   `eps_i = 2^-(5 + i)`, peeling off one coefficient at a time;
/// * scheme B: interpolation at Chebyshev nodes on `[0, 1/8]` and
///   conversion of the interpolant to monomial form.
///
/// The nearest singularity of `h` sits at `eps = -1/2`, so both schemes
/// converge geometrically. Work is done with `60 + digits / 2` guard digits.
pub fn strong_coefficients(order: usize, digits: u32) -> Result<StrongCoefficients> {
    if order > MAX_STRONG_ORDER {
        return Err(Error::Usage(format!(
            "strong-coupling coefficients are available up to order {MAX_STRONG_ORDER}, got {order}"
        )));
    }
    let work = digits + 60 + digits / 2;
    let b0 = b0_exact(work);
    let a = richardson_scheme(&b0, order, work, digits)?;
    let b = chebyshev_scheme(order, work, digits)?;
    let finish = |v: Vec<BigReal>| -> Vec<BigReal> {
        let mut v: Vec<BigReal> = v.into_iter().map(|x| x.with_digits(digits)).collect();
        v[0] = b0.with_digits(digits);
        v
    };
    Ok(StrongCoefficients {
        b: finish(a),
        cross_check: finish(b),
    })
}

fn richardson_scheme(b0: &BigReal, order: usize, work: u32, digits: u32) -> Result<Vec<BigReal>> {
    let levels = 16 + (digits as usize) / 2;
    let two = BigReal::from_i64(2, work);
    let nodes: Vec<BigReal> = (0..levels).map(|i| two.powi(-(5 + i as i64))).collect();
    let values = nodes
        .iter()
        .map(scaled_frequency)
        .collect::<Result<Vec<_>>>()?;

    let mut b = vec![b0.clone()];
    for m in 1..=order {
        let mut table: Vec<BigReal> = nodes
            .iter()
            .zip(&values)
            .map(|(e, h)| {
                let known = b
                    .iter()
                    .rev()
                    .fold(BigReal::zero(work), |acc, c| acc * e + c);
                (h - known) / e.powi(m as i64)
            })
            .collect();
        // Halving the step: the k-th column removes the eps^k error term.
        for k in 1..levels {
            let factor = two.powi(k as i64) - BigReal::one(work);
            table = table
                .windows(2)
                .map(|w| &w[1] + (&w[1] - &w[0]) / &factor)
                .collect();
        }
        b.push(table.pop().expect("tableau has one entry left"));
    }
    Ok(b)
}

fn chebyshev_scheme(order: usize, work: u32, digits: u32) -> Result<Vec<BigReal>> {
    let points = 24 + digits as usize;
    let width = BigReal::from_i64(1, work) / BigReal::from_i64(8, work);
    let half = &width / BigReal::from_i64(2, work);
    let pi = BigReal::pi(work);
    let nodes: Vec<BigReal> = (0..points)
        .map(|j| {
            let theta = &pi * BigReal::from_i64(2 * j as i64 + 1, work)
                / BigReal::from_i64(2 * points as i64, work);
            &half * (BigReal::one(work) - theta.cos())
        })
        .collect();
    let values = nodes
        .iter()
        .map(scaled_frequency)
        .collect::<Result<Vec<_>>>()?;
    let mut coeffs = monomial_interpolant(&nodes, &values);
    coeffs.truncate(order + 1);
    Ok(coeffs)
}

/// Monomial coefficients of the polynomial through `(x_i, y_i)`, via Newton
/// divided differences.
fn monomial_interpolant(xs: &[BigReal], ys: &[BigReal]) -> Vec<BigReal> {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for k in 1..n {
        for i in (k..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - k]);
        }
    }
    let digits = ys[0].digits();
    let mut poly = vec![BigReal::zero(digits); n];
    for k in (0..n).rev() {
        // poly <- poly * (x - x_k) + dd_k
        let mut next = vec![BigReal::zero(digits); n];
        for i in 0..n {
            if i + 1 < n {
                next[i + 1] = &next[i + 1] + &poly[i];
            }
            next[i] = &next[i] - &xs[k] * &poly[i];
        }
        next[0] = &next[0] + &dd[k];
        poly = next;
    }
    poly
}

/// Frequency from direct numerical integration.
#[derive(Clone, Debug)]
pub struct OdePeriod {
    pub omega: BigReal,
    pub period: BigReal,
    pub steps: usize,
    /// Largest `|E(t) - E(0)|` over the accepted steps.
    pub max_energy_drift: f64,
}

/// Integrates `x'' + w0^2 x + g x^3 = 0` from `x = 1, x' = 0` with the
/// Dormand–Prince pair and returns `2 pi / T`, where `T` is the first time
/// `x'` comes back down to zero with `x > 0`, located on the dense output.
///
/// Runs in double precision; `tol` bounds the local error per step.
pub fn ode_period_oracle(g: &BigReal, omega0: &BigReal, tol: &BigReal) -> Result<OdePeriod> {
    check_parameters(g, omega0)?;
    if !tol.is_positive() {
        return Err(Error::Domain(format!("tolerance must be > 0, got {tol}")));
    }
    let g = g.to_f64();
    let w2 = omega0.to_f64().powi(2);
    let tol = tol.to_f64();
    let energy = |y: &[f64; 2]| 0.5 * y[1] * y[1] + 0.5 * w2 * y[0] * y[0] + 0.25 * g * y[0].powi(4);
    let e0 = energy(&[1.0, 0.0]);

    // No orbit is slower than the harmonic one, so two harmonic periods
    // always contain the first return.
    let t_end = 2.0 * 2.0 * std::f64::consts::PI / w2.sqrt();
    let mut period = None;
    let mut drift = 0.0f64;
    let steps = ode::integrate(
        |_, y: &[f64; 2]| [y[1], -w2 * y[0] - g * y[0].powi(3)],
        0.0,
        [1.0, 0.0],
        t_end,
        Tolerances::uniform(tol),
        |step| {
            drift = drift.max((energy(&step.y1) - e0).abs());
            if step.y0[1] > 0.0 && step.y1[1] <= 0.0 && step.y1[0] > 0.0 {
                let t = ode::bisect_root(|t| step.interpolate(t)[1], step.t0, step.t1);
                period = Some(t);
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        },
    )?;
    let period = period.ok_or_else(|| {
        Error::Integration("no full period found within two harmonic periods".into())
    })?;
    let digits = 17;
    let period = BigReal::from_f64(period, digits);
    Ok(OdePeriod {
        omega: BigReal::pi(digits) * BigReal::from_i64(2, digits) / &period,
        period,
        steps,
        max_energy_drift: drift,
    })
}

/// Sampling request for the weak/strong-coupling envelope table.
#[derive(Clone, Debug)]
pub struct EnvelopeRequest {
    pub gmin: BigReal,
    pub gmax: BigReal,
    pub samples: usize,
    pub weak_orders: Vec<usize>,
    pub strong_orders: Vec<usize>,
    pub omega0: BigReal,
}

#[derive(Clone, Debug)]
pub struct EnvelopeTable {
    pub header: Vec<String>,
    /// `g`, exact, weak partial sums, strong partial sums, per row.
    pub rows: Vec<Vec<BigReal>>,
}

impl EnvelopeTable {
    pub fn to_csv(&self, digits: u32) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_decimal(digits)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Exact frequency, weak partial sums and strong partial sums at
/// log-spaced couplings in `[gmin, gmax]`.
pub fn envelope_data(
    request: &EnvelopeRequest,
    series: &WeakSeries,
    digits: u32,
) -> Result<EnvelopeTable> {
    let EnvelopeRequest {
        gmin,
        gmax,
        samples,
        weak_orders,
        strong_orders,
        omega0,
    } = request;
    if !gmin.is_positive() || gmax < gmin {
        return Err(Error::Domain(format!(
            "envelope needs 0 < gmin <= gmax, got [{gmin}, {gmax}]"
        )));
    }
    if *samples == 0 {
        return Err(Error::Usage("envelope needs at least one sample".into()));
    }
    if let Some(bad) = strong_orders.iter().find(|&&m| m > MAX_STRONG_ORDER) {
        return Err(Error::Usage(format!(
            "strong order {bad} requested; coefficients beyond b_{MAX_STRONG_ORDER} are not available"
        )));
    }
    for &n in weak_orders {
        series.check_order(n)?;
    }
    let strong = match strong_orders.iter().max() {
        Some(&m) => Some(strong_coefficients(m, digits)?),
        None => None,
    };

    let mut header = vec!["g".to_string(), "omega_exact".to_string()];
    header.extend(weak_orders.iter().map(|n| format!("weak_{n}")));
    header.extend(strong_orders.iter().map(|m| format!("strong_{m}")));

    let gmin = gmin.with_digits(digits);
    let omega0 = omega0.with_digits(digits);
    let log_ratio = (gmax.with_digits(digits) / &gmin).ln();
    let mut rows = Vec::with_capacity(*samples);
    for i in 0..*samples {
        let g = if i == 0 {
            gmin.clone()
        } else if i + 1 == *samples {
            gmax.with_digits(digits)
        } else {
            let t = BigReal::from_i64(i as i64, digits) / BigReal::from_i64(*samples as i64 - 1, digits);
            &gmin * (&log_ratio * t).exp()
        };
        let mut row = vec![g.clone(), omega_exact(&g, &omega0)?.omega];
        for &n in weak_orders {
            row.push(series.frequency_partial_sum(n, &g, &omega0)?);
        }
        if let Some(strong) = &strong {
            for &m in strong_orders {
                row.push(strong.partial_sum(m, &g, &omega0)?);
            }
        }
        rows.push(row);
    }
    Ok(EnvelopeTable { header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindstedt::weak_series;
    use crate::numerics::adaptive_quadrature;

    fn real(s: &str, digits: u32) -> BigReal {
        BigReal::parse(s, digits).unwrap()
    }

    fn k_by_quadrature(k_sq: &BigReal) -> BigReal {
        let digits = k_sq.digits();
        let zero = BigReal::zero(digits);
        let half_pi = BigReal::pi(digits) / BigReal::from_i64(2, digits);
        let tol = BigReal::from_i64(10, digits).powi(-(digits as i64) + 5);
        adaptive_quadrature(
            |a| (BigReal::one(digits) - k_sq * a.sin() * a.sin()).sqrt().recip(),
            &zero,
            &half_pi,
            &tol,
        )
        .unwrap()
    }

    #[test]
    fn k_at_zero_is_half_pi() {
        let k = elliptic_k(&BigReal::zero(40)).unwrap();
        let half_pi = BigReal::pi(40) / BigReal::from_i64(2, 40);
        assert_eq!(k.to_decimal(38), half_pi.to_decimal(38));
    }

    #[test]
    fn k_reference_values() {
        // 45-digit values from an independent arbitrary-precision library.
        let cases = [
            ("0.25", "1.68575035481259604287120365779907698950080089"),
            ("0.5", "1.85407467730137191843385034719526004621759882"),
            ("0.9", "2.57809211334817318820257077181650623511355737"),
        ];
        for (m, want) in cases {
            let k = elliptic_k(&real(m, 50)).unwrap();
            assert!(k.rel_diff(&real(want, 50)).to_f64() < 1e-44, "K({m}) = {k}");
        }
    }

    #[test]
    fn k_agrees_with_quadrature() {
        for m in ["0.25", "0.5", "0.9"] {
            let k_sq = real(m, 40);
            let a = elliptic_k(&k_sq).unwrap();
            let q = k_by_quadrature(&k_sq);
            assert!(a.rel_diff(&q).to_f64() < 1e-30, "K({m}): agm {a} quad {q}");
        }
    }

    #[test]
    fn k_rejects_outside_domain() {
        assert!(elliptic_k(&BigReal::one(30)).is_err());
        assert!(elliptic_k(&real("-0.1", 30)).is_err());
    }

    #[test]
    fn b0_closed_form() {
        assert_eq!(b0_exact(30).to_decimal(19), "0.8472130847939790866");
        assert_eq!(
            b0_exact(60).to_decimal(40),
            "0.8472130847939790866064991234821916364814"
        );
    }

    #[test]
    fn zero_coupling_is_harmonic() {
        let w0 = real("1.7", 30);
        let f = omega_exact(&BigReal::zero(30), &w0).unwrap();
        assert_eq!(f.omega.to_decimal(25), w0.to_decimal(25));
        assert!(f.modulus_sq.is_zero());
    }

    #[test]
    fn exact_frequency_invariants() {
        let one = BigReal::one(30);
        let half = real("0.5", 30);
        let mut last = omega_exact(&BigReal::zero(30), &one).unwrap().omega;
        for e in -3..=6 {
            let g = BigReal::from_i64(10, 30).powi(e);
            let f = omega_exact(&g, &one).unwrap();
            assert!(f.omega > last, "not increasing at g = 1e{e}");
            assert!(f.omega >= one);
            assert!(!f.modulus_sq.is_negative() && f.modulus_sq < half);
            last = f.omega;
        }
    }

    #[test]
    fn scaling_identity() {
        for (g, w0, lambda) in [("1", "1", "2"), ("0.3", "1.5", "0.7"), ("40", "0.2", "3.1")] {
            let (g, w0, l) = (real(g, 40), real(w0, 40), real(lambda, 40));
            let lhs = omega_exact(&(&l * &l * &g), &(&l * &w0)).unwrap().omega;
            let rhs = &l * omega_exact(&g, &w0).unwrap().omega;
            assert!(lhs.rel_diff(&rhs).to_f64() < 1e-35);
        }
    }

    #[test]
    fn approaches_strong_coupling_limit() {
        let g = BigReal::from_i64(10, 40).powi(12);
        let f = omega_exact(&g, &BigReal::one(40)).unwrap();
        let ratio = f.omega / g.sqrt();
        assert!(ratio.rel_diff(&b0_exact(40)).to_f64() < 1e-11);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(omega_exact(&real("-1", 30), &BigReal::one(30)).is_err());
        assert!(omega_exact(&BigReal::one(30), &BigReal::zero(30)).is_err());
    }

    #[test]
    fn strong_coefficients_match_taylor_oracle() {
        // Taylor coefficients of h(eps), 40 digits, from an independent
        // arbitrary-precision library.
        let want = [
            "0.8472130847939790866064991234821916364814",
            "0.6171721036533605424159455538424961059462",
            "-0.2643614911146545616513233264240439249384",
            "0.2523533416664184358059395864375194628453",
            "-0.3180042427143044625476611195295439200061",
        ];
        let s = strong_coefficients(4, 30).unwrap();
        for (m, w) in want.iter().enumerate() {
            let w = real(w, 30);
            assert!(s.b[m].rel_diff(&w).to_f64() < 1e-28, "b_{m} = {}", s.b[m]);
            assert!(s.cross_check[m].rel_diff(&w).to_f64() < 1e-28);
        }
        assert!(s.max_scheme_disagreement().unwrap().to_f64() < 1e-10);
    }

    #[test]
    fn strong_series_is_self_consistent() {
        let s = strong_coefficients(2, 30).unwrap();
        let eps = real("1e-6", 30);
        let g = eps.recip();
        let one = BigReal::one(30);
        let exact = omega_exact(&g, &one).unwrap().omega;
        let approx = s.partial_sum(2, &g, &one).unwrap();
        // Remainder is b_3 eps^3 relative to sqrt(g) b_0.
        assert!(approx.rel_diff(&exact).to_f64() < 1e-17);
    }

    #[test]
    fn strong_order_is_capped() {
        assert!(matches!(strong_coefficients(5, 30), Err(Error::Usage(_))));
    }

    #[test]
    fn oracle_matches_closed_form() {
        let tol = real("1e-12", 30);
        let one = BigReal::one(30);
        for g in ["0", "0.1", "1", "10"] {
            let g = real(g, 30);
            let exact = omega_exact(&g, &one).unwrap().omega;
            let ode = ode_period_oracle(&g, &one, &tol).unwrap();
            assert!(ode.omega.rel_diff(&exact).to_f64() < 1e-10, "g = {g}: {}", ode.omega);
            assert!(ode.max_energy_drift <= 100.0 * 1e-12, "drift {}", ode.max_energy_drift);
        }
    }

    #[test]
    fn oracle_strong_coupling_sanity() {
        // At g = 100 the first correction b_1 / g alone moves w / sqrt(g)
        // by 0.73% off b_0; what remains after it is O(1/g^2).
        let g = BigReal::from_i64(100, 30);
        let ode = ode_period_oracle(&g, &BigReal::one(30), &real("1e-12", 30)).unwrap();
        let ratio = ode.omega / g.sqrt();
        let b0 = b0_exact(30);
        let off = ratio.rel_diff(&b0).to_f64();
        assert!(off > 7e-3 && off < 7.5e-3, "{off}");
        let s = strong_coefficients(1, 30).unwrap();
        let two_terms = s.partial_sum(1, &g, &BigReal::one(30)).unwrap() / g.sqrt();
        assert!(ratio.rel_diff(&two_terms).to_f64() < 4e-5);
    }

    #[test]
    fn envelope_table() {
        let series = weak_series(9);
        let request = EnvelopeRequest {
            gmin: real("1e-3", 30),
            gmax: real("1e3", 30),
            samples: 7,
            weak_orders: (1..=9).collect(),
            strong_orders: vec![0, 1, 2],
            omega0: BigReal::one(30),
        };
        let table = envelope_data(&request, &series, 30).unwrap();
        assert_eq!(table.header[..3], ["g", "omega_exact", "weak_1"]);
        assert_eq!(table.header.last().unwrap(), "strong_2");
        assert_eq!(table.rows.len(), 7);

        let first = &table.rows[0];
        for w in &first[2..11] {
            assert!(w.rel_diff(&first[1]).to_f64() < 1e-4);
        }
        let last = table.rows.last().unwrap();
        assert_eq!(last[0].to_decimal(20), "1000.0000000000000000");
        let leading = last[0].sqrt() * b0_exact(30);
        assert_eq!(last[11].to_decimal(25), leading.to_decimal(25));
        for pair in table.rows.windows(2) {
            assert!(pair[1][1] > pair[0][1]);
        }

        let csv = table.to_csv(12);
        assert!(csv.starts_with("g,omega_exact,weak_1,"));
        assert_eq!(csv.lines().count(), 8);
    }

    #[test]
    fn envelope_rejects_high_strong_order() {
        let request = EnvelopeRequest {
            gmin: real("0.1", 30),
            gmax: real("10", 30),
            samples: 3,
            weak_orders: vec![1],
            strong_orders: vec![5],
            omega0: BigReal::one(30),
        };
        assert!(matches!(
            envelope_data(&request, &weak_series(1), 30),
            Err(Error::Usage(_))
        ));
    }
}
