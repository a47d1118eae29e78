//! Embedded consistency checks run by the `selftest` command.

use crate::exact_freq::{b0_exact, ode_period_oracle, omega_exact};
use crate::lindstedt::weak_series;
use crate::numerics::{rational_to_string, BigReal, Rational};
use crate::reference::{weak_coeffs, B0_VARIATIONAL};
use crate::trig_series::TrigPoly;
use crate::vpt::{convergence_study, PrecisionPolicy};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Deliberate faults for exercising the failure path.
#[derive(Clone, Copy, Debug, Default)]
pub struct Hooks {
    /// Adds 1 to the computed `w_n` before it is compared.
    pub corrupt_coefficient: Option<usize>,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

pub fn run(hooks: Hooks) -> Vec<Check> {
    let series = weak_series(20);
    let mut checks = Vec::new();

    let mut computed: Vec<Rational> = series.omega_coeffs()[1..].to_vec();
    if let Some(n) = hooks.corrupt_coefficient.filter(|n| (1..=20).contains(n)) {
        computed[n - 1] += Rational::from_integer(1.into());
    }
    let mismatches: Vec<String> = computed
        .iter()
        .zip(weak_coeffs())
        .enumerate()
        .filter(|(_, (got, want))| *got != want)
        .map(|(i, (got, _))| format!("w_{} = {}", i + 1, rational_to_string(got)))
        .collect();
    checks.push(check(
        "weak coefficients w_1..w_20 exact",
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "20/20 equal".into()
        } else {
            format!("mismatch: {}", mismatches.join(", "))
        },
    ));

    let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
    let q1 = TrigPoly::from_terms([(1, r(-1, 32)), (3, r(1, 32))]);
    let q2 = TrigPoly::from_terms([(1, r(23, 1024)), (3, r(-3, 128)), (5, r(1, 1024))]);
    checks.push(check(
        "solution coefficients q_1, q_2",
        series.q(1) == &q1 && series.q(2) == &q2,
        format!("q_1 = {}; q_2 = {}", series.q(1), series.q(2)),
    ));

    let b0 = b0_exact(30);
    checks.push(check(
        "b0 = pi / (2 K(1/2))",
        b0.to_decimal(19) == "0.8472130847939790866",
        b0.to_decimal(25),
    ));

    let study = convergence_study(&series, 20, 10, PrecisionPolicy::default());
    let (table_ok, detail) = match &study {
        Ok(study) => {
            let bad: Vec<String> = study
                .orders
                .iter()
                .filter_map(|o| match &o.outcome {
                    Ok(rec) => {
                        let want = BigReal::parse(B0_VARIATIONAL[o.order - 1], rec.value.digits())
                            .expect("reference decimal parses");
                        let dev = (&rec.value - &want).abs().to_f64();
                        (dev >= 1e-19).then(|| format!("N={} off by {dev:.1e}", o.order))
                    }
                    Err(e) => Some(format!("N={} failed: {e}", o.order)),
                })
                .collect();
            let detail = if bad.is_empty() {
                "20/20 within 1e-19".to_string()
            } else {
                bad.join(", ")
            };
            (bad.is_empty(), detail)
        }
        Err(e) => (false, e.to_string()),
    };
    checks.push(check("variational b0^(N), N = 1..20", table_ok, detail));

    let one = BigReal::one(30);
    let tol = BigReal::parse("1e-12", 30).expect("literal parses");
    let mut worst = 0.0f64;
    let mut failure = None;
    for g in ["0.1", "1", "10"] {
        let g = BigReal::parse(g, 30).expect("literal parses");
        match (omega_exact(&g, &one), ode_period_oracle(&g, &one, &tol)) {
            (Ok(exact), Ok(ode)) => worst = worst.max(ode.omega.rel_diff(&exact.omega).to_f64()),
            (Err(e), _) | (_, Err(e)) => failure = Some(e.to_string()),
        }
    }
    checks.push(match failure {
        Some(e) => check("elliptic formula vs ODE integration", false, e),
        None => check(
            "elliptic formula vs ODE integration",
            worst < 1e-10,
            format!("max relative deviation {worst:.2e}"),
        ),
    });

    checks
}

/// One `PASS`/`FAIL` line per check.
pub fn render(checks: &[Check]) -> String {
    let mut out = String::new();
    for c in checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{status}  {}  ({})\n", c.name, c.detail));
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    out.push_str(&format!("{passed}/{} checks passed\n", checks.len()));
    out
}
