use std::path::PathBuf;

use serde_json::{json, Value};

use super::table::{Cell, Table};
use super::{Command, Format, Method, Output, RunConfig, EXIT_NUMERICAL, EXIT_OK, EXIT_SELFTEST};
use crate::error::Result;
use crate::exact_freq::{b0_exact, envelope_data, ode_period_oracle, omega_exact, EnvelopeRequest};
use crate::lindstedt::weak_series;
use crate::numerics::{rational_to_string, BigReal};
use crate::selftest;
use crate::vpt::{convergence_study, optimize_omega, reexpand, PrecisionPolicy};

pub fn execute(config: &RunConfig) -> Result<Output> {
    match &config.command {
        Command::Coeffs { full } => coeffs(config, *full),
        Command::Freq { methods, tol } => freq(config, methods, &BigReal::from_rational(tol, 17)),
        Command::B0 => b0(config),
        Command::Convergence { fit_last, fit_out } => convergence(config, *fit_last, fit_out.as_ref()),
        Command::Envelope {
            gmin,
            gmax,
            samples,
            weak_orders,
            strong_orders,
        } => {
            let d = config.digits;
            let request = EnvelopeRequest {
                gmin: BigReal::from_rational(gmin, d),
                gmax: BigReal::from_rational(gmax, d),
                samples: *samples,
                weak_orders: weak_orders.clone(),
                strong_orders: strong_orders.clone(),
                omega0: BigReal::from_rational(&config.omega0, d),
            };
            envelope(config, &request)
        }
        Command::Selftest { corrupt_coefficient } => Ok(selftest_cmd(*corrupt_coefficient)),
    }
}

fn done(main: String) -> Output {
    Output {
        main,
        ..Output::default()
    }
}

fn num(v: &BigReal, digits: u32) -> Cell {
    Cell::Number(v.to_decimal(digits))
}

fn coeffs(config: &RunConfig, full: bool) -> Result<Output> {
    let series = weak_series(config.order);
    if full && config.format == Format::Json {
        return Ok(done(series.to_json() + "\n"));
    }
    let mut table = if full {
        Table::new(&["n", "w", "k", "c"])
    } else {
        Table::new(&["n", "w"])
    };
    for n in 0..=series.order() {
        let w = Cell::Text(rational_to_string(series.w(n)));
        if full {
            for (k, c) in series.q(n).terms() {
                table.push(vec![
                    Cell::Int(n as i64),
                    w.clone(),
                    Cell::Int(i64::from(k)),
                    Cell::Text(rational_to_string(c)),
                ]);
            }
        } else {
            table.push(vec![Cell::Int(n as i64), w]);
        }
    }
    Ok(done(table.render(config.format)))
}

fn freq(config: &RunConfig, methods: &[Method], tol: &BigReal) -> Result<Output> {
    let d = config.digits;
    let g = BigReal::from_rational(config.g.as_ref().expect("validated"), d);
    let omega0 = BigReal::from_rational(&config.omega0, d);
    let exact = omega_exact(&g, &omega0)?;
    let show_error = methods.contains(&Method::Exact);
    let series = weak_series(config.order);

    let mut table = Table::new(&["method", "order", "value", "rel_error", "status"]);
    let mut code = EXIT_OK;
    for method in methods {
        let (order, result) = match method {
            Method::Exact => (None, Ok((exact.omega.clone(), false))),
            Method::Weak => (
                Some(config.order),
                series
                    .frequency_partial_sum(config.order, &g, &omega0)
                    .map(|v| (v, false)),
            ),
            Method::Variational => (
                Some(config.order),
                reexpand(&series, config.order)
                    .and_then(|p| optimize_omega(&p, &g, &omega0, None))
                    .map(|r| (r.value, r.flagged)),
            ),
            Method::Oracle => (None, ode_period_oracle(&g, &omega0, tol).map(|o| (o.omega, false))),
        };
        let name = Cell::Text(format!("{method:?}").to_lowercase());
        let order = order.map_or(Cell::Empty, |n| Cell::Int(n as i64));
        match result {
            Ok((value, flagged)) => {
                // The oracle runs in double precision.
                let shown = if *method == Method::Oracle { d.min(17) } else { d };
                let err = if show_error {
                    Cell::Number(value.rel_diff(&exact.omega).to_decimal(6))
                } else {
                    Cell::Empty
                };
                let status = if flagged { "flagged" } else { "ok" };
                table.push(vec![name, order, num(&value, shown), err, Cell::Text(status.into())]);
            }
            Err(e) => {
                code = EXIT_NUMERICAL;
                table.push(vec![
                    name,
                    order,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Text(format!("failed: {e}").replace(',', ";")),
                ]);
            }
        }
    }
    Ok(Output {
        main: table.render(config.format),
        code,
        ..Output::default()
    })
}

fn floor_policy(digits: u32) -> PrecisionPolicy {
    PrecisionPolicy {
        floor: digits,
        ..PrecisionPolicy::default()
    }
}

fn b0(config: &RunConfig) -> Result<Output> {
    let d = config.digits;
    let series = weak_series(config.order);
    let study = convergence_study(&series, config.order, 0, floor_policy(d))?;
    let last = study.orders.last().expect("order >= 1");
    let mut table = Table::new(&["N", "omega0_opt", "b0_N", "b0", "rel_error", "derivative_level", "flagged"]);
    let mut code = EXIT_OK;
    match &last.outcome {
        Ok(rec) => table.push(vec![
            Cell::Int(rec.order as i64),
            num(&rec.omega_opt, d),
            num(&rec.value, d),
            num(&b0_exact(d), d),
            rec.rel_error.as_ref().map_or(Cell::Empty, |e| num(e, d.min(20))),
            Cell::Int(rec.derivative_level as i64),
            Cell::Text(rec.flagged.to_string()),
        ]),
        Err(e) => {
            code = EXIT_NUMERICAL;
            table.push(vec![
                Cell::Int(last.order as i64),
                Cell::Empty,
                Cell::Empty,
                num(&b0_exact(d), d),
                Cell::Empty,
                Cell::Empty,
                Cell::Text(format!("failed: {e}").replace(',', ";")),
            ]);
        }
    }
    Ok(Output {
        main: table.render(config.format),
        code,
        ..Output::default()
    })
}

fn convergence(config: &RunConfig, fit_last: usize, fit_out: Option<&PathBuf>) -> Result<Output> {
    let d = config.digits;
    let series = weak_series(config.order);
    let study = convergence_study(&series, config.order, fit_last, floor_policy(d))?;
    let code = if study.failed_orders().is_empty() {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    };
    let fit = study.fit_json(d.min(20));
    let csv = study.to_csv(d);
    let main = match config.format {
        Format::Csv => csv,
        Format::Json => {
            let records = csv_to_json(&csv);
            let fit: Value = fit
                .as_deref()
                .map(|f| serde_json::from_str(f).expect("fit summary is JSON"))
                .unwrap_or(Value::Null);
            serde_json::to_string_pretty(&json!({ "records": records, "fit": fit })).expect("plain data") + "\n"
        }
        Format::Pretty => {
            let mut text = csv_to_table(&csv).render(Format::Pretty);
            if let Some(f) = &study.fit {
                text.push_str(&format!(
                    "\nln(rel_error) = alpha + beta N over N = {}..{} ({} points)\nalpha = {}\nbeta = {}\nrms residual = {}\n",
                    f.fitted_range.0,
                    f.fitted_range.1,
                    f.points,
                    f.alpha.to_decimal(10),
                    f.beta.to_decimal(10),
                    f.residual.to_decimal(4)
                ));
            }
            text
        }
    };
    let side = match (config.format, fit) {
        (Format::Csv, Some(fit)) => {
            let path = fit_out
                .cloned()
                .or_else(|| config.out.as_ref().map(|o| o.with_extension("fit.json")));
            Some((path, fit + "\n"))
        }
        _ => None,
    };
    Ok(Output {
        main,
        side,
        code,
        ..Output::default()
    })
}

fn csv_to_table(csv: &str) -> Table {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let mut table = Table::new(&header);
    for line in lines {
        let row = line
            .split(',')
            .enumerate()
            .map(|(i, s)| match (i, s) {
                (_, "") => Cell::Empty,
                (0, s) | (5, s) => s.parse().map_or(Cell::Text(s.into()), Cell::Int),
                (_, s) => Cell::Number(s.into()),
            })
            .collect();
        table.push(row);
    }
    table
}

fn csv_to_json(csv: &str) -> Value {
    csv_to_table(csv).json_value()
}

fn envelope(config: &RunConfig, request: &EnvelopeRequest) -> Result<Output> {
    let max_weak = request.weak_orders.iter().copied().max().unwrap_or(0);
    let series = weak_series(max_weak);
    let data = envelope_data(request, &series, config.digits)?;
    let main = match config.format {
        Format::Csv => data.to_csv(config.digits),
        other => {
            let header: Vec<&str> = data.header.iter().map(String::as_str).collect();
            let mut table = Table::new(&header);
            for row in &data.rows {
                table.push(row.iter().map(|v| num(v, config.digits)).collect());
            }
            table.render(other)
        }
    };
    Ok(done(main))
}

fn selftest_cmd(corrupt_coefficient: Option<usize>) -> Output {
    let checks = selftest::run(selftest::Hooks { corrupt_coefficient });
    let code = if checks.iter().all(|c| c.passed) {
        EXIT_OK
    } else {
        EXIT_SELFTEST
    };
    Output {
        main: selftest::render(&checks),
        code,
        ..Output::default()
    }
}
