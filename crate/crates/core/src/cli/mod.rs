//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 self-test
//! failure.

mod commands;
mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::numerics::{parse_rational, Rational};

pub use table::{Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_SELFTEST: i32 = 3;

/// Largest order any command accepts.
pub const MAX_ORDER: usize = 120;
pub const MIN_DIGITS: u32 = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Pretty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Weak,
    Variational,
    Oracle,
}

#[derive(Parser, Debug)]
#[command(
    name = "duffing",
    version,
    about = "Frequency of the periodic Duffing oscillator x'' + w0^2 x + g x^3 = 0, x(0) = 1, x'(0) = 0"
)]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,

    /// Perturbation order N (maximum order for convergence)
    #[arg(short = 'N', long = "order", global = true)]
    order: Option<usize>,

    /// Coupling g >= 0 (decimal or num/den)
    #[arg(short = 'g', global = true, allow_hyphen_values = true)]
    g: Option<String>,

    /// Harmonic frequency w0 > 0
    #[arg(long, global = true, default_value = "1", allow_hyphen_values = true)]
    omega0: String,

    /// Working precision and printed significant digits (>= 15)
    #[arg(long, global = true, default_value_t = 30)]
    digits: u32,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,

    /// Write the main output here instead of stdout
    #[arg(short = 'o', long = "out", global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum CommandArgs {
    /// Exact weak-coupling coefficients w_0..w_N
    Coeffs {
        /// Also print the cosine harmonics of q_n
        #[arg(long)]
        full: bool,
    },
    /// Frequency at one coupling by several methods
    Freq {
        #[arg(long, value_enum, value_delimiter = ',', default_value = "exact,weak,variational")]
        methods: Vec<Method>,
        /// Local error tolerance of the ODE oracle
        #[arg(long, default_value = "1e-12")]
        tol: String,
    },
    /// Variational strong-coupling coefficient b0^(N)
    B0,
    /// b0^(N) for N = 1..N with the fitted exponential error law
    Convergence {
        /// Fit window: the orders [N - fit_last, N]
        #[arg(long, default_value_t = 10)]
        fit_last: usize,
        /// Where to write the fit summary (default: next to --out, else stderr)
        #[arg(long)]
        fit_out: Option<PathBuf>,
    },
    /// Exact, weak and strong-coupling curves on a log grid in g
    Envelope {
        #[arg(long, default_value = "1e-2")]
        gmin: String,
        #[arg(long, default_value = "1e4")]
        gmax: String,
        #[arg(long, default_value_t = 61)]
        samples: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9")]
        weak_orders: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
        strong_orders: Vec<usize>,
    },
    /// Run the embedded consistency checks
    Selftest {
        #[arg(long, hide = true)]
        corrupt_coefficient: Option<usize>,
    },
}

/// A validated command line.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub order: usize,
    pub g: Option<Rational>,
    pub omega0: Rational,
    pub digits: u32,
    pub format: Format,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Coeffs {
        full: bool,
    },
    Freq {
        methods: Vec<Method>,
        tol: Rational,
    },
    B0,
    Convergence {
        fit_last: usize,
        fit_out: Option<PathBuf>,
    },
    Envelope {
        gmin: Rational,
        gmax: Rational,
        samples: usize,
        weak_orders: Vec<usize>,
        strong_orders: Vec<usize>,
    },
    Selftest {
        corrupt_coefficient: Option<usize>,
    },
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn parse_number(what: &'static str, text: &str) -> Result<Rational> {
    parse_rational(text).map_err(|_| Error::Usage(format!("{what}: cannot parse '{text}' as a number")))
}

impl RunConfig {
    fn from_cli(cli: Cli) -> Result<RunConfig> {
        if cli.digits < MIN_DIGITS {
            return Err(usage(format!("--digits must be at least {MIN_DIGITS}, got {}", cli.digits)));
        }
        let g = cli.g.as_deref().map(|s| parse_number("-g", s)).transpose()?;
        if g.as_ref().is_some_and(|g| g < &Rational::from_integer(0.into())) {
            return Err(usage("-g must be >= 0"));
        }
        let omega0 = parse_number("--omega0", &cli.omega0)?;
        if omega0 <= Rational::from_integer(0.into()) {
            return Err(usage("--omega0 must be > 0"));
        }
        let default_order = match cli.command {
            CommandArgs::Freq { .. } => 2,
            _ => 20,
        };
        let order = cli.order.unwrap_or(default_order);
        if order > MAX_ORDER {
            return Err(usage(format!("order {order} exceeds the maximum {MAX_ORDER}")));
        }
        let command = match cli.command {
            CommandArgs::Coeffs { full } => Command::Coeffs { full },
            CommandArgs::Freq { methods, tol } => {
                if g.is_none() {
                    return Err(usage("freq needs a coupling -g"));
                }
                let tol = parse_number("--tol", &tol)?;
                if tol <= Rational::from_integer(0.into()) {
                    return Err(usage("--tol must be > 0"));
                }
                Command::Freq { methods, tol }
            }
            CommandArgs::B0 => {
                if order == 0 {
                    return Err(usage("b0 needs order >= 1"));
                }
                Command::B0
            }
            CommandArgs::Convergence { fit_last, fit_out } => {
                if order == 0 {
                    return Err(usage("convergence needs order >= 1"));
                }
                Command::Convergence { fit_last, fit_out }
            }
            CommandArgs::Envelope {
                gmin,
                gmax,
                samples,
                weak_orders,
                strong_orders,
            } => {
                let gmin = parse_number("--gmin", &gmin)?;
                let gmax = parse_number("--gmax", &gmax)?;
                if gmin <= Rational::from_integer(0.into()) || gmax < gmin {
                    return Err(usage("envelope needs 0 < gmin <= gmax"));
                }
                if samples == 0 {
                    return Err(usage("--samples must be positive"));
                }
                if let Some(m) = strong_orders.iter().find(|&&m| m > crate::exact_freq::MAX_STRONG_ORDER) {
                    return Err(usage(format!(
                        "strong order {m} is not available: only b_0..b_{} can be extracted reliably",
                        crate::exact_freq::MAX_STRONG_ORDER
                    )));
                }
                if let Some(n) = weak_orders.iter().find(|&&n| n > MAX_ORDER) {
                    return Err(usage(format!("weak order {n} exceeds the maximum {MAX_ORDER}")));
                }
                Command::Envelope {
                    gmin,
                    gmax,
                    samples,
                    weak_orders,
                    strong_orders,
                }
            }
            CommandArgs::Selftest { corrupt_coefficient } => Command::Selftest { corrupt_coefficient },
        };
        Ok(RunConfig {
            command,
            order,
            g,
            omega0,
            digits: cli.digits,
            format: cli.format,
            out: cli.out,
        })
    }

    /// Parses and validates a command line (first item is the program name).
    pub fn parse_from<I, T>(args: I) -> std::result::Result<RunConfig, ParseFailure>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args).map_err(ParseFailure::Clap)?;
        RunConfig::from_cli(cli).map_err(ParseFailure::Invalid)
    }
}

#[derive(Debug)]
pub enum ParseFailure {
    Clap(clap::Error),
    Invalid(Error),
}

/// What a command produced.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Output {
    pub main: String,
    /// Secondary document (the convergence fit summary).
    pub side: Option<(Option<PathBuf>, String)>,
    pub diagnostics: String,
    pub code: i32,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Usage(_) | Error::Parse { .. } => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

/// Runs a validated configuration without touching stdout or files.
pub fn execute(config: &RunConfig) -> Result<Output> {
    commands::execute(config)
}

/// Full command-line entry point; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::parse_from(args) {
        Ok(c) => c,
        Err(ParseFailure::Clap(e)) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
        Err(ParseFailure::Invalid(e)) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let output = match execute(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if let Err(e) = emit(&config, &output) {
        eprintln!("error: {e}");
        return EXIT_NUMERICAL;
    }
    output.code
}

fn emit(config: &RunConfig, output: &Output) -> std::io::Result<()> {
    match &config.out {
        Some(path) => std::fs::write(path, &output.main)?,
        None => std::io::stdout().write_all(output.main.as_bytes())?,
    }
    if let Some((path, text)) = &output.side {
        match path {
            Some(p) => std::fs::write(p, text)?,
            None => std::io::stderr().write_all(text.as_bytes())?,
        }
    }
    std::io::stderr().write_all(output.diagnostics.as_bytes())
}
