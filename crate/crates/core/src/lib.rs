//! Frequency of the periodic solution of the Duffing oscillator
//! `x'' + w0^2 x + g x^3 = 0`, `x(0) = 1`, `x'(0) = 0`, computed three ways:
//!
//! * [`lindstedt`]: exact rational Poincaré–Lindstedt coefficients of the
//!   weak-coupling series, built on the cosine algebra in [`trig_series`];
//! * [`exact_freq`]: the closed form through the complete elliptic integral,
//!   its strong-coupling coefficients, and a direct ODE integration oracle;
//! * [`vpt`]: variational resummation of the weak series to arbitrary order,
//!   including the strong-coupling coefficient and its convergence study.

pub mod cli;
pub mod error;
pub mod exact_freq;
pub mod lindstedt;
pub mod numerics;
pub mod reference;
pub mod selftest;
pub mod trig_series;
pub mod vpt;

pub use error::{Error, Result};
pub use numerics::{BigReal, Rational};
