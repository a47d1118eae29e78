//! Shared numerical machinery: configurable-precision reals, exact rational
//! polynomials and their real roots, the arithmetic–geometric mean,
//! quadrature, least squares and an adaptive ODE integrator.

pub mod agm;
pub mod fit;
pub mod ode;
pub mod poly;
pub mod quadrature;
pub mod real;
pub mod roots;

pub use agm::agm;
pub use fit::{fit_line, LineFit};
pub use poly::PolynomialR;
pub use quadrature::adaptive_quadrature;
pub use real::{parse_rational, BigReal, Rational};
pub use roots::{positive_roots, real_roots, RealRoot, RootKind};

/// `num/den` rendering used in every machine-readable output; integers keep
/// an explicit `/1`.
pub fn rational_to_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}
