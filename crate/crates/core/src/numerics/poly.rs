use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::real::{BigReal, Rational};

/// Univariate polynomial with exact rational coefficients, ascending degree.
///
/// Canonical form has no trailing zero coefficients, so the zero polynomial
/// is the empty list and the leading coefficient is always nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PolynomialR {
    coeffs: Vec<Rational>,
}

impl PolynomialR {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        PolynomialR { coeffs }
    }

    pub fn zero() -> Self {
        PolynomialR { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^degree`
    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Multiplies the coefficient of `x^i` by `factor(i)`.
    pub fn map_by_degree(&self, factor: impl Fn(usize) -> Rational) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, a)| a * factor(i))
                .collect(),
        )
    }

    /// `q(x) = p(factor * x)`
    pub fn scale_argument(&self, factor: &Rational) -> Self {
        let mut power = Rational::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &power);
            power *= factor;
        }
        Self::new(out)
    }

    /// Splits off the largest power of `x` dividing `p`: returns `(j, q)`
    /// with `p = x^j q` and `q(0) != 0` (unless `p` is zero).
    pub fn strip_low_powers(&self) -> (usize, Self) {
        let j = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        (j, Self::new(self.coeffs[j.min(self.coeffs.len())..].to_vec()))
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_real(&self, x: &BigReal) -> BigReal {
        let digits = x.digits();
        self.coeffs
            .iter()
            .rev()
            .fold(BigReal::zero(digits), |acc, c| {
                acc * x + BigReal::from_rational(c, digits)
            })
    }

    /// Primitive integer polynomial with the same roots and the same sign
    /// everywhere (the multiplier is positive).
    pub fn to_integer_primitive(&self) -> Vec<BigInt> {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let gcd = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if gcd.is_zero() || gcd.is_one() {
            ints
        } else {
            ints.into_iter().map(|c| c / &gcd).collect()
        }
    }

    /// Number of sign variations in the coefficient sequence; by Descartes'
    /// rule an upper bound on the count of positive roots, with equal parity.
    pub fn sign_variations(&self) -> usize {
        let signs: Vec<bool> = self
            .coeffs
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| c.is_positive())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// A power of two bounding the modulus of every root (Fujiwara's bound,
    /// doubled for slack in the floating-point estimate).
    pub fn root_bound(&self) -> Rational {
        let Some(d) = self.degree() else {
            return Rational::one();
        };
        if d == 0 {
            return Rational::one();
        }
        let lead = log2_abs(&self.coeffs[d]);
        let mut exponent = f64::NEG_INFINITY;
        for (i, c) in self.coeffs[..d].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = (d - i) as f64;
            let mut l = log2_abs(c) - lead;
            if i == 0 {
                l -= 1.0;
            }
            exponent = exponent.max(l / k);
        }
        if !exponent.is_finite() {
            return Rational::one();
        }
        let e = (exponent + 2.0).ceil().max(0.0) as usize;
        Rational::from_integer(BigInt::one() << e)
    }
}

fn log2_abs(c: &Rational) -> f64 {
    let (n, d) = (c.numer().abs(), c.denom().clone());
    let shift = |x: &BigInt| x.bits().saturating_sub(60);
    let ns = shift(&n);
    let ds = shift(&d);
    let nf = num_traits::ToPrimitive::to_f64(&(&n >> ns)).unwrap_or(f64::MAX);
    let df = num_traits::ToPrimitive::to_f64(&(&d >> ds)).unwrap_or(f64::MAX);
    nf.log2() - df.log2() + ns as f64 - ds as f64
}

/// Sign of `p(a/b)` for an integer polynomial, `b > 0`, computed exactly by
/// homogeneous Horner evaluation of `b^d p(a/b)`.
pub fn exact_sign(int_coeffs: &[BigInt], x: &Rational) -> i32 {
    let Some((lead, rest)) = int_coeffs.split_last() else {
        return 0;
    };
    let a = x.numer();
    let b = x.denom();
    let mut acc = lead.clone();
    let mut bpow = BigInt::one();
    for c in rest.iter().rev() {
        bpow *= b;
        acc = acc * a + c * &bpow;
    }
    match acc.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

impl Add for &PolynomialR {
    type Output = PolynomialR;
    fn add(self, rhs: &PolynomialR) -> PolynomialR {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolynomialR::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &PolynomialR {
    type Output = PolynomialR;
    fn sub(self, rhs: &PolynomialR) -> PolynomialR {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolynomialR::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &PolynomialR {
    type Output = PolynomialR;
    fn mul(self, rhs: &PolynomialR) -> PolynomialR {
        if self.is_zero() || rhs.is_zero() {
            return PolynomialR::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolynomialR::new(out)
    }
}

impl Neg for &PolynomialR {
    type Output = PolynomialR;
    fn neg(self) -> PolynomialR {
        PolynomialR::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for PolynomialR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})x"),
                _ => format!("({c})x^{i}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}
