//! Configurable-precision real numbers.
//!
//! [`BigReal`] wraps an `astro_float::BigFloat` together with the decimal
//! working precision it was created at. Binary operations run at the larger
//! of the two operand precisions, so precisions never mix silently.
//! Conversions from [`Rational`] are correctly rounded (half to even) and
//! conversions back to [`Rational`] are exact.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint, Sign as IntSign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact fraction of arbitrary-precision integers, always in lowest terms
/// with a positive denominator.
pub type Rational = num_rational::BigRational;

const RM: RoundingMode = RoundingMode::ToEven;
const WORD_BITS: usize = 64;
const LOG2_10: f64 = std::f64::consts::LOG2_10;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Binary precision (a whole number of 64-bit words) used for `digits`
/// significant decimal digits, with a few guard bits.
pub fn bits_for_digits(digits: u32) -> usize {
    let raw = (f64::from(digits) * LOG2_10).ceil() as usize + 8;
    raw.div_ceil(WORD_BITS) * WORD_BITS
}

/// Arbitrary-precision binary floating value with an associated decimal
/// working precision.
#[derive(Clone)]
pub struct BigReal {
    value: BigFloat,
    digits: u32,
}

impl BigReal {
    fn wrap(value: BigFloat, digits: u32) -> Self {
        debug_assert!(!value.is_nan(), "NaN produced: {:?}", value.err());
        BigReal { value, digits }
    }

    fn bits(&self) -> usize {
        bits_for_digits(self.digits)
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn zero(digits: u32) -> Self {
        Self::wrap(BigFloat::new(bits_for_digits(digits)), digits)
    }

    pub fn one(digits: u32) -> Self {
        Self::from_i64(1, digits)
    }

    pub fn from_i64(v: i64, digits: u32) -> Self {
        Self::wrap(BigFloat::from_i64(v, bits_for_digits(digits)), digits)
    }

    /// Exact: every `f64` fits in the mantissa.
    pub fn from_f64(v: f64, digits: u32) -> Self {
        Self::wrap(BigFloat::from_f64(v, bits_for_digits(digits)), digits)
    }

    pub fn pi(digits: u32) -> Self {
        let p = bits_for_digits(digits);
        Self::wrap(with_consts(|cc| cc.pi(p, RM)), digits)
    }

    /// Correctly rounded conversion of an exact fraction.
    pub fn from_rational(q: &Rational, digits: u32) -> Self {
        let p = bits_for_digits(digits);
        if q.is_zero() {
            return Self::zero(digits);
        }
        let sign = if q.is_negative() { Sign::Neg } else { Sign::Pos };
        let num = q.numer().magnitude().clone();
        let den = q.denom().magnitude().clone();

        // Find s with 2^(p-1) <= num * 2^s / den < 2^p.
        let mut s = p as i64 - (num.bits() as i64 - den.bits() as i64);
        let (mut quot, rem, divisor) = loop {
            let (n, d) = if s >= 0 {
                (&num << s as usize, den.clone())
            } else {
                (num.clone(), &den << (-s) as usize)
            };
            let (quot, rem) = n.div_rem(&d);
            match quot.bits().cmp(&(p as u64)) {
                Ordering::Greater => s -= 1,
                Ordering::Less => s += 1,
                Ordering::Equal => break (quot, rem, d),
            }
        };
        let twice = &rem << 1usize;
        let round_up = match twice.cmp(&divisor) {
            Ordering::Greater => true,
            Ordering::Equal => quot.is_odd(),
            Ordering::Less => false,
        };
        if round_up {
            quot += 1u32;
            if quot.bits() > p as u64 {
                quot >>= 1usize;
                s -= 1;
            }
        }
        let mut words = quot.to_u64_digits();
        words.resize(p / WORD_BITS, 0);
        let exponent = (p as i64 - s) as i32;
        let value = BigFloat::from_raw_parts(&words, p, sign, exponent, !rem.is_zero());
        Self::wrap(value, digits)
    }

    /// Parses a decimal (`-1.25e-3`) or fraction (`3/8`) literal.
    pub fn parse(text: &str, digits: u32) -> Result<Self> {
        Ok(Self::from_rational(&parse_rational(text)?, digits))
    }

    /// Exact value of the binary float as a fraction.
    pub fn to_rational(&self) -> Rational {
        let (words, _, sign, exponent, _) = self
            .value
            .as_raw_parts()
            .expect("finite BigReal has raw parts");
        if words.iter().all(|w| *w == 0) {
            return Rational::zero();
        }
        let limbs: Vec<u32> = words
            .iter()
            .flat_map(|w| [*w as u32, (*w >> 32) as u32])
            .collect();
        let mantissa = BigInt::from_biguint(
            if sign == Sign::Neg { IntSign::Minus } else { IntSign::Plus },
            BigUint::new(limbs),
        );
        let shift = exponent as i64 - (words.len() * WORD_BITS) as i64;
        if shift >= 0 {
            Rational::from_integer(mantissa << shift as usize)
        } else {
            Rational::new(mantissa, BigInt::one() << (-shift) as usize)
        }
    }

    pub fn to_f64(&self) -> f64 {
        let q = self.to_rational();
        if q.is_zero() {
            return 0.0;
        }
        // Keep 64 significant bits before handing over to f64.
        let num_bits = q.numer().bits() as i64;
        let den_bits = q.denom().bits() as i64;
        let shift = 64 - (num_bits - den_bits);
        let scaled = if shift >= 0 {
            (q.numer() << shift as usize) / q.denom()
        } else {
            q.numer() / (q.denom() << (-shift) as usize)
        };
        scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-shift as i32)
    }

    /// Rounds (or widens) to a new working precision.
    pub fn with_digits(&self, digits: u32) -> Self {
        let mut value = self.value.clone();
        value
            .set_precision(bits_for_digits(digits), RM)
            .expect("precision change");
        Self::wrap(value, digits)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.is_zero() && self.value.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        !self.is_zero() && self.value.is_negative()
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.value.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.value.abs(), self.digits)
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.value.reciprocal(self.bits(), RM), self.digits)
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.value.sqrt(self.bits(), RM), self.digits)
    }

    pub fn ln(&self) -> Self {
        let p = self.bits();
        Self::wrap(with_consts(|cc| self.value.ln(p, RM, cc)), self.digits)
    }

    pub fn exp(&self) -> Self {
        let p = self.bits();
        Self::wrap(with_consts(|cc| self.value.exp(p, RM, cc)), self.digits)
    }

    pub fn sin(&self) -> Self {
        let p = self.bits();
        Self::wrap(with_consts(|cc| self.value.sin(p, RM, cc)), self.digits)
    }

    pub fn cos(&self) -> Self {
        let p = self.bits();
        Self::wrap(with_consts(|cc| self.value.cos(p, RM, cc)), self.digits)
    }

    pub fn sinh(&self) -> Self {
        let p = self.bits();
        Self::wrap(with_consts(|cc| self.value.sinh(p, RM, cc)), self.digits)
    }

    pub fn cosh(&self) -> Self {
        let p = self.bits();
        Self::wrap(with_consts(|cc| self.value.cosh(p, RM, cc)), self.digits)
    }

    /// Integer power by repeated squaring; negative exponents go through
    /// the reciprocal.
    pub fn powi(&self, n: i64) -> Self {
        let positive = Self::wrap(
            self.value.powi(n.unsigned_abs() as usize, self.bits(), RM),
            self.digits,
        );
        if n < 0 {
            positive.recip()
        } else {
            positive
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Relative deviation `|self - reference| / |reference|`.
    pub fn rel_diff(&self, reference: &BigReal) -> BigReal {
        ((self - reference) / reference).abs()
    }

    /// Decimal rendering with `sig` significant digits, correctly rounded
    /// from the exact binary value. Plain notation for magnitudes in
    /// `[1e-5, 1e21)`, scientific otherwise.
    pub fn to_decimal(&self, sig: u32) -> String {
        format_decimal(&self.to_rational(), sig.max(1))
    }
}

/// Parses `-12.5e-3`, `7`, or `-21/256` into an exact fraction.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let err = || Error::Parse {
        what: "number",
        input: text.to_string(),
    };
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(err());
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| err())?;
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let mut q = if scale >= 0 {
        Rational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        q = -q;
    }
    Ok(q)
}

fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), k as usize)
}

fn format_decimal(q: &Rational, sig: u32) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let x = q.abs();
    // Decimal exponent k with 10^k <= x < 10^(k+1).
    let approx = (x.numer().bits() as f64 - x.denom().bits() as f64) * std::f64::consts::LOG10_2;
    let mut k = approx.floor() as i64;
    let ten_pow = |e: i64| -> Rational {
        if e >= 0 {
            Rational::from_integer(pow10(e as u32))
        } else {
            Rational::new(BigInt::one(), pow10((-e) as u32))
        }
    };
    while ten_pow(k) > x {
        k -= 1;
    }
    while ten_pow(k + 1) <= x {
        k += 1;
    }
    let scaled = x * ten_pow(sig as i64 - 1 - k);
    let mut m = round_half_even(&scaled);
    if m >= pow10(sig) {
        m /= 10;
        k += 1;
    }
    let digits = m.to_string();
    let sign = if q.is_negative() { "-" } else { "" };
    if !(-5..21).contains(&k) {
        let (head, tail) = digits.split_at(1);
        let tail = if tail.is_empty() {
            String::new()
        } else {
            format!(".{tail}")
        };
        return format!("{sign}{head}{tail}e{k}");
    }
    if k >= 0 {
        let int_len = (k + 1) as usize;
        if digits.len() <= int_len {
            format!("{sign}{digits}{}", "0".repeat(int_len - digits.len()))
        } else {
            format!("{sign}{}.{}", &digits[..int_len], &digits[int_len..])
        }
    } else {
        format!("{sign}0.{}{digits}", "0".repeat((-k - 1) as usize))
    }
}

fn round_half_even(x: &Rational) -> BigInt {
    let floor = x.floor().to_integer();
    let frac = x - Rational::from_integer(floor.clone());
    let half = Rational::new(BigInt::one(), BigInt::from(2u32));
    match frac.cmp(&half) {
        Ordering::Greater => floor + 1,
        Ordering::Less => floor,
        Ordering::Equal if floor.is_odd() => floor + 1,
        Ordering::Equal => floor,
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => f.write_str(&self.to_decimal(p as u32)),
            None => f.write_str(&self.to_decimal(self.digits)),
        }
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({}, digits={})", self.to_decimal(self.digits), self.digits)
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.value.cmp(&other.value) == Some(0)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.cmp(&other.value).map(|c| c.cmp(&0))
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(self.value.neg(), self.digits)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(self.value.clone().neg(), self.digits)
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident) => {
        impl $trait<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                let digits = self.digits.max(rhs.digits);
                let value = self.value.$method(&rhs.value, bits_for_digits(digits), RM);
                BigReal::wrap(value, digits)
            }
        }
        impl $trait<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                (&self).$method(rhs)
            }
        }
        impl $trait<BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                self.$method(&rhs)
            }
        }
    };
}

binary_op!(Add, add);
binary_op!(Sub, sub);
binary_op!(Mul, mul);
binary_op!(Div, div);
