//! Exact arithmetic on finite cosine series `sum_k c_k cos(k xi)`.
//!
//! An even solution started from `q(0) = 1, q'(0) = 0` never leaves cosine
//! space, so there is no sine part. Coefficients live in a sparse map keyed
//! by harmonic index; zero coefficients are never stored.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numerics::Rational;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrigPoly {
    coeffs: BTreeMap<u32, Rational>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `c cos(k xi)`
    pub fn term(k: u32, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(k, c);
        p
    }

    /// `cos(k xi)`
    pub fn cos(k: u32) -> Self {
        Self::term(k, Rational::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u32, Rational)>) -> Self {
        let mut p = Self::zero();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of stored (nonzero) harmonics.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `cos(k xi)`, zero if absent.
    pub fn coefficient(&self, k: u32) -> Rational {
        self.coeffs.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    /// [`coefficient`](Self::coefficient) for an index that may be out of range.
    pub fn coefficient_checked(&self, k: i64) -> Result<Rational> {
        let k = u32::try_from(k)
            .map_err(|_| Error::Usage(format!("harmonic index {k} must be a non-negative integer")))?;
        Ok(self.coefficient(k))
    }

    /// Nonzero `(harmonic, coefficient)` pairs in increasing harmonic order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn max_harmonic(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn only_odd_harmonics(&self) -> bool {
        self.coeffs.keys().all(|k| k % 2 == 1)
    }

    /// Value at `xi = 0`: the plain sum of the coefficients.
    pub fn value_at_zero(&self) -> Rational {
        self.coeffs.values().fold(Rational::zero(), |acc, c| acc + c)
    }

    pub fn add_term(&mut self, k: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(k) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += factor * other`
    pub fn add_scaled(&mut self, other: &TrigPoly, factor: &Rational) {
        if factor.is_zero() {
            return;
        }
        for (k, c) in &other.coeffs {
            self.add_term(*k, c * factor);
        }
    }

    pub fn scale(&self, factor: &Rational) -> TrigPoly {
        if factor.is_zero() {
            return TrigPoly::zero();
        }
        TrigPoly {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, c * factor)).collect(),
        }
    }

    /// Product via `cos(j)cos(k) = (cos(|j-k|) + cos(j+k)) / 2`.
    ///
    /// Both factors are brought to a common denominator first so the inner
    /// loop runs on integers; each output coefficient is reduced once.
    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        let (Some(ja), Some(kb)) = (self.max_harmonic(), other.max_harmonic()) else {
            return TrigPoly::zero();
        };
        let (da, na) = self.integer_form();
        let (db, nb) = other.integer_form();
        let mut acc = vec![BigInt::zero(); (ja + kb) as usize + 1];
        for (j, a) in &na {
            for (k, b) in &nb {
                let p = a * b;
                acc[j.abs_diff(*k) as usize] += &p;
                acc[(j + k) as usize] += p;
            }
        }
        let denom = da * db * BigInt::from(2);
        TrigPoly {
            coeffs: acc
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (k as u32, Rational::new(c, denom.clone())))
                .collect(),
        }
    }

    /// `(d, [(k, n_k)])` with `c_k = n_k / d`.
    fn integer_form(&self) -> (BigInt, Vec<(u32, BigInt)>) {
        let d = self
            .coeffs
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints = self
            .coeffs
            .iter()
            .map(|(k, c)| (*k, c.numer() * (&d / c.denom())))
            .collect();
        (d, ints)
    }

    /// `d^2/dxi^2`: harmonic `k` picks up a factor `-k^2`.
    pub fn second_derivative(&self) -> TrigPoly {
        TrigPoly {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| **k != 0)
                .map(|(k, c)| {
                    let k2 = BigInt::from(u64::from(*k) * u64::from(*k));
                    (*k, -c * Rational::from_integer(k2))
                })
                .collect(),
        }
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl Sub for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Mul for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        TrigPoly::mul(self, rhs)
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c})cos(xi)"),
                _ => format!("({c})cos({k}xi)"),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn add_examples() {
        let c = TrigPoly::cos(1);
        assert_eq!(&c + &c, TrigPoly::term(1, r(2, 1)));
        assert!((&c + &(-&c)).is_zero());
        let sum = &TrigPoly::term(1, r(3, 4)) + &TrigPoly::term(3, r(1, 4));
        assert_eq!(sum.coefficient(1), r(3, 4));
        assert_eq!(sum.coefficient(3), r(1, 4));
        assert_eq!(sum.len(), 2);
    }

    #[test]
    fn mul_examples() {
        let c1 = TrigPoly::cos(1);
        assert_eq!(
            &c1 * &c1,
            TrigPoly::from_terms([(0, r(1, 2)), (2, r(1, 2))])
        );
        assert_eq!(
            &c1 * &TrigPoly::cos(3),
            TrigPoly::from_terms([(2, r(1, 2)), (4, r(1, 2))])
        );
        assert_eq!(
            &(&c1 * &c1) * &c1,
            TrigPoly::from_terms([(1, r(3, 4)), (3, r(1, 4))])
        );
    }

    #[test]
    fn second_derivative_examples() {
        assert_eq!(TrigPoly::cos(1).second_derivative(), TrigPoly::term(1, r(-1, 1)));
        assert_eq!(TrigPoly::cos(3).second_derivative(), TrigPoly::term(3, r(-9, 1)));
        assert!(TrigPoly::term(0, r(1, 2)).second_derivative().is_zero());
    }

    #[test]
    fn coefficient_lookup() {
        let p = TrigPoly::from_terms([(1, r(3, 4)), (3, r(1, 4))]);
        assert_eq!(p.coefficient(3), r(1, 4));
        assert_eq!(TrigPoly::term(1, r(3, 4)).coefficient(5), r(0, 1));
        assert_eq!(p.coefficient_checked(1).unwrap(), r(3, 4));
        assert!(matches!(p.coefficient_checked(-1), Err(Error::Usage(_))));
    }

    #[test]
    fn zero_terms_are_not_stored() {
        let mut p = TrigPoly::term(2, r(1, 3));
        p.add_term(2, r(-1, 3));
        p.add_term(5, r(0, 1));
        assert!(p.is_zero());
        assert_eq!(p, TrigPoly::zero());
    }

    /// Sine-cosine pair used only to check the product rule: `(cos, sin)`
    /// coefficient maps.
    #[derive(Clone, Debug, Default, PartialEq)]
    struct Mixed {
        cos: BTreeMap<u32, Rational>,
        sin: BTreeMap<u32, Rational>,
    }

    fn put(m: &mut BTreeMap<u32, Rational>, k: u32, c: Rational) {
        *m.entry(k).or_insert_with(Rational::zero) += c;
    }

    impl Mixed {
        fn from_cos(p: &TrigPoly) -> Self {
            Mixed {
                cos: p.terms().map(|(k, c)| (k, c.clone())).collect(),
                sin: BTreeMap::new(),
            }
        }

        fn derivative(&self) -> Self {
            let mut out = Mixed::default();
            for (k, c) in &self.cos {
                put(&mut out.sin, *k, -c * Rational::from_integer((*k).into()));
            }
            for (k, c) in &self.sin {
                put(&mut out.cos, *k, c * Rational::from_integer((*k).into()));
            }
            out.clean()
        }

        fn mul(&self, other: &Mixed) -> Mixed {
            let half = r(1, 2);
            let mut out = Mixed::default();
            for (j, a) in &self.cos {
                for (k, b) in &other.cos {
                    let p = a * b * &half;
                    put(&mut out.cos, j.abs_diff(*k), p.clone());
                    put(&mut out.cos, j + k, p);
                }
                for (k, b) in &other.sin {
                    // cos j sin k = (sin(k+j) + sin(k-j)) / 2
                    let p = a * b * &half;
                    put(&mut out.sin, j + k, p.clone());
                    signed_sin(&mut out.sin, i64::from(*k) - i64::from(*j), p);
                }
            }
            for (j, a) in &self.sin {
                for (k, b) in &other.cos {
                    let p = a * b * &half;
                    put(&mut out.sin, j + k, p.clone());
                    signed_sin(&mut out.sin, i64::from(*j) - i64::from(*k), p);
                }
                for (k, b) in &other.sin {
                    // sin j sin k = (cos(j-k) - cos(j+k)) / 2
                    let p = a * b * &half;
                    put(&mut out.cos, j.abs_diff(*k), p.clone());
                    put(&mut out.cos, j + k, -p);
                }
            }
            out.clean()
        }

        fn add(&self, other: &Mixed) -> Mixed {
            let mut out = self.clone();
            for (k, c) in &other.cos {
                put(&mut out.cos, *k, c.clone());
            }
            for (k, c) in &other.sin {
                put(&mut out.sin, *k, c.clone());
            }
            out.clean()
        }

        fn scale(&self, f: &Rational) -> Mixed {
            Mixed {
                cos: self.cos.iter().map(|(k, c)| (*k, c * f)).collect(),
                sin: self.sin.iter().map(|(k, c)| (*k, c * f)).collect(),
            }
            .clean()
        }

        fn clean(mut self) -> Self {
            self.cos.retain(|_, c| !c.is_zero());
            self.sin.retain(|k, c| *k != 0 && !c.is_zero());
            self
        }
    }

    fn signed_sin(m: &mut BTreeMap<u32, Rational>, k: i64, c: Rational) {
        if k >= 0 {
            put(m, k as u32, c);
        } else {
            put(m, (-k) as u32, -c);
        }
    }

    fn small_poly() -> impl Strategy<Value = TrigPoly> {
        prop::collection::vec((0u32..6, -6i64..7, 1i64..5), 0..4).prop_map(|terms| {
            TrigPoly::from_terms(terms.into_iter().map(|(k, n, d)| (k, r(n, d))))
        })
    }

    proptest! {
        #[test]
        fn mul_is_commutative(a in small_poly(), b in small_poly()) {
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn mul_is_associative(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn mul_distributes(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn product_rule(a in small_poly(), b in small_poly()) {
            let lhs = Mixed::from_cos(&(&a * &b).second_derivative());
            let (ma, mb) = (Mixed::from_cos(&a), Mixed::from_cos(&b));
            let (da, db) = (ma.derivative(), mb.derivative());
            let rhs = da
                .derivative()
                .mul(&mb)
                .add(&da.mul(&db).scale(&r(2, 1)))
                .add(&ma.mul(&db.derivative()));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
