use super::real::{bits_for_digits, BigReal};
use crate::error::{Error, Result};

/// Arithmetic–geometric mean of two positive numbers.
///
/// Iterates `a' = (a + b)/2`, `b' = sqrt(a b)` until `|a - b|` is at the
/// ulp scale of the working precision; convergence is quadratic, so a few
/// iterations suffice even at hundreds of digits.
pub fn agm(a: &BigReal, b: &BigReal) -> Result<BigReal> {
    if !a.is_positive() || !b.is_positive() {
        return Err(Error::Domain(format!("agm needs positive arguments, got {a} and {b}")));
    }
    let digits = a.digits().max(b.digits());
    let mut a = a.with_digits(digits);
    let mut b = b.with_digits(digits);
    let two = BigReal::from_i64(2, digits);
    let eps = two.powi(-(bits_for_digits(digits) as i64) + 4);
    // Quadratic convergence: the bit count doubles each pass.
    for _ in 0..64 {
        if (&a - &b).abs() <= &a * &eps {
            break;
        }
        let next_a = (&a + &b) / &two;
        b = (&a * &b).sqrt();
        a = next_a;
    }
    Ok((a + b) / two)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point() {
        let x = BigReal::parse("1.7", 40).unwrap();
        assert_eq!(agm(&x, &x).unwrap().to_decimal(35), x.to_decimal(35));
    }

    #[test]
    fn symmetric() {
        let a = BigReal::from_i64(1, 50);
        let b = BigReal::parse("0.25", 50).unwrap();
        assert_eq!(agm(&a, &b).unwrap().to_decimal(48), agm(&b, &a).unwrap().to_decimal(48));
    }

    #[test]
    fn gauss_constant() {
        // 1/agm(1, sqrt 2) is Gauss's constant 0.8346268416740731862814297...
        let one = BigReal::from_i64(1, 40);
        let g = agm(&one, &BigReal::from_i64(2, 40).sqrt()).unwrap().recip();
        assert_eq!(g.to_decimal(25), "0.8346268416740731862814297");
    }

    #[test]
    fn rejects_non_positive() {
        let one = BigReal::from_i64(1, 20);
        assert!(agm(&one, &BigReal::zero(20)).is_err());
        assert!(agm(&BigReal::from_i64(-1, 20), &one).is_err());
    }
}
