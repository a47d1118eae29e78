//! Real root isolation for rational polynomials.
//!
//! Brackets come from exact sign evaluation on a dyadic probe grid over
//! `(lo, hi]`: the grid starts at 64 cells and doubles until the number of
//! detected roots is unchanged across two successive refinements. Each
//! bracket is then refined by bisection in [`BigReal`], falling back to an
//! exact sign whenever the floating evaluation is within its rounding bound.
//! Roots of even multiplicity do not change sign; they are picked up as
//! sign changes of the derivative at which the polynomial nearly vanishes,
//! and reported with [`RootKind::EvenMultiplicity`].

use num_bigint::BigInt;
use num_traits::Zero;

use super::poly::{exact_sign, PolynomialR};
use super::real::{bits_for_digits, BigReal, Rational};

const INITIAL_CELLS: usize = 64;
const MAX_CELLS: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootKind {
    /// Sign change inside a grid cell, refined by bisection.
    Simple,
    /// The polynomial vanishes exactly at a probe point.
    Exact,
    /// No sign change; located through the derivative.
    EvenMultiplicity,
}

#[derive(Clone, Debug)]
pub struct RealRoot {
    pub value: BigReal,
    pub kind: RootKind,
}

impl RealRoot {
    pub fn is_flagged(&self) -> bool {
        self.kind == RootKind::EvenMultiplicity
    }
}

struct Grid {
    lo: Rational,
    width: Rational,
    cells: usize,
    signs: Vec<i32>,
}

impl Grid {
    fn point(&self, j: usize) -> Rational {
        &self.lo + &self.width * Rational::new(BigInt::from(j), BigInt::from(self.cells))
    }

    fn build(ints: &[BigInt], lo: &Rational, hi: &Rational, cells: usize) -> Self {
        let mut g = Grid {
            lo: lo.clone(),
            width: hi - lo,
            cells,
            signs: Vec::new(),
        };
        g.signs = (0..=cells).map(|j| exact_sign(ints, &g.point(j))).collect();
        g
    }

    /// Twice as many cells, reusing the signs already known.
    fn refine(&self, ints: &[BigInt]) -> Self {
        let cells = self.cells * 2;
        let mut g = Grid {
            lo: self.lo.clone(),
            width: self.width.clone(),
            cells,
            signs: Vec::with_capacity(cells + 1),
        };
        for j in 0..=cells {
            let s = if j % 2 == 0 {
                self.signs[j / 2]
            } else {
                exact_sign(ints, &g.point(j))
            };
            g.signs.push(s);
        }
        g
    }

    /// Exact zeros at probe points other than `lo`, plus cells whose
    /// endpoints carry strictly opposite signs.
    fn detections(&self) -> (Vec<usize>, Vec<usize>) {
        let zeros = (1..=self.cells).filter(|&j| self.signs[j] == 0).collect();
        let cells = (0..self.cells)
            .filter(|&j| self.signs[j] * self.signs[j + 1] < 0)
            .collect();
        (zeros, cells)
    }

    fn count(&self) -> usize {
        let (z, c) = self.detections();
        z.len() + c.len()
    }
}

fn stabilized_grid(ints: &[BigInt], lo: &Rational, hi: &Rational) -> Grid {
    let mut grid = Grid::build(ints, lo, hi, INITIAL_CELLS);
    let mut history = vec![grid.count()];
    while grid.cells < MAX_CELLS {
        grid = grid.refine(ints);
        history.push(grid.count());
        let n = history.len();
        if n >= 3 && history[n - 1] == history[n - 2] && history[n - 2] == history[n - 3] {
            break;
        }
    }
    grid
}

/// Evaluates `p(x)` together with a bound on its rounding error.
fn eval_with_bound(coeffs: &[BigReal], abs_coeffs: &[BigReal], x: &BigReal) -> (BigReal, BigReal) {
    let digits = x.digits();
    let ax = x.abs();
    let mut val = BigReal::zero(digits);
    let mut mag = BigReal::zero(digits);
    for (c, a) in coeffs.iter().rev().zip(abs_coeffs.iter().rev()) {
        val = val * x + c;
        mag = mag * &ax + a;
    }
    // Horner error is at most about 2d * 2^-p * sum |c_i| |x|^i.
    let n = coeffs.len() as i64;
    let eps = BigReal::from_i64(2, digits).powi(-(bits_for_digits(digits) as i64) + 2);
    let bound = mag * BigReal::from_i64(4 * n + 4, digits) * eps;
    (val, bound)
}

struct Refiner {
    ints: Vec<BigInt>,
    coeffs: Vec<BigReal>,
    abs_coeffs: Vec<BigReal>,
    digits: u32,
    target_bits: usize,
}

impl Refiner {
    fn new(p: &PolynomialR, digits: u32) -> Self {
        // Guard digits absorb cancellation in the Horner sums.
        let work = digits + 20;
        let coeffs: Vec<BigReal> = p
            .coeffs()
            .iter()
            .map(|c| BigReal::from_rational(c, work))
            .collect();
        let abs_coeffs = coeffs.iter().map(BigReal::abs).collect();
        Refiner {
            ints: p.to_integer_primitive(),
            coeffs,
            abs_coeffs,
            digits,
            target_bits: bits_for_digits(digits) + 4,
        }
    }

    fn sign(&self, x: &BigReal) -> i32 {
        let (val, bound) = eval_with_bound(&self.coeffs, &self.abs_coeffs, x);
        if val.abs() > bound {
            val.signum()
        } else {
            exact_sign(&self.ints, &x.to_rational())
        }
    }

    /// Bisection on `[a, b]` where the signs at the ends are opposite.
    fn bisect(&self, a: &Rational, b: &Rational) -> BigReal {
        let work = self.digits + 20;
        let mut a = BigReal::from_rational(a, work);
        let mut b = BigReal::from_rational(b, work);
        let mut sa = self.sign(&a);
        let half = BigReal::from_rational(&Rational::new(1.into(), 2.into()), work);
        let tiny = BigReal::from_i64(2, work).powi(-(self.target_bits as i64));
        let max_steps = 4 * self.target_bits + 4096;
        for _ in 0..max_steps {
            let mid = (&a + &b) * &half;
            let scale = mid.abs().max(tiny.clone());
            if (&b - &a).abs() <= &scale * &tiny {
                break;
            }
            let sm = self.sign(&mid);
            if sm == 0 {
                return mid.with_digits(self.digits);
            }
            if sm == sa {
                a = mid;
                sa = sm;
            } else {
                b = mid;
            }
        }
        ((a + b) * half).with_digits(self.digits)
    }
}

/// All real roots of `p` in `(lo, hi]`, ascending, at `digits` precision.
pub fn real_roots(p: &PolynomialR, lo: &Rational, hi: &Rational, digits: u32) -> Vec<RealRoot> {
    assert!(lo < hi, "empty interval");
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let refiner = Refiner::new(p, digits);
    let grid = stabilized_grid(&refiner.ints, lo, hi);
    let (zeros, cells) = grid.detections();

    let mut roots: Vec<(Rational, RealRoot)> = Vec::new();
    for j in zeros {
        let x = grid.point(j);
        roots.push((
            x.clone(),
            RealRoot {
                value: BigReal::from_rational(&x, digits),
                kind: RootKind::Exact,
            },
        ));
    }
    for j in cells {
        let (a, b) = (grid.point(j), grid.point(j + 1));
        let value = refiner.bisect(&a, &b);
        roots.push((
            a,
            RealRoot {
                value,
                kind: RootKind::Simple,
            },
        ));
    }

    // Even-multiplicity candidates: derivative sign changes in cells where p
    // keeps its sign.
    let dp = p.derivative();
    if dp.degree().unwrap_or(0) > 0 {
        let dref = Refiner::new(&dp, digits);
        let tol = BigReal::from_i64(10, digits).powi(-(i64::from(digits) / 2));
        for j in 0..grid.cells {
            if grid.signs[j] * grid.signs[j + 1] <= 0 {
                continue;
            }
            let (a, b) = (grid.point(j), grid.point(j + 1));
            let sa = exact_sign(&dref.ints, &a);
            let sb = exact_sign(&dref.ints, &b);
            if sa * sb >= 0 {
                continue;
            }
            let r = dref.bisect(&a, &b);
            let x = r.with_digits(digits + 20);
            let val = p.eval_real(&x);
            let magnitude = refiner
                .abs_coeffs
                .iter()
                .rev()
                .fold(BigReal::zero(digits + 20), |acc, c| acc * x.abs() + c);
            if val.abs() <= &magnitude * &tol {
                roots.push((
                    a,
                    RealRoot {
                        value: r,
                        kind: RootKind::EvenMultiplicity,
                    },
                ));
            }
        }
    }

    roots.sort_by(|x, y| x.0.cmp(&y.0));
    roots.into_iter().map(|(_, r)| r).collect()
}

/// All positive real roots, using `(0, B]` with `B` a root modulus bound.
pub fn positive_roots(p: &PolynomialR, digits: u32) -> Vec<RealRoot> {
    let (_, q) = p.strip_low_powers();
    if q.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let hi = q.root_bound();
    real_roots(&q, &Rational::zero(), &hi, digits)
        .into_iter()
        .filter(|r| r.value.is_positive())
        .collect()
}
