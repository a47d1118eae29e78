//! Dormand–Prince 5(4) integrator with continuous (dense) output.
//!
//! Works on fixed-size `f64` states. The caller observes every accepted
//! step through a callback and can stop the integration early, which is how
//! event location is layered on top (see `exact_freq::ode_period_oracle`).

use std::ops::ControlFlow;

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the fifth- and fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense output weights (Hairer & Wanner, contd5).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            rtol: tol,
            atol: tol,
            h_min: 1e-14,
            max_steps: 10_000_000,
        }
    }
}

/// One accepted step together with its interpolation coefficients.
#[derive(Clone, Debug)]
pub struct AcceptedStep<const D: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; D],
    pub y1: [f64; D],
    cont: [[f64; D]; 5],
}

impl<const D: usize> AcceptedStep<D> {
    /// State at `t` in `[t0, t1]` from the fourth-order continuous extension.
    pub fn interpolate(&self, t: f64) -> [f64; D] {
        let h = self.t1 - self.t0;
        let theta = (t - self.t0) / h;
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &self.cont;
        std::array::from_fn(|i| {
            r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])))
        })
    }
}

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` until `on_step` breaks or
/// `t_end` is reached.
pub fn integrate<const D: usize, F, C>(
    f: F,
    t0: f64,
    y0: [f64; D],
    t_end: f64,
    tol: Tolerances,
    mut on_step: C,
) -> Result<usize>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
    C: FnMut(&AcceptedStep<D>) -> ControlFlow<()>,
{
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = initial_step(&y, &k1, tol).min(t_end - t0);
    let mut accepted = 0usize;

    for _ in 0..tol.max_steps {
        if t >= t_end {
            return Ok(accepted);
        }
        if h < tol.h_min {
            return Err(Error::Integration(format!(
                "step size underflow at t = {t:e} (h = {h:e})"
            )));
        }
        h = h.min(t_end - t);

        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + h, &y_new);

        let err_vec = axpy(
            &[0.0; D],
            h,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
        );
        let err = (err_vec
            .iter()
            .zip(y.iter().zip(&y_new))
            .map(|(e, (a, b))| {
                let sc = tol.atol + tol.rtol * a.abs().max(b.abs());
                (e / sc).powi(2)
            })
            .sum::<f64>()
            / D as f64)
            .sqrt();

        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        if err > 1.0 {
            h *= factor.min(1.0);
            continue;
        }

        let r2: [f64; D] = std::array::from_fn(|i| y_new[i] - y[i]);
        let r3: [f64; D] = std::array::from_fn(|i| h * k1[i] - r2[i]);
        let r4: [f64; D] = std::array::from_fn(|i| r2[i] - h * k7[i] - r3[i]);
        let r5 = axpy(
            &[0.0; D],
            h,
            &[(D1, &k1), (D3, &k3), (D4, &k4), (D5, &k5), (D6, &k6), (D7, &k7)],
        );
        let step = AcceptedStep {
            t0: t,
            t1: t + h,
            y0: y,
            y1: y_new,
            cont: [y, r2, r3, r4, r5],
        };
        accepted += 1;
        t += h;
        y = y_new;
        k1 = k7;
        h *= factor;
        if on_step(&step).is_break() {
            return Ok(accepted);
        }
    }
    Err(Error::Integration(format!(
        "exceeded {} steps before t = {t_end:e}",
        tol.max_steps
    )))
}

fn initial_step<const D: usize>(y: &[f64; D], dy: &[f64; D], tol: Tolerances) -> f64 {
    let scale = |v: f64| tol.atol + tol.rtol * v.abs();
    let d0 = (y.iter().map(|v| (v / scale(*v)).powi(2)).sum::<f64>() / D as f64).sqrt();
    let d1 = (dy
        .iter()
        .zip(y)
        .map(|(d, v)| (d / scale(*v)).powi(2))
        .sum::<f64>()
        / D as f64)
        .sqrt();
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        (0.01 * d0 / d1).min(0.1)
    }
}

/// Locates a root of `g` on `[a, b]` by bisection, given opposite signs.
pub fn bisect_root(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut ga = g(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm > 0.0) == (ga > 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
