use super::real::BigReal;
use crate::error::{Error, Result};

/// Ordinary least-squares line `y = alpha + beta x`.
#[derive(Clone, Debug)]
pub struct LineFit {
    pub alpha: BigReal,
    pub beta: BigReal,
    /// Root-mean-square deviation of the points from the line.
    pub residual: BigReal,
}

pub fn fit_line(points: &[(BigReal, BigReal)]) -> Result<LineFit> {
    if points.len() < 2 {
        return Err(Error::Domain(format!(
            "line fit needs at least two points, got {}",
            points.len()
        )));
    }
    let digits = points
        .iter()
        .map(|(x, y)| x.digits().max(y.digits()))
        .max()
        .unwrap_or(30);
    let n = BigReal::from_i64(points.len() as i64, digits);
    let zero = BigReal::zero(digits);
    let mean_x = points.iter().fold(zero.clone(), |s, (x, _)| s + x) / &n;
    let mean_y = points.iter().fold(zero.clone(), |s, (_, y)| s + y) / &n;
    let (mut sxx, mut sxy) = (zero.clone(), zero.clone());
    for (x, y) in points {
        let dx = x - &mean_x;
        sxy = sxy + &dx * (y - &mean_y);
        sxx = sxx + &dx * &dx;
    }
    if sxx.is_zero() {
        return Err(Error::Domain("line fit abscissae are all equal".into()));
    }
    let beta = sxy / sxx;
    let alpha = &mean_y - &beta * &mean_x;
    let sq = points.iter().fold(zero, |s, (x, y)| {
        let r = y - &alpha - &beta * x;
        s + &r * &r
    });
    let residual = (sq / n).sqrt();
    Ok(LineFit {
        alpha,
        beta,
        residual,
    })
}
