//! Ordinary least squares on a line, used for every log-log slope estimate.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Coefficient of determination, clamped to `[0, 1]`.
    pub r_squared: T,
}

pub fn fit_line<T: Real>(xs: &[T], ys: &[T]) -> Result<LineFit<T>> {
    if xs.len() != ys.len() {
        return Err(Error::Invalid(format!("{} abscissae for {} ordinates", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::InsufficientData(format!("line fit needs 2 points, got {}", xs.len())));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Invalid("non-finite value in line fit".into()));
    }
    let n = T::from_usize_lossy(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    if sxx <= T::zero() {
        return Err(Error::InsufficientData("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy <= T::zero() {
        T::one()
    } else {
        let sse: T = xs.iter().zip(ys).map(|(&x, &y)| (y - intercept - slope * x).powi(2)).sum();
        (T::one() - sse / syy).max(T::zero()).min(T::one())
    };
    Ok(LineFit { slope, intercept, r_squared })
}

/// Fits `log y = slope * log x + intercept`.
pub fn fit_loglog<T: Real>(xs: &[T], ys: &[T]) -> Result<LineFit<T>> {
    if xs.iter().chain(ys).any(|v| *v <= T::zero()) {
        return Err(Error::Invalid("log-log fit needs positive data".into()));
    }
    let lx: Vec<T> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|y| y.ln()).collect();
    fit_line(&lx, &ly)
}
