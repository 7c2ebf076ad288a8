use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{solve, QuotientProblem, SolveReport, SolverConfig};
use crate::error::{Error, Result};
use crate::mesh::{Focus, GridSpec, Spacing};
use crate::model::{critical_exponent, SymmetryClass};
use crate::reduction::WeightKind;
use crate::scalar::Real;

/// Relative change under box doubling above which a limit constant is
/// rejected.
pub const TRUNCATION_LIMIT: f64 = 0.01;

/// Truncated half-space box and its resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LimitSetup {
    pub s_max: f64,
    pub t_max: f64,
    pub n_s: usize,
    pub n_t: usize,
    /// Geometric grading toward `s = 0`.
    pub grading_s: f64,
    /// Geometric grading toward `t = 0`.
    pub grading_t: f64,
}

impl Default for LimitSetup {
    fn default() -> Self {
        Self { s_max: 32.0, t_max: 32.0, n_s: 160, n_t: 160, grading_s: 1.025, grading_t: 1.025 }
    }
}

impl LimitSetup {
    pub fn grid_spec(&self, n: usize) -> GridSpec {
        GridSpec::half_space(self.s_max, self.t_max, n, self.n_s, self.n_t)
            .with_spacing1(Spacing::toward(self.grading_s, Focus::Lower))
            .with_spacing2(Spacing::toward(self.grading_t, Focus::Lower))
    }

    /// Box with both sides doubled. Graded axes gain enough nodes to keep
    /// their finest spacing; uniform axes double their node count.
    pub fn doubled(&self) -> Self {
        let extra = |count: usize, ratio: f64| {
            if ratio > 1.0 {
                count + (2f64.ln() / ratio.ln()).round() as usize
            } else {
                2 * count - 1
            }
        };
        Self {
            s_max: 2.0 * self.s_max,
            t_max: 2.0 * self.t_max,
            n_s: extra(self.n_s, self.grading_s),
            n_t: extra(self.n_t, self.grading_t),
            ..*self
        }
    }
}

/// Estimate of `m_{γ,p} = inf {∫|∇w|² : ∫ e^{-γt}|w|^p = 1}` over the
/// half-space in dimension `n`, without the angular constant.
#[derive(Debug, Clone)]
pub struct LimitConstant<T> {
    pub gamma: f64,
    pub p: f64,
    pub n: usize,
    pub value: T,
    /// Value on the doubled box.
    pub doubled_value: T,
    /// `|doubled_value - value| / value`.
    pub relative_change: T,
    pub setup: LimitSetup,
    /// Minimizer on the base box.
    pub report: SolveReport<T>,
}

impl<T: Real> LimitConstant<T> {
    /// Height of the maximizer on the symmetry axis.
    pub fn max_height(&self) -> T {
        self.report.max_location.1
    }
}

fn solve_box<T: Real>(gamma: f64, p: f64, n: usize, setup: &LimitSetup, config: &SolverConfig) -> Result<SolveReport<T>> {
    let grid = Arc::new(setup.grid_spec(n).build::<T>()?);
    let problem = QuotientProblem::new(grid, WeightKind::Exponential { gamma }, T::zero(), T::lit(p), SymmetryClass::AxiSym)?;
    solve(&problem, config)?.ensure_converged()
}

pub fn solve_limit_constant<T: Real>(
    gamma: f64,
    p: f64,
    n: usize,
    setup: &LimitSetup,
    config: &SolverConfig,
) -> Result<LimitConstant<T>> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Invalid(format!("gamma = {gamma} must be positive")));
    }
    if n < 3 {
        return Err(Error::BadDimension(format!("n = {n} must be at least 3")));
    }
    let upper = critical_exponent(n);
    if !(p > 2.0 && p < upper) {
        return Err(Error::ExponentOutOfRange { p, lower: 2.0, upper });
    }
    let report = solve_box::<T>(gamma, p, n, setup, config)?;
    let doubled = solve_box::<T>(gamma, p, n, &setup.doubled(), config)?;
    let value = report.quotient;
    let doubled_value = doubled.quotient;
    let relative_change = ((doubled_value - value) / value).abs();
    if relative_change > T::lit(TRUNCATION_LIMIT) {
        return Err(Error::TruncationUnstable { relative_change: relative_change.to_f64_lossy() });
    }
    Ok(LimitConstant { gamma, p, n, value, doubled_value, relative_change, setup: *setup, report })
}
