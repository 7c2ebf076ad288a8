//! Sweeps in `alpha`, concentration diagnostics, scaling-law fits and
//! comparisons with the half-space limit constants.

use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{dirichlet_energy, Field, GridSpec};
use crate::model::{Exponents, ProblemCase, ProblemSpec};
use crate::reduction::unit_ball_radius_to_original;
use crate::scalar::Real;
use crate::solver::{solve, LimitConstant, QuotientProblem, SolveReport, SolverConfig};
use crate::stats::fit_loglog;

pub const SWEEP_HEADER: &str = "alpha,quotient,energy,max_value,max_rho,r_alpha,alpha_gap,iterations,residual,converged";
pub const FIT_HEADER: &str = "quantity,slope,intercept,r_squared,target,rel_dev";

/// Summary of one solve in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub alpha: f64,
    pub quotient: f64,
    pub energy: f64,
    pub max_value: f64,
    /// Radial coordinate of the maximizer on the computational grid.
    pub max_rho: f64,
    /// Radius of the maximizer in the original variables.
    pub r_alpha: f64,
    /// `α (1 - r_α)`.
    pub alpha_gap: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

impl SweepRecord {
    pub fn from_report<T: Real>(case: ProblemCase, alpha: f64, report: &SolveReport<T>) -> Self {
        let max_rho = report.max_location.0.to_f64_lossy();
        let r_alpha = if case.is_reduced() { unit_ball_radius_to_original(max_rho) } else { max_rho };
        Self {
            alpha,
            quotient: report.quotient.to_f64_lossy(),
            energy: report.energy.to_f64_lossy(),
            max_value: report.max_value.to_f64_lossy(),
            max_rho,
            r_alpha,
            alpha_gap: alpha * (1.0 - r_alpha),
            iterations: report.iterations,
            residual: report.residual.to_f64_lossy(),
            converged: report.converged,
        }
    }
}

/// A sweep record together with the full solve.
#[derive(Debug, Clone)]
pub struct SweepEntry<T> {
    pub record: SweepRecord,
    pub report: SolveReport<T>,
}

/// Checks that `alphas` is strictly increasing with every entry above 2.
pub fn validate_alphas(alphas: &[f64]) -> Result<()> {
    if let Some(a) = alphas.iter().find(|a| !(a.is_finite() && **a > 2.0)) {
        return Err(Error::BadAlpha(*a));
    }
    if alphas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid(format!("alphas {alphas:?} must be strictly increasing")));
    }
    Ok(())
}

/// Solves the symmetric problem of `template` at one `alpha`.
pub fn sweep_entry<T: Real>(
    template: &ProblemSpec,
    alpha: f64,
    grid: &GridSpec,
    config: &SolverConfig,
) -> Result<SweepEntry<T>> {
    let spec = ProblemSpec { alpha, ..*template };
    let grid = Arc::new(grid.build::<T>()?);
    let problem = QuotientProblem::restricted(&spec, grid)?;
    let report = solve(&problem, config)?;
    Ok(SweepEntry { record: SweepRecord::from_report(spec.case, alpha, &report), report })
}

/// Runs the sweep sequentially. Runs that stop short of the tolerance are
/// kept with `converged = false`.
pub fn run_sweep<T: Real>(
    template: &ProblemSpec,
    alphas: &[f64],
    grid: &GridSpec,
    config: &SolverConfig,
) -> Result<Vec<SweepEntry<T>>> {
    validate_alphas(alphas)?;
    alphas.iter().map(|&a| sweep_entry(template, a, grid, config)).collect()
}

/// Whether `r_α` is strictly increasing over the converged records.
pub fn r_alpha_increasing(records: &[SweepRecord]) -> bool {
    let r: Vec<f64> = records.iter().filter(|r| r.converged).map(|r| r.r_alpha).collect();
    r.windows(2).all(|w| w[1] > w[0])
}

/// Log-log fit of one quantity against `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub quantity: String,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub points: usize,
    pub target: f64,
    /// `|slope - target| / |target|`.
    pub rel_dev: f64,
}

fn fit_quantity(records: &[SweepRecord], quantity: &str, target: f64, pick: impl Fn(&SweepRecord) -> f64) -> Result<ScalingFit> {
    let good: Vec<&SweepRecord> = records.iter().filter(|r| r.converged).collect();
    if good.len() < 3 {
        return Err(Error::InsufficientData(format!("{} converged records, need 3", good.len())));
    }
    let x: Vec<f64> = good.iter().map(|r| r.alpha).collect();
    let y: Vec<f64> = good.iter().map(|r| pick(r)).collect();
    let fit = fit_loglog(&x, &y)?;
    Ok(ScalingFit {
        quantity: quantity.to_string(),
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        alpha_min: x[0],
        alpha_max: x[x.len() - 1],
        points: x.len(),
        target,
        rel_dev: (fit.slope - target).abs() / target.abs(),
    })
}

/// Growth of the maximum, `M_α ~ α^{2/(p-2)}`.
pub fn fit_blowup(records: &[SweepRecord], p: f64) -> Result<ScalingFit> {
    fit_quantity(records, "max_value", 2.0 / (p - 2.0), |r| r.max_value)
}

/// Growth of the quotient, `~ α^β` with `β = (2n - p(n-2))/p`.
pub fn fit_quotient(records: &[SweepRecord], n: usize, p: f64) -> Result<ScalingFit> {
    let beta = Exponents::<f64>::new(n, p).quotient_beta;
    fit_quantity(records, "quotient", beta, |r| r.quotient)
}

/// Behavior of `α (1 - r_α)` along a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapLaw {
    pub alphas: Vec<f64>,
    pub gaps: Vec<f64>,
    /// `(max - min) / max` over the upper half of the `alpha` range.
    pub spread: f64,
    /// The gap at the largest `alpha`.
    pub ell: f64,
}

pub fn gap_law(records: &[SweepRecord]) -> Result<GapLaw> {
    let good: Vec<&SweepRecord> = records.iter().filter(|r| r.converged).collect();
    if good.len() < 2 {
        return Err(Error::InsufficientData(format!("{} converged records, need 2", good.len())));
    }
    let alphas: Vec<f64> = good.iter().map(|r| r.alpha).collect();
    let gaps: Vec<f64> = good.iter().map(|r| r.alpha_gap).collect();
    let top = &gaps[gaps.len() - (gaps.len() / 2).max(2)..];
    let hi = top.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = top.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if hi.abs() > 0.0 { (hi - lo) / hi.abs() } else { 0.0 };
    let ell = gaps[gaps.len() - 1];
    Ok(GapLaw { alphas, gaps, spread, ell })
}

/// Normalized quotients against the limit constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitComparison {
    pub case: String,
    pub alphas: Vec<f64>,
    /// Quotient divided by `α^β`.
    pub normalized: Vec<f64>,
    pub target: f64,
    /// Relative gap to the target at the largest `alpha`.
    pub relative_gap: f64,
    pub truncation_change: f64,
}

/// Decay rate of the limit weight `e^{-γt}` for a case, if it has one.
pub fn limit_gamma(case: ProblemCase) -> Option<f64> {
    match case {
        ProblemCase::PartialHenon { .. } => Some(0.5),
        ProblemCase::Hyperplane { .. } => Some(1.0),
        ProblemCase::FullHenon { .. } => None,
    }
}

/// Target of the normalized quotient: `m_{1/2,p}` for the partial problem,
/// `2^{1-2/p} m_{1,p}` for the hyperplane problem (two antipodal peaks).
pub fn limit_target<T: Real>(case: ProblemCase, limit: &LimitConstant<T>) -> Result<f64> {
    let m = limit.value.to_f64_lossy();
    match case {
        ProblemCase::PartialHenon { .. } => Ok(m),
        ProblemCase::Hyperplane { .. } => Ok(2f64.powf(1.0 - 2.0 / limit.p) * m),
        ProblemCase::FullHenon { .. } => Err(Error::Invalid("no limit constant for the full problem".into())),
    }
}

pub fn compare_limit<T: Real>(
    records: &[SweepRecord],
    limit: &LimitConstant<T>,
    spec: &ProblemSpec,
) -> Result<LimitComparison> {
    let n = spec.case.reduced_dim();
    if limit.n != n {
        return Err(Error::DimensionMismatch(format!("limit in dimension {}, problem in dimension {n}", limit.n)));
    }
    if (limit.p - spec.p).abs() > 1e-12 {
        return Err(Error::Invalid(format!("limit exponent {} differs from p = {}", limit.p, spec.p)));
    }
    match limit_gamma(spec.case) {
        Some(g) if (g - limit.gamma).abs() < 1e-12 => {}
        Some(g) => return Err(Error::Invalid(format!("the {} limit needs gamma = {g}", spec.case.name()))),
        None => return Err(Error::Invalid("no limit constant for the full problem".into())),
    }
    let good: Vec<&SweepRecord> = records.iter().filter(|r| r.converged).collect();
    if good.is_empty() {
        return Err(Error::InsufficientData("no converged records".into()));
    }
    let beta = Exponents::<f64>::new(n, spec.p).quotient_beta;
    let alphas: Vec<f64> = good.iter().map(|r| r.alpha).collect();
    let normalized: Vec<f64> = good.iter().map(|r| r.quotient / r.alpha.powf(beta)).collect();
    let target = limit_target(spec.case, limit)?;
    let relative_gap = (normalized[normalized.len() - 1] - target).abs() / target;
    Ok(LimitComparison {
        case: spec.case.name().to_string(),
        alphas,
        normalized,
        target,
        relative_gap,
        truncation_change: limit.relative_change.to_f64_lossy(),
    })
}

/// `(∫|∇(a - b)|² / ∫|∇b|²)^{1/2}` for fields on the same grid.
pub fn gradient_gap<T: Real>(a: &Field<T>, b: &Field<T>) -> Result<T> {
    if a.grid().spec() != b.grid().spec() {
        return Err(Error::DimensionMismatch("fields live on different grids".into()));
    }
    let diff: Vec<T> = a.values().iter().zip(b.values()).map(|(&x, &y)| x - y).collect();
    let diff = Field::from_values(a.grid().clone(), diff)?;
    let base = dirichlet_energy(b);
    if base == T::zero() {
        return Err(Error::Invalid("reference field has zero energy".into()));
    }
    Ok((dirichlet_energy(&diff) / base).sqrt())
}

/// Blow-up `ŵ(x) = α^{-2/(p-2)} w(x/α - e)` of a ball solution around its
/// concentration pole, sampled on the nodes of the limit grid. Limit points
/// falling outside the ball get the value 0.
pub fn blow_up<T: Real>(report: &SolveReport<T>, case: ProblemCase, alpha: f64, limit: &LimitConstant<T>) -> Result<Field<T>> {
    let u = &report.solution;
    if !u.grid().is_ball() {
        return Err(Error::Invalid("blow-up needs a ball solution".into()));
    }
    // Partial solutions peak on the negative axis, the others on the positive one.
    let sign = if matches!(case, ProblemCase::PartialHenon { .. }) { -T::one() } else { T::one() };
    let a = T::lit(alpha);
    let scale = a.powf(-T::lit(2.0) / T::lit(limit.p - 2.0));
    let target = limit.report.solution.grid().clone();
    let (n1, n2) = target.shape();
    let mut values = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        for j in 0..n2 {
            let (s, t) = target.coords(i, j);
            let axial = sign * (T::one() - t / a);
            let radial = s / a;
            let rho = axial.hypot(radial);
            if rho > T::one() {
                values.push(T::zero());
                continue;
            }
            let sigma = radial.atan2(axial);
            values.push(scale * u.interpolate(rho, sigma)?);
        }
    }
    Field::from_values(target, values)
}

/// Relative gradient gap between the blown-up solution and the limit
/// minimizer.
pub fn profile_comparison<T: Real>(
    report: &SolveReport<T>,
    case: ProblemCase,
    alpha: f64,
    limit: &LimitConstant<T>,
) -> Result<T> {
    let hat = blow_up(report, case, alpha, limit)?;
    gradient_gap(&hat, &limit.report.solution)
}

/// Writes the sweep table. Lines starting with `#` may precede the header.
pub fn write_sweep_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(SWEEP_HEADER.split(',')).map_err(io_err)?;
    for r in records {
        w.serialize(r).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::Invalid(format!("write failed: {e}")))?;
    Ok(())
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header = r.headers().map_err(io_err)?.iter().collect::<Vec<_>>().join(",");
    if header != SWEEP_HEADER {
        return Err(Error::Invalid(format!("unexpected sweep header `{header}`")));
    }
    r.deserialize().map(|row| row.map_err(io_err)).collect()
}

pub fn write_fit_csv<W: Write>(fits: &[ScalingFit], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(FIT_HEADER.split(',')).map_err(io_err)?;
    for f in fits {
        w.write_record([
            f.quantity.clone(),
            f.slope.to_string(),
            f.intercept.to_string(),
            f.r_squared.to_string(),
            f.target.to_string(),
            f.rel_dev.to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::Invalid(format!("write failed: {e}")))?;
    Ok(())
}

fn io_err(e: csv::Error) -> Error {
    Error::Invalid(format!("csv: {e}"))
}
