//! Least-energy solutions as minimizers of weighted Rayleigh quotients
//! `R[w] = ∫|∇w|² / (∫ h|w|^p)^{2/p}` over an axially symmetric class, and
//! the half-space limit constants.

mod engine;
mod init;
mod limit;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{apply_laplacian, Domain, Field, Focus, GridSpec, MeridianGrid, Spacing, WeightTable};
use crate::model::{critical_exponent, ProblemCase, ProblemSpec, SymmetryClass};
use crate::reduction::WeightKind;
use crate::scalar::Real;

pub use engine::Engine;
pub use init::{initial_guess, Init, InitKind};
pub use limit::{solve_limit_constant, LimitConstant, LimitSetup};

/// Default radial grading toward the boundary of the unit ball.
pub const DEFAULT_RADIAL_GRADING: f64 = 1.03;
/// Default angular grading toward a single concentration axis.
pub const DEFAULT_ANGULAR_GRADING: f64 = 1.05;
/// Default angular grading toward both poles (hyperplane problem).
pub const DEFAULT_TWO_POLE_GRADING: f64 = 1.1;

/// Unit-ball grid for `case`, with the angular nodes graded toward the axis
/// where its minimizers concentrate: `σ = π` for the partial problem, `σ = 0`
/// for the full one and both poles for the hyperplane problem. `angular`
/// overrides the default angular grading factor.
pub fn case_grid(case: ProblemCase, n_rho: usize, n_sigma: usize, radial: f64, angular: Option<f64>) -> GridSpec {
    let (focus, default) = match case {
        ProblemCase::PartialHenon { .. } => (Focus::Upper, DEFAULT_ANGULAR_GRADING),
        ProblemCase::FullHenon { .. } => (Focus::Lower, DEFAULT_ANGULAR_GRADING),
        ProblemCase::Hyperplane { .. } => (Focus::Both, DEFAULT_TWO_POLE_GRADING),
    };
    GridSpec::ball(1.0, case.reduced_dim(), n_rho, n_sigma, radial)
        .with_spacing2(Spacing::toward(angular.unwrap_or(default), focus))
}

/// Knobs of the projected descent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Relative max-norm PDE residual at which a run counts as converged.
    pub tol: f64,
    pub max_iter: usize,
    /// Sufficient-decrease constant of the backtracking line search.
    pub armijo: f64,
    /// Step contraction factor of the line search.
    pub contraction: f64,
    /// Smallest step tried before the line search gives up.
    pub min_step: f64,
    /// Starting points tried by [`solve`]; the lowest quotient wins.
    pub starts: Vec<InitKind>,
    /// Seed of the random start.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 5000,
            armijo: 1e-4,
            contraction: 0.5,
            min_step: 1e-10,
            starts: vec![InitKind::AxisBump, InitKind::UniformCap, InitKind::Random],
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.tol > 0.0
            && self.max_iter > 0
            && self.armijo > 0.0
            && self.armijo < 1.0
            && self.contraction > 0.0
            && self.contraction < 1.0
            && self.min_step > 0.0
            && !self.starts.is_empty();
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("bad solver configuration {self:?}")))
        }
    }
}

/// One weighted quotient on one grid.
#[derive(Debug, Clone)]
pub struct QuotientProblem<T> {
    pub grid: Arc<MeridianGrid<T>>,
    pub weight: WeightKind,
    pub alpha: T,
    pub p: T,
    pub symmetry: SymmetryClass,
}

impl<T: Real> QuotientProblem<T> {
    pub fn new(
        grid: Arc<MeridianGrid<T>>,
        weight: WeightKind,
        alpha: T,
        p: T,
        symmetry: SymmetryClass,
    ) -> Result<Self> {
        if weight.is_half_space() == grid.is_ball() {
            return Err(Error::Invalid(format!("weight {weight:?} does not match the grid domain")));
        }
        let upper = critical_exponent(grid.dim());
        let pf = p.to_f64_lossy();
        if !(pf > 2.0 && pf < upper) {
            return Err(Error::ExponentOutOfRange { p: pf, lower: 2.0, upper });
        }
        if !alpha.is_finite() {
            return Err(Error::BadAlpha(alpha.to_f64_lossy()));
        }
        if symmetry == SymmetryClass::AxiSymEven && !grid.is_mirror_symmetric() {
            return Err(Error::Invalid("even symmetry needs a mirror symmetric angular grid".into()));
        }
        if symmetry == SymmetryClass::DoublySymmetric {
            return Err(Error::Invalid("doubly symmetric problems are solved through their reduction".into()));
        }
        Ok(Self { grid, weight, alpha, p, symmetry })
    }

    /// The symmetric quotient of `spec` (`S'` or `K'`) on a unit-ball grid.
    pub fn restricted(spec: &ProblemSpec, grid: Arc<MeridianGrid<T>>) -> Result<Self> {
        check_ball(spec, &grid)?;
        let weight = match spec.case {
            ProblemCase::FullHenon { .. } => WeightKind::FullHenonReduced,
            ProblemCase::PartialHenon { .. } => WeightKind::PartialReduced,
            ProblemCase::Hyperplane { .. } => WeightKind::HyperplaneDirect,
        };
        Self::new(grid, weight, T::lit(spec.alpha), T::lit(spec.p), spec.case.reduced_symmetry())
    }

    /// The comparison quotient without the extra symmetry (`S` or `K`).
    pub fn unrestricted(spec: &ProblemSpec, grid: Arc<MeridianGrid<T>>) -> Result<Self> {
        check_ball(spec, &grid)?;
        let weight = match spec.case {
            ProblemCase::FullHenon { .. } | ProblemCase::PartialHenon { .. } => WeightKind::FullHenonReduced,
            ProblemCase::Hyperplane { .. } => WeightKind::HenonDirect,
        };
        Self::new(grid, weight, T::lit(spec.alpha), T::lit(spec.p), SymmetryClass::AxiSym)
    }

    /// Rayleigh quotient of `values` on this problem's grid.
    pub fn quotient(&self, values: &[T]) -> Result<T> {
        Engine::new(self.clone())?.quotient(values)
    }
}

fn check_ball<T: Real>(spec: &ProblemSpec, grid: &MeridianGrid<T>) -> Result<()> {
    spec.validate().into_result()?;
    if grid.dim() != spec.case.reduced_dim() {
        return Err(Error::DimensionMismatch(format!(
            "grid dimension {} but the problem lives in dimension {}",
            grid.dim(),
            spec.case.reduced_dim()
        )));
    }
    match grid.domain() {
        Domain::BallPolar { radius } if (radius - 1.0).abs() < 1e-12 => Ok(()),
        other => Err(Error::Invalid(format!("expected the unit ball, got {other:?}"))),
    }
}

/// Outcome of one minimization.
#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    /// Nehari-normalized minimizer, a nonnegative solution of `-Δu = h u^{p-1}`.
    pub solution: Field<T>,
    pub quotient: T,
    /// `∫|∇u|²`.
    pub energy: T,
    pub residual: T,
    pub max_value: T,
    /// Meridian coordinates of the maximizer.
    pub max_location: (T, T),
    pub max_node: (usize, usize),
    pub iterations: usize,
    pub converged: bool,
    /// Quotient after each accepted step.
    pub history: Vec<T>,
    /// Accepted steps that increased the quotient (should stay 0).
    pub ascent_steps: usize,
    /// Which start produced this report.
    pub start: String,
    /// Final quotient and convergence flag of every start that was tried.
    pub starts: Vec<(String, T, bool)>,
}

impl<T: Real> SolveReport<T> {
    /// Turns a non-converged report into [`Error::NotConverged`].
    pub fn ensure_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged { iterations: self.iterations, residual: self.residual.to_f64_lossy() })
        }
    }

    /// Relative spread of the final quotients among converged starts.
    pub fn start_spread(&self) -> T {
        let vals: Vec<T> = self.starts.iter().filter(|s| s.2).map(|s| s.1).collect();
        if vals.len() < 2 {
            return T::zero();
        }
        let lo = vals.iter().copied().fold(T::infinity(), T::min);
        let hi = vals.iter().copied().fold(T::neg_infinity(), T::max);
        (hi - lo) / lo
    }
}

/// Minimizes the quotient from one starting point.
pub fn minimize_quotient<T: Real>(
    problem: &QuotientProblem<T>,
    init: Init<T>,
    config: &SolverConfig,
) -> Result<SolveReport<T>> {
    config.validate()?;
    let engine = Engine::new(problem.clone())?;
    let label = init.label();
    let start = initial_guess(problem, init, config.seed)?;
    let mut report = engine.run(start.into_values(), config)?;
    report.start = label.clone();
    report.starts = vec![(label, report.quotient, report.converged)];
    Ok(report)
}

/// Multi-start minimization; keeps the lowest quotient, preferring
/// converged runs.
pub fn solve<T: Real>(problem: &QuotientProblem<T>, config: &SolverConfig) -> Result<SolveReport<T>> {
    solve_from(problem, config, Vec::new())
}

/// [`solve`] with extra starting fields tried after the configured starts.
pub fn solve_from<T: Real>(
    problem: &QuotientProblem<T>,
    config: &SolverConfig,
    extra: Vec<(String, Field<T>)>,
) -> Result<SolveReport<T>> {
    config.validate()?;
    let engine = Engine::new(problem.clone())?;
    let mut starts: Vec<(String, Vec<T>)> = Vec::new();
    for kind in &config.starts {
        let f = initial_guess(problem, Init::Kind(*kind), config.seed)?;
        starts.push((kind.label().to_string(), f.into_values()));
    }
    for (label, f) in extra {
        if !Arc::ptr_eq(f.grid(), &problem.grid) && f.grid().shape() != problem.grid.shape() {
            return Err(Error::DimensionMismatch("start field lives on another grid".into()));
        }
        starts.push((label, f.into_values()));
    }
    let mut best: Option<SolveReport<T>> = None;
    let mut summary = Vec::new();
    for (label, values) in starts {
        let mut report = match engine.run(values, config) {
            Ok(r) => r,
            Err(Error::DegenerateInit) => continue,
            Err(e) => return Err(e),
        };
        report.start = label.clone();
        summary.push((label, report.quotient, report.converged));
        let better = match &best {
            None => true,
            Some(b) => {
                (report.converged && !b.converged) || (report.converged == b.converged && report.quotient < b.quotient)
            }
        };
        if better {
            best = Some(report);
        }
    }
    let mut best = best.ok_or(Error::DegenerateInit)?;
    best.starts = summary;
    Ok(best)
}

/// Solves the comparison quotient (`S` or `K`) on `grid`. The restricted
/// minimizer, when given, is used as an additional start, which makes the
/// discrete comparison with the restricted quotient meaningful.
pub fn solve_unrestricted<T: Real>(
    spec: &ProblemSpec,
    grid: Arc<MeridianGrid<T>>,
    config: &SolverConfig,
    restricted: Option<&SolveReport<T>>,
) -> Result<SolveReport<T>> {
    let problem = QuotientProblem::unrestricted(spec, grid)?;
    let mut extra = Vec::new();
    if let Some(r) = restricted {
        extra.push(("restricted".to_string(), r.solution.clone()));
    }
    if let ProblemCase::Hyperplane { .. } = spec.case {
        let f = init::pole_bump(&problem);
        extra.push(("pole_bump".to_string(), f));
    }
    solve_from(&problem, config, extra)
}

/// `max |Δu + h̄ u^{p-1}| / max h̄ u^{p-1}` over nodes carrying unknowns,
/// with `h̄` the cell-averaged weight. Returns 0 for `u = 0`.
pub fn pde_residual<T: Real>(u: &Field<T>, weight: WeightKind, alpha: T, p: T) -> Result<T> {
    let table = WeightTable::new(u.grid(), weight, alpha)?;
    let lap = apply_laplacian(u)?;
    let mut num = T::zero();
    let mut den = T::zero();
    let grid = u.grid();
    let (n1, n2) = grid.shape();
    for i in 0..n1 {
        for j in 0..n2 {
            if grid.is_dirichlet(i, j) {
                continue;
            }
            let k = grid.index(i, j);
            let v = u.values()[k];
            let source = table.mean()[k] * v.abs().powf(p - T::one()) * v.signum();
            num = num.max((lap.values()[k] + source).abs());
            den = den.max(source.abs());
        }
    }
    Ok(if den == T::zero() { T::zero() } else { num / den })
}

/// Maps a solution on the unit ball to the ball of radius 1/2:
/// `v(z) = 4^{1/(p-2)} w(2z)`.
pub fn rescale_to_half_unit_ball<T: Real>(w: &Field<T>, p: T) -> Result<Field<T>> {
    match w.grid().domain() {
        Domain::BallPolar { radius } if (radius - 1.0).abs() < 1e-12 => {}
        other => return Err(Error::Invalid(format!("expected the unit ball, got {other:?}"))),
    }
    let grid = Arc::new(w.grid().scaled_ball(0.5)?);
    let factor = T::lit(4.0).powf((p - T::lit(2.0)).recip());
    Field::from_values(grid, w.values().iter().map(|&v| v * factor).collect())
}

/// Largest relative increase of `u` along `s` at fixed `t`, where `s` is the
/// distance to the symmetry axis. On a half-space box the check runs along
/// grid lines. On a ball `u` is sampled along `samples` horizontal chords with
/// `samples` points each.
pub fn s_monotonicity_violation<T: Real>(u: &Field<T>, samples: usize) -> T {
    let grid = u.grid();
    let (n1, n2) = grid.shape();
    let peak = u.max_abs();
    if peak == T::zero() {
        return T::zero();
    }
    let mut worst = T::zero();
    match grid.domain() {
        Domain::HalfSpaceBox { .. } => {
            for j in 0..n2 {
                for i in 0..n1 - 1 {
                    worst = worst.max(u.at(i + 1, j) - u.at(i, j));
                }
            }
        }
        Domain::BallPolar { radius } => {
            let r = T::lit(radius);
            let m = samples.max(2);
            for a in 1..m {
                let t = r * (T::lit(2.0) * T::from_usize_lossy(a) / T::from_usize_lossy(m) - T::one());
                let half_chord = (r * r - t * t).max(T::zero()).sqrt();
                let mut prev: Option<T> = None;
                for b in 0..=m {
                    let s = half_chord * T::from_usize_lossy(b) / T::from_usize_lossy(m);
                    let rho = s.hypot(t).min(r);
                    let sigma = s.atan2(t);
                    let v = u.interpolate(rho, sigma).unwrap_or(T::zero());
                    if let Some(pv) = prev {
                        worst = worst.max(v - pv);
                    }
                    prev = Some(v);
                }
            }
        }
    }
    worst / peak
}

/// Largest relative increase of a reduced solution along `|y_1|` at fixed
/// `|y_2|`, where `(y_1, y_2)` are the blocks of the original variable. The
/// field lives on the unit-ball grid, where `ρ = |y_1|² + |y_2|²` and
/// `σ = 2 atan(|y_2| / |y_1|)`.
pub fn block_monotonicity_violation<T: Real>(u: &Field<T>, samples: usize) -> T {
    let peak = u.max_abs();
    if peak == T::zero() {
        return T::zero();
    }
    let m = samples.max(2);
    let mut worst = T::zero();
    for a in 0..m {
        let b2 = T::from_usize_lossy(a) / T::from_usize_lossy(m);
        let top = (T::one() - b2 * b2).max(T::zero()).sqrt();
        let mut prev: Option<T> = None;
        for k in 0..=m {
            let b1 = top * T::from_usize_lossy(k) / T::from_usize_lossy(m);
            let rho = (b1 * b1 + b2 * b2).min(T::one());
            let sigma = T::lit(2.0) * b2.atan2(b1);
            let v = u.interpolate(rho, sigma).unwrap_or(T::zero());
            if let Some(pv) = prev {
                worst = worst.max(v - pv);
            }
            prev = Some(v);
        }
    }
    worst / peak
}
