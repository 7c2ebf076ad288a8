use std::f64::consts::PI;
use std::sync::Arc;

use henon_core::mesh::{Field, GridSpec, MeridianGrid};
use henon_core::model::{ProblemCase, ProblemSpec};
use henon_core::reduction::WeightKind;
use henon_core::solver::{
    block_monotonicity_violation, case_grid, minimize_quotient, pde_residual, rescale_to_half_unit_ball, solve,
    solve_limit_constant, solve_unrestricted, Init, InitKind, LimitSetup, QuotientProblem, SolverConfig,
};
use henon_core::Error;

fn partial(alpha: f64) -> ProblemSpec {
    ProblemSpec::new(ProblemCase::PartialHenon { m: 2 }, 3.0, alpha)
}

fn hyperplane(alpha: f64) -> ProblemSpec {
    ProblemSpec::new(ProblemCase::Hyperplane { n: 3 }, 3.0, alpha)
}

fn grid_for(spec: &ProblemSpec, n1: usize, n2: usize) -> Arc<MeridianGrid<f64>> {
    Arc::new(case_grid(spec.case, n1, n2, 1.03, None).build().unwrap())
}

fn bump_only() -> SolverConfig {
    SolverConfig { starts: vec![InitKind::AxisBump], ..SolverConfig::default() }
}

#[test]
fn partial_peak_sits_on_negative_axis() {
    let spec = partial(80.0);
    let problem = QuotientProblem::restricted(&spec, grid_for(&spec, 128, 64)).unwrap();
    let report = minimize_quotient(&problem, Init::Kind(InitKind::AxisBump), &SolverConfig::default()).unwrap();
    assert!(report.converged);
    assert_eq!(report.max_location.1, PI);
    assert!(report.max_location.0 > 0.9);
    assert!(report.solution.values().iter().all(|&v| v >= 0.0));
}

#[test]
fn restart_from_minimizer_is_stationary() {
    let spec = partial(40.0);
    let problem = QuotientProblem::restricted(&spec, grid_for(&spec, 64, 32)).unwrap();
    let cfg = SolverConfig::default();
    let first = minimize_quotient(&problem, Init::Kind(InitKind::AxisBump), &cfg).unwrap();
    let again = minimize_quotient(&problem, Init::Field(first.solution.clone()), &cfg).unwrap();
    assert!(again.iterations <= 1);
    assert!(((again.quotient - first.quotient) / first.quotient).abs() < cfg.tol);
}

#[test]
fn quotient_is_scale_invariant() {
    let spec = partial(40.0);
    let problem = QuotientProblem::restricted(&spec, grid_for(&spec, 32, 24)).unwrap();
    let mut f = Field::from_fn(problem.grid.clone(), |r, s| (1.0 - r * r) * (1.0 - s.cos()));
    f.enforce_boundary();
    let base = problem.quotient(f.values()).unwrap();
    for c in [1e-3, 1.0, 1e3] {
        let q = problem.quotient(f.scaled(c).values()).unwrap();
        assert!(((q - base) / base).abs() < 1e-13, "{c}: {q} vs {base}");
    }
}

#[test]
fn restricted_quotients_exceed_unrestricted() {
    for spec in [partial(80.0), hyperplane(80.0)] {
        let grid = grid_for(&spec, 96, 64);
        let cfg = bump_only();
        let restricted = solve(&QuotientProblem::restricted(&spec, grid.clone()).unwrap(), &cfg).unwrap();
        let free = solve_unrestricted(&spec, grid, &cfg, Some(&restricted)).unwrap();
        assert!(restricted.converged && free.converged);
        assert!(restricted.quotient > free.quotient, "{spec:?}: {} vs {}", restricted.quotient, free.quotient);
    }
}

#[test]
fn quotients_grow_with_alpha() {
    for case in [ProblemCase::PartialHenon { m: 2 }, ProblemCase::Hyperplane { n: 3 }] {
        let grid = Arc::new(case_grid(case, 96, 64, 1.03, None).build::<f64>().unwrap());
        let mut last = (0.0, 0.0);
        for alpha in [40.0, 80.0, 160.0] {
            let spec = ProblemSpec::new(case, 3.0, alpha);
            let restricted = solve(&QuotientProblem::restricted(&spec, grid.clone()).unwrap(), &bump_only()).unwrap();
            let free = solve_unrestricted(&spec, grid.clone(), &bump_only(), Some(&restricted)).unwrap();
            assert!(restricted.quotient > last.0 && free.quotient > last.1);
            last = (restricted.quotient, free.quotient);
        }
    }
}

#[test]
fn descent_is_monotone_and_nehari_holds() {
    let spec = hyperplane(40.0);
    let problem = QuotientProblem::restricted(&spec, grid_for(&spec, 64, 48)).unwrap();
    let report = solve(&problem, &SolverConfig::default()).unwrap();
    assert_eq!(report.ascent_steps, 0);
    assert!(report.history.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(report.starts.len(), 3);
    let expected = report.quotient.powf(3.0);
    assert!(((report.energy - expected) / expected).abs() < 1e-6);
    let u = &report.solution;
    let (n1, n2) = u.grid().shape();
    for i in 0..n1 {
        for j in 0..n2 {
            assert_eq!(u.at(i, j), u.at(i, n2 - 1 - j));
        }
    }
}

#[test]
fn residual_conventions() {
    let spec = partial(40.0);
    let problem = QuotientProblem::restricted(&spec, grid_for(&spec, 64, 32)).unwrap();
    let report = solve(&problem, &bump_only()).unwrap();
    let u = &report.solution;
    let r = pde_residual(u, WeightKind::PartialReduced, 40.0, 3.0).unwrap();
    assert!(r < 1e-6);
    assert!((r - report.residual).abs() < 1e-9);
    assert_eq!(pde_residual(&Field::zeros(u.grid().clone()), WeightKind::PartialReduced, 40.0, 3.0).unwrap(), 0.0);
    // w = u / λ with λ = 2 leaves a residual |λ^{p-2} - 1| = 1.
    let w = u.scaled(0.5);
    let rw = pde_residual(&w, WeightKind::PartialReduced, 40.0, 3.0).unwrap();
    assert!((rw - 1.0).abs() < 1e-5, "{rw}");
}

#[test]
fn half_ball_rescaling() {
    let spec = ProblemSpec::new(ProblemCase::FullHenon { m: 2 }, 3.0, 40.0);
    let grid = grid_for(&spec, 96, 48);
    let zero = rescale_to_half_unit_ball(&Field::zeros(grid.clone()), 3.0).unwrap();
    assert!(zero.is_zero());
    let cfg = bump_only();
    let report = solve(&QuotientProblem::restricted(&spec, grid).unwrap(), &cfg).unwrap();
    let v = rescale_to_half_unit_ball(&report.solution, 3.0).unwrap();
    assert_eq!(v.values()[100], 4.0 * report.solution.values()[100]);
    let r = pde_residual(&v, WeightKind::FullHenonHalfBall, 40.0, 3.0).unwrap();
    assert!(r < 2.0 * cfg.tol, "{r}");
}

#[test]
fn degenerate_and_truncated_runs() {
    let spec = partial(40.0);
    let problem = QuotientProblem::restricted(&spec, grid_for(&spec, 32, 16)).unwrap();
    let zero = Field::zeros(problem.grid.clone());
    let err = minimize_quotient(&problem, Init::Field(zero), &SolverConfig::default()).unwrap_err();
    assert_eq!(err, Error::DegenerateInit);

    let cfg = SolverConfig { max_iter: 1, ..SolverConfig::default() };
    let report = minimize_quotient(&problem, Init::Kind(InitKind::UniformCap), &cfg).unwrap();
    assert!(!report.converged);
    assert!(matches!(report.ensure_converged(), Err(Error::NotConverged { iterations: 1, .. })));
}

#[test]
fn inconsistent_problems_rejected() {
    let spec = partial(40.0);
    let grid = grid_for(&spec, 32, 16);
    let hyper = hyperplane(40.0);
    assert!(QuotientProblem::restricted(&ProblemSpec { p: 6.0, ..spec }, grid.clone()).is_err());
    assert!(QuotientProblem::restricted(&ProblemSpec { alpha: 1.0, ..spec }, grid.clone()).is_err());
    let four = Arc::new(GridSpec::ball(1.0, 4, 32, 16, 1.0).build::<f64>().unwrap());
    assert!(matches!(QuotientProblem::restricted(&spec, four), Err(Error::DimensionMismatch(_))));
    // Even symmetry on an angular grid that is not mirror symmetric.
    assert!(QuotientProblem::restricted(&hyper, grid).is_err());
}

#[test]
fn single_precision_agrees() {
    let spec = partial(20.0);
    let g64 = Arc::new(case_grid(spec.case, 40, 24, 1.03, None).build::<f64>().unwrap());
    let g32 = Arc::new(case_grid(spec.case, 40, 24, 1.03, None).build::<f32>().unwrap());
    // Cancellation in the stiffness product puts the single precision
    // residual floor near 1e-4.
    let cfg = SolverConfig { tol: 1e-3, ..bump_only() };
    let a = solve(&QuotientProblem::restricted(&spec, g64).unwrap(), &cfg).unwrap();
    let b = solve(&QuotientProblem::restricted(&spec, g32).unwrap(), &cfg).unwrap();
    assert!(b.converged);
    assert!(((b.quotient as f64 - a.quotient) / a.quotient).abs() < 1e-4);
}

#[test]
fn partial_minimizer_decreases_in_first_block() {
    let spec = partial(40.0);
    let report = solve(&QuotientProblem::restricted(&spec, grid_for(&spec, 128, 64)).unwrap(), &bump_only()).unwrap();
    assert!(block_monotonicity_violation(&report.solution, 200) <= 1e-6);
}

#[test]
fn limit_truncation_from_24_to_48() {
    let setup = LimitSetup { s_max: 24.0, t_max: 24.0, n_s: 120, n_t: 120, grading_s: 1.03, grading_t: 1.03 };
    let limit = solve_limit_constant::<f64>(1.0, 3.0, 3, &setup, &bump_only()).unwrap();
    assert!(limit.relative_change < 0.01);
    assert!(limit.value > 0.0);
    assert_eq!(limit.report.max_location.0, 0.0);
    assert!(limit.max_height() > 0.0);
    assert!(matches!(
        solve_limit_constant::<f64>(0.0, 3.0, 3, &setup, &bump_only()),
        Err(Error::Invalid(_))
    ));
    assert!(matches!(
        solve_limit_constant::<f64>(1.0, 6.0, 3, &setup, &bump_only()),
        Err(Error::ExponentOutOfRange { .. })
    ));
}

#[test]
fn small_box_is_flagged() {
    let setup = LimitSetup { s_max: 4.0, t_max: 4.0, n_s: 40, n_t: 40, grading_s: 1.03, grading_t: 1.03 };
    assert!(matches!(
        solve_limit_constant::<f64>(0.5, 3.0, 3, &setup, &bump_only()),
        Err(Error::TruncationUnstable { .. })
    ));
}
