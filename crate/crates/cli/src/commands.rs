use std::path::Path;
use std::sync::Arc;

use henon_core::asymptotics::{
    fit_blowup, fit_quotient, limit_gamma, read_sweep_csv, sweep_entry, validate_alphas, write_fit_csv,
    write_sweep_csv, ScalingFit, SweepEntry, SweepRecord,
};
use henon_core::model::Exponents;
use henon_core::reduction::{correspondence_refinement, default_samples, laplacian_correspondence_residual, AnalyticField};
use henon_core::solver::{solve, solve_limit_constant, QuotientProblem};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::OutputDir;

/// What a command produced; `partial` marks runs that stopped short of the
/// tolerance.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<std::path::PathBuf>,
    pub partial: bool,
}

const SOLVE_HEADER: &str =
    "case,p,alpha,quotient,energy,residual,max_value,max_rho,max_sigma,r_alpha,iterations,converged,start";
const LIMIT_HEADER: &str =
    "gamma,p,n,value,doubled_value,relative_change,max_s,max_t,iterations,residual,converged";
const REDUCE_HEADER: &str = "field,m,symbolic_residual,step,fd_error,slope";

/// Steps of the central-difference refinement study.
pub const REDUCE_STEPS: [f64; 4] = [0.04, 0.02, 0.01, 0.005];

pub fn cmd_solve(config: &RunConfig, out: &OutputDir) -> CliResult<Outcome> {
    let spec = config.spec(config.alpha);
    spec.validate().into_result()?;
    let grid = Arc::new(config.grid_spec().build::<f64>()?);
    let problem = QuotientProblem::restricted(&spec, grid)?;
    let report = solve(&problem, &config.solver_config())?;
    let record = SweepRecord::from_report(spec.case, spec.alpha, &report);
    let summary = out.write("solve.csv", |w| {
        writeln!(w, "{SOLVE_HEADER}")?;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            spec.case.name(),
            spec.p,
            spec.alpha,
            report.quotient,
            report.energy,
            report.residual,
            report.max_value,
            report.max_location.0,
            report.max_location.1,
            record.r_alpha,
            report.iterations,
            report.converged,
            report.start
        )?;
        Ok(())
    })?;
    let field = out.write("field.csv", |w| Ok(report.solution.write_csv(w)?))?;
    Ok(Outcome { files: vec![summary, field], partial: !report.converged })
}

pub fn cmd_sweep(config: &RunConfig, out: &OutputDir) -> CliResult<Outcome> {
    validate_alphas(&config.alphas)?;
    for &a in &config.alphas {
        config.spec(a).validate().into_result()?;
    }
    let grid = config.grid_spec();
    let solver = config.solver_config();
    let template = config.spec(config.alphas.first().copied().unwrap_or(config.alpha));
    let results: Vec<henon_core::Result<SweepEntry<f64>>> =
        config.alphas.par_iter().map(|&a| sweep_entry::<f64>(&template, a, &grid, &solver)).collect();
    let mut records = Vec::new();
    let mut partial = false;
    for (alpha, result) in config.alphas.iter().zip(results) {
        match result {
            Ok(entry) => {
                partial |= !entry.record.converged;
                records.push(entry.record);
            }
            Err(e) => {
                eprintln!("alpha = {alpha}: {e}");
                partial = true;
            }
        }
    }
    let mut files = vec![out.write("sweep.csv", |w| Ok(write_sweep_csv(&records, w)?))?];
    let n = config.case.reduced_dim();
    let fits = fits_for(&records, n, config.p);
    partial |= fits.len() < 2;
    files.push(out.write("fit.csv", |w| Ok(write_fit_csv(&fits, w)?))?);
    files.extend(plot_files(out, &records, n, config.p)?);
    Ok(Outcome { files, partial })
}

fn fits_for(records: &[SweepRecord], n: usize, p: f64) -> Vec<ScalingFit> {
    let mut fits = Vec::new();
    for fit in [fit_blowup(records, p), fit_quotient(records, n, p)] {
        match fit {
            Ok(f) => fits.push(f),
            Err(e) => eprintln!("fit skipped: {e}"),
        }
    }
    fits
}

fn plot_files(out: &OutputDir, records: &[SweepRecord], n: usize, p: f64) -> CliResult<Vec<std::path::PathBuf>> {
    let good: Vec<&SweepRecord> = records.iter().filter(|r| r.converged).collect();
    let beta = Exponents::<f64>::new(n, p).quotient_beta;
    let blowup: Vec<(f64, f64)> = good.iter().map(|r| (r.alpha.ln(), r.max_value.ln())).collect();
    let gap: Vec<(f64, f64)> = good.iter().map(|r| (r.alpha, r.alpha_gap)).collect();
    let normalized: Vec<(f64, f64)> = good.iter().map(|r| (r.alpha, r.quotient / r.alpha.powf(beta))).collect();
    Ok(vec![
        out.write_columns("blowup.dat", ("log_alpha", "log_max_value"), &blowup)?,
        out.write_columns("gap.dat", ("alpha", "alpha_gap"), &gap)?,
        out.write_columns("normalized_quotient.dat", ("alpha", "quotient_over_alpha_beta"), &normalized)?,
    ])
}

pub fn cmd_limit(config: &RunConfig, out: &OutputDir) -> CliResult<Outcome> {
    let gamma = match config.limit.gamma.or_else(|| limit_gamma(config.case)) {
        Some(g) => g,
        None => return Err(CliError::Config("limit.gamma is required for the full problem".into())),
    };
    let n = config.case.reduced_dim();
    let limit = solve_limit_constant::<f64>(gamma, config.p, n, &config.limit.setup(), &config.solver_config())?;
    let r = &limit.report;
    let table = out.write("limit.csv", |w| {
        writeln!(w, "{LIMIT_HEADER}")?;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            limit.gamma,
            limit.p,
            limit.n,
            limit.value,
            limit.doubled_value,
            limit.relative_change,
            r.max_location.0,
            r.max_location.1,
            r.iterations,
            r.residual,
            r.converged
        )?;
        Ok(())
    })?;
    let field = out.write("limit_field.csv", |w| Ok(r.solution.write_csv(w)?))?;
    Ok(Outcome { files: vec![table, field], partial: false })
}

pub fn cmd_reduce_check(config: &RunConfig, out: &OutputDir) -> CliResult<Outcome> {
    let m = match config.case {
        henon_core::model::ProblemCase::FullHenon { m } | henon_core::model::ProblemCase::PartialHenon { m } => m,
        henon_core::model::ProblemCase::Hyperplane { .. } => {
            return Err(CliError::Config("reduce-check needs a reduced (full or partial) case".into()))
        }
    };
    let samples = default_samples::<f64>();
    let floor = 1e-3;
    let mut rows = Vec::new();
    for field in AnalyticField::SUITE {
        let symbolic = laplacian_correspondence_residual(field, m, &samples, floor)?;
        let refinement = correspondence_refinement(field, m, &samples, floor, &REDUCE_STEPS)?;
        let slope = refinement.slope.map(|s| s.to_string()).unwrap_or_default();
        for (h, e) in refinement.steps.iter().zip(&refinement.errors) {
            rows.push(format!("{},{m},{symbolic},{h},{e},{slope}", field.name()));
        }
    }
    let table = out.write("reduce_check.csv", |w| {
        writeln!(w, "{REDUCE_HEADER}")?;
        for r in &rows {
            writeln!(w, "{r}")?;
        }
        Ok(())
    })?;
    Ok(Outcome { files: vec![table], partial: false })
}

pub fn cmd_fit(config: &RunConfig, out: &OutputDir, input: &Path) -> CliResult<Outcome> {
    let file = std::fs::File::open(input).map_err(|e| CliError::io(input, e))?;
    let records = read_sweep_csv(file).map_err(|e| CliError::Config(format!("{}: {e}", input.display())))?;
    let fits = fits_for(&records, config.case.reduced_dim(), config.p);
    if fits.is_empty() {
        return Err(henon_core::Error::InsufficientData("no fit could be computed".into()).into());
    }
    let partial = fits.len() < 2;
    let path = out.write("fit.csv", |w| Ok(write_fit_csv(&fits, w)?))?;
    Ok(Outcome { files: vec![path], partial })
}
