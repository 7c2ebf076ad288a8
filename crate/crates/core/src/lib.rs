//! Numerical core for least-energy solutions of Hénon-type equations
//! `-Δu = h(x)|u|^{p-2}u` on the unit ball and their behavior as the weight
//! exponent `alpha` grows.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the aliases below fix `f64`.
//!
//! ```
//! use std::sync::Arc;
//! use henon_core::mesh::GridSpec;
//! use henon_core::model::{ProblemCase, ProblemSpec};
//! use henon_core::solver::{solve, QuotientProblem, SolverConfig};
//!
//! let spec = ProblemSpec::new(ProblemCase::PartialHenon { m: 2 }, 3.0, 20.0);
//! let grid = Arc::new(GridSpec::ball(1.0, 3, 32, 24, 1.03).build::<f64>().unwrap());
//! let problem = QuotientProblem::restricted(&spec, grid).unwrap();
//! let report = solve(&problem, &SolverConfig::default()).unwrap();
//! assert!(report.converged);
//! ```

pub mod asymptotics;
pub mod error;
pub mod mesh;
pub mod model;
pub mod reduction;
pub mod scalar;
pub mod solver;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Grid = mesh::MeridianGrid<f64>;
pub type Field = mesh::Field<f64>;
pub type Problem = solver::QuotientProblem<f64>;
pub type Report = solver::SolveReport<f64>;
pub type Limit = solver::LimitConstant<f64>;
pub type Entry = asymptotics::SweepEntry<f64>;
