//! Tensor meridian grids, grid functions, and the discrete operators of the
//! axially symmetric problems.

mod axis;
mod field;
mod grid;
mod ops;
mod poisson;

pub use axis::{Axis, Density, End, Focus, Spacing};
pub use field::Field;
pub use grid::{Domain, GridSpec, MeridianGrid, MIN_NODES};
pub use ops::{apply_laplacian, dirichlet_energy, weighted_lp_norm, WeightTable};
pub(crate) use ops::stiffness_apply;
pub use poisson::PoissonSolver;
