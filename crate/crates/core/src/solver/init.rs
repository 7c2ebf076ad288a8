use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::QuotientProblem;
use crate::error::Result;
use crate::mesh::{Domain, Field};
use crate::reduction::WeightKind;
use crate::scalar::Real;

/// Built-in starting points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    /// Gaussian bump at the expected concentration point.
    AxisBump,
    /// A smooth cap vanishing on the boundary.
    UniformCap,
    /// Independent uniform values in `[0, 1)`.
    Random,
}

impl InitKind {
    pub fn label(&self) -> &'static str {
        match self {
            InitKind::AxisBump => "axis_bump",
            InitKind::UniformCap => "uniform_cap",
            InitKind::Random => "random",
        }
    }
}

/// Starting point of a minimization.
#[derive(Debug, Clone)]
pub enum Init<T> {
    Field(Field<T>),
    Kind(InitKind),
}

impl<T> Init<T> {
    pub fn label(&self) -> String {
        match self {
            Init::Field(_) => "field".into(),
            Init::Kind(k) => k.label().into(),
        }
    }
}

pub fn initial_guess<T: Real>(problem: &QuotientProblem<T>, init: Init<T>, seed: u64) -> Result<Field<T>> {
    let grid = problem.grid.clone();
    let f = match init {
        Init::Field(f) => Field::from_values(grid, f.into_values())?,
        Init::Kind(InitKind::AxisBump) => axis_bump(problem),
        Init::Kind(InitKind::UniformCap) => match grid.domain() {
            Domain::BallPolar { radius } => {
                let r2 = T::lit(radius * radius);
                Field::from_fn(grid, |rho, _| r2 - rho * rho)
            }
            Domain::HalfSpaceBox { s_max, t_max } => {
                let (sm, tm) = (T::lit(s_max), T::lit(t_max));
                Field::from_fn(grid, |s, t| (T::PI() * t / tm).sin() * (T::one() - (s / sm).powi(2)))
            }
        },
        Init::Kind(InitKind::Random) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let values = (0..grid.len()).map(|_| T::lit(rng.gen::<f64>())).collect();
            Field::from_values(grid, values)?
        }
    };
    Ok(f)
}

/// Gaussian of width `width` centered at the meridian point `(a, b)`,
/// measured in the Euclidean metric of the meridian plane.
fn bump<T: Real>(problem: &QuotientProblem<T>, centers: &[(T, T)], width: T) -> Field<T> {
    let ball = problem.grid.is_ball();
    let cart = |a: T, b: T| if ball { (a * b.sin(), a * b.cos()) } else { (a, b) };
    let pts: Vec<(T, T)> = centers.iter().map(|&(a, b)| cart(a, b)).collect();
    Field::from_fn(problem.grid.clone(), |a, b| {
        let (x, y) = cart(a, b);
        pts.iter()
            .map(|&(cx, cy)| {
                let d2 = (x - cx).powi(2) + (y - cy).powi(2);
                (-d2 / (T::lit(2.0) * width * width)).exp()
            })
            .sum()
    })
}

fn axis_bump<T: Real>(problem: &QuotientProblem<T>) -> Field<T> {
    let alpha = problem.alpha.max(T::lit(4.0));
    let width = (T::lit(3.0) / alpha).min(T::lit(0.3));
    let rho = T::one() - width;
    match problem.weight {
        WeightKind::Exponential { gamma } => {
            let g = T::lit(gamma);
            bump(problem, &[(T::zero(), g.recip())], g.recip())
        }
        WeightKind::PartialReduced | WeightKind::PartialHalfBall => bump(problem, &[(rho, T::PI())], width),
        WeightKind::HyperplaneDirect => bump(problem, &[(rho, T::zero()), (rho, T::PI())], width),
        WeightKind::FullHenonReduced | WeightKind::FullHenonHalfBall | WeightKind::HenonDirect => {
            bump(problem, &[(rho, T::zero())], width)
        }
    }
}

/// A single bump at the positive pole, whatever the weight.
pub(crate) fn pole_bump<T: Real>(problem: &QuotientProblem<T>) -> Field<T> {
    let alpha = problem.alpha.max(T::lit(4.0));
    let width = (T::lit(3.0) / alpha).min(T::lit(0.3));
    bump(problem, &[(T::one() - width, T::zero())], width)
}
