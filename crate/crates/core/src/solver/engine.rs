use std::sync::Arc;

use super::{QuotientProblem, SolveReport, SolverConfig};
use crate::error::{Error, Result};
use crate::mesh::{stiffness_apply, Field, MeridianGrid, PoissonSolver, WeightTable};
use crate::model::SymmetryClass;
use crate::scalar::Real;

/// Assembled operators of one [`QuotientProblem`]: the stiffness solver and
/// the weight moments.
#[derive(Debug, Clone)]
pub struct Engine<T> {
    problem: QuotientProblem<T>,
    poisson: PoissonSolver<T>,
    weights: WeightTable<T>,
    volumes: Vec<T>,
}

/// Quantities of one iterate.
struct State<T> {
    w: Vec<T>,
    aw: Vec<T>,
    load: Vec<T>,
    energy: T,
    mass: T,
}

impl<T: Real> Engine<T> {
    pub fn new(problem: QuotientProblem<T>) -> Result<Self> {
        let poisson = PoissonSolver::new(problem.grid.clone())?;
        let weights = WeightTable::new(&problem.grid, problem.weight, problem.alpha)?;
        let volumes = problem.grid.volumes();
        Ok(Self { problem, poisson, weights, volumes })
    }

    pub fn problem(&self) -> &QuotientProblem<T> {
        &self.problem
    }

    fn grid(&self) -> &Arc<MeridianGrid<T>> {
        &self.problem.grid
    }

    /// Nonnegativity, boundary tags and the symmetry of the class.
    pub fn project(&self, values: Vec<T>) -> Result<Vec<T>> {
        let mut f = Field::from_values(self.grid().clone(), values)?;
        f.clamp_nonnegative();
        if self.problem.symmetry == SymmetryClass::AxiSymEven {
            f.symmetrize_mirror();
        }
        f.enforce_boundary();
        Ok(f.into_values())
    }

    fn state(&self, w: Vec<T>) -> State<T> {
        let n = w.len();
        let mut aw = vec![T::zero(); n];
        stiffness_apply(self.grid(), &w, &mut aw);
        let pm1 = self.problem.p - T::one();
        let moments = self.weights.moments();
        let mut energy = T::zero();
        let mut mass = T::zero();
        let mut load = Vec::with_capacity(n);
        for k in 0..n {
            energy = energy + w[k] * aw[k];
            let l = moments[k] * w[k].abs().powf(pm1);
            mass = mass + l * w[k].abs();
            load.push(l);
        }
        State { w, aw, load, energy, mass }
    }

    fn rayleigh(&self, s: &State<T>) -> T {
        s.energy / s.mass.powf(T::lit(2.0) / self.problem.p)
    }

    /// `E / N^{2/p}`; infinite when the denominator vanishes.
    pub fn quotient(&self, values: &[T]) -> Result<T> {
        if values.len() != self.grid().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                self.grid().len()
            )));
        }
        let s = self.state(values.to_vec());
        Ok(if s.mass > T::zero() { self.rayleigh(&s) } else { T::infinity() })
    }

    /// Relative residual of the Euler-Lagrange equation at the Nehari
    /// rescaling of `s.w`; independent of the scale of `w`.
    fn residual(&self, s: &State<T>) -> T {
        let grid = self.grid();
        let (n1, n2) = grid.shape();
        let ratio = s.energy / s.mass;
        let mut r: Vec<T> = s.aw.iter().zip(&s.load).map(|(&a, &l)| a - ratio * l).collect();
        let mut src: Vec<T> = s.load.iter().map(|&l| ratio * l).collect();
        fold(grid, &mut r, &self.volumes);
        fold(grid, &mut src, &self.volumes);
        let mut num = T::zero();
        let mut den = T::zero();
        for i in 0..n1 {
            for j in 0..n2 {
                if !grid.is_dirichlet(i, j) {
                    let k = i * n2 + j;
                    num = num.max(r[k].abs());
                    den = den.max(src[k].abs());
                }
            }
        }
        if den == T::zero() {
            T::zero()
        } else {
            num / den
        }
    }

    fn normalized(&self, s: State<T>) -> State<T> {
        let c = s.mass.powf(-self.problem.p.recip());
        let w = s.w.iter().map(|&v| v * c).collect();
        self.state(w)
    }

    /// Projected descent from `start`.
    pub fn run(&self, start: Vec<T>, config: &SolverConfig) -> Result<SolveReport<T>> {
        let w0 = self.project(start)?;
        let s = self.state(w0);
        if !(s.energy > T::zero()) || !(s.mass > T::zero()) {
            return Err(Error::DegenerateInit);
        }
        let mut s = self.normalized(s);
        let armijo = T::lit(config.armijo);
        let contraction = T::lit(config.contraction);
        let min_step = T::lit(config.min_step);
        let tol = T::lit(config.tol);
        let two_over_p = T::lit(2.0) / self.problem.p;

        let mut history = Vec::new();
        let mut ascent_steps = 0;
        let mut iterations = 0;
        let mut residual = self.residual(&s);
        let mut q = self.rayleigh(&s);
        while residual > tol && iterations < config.max_iter {
            let ratio = s.energy / s.mass;
            let z = self.poisson.solve(&s.load);
            let dir: Vec<T> = z.iter().zip(&s.w).map(|(&zk, &wk)| ratio * zk - wk).collect();
            // Euclidean gradient of the quotient is 2 N^{-2/p} (Aw - (E/N) M w^{p-1}).
            let scale = T::lit(2.0) / s.mass.powf(two_over_p);
            let slope: T =
                dir.iter().zip(s.aw.iter().zip(&s.load)).map(|(&d, (&a, &l))| d * (a - ratio * l)).sum::<T>()
                    * scale;
            let mut tau = T::one();
            let accepted = loop {
                let trial: Vec<T> = s.w.iter().zip(&dir).map(|(&w, &d)| w + tau * d).collect();
                let trial = self.state(self.project(trial)?);
                if trial.mass > T::zero() {
                    let qt = self.rayleigh(&trial);
                    if qt <= q + armijo * tau * slope.min(T::zero()) {
                        break Some((trial, qt));
                    }
                }
                tau = tau * contraction;
                if tau < min_step {
                    break None;
                }
            };
            let Some((trial, qt)) = accepted else { break };
            if qt > q {
                ascent_steps += 1;
            }
            iterations += 1;
            s = self.normalized(trial);
            q = qt;
            history.push(q);
            residual = self.residual(&s);
        }
        let converged = residual <= tol;

        let p = self.problem.p;
        let lambda = (s.energy / s.mass).powf((p - T::lit(2.0)).recip());
        let u = Field::from_values(self.grid().clone(), s.w.iter().map(|&v| v * lambda).collect())?;
        let energy = crate::mesh::dirichlet_energy(&u);
        let (max_value, max_node) = u.argmax();
        let max_location = self.grid().coords(max_node.0, max_node.1);
        Ok(SolveReport {
            solution: u,
            quotient: q,
            energy,
            residual,
            max_value,
            max_location,
            max_node,
            iterations,
            converged,
            history,
            ascent_steps,
            start: String::new(),
            starts: Vec::new(),
        })
    }
}

/// Divides a per-node load by cell measures, with the polar row folded into
/// the center.
fn fold<T: Real>(grid: &MeridianGrid<T>, v: &mut [T], volumes: &[T]) {
    let n2 = grid.shape().1;
    if grid.has_pole() {
        let total: T = volumes[..n2].iter().copied().sum();
        let sum: T = v[..n2].iter().copied().sum();
        v[..n2].iter_mut().for_each(|x| *x = sum / total);
    }
    let start = if grid.has_pole() { n2 } else { 0 };
    for k in start..v.len() {
        v[k] = if volumes[k] > T::zero() { v[k] / volumes[k] } else { T::zero() };
    }
}
