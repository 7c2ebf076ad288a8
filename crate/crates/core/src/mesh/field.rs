use std::io::{self, Write};
use std::sync::Arc;

use super::grid::MeridianGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Grid function. Solver unknowns vanish on Dirichlet nodes and are constant
/// along the polar row of a ball grid; other fields (test data, operator
/// output) may carry arbitrary boundary values.
#[derive(Debug, Clone)]
pub struct Field<T> {
    grid: Arc<MeridianGrid<T>>,
    values: Vec<T>,
}

impl<T: Real> Field<T> {
    pub fn zeros(grid: Arc<MeridianGrid<T>>) -> Self {
        let values = vec![T::zero(); grid.len()];
        Self { grid, values }
    }

    pub fn from_values(grid: Arc<MeridianGrid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Invalid(format!("{} values for a grid of {} nodes", values.len(), grid.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite field value".into()));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every node's meridian coordinates.
    pub fn from_fn(grid: Arc<MeridianGrid<T>>, f: impl Fn(T, T) -> T) -> Self {
        let (n1, n2) = grid.shape();
        let mut values = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                let (a, b) = grid.coords(i, j);
                values.push(f(a, b));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<MeridianGrid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[self.grid.index(i, j)]
    }

    pub fn scaled(&self, c: T) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|&v| v * c).collect() }
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == T::zero())
    }

    /// Zeroes Dirichlet nodes and replaces the polar row by its
    /// measure-weighted mean.
    pub fn enforce_boundary(&mut self) {
        let (n1, n2) = self.grid.shape();
        for i in 0..n1 {
            for j in 0..n2 {
                if self.grid.is_dirichlet(i, j) {
                    let k = self.grid.index(i, j);
                    self.values[k] = T::zero();
                }
            }
        }
        if self.grid.has_pole() {
            let w = self.grid.axis2().volume();
            let total: T = w.iter().copied().sum();
            let mean = (0..n2).map(|j| self.values[j] * w[j]).sum::<T>() / total;
            self.values[..n2].iter_mut().for_each(|v| *v = mean);
        }
    }

    /// Whether the field satisfies the boundary tags of a solver unknown.
    pub fn is_admissible(&self) -> bool {
        let (n1, n2) = self.grid.shape();
        let dirichlet_ok = (0..n1)
            .flat_map(|i| (0..n2).map(move |j| (i, j)))
            .filter(|&(i, j)| self.grid.is_dirichlet(i, j))
            .all(|(i, j)| self.at(i, j) == T::zero());
        dirichlet_ok && self.pole_is_constant(T::zero())
    }

    pub(crate) fn pole_is_constant(&self, tol: T) -> bool {
        if !self.grid.has_pole() {
            return true;
        }
        let n2 = self.grid.shape().1;
        let first = self.values[0];
        self.values[..n2].iter().all(|&v| (v - first).abs() <= tol * first.abs().max(T::one()))
    }

    /// Averages with the reflection `σ -> π - σ` (or `t -> t_max - t`).
    pub fn symmetrize_mirror(&mut self) {
        let (n1, n2) = self.grid.shape();
        for i in 0..n1 {
            for j in 0..n2 / 2 {
                let a = self.grid.index(i, j);
                let b = self.grid.index(i, self.grid.mirror2(j));
                let mean = (self.values[a] + self.values[b]) / T::lit(2.0);
                self.values[a] = mean;
                self.values[b] = mean;
            }
        }
    }

    pub fn clamp_nonnegative(&mut self) {
        self.values.iter_mut().for_each(|v| *v = v.max(T::zero()));
    }

    /// Largest value and its node. Ties go to the smallest radial coordinate
    /// then the smallest angle on a ball, and to the smallest `t` then the
    /// smallest `s` on a half-space box.
    pub fn argmax(&self) -> (T, (usize, usize)) {
        let (n1, n2) = self.grid.shape();
        let mut best = (T::neg_infinity(), (0, 0));
        let order: Box<dyn Iterator<Item = (usize, usize)>> = if self.grid.is_ball() {
            Box::new((0..n1).flat_map(move |i| (0..n2).map(move |j| (i, j))))
        } else {
            Box::new((0..n2).flat_map(move |j| (0..n1).map(move |i| (i, j))))
        };
        for (i, j) in order {
            let v = self.at(i, j);
            if v > best.0 {
                best = (v, (i, j));
            }
        }
        best
    }

    /// Bilinear interpolation in meridian coordinates.
    pub fn interpolate(&self, a: T, b: T) -> Result<T> {
        let (i, j) = match (self.grid.axis1().locate(a), self.grid.axis2().locate(b)) {
            (Some(i), Some(j)) => (i, j),
            _ => return Err(Error::InterpolationOutOfRange(format!("({a}, {b})"))),
        };
        let x = self.grid.axis1().nodes();
        let y = self.grid.axis2().nodes();
        let u = (a - x[i]) / (x[i + 1] - x[i]);
        let v = (b - y[j]) / (y[j + 1] - y[j]);
        let one = T::one();
        Ok(self.at(i, j) * (one - u) * (one - v)
            + self.at(i + 1, j) * u * (one - v)
            + self.at(i, j + 1) * (one - u) * v
            + self.at(i + 1, j + 1) * u * v)
    }

    /// Writes `rho,sigma,value` (or `s,t,value`) rows, row-major by radial
    /// index, after a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let header = if self.grid.is_ball() { "rho,sigma,value" } else { "s,t,value" };
        writeln!(out, "{header}")?;
        let (n1, n2) = self.grid.shape();
        for i in 0..n1 {
            for j in 0..n2 {
                let (a, b) = self.grid.coords(i, j);
                writeln!(out, "{},{},{}", a, b, self.at(i, j))?;
            }
        }
        Ok(())
    }
}
