use serde::{Deserialize, Serialize};

use super::axis::{place_nodes, Axis, Density, End, Focus, Spacing};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Smallest admissible node count along either direction.
pub const MIN_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// Meridian `(ρ, σ) ∈ [0, radius] x [0, π]` of a ball.
    BallPolar { radius: f64 },
    /// Meridian `(s, t) ∈ [0, s_max] x [0, t_max]` of a truncated half-space
    /// `{t > 0}`, with `s` the distance to the `t` axis.
    HalfSpaceBox { s_max: f64, t_max: f64 },
}

impl Domain {
    pub fn is_ball(&self) -> bool {
        matches!(self, Domain::BallPolar { .. })
    }
}

/// Everything needed to build a [`MeridianGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub domain: Domain,
    /// Ambient dimension of the axially symmetric problem.
    pub dim: usize,
    /// Nodes along `ρ` (or `s`).
    pub n1: usize,
    /// Nodes along `σ` (or `t`).
    pub n2: usize,
    pub spacing1: Spacing,
    pub spacing2: Spacing,
}

impl GridSpec {
    /// Polar ball grid, graded toward the outer boundary with factor `grading`.
    pub fn ball(radius: f64, dim: usize, n_rho: usize, n_sigma: usize, grading: f64) -> Self {
        Self {
            domain: Domain::BallPolar { radius },
            dim,
            n1: n_rho,
            n2: n_sigma,
            spacing1: Spacing::toward(grading, Focus::Upper),
            spacing2: Spacing::UNIFORM,
        }
    }

    pub fn half_space(s_max: f64, t_max: f64, dim: usize, n_s: usize, n_t: usize) -> Self {
        Self {
            domain: Domain::HalfSpaceBox { s_max, t_max },
            dim,
            n1: n_s,
            n2: n_t,
            spacing1: Spacing::UNIFORM,
            spacing2: Spacing::UNIFORM,
        }
    }

    pub fn with_spacing1(mut self, spacing: Spacing) -> Self {
        self.spacing1 = spacing;
        self
    }

    pub fn with_spacing2(mut self, spacing: Spacing) -> Self {
        self.spacing2 = spacing;
        self
    }

    pub fn build<T: Real>(&self) -> Result<MeridianGrid<T>> {
        MeridianGrid::new(*self)
    }
}

/// Tensor grid on a meridian domain carrying the axially symmetric measure
/// `ρ^{n-1} sin^{n-2}σ dρ dσ` (ball) or `s^{n-2} ds dt` (half-space box).
///
/// The surface area of `S^{n-2}` is left out of every integral. It multiplies
/// numerator and denominator of every Rayleigh quotient by the same power in a
/// given dimension, so comparisons between ball quotients and half-space limit
/// constants are unaffected.
///
/// Values are stored row-major by the first (radial) index.
#[derive(Debug, Clone)]
pub struct MeridianGrid<T> {
    spec: GridSpec,
    axis1: Axis<T>,
    axis2: Axis<T>,
    /// Integral over radial dual cells of the density multiplying the
    /// angular part of the gradient (`ρ^{n-3}` on a ball, `s^{n-2}` on a box).
    cross: Vec<T>,
}

impl<T: Real> MeridianGrid<T> {
    pub fn new(spec: GridSpec) -> Result<Self> {
        if spec.n1 < MIN_NODES || spec.n2 < MIN_NODES {
            return Err(Error::BadResolution(format!(
                "node counts ({}, {}) must be at least {MIN_NODES}",
                spec.n1, spec.n2
            )));
        }
        if spec.dim < 3 {
            return Err(Error::BadResolution(format!("dimension {} must be at least 3", spec.dim)));
        }
        let n = spec.dim as i32;
        let (axis1, axis2, cross) = match spec.domain {
            Domain::BallPolar { radius } => {
                if !(radius.is_finite() && radius > 0.0) {
                    return Err(Error::BadResolution(format!("radius {radius} must be positive")));
                }
                let rho = place_nodes(T::lit(radius), spec.n1, spec.spacing1)?;
                let sigma = place_nodes(T::PI(), spec.n2, spec.spacing2)?;
                let axis1 = Axis::new(rho, Density::Power(n - 1), End::Pole, End::Dirichlet);
                let axis2 = Axis::new(sigma, Density::SinPower(n - 2), End::Natural, End::Natural);
                let cross = axis1.volumes_for(Density::Power(n - 3));
                (axis1, axis2, cross)
            }
            Domain::HalfSpaceBox { s_max, t_max } => {
                if !(s_max.is_finite() && s_max > 0.0 && t_max.is_finite() && t_max > 0.0) {
                    return Err(Error::BadResolution(format!("box ({s_max}, {t_max}) must be positive")));
                }
                let s = place_nodes(T::lit(s_max), spec.n1, spec.spacing1)?;
                let t = place_nodes(T::lit(t_max), spec.n2, spec.spacing2)?;
                let axis1 = Axis::new(s, Density::Power(n - 2), End::Natural, End::Dirichlet);
                let axis2 = Axis::new(t, Density::Power(0), End::Dirichlet, End::Dirichlet);
                let cross = axis1.volume().to_vec();
                (axis1, axis2, cross)
            }
        };
        Ok(Self { spec, axis1, axis2, cross })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn domain(&self) -> Domain {
        self.spec.domain
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn is_ball(&self) -> bool {
        self.spec.domain.is_ball()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.axis1.len(), self.axis2.len())
    }

    pub fn len(&self) -> usize {
        self.axis1.len() * self.axis2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.axis2.len() + j
    }

    pub fn axis1(&self) -> &Axis<T> {
        &self.axis1
    }

    pub fn axis2(&self) -> &Axis<T> {
        &self.axis2
    }

    pub(crate) fn cross(&self) -> &[T] {
        &self.cross
    }

    /// Coordinates of node `(i, j)`: `(ρ, σ)` or `(s, t)`.
    pub fn coords(&self, i: usize, j: usize) -> (T, T) {
        (self.axis1.nodes()[i], self.axis2.nodes()[j])
    }

    pub fn is_dirichlet(&self, i: usize, j: usize) -> bool {
        self.axis1.is_dirichlet(i) || self.axis2.is_dirichlet(j)
    }

    /// The first radial row is a single point (the center of the ball).
    pub fn has_pole(&self) -> bool {
        self.axis1.lower == End::Pole
    }

    /// Quadrature weight of node `(i, j)`.
    #[inline]
    pub fn volume(&self, i: usize, j: usize) -> T {
        self.axis1.volume()[i] * self.axis2.volume()[j]
    }

    /// Quadrature weights of every node, row-major.
    pub fn volumes(&self) -> Vec<T> {
        let (n1, n2) = self.shape();
        let mut out = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                out.push(self.volume(i, j));
            }
        }
        out
    }

    /// Total meridian measure of the domain.
    pub fn total_measure(&self) -> T {
        let a: T = self.axis1.volume().iter().copied().sum();
        let b: T = self.axis2.volume().iter().copied().sum();
        a * b
    }

    /// Node index mirrored in the second coordinate (`σ -> π - σ`), when the
    /// angular nodes are symmetric.
    pub fn mirror2(&self, j: usize) -> usize {
        self.axis2.len() - 1 - j
    }

    /// Whether the second-axis nodes are symmetric about the midpoint.
    pub fn is_mirror_symmetric(&self) -> bool {
        let x = self.axis2.nodes();
        let l = x[x.len() - 1];
        let tol = T::lit(64.0) * T::epsilon() * l;
        (0..x.len()).all(|j| (x[j] + x[x.len() - 1 - j] - l).abs() <= tol)
    }

    /// Same grid with the radial coordinate scaled by `factor` (ball only).
    pub fn scaled_ball(&self, factor: f64) -> Result<Self> {
        match self.spec.domain {
            Domain::BallPolar { radius } => {
                let mut spec = self.spec;
                spec.domain = Domain::BallPolar { radius: radius * factor };
                Self::new(spec)
            }
            Domain::HalfSpaceBox { .. } => Err(Error::Invalid("only ball grids can be rescaled".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn uniform_ball_spacing() {
        let g: MeridianGrid<f64> = GridSpec::ball(1.0, 3, 64, 32, 1.0).build().unwrap();
        assert!((g.axis1().width(0) - 1.0 / 63.0).abs() < 1e-15);
        assert!((g.axis2().width(3) - PI / 31.0).abs() < 1e-14);
        assert_eq!(g.coords(0, 0), (0.0, 0.0));
        assert_eq!(g.coords(63, 31).1, PI);
    }

    #[test]
    fn graded_ball_is_finest_at_boundary() {
        let g: MeridianGrid<f64> = GridSpec::ball(1.0, 3, 64, 32, 1.05).build().unwrap();
        let a = g.axis1();
        for k in 0..61 {
            assert!((a.width(k) / a.width(k + 1) - 1.05).abs() < 1e-12);
        }
    }

    #[test]
    fn box_grid() {
        let g: MeridianGrid<f64> = GridSpec::half_space(12.0, 24.0, 3, 48, 96).build().unwrap();
        assert_eq!(g.shape(), (48, 96));
        assert!(!g.has_pole());
        assert!(g.is_dirichlet(47, 5) && g.is_dirichlet(3, 0) && g.is_dirichlet(3, 95));
        assert!(!g.is_dirichlet(0, 5));
    }

    #[test]
    fn rejects_small_or_bad_grids() {
        assert!(GridSpec::ball(1.0, 3, 7, 32, 1.0).build::<f64>().is_err());
        assert!(GridSpec::ball(1.0, 3, 16, 16, 0.9).build::<f64>().is_err());
    }

    #[test]
    fn ball_measure_is_exact() {
        // ∫_0^1 ρ^{n-1} dρ ∫_0^π sin^{n-2}σ dσ
        let g: MeridianGrid<f64> = GridSpec::ball(1.0, 3, 16, 12, 1.1).build().unwrap();
        assert!((g.total_measure() - 2.0 / 3.0).abs() < 1e-13);
        let g: MeridianGrid<f64> = GridSpec::ball(1.0, 4, 16, 12, 1.0).build().unwrap();
        assert!((g.total_measure() - 0.25 * PI / 2.0).abs() < 1e-13);
    }
}
