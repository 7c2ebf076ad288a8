//! Discrete operators on meridian grids.
//!
//! The scheme is the conservative (finite-volume) form of the axially
//! symmetric Laplacian,
//! `Δv = μ^{-1} [∂_1(μ ∂_1 v) + ∂_2(μ κ ∂_2 v)]`, with `μ = ρ^{n-1} sin^{n-2}σ`,
//! `κ = ρ^{-2}` on a ball and `μ = s^{n-2}`, `κ = 1` on a half-space box.
//! Expanding the fluxes gives `v_ρρ + (n-1)/ρ v_ρ + ((n-2) cot σ v_σ + v_σσ)/ρ²`.
//! At `σ ∈ {0, π}` and `s = 0` the density vanishes and the flux balance over
//! the half cell reproduces the limits `(n-1) v_σσ / ρ²` and `(n-1) v_ss`; the
//! center of a ball is a single unknown whose equation sums the fluxes of
//! the polar row, reproducing `n v_ρρ`.
//!
//! Writing `A` for the stiffness matrix and `W` for the diagonal of cell
//! measures, the discrete Laplacian is `-W^{-1} A`, and the Dirichlet energy is
//! `vᵀ A v`. Integration by parts therefore holds exactly:
//! `⟨-Lv, v⟩_W = energy(v)` for every admissible `v`.

use super::field::Field;
use super::grid::MeridianGrid;
use crate::error::{Error, Result};
use crate::reduction::WeightKind;
use crate::scalar::Real;

/// `out = A x` at every node. Dirichlet values in `x` act as boundary data.
pub(crate) fn stiffness_apply<T: Real>(grid: &MeridianGrid<T>, x: &[T], out: &mut [T]) {
    let (n1, n2) = grid.shape();
    let e1 = grid.axis1().edge();
    let e2 = grid.axis2().edge();
    let w2 = grid.axis2().volume();
    let cross = grid.cross();
    for i in 0..n1 {
        let row = i * n2;
        for j in 0..n2 {
            let k = row + j;
            let c = x[k];
            let mut radial = T::zero();
            if i > 0 {
                radial = radial + e1[i - 1] * (c - x[k - n2]);
            }
            if i + 1 < n1 {
                radial = radial + e1[i] * (c - x[k + n2]);
            }
            let mut angular = T::zero();
            if j > 0 {
                angular = angular + e2[j - 1] * (c - x[k - 1]);
            }
            if j + 1 < n2 {
                angular = angular + e2[j] * (c - x[k + 1]);
            }
            out[k] = w2[j] * radial + cross[i] * angular;
        }
    }
}

/// Converts a stiffness product into Laplacian values: divides by the cell
/// measure, folds the polar row into one center value and zeroes Dirichlet
/// nodes.
pub(crate) fn stiffness_to_laplacian<T: Real>(grid: &MeridianGrid<T>, ax: &mut [T]) {
    let (n1, n2) = grid.shape();
    let w1 = grid.axis1().volume();
    let w2 = grid.axis2().volume();
    for i in 0..n1 {
        for j in 0..n2 {
            let k = i * n2 + j;
            ax[k] = if grid.is_dirichlet(i, j) { T::zero() } else { -ax[k] / (w1[i] * w2[j]) };
        }
    }
    if grid.has_pole() {
        let total: T = w2.iter().copied().sum();
        let center = (0..n2).map(|j| ax[j] * w2[j]).sum::<T>() / total;
        ax[..n2].iter_mut().for_each(|v| *v = center);
    }
}

/// Second-order discrete axially symmetric Laplacian. Values on Dirichlet
/// nodes are read as boundary data and the output is zero there.
pub fn apply_laplacian<T: Real>(f: &Field<T>) -> Result<Field<T>> {
    let grid = f.grid();
    if !f.pole_is_constant(T::lit(1e3) * T::epsilon()) {
        return Err(Error::BoundaryMismatch("values along the polar row differ".into()));
    }
    let mut out = vec![T::zero(); grid.len()];
    stiffness_apply(grid, f.values(), &mut out);
    stiffness_to_laplacian(grid, &mut out);
    Field::from_values(grid.clone(), out)
}

/// `∫|∇f|²` against the meridian measure (`|∇f|² = f_ρ² + f_σ²/ρ²` on a ball).
pub fn dirichlet_energy<T: Real>(f: &Field<T>) -> T {
    let grid = f.grid();
    let (n1, n2) = grid.shape();
    let x = f.values();
    let e1 = grid.axis1().edge();
    let e2 = grid.axis2().edge();
    let w2 = grid.axis2().volume();
    let cross = grid.cross();
    let mut total = T::zero();
    for i in 0..n1 {
        let row = i * n2;
        for j in 0..n2 {
            let k = row + j;
            if i + 1 < n1 {
                let d = x[k + n2] - x[k];
                total = total + w2[j] * e1[i] * d * d;
            }
            if j + 1 < n2 {
                let d = x[k + 1] - x[k];
                total = total + cross[i] * e2[j] * d * d;
            }
        }
    }
    total
}

/// Weighted quadrature moments `∫_{cell} h dμ` for one weight on one grid.
///
/// Every weight factors into a radial and an angular part, so the moments are
/// exact products of one-dimensional cell integrals. The ratio to the cell
/// measure is the cell-averaged weight used by the discrete PDE.
#[derive(Debug, Clone)]
pub struct WeightTable<T> {
    pub kind: WeightKind,
    pub alpha: T,
    moments: Vec<T>,
    mean: Vec<T>,
}

impl<T: Real> WeightTable<T> {
    pub fn new(grid: &MeridianGrid<T>, kind: WeightKind, alpha: T) -> Result<Self> {
        if kind.is_half_space() == grid.is_ball() {
            return Err(Error::Invalid(format!("weight {kind:?} does not live on this grid's domain")));
        }
        let (n1, n2) = grid.shape();
        let m1: Vec<T> = (0..n1).map(|i| grid.axis1().moment(i, |a| kind.radial_factor(a, alpha))).collect();
        let m2: Vec<T> = (0..n2).map(|j| grid.axis2().moment(j, |b| kind.angular_factor(b, alpha))).collect();
        let mut moments = Vec::with_capacity(n1 * n2);
        let mut mean = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                let m = m1[i] * m2[j];
                let w = grid.volume(i, j);
                moments.push(m);
                mean.push(if w > T::zero() { m / w } else { T::zero() });
            }
        }
        if grid.has_pole() {
            let mass: T = moments[..n2].iter().copied().sum();
            let measure: T = (0..n2).map(|j| grid.volume(0, j)).sum();
            mean[..n2].iter_mut().for_each(|h| *h = mass / measure);
        }
        if moments.iter().any(|m| !m.is_finite() || *m < T::zero()) {
            return Err(Error::Invalid(format!("weight {kind:?} is not integrable at alpha = {alpha}")));
        }
        Ok(Self { kind, alpha, moments, mean })
    }

    pub fn moments(&self) -> &[T] {
        &self.moments
    }

    /// Cell-averaged weight at each node. The polar row holds the average
    /// over the whole central cell.
    pub fn mean(&self) -> &[T] {
        &self.mean
    }

    /// `∫ h |f|^p`, by the lumped product rule.
    pub fn integrate_power(&self, values: &[T], p: T) -> T {
        self.moments.iter().zip(values).map(|(&m, &v)| m * v.abs().powf(p)).sum()
    }
}

/// `∫ h|f|^p dμ` (before the `2/p` power of the quotient denominator).
pub fn weighted_lp_norm<T: Real>(f: &Field<T>, kind: WeightKind, alpha: T, p: T) -> Result<T> {
    if !(p > T::lit(2.0)) {
        return Err(Error::Invalid(format!("exponent p = {p} must exceed 2")));
    }
    Ok(WeightTable::new(f.grid(), kind, alpha)?.integrate_power(f.values(), p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::GridSpec;
    use std::sync::Arc;

    fn ball(n1: usize, n2: usize) -> Arc<MeridianGrid<f64>> {
        Arc::new(GridSpec::ball(1.0, 3, n1, n2, 1.0).build().unwrap())
    }

    #[test]
    fn zero_field() {
        let f = Field::zeros(ball(16, 12));
        assert!(apply_laplacian(&f).unwrap().is_zero());
        assert_eq!(dirichlet_energy(&f), 0.0);
        assert_eq!(weighted_lp_norm(&f, WeightKind::PartialReduced, 10.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn energy_vanishes_only_for_zero() {
        let grid = ball(12, 10);
        let mut f = Field::zeros(grid.clone());
        f.values_mut()[grid.index(5, 3)] = 1e-3;
        assert!(dirichlet_energy(&f) > 0.0);
    }

    #[test]
    fn integration_by_parts_is_exact() {
        let grid = Arc::new(GridSpec::ball(1.0, 4, 20, 14, 1.07).build::<f64>().unwrap());
        let mut f = Field::from_fn(grid.clone(), |rho, sigma| (1.0 - rho * rho) * (1.0 + 0.3 * sigma.cos()) + rho.powi(3));
        f.enforce_boundary();
        let lap = apply_laplacian(&f).unwrap();
        let vol = grid.volumes();
        let pairing: f64 = lap.values().iter().zip(f.values()).zip(&vol).map(|((l, v), w)| -l * v * w).sum();
        let e = dirichlet_energy(&f);
        assert!((pairing - e).abs() < 1e-12 * e, "{pairing} vs {e}");
    }

    #[test]
    fn laplacian_is_linear() {
        let grid = ball(16, 12);
        let f = Field::from_fn(grid.clone(), |r, s| r * s.cos() + 1.0);
        let g = Field::from_fn(grid.clone(), |r, s| r * r * s.sin());
        let h = Field::from_fn(grid.clone(), |r, s| 2.5 * (r * s.cos() + 1.0) - 0.5 * r * r * s.sin());
        let (lf, lg, lh) = (apply_laplacian(&f).unwrap(), apply_laplacian(&g).unwrap(), apply_laplacian(&h).unwrap());
        for k in 0..grid.len() {
            let expect = 2.5 * lf.values()[k] - 0.5 * lg.values()[k];
            assert!((lh.values()[k] - expect).abs() < 1e-9 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn pole_row_must_be_constant() {
        let f = Field::from_fn(ball(12, 10), |_, s| s);
        assert!(matches!(apply_laplacian(&f), Err(Error::BoundaryMismatch(_))));
    }

    #[test]
    fn weight_on_wrong_domain_rejected() {
        let f = Field::zeros(ball(12, 10));
        assert!(weighted_lp_norm(&f, WeightKind::Exponential { gamma: 1.0 }, 0.0, 3.0).is_err());
        assert!(weighted_lp_norm(&f, WeightKind::PartialReduced, 10.0, 2.0).is_err());
    }

    #[test]
    fn exponential_moment_of_one() {
        let grid = Arc::new(GridSpec::half_space(12.0, 24.0, 3, 48, 96).build::<f64>().unwrap());
        let f = Field::from_fn(grid, |_, _| 1.0);
        let v = weighted_lp_norm(&f, WeightKind::Exponential { gamma: 1.0 }, 0.0, 3.0).unwrap();
        let exact = 72.0 * (1.0 - (-24.0f64).exp());
        assert!((v - exact).abs() < 1e-4);
    }
}
