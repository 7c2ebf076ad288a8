//! Direct solver for the stiffness system on a tensor meridian grid.
//!
//! The stiffness matrix splits as `A = A1 ⊗ W2 + C1 ⊗ A2`. Diagonalizing the
//! angular pencil `A2 φ = λ W2 φ` decouples the system into one tridiagonal
//! radial problem per angular mode. At the center of a ball only the constant
//! mode survives; every other mode vanishes there.

use std::sync::Arc;

use super::grid::MeridianGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Eigen-decomposition of a symmetric tridiagonal matrix by the implicit QL
/// method. `diag` receives the eigenvalues; `vectors` (row-major `n x n`,
/// initialized to the identity by the caller) receives the eigenvectors as
/// columns. `off[i]` couples rows `i` and `i + 1`; `off[n - 1]` is ignored.
pub(crate) fn tridiagonal_eigen<T: Real>(diag: &mut [T], off: &mut [T], vectors: &mut [T]) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    off[n - 1] = T::zero();
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::NotConverged { iterations: iter, residual: off[l].to_f64_lossy() });
            }
            let mut g = (diag[l + 1] - diag[l]) / (two * off[l]);
            let mut r = g.hypot(T::one());
            g = diag[m] - diag[l] + off[l] / (g + if g >= T::zero() { r } else { -r });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == T::zero() {
                    diag[i + 1] = diag[i + 1] - p;
                    off[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + two * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let z1 = vectors[k * n + i + 1];
                    let z0 = vectors[k * n + i];
                    vectors[k * n + i + 1] = s * z0 + c * z1;
                    vectors[k * n + i] = c * z0 - s * z1;
                }
            }
            if deflated {
                continue;
            }
            diag[l] = diag[l] - p;
            off[l] = g;
            off[m] = T::zero();
        }
    }
    Ok(())
}

/// Factorized solver for `A x = b` with the grid's boundary conditions.
#[derive(Debug, Clone)]
pub struct PoissonSolver<T> {
    grid: Arc<MeridianGrid<T>>,
    /// Active angular indices.
    j0: usize,
    m2: usize,
    /// Generalized eigenvectors, `phi[(j - j0) * m2 + k]`, `W2`-orthonormal.
    phi: Vec<T>,
    /// First radial unknown and one past the last, per mode.
    rows: Vec<(usize, usize)>,
    /// Thomas factors per mode, indexed `k * n1 + i`.
    upper: Vec<T>,
    pivot: Vec<T>,
}

impl<T: Real> PoissonSolver<T> {
    pub fn new(grid: Arc<MeridianGrid<T>>) -> Result<Self> {
        let (n1, _) = grid.shape();
        let ax1 = grid.axis1();
        let ax2 = grid.axis2();
        let r2 = ax2.active_range();
        let (j0, m2) = (r2.start, r2.len());
        let e2 = ax2.edge();
        let w2 = ax2.volume();

        let scale: Vec<T> = r2.clone().map(|j| w2[j].sqrt().recip()).collect();
        let mut diag: Vec<T> = r2
            .clone()
            .enumerate()
            .map(|(a, j)| {
                let mut d = T::zero();
                if j > 0 {
                    d = d + e2[j - 1];
                }
                if j + 1 < ax2.len() {
                    d = d + e2[j];
                }
                d * scale[a] * scale[a]
            })
            .collect();
        let mut off: Vec<T> = (0..m2)
            .map(|a| if a + 1 < m2 { -e2[j0 + a] * scale[a] * scale[a + 1] } else { T::zero() })
            .collect();
        let mut q = vec![T::zero(); m2 * m2];
        for a in 0..m2 {
            q[a * m2 + a] = T::one();
        }
        tridiagonal_eigen(&mut diag, &mut off, &mut q)?;

        let mut order: Vec<usize> = (0..m2).collect();
        order.sort_by(|&a, &b| diag[a].partial_cmp(&diag[b]).unwrap_or(std::cmp::Ordering::Equal));
        let lambda: Vec<T> = order.iter().map(|&k| diag[k].max(T::zero())).collect();
        let mut phi = vec![T::zero(); m2 * m2];
        for a in 0..m2 {
            for (k, &src) in order.iter().enumerate() {
                phi[a * m2 + k] = q[a * m2 + src] * scale[a];
            }
        }

        let e1 = ax1.edge();
        let cross = grid.cross();
        let r1 = ax1.active_range();
        let pole = grid.has_pole();
        let mut rows = Vec::with_capacity(m2);
        let mut upper = vec![T::zero(); m2 * n1];
        let mut pivot = vec![T::zero(); m2 * n1];
        for (k, &lam) in lambda.iter().enumerate() {
            let start = if pole && k > 0 { 1 } else { r1.start };
            let end = r1.end;
            rows.push((start, end));
            let mut prev_upper = T::zero();
            for i in start..end {
                let mut d = cross[i] * lam;
                if i > 0 {
                    d = d + e1[i - 1];
                }
                if i + 1 < n1 {
                    d = d + e1[i];
                }
                let lower = if i > start { -e1[i - 1] } else { T::zero() };
                let denom = d - lower * prev_upper;
                if !(denom > T::zero()) {
                    return Err(Error::Invalid("stiffness system is singular".into()));
                }
                let up = if i + 1 < end { -e1[i] / denom } else { T::zero() };
                pivot[k * n1 + i] = denom;
                upper[k * n1 + i] = up;
                prev_upper = up;
            }
        }
        Ok(Self { grid, j0, m2, phi, rows, upper, pivot })
    }

    pub fn grid(&self) -> &Arc<MeridianGrid<T>> {
        &self.grid
    }

    /// Solves `A x = b`. Entries of `b` at Dirichlet nodes are ignored and the
    /// polar row of `b` is summed into one load on the center.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let (n1, n2) = self.grid.shape();
        let (j0, m2) = (self.j0, self.m2);
        let e1 = self.grid.axis1().edge();
        let mut hat = vec![T::zero(); n1 * m2];
        for i in 0..n1 {
            let row = &b[i * n2 + j0..i * n2 + j0 + m2];
            let out = &mut hat[i * m2..(i + 1) * m2];
            for (a, &bv) in row.iter().enumerate() {
                if bv != T::zero() {
                    let phi_row = &self.phi[a * m2..(a + 1) * m2];
                    for (o, &f) in out.iter_mut().zip(phi_row) {
                        *o = *o + f * bv;
                    }
                }
            }
        }
        let mut modal = vec![T::zero(); n1 * m2];
        for k in 0..m2 {
            let (start, end) = self.rows[k];
            let mut prev = T::zero();
            for i in start..end {
                let lower = if i > start { -e1[i - 1] } else { T::zero() };
                prev = (hat[i * m2 + k] - lower * prev) / self.pivot[k * n1 + i];
                modal[i * m2 + k] = prev;
            }
            let mut next = T::zero();
            for i in (start..end).rev() {
                let v = modal[i * m2 + k] - self.upper[k * n1 + i] * next;
                modal[i * m2 + k] = v;
                next = v;
            }
        }
        let mut x = vec![T::zero(); n1 * n2];
        for i in 0..n1 {
            let coeffs = &modal[i * m2..(i + 1) * m2];
            for a in 0..m2 {
                let phi_row = &self.phi[a * m2..(a + 1) * m2];
                x[i * n2 + j0 + a] = phi_row.iter().zip(coeffs).map(|(&f, &c)| f * c).sum();
            }
        }
        if self.grid.has_pole() {
            let w2 = self.grid.axis2().volume();
            let total: T = w2.iter().copied().sum();
            let mean = (0..n2).map(|j| x[j] * w2[j]).sum::<T>() / total;
            x[..n2].iter_mut().for_each(|v| *v = mean);
        }
        let r1 = self.grid.axis1().active_range();
        for i in (0..r1.start).chain(r1.end..n1) {
            x[i * n2..(i + 1) * n2].iter_mut().for_each(|v| *v = T::zero());
        }
        x
    }

    /// Solves `-Δu = f` with homogeneous boundary data.
    pub fn solve_source(&self, f: &[T]) -> Vec<T> {
        let (n1, n2) = self.grid.shape();
        let mut b = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                b.push(f[i * n2 + j] * self.grid.volume(i, j));
            }
        }
        self.solve(&b)
    }
}
