//! One-dimensional node sets with finite-volume data for a separable measure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// End of an interval toward which nodes are refined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Focus {
    Lower,
    Upper,
    Both,
}

/// Geometric node spacing: adjacent intervals differ by the factor `ratio`,
/// finest at the focus. `ratio = 1` is a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spacing {
    pub ratio: f64,
    pub focus: Focus,
}

impl Spacing {
    pub const UNIFORM: Spacing = Spacing { ratio: 1.0, focus: Focus::Upper };

    pub fn toward(ratio: f64, focus: Focus) -> Self {
        Self { ratio, focus }
    }

    pub fn is_uniform(&self) -> bool {
        self.ratio == 1.0
    }
}

/// Condition attached to an end of an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    /// No flux through the end; the density vanishes there (symmetry axis).
    Natural,
    /// Homogeneous Dirichlet node.
    Dirichlet,
    /// Polar center: every node of the other axis at this end is the same point.
    Pole,
}

/// Density of the measure along an axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    /// `x^k`
    Power(i32),
    /// `sin(x)^k`
    SinPower(i32),
}

impl Density {
    pub fn eval<T: Real>(&self, x: T) -> T {
        match *self {
            Density::Power(k) => x.powi(k),
            Density::SinPower(k) => x.sin().powi(k),
        }
    }
}

const GAUSS_NODES: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GAUSS_WEIGHTS: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// Eight-point Gauss-Legendre rule on `[a, b]`.
pub(crate) fn gauss<T: Real>(a: T, b: T, f: impl Fn(T) -> T) -> T {
    if b <= a {
        return T::zero();
    }
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    let mut acc = T::zero();
    for (&x, &w) in GAUSS_NODES.iter().zip(&GAUSS_WEIGHTS) {
        let dx = half * T::lit(x);
        acc = acc + T::lit(w) * (f(mid - dx) + f(mid + dx));
    }
    acc * half
}

#[derive(Debug, Clone)]
pub struct Axis<T> {
    nodes: Vec<T>,
    /// Dual-cell boundaries, `nodes.len() + 1` entries.
    faces: Vec<T>,
    density: Density,
    /// Integral of the density over each dual cell.
    volume: Vec<T>,
    /// Density at each interval midpoint divided by the interval length.
    edge: Vec<T>,
    pub lower: End,
    pub upper: End,
}

pub(crate) fn place_nodes<T: Real>(length: T, count: usize, spacing: Spacing) -> Result<Vec<T>> {
    if !(spacing.ratio.is_finite() && spacing.ratio >= 1.0) {
        return Err(Error::BadResolution(format!("grading factor {} must be >= 1", spacing.ratio)));
    }
    let intervals = count - 1;
    let q = T::lit(spacing.ratio);
    let widths: Vec<T> = (0..intervals)
        .map(|k| {
            let exponent = match spacing.focus {
                Focus::Lower => k,
                Focus::Upper => intervals - 1 - k,
                Focus::Both => k.min(intervals - 1 - k),
            };
            q.powi(exponent as i32)
        })
        .collect();
    let total: T = widths.iter().copied().sum();
    let mut nodes = Vec::with_capacity(count);
    let mut x = T::zero();
    nodes.push(x);
    for w in &widths {
        x = x + *w / total * length;
        nodes.push(x);
    }
    nodes[intervals] = length;
    if spacing.focus == Focus::Both {
        let mirrored: Vec<T> = nodes.iter().rev().map(|&y| length - y).collect();
        for (x, m) in nodes.iter_mut().zip(mirrored) {
            *x = (*x + m) / T::lit(2.0);
        }
    }
    if nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadResolution("grading produced a non-increasing node sequence".into()));
    }
    Ok(nodes)
}

impl<T: Real> Axis<T> {
    pub fn new(nodes: Vec<T>, density: Density, lower: End, upper: End) -> Self {
        let n = nodes.len();
        let two = T::lit(2.0);
        let mut faces = Vec::with_capacity(n + 1);
        faces.push(nodes[0]);
        for w in nodes.windows(2) {
            faces.push((w[0] + w[1]) / two);
        }
        faces.push(nodes[n - 1]);
        let volume = (0..n).map(|i| cell_integral(&faces, &nodes, i, |x| density.eval(x))).collect();
        let edge = nodes.windows(2).map(|w| density.eval((w[0] + w[1]) / two) / (w[1] - w[0])).collect();
        Self { nodes, faces, density, volume, edge, lower, upper }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn volume(&self) -> &[T] {
        &self.volume
    }

    pub fn edge(&self) -> &[T] {
        &self.edge
    }

    pub fn density(&self) -> Density {
        self.density
    }

    /// Integral of `g` times the density over dual cell `i`.
    pub fn moment(&self, i: usize, g: impl Fn(T) -> T) -> T {
        let d = self.density;
        cell_integral(&self.faces, &self.nodes, i, |x| g(x) * d.eval(x))
    }

    /// Integral of a different density over each dual cell.
    pub fn volumes_for(&self, density: Density) -> Vec<T> {
        (0..self.len()).map(|i| cell_integral(&self.faces, &self.nodes, i, |x| density.eval(x))).collect()
    }

    pub fn is_dirichlet(&self, i: usize) -> bool {
        (i == 0 && self.lower == End::Dirichlet) || (i + 1 == self.len() && self.upper == End::Dirichlet)
    }

    /// Range of indices that carry unknowns.
    pub fn active_range(&self) -> std::ops::Range<usize> {
        let start = usize::from(self.lower == End::Dirichlet);
        let end = self.len() - usize::from(self.upper == End::Dirichlet);
        start..end
    }

    /// Spacing of interval `k`.
    pub fn width(&self, k: usize) -> T {
        self.nodes[k + 1] - self.nodes[k]
    }

    /// Index of the interval containing `x`, clamped to the axis.
    pub fn locate(&self, x: T) -> Option<usize> {
        let n = self.len();
        if x < self.nodes[0] || x > self.nodes[n - 1] {
            return None;
        }
        let k = self.nodes.partition_point(|&y| y <= x);
        Some(k.saturating_sub(1).min(n - 2))
    }
}

fn cell_integral<T: Real>(faces: &[T], nodes: &[T], i: usize, f: impl Fn(T) -> T) -> T {
    gauss(faces[i], nodes[i], &f) + gauss(nodes[i], faces[i + 1], &f)
}
