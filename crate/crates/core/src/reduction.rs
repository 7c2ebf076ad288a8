//! Change of variables between doubly symmetric functions on `B_{2m}(0,1)`
//! and axially symmetric functions on `B_{m+1}(0,1/2)`, plus the weights of
//! every problem in reduced coordinates.
//!
//! A doubly symmetric `u` depends on `(|y_1|, |y_2|) = (r cos θ, r sin θ)`.
//! Setting `r = sqrt(2ρ)`, `θ = σ/2` turns it into an axially symmetric `v`
//! on the ball of radius 1/2 in `R^{m+1}`, with `ρ = |z|` and `σ` the angle
//! from the positive last axis, and `Δ_{2m} u = 2|z| Δ_{m+1} v` away from the
//! origin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::stats::fit_loglog;

/// Radius of the ball the reduced problem lives on.
pub const REDUCED_BALL_RADIUS: f64 = 0.5;

/// Point of an axially symmetric domain in polar meridian coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedPoint<T> {
    /// `|z|`
    pub rho: T,
    /// Angle from the positive last axis, in `[0, π]`.
    pub sigma: T,
}

/// Moduli of the two `m`-dimensional blocks of a point of `R^{2m}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OriginalPoint<T> {
    pub r1: T,
    pub r2: T,
}

impl<T: Real> ReducedPoint<T> {
    pub fn new(rho: T, sigma: T) -> Self {
        Self { rho, sigma }
    }

    /// Last Cartesian coordinate `z_{m+1} = ρ cos σ`.
    pub fn axial(&self) -> T {
        self.rho * self.sigma.cos()
    }

    /// Distance to the symmetry axis.
    pub fn cylindrical(&self) -> T {
        self.rho * self.sigma.sin()
    }
}

/// Block moduli of the point with reduced coordinates `(rho, sigma)`, without
/// domain checks. Uses the half-angle form, which avoids cancellation in
/// `sqrt(|z| ± z_{m+1})` near the axis.
pub fn original_moduli<T: Real>(rho: T, sigma: T) -> OriginalPoint<T> {
    let r = (T::lit(2.0) * rho).sqrt();
    let half = sigma / T::lit(2.0);
    OriginalPoint { r1: r * half.cos(), r2: r * half.sin() }
}

pub fn map_reduced_to_original<T: Real>(z: ReducedPoint<T>) -> Result<OriginalPoint<T>> {
    let radius = T::lit(REDUCED_BALL_RADIUS);
    if !(z.rho >= T::zero() && z.rho < radius) {
        return Err(Error::Domain(format!("rho = {} not in [0, 1/2)", z.rho)));
    }
    if !(z.sigma >= T::zero() && z.sigma <= T::PI()) {
        return Err(Error::Domain(format!("sigma = {} not in [0, pi]", z.sigma)));
    }
    Ok(original_moduli(z.rho, z.sigma))
}

pub fn map_original_to_reduced<T: Real>(y: OriginalPoint<T>) -> Result<ReducedPoint<T>> {
    let r2 = y.r1 * y.r1 + y.r2 * y.r2;
    if !(y.r1 >= T::zero() && y.r2 >= T::zero() && r2 < T::one()) {
        return Err(Error::Domain(format!("({}, {}) not inside the unit ball", y.r1, y.r2)));
    }
    Ok(ReducedPoint { rho: r2 / T::lit(2.0), sigma: T::lit(2.0) * y.r2.atan2(y.r1) })
}

/// Original radius `r_α = |(y_1, y_2)|` of a point found at radius `rho_unit`
/// on the unit-ball grid of the rescaled reduced problem. The unit ball maps to
/// `B(0, 1/2)` by `z -> z/2`, and then `r = sqrt(2ρ)`.
pub fn unit_ball_radius_to_original<T: Real>(rho_unit: T) -> T {
    let rho_half = rho_unit * T::lit(REDUCED_BALL_RADIUS);
    (T::lit(2.0) * rho_half).sqrt()
}

/// Weight functions, all evaluated in meridian coordinates. Ball weights read
/// `(ρ, σ)`; [`WeightKind::Exponential`] reads the half-space `(s, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    /// `|z|^{(α-2)/2}` on the unit ball: reduced Hénon weight.
    FullHenonReduced,
    /// `h_α(z) = ((|z| - z_{m+1})/2)^{α/2} / |z|` on the unit ball.
    PartialReduced,
    /// `|z_N|^α` on `B_N`.
    HyperplaneDirect,
    /// `|z|^α` on `B_N`, the radial comparison weight for the hyperplane case.
    HenonDirect,
    /// `|2z|^{(α-2)/2}` on `B(0, 1/2)`.
    FullHenonHalfBall,
    /// `(|z| - z_{m+1})^{α/2} / (2|z|)` on `B(0, 1/2)`.
    PartialHalfBall,
    /// `e^{-γ t}` on the half-space limit domain.
    Exponential { gamma: f64 },
}

impl WeightKind {
    /// Evaluates the weight. Reduced weights extend by 0 to the origin when
    /// `alpha > 2`.
    pub fn eval<T: Real>(&self, a: T, b: T, alpha: T) -> T {
        self.radial_factor(a, alpha) * self.angular_factor(b, alpha)
    }

    /// Every weight factors as a function of the first meridian coordinate
    /// times a function of the second; this is the first factor.
    pub fn radial_factor<T: Real>(&self, a: T, alpha: T) -> T {
        let two = T::lit(2.0);
        let half_alpha_minus_one = alpha / two - T::one();
        match *self {
            WeightKind::FullHenonReduced | WeightKind::PartialReduced => radial_power(a, half_alpha_minus_one),
            WeightKind::FullHenonHalfBall | WeightKind::PartialHalfBall => {
                radial_power(two * a, half_alpha_minus_one)
            }
            WeightKind::HyperplaneDirect | WeightKind::HenonDirect => radial_power(a, alpha),
            WeightKind::Exponential { .. } => T::one(),
        }
    }

    pub fn angular_factor<T: Real>(&self, b: T, alpha: T) -> T {
        match *self {
            WeightKind::FullHenonReduced | WeightKind::FullHenonHalfBall | WeightKind::HenonDirect => T::one(),
            // (|z| - z_{m+1})/2 = ρ sin²(σ/2)
            WeightKind::PartialReduced | WeightKind::PartialHalfBall => {
                (b / T::lit(2.0)).sin().abs().powf(alpha)
            }
            WeightKind::HyperplaneDirect => b.cos().abs().powf(alpha),
            WeightKind::Exponential { gamma } => (-T::lit(gamma) * b).exp(),
        }
    }

    pub fn eval_at<T: Real>(&self, z: ReducedPoint<T>, alpha: T) -> T {
        self.eval(z.rho, z.sigma, alpha)
    }

    /// Weights defined on the half-space limit domain rather than a ball.
    pub fn is_half_space(&self) -> bool {
        matches!(self, WeightKind::Exponential { .. })
    }
}

fn radial_power<T: Real>(rho: T, exponent: T) -> T {
    if rho <= T::zero() {
        if exponent > T::zero() {
            T::zero()
        } else if exponent == T::zero() {
            T::one()
        } else {
            T::infinity()
        }
    } else {
        rho.powf(exponent)
    }
}

pub fn eval_weight<T: Real>(kind: WeightKind, z: ReducedPoint<T>, alpha: T) -> T {
    kind.eval_at(z, alpha)
}

/// Axially symmetric test functions with closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticField {
    /// `v = |z|²`
    RadiusSquared,
    /// `v ≡ c`
    Constant(f64),
    /// `v = z_{m+1} = ρ cos σ`
    LastCoordinate,
}

/// Value and first/second partial derivatives in `(ρ, σ)`.
#[derive(Debug, Clone, Copy)]
struct Jet<T> {
    v: T,
    d_rho: T,
    d_rho2: T,
    d_sigma: T,
    d_sigma2: T,
}

impl AnalyticField {
    pub const SUITE: [AnalyticField; 3] =
        [AnalyticField::RadiusSquared, AnalyticField::Constant(1.0), AnalyticField::LastCoordinate];

    pub fn name(&self) -> &'static str {
        match self {
            AnalyticField::RadiusSquared => "radius_squared",
            AnalyticField::Constant(_) => "constant",
            AnalyticField::LastCoordinate => "last_coordinate",
        }
    }

    pub fn value<T: Real>(&self, rho: T, sigma: T) -> T {
        self.jet(rho, sigma).v
    }

    fn jet<T: Real>(&self, rho: T, sigma: T) -> Jet<T> {
        let zero = T::zero();
        match *self {
            AnalyticField::RadiusSquared => Jet {
                v: rho * rho,
                d_rho: T::lit(2.0) * rho,
                d_rho2: T::lit(2.0),
                d_sigma: zero,
                d_sigma2: zero,
            },
            AnalyticField::Constant(c) => {
                Jet { v: T::lit(c), d_rho: zero, d_rho2: zero, d_sigma: zero, d_sigma2: zero }
            }
            AnalyticField::LastCoordinate => {
                let (s, c) = sigma.sin_cos();
                Jet { v: rho * c, d_rho: c, d_rho2: zero, d_sigma: -rho * s, d_sigma2: -rho * c }
            }
        }
    }

    /// `Δ_{m+1} v` from the axially symmetric polar form.
    pub fn reduced_laplacian<T: Real>(&self, m: usize, rho: T, sigma: T) -> T {
        let j = self.jet(rho, sigma);
        let m = T::from_usize_lossy(m);
        let cot = sigma.cos() / sigma.sin();
        j.d_rho2 + m / rho * j.d_rho + (m - T::one()) / (rho * rho) * cot * j.d_sigma + j.d_sigma2 / (rho * rho)
    }

    /// `Δ_{2m} u` for the transported `u(r, θ) = v(r²/2, 2θ)`, evaluated with
    /// the doubly symmetric polar Laplacian and the chain rule.
    pub fn transported_laplacian<T: Real>(&self, m: usize, rho: T, sigma: T) -> T {
        let two = T::lit(2.0);
        let r = (two * rho).sqrt();
        let theta = sigma / two;
        let j = self.jet(rho, sigma);
        // ∂ρ/∂r = r, ∂σ/∂θ = 2
        let u_r = j.d_rho * r;
        let u_rr = j.d_rho2 * r * r + j.d_rho;
        let u_t = two * j.d_sigma;
        let u_tt = T::lit(4.0) * j.d_sigma2;
        doubly_symmetric_laplacian(m, r, theta, u_r, u_rr, u_t, u_tt)
    }
}

fn doubly_symmetric_laplacian<T: Real>(m: usize, r: T, theta: T, u_r: T, u_rr: T, u_t: T, u_tt: T) -> T {
    let mf = T::from_usize_lossy(m);
    let (s, c) = theta.sin_cos();
    u_rr + (T::lit(2.0) * mf - T::one()) / r * u_r + (mf - T::one()) / (r * r) * (c / s - s / c) * u_t + u_tt / (r * r)
}

fn check_samples<T: Real>(samples: &[ReducedPoint<T>], floor: T) -> Result<()> {
    for z in samples {
        if z.rho < floor {
            return Err(Error::SingularSample { rho: z.rho.to_f64_lossy(), floor: floor.to_f64_lossy() });
        }
        if !(z.sigma > T::zero() && z.sigma < T::PI()) || z.rho >= T::lit(REDUCED_BALL_RADIUS) {
            return Err(Error::Domain(format!("sample ({}, {}) must lie off the axis inside B(0,1/2)", z.rho, z.sigma)));
        }
    }
    Ok(())
}

fn discrepancy<T: Real>(lhs: T, rhs: T) -> T {
    (lhs - rhs).abs() / rhs.abs().max(T::one())
}

/// Largest discrepancy `|Δ_{2m}u - 2|z|Δ_{m+1}v| / max(1, |2|z|Δ_{m+1}v|)` over
/// the samples, both sides evaluated from closed-form derivatives.
pub fn laplacian_correspondence_residual<T: Real>(
    field: AnalyticField,
    m: usize,
    samples: &[ReducedPoint<T>],
    floor: T,
) -> Result<T> {
    check_samples(samples, floor)?;
    let two = T::lit(2.0);
    Ok(samples
        .iter()
        .map(|z| {
            let lhs = field.transported_laplacian(m, z.rho, z.sigma);
            let rhs = two * z.rho * field.reduced_laplacian(m, z.rho, z.sigma);
            discrepancy(lhs, rhs)
        })
        .fold(T::zero(), T::max))
}

/// Same comparison with `Δ_{2m}u` approximated by central differences of
/// step `h` in `(r, θ)` applied to point values of `u`.
pub fn laplacian_correspondence_fd_error<T: Real>(
    field: AnalyticField,
    m: usize,
    samples: &[ReducedPoint<T>],
    floor: T,
    h: T,
) -> Result<T> {
    check_samples(samples, floor)?;
    let two = T::lit(2.0);
    let u = |r: T, theta: T| field.value(r * r / two, two * theta);
    Ok(samples
        .iter()
        .map(|z| {
            let r = (two * z.rho).sqrt();
            let theta = z.sigma / two;
            let c = u(r, theta);
            let (rp, rm) = (u(r + h, theta), u(r - h, theta));
            let (tp, tm) = (u(r, theta + h), u(r, theta - h));
            let u_r = (rp - rm) / (two * h);
            let u_rr = (rp - two * c + rm) / (h * h);
            let u_t = (tp - tm) / (two * h);
            let u_tt = (tp - two * c + tm) / (h * h);
            let lhs = doubly_symmetric_laplacian(m, r, theta, u_r, u_rr, u_t, u_tt);
            let rhs = two * z.rho * field.reduced_laplacian(m, z.rho, z.sigma);
            discrepancy(lhs, rhs)
        })
        .fold(T::zero(), T::max))
}

/// Errors of the central-difference check under step refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement<T> {
    pub steps: Vec<T>,
    pub errors: Vec<T>,
    /// Log-log slope of error against step; `None` when the errors are at
    /// rounding level (exactly reproduced test functions).
    pub slope: Option<T>,
}

pub fn correspondence_refinement<T: Real>(
    field: AnalyticField,
    m: usize,
    samples: &[ReducedPoint<T>],
    floor: T,
    steps: &[T],
) -> Result<Refinement<T>> {
    let errors = steps
        .iter()
        .map(|&h| laplacian_correspondence_fd_error(field, m, samples, floor, h))
        .collect::<Result<Vec<_>>>()?;
    let noise = T::epsilon().sqrt();
    let slope = if errors.iter().all(|&e| e > noise) {
        Some(fit_loglog(steps, &errors)?.slope)
    } else {
        None
    };
    Ok(Refinement { steps: steps.to_vec(), errors, slope })
}

/// Deterministic sample set away from the origin and the axis.
pub fn default_samples<T: Real>() -> Vec<ReducedPoint<T>> {
    let mut out = Vec::new();
    for i in 0..6 {
        for j in 0..7 {
            let rho = T::lit(0.08 + 0.065 * i as f64);
            let sigma = T::lit(0.3 + j as f64 * (std::f64::consts::PI - 0.6) / 6.0);
            out.push(ReducedPoint::new(rho, sigma));
        }
    }
    out
}
