//! Problem specifications, symmetry classes and exponent bookkeeping.
//!
//! Three weighted problems `-Δu = h(x)|u|^{p-2}u` on the unit ball are
//! covered. The two doubly symmetric problems on `B_{2m}` are handled through
//! their axially symmetric reductions on `B_{m+1}`; the hyperplane problem is
//! solved directly in `B_N`. Everything downstream works with the reduced
//! dimension `n` (`m + 1` or `N`), so a single set of exponent formulas covers
//! all three cases.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::Real;

/// Weight exponents at or below this value trigger a warning: the
/// concentration results only hold for `alpha` beyond an unquantified
/// threshold which is known to exceed it.
pub const ALPHA_WARNING_THRESHOLD: f64 = 4.0;

/// Which weighted problem is being solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemCase {
    /// `h(x) = |x|^alpha` on `B_{2m}`.
    FullHenon { m: usize },
    /// `h(x) = |y_2|^alpha` on `B_{2m}`, `x = (y_1, y_2)`.
    PartialHenon { m: usize },
    /// `h(x) = |x_N|^alpha` on `B_N`.
    Hyperplane { n: usize },
}

impl ProblemCase {
    /// Dimension of the space the axially symmetric problem lives in.
    pub fn reduced_dim(&self) -> usize {
        match *self {
            ProblemCase::FullHenon { m } | ProblemCase::PartialHenon { m } => m + 1,
            ProblemCase::Hyperplane { n } => n,
        }
    }

    /// Dimension of the original problem.
    pub fn original_dim(&self) -> usize {
        match *self {
            ProblemCase::FullHenon { m } | ProblemCase::PartialHenon { m } => 2 * m,
            ProblemCase::Hyperplane { n } => n,
        }
    }

    /// Symmetry class of the discretized (reduced) problem.
    pub fn reduced_symmetry(&self) -> SymmetryClass {
        match self {
            ProblemCase::FullHenon { .. } | ProblemCase::PartialHenon { .. } => SymmetryClass::AxiSym,
            ProblemCase::Hyperplane { .. } => SymmetryClass::AxiSymEven,
        }
    }

    /// Symmetry class of the original problem.
    pub fn original_symmetry(&self) -> SymmetryClass {
        match self {
            ProblemCase::FullHenon { .. } | ProblemCase::PartialHenon { .. } => {
                SymmetryClass::DoublySymmetric
            }
            ProblemCase::Hyperplane { .. } => SymmetryClass::AxiSymEven,
        }
    }

    pub fn is_reduced(&self) -> bool {
        !matches!(self, ProblemCase::Hyperplane { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProblemCase::FullHenon { .. } => "full_henon",
            ProblemCase::PartialHenon { .. } => "partial_henon",
            ProblemCase::Hyperplane { .. } => "hyperplane",
        }
    }
}

/// Symmetry imposed on admissible functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    /// Invariant under `O(m) x O(m)` acting blockwise on `R^{2m}`.
    DoublySymmetric,
    /// Invariant under rotations about the last coordinate axis.
    AxiSym,
    /// Axially symmetric and even in the last coordinate.
    AxiSymEven,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub case: ProblemCase,
    pub p: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Warning {
    /// `alpha <= 4`: outside the regime where concentration is guaranteed.
    SmallAlpha,
}

/// Outcome of [`ProblemSpec::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Validation {
    Ok,
    Warnings(Vec<Warning>),
    Errors(Vec<Error>),
}

impl Validation {
    pub fn is_usable(&self) -> bool {
        !matches!(self, Validation::Errors(_))
    }

    /// Collapses into a `Result`, keeping the first error.
    pub fn into_result(self) -> Result<Vec<Warning>, Error> {
        match self {
            Validation::Ok => Ok(Vec::new()),
            Validation::Warnings(w) => Ok(w),
            Validation::Errors(mut e) => Err(e.remove(0)),
        }
    }
}

/// Upper end of the admissible exponent range `2 < p < 2n/(n-2)`.
pub fn critical_exponent(n: usize) -> f64 {
    if n <= 2 {
        f64::INFINITY
    } else {
        2.0 * n as f64 / (n as f64 - 2.0)
    }
}

impl ProblemSpec {
    pub fn new(case: ProblemCase, p: f64, alpha: f64) -> Self {
        Self { case, p, alpha }
    }

    pub fn reduced_dim(&self) -> usize {
        self.case.reduced_dim()
    }

    pub fn validate(&self) -> Validation {
        let mut errors = Vec::new();
        match self.case {
            ProblemCase::FullHenon { m } | ProblemCase::PartialHenon { m } if m < 2 => {
                errors.push(Error::BadDimension(format!("half-dimension m = {m} must be at least 2")));
            }
            ProblemCase::Hyperplane { n } if n < 3 => {
                errors.push(Error::BadDimension(format!("dimension N = {n} must be at least 3")));
            }
            _ => {}
        }
        let upper = critical_exponent(self.reduced_dim());
        if !(self.p.is_finite() && self.p > 2.0 && self.p < upper) {
            errors.push(Error::ExponentOutOfRange { p: self.p, lower: 2.0, upper });
        }
        // The reduced weights |z|^{(alpha-2)/2} and h_alpha are singular at the
        // origin unless alpha > 2.
        let alpha_floor = if self.case.is_reduced() { 2.0 } else { 0.0 };
        if !(self.alpha.is_finite() && self.alpha > alpha_floor) {
            errors.push(Error::BadAlpha(self.alpha));
        }
        if !errors.is_empty() {
            return Validation::Errors(errors);
        }
        if self.alpha <= ALPHA_WARNING_THRESHOLD {
            Validation::Warnings(vec![Warning::SmallAlpha])
        } else {
            Validation::Ok
        }
    }

    pub fn exponents<T: Real>(&self) -> Exponents<T> {
        Exponents::new(self.reduced_dim(), T::lit(self.p))
    }
}

/// Scaling exponents governing the `alpha -> infinity` regime in dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents<T> {
    /// `2/(p-2)`: growth rate of the maximum.
    pub blowup: T,
    /// `(2n - p(n-2))/p`: growth rate of the Rayleigh quotient.
    pub quotient_beta: T,
    /// `(2n - p(n-2))/(p-2)`: growth rate of the Dirichlet energy.
    pub energy_gamma: T,
}

impl<T: Real> Exponents<T> {
    pub fn new(n: usize, p: T) -> Self {
        let two = T::lit(2.0);
        let n = T::from_usize_lossy(n);
        let gap = two * n - p * (n - two);
        Self { blowup: two / (p - two), quotient_beta: gap / p, energy_gamma: gap / (p - two) }
    }
}
