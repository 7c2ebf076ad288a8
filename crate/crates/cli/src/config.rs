//! Run configuration, read from a single JSON file.
//!
//! Every field is optional; missing fields take the defaults of
//! [`RunConfig::default`]. Example:
//!
//! ```json
//! {
//!   "case": { "kind": "partial_henon", "m": 2 },
//!   "p": 3.0,
//!   "alpha": 80.0,
//!   "alphas": [40.0, 80.0, 160.0],
//!   "grid": { "n_rho": 256, "n_sigma": 128, "radial_grading": 1.03 },
//!   "limit": { "s_max": 32.0, "t_max": 32.0, "n_s": 160, "n_t": 160 },
//!   "solver": { "tol": 1e-6, "max_iter": 5000 },
//!   "output": "out",
//!   "seed": 0
//! }
//! ```

use std::path::{Path, PathBuf};

use henon_core::mesh::GridSpec;
use henon_core::model::{ProblemCase, ProblemSpec};
use henon_core::solver::{case_grid, LimitSetup, SolverConfig, DEFAULT_RADIAL_GRADING};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n_rho: usize,
    pub n_sigma: usize,
    pub radial_grading: f64,
    /// Angular grading factor; the case default when absent.
    pub angular_grading: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n_rho: 256, n_sigma: 128, radial_grading: DEFAULT_RADIAL_GRADING, angular_grading: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitConfig {
    /// Decay rate of the limit weight; the case default (1/2 partial,
    /// 1 hyperplane) when absent.
    pub gamma: Option<f64>,
    pub s_max: f64,
    pub t_max: f64,
    pub n_s: usize,
    pub n_t: usize,
    pub grading_s: f64,
    pub grading_t: f64,
}

impl Default for LimitConfig {
    fn default() -> Self {
        let s = LimitSetup::default();
        Self {
            gamma: None,
            s_max: s.s_max,
            t_max: s.t_max,
            n_s: s.n_s,
            n_t: s.n_t,
            grading_s: s.grading_s,
            grading_t: s.grading_t,
        }
    }
}

impl LimitConfig {
    pub fn setup(&self) -> LimitSetup {
        LimitSetup {
            s_max: self.s_max,
            t_max: self.t_max,
            n_s: self.n_s,
            n_t: self.n_t,
            grading_s: self.grading_s,
            grading_t: self.grading_t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub case: ProblemCase,
    pub p: f64,
    /// Weight exponent of `solve`.
    pub alpha: f64,
    /// Weight exponents of `sweep`, strictly increasing.
    pub alphas: Vec<f64>,
    pub grid: GridConfig,
    pub limit: LimitConfig,
    pub solver: SolverConfig,
    pub output: PathBuf,
    /// Seed of the random start.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            case: ProblemCase::PartialHenon { m: 2 },
            p: 3.0,
            alpha: 80.0,
            alphas: vec![40.0, 80.0, 160.0],
            grid: GridConfig::default(),
            limit: LimitConfig::default(),
            solver: SolverConfig::default(),
            output: PathBuf::from("out"),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn spec(&self, alpha: f64) -> ProblemSpec {
        ProblemSpec::new(self.case, self.p, alpha)
    }

    pub fn grid_spec(&self) -> GridSpec {
        case_grid(self.case, self.grid.n_rho, self.grid.n_sigma, self.grid.radial_grading, self.grid.angular_grading)
    }

    /// Solver settings with the run seed applied.
    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig { seed: self.seed, ..self.solver.clone() }
    }

    /// SHA-256 of the configuration, excluding where the output goes.
    pub fn hash(&self) -> String {
        let canonical = RunConfig { output: PathBuf::new(), ..self.clone() };
        let digest = Sha256::digest(serde_json::to_vec(&canonical).expect("config serializes"));
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
