use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bound::{KRule, STRINGENT_EABF};
use crate::error::{Error, Result};
use crate::model::{Distribution, Locations, ParamPrior, PrecisionSpec, PriorSpec};

/// Logistic growth from a known `X0`; inferred `theta = (r, K)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticSetup {
    pub r: f64,
    pub k: f64,
    pub x0: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub n_obs: usize,
    /// Step of the reference ("fine") solver.
    pub h_fine: f64,
    pub h_init: f64,
    pub max_halvings: u32,
}

impl Default for LogisticSetup {
    fn default() -> Self {
        Self { r: 1.0, k: 1000.0, x0: 100.0, t_start: 0.0, t_end: 10.0, n_obs: 26, h_fine: 0.005, h_init: 0.1, max_halvings: 20 }
    }
}

/// Viscous Burgers shock observed at `z1`; inferred `theta = (u_L - u_R, z0)`
/// with `u_L` pinned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BurgersSetup {
    pub jump: f64,
    pub z0: f64,
    pub u_left: f64,
    pub epsilon: f64,
    pub z1: f64,
    pub times: Vec<f64>,
    /// Grid of the reference ("fine") solver.
    pub n_fine: usize,
    pub n_start: usize,
    pub n_max: usize,
    /// Grids used to calibrate the observation-error constant.
    pub calibration_grids: Vec<usize>,
    /// Error constant to use instead of calibrating.
    pub error_constant: Option<f64>,
    /// Calibration sidecar; read if present, written otherwise.
    pub calibration_file: Option<PathBuf>,
}

/// Viscosity used when none is configured.
pub const DEFAULT_EPSILON: f64 = 0.2;

impl Default for BurgersSetup {
    fn default() -> Self {
        Self {
            jump: 1.0,
            z0: 1.0,
            u_left: 2.0,
            epsilon: DEFAULT_EPSILON,
            z1: 2.0,
            times: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
            n_fine: 512,
            n_start: 128,
            n_max: 512,
            calibration_grids: vec![128, 256, 512],
            error_constant: None,
            calibration_file: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum Problem {
    Logistic(LogisticSetup),
    Burgers(BurgersSetup),
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::Logistic(_) => "logistic",
            Problem::Burgers(_) => "burgers",
        }
    }

    pub fn theta_true(&self) -> Vec<f64> {
        match self {
            Problem::Logistic(s) => vec![s.r, s.k],
            Problem::Burgers(s) => vec![s.jump, s.z0],
        }
    }

    pub fn default_prior(&self) -> PriorSpec {
        let p = |name: &str, lo, hi| ParamPrior { name: name.into(), dist: Distribution::Uniform { lo, hi } };
        let params = match self {
            Problem::Logistic(_) => vec![p("r", 0.01, 4.0), p("K", 100.0, 5000.0)],
            Problem::Burgers(_) => vec![p("jump", 0.1, 4.0), p("z0", 0.1, 3.9)],
        };
        PriorSpec::new(params).expect("static priors are valid")
    }

    /// Observation locations: times for the logistic problem, `(z1, t)` pairs
    /// for Burgers.
    pub fn locations(&self) -> Result<Locations> {
        match self {
            Problem::Logistic(s) => Locations::linspace(s.t_start, s.t_end, s.n_obs),
            Problem::Burgers(s) => Locations::new(s.times.iter().map(|&t| vec![s.z1, t]).collect()),
        }
    }

    /// Default proposal standard deviations in parameter units.
    fn default_scales(&self) -> Vec<f64> {
        match self {
            Problem::Logistic(s) => vec![0.05 * s.r, 0.05 * s.k],
            Problem::Burgers(s) => vec![0.02 * s.jump, 0.02],
        }
    }
}

/// Chain settings; unset fields fall back to problem defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChainSettings {
    pub iterations: usize,
    /// Defaults to 20% of `iterations`.
    pub burn_in: Option<usize>,
    pub adaptation_window: usize,
    pub target_acceptance: f64,
    /// Starting point; defaults to the true parameters.
    pub initial: Option<Vec<f64>>,
    /// Starting proposal sds in parameter units.
    pub scales: Option<Vec<f64>>,
    /// Give the fine and adaptive chains different seeds instead of a shared
    /// one.
    pub independent_chains: bool,
    /// Switch to decorrelated update axes halfway through adaptation.
    pub decorrelate: bool,
}

impl Default for ChainSettings {
    fn default() -> Self {
        Self {
            iterations: 40_000,
            burn_in: None,
            adaptation_window: 50,
            target_acceptance: 0.234,
            initial: None,
            scales: None,
            independent_chains: false,
            decorrelate: true,
        }
    }
}

/// How the solver tolerance is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundSettings {
    pub target_eabf: f64,
    pub k_rule: KRule,
    /// Use this tolerance instead of the bound.
    pub tolerance: Option<f64>,
    /// Largest fraction of adaptive solves allowed to miss the tolerance.
    pub max_unmet_rate: f64,
}

impl Default for BoundSettings {
    fn default() -> Self {
        Self { target_eabf: STRINGENT_EABF, k_rule: KRule::Exact, tolerance: None, max_unmet_rate: 0.01 }
    }
}

/// Full description of a fine-versus-adaptive experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub problem: Problem,
    pub sigma: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub prior: Option<PriorSpec>,
    #[serde(default)]
    pub precision: PrecisionSpec,
    #[serde(default)]
    pub chain: ChainSettings,
    #[serde(default)]
    pub bound: BoundSettings,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

fn default_bins() -> usize {
    50
}

impl ExperimentConfig {
    /// Growth curve with 26 observations on `[0, 10]`, `sigma = 30`.
    pub fn logistic() -> Self {
        Self::with_problem(Problem::Logistic(LogisticSetup::default()), 30.0)
    }

    /// Shock observed at `z1 = 2` six times on `[0, 0.5]`, `sigma = 0.0115`.
    pub fn burgers() -> Self {
        let mut c = Self::with_problem(Problem::Burgers(BurgersSetup::default()), 0.0115);
        c.chain.iterations = 20_000;
        c
    }

    fn with_problem(problem: Problem, sigma: f64) -> Self {
        Self {
            problem,
            sigma,
            seed: 20_240_601,
            prior: None,
            precision: PrecisionSpec::Identity,
            chain: ChainSettings::default(),
            bound: BoundSettings::default(),
            bins: default_bins(),
            out_dir: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let c: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        c.validate()?;
        Ok(c)
    }

    pub fn prior(&self) -> PriorSpec {
        self.prior.clone().unwrap_or_else(|| self.problem.default_prior())
    }

    pub fn initial(&self) -> Vec<f64> {
        self.chain.initial.clone().unwrap_or_else(|| self.problem.theta_true())
    }

    pub fn scales(&self) -> Vec<f64> {
        self.chain.scales.clone().unwrap_or_else(|| self.problem.default_scales())
    }

    pub fn burn_in(&self) -> usize {
        self.chain
            .burn_in
            .unwrap_or((self.chain.iterations as f64 * crate::sampler::DEFAULT_BURN_IN_FRACTION).round() as usize)
    }

    /// Seeds of the data draw, the fine chain and the adaptive chain.
    pub fn seeds(&self) -> Seeds {
        let chain = self.seed.wrapping_add(1);
        Seeds {
            data: self.seed,
            fine_chain: chain,
            adaptive_chain: if self.chain.independent_chains { self.seed.wrapping_add(2) } else { chain },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::Config(format!("sigma must be finite and >= 0, got {}", self.sigma)));
        }
        if self.prior().dim() != 2 {
            return Err(Error::Config(format!("{} has two parameters", self.problem.name())));
        }
        if self.initial().len() != 2 || self.scales().len() != 2 {
            return Err(Error::Config("initial point and scales need two entries".into()));
        }
        if self.burn_in() > self.chain.iterations {
            return Err(Error::Config("burn-in exceeds iterations".into()));
        }
        if self.bins == 0 {
            return Err(Error::Config("bins must be positive".into()));
        }
        if let Problem::Burgers(s) = &self.problem {
            if s.times.is_empty() {
                return Err(Error::Config("burgers needs observation times".into()));
            }
        }
        Ok(())
    }
}

/// Seeds actually used by an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub data: u64,
    pub fine_chain: u64,
    pub adaptive_chain: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_json_uses_defaults() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"problem": "logistic", "sigma": 30}"#).unwrap();
        assert_eq!(c.problem, Problem::Logistic(LogisticSetup::default()));
        assert_eq!(c.chain.iterations, 40_000);
        assert_eq!(c.burn_in(), 8000);
        assert_eq!(c.bins, 50);
        c.validate().unwrap();
    }

    #[test]
    fn round_trip() {
        let c = ExperimentConfig::burgers();
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn seeds() {
        let mut c = ExperimentConfig::logistic();
        let s = c.seeds();
        assert_ne!(s.data, s.fine_chain);
        assert_eq!(s.fine_chain, s.adaptive_chain);
        c.chain.independent_chains = true;
        let s = c.seeds();
        assert!(s.data != s.fine_chain && s.fine_chain != s.adaptive_chain && s.data != s.adaptive_chain);
    }

    #[test]
    fn logistic_locations_are_inclusive() {
        let l = ExperimentConfig::logistic().problem.locations().unwrap();
        assert_eq!(l.len(), 26);
        assert_eq!(l.get(0), &[0.0]);
        assert_eq!(l.get(25), &[10.0]);
    }
}
