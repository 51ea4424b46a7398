//! End-to-end fine-versus-adaptive experiments: synthetic data, tolerance
//! from the EABF bound, two chains, and a posterior comparison.

mod compare;
mod config;
pub mod io;
mod synthetic;

use serde::{Deserialize, Serialize};

pub use compare::{binned_tv, common_histogram, compare_traces, histogram_bins, ComparisonReport, HistogramBin, MarginalComparison};
pub use config::{
    BoundSettings, BurgersSetup, ChainSettings, ExperimentConfig, LogisticSetup, Problem, Seeds, DEFAULT_EPSILON,
};
pub use synthetic::{exact_values, generate_synthetic, SyntheticData};

use crate::bound::{tolerance_for, ToleranceReport};
use crate::burgers::{calibrate, BurgersParams, Calibration};
use crate::error::{Error, Result};
use crate::forward::{BurgersForward, GridMode, LogisticForward, StepMode};
use crate::model::{build_precision, ForwardEvaluator, NoiseModel, PosteriorProblem, StatModel};
use crate::sampler::{effective_sample_size, map_estimate, run_chain, unconstrained_scale, PosteriorTarget, SamplerConfig, SolverStats, Trace};

/// Which discretization a chain uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Reference solver at a fixed fine resolution.
    Fine,
    /// Error-controlled solver driven by the bound's tolerance.
    Adaptive,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Fine => "fine",
            Variant::Adaptive => "adaptive",
        }
    }
}

/// Data, statistical model and tolerance shared by both chains.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: ExperimentConfig,
    pub seeds: Seeds,
    pub data: SyntheticData,
    pub model: StatModel,
    pub bound: ToleranceReport,
    /// Tolerance handed to the adaptive solver: the bound's `K0` unless
    /// overridden.
    pub tolerance: f64,
    /// Observation-error constant of the Burgers grid controller.
    pub error_constant: Option<f64>,
    pub calibration: Option<Calibration>,
}

/// Burgers error constant: configured, loaded from the sidecar, or
/// calibrated at the true parameters (and then saved to the sidecar).
fn burgers_constant(s: &BurgersSetup) -> Result<(f64, Option<Calibration>)> {
    if let Some(c) = s.error_constant {
        return Ok((c, None));
    }
    let params = BurgersParams::new(s.u_left, s.u_left - s.jump, s.z0, s.epsilon);
    if let Some(path) = &s.calibration_file {
        if path.exists() {
            let cal = Calibration::load(path)?;
            if cal.params == params && cal.z1 == s.z1 && cal.obs_times == s.times {
                return Ok((cal.error_constant, Some(cal)));
            }
        }
    }
    let cal = calibrate(&params, s.z1, &s.times, &s.calibration_grids)?;
    if let Some(path) = &s.calibration_file {
        cal.save(path)?;
    }
    Ok((cal.error_constant, Some(cal)))
}

/// Draws the data and computes the tolerance.
pub fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    config.validate()?;
    let seeds = config.seeds();
    let locations = config.problem.locations()?;
    let data = generate_synthetic(&config.problem, &config.problem.theta_true(), config.sigma, &locations, seeds.data)?;
    let precision = build_precision(&config.precision, &locations)?;
    let noise = NoiseModel::fixed(config.sigma)?;
    let bound = tolerance_for(&noise, &precision, config.bound.target_eabf, config.bound.k_rule)?;
    let tolerance = config.bound.tolerance.unwrap_or(bound.k0_admissible);
    if !(tolerance > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tolerance}")));
    }
    let model = StatModel::new(data.dataset.clone(), precision, noise, config.prior())?;
    let (error_constant, calibration) = match &config.problem {
        Problem::Burgers(s) => {
            let (c, cal) = burgers_constant(s)?;
            (Some(c), cal)
        }
        Problem::Logistic(_) => (None, None),
    };
    Ok(Prepared { config: config.clone(), seeds, data, model, bound, tolerance, error_constant, calibration })
}

impl Prepared {
    /// Forward map of the requested variant.
    pub fn forward(&self, variant: Variant) -> Result<Box<dyn ForwardEvaluator + Send>> {
        Ok(match &self.config.problem {
            Problem::Logistic(s) => {
                let times = self.data.dataset.locations.axis(0);
                let mode = match variant {
                    Variant::Fine => StepMode::Fixed { h: s.h_fine },
                    Variant::Adaptive => StepMode::Adaptive { h_init: s.h_init, max_halvings: s.max_halvings },
                };
                Box::new(LogisticForward::new(s.x0, times, mode)?)
            }
            Problem::Burgers(s) => {
                let mode = match variant {
                    Variant::Fine => GridMode::Fixed { cells: s.n_fine },
                    Variant::Adaptive => GridMode::Adaptive { n_start: s.n_start, n_max: s.n_max },
                };
                let c = self.error_constant.expect("set for burgers in prepare");
                Box::new(BurgersForward::new(s.u_left, s.epsilon, s.z1, s.times.clone(), mode, c)?)
            }
        })
    }

    pub fn sampler_config(&self, variant: Variant) -> SamplerConfig {
        let c = &self.config;
        let initial = c.initial();
        let transforms = self.model.prior.transforms();
        let scales = c
            .scales()
            .iter()
            .zip(&initial)
            .zip(&transforms)
            .map(|((s, x), tr)| unconstrained_scale(tr, *x, *s))
            .collect();
        SamplerConfig {
            iterations: c.chain.iterations,
            burn_in: c.burn_in(),
            seed: match variant {
                Variant::Fine => self.seeds.fine_chain,
                Variant::Adaptive => self.seeds.adaptive_chain,
            },
            initial,
            scales,
            adaptation_window: c.chain.adaptation_window,
            target_acceptance: c.chain.target_acceptance,
            adapt_until: None,
            decorrelate: c.chain.decorrelate,
        }
    }

    /// Runs one chain.
    pub fn run(&self, variant: Variant) -> Result<Trace> {
        let problem = PosteriorProblem::new(self.model.clone(), self.forward(variant)?)?;
        let mut target = PosteriorTarget::new(problem, self.tolerance);
        run_chain(&mut target, &self.sampler_config(variant))
    }

    pub fn names(&self) -> Vec<String> {
        self.model.prior.names()
    }
}

/// Summary of one chain for the JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub variant: Variant,
    pub seed: u64,
    pub samples: usize,
    pub burn_in: usize,
    pub acceptance_rate: f64,
    pub wall_time: f64,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
    pub map: Vec<f64>,
    /// `None` when the trace is too short to estimate.
    pub ess: Vec<Option<f64>>,
    pub solver_stats: SolverStats,
}

impl ChainSummary {
    pub fn new(variant: Variant, trace: &Trace) -> Result<Self> {
        let d = trace.dim();
        Ok(Self {
            variant,
            seed: trace.seed,
            samples: trace.len(),
            burn_in: trace.burn_in,
            acceptance_rate: trace.acceptance_rate,
            wall_time: trace.wall_time,
            mean: (0..d).map(|j| trace.mean(j)).collect(),
            sd: (0..d).map(|j| trace.sd(j)).collect(),
            map: if trace.is_empty() { vec![] } else { map_estimate(trace)? },
            ess: (0..d).map(|j| effective_sample_size(&trace.component(j)).ok().map(|e| e.value)).collect(),
            solver_stats: trace.solver_stats.clone(),
        })
    }
}

/// Everything an experiment reports, minus the raw traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub problem: String,
    pub parameters: Vec<String>,
    pub theta_true: Vec<f64>,
    pub sigma: f64,
    pub seeds: Seeds,
    pub bound: ToleranceReport,
    pub tolerance: f64,
    pub error_constant: Option<f64>,
    pub fine: Option<ChainSummary>,
    pub adaptive: Option<ChainSummary>,
    pub comparison: Option<ComparisonReport>,
    /// Share of adaptive solves that missed the tolerance.
    pub unmet_rate: f64,
    /// The unmet share exceeded the configured limit.
    pub bound_violated: bool,
}

/// Traces and report of a finished experiment.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub prepared: Prepared,
    pub fine: Option<Trace>,
    pub adaptive: Option<Trace>,
    pub report: ExperimentReport,
}

/// Runs the selected chains (both by default) one after another so their
/// wall times are comparable.
pub fn run_variants(config: &ExperimentConfig, fine: bool, adaptive: bool) -> Result<ExperimentOutcome> {
    let prepared = prepare(config)?;
    let fine_trace = if fine { Some(prepared.run(Variant::Fine)?) } else { None };
    let adaptive_trace = if adaptive { Some(prepared.run(Variant::Adaptive)?) } else { None };
    let names = prepared.names();
    let comparison = match (&fine_trace, &adaptive_trace) {
        (Some(a), Some(b)) if !a.is_empty() && !b.is_empty() => Some(compare_traces(a, b, &names, config.bins)?),
        _ => None,
    };
    let unmet_rate = adaptive_trace.as_ref().map_or(0.0, |t| t.solver_stats.unmet_rate());
    let report = ExperimentReport {
        problem: config.problem.name().into(),
        parameters: names,
        theta_true: config.problem.theta_true(),
        sigma: config.sigma,
        seeds: prepared.seeds,
        bound: prepared.bound,
        tolerance: prepared.tolerance,
        error_constant: prepared.error_constant,
        fine: fine_trace.as_ref().map(|t| ChainSummary::new(Variant::Fine, t)).transpose()?,
        adaptive: adaptive_trace.as_ref().map(|t| ChainSummary::new(Variant::Adaptive, t)).transpose()?,
        comparison,
        unmet_rate,
        bound_violated: unmet_rate > config.bound.max_unmet_rate,
    };
    Ok(ExperimentOutcome { prepared, fine: fine_trace, adaptive: adaptive_trace, report })
}

/// Fine and adaptive chains plus their comparison.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    run_variants(config, true, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smoke(mut c: ExperimentConfig) -> ExperimentConfig {
        c.chain.iterations = 200;
        c
    }

    #[test]
    fn tolerance_is_the_bound() {
        let p = prepare(&ExperimentConfig::logistic()).unwrap();
        assert_eq!(p.tolerance, p.bound.k0_admissible);
        assert!((p.tolerance - 0.144_613_169_690_25).abs() < 1e-12);
    }

    #[test]
    fn logistic_smoke() {
        let out = run_experiment(&smoke(ExperimentConfig::logistic())).unwrap();
        let (f, a) = (out.fine.unwrap(), out.adaptive.unwrap());
        assert_eq!(f.len(), 160);
        assert_eq!(a.len(), 160);
        assert!(out.report.comparison.is_some());
        assert!(!out.report.bound_violated);
    }

    #[test]
    fn burgers_smoke() {
        let mut c = smoke(ExperimentConfig::burgers());
        if let Problem::Burgers(s) = &mut c.problem {
            s.n_fine = 128;
            s.n_start = 64;
            s.n_max = 128;
            s.error_constant = Some(0.9);
        }
        c.bound.tolerance = Some(1e-3);
        let out = run_experiment(&c).unwrap();
        let r = out.report;
        assert_eq!(r.tolerance, 1e-3);
        // 0.9 (4/128)^2 = 8.8e-4 meets 1e-3 after one doubling
        let stats = r.adaptive.unwrap().solver_stats;
        assert_eq!(stats.refinements, stats.forward_solves);
        assert_eq!(stats.tolerance_unmet, 0);
    }

    #[test]
    fn noiseless_posterior_concentrates() {
        let mut c = ExperimentConfig::logistic();
        c.sigma = 1e-6;
        c.chain.iterations = 2000;
        c.chain.scales = Some(vec![1e-7, 1e-4]);
        if let Problem::Logistic(s) = &mut c.problem {
            s.h_fine = 0.001;
        }
        let p = prepare(&c).unwrap();
        let t = p.run(Variant::Fine).unwrap();
        let map = map_estimate(&t).unwrap();
        assert!((map[0] - 1.0).abs() < 1e-3 && (map[1] - 1000.0).abs() < 1.0, "{map:?}");
    }
}
