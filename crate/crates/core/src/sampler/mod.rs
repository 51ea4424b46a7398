//! Adaptive component-wise random-walk Metropolis, plus trace diagnostics.
//!
//! Proposals are Gaussian steps in an unconstrained coordinate system
//! (log/logit of bounded parameters), with the Jacobian of the map included
//! in the acceptance ratio. Proposal scales adapt during burn-in by
//! stochastic approximation toward a target acceptance rate and are frozen
//! afterwards. Halfway through adaptation the chain may also switch from
//! coordinate axes to the Cholesky axes of the covariance seen so far, which
//! turns a correlated posterior into nearly independent one-dimensional
//! updates; this basis is frozen along with the scales.
//!
//! Random numbers come from ChaCha8 seeded with `seed_from_u64`; normal
//! variates use the ziggurat sampler of `rand_distr::StandardNormal`. Both are
//! platform independent, so a seed fixes the trace bit for bit.

mod diagnostics;
mod target;

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use diagnostics::{effective_sample_size, map_estimate, Ess};
pub use target::{Evaluation, FnTarget, PosteriorTarget, SolveInfo, Target};

use crate::error::{Error, Result};
use crate::model::Transform;

/// Settings of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Total iterations, burn-in included. One iteration updates every
    /// component once.
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Starting point in parameter space.
    pub initial: Vec<f64>,
    /// Starting proposal standard deviations in unconstrained space.
    pub scales: Vec<f64>,
    /// Iterations per adaptation batch.
    #[serde(default = "default_window")]
    pub adaptation_window: usize,
    #[serde(default = "default_acceptance")]
    pub target_acceptance: f64,
    /// Last iteration (exclusive) at which scales may change; defaults to
    /// the burn-in length and may not exceed it.
    #[serde(default)]
    pub adapt_until: Option<usize>,
    /// Update along the Cholesky axes of the early burn-in covariance
    /// instead of the coordinate axes.
    #[serde(default = "default_decorrelate")]
    pub decorrelate: bool,
}

fn default_decorrelate() -> bool {
    true
}

/// Proposal scale along a whitened axis after the basis switch.
const WHITENED_SCALE: f64 = 2.4;
/// Fewest iterations the covariance estimate for the basis switch may use.
const MIN_COVARIANCE_SAMPLES: usize = 50;

fn default_window() -> usize {
    50
}

fn default_acceptance() -> f64 {
    0.234
}

/// Fraction of the iterations discarded as burn-in when none is given.
pub const DEFAULT_BURN_IN_FRACTION: f64 = 0.2;

impl SamplerConfig {
    /// `iterations` with 20% burn-in and default adaptation settings.
    pub fn new(iterations: usize, seed: u64, initial: Vec<f64>, scales: Vec<f64>) -> Self {
        Self {
            iterations,
            burn_in: (iterations as f64 * DEFAULT_BURN_IN_FRACTION).round() as usize,
            seed,
            initial,
            scales,
            adaptation_window: default_window(),
            target_acceptance: default_acceptance(),
            adapt_until: None,
            decorrelate: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.burn_in > self.iterations {
            return Err(Error::Config(format!(
                "burn-in {} exceeds iterations {}",
                self.burn_in, self.iterations
            )));
        }
        if self.initial.len() != self.scales.len() {
            return Err(Error::DimensionMismatch { expected: self.initial.len(), got: self.scales.len() });
        }
        if self.scales.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::Config("proposal scales must be positive and finite".into()));
        }
        if self.adaptation_window == 0 {
            return Err(Error::Config("adaptation window must be positive".into()));
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return Err(Error::Config("target acceptance must lie in (0, 1)".into()));
        }
        if self.adapt_until.is_some_and(|a| a > self.burn_in) {
            return Err(Error::Config("adaptation must stop by the end of burn-in".into()));
        }
        Ok(())
    }

    fn adapt_until(&self) -> usize {
        self.adapt_until.unwrap_or(self.burn_in)
    }
}

/// Forward-solver counters accumulated over a chain.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub forward_solves: u64,
    /// Halvings or grid doublings summed over all solves.
    pub refinements: u64,
    pub tolerance_unmet: u64,
    /// Solves that failed outright; treated as zero posterior density.
    pub failures: u64,
}

impl SolverStats {
    fn record(&mut self, solve: &Option<SolveInfo>) {
        if let Some(s) = solve {
            self.forward_solves += 1;
            self.refinements += u64::from(s.refinements);
            if !s.tolerance_met {
                self.tolerance_unmet += 1;
            }
        }
    }

    /// Fraction of solves that missed their tolerance.
    pub fn unmet_rate(&self) -> f64 {
        if self.forward_solves == 0 {
            0.0
        } else {
            self.tolerance_unmet as f64 / self.forward_solves as f64
        }
    }
}

/// Post-burn-in samples of one chain and its bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    /// One row per kept iteration, in parameter space.
    pub samples: Vec<Vec<f64>>,
    pub log_posts: Vec<f64>,
    /// Accepted fraction of all component updates after burn-in (over the
    /// whole run if there is no post-burn-in iteration).
    pub acceptance_rate: f64,
    /// Seconds spent in [`run_chain`].
    pub wall_time: f64,
    pub solver_stats: SolverStats,
    /// Proposal scales in force at each iteration, burn-in included.
    pub scale_history: Vec<Vec<f64>>,
    pub burn_in: usize,
    pub seed: u64,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    /// Samples of one coordinate.
    pub fn component(&self, j: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s[j]).collect()
    }

    pub fn mean(&self, j: usize) -> f64 {
        let n = self.len() as f64;
        self.samples.iter().map(|s| s[j]).sum::<f64>() / n
    }

    pub fn sd(&self, j: usize) -> f64 {
        let m = self.mean(j);
        let n = self.len() as f64;
        (self.samples.iter().map(|s| (s[j] - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    }
}

/// Runs one chain from `config.initial`.
pub fn run_chain<T: Target + ?Sized>(target: &mut T, config: &SamplerConfig) -> Result<Trace> {
    config.validate()?;
    let d = target.dim();
    if config.initial.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: config.initial.len() });
    }
    let transforms = target.transforms();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut stats = SolverStats::default();

    let mut theta = config.initial.clone();
    let first = target.log_density(&theta)?;
    stats.record(&first.solve);
    if !first.log_density.is_finite() {
        return Err(Error::InfeasibleStart);
    }
    let mut y: Vec<f64> = theta.iter().zip(&transforms).map(|(t, tr)| tr.to_unconstrained(*t)).collect();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InfeasibleStart);
    }
    let ln_jac = |y: &[f64]| -> f64 { y.iter().zip(&transforms).map(|(v, tr)| tr.ln_jacobian(*v)).sum() };
    let mut log_post = first.log_density;
    let mut current = log_post + ln_jac(&y);

    let mut ln_scales: Vec<f64> = config.scales.iter().map(|s| s.ln()).collect();
    let adapt_until = config.adapt_until();
    let mut batch_accepts = vec![0usize; d];
    let mut batch = 0usize;

    let kept = config.iterations - config.burn_in;
    let mut samples = Vec::with_capacity(kept);
    let mut log_posts = Vec::with_capacity(kept);
    let mut scale_history = Vec::with_capacity(config.iterations);
    let (mut accepted, mut proposed) = (0u64, 0u64);
    let (mut accepted_all, mut proposed_all) = (0u64, 0u64);

    // iterations [switch / 2, switch) feed the covariance for the basis
    let switch = if config.decorrelate && d > 1 && adapt_until / 4 >= MIN_COVARIANCE_SAMPLES {
        Some(adapt_until / 2)
    } else {
        None
    };
    let mut early: Vec<Vec<f64>> = Vec::new();
    // columns of the Cholesky factor once switched
    let mut basis: Option<Vec<Vec<f64>>> = None;

    let mut proposal = y.clone();
    let mut theta_prop = theta.clone();
    for it in 0..config.iterations {
        scale_history.push(ln_scales.iter().map(|s| s.exp()).collect::<Vec<_>>());
        for j in 0..d {
            let z: f64 = rng.sample(StandardNormal);
            let step = ln_scales[j].exp() * z;
            proposal.copy_from_slice(&y);
            theta_prop.copy_from_slice(&theta);
            match &basis {
                None => {
                    proposal[j] += step;
                    theta_prop[j] = transforms[j].to_constrained(proposal[j]);
                }
                Some(cols) => {
                    for k in 0..d {
                        proposal[k] += step * cols[j][k];
                        theta_prop[k] = transforms[k].to_constrained(proposal[k]);
                    }
                }
            }
            let eval = match target.log_density(&theta_prop) {
                Ok(e) => {
                    stats.record(&e.solve);
                    e.log_density
                }
                Err(_) => {
                    stats.failures += 1;
                    f64::NEG_INFINITY
                }
            };
            let u: f64 = rng.random();
            let mut accept = false;
            if eval.is_finite() {
                let cand = eval + ln_jac(&proposal);
                if u.ln() < cand - current {
                    accept = true;
                    y.copy_from_slice(&proposal);
                    theta.copy_from_slice(&theta_prop);
                    log_post = eval;
                    current = cand;
                }
            }
            proposed_all += 1;
            if accept {
                accepted_all += 1;
                batch_accepts[j] += 1;
            }
            if it >= config.burn_in {
                proposed += 1;
                if accept {
                    accepted += 1;
                }
            }
        }
        if it < adapt_until && (it + 1) % config.adaptation_window == 0 {
            batch += 1;
            let gain = 1.0 / (batch as f64).sqrt();
            for j in 0..d {
                let rate = batch_accepts[j] as f64 / config.adaptation_window as f64;
                ln_scales[j] += 2.0 * gain * (rate - config.target_acceptance);
                batch_accepts[j] = 0;
            }
        }
        if let Some(sw) = switch {
            if it >= sw / 2 && it < sw {
                early.push(y.clone());
            }
            if it + 1 == sw {
                if let Some(cols) = cholesky_axes(&early) {
                    basis = Some(cols);
                    ln_scales.iter_mut().for_each(|s| *s = WHITENED_SCALE.ln());
                    batch = 0;
                    batch_accepts.iter_mut().for_each(|a| *a = 0);
                }
                early = Vec::new();
            }
        }
        if it >= config.burn_in {
            samples.push(theta.clone());
            log_posts.push(log_post);
        }
    }
    let acceptance_rate = if proposed > 0 {
        accepted as f64 / proposed as f64
    } else if proposed_all > 0 {
        accepted_all as f64 / proposed_all as f64
    } else {
        0.0
    };
    Ok(Trace {
        samples,
        log_posts,
        acceptance_rate,
        wall_time: start.elapsed().as_secs_f64(),
        solver_stats: stats,
        scale_history,
        burn_in: config.burn_in,
        seed: config.seed,
    })
}

/// Columns of the Cholesky factor of the sample covariance, or `None` if it
/// is not positive definite.
fn cholesky_axes(points: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = points.len();
    let d = points.first()?.len();
    let mean: Vec<f64> = (0..d).map(|k| points.iter().map(|p| p[k]).sum::<f64>() / n as f64).collect();
    let cov = DMatrix::from_fn(d, d, |a, b| {
        points.iter().map(|p| (p[a] - mean[a]) * (p[b] - mean[b])).sum::<f64>() / (n - 1) as f64
    });
    let l = cov.cholesky()?.l();
    let cols: Vec<Vec<f64>> = (0..d).map(|j| l.column(j).iter().copied().collect()).collect();
    if cols.iter().flatten().all(|v| v.is_finite()) && (0..d).all(|j| cols[j][j] > 0.0) {
        Some(cols)
    } else {
        None
    }
}

/// Unconstrained-space proposal scale equivalent to a step of `scale` in
/// parameter space at `theta`.
pub fn unconstrained_scale(transform: &Transform, theta: f64, scale: f64) -> f64 {
    let y = transform.to_unconstrained(theta);
    scale / transform.ln_jacobian(y).exp()
}
