use super::{log_likelihood, Dataset, NoiseModel, Precision, PriorSpec};
use crate::error::{Error, Result};
use crate::ode::SolverResult;

/// A numerical forward map `theta -> f(F^alpha_theta(x_i))`, i = 1..n.
///
/// Implementations must be deterministic: the same `(theta, tolerance)` pair
/// always yields the same result. They may keep scratch buffers, hence
/// `&mut self`; each chain owns its own evaluator.
pub trait ForwardEvaluator {
    /// Solves at `theta`, refining until the estimated maximum absolute error
    /// is at most `tolerance` or the refinement budget runs out (flagged in
    /// the result).
    fn evaluate(&mut self, theta: &[f64], tolerance: f64) -> Result<SolverResult>;

    /// Convergence order `p` of the global error in the discretization.
    fn order(&self) -> u32;

    /// Short human-readable description of the discretization.
    fn describe(&self) -> String;
}

impl<F: ForwardEvaluator + ?Sized> ForwardEvaluator for Box<F> {
    fn evaluate(&mut self, theta: &[f64], tolerance: f64) -> Result<SolverResult> {
        (**self).evaluate(theta, tolerance)
    }
    fn order(&self) -> u32 {
        (**self).order()
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// The statistical part of an inverse problem: data, noise, precision and
/// prior. Immutable once built.
#[derive(Debug, Clone)]
pub struct StatModel {
    pub data: Dataset,
    pub precision: Precision,
    pub noise: NoiseModel,
    pub prior: PriorSpec,
}

impl StatModel {
    pub fn new(data: Dataset, precision: Precision, noise: NoiseModel, prior: PriorSpec) -> Result<Self> {
        if precision.n() != data.len() {
            return Err(Error::DimensionMismatch { expected: data.len(), got: precision.n() });
        }
        noise.validate()?;
        Ok(Self { data, precision, noise, prior })
    }
}

/// One evaluation of the unnormalized log-posterior.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorValue {
    /// `ln L + ln prior`, or `-inf` outside the prior support.
    pub log_posterior: f64,
    pub log_likelihood: f64,
    pub log_prior: f64,
    /// `None` when the prior ruled `theta` out before any solve.
    pub solve: Option<SolverResult>,
}

impl PosteriorValue {
    fn rejected() -> Self {
        Self {
            log_posterior: f64::NEG_INFINITY,
            log_likelihood: f64::NEG_INFINITY,
            log_prior: f64::NEG_INFINITY,
            solve: None,
        }
    }
}

/// Unnormalized numerical posterior: a [`StatModel`] plus the forward map
/// that feeds its likelihood.
#[derive(Debug, Clone)]
pub struct PosteriorProblem<F> {
    model: StatModel,
    forward: F,
}

impl<F: ForwardEvaluator> PosteriorProblem<F> {
    pub fn new(model: StatModel, forward: F) -> Result<Self> {
        if model.noise.sigma().is_none() {
            return Err(Error::InvalidArgument(
                "log-posterior evaluation requires a fixed sigma".into(),
            ));
        }
        Ok(Self { model, forward })
    }

    pub fn model(&self) -> &StatModel {
        &self.model
    }

    pub fn forward(&self) -> &F {
        &self.forward
    }

    pub fn forward_mut(&mut self) -> &mut F {
        &mut self.forward
    }

    pub fn dim(&self) -> usize {
        self.model.prior.dim()
    }

    /// `ln P(y | theta) + ln P(theta)` through the numerical forward map.
    ///
    /// Outside the prior support the value is `-inf` and no solve happens. A
    /// solve that misses `tolerance` still produces a value; the flag travels
    /// in [`PosteriorValue::solve`].
    pub fn log_posterior(&mut self, theta: &[f64], tolerance: f64) -> Result<PosteriorValue> {
        if theta.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: theta.len() });
        }
        if !self.model.prior.contains(theta) {
            return Ok(PosteriorValue::rejected());
        }
        let log_prior = self.model.prior.ln_density(theta);
        if log_prior == f64::NEG_INFINITY {
            return Ok(PosteriorValue::rejected());
        }
        let solve = self.forward.evaluate(theta, tolerance)?;
        let sigma = self.model.noise.sigma().expect("checked in new");
        let ll = log_likelihood(&self.model.data.y, &solve.values, sigma, &self.model.precision)?;
        Ok(PosteriorValue {
            log_posterior: ll + log_prior,
            log_likelihood: ll,
            log_prior,
            solve: Some(solve),
        })
    }
}
