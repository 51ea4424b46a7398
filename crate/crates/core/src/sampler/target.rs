use crate::error::Result;
use crate::model::{ForwardEvaluator, PosteriorProblem, Transform};

/// What a solve reported alongside a density value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveInfo {
    pub refinements: u32,
    pub tolerance_met: bool,
}

/// One log-density evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub log_density: f64,
    /// `None` when no forward solve was needed.
    pub solve: Option<SolveInfo>,
}

impl From<f64> for Evaluation {
    fn from(log_density: f64) -> Self {
        Self { log_density, solve: None }
    }
}

/// An unnormalized log-density the sampler can explore.
pub trait Target {
    fn dim(&self) -> usize;

    /// `-inf` marks points of zero density. An `Err` is counted as a failed
    /// solve and also treated as zero density.
    fn log_density(&mut self, theta: &[f64]) -> Result<Evaluation>;

    /// Maps from unconstrained coordinates used by the proposals.
    fn transforms(&self) -> Vec<Transform> {
        vec![Transform::Identity; self.dim()]
    }
}

/// A closure as a target; handy for analytic densities.
pub struct FnTarget<F> {
    dim: usize,
    f: F,
    transforms: Option<Vec<Transform>>,
}

impl<F: FnMut(&[f64]) -> f64> FnTarget<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f, transforms: None }
    }

    pub fn with_transforms(mut self, transforms: Vec<Transform>) -> Self {
        assert_eq!(transforms.len(), self.dim, "one transform per coordinate");
        self.transforms = Some(transforms);
        self
    }
}

impl<F: FnMut(&[f64]) -> f64> Target for FnTarget<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn log_density(&mut self, theta: &[f64]) -> Result<Evaluation> {
        Ok((self.f)(theta).into())
    }

    fn transforms(&self) -> Vec<Transform> {
        self.transforms.clone().unwrap_or_else(|| vec![Transform::Identity; self.dim])
    }
}

/// A numerical posterior evaluated at a fixed solver tolerance. Proposals
/// move in the coordinates given by the prior's transforms.
pub struct PosteriorTarget<F> {
    pub problem: PosteriorProblem<F>,
    pub tolerance: f64,
}

impl<F: ForwardEvaluator> PosteriorTarget<F> {
    pub fn new(problem: PosteriorProblem<F>, tolerance: f64) -> Self {
        Self { problem, tolerance }
    }
}

impl<F: ForwardEvaluator> Target for PosteriorTarget<F> {
    fn dim(&self) -> usize {
        self.problem.dim()
    }

    fn log_density(&mut self, theta: &[f64]) -> Result<Evaluation> {
        let v = self.problem.log_posterior(theta, self.tolerance)?;
        Ok(Evaluation {
            log_density: v.log_posterior,
            solve: v.solve.map(|s| SolveInfo { refinements: s.n_halvings, tolerance_met: s.tolerance_met }),
        })
    }

    fn transforms(&self) -> Vec<Transform> {
        self.problem.model().prior.transforms()
    }
}
