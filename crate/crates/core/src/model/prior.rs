use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Marginal prior of one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case")]
pub enum Distribution {
    Uniform { lo: f64, hi: f64 },
    Gamma { shape: f64, rate: f64 },
    Normal { mean: f64, sd: f64 },
}

impl Distribution {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Distribution::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            Distribution::Gamma { shape, rate } => shape > 0.0 && rate > 0.0,
            Distribution::Normal { mean, sd } => mean.is_finite() && sd > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid prior {self:?}")))
        }
    }

    /// Log density; `-inf` outside the support.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        match *self {
            Distribution::Uniform { lo, hi } => {
                if (lo..=hi).contains(&x) {
                    -(hi - lo).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            Distribution::Gamma { shape, rate } => {
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * x.ln() - rate * x
            }
            Distribution::Normal { mean, sd } => {
                let z = (x - mean) / sd;
                -0.5 * z * z - sd.ln() - LN_SQRT_2PI
            }
        }
    }

    /// Closed support `[lo, hi]`, possibly unbounded.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Distribution::Uniform { lo, hi } => (lo, hi),
            Distribution::Gamma { .. } => (0.0, f64::INFINITY),
            Distribution::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Bijection from the real line onto the interior of the support.
    pub fn transform(&self) -> Transform {
        match *self {
            Distribution::Uniform { lo, hi } => Transform::Logit { lo, hi },
            Distribution::Gamma { .. } => Transform::Log,
            Distribution::Normal { .. } => Transform::Identity,
        }
    }
}

/// Map from an unconstrained coordinate `y` to a parameter `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transform {
    Identity,
    /// `theta = exp(y)`
    Log,
    /// `theta = lo + (hi - lo) / (1 + exp(-y))`
    Logit { lo: f64, hi: f64 },
}

impl Transform {
    pub fn to_constrained(&self, y: f64) -> f64 {
        match *self {
            Transform::Identity => y,
            Transform::Log => y.exp(),
            Transform::Logit { lo, hi } => {
                let s = if y >= 0.0 {
                    1.0 / (1.0 + (-y).exp())
                } else {
                    let e = y.exp();
                    e / (1.0 + e)
                };
                lo + (hi - lo) * s
            }
        }
    }

    pub fn to_unconstrained(&self, theta: f64) -> f64 {
        match *self {
            Transform::Identity => theta,
            Transform::Log => theta.ln(),
            Transform::Logit { lo, hi } => {
                let p = (theta - lo) / (hi - lo);
                (p / (1.0 - p)).ln()
            }
        }
    }

    /// `ln |d theta / d y|` at `y`.
    pub fn ln_jacobian(&self, y: f64) -> f64 {
        match *self {
            Transform::Identity => 0.0,
            Transform::Log => y,
            Transform::Logit { lo, hi } => {
                // ln((hi-lo) s (1-s)) with s = sigmoid(y)
                (hi - lo).ln() - softplus(-y) - softplus(y)
            }
        }
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// One named parameter and its prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamPrior {
    pub name: String,
    #[serde(flatten)]
    pub dist: Distribution,
}

/// Independent priors on the components of `theta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriorSpec {
    params: Vec<ParamPrior>,
}

impl PriorSpec {
    pub fn new(params: Vec<ParamPrior>) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::InvalidArgument("prior needs at least one parameter".into()));
        }
        for p in &params {
            p.dist.validate()?;
        }
        Ok(Self { params })
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[ParamPrior] {
        &self.params
    }

    pub fn names(&self) -> Vec<String> {
        self.params.iter().map(|p| p.name.clone()).collect()
    }

    /// Sum of marginal log densities; `-inf` if any component is outside its
    /// support.
    pub fn ln_density(&self, theta: &[f64]) -> f64 {
        if theta.len() != self.params.len() {
            return f64::NEG_INFINITY;
        }
        self.params.iter().zip(theta).map(|(p, &x)| p.dist.ln_pdf(x)).sum()
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.params.len()
            && self.params.iter().zip(theta).all(|(p, &x)| {
                let (lo, hi) = p.dist.support();
                x.is_finite() && x >= lo && x <= hi
            })
    }

    pub fn transforms(&self) -> Vec<Transform> {
        self.params.iter().map(|p| p.dist.transform()).collect()
    }
}
