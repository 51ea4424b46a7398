use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::oracles::erfc;

/// Prior density `g(sigma)` on the noise scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case")]
pub enum SigmaDensity {
    Gamma { shape: f64, rate: f64 },
    InverseGamma { shape: f64, scale: f64 },
    /// Normal truncated to `(0, inf)`.
    Normal { mean: f64, sd: f64 },
    LogNormal { mu: f64, sigma: f64 },
    /// Piecewise-linear density through `(sigma[i], density[i])`, zero
    /// outside the table. Renormalized on use.
    Tabulated { sigma: Vec<f64>, density: Vec<f64> },
}

impl SigmaDensity {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            SigmaDensity::Gamma { shape, rate } => *shape > 0.0 && *rate > 0.0,
            SigmaDensity::InverseGamma { shape, scale } => *shape > 0.0 && *scale > 0.0,
            SigmaDensity::Normal { mean, sd } => mean.is_finite() && *sd > 0.0,
            SigmaDensity::LogNormal { mu, sigma } => mu.is_finite() && *sigma > 0.0,
            SigmaDensity::Tabulated { sigma, density } => {
                sigma.len() >= 2
                    && sigma.len() == density.len()
                    && sigma[0] >= 0.0
                    && sigma.windows(2).all(|w| w[0] < w[1])
                    && density.iter().all(|d| d.is_finite() && *d >= 0.0)
                    && density.iter().any(|d| *d > 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid sigma prior {self:?}")))
        }
    }

    /// Density at `s > 0`, up to the normalizing constant returned by
    /// [`SigmaDensity::normalizer`].
    pub(crate) fn unnormalized(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            SigmaDensity::Gamma { shape, rate } => {
                (shape * rate.ln() - ln_gamma(*shape) + (shape - 1.0) * s.ln() - rate * s).exp()
            }
            SigmaDensity::InverseGamma { shape, scale } => {
                (shape * scale.ln() - ln_gamma(*shape) - (shape + 1.0) * s.ln() - scale / s).exp()
            }
            SigmaDensity::Normal { mean, sd } => {
                let z = (s - mean) / sd;
                (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
            }
            SigmaDensity::LogNormal { mu, sigma } => {
                let z = (s.ln() - mu) / sigma;
                (-0.5 * z * z).exp() / (s * sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            SigmaDensity::Tabulated { sigma, density } => {
                if s < sigma[0] || s > sigma[sigma.len() - 1] {
                    return 0.0;
                }
                let k = sigma.partition_point(|&x| x <= s).clamp(1, sigma.len() - 1);
                let w = (s - sigma[k - 1]) / (sigma[k] - sigma[k - 1]);
                density[k - 1] * (1.0 - w) + density[k] * w
            }
        }
    }

    /// Total mass of [`SigmaDensity::unnormalized`] on `(0, inf)`.
    pub(crate) fn normalizer(&self) -> f64 {
        match self {
            SigmaDensity::Normal { mean, sd } => 0.5 * erfc(-mean / (sd * std::f64::consts::SQRT_2)),
            SigmaDensity::Tabulated { sigma, density } => sigma
                .windows(2)
                .zip(density.windows(2))
                .map(|(s, d)| 0.5 * (d[0] + d[1]) * (s[1] - s[0]))
                .sum(),
            _ => 1.0,
        }
    }

    /// Points (in sigma) around which the density has its mass; used as
    /// quadrature breakpoints so narrow peaks are never stepped over.
    pub(crate) fn landmarks(&self) -> Vec<f64> {
        let spread = |c: f64, s: f64| -> Vec<f64> {
            [-40.0, -10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0, 40.0]
                .iter()
                .map(|k| c + k * s)
                .filter(|v| *v > 0.0)
                .collect()
        };
        match self {
            SigmaDensity::Gamma { shape, rate } => spread(shape / rate, shape.sqrt() / rate),
            SigmaDensity::InverseGamma { shape, scale } => {
                let mode = scale / (shape + 1.0);
                let mut v = spread(mode, mode);
                v.push(mode * 1e3);
                v.push(mode * 1e6);
                v
            }
            SigmaDensity::Normal { mean, sd } => spread(*mean, *sd),
            SigmaDensity::LogNormal { mu, sigma } => [-40.0, -10.0, -3.0, 0.0, 3.0, 10.0, 40.0]
                .iter()
                .map(|k| (mu + k * sigma).exp())
                .collect(),
            SigmaDensity::Tabulated { sigma, .. } => sigma.iter().copied().filter(|v| *v > 0.0).collect(),
        }
    }

    /// Upper end of the region holding all but a negligible tail of the mass.
    pub(crate) fn upper_extent(&self) -> f64 {
        match self {
            SigmaDensity::Gamma { shape, rate } => (shape + 60.0 * shape.sqrt() + 200.0) / rate,
            // mass beyond S decays like S^-shape
            SigmaDensity::InverseGamma { shape, scale } => (scale * 10f64.powf(16.0 / shape)).min(1e300),
            SigmaDensity::Normal { mean, sd } => mean.max(0.0) + 60.0 * sd,
            SigmaDensity::LogNormal { mu, sigma } => (mu + 60.0 * sigma).exp(),
            SigmaDensity::Tabulated { sigma, .. } => sigma[sigma.len() - 1],
        }
    }
}

/// Observation noise: either a known `sigma` or a prior on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    Fixed { sigma: f64 },
    Prior { density: SigmaDensity },
}

impl NoiseModel {
    pub fn fixed(sigma: f64) -> Result<Self> {
        if sigma.is_finite() && sigma > 0.0 {
            Ok(NoiseModel::Fixed { sigma })
        } else {
            Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")))
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseModel::Fixed { sigma } => Self::fixed(*sigma).map(|_| ()),
            NoiseModel::Prior { density } => density.validate(),
        }
    }

    /// The known noise scale, if fixed.
    pub fn sigma(&self) -> Option<f64> {
        match self {
            NoiseModel::Fixed { sigma } => Some(*sigma),
            NoiseModel::Prior { .. } => None,
        }
    }
}
