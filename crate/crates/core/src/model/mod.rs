//! Statistical model: correlated Gaussian likelihood, priors and the
//! unnormalized log-posterior evaluated through a numerical forward map.

mod data;
mod likelihood;
mod noise;
mod posterior;
mod precision;
mod prior;

pub use data::{Dataset, Locations};
pub use likelihood::log_likelihood;
pub use noise::{NoiseModel, SigmaDensity};
pub use posterior::{ForwardEvaluator, PosteriorProblem, PosteriorValue, StatModel};
pub use precision::{build_precision, Correlation, Metric, Precision, PrecisionSpec};
pub use prior::{Distribution, ParamPrior, PriorSpec, Transform};
