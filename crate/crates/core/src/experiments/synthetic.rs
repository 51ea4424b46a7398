use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::config::Problem;
use crate::burgers::BurgersParams;
use crate::error::{Error, Result};
use crate::model::{Dataset, Locations};
use crate::oracles::{burgers_exact, logistic_exact, LogisticParams};

/// A simulated data set and how it was made.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticData {
    pub problem: String,
    pub theta_true: Vec<f64>,
    pub sigma: f64,
    pub seed: u64,
    /// Noise-free values at the locations.
    pub exact: Vec<f64>,
    pub dataset: Dataset,
}

/// Exact forward map of `problem` at `theta` over `locations`.
pub fn exact_values(problem: &Problem, theta: &[f64], locations: &Locations) -> Result<Vec<f64>> {
    if theta.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: theta.len() });
    }
    match problem {
        Problem::Logistic(s) => {
            let p = LogisticParams::new(theta[0], theta[1], s.x0);
            Ok(locations.points().iter().map(|x| logistic_exact(x[0], &p)).collect())
        }
        Problem::Burgers(s) => {
            if locations.dim() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, got: locations.dim() });
            }
            let p = BurgersParams::new(s.u_left, s.u_left - theta[0], theta[1], s.epsilon);
            Ok(locations.points().iter().map(|x| burgers_exact(x[0], x[1], &p)).collect())
        }
    }
}

/// `y_i = exact(x_i; theta_true) + sigma xi_i` with `xi_i` standard normal
/// draws from ChaCha8 seeded by `seed`.
pub fn generate_synthetic(
    problem: &Problem,
    theta_true: &[f64],
    sigma: f64,
    locations: &Locations,
    seed: u64,
) -> Result<SyntheticData> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("sigma must be finite and >= 0, got {sigma}")));
    }
    let exact = exact_values(problem, theta_true, locations)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y = exact
        .iter()
        .map(|f| {
            let xi: f64 = StandardNormal.sample(&mut rng);
            f + sigma * xi
        })
        .collect();
    Ok(SyntheticData {
        problem: problem.name().into(),
        theta_true: theta_true.to_vec(),
        sigma,
        seed,
        exact,
        dataset: Dataset::new(locations.clone(), y)?,
    })
}

#[cfg(test)]
mod tests {
    use super::super::config::{BurgersSetup, LogisticSetup};
    use super::*;

    #[test]
    fn noiseless_data_is_exact() {
        let p = Problem::Logistic(LogisticSetup::default());
        let l = p.locations().unwrap();
        let d = generate_synthetic(&p, &[1.0, 1000.0], 0.0, &l, 3).unwrap();
        assert_eq!(d.dataset.y, d.exact);
    }

    #[test]
    fn logistic_residuals_are_centred() {
        let p = Problem::Logistic(LogisticSetup::default());
        let l = p.locations().unwrap();
        let d = generate_synthetic(&p, &[1.0, 1000.0], 30.0, &l, 11).unwrap();
        let mean = d.dataset.y.iter().zip(&d.exact).map(|(y, f)| (y - f) / 30.0).sum::<f64>() / 26.0;
        assert!(mean.abs() < 3.0 / 26f64.sqrt(), "{mean}");
    }

    #[test]
    fn burgers_data_within_band() {
        let p = Problem::Burgers(BurgersSetup::default());
        let l = p.locations().unwrap();
        let sigma = 0.0115;
        let d = generate_synthetic(&p, &[1.0, 1.0], sigma, &l, 5).unwrap();
        assert_eq!(d.dataset.len(), 6);
        assert!(d.dataset.y.iter().all(|y| (1.0 - 5.0 * sigma..=2.0 + 5.0 * sigma).contains(y)));
    }

    #[test]
    fn seeded() {
        let p = Problem::Logistic(LogisticSetup::default());
        let l = p.locations().unwrap();
        let a = generate_synthetic(&p, &[1.0, 1000.0], 30.0, &l, 9).unwrap();
        let b = generate_synthetic(&p, &[1.0, 1000.0], 30.0, &l, 9).unwrap();
        assert_eq!(a, b);
    }
}
