use serde::{Deserialize, Serialize};

use super::Trace;
use crate::error::{Error, Result};

/// Minimum number of draws [`effective_sample_size`] accepts.
pub const MIN_ESS_SAMPLES: usize = 100;

/// Effective sample size of one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ess {
    pub value: f64,
    /// The draws have zero variance; `value` is then 1.
    pub degenerate: bool,
}

/// Geyer's initial monotone positive sequence estimator of `N / tau`.
/// Capped at `N`.
pub fn effective_sample_size(draws: &[f64]) -> Result<Ess> {
    let n = draws.len();
    if n < MIN_ESS_SAMPLES {
        return Err(Error::ShortTrace { needed: MIN_ESS_SAMPLES, got: n });
    }
    let mean = draws.iter().sum::<f64>() / n as f64;
    let centred: Vec<f64> = draws.iter().map(|x| x - mean).collect();
    let autocov = |lag: usize| -> f64 {
        centred[..n - lag].iter().zip(&centred[lag..]).map(|(a, b)| a * b).sum::<f64>() / n as f64
    };
    let c0 = autocov(0);
    if draws.iter().all(|x| *x == draws[0]) || !(c0 > 0.0) {
        return Ok(Ess { value: 1.0, degenerate: true });
    }
    // tau = -1 + 2 sum_m Gamma_m, Gamma_m = rho_{2m} + rho_{2m+1}, summed
    // while positive and forced non-increasing
    let mut tau = -1.0;
    let mut prev = f64::INFINITY;
    let mut m = 0;
    while 2 * m + 1 < n {
        let gamma = (autocov(2 * m) + autocov(2 * m + 1)) / c0;
        if gamma <= 0.0 {
            break;
        }
        let gamma = gamma.min(prev);
        tau += 2.0 * gamma;
        prev = gamma;
        m += 1;
    }
    let value = (n as f64 / tau.max(f64::MIN_POSITIVE)).min(n as f64);
    Ok(Ess { value, degenerate: false })
}

/// The sample with the highest recorded log-posterior; the first one on
/// ties.
pub fn map_estimate(trace: &Trace) -> Result<Vec<f64>> {
    let mut best: Option<usize> = None;
    for (i, lp) in trace.log_posts.iter().enumerate() {
        if best.filter(|&b| trace.log_posts[b] >= *lp).is_none() {
            best = Some(i);
        }
    }
    best.map(|i| trace.samples[i].clone()).ok_or(Error::EmptyTrace)
}
