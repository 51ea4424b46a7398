use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::{map_estimate, Trace};

/// Fine-versus-adaptive comparison of one marginal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalComparison {
    pub name: String,
    /// Binned total-variation distance, in `[0, 1]`.
    pub tv: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    /// `|mean_a - mean_b|` over the pooled sd.
    pub mean_delta_sd: f64,
    /// `|map_a - map_b|` over the pooled sd.
    pub map_delta_sd: f64,
    pub pooled_sd: f64,
}

/// Per-marginal agreement between two traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub bins: usize,
    pub marginals: Vec<MarginalComparison>,
    /// Wall time of `b` over wall time of `a`.
    pub wall_time_ratio: f64,
}

impl ComparisonReport {
    pub fn max_tv(&self) -> f64 {
        self.marginals.iter().map(|m| m.tv).fold(0.0, f64::max)
    }

    pub fn max_mean_delta_sd(&self) -> f64 {
        self.marginals.iter().map(|m| m.mean_delta_sd).fold(0.0, f64::max)
    }
}

/// One histogram bin of a marginal, for external plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub component: String,
    pub lo: f64,
    pub hi: f64,
    pub p_a: f64,
    pub p_b: f64,
}

/// Bin probabilities of `a` and `b` on `bins` common bins spanning the
/// pooled range. Returns the bin edges and the two probability vectors.
pub fn common_histogram(a: &[f64], b: &[f64], bins: usize) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyTrace);
    }
    if bins == 0 {
        return Err(Error::InvalidArgument("bins must be positive".into()));
    }
    let (lo, hi) = a.iter().chain(b).fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| if i == bins { hi } else { lo + width * i as f64 }).collect();
    let fill = |xs: &[f64]| {
        let mut p = vec![0.0; bins];
        for &x in xs {
            let k = if width > 0.0 { (((x - lo) / width) as usize).min(bins - 1) } else { 0 };
            p[k] += 1.0;
        }
        let n = xs.len() as f64;
        p.iter_mut().for_each(|v| *v /= n);
        p
    };
    Ok((edges, fill(a), fill(b)))
}

/// `(1/2) sum |p_a - p_b|` over common bins.
pub fn binned_tv(a: &[f64], b: &[f64], bins: usize) -> Result<f64> {
    let (_, pa, pb) = common_histogram(a, b, bins)?;
    Ok((0.5 * pa.iter().zip(&pb).map(|(x, y)| (x - y).abs()).sum::<f64>()).min(1.0))
}

/// Compares every marginal of `a` and `b`.
pub fn compare_traces(a: &Trace, b: &Trace, names: &[String], bins: usize) -> Result<ComparisonReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyTrace);
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let map_a = map_estimate(a)?;
    let map_b = map_estimate(b)?;
    let mut marginals = Vec::with_capacity(a.dim());
    for j in 0..a.dim() {
        let (xa, xb) = (a.component(j), b.component(j));
        let pooled: Vec<f64> = xa.iter().chain(&xb).copied().collect();
        let m = pooled.iter().sum::<f64>() / pooled.len() as f64;
        let var = pooled.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (pooled.len().max(2) - 1) as f64;
        let sd = var.sqrt();
        let scaled = |d: f64| if sd > 0.0 { d.abs() / sd } else if d == 0.0 { 0.0 } else { f64::INFINITY };
        let (mean_a, mean_b) = (a.mean(j), b.mean(j));
        marginals.push(MarginalComparison {
            name: names.get(j).cloned().unwrap_or_else(|| format!("theta{j}")),
            tv: binned_tv(&xa, &xb, bins)?,
            mean_a,
            mean_b,
            mean_delta_sd: scaled(mean_a - mean_b),
            map_delta_sd: scaled(map_a[j] - map_b[j]),
            pooled_sd: sd,
        });
    }
    Ok(ComparisonReport { bins, marginals, wall_time_ratio: b.wall_time / a.wall_time })
}

/// Histogram tables of every marginal, in the layout written to CSV.
pub fn histogram_bins(a: &Trace, b: &Trace, names: &[String], bins: usize) -> Result<Vec<HistogramBin>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let mut rows = Vec::new();
    for j in 0..a.dim() {
        let (edges, pa, pb) = common_histogram(&a.component(j), &b.component(j), bins)?;
        let name = names.get(j).cloned().unwrap_or_else(|| format!("theta{j}"));
        for k in 0..bins {
            rows.push(HistogramBin { component: name.clone(), lo: edges[k], hi: edges[k + 1], p_a: pa[k], p_b: pb[k] });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    use super::*;

    fn trace(samples: Vec<Vec<f64>>) -> Trace {
        let n = samples.len();
        Trace {
            samples,
            log_posts: vec![0.0; n],
            acceptance_rate: 0.3,
            wall_time: 1.0,
            solver_stats: Default::default(),
            scale_history: vec![],
            burn_in: 0,
            seed: 0,
        }
    }

    #[test]
    fn identical_traces() {
        let t = trace((0..500).map(|i| vec![(i as f64).sin(), i as f64]).collect());
        let r = compare_traces(&t, &t, &[], 50).unwrap();
        assert!(r.marginals.iter().all(|m| m.tv == 0.0 && m.mean_delta_sd == 0.0));
    }

    #[test]
    fn disjoint_support() {
        let a = trace((0..100).map(|i| vec![i as f64 / 100.0]).collect());
        let b = trace((0..100).map(|i| vec![5.0 + i as f64 / 100.0]).collect());
        assert_eq!(compare_traces(&a, &b, &[], 50).unwrap().marginals[0].tv, 1.0);
    }

    #[test]
    fn same_normal_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut draw = |n: usize| -> Vec<Vec<f64>> {
            (0..n).map(|_| vec![StandardNormal.sample(&mut rng)]).collect()
        };
        let (a, b) = (trace(draw(10_000)), trace(draw(10_000)));
        let tv = compare_traces(&a, &b, &[], 50).unwrap().marginals[0].tv;
        assert!(tv <= 0.08, "{tv}");
    }

    #[test]
    fn dimension_mismatch() {
        let a = trace(vec![vec![1.0]]);
        let b = trace(vec![vec![1.0, 2.0]]);
        assert!(matches!(compare_traces(&a, &b, &[], 10), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn constant_marginals() {
        let a = trace(vec![vec![2.0]; 10]);
        assert_eq!(binned_tv(&a.component(0), &a.component(0), 50).unwrap(), 0.0);
    }
}
