//! Admissible forward-map error from the expected absolute Bayes factor.
//!
//! For `n` observations with noise summary `sigma*` and precision `A`, a
//! uniform forward-map error `K0` keeps the expected absolute deviation of the
//! Bayes factor from one below
//!
//! ```text
//! EABF <= sqrt(1/(2 pi)) (n / sigma*) K0 factor(A, b)
//! ```
//!
//! so fixing a target EABF gives `K0 = target sqrt(2 pi) sigma* / (n factor)`.

mod quadrature;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{NoiseModel, Precision, SigmaDensity};

/// EABF below which the numerical and exact posteriors are treated as
/// practically identical.
pub const STRINGENT_EABF: f64 = 0.05;
/// Jeffreys' "not worth more than a bare mention" threshold.
pub const BARE_MENTION_EABF: f64 = 1.0;

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// How the constant `k = target * sqrt(2 pi)` is rounded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KRule {
    #[default]
    Exact,
    /// `k` truncated to two decimals (0.12 for the 0.05 target), as quoted
    /// in printed tables.
    TwoDecimals,
}

impl KRule {
    pub fn k(&self, target_eabf: f64) -> f64 {
        let exact = target_eabf * SQRT_2PI;
        match self {
            KRule::Exact => exact,
            KRule::TwoDecimals => (exact * 100.0).floor() / 100.0,
        }
    }
}

/// The admissible uniform solver error and everything it was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceReport {
    pub n: usize,
    pub sigma_star: f64,
    pub correlation_factor: f64,
    pub target_eabf: f64,
    pub k_rule: KRule,
    pub k_constant: f64,
    pub k0_admissible: f64,
}

/// `sigma* = (int sigma^-1 g(sigma) d sigma)^-1`.
///
/// For a known `sigma` this is `sigma` itself. For a prior the integral is
/// taken in `u = ln sigma`, where it reads `int g(e^u) du`; an integrand that
/// fails to decay as `u -> -inf` (positive density at zero) is divergent.
pub fn sigma_star(noise: &NoiseModel) -> Result<f64> {
    match noise {
        NoiseModel::Fixed { sigma } => {
            if *sigma > 0.0 && sigma.is_finite() {
                Ok(*sigma)
            } else {
                Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")))
            }
        }
        NoiseModel::Prior { density } => {
            density.validate()?;
            let inverse_mean = inverse_moment(density)?;
            Ok(1.0 / inverse_mean)
        }
    }
}

const LOG_FLOOR: f64 = -700.0;

fn inverse_moment(g: &SigmaDensity) -> Result<f64> {
    let z = g.normalizer();
    let h = |u: f64| g.unnormalized(u.exp()) / z;

    // Lower tail beyond LOG_FLOOR: fit h ~ exp(rate u) between two far points.
    let (u1, u2) = (LOG_FLOOR + 50.0, LOG_FLOOR);
    let (h1, h2) = (h(u1), h(u2));
    let tail = if h2 > 0.0 {
        let rate = (h1 / h2).ln() / (u1 - u2);
        if !(rate > 1e-6) {
            return Err(Error::DivergentIntegral(
                "sigma prior keeps positive density at zero; int g(s)/s ds is infinite".into(),
            ));
        }
        h2 / rate
    } else {
        0.0
    };

    let upper = g.upper_extent().ln();
    let mut breaks: Vec<f64> = g.landmarks().iter().map(|s| s.ln()).collect();
    let mut u = LOG_FLOOR;
    while u < upper {
        breaks.push(u);
        u += 25.0;
    }
    let q = quadrature::integrate(h, LOG_FLOOR, upper, &breaks, 1e-10, 20_000);
    let value = q.value + tail;
    if !q.converged || !(value.is_finite()) || value <= 0.0 {
        return Err(Error::DivergentIntegral(format!(
            "quadrature did not converge (value {value}, error {})",
            q.error
        )));
    }
    if tail > 1e-8 * value {
        return Err(Error::DivergentIntegral(
            "int g(s)/s ds is dominated by mass near zero".into(),
        ));
    }
    Ok(value)
}

/// `max_i b_i * (1/n) sum_ij |a_ij|`.
pub fn correlation_factor(a: &DMatrix<f64>, b: &[f64]) -> Result<f64> {
    let n = b.len();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.nrows().max(a.ncols()) });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("empty precision matrix".into()));
    }
    let b_max = b.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = a.iter().map(|v| v.abs()).sum();
    Ok(b_max * total / n as f64)
}

/// [`correlation_factor`] of a built precision; exactly 1 for `A = I`.
pub fn precision_factor(p: &Precision) -> f64 {
    if p.is_identity() {
        1.0
    } else {
        correlation_factor(p.matrix(), p.noise_scales()).expect("consistent by construction")
    }
}

fn check_target(target: f64) -> Result<()> {
    if target > 0.0 && target <= BARE_MENTION_EABF {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("target EABF must be in (0, 1], got {target}")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Largest uniform forward-map error keeping the EABF at `target_eabf`:
/// `K0 = k sigma* / (n factor)`.
pub fn admissible_k0(
    n: usize,
    sigma_star: f64,
    factor: f64,
    target_eabf: f64,
    k_rule: KRule,
) -> Result<ToleranceReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    check_positive("sigma*", sigma_star)?;
    check_positive("correlation factor", factor)?;
    check_target(target_eabf)?;
    let k = k_rule.k(target_eabf);
    Ok(ToleranceReport {
        n,
        sigma_star,
        correlation_factor: factor,
        target_eabf,
        k_rule,
        k_constant: k,
        k0_admissible: k * sigma_star / (n as f64 * factor),
    })
}

/// Upper bound on the EABF implied by a uniform forward-map error `k0`.
pub fn eabf_upper_bound(n: usize, sigma_star: f64, k0: f64, factor: f64) -> f64 {
    (n as f64 / sigma_star) * k0 * factor / SQRT_2PI
}

/// Convenience: the full chain noise model → sigma*, precision → factor,
/// then [`admissible_k0`].
pub fn tolerance_for(
    noise: &NoiseModel,
    precision: &Precision,
    target_eabf: f64,
    k_rule: KRule,
) -> Result<ToleranceReport> {
    let s = sigma_star(noise)?;
    admissible_k0(precision.n(), s, precision_factor(precision), target_eabf, k_rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixed_sigma_is_returned_exactly() {
        assert_eq!(sigma_star(&NoiseModel::Fixed { sigma: 30.0 }).unwrap(), 30.0);
    }

    #[test]
    fn gamma_prior_inverse_moment() {
        // E[1/sigma] = rate / (shape - 1) for a gamma prior.
        let noise = NoiseModel::Prior { density: SigmaDensity::Gamma { shape: 3.0, rate: 1.0 } };
        let s = sigma_star(&noise).unwrap();
        assert!((s - 2.0).abs() < 2e-8, "{s}");
        let noise = NoiseModel::Prior { density: SigmaDensity::Gamma { shape: 7.5, rate: 0.2 } };
        assert!((sigma_star(&noise).unwrap() - 6.5 / 0.2).abs() < 1e-8 * 32.5);
    }

    #[test]
    fn other_parametric_priors() {
        // inverse gamma: E[1/s] = shape / scale
        let ig = NoiseModel::Prior { density: SigmaDensity::InverseGamma { shape: 4.0, scale: 2.0 } };
        assert!((sigma_star(&ig).unwrap() - 0.5).abs() < 1e-9);
        // log-normal: E[1/s] = exp(-mu + s^2/2)
        let ln = NoiseModel::Prior { density: SigmaDensity::LogNormal { mu: 1.0, sigma: 0.5 } };
        let want = 1.0 / (-1.0f64 + 0.125).exp();
        assert!((sigma_star(&ln).unwrap() - want).abs() < 1e-8 * want);
    }

    #[test]
    fn narrow_normal_approaches_point_mass() {
        let noise = NoiseModel::Prior { density: SigmaDensity::Normal { mean: 30.0, sd: 1e-6 } };
        assert!((sigma_star(&noise).unwrap() - 30.0).abs() < 1e-4);
    }

    #[test]
    fn tabulated_uniform_prior() {
        // uniform on [1, 3]: E[1/s] = ln(3)/2
        let noise = NoiseModel::Prior {
            density: SigmaDensity::Tabulated { sigma: vec![1.0, 3.0], density: vec![1.0, 1.0] },
        };
        let want = 2.0 / 3f64.ln();
        assert!((sigma_star(&noise).unwrap() - want).abs() < 1e-8 * want);
    }

    #[test]
    fn divergent_priors_are_rejected() {
        for density in [
            SigmaDensity::Gamma { shape: 1.0, rate: 1.0 },
            SigmaDensity::Gamma { shape: 0.5, rate: 1.0 },
            SigmaDensity::Normal { mean: 1.0, sd: 1.0 },
            SigmaDensity::Tabulated { sigma: vec![0.0, 1.0], density: vec![1.0, 1.0] },
        ] {
            let r = sigma_star(&NoiseModel::Prior { density: density.clone() });
            assert!(matches!(r, Err(Error::DivergentIntegral(_))), "{density:?}: {r:?}");
        }
    }

    #[test]
    fn factor_examples() {
        assert_eq!(correlation_factor(&DMatrix::identity(7, 7), &[1.0; 7]).unwrap(), 1.0);
        let b = [1.0 / 2f64.sqrt(); 4];
        let f = correlation_factor(&(DMatrix::identity(4, 4) * 2.0), &b).unwrap();
        assert!((f - 2f64.sqrt()).abs() < 1e-15);
        let f = correlation_factor(&DMatrix::from_element(1, 1, 4.0), &[0.5]).unwrap();
        assert_eq!(f, 2.0);
        assert!(correlation_factor(&DMatrix::identity(2, 2), &[1.0]).is_err());
    }

    #[test]
    fn scaling_table() {
        let k = SQRT_2PI / 20.0;
        for (n, want) in [(1usize, 0.1253), (10, 0.01253), (100, 0.001253)] {
            let r = admissible_k0(n, 1.0, 1.0, STRINGENT_EABF, KRule::Exact).unwrap();
            assert!((r.k0_admissible - want).abs() / want < 1e-3);
            assert!((r.k0_admissible - k / n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn logistic_setting() {
        let r = admissible_k0(26, 30.0, 1.0, STRINGENT_EABF, KRule::Exact).unwrap();
        assert!((r.k0_admissible - 0.144_613_169_690_25).abs() < 1e-12);
        let r = admissible_k0(26, 30.0, 1.0, STRINGENT_EABF, KRule::TwoDecimals).unwrap();
        assert_eq!(r.k_constant, 0.12);
        assert!((0.13..=0.145).contains(&r.k0_admissible));
    }

    #[test]
    fn upper_bound_examples() {
        assert_eq!(eabf_upper_bound(26, 30.0, 0.0, 1.0), 0.0);
        let b = eabf_upper_bound(26, 30.0, 0.13, 1.0);
        assert!((b - 0.044_947_5).abs() < 1e-6, "{b}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(admissible_k0(0, 1.0, 1.0, 0.05, KRule::Exact).is_err());
        assert!(admissible_k0(3, -1.0, 1.0, 0.05, KRule::Exact).is_err());
        assert!(admissible_k0(3, 1.0, 1.0, 0.0, KRule::Exact).is_err());
        assert!(admissible_k0(3, 1.0, 1.0, BARE_MENTION_EABF, KRule::Exact).is_ok());
    }

    proptest! {
        #[test]
        fn round_trip(n in 1usize..10_000, s in 1e-4f64..1e4, factor in 0.1f64..50.0, target in 0.001f64..0.999) {
            let r = admissible_k0(n, s, factor, target, KRule::Exact).unwrap();
            let back = eabf_upper_bound(n, s, r.k0_admissible, factor);
            prop_assert!((back - target).abs() < 1e-12);
        }

        #[test]
        fn monotone(n in 1usize..1000, s in 1e-3f64..1e3, ds in 1e-3f64..10.0) {
            let base = admissible_k0(n, s, 1.0, 0.05, KRule::Exact).unwrap().k0_admissible;
            let more_noise = admissible_k0(n, s + ds, 1.0, 0.05, KRule::Exact).unwrap().k0_admissible;
            let more_data = admissible_k0(n + 1, s, 1.0, 0.05, KRule::Exact).unwrap().k0_admissible;
            prop_assert!(more_noise > base);
            prop_assert!(more_data < base);
        }
    }
}
