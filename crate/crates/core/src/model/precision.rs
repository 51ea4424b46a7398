use nalgebra::{Cholesky, DMatrix, Dyn};
use serde::{Deserialize, Serialize};

use super::Locations;
use crate::error::{Error, Result};

/// Isotropic correlation function `rho(d)` with `rho(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Correlation {
    /// `exp(-d / range)`
    Exponential { range: f64 },
    /// `exp(-(d / range)^2)`
    SquaredExponential { range: f64 },
}

impl Correlation {
    pub fn eval(&self, d: f64) -> f64 {
        match *self {
            Correlation::Exponential { range } => (-d / range).exp(),
            Correlation::SquaredExponential { range } => (-(d / range).powi(2)).exp(),
        }
    }

    fn validate(&self) -> Result<()> {
        let range = match *self {
            Correlation::Exponential { range } | Correlation::SquaredExponential { range } => range,
        };
        if range.is_nan() || range <= 0.0 {
            return Err(Error::InvalidCorrelation(format!("range must be positive, got {range}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl Metric {
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            Metric::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            Metric::Manhattan => diffs.sum(),
            Metric::Chebyshev => diffs.fold(0.0, f64::max),
        }
    }
}

/// Structure of the observation precision `sigma^-2 A`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrecisionSpec {
    /// Uncorrelated observations, `A = I`.
    #[default]
    Identity,
    /// `A^-1 = (rho(d(x_i, x_j)))`.
    Isotropic {
        correlation: Correlation,
        #[serde(default)]
        metric: Metric,
    },
}

/// A factored precision matrix `A` together with the noise scales
/// `b_i = sqrt([A^-1]_ii)`.
///
/// Built once per problem; the likelihood only ever reads it.
#[derive(Debug, Clone)]
pub struct Precision {
    a: DMatrix<f64>,
    b: Vec<f64>,
    /// Lower Cholesky factor of `A`; `None` when `A = I`.
    factor: Option<DMatrix<f64>>,
    log_det: f64,
}

impl Precision {
    pub fn identity(n: usize) -> Self {
        Self { a: DMatrix::identity(n, n), b: vec![1.0; n], factor: None, log_det: 0.0 }
    }

    /// Wraps an explicit symmetric positive-definite precision matrix.
    pub fn from_matrix(a: DMatrix<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
        }
        let chol = cholesky(&a)
            .ok_or_else(|| Error::InvalidCorrelation("precision matrix is not positive definite".into()))?;
        let cov = chol.inverse();
        let b = cov.diagonal().iter().map(|v| v.sqrt()).collect();
        Ok(Self::assemble(a, b, chol))
    }

    /// Builds `A` from a correlation matrix `A^-1`.
    pub fn from_correlation(corr: DMatrix<f64>) -> Result<Self> {
        if !corr.is_square() {
            return Err(Error::DimensionMismatch { expected: corr.nrows(), got: corr.ncols() });
        }
        let n = corr.nrows();
        for i in 0..n {
            for j in 0..n {
                let v = corr[(i, j)];
                if !v.is_finite() || (v - corr[(j, i)]).abs() > 1e-12 {
                    return Err(Error::InvalidCorrelation("correlation matrix must be finite and symmetric".into()));
                }
            }
        }
        let chol = cholesky(&corr).ok_or_else(|| {
            Error::InvalidCorrelation("correlation matrix is not positive definite".into())
        })?;
        let b: Vec<f64> = corr.diagonal().iter().map(|v| v.sqrt()).collect();
        let mut a = chol.inverse();
        symmetrize(&mut a);
        let chol_a = cholesky(&a).ok_or_else(|| {
            Error::InvalidCorrelation("correlation matrix is numerically singular".into())
        })?;
        Ok(Self::assemble(a, b, chol_a))
    }

    fn assemble(a: DMatrix<f64>, b: Vec<f64>, chol: Cholesky<f64, Dyn>) -> Self {
        let l = chol.l();
        let log_det = 2.0 * l.diagonal().iter().map(|v| v.ln()).sum::<f64>();
        Self { a, b, factor: Some(l), log_det }
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// Noise scale multipliers `b_i`.
    pub fn noise_scales(&self) -> &[f64] {
        &self.b
    }

    pub fn is_identity(&self) -> bool {
        self.factor.is_none()
    }

    /// `log |A|`.
    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// `r' A r`, computed as `|L' r|^2`.
    pub fn quad_form(&self, r: &[f64]) -> f64 {
        match &self.factor {
            None => r.iter().map(|v| v * v).sum(),
            Some(l) => {
                let n = r.len();
                let mut total = 0.0;
                for j in 0..n {
                    let mut s = 0.0;
                    for i in j..n {
                        s += l[(i, j)] * r[i];
                    }
                    total += s * s;
                }
                total
            }
        }
    }
}

fn cholesky(m: &DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    Cholesky::new(m.clone()).filter(|c| c.l_dirty().diagonal().iter().all(|d| d.is_finite() && *d > 0.0))
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Builds `A` and `b` for the given locations.
pub fn build_precision(spec: &PrecisionSpec, locs: &Locations) -> Result<Precision> {
    match spec {
        PrecisionSpec::Identity => Ok(Precision::identity(locs.len())),
        PrecisionSpec::Isotropic { correlation, metric } => {
            correlation.validate()?;
            let at_zero = correlation.eval(0.0);
            if (at_zero - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidCorrelation(format!("rho(0) = {at_zero}, expected 1")));
            }
            let n = locs.len();
            let corr = DMatrix::from_fn(n, n, |i, j| {
                correlation.eval(metric.distance(locs.get(i), locs.get(j)))
            });
            if corr.iter().any(|v| v.abs() > 1.0 + 1e-12) {
                return Err(Error::InvalidCorrelation("|rho| exceeds 1".into()));
            }
            Precision::from_correlation(corr)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_spec() {
        let locs = Locations::from_scalars(&[0.0, 1.0, 2.0]).unwrap();
        let p = build_precision(&PrecisionSpec::Identity, &locs).unwrap();
        assert_eq!(p.matrix(), &DMatrix::identity(3, 3));
        assert_eq!(p.noise_scales(), &[1.0, 1.0, 1.0]);
        assert_eq!(p.log_det(), 0.0);
    }

    #[test]
    fn exponential_correlation_on_unit_lattice() {
        // A^-1 is the AR(1) correlation with phi = e^-1, whose inverse is
        // tridiagonal: (1/(1-phi^2)) [[1,-phi,0],[-phi,1+phi^2,-phi],[0,-phi,1]].
        let locs = Locations::from_scalars(&[0.0, 1.0, 2.0]).unwrap();
        let spec = PrecisionSpec::Isotropic {
            correlation: Correlation::Exponential { range: 1.0 },
            metric: Metric::Euclidean,
        };
        let p = build_precision(&spec, &locs).unwrap();
        let phi = (-1.0f64).exp();
        let s = 1.0 / (1.0 - phi * phi);
        let want = DMatrix::from_row_slice(
            3,
            3,
            &[s, -phi * s, 0.0, -phi * s, (1.0 + phi * phi) * s, -phi * s, 0.0, -phi * s, s],
        );
        for (g, w) in p.matrix().iter().zip(want.iter()) {
            assert!((g - w).abs() < 1e-12, "{g} vs {w}");
        }
        assert_eq!(p.noise_scales(), &[1.0, 1.0, 1.0]);
        // |A| = 1/|A^-1| = 1/(1-phi^2)^2
        assert!((p.log_det() + 2.0 * (1.0 - phi * phi).ln()).abs() < 1e-12);
    }

    #[test]
    fn rank_one_correlation_is_rejected() {
        let locs = Locations::from_scalars(&[0.0, 1.0]).unwrap();
        let spec = PrecisionSpec::Isotropic {
            correlation: Correlation::Exponential { range: f64::INFINITY },
            metric: Metric::Euclidean,
        };
        assert!(matches!(build_precision(&spec, &locs), Err(Error::InvalidCorrelation(_))));
    }

    #[test]
    fn quad_form_matches_dense_product() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let p = Precision::from_matrix(a.clone()).unwrap();
        let r = [0.3, -1.2];
        let dense = 2.0 * 0.09 + 2.0 * 0.5 * 0.3 * -1.2 + 1.44;
        assert!((p.quad_form(&r) - dense).abs() < 1e-14);
        assert!((p.log_det() - (2.0f64 - 0.25).ln()).abs() < 1e-14);
        // b_i^2 = [A^-1]_ii = (1, 2) / 1.75
        assert!((p.noise_scales()[1] - (2.0f64 / 1.75).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn spec_json_shape() {
        let spec: PrecisionSpec = serde_json::from_str(
            r#"{"kind":"isotropic","correlation":{"family":"exponential","range":2.0}}"#,
        )
        .unwrap();
        assert_eq!(
            spec,
            PrecisionSpec::Isotropic {
                correlation: Correlation::Exponential { range: 2.0 },
                metric: Metric::Euclidean
            }
        );
    }
}
