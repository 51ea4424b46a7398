use super::Precision;
use crate::error::{Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Log density of `y ~ N_n(f, (sigma^-2 A)^-1)`:
///
/// `-(n/2) ln(2 pi sigma^2) + (1/2) ln|A| - (y - f)' A (y - f) / (2 sigma^2)`.
pub fn log_likelihood(y: &[f64], f: &[f64], sigma: f64, precision: &Precision) -> Result<f64> {
    let n = y.len();
    if f.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: f.len() });
    }
    if precision.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: precision.n() });
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    let resid: Vec<f64> = y.iter().zip(f).map(|(a, b)| a - b).collect();
    let quad = precision.quad_form(&resid);
    let nf = n as f64;
    Ok(-0.5 * nf * (LN_2PI + 2.0 * sigma.ln()) + 0.5 * precision.log_det() - quad / (2.0 * sigma * sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn normal_ln_pdf(x: f64, mean: f64, sd: f64) -> f64 {
        let z = (x - mean) / sd;
        -0.5 * z * z - sd.ln() - 0.5 * LN_2PI
    }

    #[test]
    fn zero_residual_single_point() {
        let p = Precision::identity(1);
        let ll = log_likelihood(&[3.0], &[3.0], 1.0, &p).unwrap();
        assert_eq!(ll, -0.5 * LN_2PI);
    }

    #[test]
    fn two_by_two_against_explicit_inverse() {
        // A = [[a, c], [c, d]]; |A| = ad - c^2, r'Ar expanded by hand.
        let (a, c, d) = (1.7, -0.4, 0.9);
        let p = Precision::from_matrix(DMatrix::from_row_slice(2, 2, &[a, c, c, d])).unwrap();
        let y = [1.3, -0.2];
        let f = [0.8, 0.5];
        let sigma = 0.7;
        let (r0, r1) = (y[0] - f[0], y[1] - f[1]);
        let quad = a * r0 * r0 + 2.0 * c * r0 * r1 + d * r1 * r1;
        let det = a * d - c * c;
        let want = -(2.0 * std::f64::consts::PI * sigma * sigma).ln() + 0.5 * det.ln()
            - quad / (2.0 * sigma * sigma);
        let got = log_likelihood(&y, &f, sigma, &p).unwrap();
        assert!((got - want).abs() < 1e-13);
    }

    #[test]
    fn dimension_checks() {
        let p = Precision::identity(2);
        assert!(log_likelihood(&[1.0, 2.0], &[1.0], 1.0, &p).is_err());
        assert!(log_likelihood(&[1.0], &[1.0], 1.0, &p).is_err());
        assert!(log_likelihood(&[1.0, 2.0], &[1.0, 2.0], 0.0, &p).is_err());
    }

    #[test]
    fn scale_relation() {
        let p = Precision::from_matrix(DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0])).unwrap();
        let y = [0.4, 1.9];
        let f = [0.1, 2.5];
        for &c in &[0.5, 2.0] {
            let sigma = 1.3 * c;
            let r: Vec<f64> = y.iter().zip(&f).map(|(a, b)| (a - b) / c).collect();
            let direct = -(2.0 * std::f64::consts::PI * sigma * sigma).ln() + 0.5 * p.log_det()
                - p.quad_form(&r) / (2.0 * 1.3 * 1.3);
            let got = log_likelihood(&y, &f, sigma, &p).unwrap();
            assert!((got - direct).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn identity_factorizes(
            pairs in prop::collection::vec((-100.0f64..100.0, -3.0f64..3.0), 26),
            sigma in 0.1f64..50.0,
        ) {
            let f: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let y: Vec<f64> = pairs.iter().map(|p| p.0 + sigma * p.1).collect();
            let ll = log_likelihood(&y, &f, sigma, &Precision::identity(26)).unwrap();
            let sum: f64 = y.iter().zip(&f).map(|(a, b)| normal_ln_pdf(*a, *b, sigma)).sum();
            prop_assert!((ll - sum).abs() < 1e-12);
        }

        #[test]
        fn shift_invariant(
            pairs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..8),
            shift in -1e3f64..1e3,
        ) {
            let y: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let f: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let ys: Vec<f64> = y.iter().map(|v| v + shift).collect();
            let fs: Vec<f64> = f.iter().map(|v| v + shift).collect();
            let p = Precision::identity(y.len());
            let a = log_likelihood(&y, &f, 1.5, &p).unwrap();
            let b = log_likelihood(&ys, &fs, 1.5, &p).unwrap();
            prop_assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
        }
    }
}
