//! Complementary error function and its scaled form.
//!
//! Rational Chebyshev approximations after W. J. Cody, "Rational Chebyshev
//! approximations for the error function" (Math. Comp. 23, 1969). Three
//! intervals: `|x| <= 0.46875`, `0.46875 < |x| <= 4` and `|x| > 4`.

// coefficients are quoted as published
#![allow(clippy::excessive_precision)]

const SMALL: f64 = 0.46875;
const MEDIUM: f64 = 4.0;
/// Beyond this `erfc(x)` underflows to zero in double precision.
const UNDERFLOW: f64 = 26.543;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

const A: [f64; 5] = [
    3.161_123_743_870_565_6,
    113.864_154_151_050_16,
    377.485_237_685_302,
    3_209.377_589_138_469_5,
    0.185_777_706_184_603_15,
];
const B: [f64; 4] = [
    23.601_290_952_344_12,
    244.024_637_934_444_17,
    1_282.616_526_077_372_3,
    2_844.236_833_439_170_6,
];
const C: [f64; 9] = [
    0.564_188_496_988_670_1,
    8.883_149_794_388_376,
    66.119_190_637_141_63,
    298.635_138_197_400_1,
    881.952_221_241_769_1,
    1_712.047_612_634_070_6,
    2_051.078_377_826_071_6,
    1_230.339_354_797_997_2,
    2.153_115_354_744_038_5e-8,
];
const D: [f64; 8] = [
    15.744_926_110_709_835,
    117.693_950_891_312_5,
    537.181_101_862_009_9,
    1_621.389_574_566_690_2,
    3_290.799_235_733_459_6,
    4_362.619_090_143_247,
    3_439.367_674_143_721_6,
    1_230.339_354_803_749_4,
];
const P: [f64; 6] = [
    0.305_326_634_961_232_34,
    0.360_344_899_949_804_43,
    0.125_781_726_111_229_25,
    0.016_083_785_148_742_277,
    6.587_491_615_298_378e-4,
    0.016_315_387_137_302_098,
];
const Q: [f64; 5] = [
    2.568_520_192_289_822_4,
    1.872_952_849_923_460_4,
    0.527_905_102_951_428_4,
    0.060_518_341_312_441_32,
    0.002_335_204_976_268_691_8,
];

/// `erf(x)/x` on the central interval, as a function of `z = x^2`.
fn central(z: f64) -> f64 {
    let num = (((A[4] * z + A[0]) * z + A[1]) * z + A[2]) * z + A[3];
    let den = (((z + B[0]) * z + B[1]) * z + B[2]) * z + B[3];
    num / den
}

/// `erfcx(y)` for `SMALL < y <= MEDIUM`.
fn middle(y: f64) -> f64 {
    let mut num = C[8] * y;
    let mut den = y;
    for i in 0..7 {
        num = (num + C[i]) * y;
        den = (den + D[i]) * y;
    }
    (num + C[7]) / (den + D[7])
}

/// `erfcx(y)` for `y > MEDIUM`.
fn tail(y: f64) -> f64 {
    let z = 1.0 / (y * y);
    let mut num = P[5] * z;
    let mut den = z;
    for i in 0..4 {
        num = (num + P[i]) * z;
        den = (den + Q[i]) * z;
    }
    let r = z * (num + P[4]) / (den + Q[4]);
    (FRAC_1_SQRT_PI - r) / y
}

/// `exp(-y^2)` with the square split so that the rounding error of `y*y`
/// is not amplified by the exponential.
fn exp_neg_square(y: f64) -> f64 {
    let head = (y * 16.0).trunc() / 16.0;
    (-head * head).exp() * (-(y - head) * (y + head)).exp()
}

fn exp_pos_square(y: f64) -> f64 {
    let head = (y * 16.0).trunc() / 16.0;
    (head * head).exp() * ((y - head) * (y + head)).exp()
}

/// `erfcx(y) = exp(y^2) erfc(y)` for `y > SMALL`.
fn scaled_upper(y: f64) -> f64 {
    if y <= MEDIUM {
        middle(y)
    } else {
        tail(y)
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let y = x.abs();
    if y <= SMALL {
        return 1.0 - x * central(y * y);
    }
    let upper = if y >= UNDERFLOW {
        0.0
    } else {
        scaled_upper(y) * exp_neg_square(y)
    };
    if x < 0.0 {
        2.0 - upper
    } else {
        upper
    }
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    let y = x.abs();
    if y <= SMALL {
        return x * central(y * y);
    }
    1.0 - erfc(x)
}

/// Scaled complementary error function `exp(x^2) erfc(x)`.
///
/// Finite for every `x` above roughly `-26.6`; saturates to `f64::INFINITY`
/// below that.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let y = x.abs();
    if y <= SMALL {
        return (y * y).exp() * (1.0 - x * central(y * y));
    }
    if x >= 0.0 {
        return scaled_upper(y);
    }
    if y > 26.628 {
        return f64::INFINITY;
    }
    2.0 * exp_pos_square(y) - scaled_upper(y)
}

/// `ln(erfc(x))`, finite for all finite `x`.
pub fn ln_erfc(x: f64) -> f64 {
    if x > SMALL {
        scaled_upper(x).ln() - x * x
    } else {
        erfc(x).ln()
    }
}

/// `ln(erfcx(x))` for `x >= 0`, and `ln(erfc(x))` for `x < 0`.
///
/// This is the part of `ln(erfc(x))` that stays moderate in magnitude; the
/// Gaussian factor `-x^2` for positive arguments is left to the caller so it
/// can be cancelled analytically.
pub(crate) fn ln_erfc_reduced(x: f64) -> f64 {
    if x >= 0.0 {
        erfcx(x).ln()
    } else {
        erfc(x).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Maclaurin series for erf, summed in double-double style via Kahan
    /// compensation; accurate to a few ulp for |x| <= 3.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let mut comp = 0.0;
        let x2 = x * x;
        for k in 1..200 {
            term *= -x2 / k as f64;
            let add = term / (2 * k + 1) as f64 - comp;
            let next = sum + add;
            comp = (next - sum) - add;
            sum = next;
            if term.abs() < 1e-30 {
                break;
            }
        }
        2.0 * FRAC_1_SQRT_PI * sum
    }

    /// Continued fraction for erfc, good for x >= 2.
    fn erfc_continued_fraction(x: f64) -> f64 {
        // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        let mut f = x;
        for k in (1..400).rev() {
            f = x + (k as f64 / 2.0) / f;
        }
        (-x * x).exp() * FRAC_1_SQRT_PI / f
    }

    #[test]
    fn erfc_at_zero_is_one() {
        assert_eq!(erfc(0.0), 1.0);
    }

    #[test]
    fn erfc_at_one() {
        assert!((erfc(1.0) - 0.157_299_207_050_285_13).abs() < 1e-15);
        assert!((1.0 - erf_series(1.0) - 0.157_299_207_050_285_13).abs() < 1e-15);
    }

    #[test]
    fn matches_series_on_central_range() {
        for i in -300..=300 {
            let x = i as f64 / 100.0;
            assert!((erfc(x) - (1.0 - erf_series(x))).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn matches_continued_fraction_in_tail() {
        for i in 0..=240 {
            let x = 2.0 + i as f64 / 10.0;
            let want = erfc_continued_fraction(x);
            let got = erfc(x);
            if x <= 6.0 {
                assert!((got - want).abs() < 1e-13, "x = {x}");
            }
            assert!(((got - want) / want).abs() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn scaled_form_in_deep_tail() {
        for &x in &[10.0, 30.0, 100.0, 1e3, 1e5] {
            let f = {
                let mut f = x;
                for k in (1..400).rev() {
                    f = x + (k as f64 / 2.0) / f;
                }
                FRAC_1_SQRT_PI / f
            };
            assert!(((erfcx(x) - f) / f).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn ln_erfc_is_finite_far_out() {
        let v = ln_erfc(200.0);
        assert!(v.is_finite());
        assert!((v - (erfcx(200.0).ln() - 40_000.0)).abs() < 1e-9);
        assert!((ln_erfc(-50.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn erfcx_negative_branch() {
        let x = -1.5_f64;
        assert!((erfcx(x) - (x * x).exp() * erfc(x)).abs() < 1e-12);
    }
}
