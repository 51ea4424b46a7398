//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
/// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Piece {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, &x) in XGK.iter().take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Piece { lo, hi, value: kronrod * half, error: ((kronrod - gauss) * half).abs() }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// Integrates `f` over `[lo, hi]`, starting from the pieces delimited by the
/// sorted `breaks` that fall inside the interval.
pub(crate) fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    rel_tol: f64,
    max_pieces: usize,
) -> Quadrature {
    let mut edges = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|b| *b > lo && *b < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(hi);

    let mut heap: BinaryHeap<Piece> = edges.windows(2).map(|w| gk15(&f, w[0], w[1])).collect();
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= rel_tol * value.abs() || error < f64::MIN_POSITIVE {
            return Quadrature { value, error, converged: true };
        }
        if heap.len() >= max_pieces {
            return Quadrature { value, error, converged: false };
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            heap.push(worst);
            let value: f64 = heap.iter().map(|p| p.value).sum();
            return Quadrature { value, error, converged: false };
        }
        heap.push(gk15(&f, worst.lo, mid));
        heap.push(gk15(&f, mid, worst.hi));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let q = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, &[], 1e-14, 10);
        assert!((q.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn narrow_gaussian_with_breakpoints() {
        let s = 1e-7;
        let f = |x: f64| (-0.5 * ((x - 3.0) / s).powi(2)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt());
        let q = integrate(f, 0.0, 10.0, &[3.0 - 10.0 * s, 3.0, 3.0 + 10.0 * s], 1e-12, 500);
        assert!(q.converged);
        assert!((q.value - 1.0).abs() < 1e-10);
    }
}
