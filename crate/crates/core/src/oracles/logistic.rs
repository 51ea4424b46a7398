use serde::{Deserialize, Serialize};

/// Parameters of the logistic growth law `dX/dt = r X (1 - X/K)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    /// Growth rate (1/time).
    pub r: f64,
    /// Carrying capacity.
    pub k: f64,
    /// Initial size `X(0)`.
    pub x0: f64,
}

impl LogisticParams {
    pub fn new(r: f64, k: f64, x0: f64) -> Self {
        Self { r, k, x0 }
    }

    /// Right-hand side of the growth law.
    #[inline]
    pub fn rate(&self, x: f64) -> f64 {
        self.r * x * (1.0 - x / self.k)
    }
}

/// Closed-form logistic solution `K X0 / (X0 + (K - X0) exp(-r t))`.
///
/// `exp(-r t)` only underflows toward zero for large `r t`, so the quotient
/// settles at `K` without overflow.
pub fn logistic_exact(t: f64, p: &LogisticParams) -> f64 {
    let decay = (-p.r * t).exp();
    p.k * p.x0 / (p.x0 + (p.k - p.x0) * decay)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn standard() -> LogisticParams {
        LogisticParams::new(1.0, 1000.0, 100.0)
    }

    #[test]
    fn initial_condition() {
        assert_eq!(logistic_exact(0.0, &standard()), 100.0);
    }

    #[test]
    fn approaches_carrying_capacity() {
        assert!((logistic_exact(100.0, &standard()) - 1000.0).abs() < 1e-9);
        assert_eq!(logistic_exact(1e6, &standard()), 1000.0);
    }

    #[test]
    fn value_at_unit_time() {
        // 1000*100 / (100 + 900 e^-1), evaluated with 30-digit arithmetic.
        let want = 231.969_316_684_073_94;
        assert!((logistic_exact(1.0, &standard()) - want).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn satisfies_the_growth_law(t in 0.0f64..10.0) {
            let p = standard();
            let h = 1e-5;
            let dx = (logistic_exact(t + h, &p) - logistic_exact(t - h, &p)) / (2.0 * h);
            let x = logistic_exact(t, &p);
            prop_assert!((dx - p.rate(x)).abs() < 1e-6);
        }
    }
}
