/// Coefficients of an explicit embedded Runge–Kutta pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    /// Strictly lower-triangular stage matrix, row `i` has `i` entries.
    pub a: Vec<Vec<f64>>,
    /// Weights of the propagated (higher-order) solution.
    pub b: Vec<f64>,
    /// Weights of the embedded lower-order companion.
    pub b_hat: Vec<f64>,
    pub c: Vec<f64>,
    /// Order of the `b` solution; the companion has order `order - 1`.
    pub order: u32,
}

impl ButcherTableau {
    /// Cash & Karp (1990) 5(4) pair.
    pub fn cash_karp() -> Self {
        Self {
            a: vec![
                vec![],
                vec![1.0 / 5.0],
                vec![3.0 / 40.0, 9.0 / 40.0],
                vec![3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0],
                vec![-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0],
                vec![
                    1631.0 / 55296.0,
                    175.0 / 512.0,
                    575.0 / 13824.0,
                    44275.0 / 110592.0,
                    253.0 / 4096.0,
                ],
            ],
            b: vec![37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0],
            b_hat: vec![
                2825.0 / 27648.0,
                0.0,
                18575.0 / 48384.0,
                13525.0 / 55296.0,
                277.0 / 14336.0,
                1.0 / 4.0,
            ],
            c: vec![0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0],
            order: 5,
        }
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// `b_i - b_hat_i`, the weights of the local error estimate.
    pub fn error_weights(&self) -> Vec<f64> {
        self.b.iter().zip(&self.b_hat).map(|(x, y)| x - y).collect()
    }

    /// Largest violation of `c_i = sum_j a_ij`, `sum b = 1`, `sum b_hat = 1`
    /// and explicitness.
    pub fn consistency_defect(&self) -> f64 {
        let s = self.stages();
        let mut worst: f64 = 0.0;
        if self.a.len() != s || self.c.len() != s || self.b_hat.len() != s {
            return f64::INFINITY;
        }
        for (i, row) in self.a.iter().enumerate() {
            if row.len() != i {
                return f64::INFINITY;
            }
            worst = worst.max((row.iter().sum::<f64>() - self.c[i]).abs());
        }
        worst = worst.max((self.b.iter().sum::<f64>() - 1.0).abs());
        worst.max((self.b_hat.iter().sum::<f64>() - 1.0).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cash_karp_is_consistent() {
        let t = ButcherTableau::cash_karp();
        assert_eq!(t.stages(), 6);
        assert!(t.consistency_defect() < 1e-15);
    }

    #[test]
    fn cash_karp_order_conditions() {
        // order conditions up to 4 for both weight sets: sum b c^k = 1/(k+1)
        let t = ButcherTableau::cash_karp();
        for weights in [&t.b, &t.b_hat] {
            for k in 0..4 {
                let s: f64 = weights.iter().zip(&t.c).map(|(w, c)| w * c.powi(k)).sum();
                assert!((s - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "k = {k}");
            }
        }
        // fifth-order quadrature condition only holds for b
        let s5: f64 = t.b.iter().zip(&t.c).map(|(w, c)| w * c.powi(4)).sum();
        assert!((s5 - 0.2).abs() < 1e-14);
        let s5_hat: f64 = t.b_hat.iter().zip(&t.c).map(|(w, c)| w * c.powi(4)).sum();
        assert!((s5_hat - 0.2).abs() > 1e-6);
    }
}
