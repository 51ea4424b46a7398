use super::erfc::ln_erfc_reduced;
use crate::burgers::BurgersParams;

/// Cole–Hopf solution of the viscous Burgers Riemann problem.
///
/// With `s = sqrt(4 eps t)`, `xi = z - z0`, `jump = u_L - u_R`,
/// `c = (u_L + u_R)/2`:
///
/// ```text
/// u = u_L - jump / (1 + q exp(-jump (xi - c t) / (2 eps)))
/// q = erfc((xi - u_L t)/s) / erfc((u_R t - xi)/s)
/// ```
///
/// The product `q exp(..)` is assembled as `exp(E)` with the Gaussian factors
/// of the two `erfc` values cancelled against the exponential, so the result is
/// finite for arbitrarily sharp fronts. At `t = 0` the step initial condition
/// is returned, with the midpoint value exactly at `z0`.
pub fn burgers_exact(z: f64, t: f64, p: &BurgersParams) -> f64 {
    let jump = p.u_left - p.u_right;
    let xi = z - p.z0;
    if t <= 0.0 {
        return if xi < 0.0 {
            p.u_left
        } else if xi > 0.0 {
            p.u_right
        } else {
            0.5 * (p.u_left + p.u_right)
        };
    }
    let s = (4.0 * p.epsilon * t).sqrt();
    let c = 0.5 * (p.u_left + p.u_right);
    let lead = (xi - p.u_left * t) / s;
    let trail = (p.u_right * t - xi) / s;
    let front = jump * (xi - c * t) / (2.0 * p.epsilon);

    // lead + trail = -jump t / s < 0, so at most one of them is non-negative.
    let log_weight = if lead >= 0.0 {
        ln_erfc_reduced(lead) - lead * lead - ln_erfc_reduced(trail) - front
    } else if trail >= 0.0 {
        // trail^2 - front == lead^2
        ln_erfc_reduced(lead) - ln_erfc_reduced(trail) + lead * lead
    } else {
        ln_erfc_reduced(lead) - ln_erfc_reduced(trail) - front
    };
    p.u_left - jump * logistic_sigmoid(-log_weight)
}

/// `1 / (1 + exp(-x))` without overflow.
fn logistic_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::super::erfc::erfc;
    use super::*;

    fn riemann() -> BurgersParams {
        BurgersParams::new(2.0, 1.0, 1.0, 0.05)
    }

    /// Direct transcription of the closed form, usable where nothing
    /// overflows.
    fn naive(z: f64, t: f64, p: &BurgersParams) -> f64 {
        let jump = p.u_left - p.u_right;
        let s = (4.0 * p.epsilon * t).sqrt();
        let c = 0.5 * (p.u_left + p.u_right);
        let xi = z - p.z0;
        let q = erfc((xi - p.u_left * t) / s) / erfc((p.u_right * t - xi) / s);
        p.u_left - jump / (1.0 + q * (-jump * (xi - c * t) / (2.0 * p.epsilon)).exp())
    }

    #[test]
    fn initial_step() {
        let p = riemann();
        assert_eq!(burgers_exact(0.5, 0.0, &p), 2.0);
        assert_eq!(burgers_exact(2.0, 0.0, &p), 1.0);
        assert_eq!(burgers_exact(1.0, 0.0, &p), 1.5);
    }

    #[test]
    fn travelling_midpoint() {
        let p = BurgersParams::new(2.0, 1.0, 1.0, 0.2);
        for &t in &[0.1, 0.5, 1.0, 2.0] {
            let z = p.z0 + 1.5 * t;
            let u = burgers_exact(z, t, &p);
            assert!((u - 1.5).abs() < 1e-12, "t = {t}: {u}");
            assert!((naive(z, t, &p) - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn agrees_with_naive_form_where_it_is_safe() {
        let p = BurgersParams::new(2.0, 1.0, 1.0, 0.3);
        for i in 0..=40 {
            let z = i as f64 * 0.1;
            for &t in &[0.05, 0.2, 0.5] {
                let a = burgers_exact(z, t, &p);
                let b = naive(z, t, &p);
                assert!((a - b).abs() < 1e-11, "z = {z}, t = {t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn bounded_and_monotone() {
        for &eps in &[0.05, 0.01, 1e-3] {
            let p = BurgersParams::new(2.0, 1.0, 1.0, eps);
            for &t in &[1e-6, 0.1, 0.5, 1.0] {
                let mut prev = f64::INFINITY;
                for i in 0..=800 {
                    let z = i as f64 * 0.005;
                    let u = burgers_exact(z, t, &p);
                    assert!(u.is_finite());
                    assert!((1.0..=2.0).contains(&u), "eps {eps} t {t} z {z}: {u}");
                    assert!(u <= prev + 1e-14);
                    prev = u;
                }
            }
        }
    }

    #[test]
    fn sharp_front_does_not_overflow() {
        // jump / (2 eps) = 1000
        let p = BurgersParams::new(2.0, 1.0, 1.0, 5e-4);
        let u = burgers_exact(1.75, 0.5, &p);
        assert!((u - 1.5).abs() < 1e-9);
        assert!((burgers_exact(1.7, 0.5, &p) - 2.0).abs() < 1e-12);
        assert!((burgers_exact(1.8, 0.5, &p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_time_limit_is_the_step() {
        let p = riemann();
        assert!((burgers_exact(0.9, 1e-8, &p) - 2.0).abs() < 1e-12);
        assert!((burgers_exact(1.1, 1e-8, &p) - 1.0).abs() < 1e-12);
    }
}
