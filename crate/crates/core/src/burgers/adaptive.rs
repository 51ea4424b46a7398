//! Grid-doubling control driven by a calibrated observation-error constant.

use serde::{Deserialize, Serialize};

use super::{BurgersParams, BurgersSolver, Grid1D};
use crate::error::{Error, Result};
use crate::ode::SolverResult;

/// Start and cap of the doubling sequence, and the error constant `C` in
/// the estimate `C dz^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSettings {
    pub n_start: usize,
    pub n_max: usize,
    pub error_constant: f64,
}

impl GridSettings {
    pub fn new(n_start: usize, n_max: usize, error_constant: f64) -> Result<Self> {
        Grid1D::new(n_start)?;
        Grid1D::new(n_max)?;
        if n_max < n_start {
            return Err(Error::InvalidArgument(format!("n_max {n_max} below n_start {n_start}")));
        }
        if !(error_constant >= 0.0) || !error_constant.is_finite() {
            return Err(Error::InvalidArgument(format!("bad error constant {error_constant}")));
        }
        Ok(Self { n_start, n_max, error_constant })
    }

    /// First grid in `n_start, 2 n_start, ..., n_max` whose estimate meets
    /// `tolerance`, or `n_max`. Returns `(cells, doublings, estimate, met)`.
    pub fn select(&self, tolerance: f64) -> (usize, u32, f64, bool) {
        let mut cells = self.n_start;
        let mut doublings = 0;
        loop {
            let dz = (Grid1D::Z_HI - Grid1D::Z_LO) / cells as f64;
            let estimate = self.error_constant * dz * dz;
            if estimate <= tolerance {
                return (cells, doublings, estimate, true);
            }
            if cells * 2 > self.n_max {
                return (cells, doublings, estimate, false);
            }
            cells *= 2;
            doublings += 1;
        }
    }
}

/// Output of [`adaptive_grid_solve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeSolverResult {
    pub u_at_obs: Vec<f64>,
    pub k0_hat: f64,
    pub n_used: usize,
    pub n_doublings: u32,
    pub tolerance_met: bool,
    pub steps: usize,
}

impl From<PdeSolverResult> for SolverResult {
    fn from(r: PdeSolverResult) -> Self {
        SolverResult {
            values: r.u_at_obs,
            k0_hat: r.k0_hat,
            h_used: (Grid1D::Z_HI - Grid1D::Z_LO) / r.n_used as f64,
            n_halvings: r.n_doublings,
            tolerance_met: r.tolerance_met,
            steps: r.steps,
        }
    }
}

impl BurgersSolver {
    /// See [`adaptive_grid_solve`].
    pub fn solve_adaptive(
        &mut self,
        params: &BurgersParams,
        z1: f64,
        obs_times: &[f64],
        tolerance: f64,
        settings: &GridSettings,
    ) -> Result<PdeSolverResult> {
        if !(tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tolerance}")));
        }
        // The estimate depends on the grid alone, so the doubling loop can
        // be run ahead of time and only the accepted grid solved.
        let (cells, n_doublings, k0_hat, tolerance_met) = settings.select(tolerance);
        let sol = self.solve(params, &Grid1D::new(cells)?, z1, obs_times, None)?;
        let steps = sol.steps();
        Ok(PdeSolverResult { u_at_obs: sol.values, k0_hat, n_used: cells, n_doublings, tolerance_met, steps })
    }
}

/// Solves on the coarsest grid of the doubling sequence whose estimated
/// observation error `C dz^2` is within `tolerance`. If none is, solves on
/// `n_max` and flags the tolerance as unmet.
pub fn adaptive_grid_solve(
    params: &BurgersParams,
    z1: f64,
    obs_times: &[f64],
    tolerance: f64,
    settings: &GridSettings,
) -> Result<PdeSolverResult> {
    BurgersSolver::default().solve_adaptive(params, z1, obs_times, tolerance, settings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn riemann() -> BurgersParams {
        BurgersParams::new(2.0, 1.0, 1.0, 0.05)
    }

    #[test]
    fn huge_tolerance_stays_on_start_grid() {
        let s = GridSettings::new(128, 512, 1.0).unwrap();
        let r = adaptive_grid_solve(&riemann(), 2.0, &[0.0, 0.5], 1e3, &s).unwrap();
        assert_eq!((r.n_used, r.n_doublings, r.tolerance_met), (128, 0, true));
    }

    #[test]
    fn exhaustion_is_flagged() {
        let s = GridSettings::new(128, 512, 1.0).unwrap();
        let r = adaptive_grid_solve(&riemann(), 2.0, &[0.5], 1e-12, &s).unwrap();
        assert_eq!((r.n_used, r.n_doublings, r.tolerance_met), (512, 2, false));
    }

    #[test]
    fn picks_first_passing_grid() {
        // C dz^2 at 128, 256, 512 is 9.8e-4, 2.4e-4, 6.1e-5
        let s = GridSettings::new(128, 512, 1.0).unwrap();
        assert_eq!(s.select(3e-4).0, 256);
        assert_eq!(s.select(1e-4).0, 512);
    }

    #[test]
    fn matches_fixed_grid_solve() {
        let s = GridSettings::new(64, 256, 1.0).unwrap();
        let r = adaptive_grid_solve(&riemann(), 2.0, &[0.0, 0.3], 1e-3, &s).unwrap();
        let fixed = super::super::solve_burgers(&riemann(), &Grid1D::new(r.n_used).unwrap(), 2.0, &[0.0, 0.3]).unwrap();
        assert_eq!(r.u_at_obs, fixed.values);
    }
}
