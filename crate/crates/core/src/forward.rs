//! Forward maps of the two shipped problems, wired to their solvers.

use serde::{Deserialize, Serialize};

use crate::burgers::{BurgersParams, BurgersSolver, Grid1D, GridSettings};
use crate::error::{Error, Result};
use crate::model::ForwardEvaluator;
use crate::ode::{CashKarp, FnSystem, HalvingSettings, Observation, SolverResult};
use crate::oracles::LogisticParams;

/// How the logistic ODE is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum StepMode {
    /// One solve at step `h`; the tolerance is only compared, never acted on.
    Fixed { h: f64 },
    /// Step halving from `h_init` until the error estimate meets the
    /// tolerance.
    Adaptive { h_init: f64, max_halvings: u32 },
}

/// Logistic growth observed at fixed times; `theta = (r, K)`.
#[derive(Debug, Clone)]
pub struct LogisticForward {
    x0: f64,
    obs: Observation,
    t_end: f64,
    mode: StepMode,
    solver: CashKarp,
}

impl LogisticForward {
    pub fn new(x0: f64, times: Vec<f64>, mode: StepMode) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidArgument("no observation times".into()));
        }
        if times.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::InvalidArgument("observation times must be >= 0".into()));
        }
        let t_end = times.iter().copied().fold(0.0, f64::max);
        Ok(Self { x0, obs: Observation::new(times, 0), t_end, mode, solver: CashKarp::new() })
    }

    pub fn mode(&self) -> StepMode {
        self.mode
    }
}

impl ForwardEvaluator for LogisticForward {
    fn evaluate(&mut self, theta: &[f64], tolerance: f64) -> Result<SolverResult> {
        if theta.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: theta.len() });
        }
        let p = LogisticParams::new(theta[0], theta[1], self.x0);
        let sys = FnSystem::new(1, move |_t, u: &[f64], du: &mut [f64]| du[0] = p.rate(u[0]));
        let u0 = [self.x0];
        match self.mode {
            StepMode::Fixed { h } => {
                let mut r = self.solver.integrate_fixed(&sys, &u0, 0.0, self.t_end, h, &self.obs)?;
                r.tolerance_met = r.k0_hat <= tolerance;
                Ok(r)
            }
            StepMode::Adaptive { h_init, max_halvings } => self.solver.adaptive_solve(
                &sys,
                &u0,
                0.0,
                self.t_end,
                &self.obs,
                tolerance,
                HalvingSettings { h_init, max_halvings },
            ),
        }
    }

    fn order(&self) -> u32 {
        5
    }

    fn describe(&self) -> String {
        match self.mode {
            StepMode::Fixed { h } => format!("Cash-Karp, fixed h = {h}"),
            StepMode::Adaptive { h_init, max_halvings } => {
                format!("Cash-Karp, h halved from {h_init} (at most {max_halvings} times)")
            }
        }
    }
}

/// How the Burgers grid is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum GridMode {
    Fixed { cells: usize },
    Adaptive { n_start: usize, n_max: usize },
}

/// Viscous Burgers shock observed at `z1`; `theta = (u_L - u_R, z0)` with
/// `u_L` pinned.
#[derive(Debug, Clone)]
pub struct BurgersForward {
    u_left: f64,
    epsilon: f64,
    z1: f64,
    times: Vec<f64>,
    mode: GridMode,
    /// Calibrated `C` in the observation-error estimate `C dz^2`.
    error_constant: f64,
    solver: BurgersSolver,
}

impl BurgersForward {
    pub fn new(
        u_left: f64,
        epsilon: f64,
        z1: f64,
        times: Vec<f64>,
        mode: GridMode,
        error_constant: f64,
    ) -> Result<Self> {
        match mode {
            GridMode::Fixed { cells } => {
                Grid1D::new(cells)?;
            }
            GridMode::Adaptive { n_start, n_max } => {
                GridSettings::new(n_start, n_max, error_constant)?;
            }
        }
        if !(error_constant >= 0.0) {
            return Err(Error::InvalidArgument(format!("bad error constant {error_constant}")));
        }
        Ok(Self { u_left, epsilon, z1, times, mode, error_constant, solver: BurgersSolver::default() })
    }

    pub fn params(&self, theta: &[f64]) -> BurgersParams {
        BurgersParams::new(self.u_left, self.u_left - theta[0], theta[1], self.epsilon)
    }
}

impl ForwardEvaluator for BurgersForward {
    fn evaluate(&mut self, theta: &[f64], tolerance: f64) -> Result<SolverResult> {
        if theta.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: theta.len() });
        }
        let params = self.params(theta);
        match self.mode {
            GridMode::Fixed { cells } => {
                let grid = Grid1D::new(cells)?;
                let sol = self.solver.solve(&params, &grid, self.z1, &self.times, None)?;
                let k0_hat = self.error_constant * grid.dz() * grid.dz();
                Ok(SolverResult {
                    steps: sol.steps(),
                    values: sol.values,
                    k0_hat,
                    h_used: grid.dz(),
                    n_halvings: 0,
                    tolerance_met: k0_hat <= tolerance,
                })
            }
            GridMode::Adaptive { n_start, n_max } => {
                let settings = GridSettings::new(n_start, n_max, self.error_constant)?;
                Ok(self.solver.solve_adaptive(&params, self.z1, &self.times, tolerance, &settings)?.into())
            }
        }
    }

    fn order(&self) -> u32 {
        2
    }

    fn describe(&self) -> String {
        match self.mode {
            GridMode::Fixed { cells } => format!("finite volume, fixed N = {cells}"),
            GridMode::Adaptive { n_start, n_max } => format!("finite volume, N doubled from {n_start} up to {n_max}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{burgers_exact, logistic_exact};

    #[test]
    fn logistic_fixed_matches_oracle() {
        let times: Vec<f64> = (0..26).map(|i| i as f64 * 0.4).collect();
        let mut f = LogisticForward::new(100.0, times.clone(), StepMode::Fixed { h: 0.005 }).unwrap();
        let r = f.evaluate(&[1.0, 1000.0], 1.0).unwrap();
        let p = LogisticParams::new(1.0, 1000.0, 100.0);
        for (t, v) in times.iter().zip(&r.values) {
            assert!((v - logistic_exact(*t, &p)).abs() < 1e-8);
        }
        assert!(r.tolerance_met);
    }

    #[test]
    fn logistic_adaptive_meets_tolerance() {
        let mut f = LogisticForward::new(100.0, vec![0.0, 5.0, 10.0], StepMode::Adaptive { h_init: 0.1, max_halvings: 20 }).unwrap();
        let r = f.evaluate(&[1.0, 1000.0], 1e-6).unwrap();
        assert!(r.tolerance_met && r.k0_hat <= 1e-6);
        assert_eq!(r.values[0], 100.0);
    }

    #[test]
    fn burgers_parameterization() {
        let mut f = BurgersForward::new(2.0, 0.2, 2.0, vec![0.0, 0.5], GridMode::Fixed { cells: 256 }, 1.0).unwrap();
        let p = f.params(&[1.0, 1.0]);
        assert_eq!((p.u_left, p.u_right, p.z0), (2.0, 1.0, 1.0));
        let r = f.evaluate(&[1.0, 1.0], 1.0).unwrap();
        assert_eq!(r.values[0], 1.0);
        assert!((r.values[1] - burgers_exact(2.0, 0.5, &p)).abs() < 1e-3);
    }
}
