//! Finite-volume solver for the viscous Burgers Riemann problem on `[0, 4]`,
//! with a-posteriori error estimation and grid-doubling control.

mod adaptive;
mod estimate;
mod scheme;

use serde::{Deserialize, Serialize};

pub use adaptive::{adaptive_grid_solve, GridSettings, PdeSolverResult};
pub use estimate::{
    calibrate, cell_average_error, cockburn_phi, estimate_k0_via_ratio, fit_ratio, l1_error_vs_exact, residue_l1,
    Calibration, CalibrationLevel, RatioAbscissa,
};
pub use scheme::{cfl_dt, fv_step, total_variation, FvStepper, StepParts};

use crate::error::{Error, Result};
use crate::oracles::burgers_exact;

/// Ghost cells at each end of the grid.
pub const GHOST: usize = 2;
/// Courant number used by the time-step rule.
pub const DEFAULT_CFL: f64 = 0.1;

/// Riemann data and viscosity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurgersParams {
    pub u_left: f64,
    pub u_right: f64,
    /// Location of the initial discontinuity.
    pub z0: f64,
    pub epsilon: f64,
}

impl BurgersParams {
    pub fn new(u_left: f64, u_right: f64, z0: f64, epsilon: f64) -> Self {
        Self { u_left, u_right, z0, epsilon }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.u_left > self.u_right) {
            return Err(Error::InvalidArgument(format!(
                "shock data needs u_left > u_right, got {} and {}",
                self.u_left, self.u_right
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("viscosity must be positive, got {}", self.epsilon)));
        }
        if !self.z0.is_finite() {
            return Err(Error::InvalidArgument("z0 must be finite".into()));
        }
        Ok(())
    }

    /// The step initial condition.
    pub fn initial(&self, z: f64) -> f64 {
        burgers_exact(z, 0.0, self)
    }

    /// Exact average of the step over `[a, b]`.
    pub fn initial_average(&self, a: f64, b: f64) -> f64 {
        if b <= self.z0 {
            self.u_left
        } else if a >= self.z0 {
            self.u_right
        } else {
            (self.u_left * (self.z0 - a) + self.u_right * (b - self.z0)) / (b - a)
        }
    }
}

/// Uniform cell-centred grid on `[0, 4]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid1D {
    cells: usize,
}

impl Grid1D {
    pub const Z_LO: f64 = 0.0;
    pub const Z_HI: f64 = 4.0;

    /// `cells` must be a power of two, at least 4.
    pub fn new(cells: usize) -> Result<Self> {
        if cells < 4 || !cells.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("cell count must be a power of two >= 4, got {cells}")));
        }
        Ok(Self { cells })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn dz(&self) -> f64 {
        (Self::Z_HI - Self::Z_LO) / self.cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        Self::Z_LO + (i as f64 + 0.5) * self.dz()
    }

    pub fn edges(&self, i: usize) -> (f64, f64) {
        let dz = self.dz();
        (Self::Z_LO + i as f64 * dz, Self::Z_LO + (i + 1) as f64 * dz)
    }

    pub fn contains(&self, z: f64) -> bool {
        z > Self::Z_LO && z < Self::Z_HI
    }
}

/// Cell averages with [`GHOST`] ghost cells on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct Cells {
    pub(crate) data: Vec<f64>,
}

impl Cells {
    pub fn from_interior(values: Vec<f64>) -> Self {
        let mut data = vec![0.0; values.len() + 2 * GHOST];
        data[GHOST..GHOST + values.len()].copy_from_slice(&values);
        let mut c = Self { data };
        c.fill_ghosts();
        c
    }

    /// Exact cell averages of the step initial condition.
    pub fn riemann(params: &BurgersParams, grid: &Grid1D) -> Self {
        Self::from_interior(
            (0..grid.cells())
                .map(|i| {
                    let (a, b) = grid.edges(i);
                    params.initial_average(a, b)
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.data.len() - 2 * GHOST
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn interior(&self) -> &[f64] {
        &self.data[GHOST..self.data.len() - GHOST]
    }

    /// Full buffer including ghosts.
    pub fn raw(&self) -> &[f64] {
        &self.data
    }

    pub fn raw_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn fill_ghosts(&mut self) {
        scheme::fill_ghosts(&mut self.data);
    }

    /// Linear interpolation between cell centres; second-order accurate for
    /// point values.
    pub fn sample(&self, grid: &Grid1D, z: f64) -> f64 {
        let s = (z - Grid1D::Z_LO) / grid.dz() - 0.5;
        let cells = self.len() as f64;
        let s = s.clamp(-1.0, cells);
        let i = s.floor();
        let w = s - i;
        let j = (i as isize + GHOST as isize) as usize;
        if w == 0.0 {
            return self.data[j];
        }
        (1.0 - w) * self.data[j] + w * self.data[j + 1]
    }
}

/// Stored time levels of a solve, interior cells only.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct History {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl History {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn push(&mut self, t: f64, u: &Cells) {
        self.times.push(t);
        self.states.push(u.interior().to_vec());
    }

    /// Index of the last level with time `<= t`.
    pub fn level_at(&self, t: f64) -> Option<usize> {
        let k = self.times.partition_point(|&s| s <= t);
        k.checked_sub(1)
    }
}

/// Result of a single fixed-grid solve.
#[derive(Debug, Clone, PartialEq)]
pub struct BurgersSolution {
    /// `u(z1, t_j)` for each requested time, in request order.
    pub values: Vec<f64>,
    /// Every time level reached, starting at 0.
    pub march_times: Vec<f64>,
    pub cells: usize,
    pub dz: f64,
    /// Final state.
    pub state: Cells,
}

impl BurgersSolution {
    pub fn steps(&self) -> usize {
        self.march_times.len() - 1
    }
}

/// Fixed-grid marcher; owns its scratch buffers.
#[derive(Debug, Clone)]
pub struct BurgersSolver {
    stepper: FvStepper,
    cfl: f64,
}

impl Default for BurgersSolver {
    fn default() -> Self {
        Self::new(DEFAULT_CFL)
    }
}

/// Relative gap (in units of the CFL step) under which a step is stretched to
/// land on the next stop instead of leaving a sliver.
const SNAP: f64 = 1e-9;

impl BurgersSolver {
    pub fn new(cfl: f64) -> Self {
        Self { stepper: FvStepper::new(), cfl }
    }

    pub fn with_stepper(stepper: FvStepper, cfl: f64) -> Self {
        Self { stepper, cfl }
    }

    /// Marches the Riemann initial state to the last observation time and
    /// samples `u(z1, t_j)`. The time step follows the CFL rule and is cut
    /// short to land exactly on each observation time. Values at `t = 0` are
    /// read from the step initial condition itself.
    pub fn solve(
        &mut self,
        params: &BurgersParams,
        grid: &Grid1D,
        z1: f64,
        obs_times: &[f64],
        mut history: Option<&mut History>,
    ) -> Result<BurgersSolution> {
        params.validate()?;
        if !grid.contains(z1) {
            return Err(Error::InvalidArgument(format!("observation point {z1} outside (0, 4)")));
        }
        if obs_times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return Err(Error::InvalidArgument("observation times must be finite and >= 0".into()));
        }
        let mut order: Vec<usize> = (0..obs_times.len()).collect();
        order.sort_by(|&a, &b| obs_times[a].total_cmp(&obs_times[b]));

        let dz = grid.dz();
        let mut u = Cells::riemann(params, grid);
        let mut t = 0.0;
        let mut march_times = vec![0.0];
        if let Some(h) = history.as_deref_mut() {
            h.push(t, &u);
        }
        let mut values = vec![f64::NAN; obs_times.len()];
        for &k in &order {
            let target = obs_times[k];
            while t < target {
                let dt_cfl = cfl_dt(&u, dz, self.cfl)?;
                let (dt, next) = if t + dt_cfl >= target - SNAP * dt_cfl {
                    (target - t, target)
                } else {
                    (dt_cfl, t + dt_cfl)
                };
                self.stepper.step(&mut u, dz, dt, params.epsilon).map_err(|e| match e {
                    Error::BlowUp { cells, .. } => Error::BlowUp { t, cells },
                    other => other,
                })?;
                t = next;
                march_times.push(t);
                if let Some(h) = history.as_deref_mut() {
                    h.push(t, &u);
                }
            }
            values[k] = if target == 0.0 { params.initial(z1) } else { u.sample(grid, z1) };
        }
        Ok(BurgersSolution { values, march_times, cells: grid.cells(), dz, state: u })
    }
}

/// Single fixed-grid solve; see [`BurgersSolver::solve`].
pub fn solve_burgers(
    params: &BurgersParams,
    grid: &Grid1D,
    z1: f64,
    obs_times: &[f64],
) -> Result<BurgersSolution> {
    BurgersSolver::default().solve(params, grid, z1, obs_times, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn riemann() -> BurgersParams {
        BurgersParams::new(2.0, 1.0, 1.0, 0.05)
    }

    #[test]
    fn grid_rules() {
        assert!(Grid1D::new(100).is_err());
        assert!(Grid1D::new(2).is_err());
        let g = Grid1D::new(128).unwrap();
        assert_eq!(g.dz(), 0.031_25);
        assert_eq!(g.center(0), 0.015_625);
    }

    #[test]
    fn initial_cell_holding_the_jump_gets_exact_average() {
        let p = BurgersParams::new(2.0, 1.0, 1.01, 0.05);
        let g = Grid1D::new(128).unwrap();
        let u = Cells::riemann(&p, &g);
        let i = (1.01 / g.dz()).floor() as usize;
        let (a, b) = g.edges(i);
        let want = (2.0 * (1.01 - a) + (b - 1.01)) / g.dz();
        assert!((u.interior()[i] - want).abs() < 1e-14);
        assert_eq!(u.interior()[i - 1], 2.0);
        assert_eq!(u.interior()[i + 1], 1.0);
    }

    #[test]
    fn sampling_is_exact_for_linear_data() {
        let g = Grid1D::new(16).unwrap();
        let u = Cells::from_interior((0..16).map(|i| 3.0 * g.center(i) - 1.0).collect());
        for &z in &[0.2, 1.0, 2.0, 3.3, 3.7] {
            assert!((u.sample(&g, z) - (3.0 * z - 1.0)).abs() < 1e-13, "z = {z}");
        }
    }

    #[test]
    fn observation_at_time_zero() {
        let r = solve_burgers(&riemann(), &Grid1D::new(128).unwrap(), 2.0, &[0.0]).unwrap();
        assert_eq!(r.values, vec![1.0]);
        assert_eq!(r.steps(), 0);
    }

    #[test]
    fn observation_times_are_hit_exactly() {
        let times = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
        let r = solve_burgers(&riemann(), &Grid1D::new(128).unwrap(), 2.0, &times).unwrap();
        for t in times {
            assert!(r.march_times.contains(&t), "missing {t}");
        }
        assert_eq!(*r.march_times.last().unwrap(), 0.5);
    }

    #[test]
    fn deterministic() {
        let times = [0.0, 0.25, 0.5];
        let g = Grid1D::new(128).unwrap();
        let a = solve_burgers(&riemann(), &g, 2.0, &times).unwrap();
        let b = solve_burgers(&riemann(), &g, 2.0, &times).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_setup() {
        let g = Grid1D::new(128).unwrap();
        assert!(solve_burgers(&riemann(), &g, 4.5, &[0.1]).is_err());
        assert!(solve_burgers(&riemann(), &g, 2.0, &[-0.1]).is_err());
        let rare = BurgersParams::new(1.0, 2.0, 1.0, 0.05);
        assert!(solve_burgers(&rare, &g, 2.0, &[0.1]).is_err());
    }
}
