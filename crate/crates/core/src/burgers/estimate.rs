//! A-posteriori quantities for the Burgers solver: residual norm, the
//! Cockburn-type L1 bound, comparisons against the Cole–Hopf solution, and
//! calibration of the observation-point error constant.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{total_variation, BurgersParams, BurgersSolver, Grid1D, History};
use crate::error::{Error, Result};
use crate::oracles::burgers_exact;

// Gauss–Legendre, five points on [-1, 1].
const GL_X: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL_W: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

fn gauss<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, pieces: usize) -> f64 {
    let w = (b - a) / pieces as f64;
    let mut sum = 0.0;
    for p in 0..pieces {
        let mid = a + (p as f64 + 0.5) * w;
        for (x, g) in GL_X.iter().zip(GL_W) {
            sum += g * f(mid + 0.5 * w * x);
        }
    }
    0.5 * w * sum
}

fn check_history(history: &History, grid: &Grid1D) -> Result<()> {
    if history.len() < 2 {
        return Err(Error::ShortHistory { needed: 2, got: history.len() });
    }
    if let Some(bad) = history.states.iter().find(|s| s.len() != grid.cells()) {
        return Err(Error::DimensionMismatch { expected: grid.cells(), got: bad.len() });
    }
    Ok(())
}

/// `u u_z - eps u_zz` per cell: centred differences inside, one-sided first
/// derivative at the two end cells, Neumann closure for the second.
fn spatial_part(u: &[f64], dz: f64, epsilon: f64, out: &mut [f64]) {
    let n = u.len();
    for i in 0..n {
        let left = if i == 0 { u[0] } else { u[i - 1] };
        let right = if i + 1 == n { u[n - 1] } else { u[i + 1] };
        let ux = if i == 0 || i + 1 == n { (right - left) / dz } else { (right - left) / (2.0 * dz) };
        let uxx = (left - 2.0 * u[i] + right) / (dz * dz);
        out[i] = u[i] * ux - epsilon * uxx;
    }
}

/// L1 norm over `(0, t_final) x I` of the residual
/// `u_t + u u_z - eps u_zz` of the stored history.
///
/// Time derivative: forward difference between consecutive levels; the
/// spatial part is averaged over the two levels. Only intervals ending at or
/// before `t_final` contribute.
pub fn residue_l1(history: &History, grid: &Grid1D, epsilon: f64, t_final: f64) -> Result<f64> {
    check_history(history, grid)?;
    let dz = grid.dz();
    let n = grid.cells();
    let mut prev = vec![0.0; n];
    let mut next = vec![0.0; n];
    spatial_part(&history.states[0], dz, epsilon, &mut prev);
    let mut total = 0.0;
    for k in 0..history.len() - 1 {
        let (t0, t1) = (history.times[k], history.times[k + 1]);
        if t1 > t_final {
            break;
        }
        let dt = t1 - t0;
        if dt <= 0.0 {
            continue;
        }
        let (a, b) = (&history.states[k], &history.states[k + 1]);
        spatial_part(b, dz, epsilon, &mut next);
        let level: f64 = (0..n).map(|i| ((b[i] - a[i]) / dt + 0.5 * (prev[i] + next[i])).abs()).sum();
        total += level * dz * dt;
        std::mem::swap(&mut prev, &mut next);
    }
    Ok(total)
}

/// Exact L1 distance between piecewise-constant cell values and the step
/// initial condition.
fn initial_mismatch(u: &[f64], grid: &Grid1D, params: &BurgersParams) -> f64 {
    (0..grid.cells())
        .map(|i| {
            let (a, b) = grid.edges(i);
            let split = params.z0.clamp(a, b);
            (u[i] - params.u_left).abs() * (split - a) + (u[i] - params.u_right).abs() * (b - split)
        })
        .sum()
}

/// Cockburn-type bound on `||u_h(t_final) - v(t_final)||_L1`:
/// `||u_h(0) - v0||_L1 + ||R_h||_L1 + C sqrt(eps)` with
/// `C^2 = 8 max_t TV(u_h) * int TV(u_h) dt`.
///
/// Time norms use the stored levels as a left-endpoint piecewise-constant
/// function of time.
pub fn cockburn_phi(history: &History, params: &BurgersParams, grid: &Grid1D, t_final: f64) -> Result<f64> {
    check_history(history, grid)?;
    let initial = initial_mismatch(&history.states[0], grid, params);
    let residue = residue_l1(history, grid, params.epsilon, t_final)?;
    let mut tv_max = 0.0f64;
    let mut tv_int = 0.0;
    for k in 0..history.len() {
        if history.times[k] > t_final {
            break;
        }
        let tv = total_variation(&history.states[k]);
        tv_max = tv_max.max(tv);
        if k + 1 < history.len() && history.times[k + 1] <= t_final {
            tv_int += tv * (history.times[k + 1] - history.times[k]);
        }
    }
    let c = (8.0 * tv_max * tv_int).sqrt();
    Ok(initial + residue + c * params.epsilon.sqrt())
}

/// `||u_h(t) - v(t)||_L1` with `u_h` piecewise constant and `v` the
/// Cole–Hopf solution. Exact at `t = 0`.
pub fn l1_error_vs_exact(u: &[f64], grid: &Grid1D, params: &BurgersParams, t: f64) -> Result<f64> {
    if u.len() != grid.cells() {
        return Err(Error::DimensionMismatch { expected: grid.cells(), got: u.len() });
    }
    if t <= 0.0 {
        return Ok(initial_mismatch(u, grid, params));
    }
    Ok((0..grid.cells())
        .map(|i| {
            let (a, b) = grid.edges(i);
            gauss(&|z| (u[i] - burgers_exact(z, t, params)).abs(), a, b, 8)
        })
        .sum())
}

/// `sum_i |u_i - vbar_i| dz` where `vbar_i` is the exact Cole–Hopf cell
/// average. This is the norm in which the scheme is second order.
pub fn cell_average_error(u: &[f64], grid: &Grid1D, params: &BurgersParams, t: f64) -> Result<f64> {
    if u.len() != grid.cells() {
        return Err(Error::DimensionMismatch { expected: grid.cells(), got: u.len() });
    }
    let dz = grid.dz();
    Ok((0..grid.cells())
        .map(|i| {
            let (a, b) = grid.edges(i);
            let avg = if t <= 0.0 {
                params.initial_average(a, b)
            } else {
                gauss(&|z| burgers_exact(z, t, params), a, b, 4) / dz
            };
            (u[i] - avg).abs() * dz
        })
        .sum())
}

/// Least-squares slope through the origin of `r - 1` against `x`.
pub fn fit_ratio(x: &[f64], r: &[f64]) -> Result<f64> {
    if x.len() != r.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: r.len() });
    }
    if x.len() < 2 {
        return Err(Error::DegenerateFit(format!("need at least 2 grids, got {}", x.len())));
    }
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    if !(sxx > 0.0) || !sxx.is_finite() {
        return Err(Error::DegenerateFit("abscissae are all zero".into()));
    }
    let sxy: f64 = x.iter().zip(r).map(|(a, b)| a * (b - 1.0)).sum();
    Ok(sxy / sxx)
}

/// Which grid quantity plays `h^2` in the ratio fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioAbscissa {
    /// `h = 1 / dz`.
    InverseSpacing,
    /// `h = dz`.
    Spacing,
}

impl RatioAbscissa {
    fn value(self, dz: f64) -> f64 {
        match self {
            Self::InverseSpacing => 1.0 / (dz * dz),
            Self::Spacing => dz * dz,
        }
    }
}

/// Per-grid results of a calibration solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationLevel {
    pub cells: usize,
    pub dz: f64,
    /// Largest `|u_h(z1, t_j) - v(z1, t_j)|` over the observation times.
    pub max_obs_error: f64,
    /// `max_obs_error / dz^2`.
    pub obs_constant: f64,
    /// Bound and true L1 error at the final time.
    pub phi: f64,
    pub l1_error: f64,
    pub ratio: f64,
}

/// Observation-point error constant for the grid-doubling controller, plus
/// the bound-to-error ratio fits. Serialized as a JSON sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub params: BurgersParams,
    pub z1: f64,
    pub obs_times: Vec<f64>,
    pub levels: Vec<CalibrationLevel>,
    /// Largest `obs_constant` over the levels; the controller's error
    /// estimate is this times `dz^2`.
    pub error_constant: f64,
    pub ratio_k0_inverse_spacing: f64,
    pub ratio_k0_spacing: f64,
}

impl Calibration {
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn error_estimate(&self, dz: f64) -> f64 {
        self.error_constant * dz * dz
    }
}

fn solve_level(
    solver: &mut BurgersSolver,
    params: &BurgersParams,
    cells: usize,
    z1: f64,
    obs_times: &[f64],
) -> Result<CalibrationLevel> {
    let grid = Grid1D::new(cells)?;
    let t_final = obs_times.iter().copied().fold(0.0, f64::max);
    if !(t_final > 0.0) {
        return Err(Error::InvalidArgument("calibration needs a positive observation time".into()));
    }
    let mut history = History::default();
    let sol = solver.solve(params, &grid, z1, obs_times, Some(&mut history))?;
    let max_obs_error = obs_times
        .iter()
        .zip(&sol.values)
        .map(|(&t, u)| (u - burgers_exact(z1, t, params)).abs())
        .fold(0.0, f64::max);
    let phi = cockburn_phi(&history, params, &grid, t_final)?;
    let l1_error = l1_error_vs_exact(sol.state.interior(), &grid, params, t_final)?;
    let dz = grid.dz();
    Ok(CalibrationLevel {
        cells,
        dz,
        max_obs_error,
        obs_constant: max_obs_error / (dz * dz),
        phi,
        l1_error,
        ratio: phi / l1_error,
    })
}

/// Fitted constant of `r = 1 + K0 h^2` with `r = Phi / ||u_h - v||_L1` at
/// `t_final`, one solve per grid.
pub fn estimate_k0_via_ratio(
    params: &BurgersParams,
    grids: &[usize],
    t_final: f64,
    abscissa: RatioAbscissa,
) -> Result<f64> {
    if grids.len() < 2 {
        return Err(Error::DegenerateFit(format!("need at least 2 grids, got {}", grids.len())));
    }
    let mut solver = BurgersSolver::default();
    let mut x = Vec::with_capacity(grids.len());
    let mut r = Vec::with_capacity(grids.len());
    for &cells in grids {
        let level = solve_level(&mut solver, params, cells, 2.0, &[t_final])?;
        x.push(abscissa.value(level.dz));
        r.push(level.ratio);
    }
    fit_ratio(&x, &r)
}

/// Solves on each grid at `params` and records the observation-point error
/// constant used by [`adaptive_grid_solve`](super::adaptive_grid_solve).
pub fn calibrate(params: &BurgersParams, z1: f64, obs_times: &[f64], grids: &[usize]) -> Result<Calibration> {
    if grids.len() < 2 {
        return Err(Error::DegenerateFit(format!("need at least 2 grids, got {}", grids.len())));
    }
    let mut solver = BurgersSolver::default();
    let levels = grids
        .iter()
        .map(|&cells| solve_level(&mut solver, params, cells, z1, obs_times))
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = levels.iter().map(|l| l.ratio).collect();
    let fit = |a: RatioAbscissa| {
        let x: Vec<f64> = levels.iter().map(|l| a.value(l.dz)).collect();
        fit_ratio(&x, &ratios)
    };
    Ok(Calibration {
        params: *params,
        z1,
        obs_times: obs_times.to_vec(),
        error_constant: levels.iter().map(|l| l.obs_constant).fold(0.0, f64::max),
        ratio_k0_inverse_spacing: fit(RatioAbscissa::InverseSpacing)?,
        ratio_k0_spacing: fit(RatioAbscissa::Spacing)?,
        levels,
    })
}
