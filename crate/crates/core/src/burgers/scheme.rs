//! Finite-volume update for `u_t + (u^2/2)_z = eps u_zz`.
//!
//! Advection: piecewise-linear (minmod-limited) reconstruction, local
//! Lax–Friedrichs interface flux, two-stage SSP Runge–Kutta in time.
//! Viscosity: Crank–Nicolson on the three-point Laplacian with homogeneous
//! Neumann closure, solved directly as a tridiagonal system.

use super::{Cells, GHOST};
use crate::error::{Error, Result};

#[inline]
fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

#[inline]
fn burgers_flux(u: f64) -> f64 {
    0.5 * u * u
}

#[inline]
fn llf(left: f64, right: f64) -> f64 {
    let speed = left.abs().max(right.abs());
    0.5 * (burgers_flux(left) + burgers_flux(right)) - 0.5 * speed * (right - left)
}

/// `Delta t = c dz / max |u|` over interior cells.
pub fn cfl_dt(u: &Cells, dz: f64, c: f64) -> Result<f64> {
    let peak = u.interior().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(peak > 0.0) {
        return Err(Error::ZeroState);
    }
    Ok(c * dz / peak)
}

/// Switches for the individual parts of a step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParts {
    pub advection: bool,
    pub viscosity: bool,
}

impl Default for StepParts {
    fn default() -> Self {
        Self { advection: true, viscosity: true }
    }
}

/// Scratch space for [`FvStepper::step`]; sized to one grid.
#[derive(Debug, Clone, Default)]
pub struct FvStepper {
    slopes: Vec<f64>,
    flux: Vec<f64>,
    stage: Vec<f64>,
    next: Vec<f64>,
    rhs: Vec<f64>,
    sweep: Vec<f64>,
    /// Reciprocal pivots of the factored viscous matrix, valid for `cn_r`.
    pivots: Vec<f64>,
    cn_r: f64,
    parts: StepParts,
}

/// `out = base + dt * L(u)` on interior cells, with `L` the advective
/// operator. Ghosts of `u` must be filled.
fn advect_into(slopes: &mut [f64], flux: &mut [f64], u: &[f64], out: &mut [f64], dz: f64, dt: f64) {
    let total = u.len();
    let cells = total - 2 * GHOST;
    for j in 1..total - 1 {
        slopes[j] = minmod(u[j] - u[j - 1], u[j + 1] - u[j]);
    }
    // flux[j] is the flux through the right face of data cell j
    for j in GHOST - 1..GHOST + cells {
        let left = u[j] + 0.5 * slopes[j];
        let right = u[j + 1] - 0.5 * slopes[j + 1];
        flux[j] = llf(left, right);
    }
    let ratio = dt / dz;
    for j in GHOST..GHOST + cells {
        out[j] = u[j] - ratio * (flux[j] - flux[j - 1]);
    }
}

impl FvStepper {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_parts(parts: StepParts) -> Self {
        Self { parts, ..Self::default() }
    }

    fn reserve(&mut self, total: usize) {
        if self.stage.len() != total {
            self.slopes = vec![0.0; total];
            self.flux = vec![0.0; total];
            self.stage = vec![0.0; total];
            self.next = vec![0.0; total];
            self.rhs = vec![0.0; total];
            self.sweep = vec![0.0; total];
            self.pivots = vec![0.0; total];
            self.cn_r = f64::NAN;
        }
    }

    /// Crank–Nicolson diffusion step of length `dt`, in place.
    fn diffuse(&mut self, u: &mut [f64], dz: f64, dt: f64, epsilon: f64) {
        let cells = u.len() - 2 * GHOST;
        if cells < 2 {
            return;
        }
        let r = 0.5 * dt * epsilon / (dz * dz);
        let x = &mut u[GHOST..GHOST + cells];
        // Solve for the increment: (I - r L) d = 2 r L x, Neumann ends. A
        // discrete constant has L x = 0 and is left untouched bit for bit.
        let rhs = &mut self.rhs[..cells];
        rhs[0] = 2.0 * r * (x[1] - x[0]);
        for i in 1..cells - 1 {
            rhs[i] = 2.0 * r * (x[i - 1] - 2.0 * x[i] + x[i + 1]);
        }
        rhs[cells - 1] = 2.0 * r * (x[cells - 2] - x[cells - 1]);
        // Thomas algorithm; the off-diagonals are all -r. The factorization
        // only depends on r, which is the same for almost every step.
        if self.cn_r != r {
            let diag_at = |i: usize| if i == 0 || i == cells - 1 { 1.0 + r } else { 1.0 + 2.0 * r };
            let mut inv = 1.0 / diag_at(0);
            self.pivots[0] = inv;
            self.sweep[0] = -r * inv;
            for i in 1..cells {
                inv = 1.0 / (diag_at(i) + r * self.sweep[i - 1]);
                self.pivots[i] = inv;
                self.sweep[i] = -r * inv;
            }
            self.cn_r = r;
        }
        let sweep = &self.sweep[..cells];
        let pivots = &self.pivots[..cells];
        rhs[0] *= pivots[0];
        for i in 1..cells {
            rhs[i] = (rhs[i] + r * rhs[i - 1]) * pivots[i];
        }
        for i in (0..cells - 1).rev() {
            rhs[i] -= sweep[i] * rhs[i + 1];
        }
        for (xi, d) in x.iter_mut().zip(rhs.iter()) {
            *xi += d;
        }
    }

    /// Advances `u` by `dt` in place: Strang splitting with a half
    /// Crank–Nicolson viscous step on either side of an SSP-RK2 advection
    /// step.
    pub fn step(&mut self, u: &mut Cells, dz: f64, dt: f64, epsilon: f64) -> Result<()> {
        let total = u.data.len();
        self.reserve(total);
        let viscous = self.parts.viscosity && epsilon > 0.0;
        if viscous {
            self.diffuse(&mut u.data, dz, 0.5 * dt, epsilon);
        }
        if self.parts.advection {
            u.fill_ghosts();
            advect_into(&mut self.slopes, &mut self.flux, &u.data, &mut self.stage, dz, dt);
            fill_ghosts(&mut self.stage);
            advect_into(&mut self.slopes, &mut self.flux, &self.stage, &mut self.next, dz, dt);
            for j in GHOST..total - GHOST {
                u.data[j] = 0.5 * (u.data[j] + self.next[j]);
            }
        }
        if viscous {
            self.diffuse(&mut u.data, dz, 0.5 * dt, epsilon);
        }
        u.fill_ghosts();
        if u.interior().iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { t: f64::NAN, cells: u.len() });
        }
        Ok(())
    }
}

/// Constant extrapolation into the two ghost cells at each end (outflow,
/// zero normal derivative).
pub(crate) fn fill_ghosts(data: &mut [f64]) {
    let n = data.len();
    let first = data[GHOST];
    let last = data[n - GHOST - 1];
    for g in 0..GHOST {
        data[g] = first;
        data[n - 1 - g] = last;
    }
}

/// One step of the scheme; see [`FvStepper::step`].
pub fn fv_step(u: &Cells, dz: f64, dt: f64, epsilon: f64) -> Result<Cells> {
    let mut next = u.clone();
    FvStepper::new().step(&mut next, dz, dt, epsilon)?;
    Ok(next)
}

/// Cell-wise total variation `sum |u_{i+1} - u_i|` over interior cells.
pub fn total_variation(u: &[f64]) -> f64 {
    u.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}
