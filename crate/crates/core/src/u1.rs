//! Forward-time solver for `u1 = ln a` on the volatility line:
//!
//! ```text
//! ∂u/∂t = (k²x²/2) ∂²u/∂x² + g₁(x) ∂u/∂x − k²(ρ² − ½) x² (∂u/∂x)² − f(x)²,   u(0, ·) = 0
//! ```
//!
//! Backward Euler in time. The quadratic gradient term is Picard-linearized
//! by lagging one gradient factor, so each pass is a single tridiagonal
//! solve; the lagged factor is folded into the convection velocity and the
//! whole transport term is discretized monotonically. At `x = 0` every
//! spatial coefficient vanishes and the node follows `∂u/∂t = −f(0)²`
//! exactly. The far edge `x = x_max` is a homogeneous Neumann closure.

use crate::error::{Equation, Error, Result};
use crate::grid::{Field1D, Grid1D};
use crate::linalg::solve_tridiagonal;
use crate::model::ModelParams;
use crate::scheme::convection_diffusion;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardSettings {
    /// Stop once the max-norm change between passes drops below
    /// `tol * max(1, ‖u‖∞)`.
    pub tol: f64,
    pub max_passes: usize,
}

impl Default for PicardSettings {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_passes: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct U1Step {
    pub field: Field1D,
    /// Tridiagonal solves spent on this step.
    pub passes: usize,
}

/// Coefficient of `(∂u/∂x)²` per unit `x²`: `k²(ρ² − ½)`, snapped to zero
/// when `ρ²` equals one half up to rounding.
pub fn quadratic_coefficient(params: &ModelParams) -> f64 {
    let excess = params.rho * params.rho - 0.5;
    if excess.abs() <= 4.0 * f64::EPSILON {
        0.0
    } else {
        params.k * params.k * excess
    }
}

pub fn step_u1(u_prev: &Field1D, dt: f64, params: &ModelParams) -> Result<U1Step> {
    step_u1_with(u_prev, dt, params, PicardSettings::default())
}

pub fn step_u1_with(
    u_prev: &Field1D,
    dt: f64,
    params: &ModelParams,
    settings: PicardSettings,
) -> Result<U1Step> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("must be > 0, got {dt}"),
        });
    }
    if !u_prev.all_finite() {
        return Err(Error::NonFinite("previous u1 field"));
    }
    let grid = u_prev.grid;
    let n = grid.len();
    let h = grid.spacing();
    let q = quadratic_coefficient(params);
    let xs = grid.nodes();
    let f2: Vec<f64> = xs.iter().map(|&x| params.f(x).powi(2)).collect();

    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut iterate = u_prev.values.clone();
    let mut last_update = f64::INFINITY;

    for pass in 1..=settings.max_passes {
        // Increment form: (I + dt L) δ = −dt (L u_prev + f²), with L applied
        // to u_prev through differences so constants give exactly zero.
        let prev = &u_prev.values;
        let mut rhs = vec![0.0; n];
        diag[0] = 1.0;
        upper[0] = 0.0;
        rhs[0] = -dt * f2[0];
        for i in 1..n - 1 {
            let x = xs[i];
            let lagged_gradient = (iterate[i + 1] - iterate[i - 1]) / (2.0 * h);
            let velocity = params.g1(x) - q * x * x * lagged_gradient;
            let row = convection_diffusion(0.5 * params.k * params.k * x * x, velocity, h);
            lower[i] = dt * row.lower;
            diag[i] = 1.0 + dt * row.center;
            upper[i] = dt * row.upper;
            let applied = row.lower * (prev[i - 1] - prev[i]) + row.upper * (prev[i + 1] - prev[i]);
            rhs[i] = -dt * (applied + f2[i]);
        }
        lower[n - 1] = -1.0;
        diag[n - 1] = 1.0;
        rhs[n - 1] = prev[n - 2] - prev[n - 1];
        solve_tridiagonal(&lower, &diag, &upper, &mut rhs)?;
        for (d, p) in rhs.iter_mut().zip(prev) {
            *d += p;
        }
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("u1 step"));
        }

        let update = rhs
            .iter()
            .zip(&iterate)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let scale = rhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        iterate = rhs;
        last_update = update;
        if q == 0.0 || update <= settings.tol * scale {
            return Ok(U1Step {
                field: Field1D {
                    grid,
                    t: u_prev.t + dt,
                    values: iterate,
                },
                passes: pass,
            });
        }
    }
    Err(Error::PicardDiverged {
        iterations: settings.max_passes,
        residual: last_update,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct U1Trajectory {
    /// Fields at `t_n = n T / N`, `n = 0..=N`.
    pub fields: Vec<Field1D>,
    /// Picard passes per step (`len = N`).
    pub passes: Vec<usize>,
}

impl U1Trajectory {
    pub fn last(&self) -> &Field1D {
        self.fields.last().expect("trajectory holds the initial field")
    }
}

/// Time stamp of step `n` out of `n_steps` over `[0, maturity]`.
pub(crate) fn time_of(n: usize, n_steps: usize, maturity: f64) -> f64 {
    if n == n_steps {
        maturity
    } else {
        maturity * n as f64 / n_steps as f64
    }
}

pub fn solve_u1(params: &ModelParams, grid: Grid1D, n_steps: usize) -> Result<U1Trajectory> {
    params.validate()?;
    if n_steps == 0 {
        return Err(Error::InvalidParameter {
            name: "n_steps",
            reason: "need at least one time step".into(),
        });
    }
    let dt = params.maturity / n_steps as f64;
    let mut fields = Vec::with_capacity(n_steps + 1);
    let mut passes = Vec::with_capacity(n_steps);
    fields.push(Field1D::zeros(grid, 0.0));
    for n in 1..=n_steps {
        let prev = fields.last().expect("non-empty");
        let mut step = step_u1(prev, dt, params).map_err(|e| e.at_step(n, Equation::LogA))?;
        step.field.t = time_of(n, n_steps, params.maturity);
        passes.push(step.passes);
        fields.push(step.field);
    }
    Ok(U1Trajectory { fields, passes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> Grid1D {
        Grid1D::new(1.0, 41).unwrap()
    }

    #[test]
    fn zero_drift_stays_zero() {
        let p = ModelParams {
            mu: 0.0,
            ..Default::default()
        };
        let traj = solve_u1(&p, small_grid(), 20).unwrap();
        assert!(traj.fields.iter().all(|f| f.values.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn linear_case_takes_one_pass() {
        let p = ModelParams::default().with_rho(0.5f64.sqrt());
        assert_eq!(quadratic_coefficient(&p), 0.0);
        let traj = solve_u1(&p, small_grid(), 10).unwrap();
        assert!(traj.passes.iter().all(|&m| m == 1));
    }

    #[test]
    fn constants_are_preserved_by_the_linear_part() {
        let p = ModelParams {
            mu: 0.0,
            ..ModelParams::default().with_rho(-(0.5f64.sqrt()))
        };
        let mut u = Field1D::from_fn(small_grid(), 0.0, |_| -3.25);
        for _ in 0..5 {
            u = step_u1(&u, 0.01, &p).unwrap().field;
            assert!(u.values.iter().all(|&v| v == -3.25));
        }
    }

    #[test]
    fn single_step_trajectory_is_composition() {
        let p = ModelParams::default();
        let g = small_grid();
        let traj = solve_u1(&p, g, 1).unwrap();
        assert_eq!(traj.fields.len(), 2);
        assert_eq!(traj.fields[0], Field1D::zeros(g, 0.0));
        let manual = step_u1(&Field1D::zeros(g, 0.0), 1.0, &p).unwrap().field;
        assert_eq!(traj.fields[1].values, manual.values);
        assert!(solve_u1(&p, g, 0).is_err());
    }

    #[test]
    fn origin_follows_the_exact_ode() {
        let p = ModelParams::default();
        let traj = solve_u1(&p, small_grid(), 8).unwrap();
        for f in &traj.fields {
            let exact = -f.t * (p.mu / p.sigma0).powi(2);
            assert!((f.values[0] - exact).abs() <= 1e-9 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_bad_step() {
        let f = Field1D::zeros(small_grid(), 0.0);
        assert!(step_u1(&f, 0.0, &ModelParams::default()).is_err());
        let mut bad = f.clone();
        bad.values[3] = f64::NAN;
        assert!(step_u1(&bad, 0.1, &ModelParams::default()).is_err());
    }
}
