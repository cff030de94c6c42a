//! The coupled march: `u1 = ln a` on the volatility line, then `u2 = b` and
//! `u3 = c` on the `(x, z = ln P)` plane. In log-price the two linear
//! equations read
//!
//! ```text
//! ∂u2/∂t = (k²x²/2) u2_xx + (x²/2) u2_zz + ρk x² u2_xz + [g₂ + (1−ρ²)k²x² ∂u1/∂x] u2_x − (x²/2) u2_z
//! ∂u3/∂t = (k²x²/2) u3_xx + (x²/2) u3_zz + ρk x² u3_xz + g u3_x + (x f − x²/2) u3_z
//!          + (1−ρ²)k²x² e^{u1} (u2_x)²
//! ```
//!
//! Each step is backward Euler on the 5-point part (diffusion and
//! convection in both directions) with the mixed derivative and the `c`
//! source taken explicitly. Closures: `x = 0` frozen (all coefficients
//! vanish there), homogeneous Neumann at `x_max`, zero second difference
//! in `z` at both ends of the log-price window.

use crate::error::{Equation, Error, Result};
use crate::grid::{cross_diff, Field1D, Field2D, Grid2D};
use crate::linalg::{bicgstab, KrylovReport, KrylovSettings, LinearOperator};
use crate::model::{ModelParams, Payoff};
use crate::scheme::convection_diffusion;
use crate::u1::{step_u1, time_of};

/// Implicit 5-point coefficients of the spatial operator `L` (so that the
/// step matrix is `I + dt L`), one set per `x` row since no coefficient
/// depends on `z`, plus the explicit cross-derivative weight.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorStencil {
    pub center: Vec<f64>,
    pub west: Vec<f64>,
    pub east: Vec<f64>,
    pub south: Vec<f64>,
    pub north: Vec<f64>,
    /// `ρ k x²`.
    pub cross: Vec<f64>,
    pub velocity_x: Vec<f64>,
    pub velocity_z: Vec<f64>,
}

impl OperatorStencil {
    /// Assembles the stencil from per-row velocities; the diffusions are
    /// always `k²x²/2` in `x` and `x²/2` in `z`.
    pub fn assemble(params: &ModelParams, grid: &Grid2D, velocity_x: Vec<f64>, velocity_z: Vec<f64>) -> Self {
        let nx = grid.nx();
        let (hx, hz) = (grid.hx(), grid.hz());
        let k2 = params.k * params.k;
        let mut s = Self {
            center: vec![0.0; nx],
            west: vec![0.0; nx],
            east: vec![0.0; nx],
            south: vec![0.0; nx],
            north: vec![0.0; nx],
            cross: vec![0.0; nx],
            velocity_x,
            velocity_z,
        };
        for i in 0..nx {
            let x = grid.x().node(i);
            let rx = convection_diffusion(0.5 * k2 * x * x, s.velocity_x[i], hx);
            let rz = convection_diffusion(0.5 * x * x, s.velocity_z[i], hz);
            s.west[i] = rx.lower;
            s.east[i] = rx.upper;
            s.south[i] = rz.lower;
            s.north[i] = rz.upper;
            s.center[i] = rx.center + rz.center;
            s.cross[i] = params.rho * params.k * x * x;
        }
        s
    }

    /// Operator of the `b` equation, with the coupling velocity built from
    /// the freshly computed `u1`.
    pub fn for_b(params: &ModelParams, grid: &Grid2D, u1_next: &Field1D) -> Self {
        let nx = grid.nx();
        let h = grid.hx();
        let k2 = params.k * params.k;
        let decor = params.decorrelation();
        let u1 = &u1_next.values;
        let vx = (0..nx)
            .map(|i| {
                let x = grid.x().node(i);
                let grad = if i > 0 && i + 1 < nx {
                    (u1[i + 1] - u1[i - 1]) / (2.0 * h)
                } else {
                    0.0
                };
                params.g2(x) + decor * k2 * x * x * grad
            })
            .collect();
        let vz = (0..nx)
            .map(|i| {
                let x = grid.x().node(i);
                -0.5 * x * x
            })
            .collect();
        Self::assemble(params, grid, vx, vz)
    }

    /// Operator of the `c` equation; independent of time.
    pub fn for_c(params: &ModelParams, grid: &Grid2D) -> Self {
        let xs = grid.x().nodes();
        let vx = xs.iter().map(|&x| params.g(x)).collect();
        let vz = xs.iter().map(|&x| params.x_f(x) - 0.5 * x * x).collect();
        Self::assemble(params, grid, vx, vz)
    }

    /// Implicit off-diagonals nonpositive, diagonal of `I + dt L` positive and
    /// dominant.
    pub fn is_m_matrix(&self) -> bool {
        (0..self.center.len()).all(|i| {
            let off = [self.west[i], self.east[i], self.south[i], self.north[i]];
            off.iter().all(|&c| c <= 0.0)
                && self.center[i] + 1e-12 * self.center[i].abs() >= -off.iter().sum::<f64>()
        })
    }

    /// `L u` at an interior node, written through differences so that it
    /// vanishes exactly on constants.
    #[inline]
    fn apply_at(&self, u: &Field2D, i: usize, j: usize) -> f64 {
        let c = u.at(i, j);
        self.west[i] * (u.at(i - 1, j) - c)
            + self.east[i] * (u.at(i + 1, j) - c)
            + self.south[i] * (u.at(i, j - 1) - c)
            + self.north[i] * (u.at(i, j + 1) - c)
    }
}

/// Closure at `x = x_max`.
#[derive(Debug, Clone, PartialEq)]
pub enum FarEdge {
    /// `u(x_max) = u(x_max − h)`.
    Neumann,
    /// Prescribed values along `z` at the new time level.
    Dirichlet(Vec<f64>),
}

/// Boundary closures of one step. The `z` closures ask for a zero second
/// difference along each `x` row unless a target value (one per row, `x`
/// index order) is supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct Edges {
    pub far: FarEdge,
    pub z_low: Option<Vec<f64>>,
    pub z_high: Option<Vec<f64>>,
}

impl Default for Edges {
    fn default() -> Self {
        Self {
            far: FarEdge::Neumann,
            z_low: None,
            z_high: None,
        }
    }
}

struct StepMatrix<'a> {
    stencil: &'a OperatorStencil,
    nx: usize,
    nz: usize,
    dt: f64,
    neumann: bool,
}

/// Second difference along a boundary line read inward, written so that it
/// vanishes exactly on constants.
#[inline]
fn closure(u0: f64, u1: f64, u2: f64) -> f64 {
    (u0 - u1) + (u2 - u1)
}

impl LinearOperator for StepMatrix<'_> {
    fn dim(&self) -> usize {
        self.nx * self.nz
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let (nx, nz, dt) = (self.nx, self.nz, self.dt);
        let s = self.stencil;
        y[..nz].copy_from_slice(&x[..nz]);
        for i in 1..nx - 1 {
            let r = i * nz;
            y[r] = closure(x[r], x[r + 1], x[r + 2]);
            let last = r + nz - 1;
            y[last] = closure(x[last], x[last - 1], x[last - 2]);
            let (c, w, e, so, no) = (
                1.0 + dt * s.center[i],
                dt * s.west[i],
                dt * s.east[i],
                dt * s.south[i],
                dt * s.north[i],
            );
            for k in r + 1..last {
                y[k] = c * x[k] + w * x[k - nz] + e * x[k + nz] + so * x[k - 1] + no * x[k + 1];
            }
        }
        let r = (nx - 1) * nz;
        for j in 0..nz {
            y[r + j] = if self.neumann {
                x[r + j] - x[r + j - nz]
            } else {
                x[r + j]
            };
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        let (nx, nz) = (self.nx, self.nz);
        let mut d = vec![1.0; nx * nz];
        for i in 1..nx - 1 {
            let c = 1.0 + self.dt * self.stencil.center[i];
            for j in 1..nz - 1 {
                d[i * nz + j] = c;
            }
        }
        d
    }
}

/// One backward-Euler step of `∂u/∂t = −L u + ρk x² u_xz + source` from
/// `prev`, returning the new field (time stamp `prev.t + dt`).
///
/// Solved for the increment `u − prev`, so a constant field with zero
/// source is reproduced bit for bit.
pub fn implicit_step(
    stencil: &OperatorStencil,
    prev: &Field2D,
    dt: f64,
    source: Option<&[f64]>,
    edges: &Edges,
    settings: KrylovSettings,
) -> Result<(Field2D, KrylovReport)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("must be > 0, got {dt}"),
        });
    }
    let grid = prev.grid;
    let (nx, nz) = (grid.nx(), grid.nz());
    for data in [&edges.z_low, &edges.z_high].into_iter().flatten() {
        assert_eq!(data.len(), nx, "z closure data must span the x grid");
    }
    let target = |data: &Option<Vec<f64>>, i: usize| data.as_ref().map_or(0.0, |d| d[i]);
    let mut rhs = vec![0.0; grid.len()];
    for i in 1..nx - 1 {
        let r = i * nz;
        let p = |j: usize| prev.values[r + j];
        rhs[r] = target(&edges.z_low, i) - closure(p(0), p(1), p(2));
        rhs[r + nz - 1] = target(&edges.z_high, i) - closure(p(nz - 1), p(nz - 2), p(nz - 3));
        for j in 1..nz - 1 {
            let mut v = -stencil.apply_at(prev, i, j);
            if stencil.cross[i] != 0.0 {
                v += stencil.cross[i] * cross_diff(prev, i, j);
            }
            if let Some(s) = source {
                v += s[r + j];
            }
            rhs[r + j] = dt * v;
        }
    }
    let r = (nx - 1) * nz;
    match &edges.far {
        FarEdge::Neumann => {
            for j in 0..nz {
                rhs[r + j] = prev.values[r - nz + j] - prev.values[r + j];
            }
        }
        FarEdge::Dirichlet(vals) => {
            assert_eq!(vals.len(), nz, "Dirichlet data must span the z grid");
            for j in 0..nz {
                rhs[r + j] = vals[j] - prev.values[r + j];
            }
        }
    }
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("step right-hand side"));
    }

    let matrix = StepMatrix {
        stencil,
        nx,
        nz,
        dt,
        neumann: matches!(edges.far, FarEdge::Neumann),
    };
    let mut delta = vec![0.0; grid.len()];
    let report = bicgstab(&matrix, &rhs, &mut delta, settings)?;
    let values: Vec<f64> = prev.values.iter().zip(&delta).map(|(p, d)| p + d).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("2D step"));
    }
    Ok((
        Field2D {
            grid,
            t: prev.t + dt,
            values,
        },
        report,
    ))
}

/// The three unknowns at a common time stamp.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub u1: Field1D,
    pub u2: Field2D,
    pub u3: Field2D,
}

impl SystemState {
    pub fn t(&self) -> f64 {
        self.u1.t
    }

    /// `u1 = 0`, `u2 = F`, `u3 = 0`.
    pub fn initial(grid: &Grid2D, payoff: &Payoff) -> Result<Self> {
        let mut u2 = Field2D::zeros(*grid, 0.0);
        for i in 0..grid.nx() {
            let x = grid.x().node(i);
            for j in 0..grid.nz() {
                u2.values[grid.index(i, j)] = payoff.eval(x, grid.z(j).exp())?;
            }
        }
        Ok(Self {
            u1: Field1D::zeros(*grid.x(), 0.0),
            u2,
            u3: Field2D::zeros(*grid, 0.0),
        })
    }
}

/// `(1−ρ²) k² x² e^{u1} (∂u2/∂x)²` on interior nodes, zero elsewhere. The
/// decorrelation factor is applied first so `ρ = ±1` gives exact zeros.
pub fn c_source(params: &ModelParams, u1: &Field1D, u2: &Field2D) -> Vec<f64> {
    let grid = u2.grid;
    let (nx, nz) = (grid.nx(), grid.nz());
    let mut s = vec![0.0; grid.len()];
    let decor = params.decorrelation();
    if decor == 0.0 {
        return s;
    }
    let h = grid.hx();
    let k2 = params.k * params.k;
    for i in 1..nx - 1 {
        let x = grid.x().node(i);
        let weight = decor * k2 * x * x * u1.values[i].exp();
        if weight == 0.0 {
            continue;
        }
        for j in 1..nz - 1 {
            let grad = (u2.at(i + 1, j) - u2.at(i - 1, j)) / (2.0 * h);
            s[grid.index(i, j)] = weight * grad * grad;
        }
    }
    s
}

pub fn step_b(
    params: &ModelParams,
    state: &SystemState,
    u1_next: &Field1D,
    dt: f64,
    settings: KrylovSettings,
) -> Result<(Field2D, KrylovReport)> {
    let stencil = OperatorStencil::for_b(params, &state.u2.grid, u1_next);
    implicit_step(&stencil, &state.u2, dt, None, &Edges::default(), settings)
}

pub fn step_c(
    params: &ModelParams,
    state: &SystemState,
    u1_next: &Field1D,
    u2_next: &Field2D,
    dt: f64,
    settings: KrylovSettings,
) -> Result<(Field2D, KrylovReport)> {
    let stencil = OperatorStencil::for_c(params, &state.u3.grid);
    let source = c_source(params, u1_next, u2_next);
    implicit_step(&stencil, &state.u3, dt, Some(&source), &Edges::default(), settings)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarchOptions {
    /// Keep every `retain_stride`-th state (the initial and final states are
    /// always kept).
    pub retain_stride: usize,
    pub krylov: KrylovSettings,
}

impl Default for MarchOptions {
    fn default() -> Self {
        Self {
            retain_stride: 1,
            krylov: KrylovSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarchStats {
    pub picard_passes: Vec<usize>,
    pub krylov_b: Vec<usize>,
    pub krylov_c: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct March {
    pub states: Vec<SystemState>,
    pub stats: MarchStats,
}

impl March {
    pub fn last(&self) -> &SystemState {
        self.states.last().expect("march keeps the initial state")
    }
}

pub fn march_system(params: &ModelParams, grid: &Grid2D, payoff: &Payoff, n_steps: usize) -> Result<March> {
    march_system_with(params, grid, payoff, n_steps, MarchOptions::default(), |_, _| Ok(()))
}

/// Advances `u1`, then `u2` with the new `u1`, then `u3` with both, for
/// `n_steps` equal steps over `[0, T]`. `observer` sees every state
/// (including the initial one) with its step index.
pub fn march_system_with(
    params: &ModelParams,
    grid: &Grid2D,
    payoff: &Payoff,
    n_steps: usize,
    options: MarchOptions,
    mut observer: impl FnMut(usize, &SystemState) -> Result<()>,
) -> Result<March> {
    params.validate()?;
    payoff.validate()?;
    if n_steps == 0 {
        return Err(Error::InvalidParameter {
            name: "n_steps",
            reason: "need at least one time step".into(),
        });
    }
    if options.retain_stride == 0 {
        return Err(Error::InvalidParameter {
            name: "retain_stride",
            reason: "must be >= 1".into(),
        });
    }
    if grid.x().x_max() <= params.sigma1 {
        return Err(Error::InvalidParameter {
            name: "x_max",
            reason: format!(
                "volatility grid must extend past sigma1 = {}, got {}",
                params.sigma1,
                grid.x().x_max()
            ),
        });
    }
    let dt = params.maturity / n_steps as f64;
    let c_stencil = OperatorStencil::for_c(params, grid);
    let mut state = SystemState::initial(grid, payoff)?;
    observer(0, &state)?;
    let mut states = vec![state.clone()];
    let mut stats = MarchStats {
        picard_passes: Vec::with_capacity(n_steps),
        krylov_b: Vec::with_capacity(n_steps),
        krylov_c: Vec::with_capacity(n_steps),
    };

    for n in 1..=n_steps {
        let t = time_of(n, n_steps, params.maturity);
        let mut u1 = step_u1(&state.u1, dt, params).map_err(|e| e.at_step(n, Equation::LogA))?;
        u1.field.t = t;

        let b_stencil = OperatorStencil::for_b(params, grid, &u1.field);
        let (mut u2, rep_b) = implicit_step(&b_stencil, &state.u2, dt, None, &Edges::default(), options.krylov)
            .map_err(|e| e.at_step(n, Equation::B))?;
        u2.t = t;

        let source = c_source(params, &u1.field, &u2);
        let (mut u3, rep_c) = implicit_step(&c_stencil, &state.u3, dt, Some(&source), &Edges::default(), options.krylov)
            .map_err(|e| e.at_step(n, Equation::C))?;
        u3.t = t;

        stats.picard_passes.push(u1.passes);
        stats.krylov_b.push(rep_b.iterations);
        stats.krylov_c.push(rep_c.iterations);
        state = SystemState { u1: u1.field, u2, u3 };
        observer(n, &state)?;
        if n % options.retain_stride == 0 || n == n_steps {
            states.push(state.clone());
        }
    }
    Ok(March { states, stats })
}
