//! Manufactured-solution checks of the 2D step.
//!
//! The prescribed field `ū = sin(πx/x_max) cos(z) e^{−t}` is driven through
//! the `c`-equation operator with the residual `∂ū/∂t − L ū` injected as a
//! source, a Dirichlet far edge (`ū(x_max) = 0`) and the usual frozen row at
//! `x = 0`. Observed orders come from the runs themselves.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{Field2D, Grid1D, Grid2D};
use crate::linalg::KrylovSettings;
use crate::model::ModelParams;
use crate::system::{implicit_step, Edges, FarEdge, OperatorStencil};
use crate::u1::time_of;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured {
    pub params: ModelParams,
    pub x_max: f64,
}

impl Manufactured {
    fn wave(&self) -> f64 {
        PI / self.x_max
    }

    pub fn exact(&self, t: f64, x: f64, z: f64) -> f64 {
        (self.wave() * x).sin() * z.cos() * (-t).exp()
    }

    /// `∂ū/∂t − [(k²x²/2)ū_xx + (x²/2)ū_zz + ρk x² ū_xz + g ū_x + (x f − x²/2) ū_z]`.
    pub fn source(&self, t: f64, x: f64, z: f64) -> f64 {
        let p = &self.params;
        let w = self.wave();
        let decay = (-t).exp();
        let (s, c) = (w * x).sin_cos();
        let (sz, cz) = z.sin_cos();
        let u = s * cz * decay;
        let u_x = w * c * cz * decay;
        let u_z = -s * sz * decay;
        let u_xx = -w * w * u;
        let u_zz = -u;
        let u_xz = -w * c * sz * decay;
        let x2 = x * x;
        let l = 0.5 * p.k * p.k * x2 * u_xx
            + 0.5 * x2 * u_zz
            + p.rho * p.k * x2 * u_xz
            + p.g(x) * u_x
            + (p.x_f(x) - 0.5 * x2) * u_z;
        -u - l
    }

    /// Closure data reproducing `ū` at time `t`: far-edge values and the
    /// second differences of `ū` along each boundary line.
    pub fn edges(&self, grid: &Grid2D, t: f64) -> Edges {
        let nz = grid.nz();
        let zs = grid.z_nodes();
        let line = |x: f64, a: usize, b: usize, c: usize| {
            let u = |j: usize| self.exact(t, x, zs[j]);
            (u(a) - u(b)) + (u(c) - u(b))
        };
        let xs = grid.x().nodes();
        Edges {
            far: FarEdge::Dirichlet(zs.iter().map(|&z| self.exact(t, grid.x().x_max(), z)).collect()),
            z_low: Some(xs.iter().map(|&x| line(x, 0, 1, 2)).collect()),
            z_high: Some(xs.iter().map(|&x| line(x, nz - 1, nz - 2, nz - 3)).collect()),
        }
    }

    /// Marches `n_steps` over `[0, T]` on `grid` and returns the final field.
    pub fn solve(&self, grid: &Grid2D, n_steps: usize) -> Result<Field2D> {
        if n_steps == 0 {
            return Err(Error::InvalidParameter {
                name: "n_steps",
                reason: "need at least one time step".into(),
            });
        }
        let maturity = self.params.maturity;
        let dt = maturity / n_steps as f64;
        let stencil = OperatorStencil::for_c(&self.params, grid);
        let xs = grid.x().nodes();
        let zs = grid.z_nodes();
        let mut u = Field2D::from_fn(*grid, 0.0, |x, z| self.exact(0.0, x, z));
        let mut source = vec![0.0; grid.len()];
        for n in 1..=n_steps {
            let t = time_of(n, n_steps, maturity);
            for (i, &x) in xs.iter().enumerate() {
                for (j, &z) in zs.iter().enumerate() {
                    source[grid.index(i, j)] = self.source(t, x, z);
                }
            }
            let edges = self.edges(grid, t);
            let (mut next, _) = implicit_step(&stencil, &u, dt, Some(&source), &edges, KrylovSettings::default())?;
            next.t = t;
            u = next;
        }
        Ok(u)
    }

    /// Max-norm distance to `ū` at the field's time stamp.
    pub fn error(&self, u: &Field2D) -> f64 {
        let g = u.grid;
        let mut worst = 0.0f64;
        for i in 0..g.nx() {
            let x = g.x().node(i);
            for j in 0..g.nz() {
                worst = worst.max((u.at(i, j) - self.exact(u.t, x, g.z(j))).abs());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudySettings {
    pub x_max: f64,
    /// Log-price window `[z_min, z_max]`.
    pub z_min: f64,
    pub z_max: f64,
    /// Coarsest spatial grid (nodes per direction) of the space study.
    pub space_nodes: usize,
    /// Steps on the coarsest space grid; scaled by 4 per halving of `h`.
    pub space_steps: usize,
    /// Fixed grid of the time study.
    pub time_nodes: usize,
    /// Coarsest step count of the time study.
    pub time_steps: usize,
    pub halvings: usize,
}

impl Default for StudySettings {
    fn default() -> Self {
        Self {
            x_max: 1.0,
            z_min: -4.0,
            z_max: 4.0,
            space_nodes: 21,
            space_steps: 100,
            time_nodes: 81,
            time_steps: 10,
            halvings: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub nodes: usize,
    pub h_x: f64,
    pub h_z: f64,
    pub steps: usize,
    pub dt: f64,
    /// Space study: max-norm error against `ū`. Time study: max-norm change
    /// from the previous (coarser) run, `NaN` for the first.
    pub error: f64,
    /// `log₂` of the ratio to the previous run's error, `NaN` for the first.
    pub order: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Study {
    pub space: Vec<Run>,
    pub time: Vec<Run>,
}

impl Study {
    pub fn space_orders(&self) -> Vec<f64> {
        self.space.iter().skip(1).map(|r| r.order).collect()
    }

    pub fn time_orders(&self) -> Vec<f64> {
        self.time.iter().skip(1).map(|r| r.order).filter(|o| o.is_finite()).collect()
    }
}

fn grid_for(s: &StudySettings, nodes: usize) -> Result<Grid2D> {
    Grid2D::new(Grid1D::new(s.x_max, nodes)?, s.z_min, s.z_max, nodes)
}

/// Space study: `h` halved `halvings` times with `dt ∝ h²`, errors against
/// `ū`. Time study: `dt` halved `halvings + 1` times on a fixed grid, orders
/// from ratios of successive differences.
pub fn run_study(params: &ModelParams, settings: &StudySettings) -> Result<Study> {
    params.validate()?;
    if settings.space_nodes < 3 || settings.time_nodes < 3 || settings.space_steps == 0 || settings.time_steps == 0 {
        return Err(Error::InvalidParameter {
            name: "converge",
            reason: "need at least 3 nodes and 1 step".into(),
        });
    }
    let problem = Manufactured {
        params: *params,
        x_max: settings.x_max,
    };

    let mut space: Vec<Run> = Vec::with_capacity(settings.halvings + 1);
    for level in 0..=settings.halvings {
        let nodes = (settings.space_nodes - 1) * (1 << level) + 1;
        let steps = settings.space_steps * (1 << (2 * level));
        let grid = grid_for(settings, nodes)?;
        let u = problem.solve(&grid, steps)?;
        let error = problem.error(&u);
        let order = space.last().map_or(f64::NAN, |prev| (prev.error / error).log2());
        space.push(Run {
            nodes,
            h_x: grid.hx(),
            h_z: grid.hz(),
            steps,
            dt: params.maturity / steps as f64,
            error,
            order,
        });
    }

    let grid = grid_for(settings, settings.time_nodes)?;
    let mut time: Vec<Run> = Vec::with_capacity(settings.halvings + 2);
    let mut previous: Option<Field2D> = None;
    for level in 0..=settings.halvings + 1 {
        let steps = settings.time_steps * (1 << level);
        let u = problem.solve(&grid, steps)?;
        let error = previous.as_ref().map_or(f64::NAN, |p| {
            p.values
                .iter()
                .zip(&u.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        });
        let order = match time.last() {
            Some(prev) if prev.error.is_finite() => (prev.error / error).log2(),
            _ => f64::NAN,
        };
        time.push(Run {
            nodes: settings.time_nodes,
            h_x: grid.hx(),
            h_z: grid.hz(),
            steps,
            dt: params.maturity / steps as f64,
            error,
            order,
        });
        previous = Some(u);
    }
    Ok(Study { space, time })
}
