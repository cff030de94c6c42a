//! Financial read-outs of a solved system: the `a(0)` profile, the optimal
//! initial wealth `V₀* = b(0)`, the minimal replication error `ε* = √c(0)`,
//! the initial hedge ratio `θ*(0) = ∂b/∂P + (ρk/P) ∂b/∂σ`, and the sweep of
//! `a(0)` over correlations.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{fmt17, Field1D, Field2D, Grid1D};
use crate::model::ModelParams;
use crate::system::SystemState;
use crate::u1::solve_u1;

/// Negative `c(0)` below this magnitude is treated as rounding noise.
pub const CLAMP_TOLERANCE: f64 = 1e-8;

pub fn extract_a0(u1_final: &Field1D) -> Field1D {
    u1_final.map(f64::exp)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPoint {
    pub sigma: f64,
    pub price: f64,
}

impl EvalPoint {
    /// `(σ₁, K)` for a strike-bearing payoff.
    pub fn default_for(params: &ModelParams, reference_price: f64) -> Self {
        Self {
            sigma: params.sigma1,
            price: reference_price,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationResult {
    pub a0_profile: Field1D,
    pub v0_star: f64,
    pub eps_star: f64,
    /// `c(0)` as interpolated, before clamping.
    pub c0: f64,
    /// `max(−c(0), 0)`.
    pub clamp_magnitude: f64,
    pub clamped: bool,
    pub theta0: Field2D,
    pub eval_point: EvalPoint,
}

/// Nodewise `θ = (∂u/∂z + ρk ∂u/∂x) / e^z`.
pub fn compute_theta(u2: &Field2D, params: &ModelParams) -> Field2D {
    let grid = u2.grid;
    let rk = params.rho * params.k;
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.nx() {
        for j in 0..grid.nz() {
            let mut d = u2.gradient_z(i, j);
            if rk != 0.0 {
                d += rk * u2.gradient_x(i, j);
            }
            values.push(d * (-grid.z(j)).exp());
        }
    }
    Field2D {
        grid,
        t: u2.t,
        values,
    }
}

pub fn replication_summary(final_state: &SystemState, params: &ModelParams, eval_point: EvalPoint) -> Result<ReplicationResult> {
    if !(eval_point.price > 0.0) {
        return Err(Error::Domain(format!(
            "evaluation price must be > 0, got {}",
            eval_point.price
        )));
    }
    let z = eval_point.price.ln();
    let v0_star = final_state.u2.interpolate(eval_point.sigma, z)?;
    let c0 = final_state.u3.interpolate(eval_point.sigma, z)?;
    let clamp_magnitude = (-c0).max(0.0);
    Ok(ReplicationResult {
        a0_profile: extract_a0(&final_state.u1),
        v0_star,
        eps_star: c0.max(0.0).sqrt(),
        c0,
        clamp_magnitude,
        clamped: clamp_magnitude > CLAMP_TOLERANCE,
        theta0: compute_theta(&final_state.u2, params),
        eval_point,
    })
}

/// One `ln a(0)` column per correlation. A failed solve keeps its error and
/// leaves the other columns intact.
#[derive(Debug, Clone)]
pub struct RhoSweep {
    pub grid: Grid1D,
    pub rhos: Vec<f64>,
    pub columns: Vec<Result<Field1D>>,
}

pub const DEFAULT_RHOS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

pub fn rho_sweep(params: &ModelParams, rhos: &[f64], grid: Grid1D, n_steps: usize) -> Result<RhoSweep> {
    if rhos.is_empty() {
        return Err(Error::InvalidParameter {
            name: "sweep_rho",
            reason: "empty list".into(),
        });
    }
    for &rho in rhos {
        params.with_rho(rho).validate()?;
    }
    let columns = rhos
        .par_iter()
        .map(|&rho| {
            solve_u1(&params.with_rho(rho), grid, n_steps).map(|tr| tr.last().clone())
        })
        .collect();
    Ok(RhoSweep {
        grid,
        rhos: rhos.to_vec(),
        columns,
    })
}

impl RhoSweep {
    pub fn failures(&self) -> Vec<(f64, &Error)> {
        self.rhos
            .iter()
            .zip(&self.columns)
            .filter_map(|(&r, c)| c.as_ref().err().map(|e| (r, e)))
            .collect()
    }

    /// Largest nodewise gap in `a(0)` between the columns for `rho` and
    /// `−rho`, when both are present.
    pub fn mirror_gap(&self, rho: f64) -> Option<f64> {
        let find = |r: f64| {
            self.rhos
                .iter()
                .position(|&q| q == r)
                .and_then(|k| self.columns[k].as_ref().ok())
        };
        let (a, b) = (find(rho)?, find(-rho)?);
        Some(extract_a0(a).max_abs_diff(&extract_a0(b)))
    }

    fn write(&self, header: Option<&str>, map: impl Fn(f64) -> f64) -> String {
        let mut s = String::new();
        if let Some(h) = header {
            s.push_str(h);
            s.push('\n');
        }
        s.push_str("sigma");
        for r in &self.rhos {
            s.push_str(&format!(",rho={}", fmt17(*r)));
        }
        s.push('\n');
        for i in 0..self.grid.len() {
            s.push_str(&fmt17(self.grid.node(i)));
            for c in &self.columns {
                s.push(',');
                match c {
                    Ok(f) => s.push_str(&fmt17(map(f.values[i]))),
                    Err(_) => s.push_str("nan"),
                }
            }
            s.push('\n');
        }
        s
    }

    /// `sigma,rho=…,…` with `a(0, σ)` per column; failed columns are `nan`.
    pub fn to_csv(&self, header: Option<&str>) -> String {
        self.write(header, f64::exp)
    }

    /// Same layout with `ln a(0, σ)`, which stays readable where `a` underflows.
    pub fn to_log_csv(&self, header: Option<&str>) -> String {
        self.write(header, |u| u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;
    use crate::model::Payoff;
    use crate::system::march_system;
    use proptest::prelude::*;

    fn grid() -> Grid2D {
        Grid2D::centered(Grid1D::new(1.0, 21).unwrap(), 1.0, 3.0, 31).unwrap()
    }

    #[test]
    fn exponentials_of_constant_profiles() {
        let g = Grid1D::new(1.0, 5).unwrap();
        assert!(extract_a0(&Field1D::zeros(g, 1.0)).values.iter().all(|&v| v == 1.0));
        let a = extract_a0(&Field1D::from_fn(g, 1.0, |_| -1.0));
        assert!(a.values.iter().all(|&v| v == (-1.0f64).exp()));
    }

    #[test]
    fn theta_of_price_linear_field_is_its_slope() {
        let g = Grid2D::centered(Grid1D::new(1.0, 11).unwrap(), 1.0, 3.0, 101).unwrap();
        let p = ModelParams::default().with_rho(0.7);
        let u = Field2D::from_fn(g, 1.0, |_, z| 3.0 - 0.4 * z.exp());
        let th = compute_theta(&u, &p);
        assert!(th.values.iter().all(|&v| (v + 0.4).abs() < 1e-3));
    }

    #[test]
    fn constant_payoff_summary() {
        let g = grid();
        let p = ModelParams::default().with_rho(-0.3);
        let m = march_system(&p, &g, &Payoff::Constant { value: 1.75 }, 40).unwrap();
        let r = replication_summary(m.last(), &p, EvalPoint { sigma: p.sigma1, price: 1.0 }).unwrap();
        assert_eq!(r.v0_star, 1.75);
        assert_eq!(r.eps_star, 0.0);
        assert!(!r.clamped);
        assert!(r.theta0.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn eval_point_outside_hull_is_rejected() {
        let g = grid();
        let p = ModelParams::default();
        let m = march_system(&p, &g, &Payoff::default(), 40).unwrap();
        assert!(replication_summary(m.last(), &p, EvalPoint { sigma: 2.0, price: 1.0 }).is_err());
        assert!(replication_summary(m.last(), &p, EvalPoint { sigma: 0.1, price: 100.0 }).is_err());
        assert!(replication_summary(m.last(), &p, EvalPoint { sigma: 0.1, price: -1.0 }).is_err());
    }

    #[test]
    fn zero_drift_sweep_is_flat() {
        let p = ModelParams {
            mu: 0.0,
            ..Default::default()
        };
        let s = rho_sweep(&p, &DEFAULT_RHOS, Grid1D::new(1.0, 21).unwrap(), 20).unwrap();
        for c in &s.columns {
            assert!(c.as_ref().unwrap().values.iter().all(|&v| v == 0.0));
        }
        assert!(s.failures().is_empty());
    }

    #[test]
    fn sweep_rejects_out_of_range_correlation() {
        let g = Grid1D::new(1.0, 11).unwrap();
        assert!(rho_sweep(&ModelParams::default(), &[0.0, 1.5], g, 10).is_err());
        assert!(rho_sweep(&ModelParams::default(), &[], g, 10).is_err());
    }

    #[test]
    fn failed_column_is_written_as_nan() {
        let g = Grid1D::new(1.0, 3).unwrap();
        let s = RhoSweep {
            grid: g,
            rhos: vec![0.0, 0.5],
            columns: vec![Ok(Field1D::zeros(g, 1.0)), Err(Error::NonFinite("test"))],
        };
        let csv = s.to_csv(Some("# h"));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# h");
        assert_eq!(lines[1], "sigma,rho=0.0000000000000000e0,rho=5.0000000000000000e-1");
        assert!(lines[2].ends_with(",nan"));
        assert_eq!(s.failures().len(), 1);
    }

    proptest! {
        #[test]
        fn theta_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, rho in -1.0f64..1.0) {
            let g = grid();
            let p = ModelParams::default().with_rho(rho);
            let u = Field2D::from_fn(g, 1.0, |x, z| (x * 3.0).sin() + z * z);
            let v = Field2D::from_fn(g, 1.0, |x, z| x * z.exp());
            let w = Field2D::from_fn(g, 1.0, |x, z| a * ((x * 3.0).sin() + z * z) + b * x * z.exp());
            let (tu, tv, tw) = (compute_theta(&u, &p), compute_theta(&v, &p), compute_theta(&w, &p));
            for k in 0..g.len() {
                let lin = a * tu.values[k] + b * tv.values[k];
                prop_assert!((tw.values[k] - lin).abs() <= 1e-9 * (1.0 + lin.abs()));
            }
        }
    }
}
