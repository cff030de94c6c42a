//! Browser bindings for three operations: the `a(0)` curve across
//! correlations, the replication numbers at one point, and sample paths of
//! the volatility and price processes.

use hedgepde::mc::{simulate_path, SimConfig, Strategy};
use hedgepde::replication::{replication_summary, EvalPoint};
use hedgepde::system::march_system;
use hedgepde::u1::solve_u1;
use hedgepde::{Grid1D, Grid2D, ModelParams, Payoff};
use wasm_bindgen::prelude::*;

fn js(e: hedgepde::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
#[derive(Debug, Clone, Copy)]
pub struct Model(ModelParams);

#[wasm_bindgen]
impl Model {
    #[wasm_bindgen(constructor)]
    pub fn new(k: f64, rho: f64, delta: f64, sigma1: f64, mu: f64, sigma0: f64, maturity: f64) -> Result<Model, JsError> {
        let p = ModelParams {
            k,
            rho,
            delta,
            sigma1,
            mu,
            sigma0,
            maturity,
        };
        p.validate().map_err(js)?;
        Ok(Model(p))
    }

    /// The default parameter set.
    pub fn standard() -> Model {
        Model(ModelParams::default())
    }

    #[wasm_bindgen(getter)]
    pub fn rho(&self) -> f64 {
        self.0.rho
    }
}

#[wasm_bindgen]
pub struct Curves {
    sigma: Vec<f64>,
    rhos: Vec<f64>,
    columns: Vec<Option<Vec<f64>>>,
}

#[wasm_bindgen]
impl Curves {
    pub fn sigma(&self) -> Vec<f64> {
        self.sigma.clone()
    }

    pub fn rhos(&self) -> Vec<f64> {
        self.rhos.clone()
    }

    /// `a(0, σ)` for the `i`-th correlation, empty if that solve failed.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.log_column(i).into_iter().map(f64::exp).collect()
    }

    /// `ln a(0, σ)`, finite even where `a` underflows.
    pub fn log_column(&self, i: usize) -> Vec<f64> {
        self.columns.get(i).cloned().flatten().unwrap_or_default()
    }
}

/// `a(0, ·)` on `[0, x_max]` for each correlation in `rhos`.
#[wasm_bindgen]
pub fn a0_curves(model: &Model, rhos: &[f64], x_max: f64, n_x: usize, n_steps: usize) -> Result<Curves, JsError> {
    let grid = Grid1D::new(x_max, n_x).map_err(js)?;
    let mut columns = Vec::with_capacity(rhos.len());
    for &rho in rhos {
        let p = model.0.with_rho(rho);
        p.validate().map_err(js)?;
        columns.push(solve_u1(&p, grid, n_steps).ok().map(|tr| tr.last().values.clone()));
    }
    Ok(Curves {
        sigma: grid.nodes(),
        rhos: rhos.to_vec(),
        columns,
    })
}

#[wasm_bindgen]
#[derive(Debug, Clone, Copy)]
pub struct Replication {
    pub v0: f64,
    pub eps: f64,
    pub c0: f64,
    pub a0: f64,
    pub theta0: f64,
    pub clamped: bool,
}

/// Optimal initial wealth, replication error and hedge ratio for a call
/// (`call = true`) or put struck at `strike`, observed at `(sigma, price)`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn replicate(
    model: &Model,
    call: bool,
    strike: f64,
    sigma: f64,
    price: f64,
    nodes: usize,
    n_steps: usize,
) -> Result<Replication, JsError> {
    let payoff = if call { Payoff::Call { strike } } else { Payoff::Put { strike } };
    payoff.validate().map_err(js)?;
    let x = Grid1D::new(1.0, nodes).map_err(js)?;
    let grid = Grid2D::centered(x, price, 4.0, nodes).map_err(js)?;
    let march = march_system(&model.0, &grid, &payoff, n_steps).map_err(js)?;
    let last = march.last();
    let r = replication_summary(last, &model.0, EvalPoint { sigma, price }).map_err(js)?;
    Ok(Replication {
        v0: r.v0_star,
        eps: r.eps_star,
        c0: r.c0,
        a0: last.u1.interpolate(sigma).map_err(js)?.exp(),
        theta0: r.theta0.interpolate(sigma, price.ln()).map_err(js)?,
        clamped: r.clamped,
    })
}

/// `n_paths` paths of `n_steps` steps from `(sigma, price)`, flattened as
/// `[σ₀, P₀, σ₁, P₁, …]` per path, paths back to back.
#[wasm_bindgen]
pub fn sample_paths(model: &Model, n_paths: usize, n_steps: usize, seed: u32, sigma: f64, price: f64) -> Result<Vec<f64>, JsError> {
    let sim = SimConfig {
        n_paths,
        n_steps,
        seed: seed.into(),
        strategy: Strategy::None,
    };
    let mut out = Vec::with_capacity(n_paths * (n_steps + 1) * 2);
    for path in 0..n_paths as u64 {
        for (s, p) in simulate_path(&model.0, &sim, path, sigma, price).map_err(js)? {
            out.push(s);
            out.push(p);
        }
    }
    Ok(out)
}
