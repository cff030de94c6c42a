//! Monte Carlo check of the value function.
//!
//! The market behind the generator of the `c` equation is
//!
//! ```text
//! dσ = g(σ) dt + kσ dW₂,   dP = σ f(σ) P dt + σ P dW₁,   d⟨W₁, W₂⟩ = ρ dt,
//! ```
//!
//! simulated with Euler–Maruyama in `(ln σ, ln P)` so both stay positive. A
//! self-financing portfolio `V = θP + B` (zero rate) is rebalanced every
//! step; the mean squared terminal miss `E[(V(T) − F)²]` of any strategy is
//! bounded below by `J₀ = a(0)(V₀ − b(0))² + c(0)`.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{fmt17, Field2D, Grid2D};
use crate::model::{ModelParams, Payoff};
use crate::replication::{compute_theta, EvalPoint};
use crate::system::{march_system_with, MarchOptions, SystemState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    /// `θ = (∂b/∂z + ρk ∂b/∂σ)/P` read from the `b` field of matching
    /// time to maturity.
    Tracking,
    /// Hold nothing but the bond.
    None,
    /// A fixed number of shares.
    Constant(f64),
}

impl Strategy {
    pub fn name(&self) -> String {
        match self {
            Strategy::Tracking => "tracking".into(),
            Strategy::None => "none".into(),
            Strategy::Constant(c) => format!("constant:{}", fmt17(*c)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
    pub strategy: Strategy,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            n_steps: 200,
            seed: 20_240_601,
            strategy: Strategy::Tracking,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 100 {
            return Err(Error::InvalidParameter {
                name: "n_paths",
                reason: format!("must be >= 100, got {}", self.n_paths),
            });
        }
        if self.n_steps < 10 {
            return Err(Error::InvalidParameter {
                name: "mc_steps",
                reason: format!("must be >= 10, got {}", self.n_steps),
            });
        }
        if let Strategy::Constant(c) = self.strategy {
            if !c.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "strategy",
                    reason: "constant holding must be finite".into(),
                });
            }
        }
        Ok(())
    }
}

/// Random source of one path: the seed picks the generator, the path id
/// its stream, so a path is reproducible in isolation.
pub fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

/// One Euler–Maruyama step in log coordinates. Returns the new `(σ, P)`.
#[inline]
fn advance(params: &ModelParams, sigma: f64, price: f64, dt: f64, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let sq = dt.sqrt();
    let e2: f64 = StandardNormal.sample(rng);
    let eo: f64 = StandardNormal.sample(rng);
    let dw2 = sq * e2;
    let dw1 = params.rho * dw2 + params.decorrelation().max(0.0).sqrt() * sq * eo;
    let k = params.k;
    let ln_sigma = sigma.ln() + (-params.delta * (sigma - params.sigma1) - 0.5 * k * k) * dt + k * dw2;
    let ln_price = price.ln() + (params.x_f(sigma) - 0.5 * sigma * sigma) * dt + sigma * dw1;
    (ln_sigma.exp(), ln_price.exp())
}

/// Full path `(σ, P)` at the `n_steps + 1` clock times `s_n = nT/N`.
pub fn simulate_path(params: &ModelParams, sim: &SimConfig, path: u64, sigma_init: f64, p_init: f64) -> Result<Vec<(f64, f64)>> {
    check_start(sigma_init, p_init)?;
    let dt = params.maturity / sim.n_steps as f64;
    let mut rng = path_rng(sim.seed, path);
    let mut out = Vec::with_capacity(sim.n_steps + 1);
    let (mut s, mut p) = (sigma_init, p_init);
    out.push((s, p));
    for _ in 0..sim.n_steps {
        (s, p) = advance(params, s, p, dt, &mut rng);
        if !(s.is_finite() && p.is_finite() && s > 0.0 && p > 0.0) {
            return Err(Error::NonFinite("simulated path"));
        }
        out.push((s, p));
    }
    Ok(out)
}

/// Terminal `(σ, P)` of paths `0..n_paths`.
pub fn simulate_paths(params: &ModelParams, sim: &SimConfig, sigma_init: f64, p_init: f64) -> Result<Vec<(f64, f64)>> {
    params.validate()?;
    sim.validate()?;
    (0..sim.n_paths as u64)
        .into_par_iter()
        .map(|id| simulate_path(params, sim, id, sigma_init, p_init).map(|p| *p.last().expect("non-empty")))
        .collect()
}

fn check_start(sigma: f64, price: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite() && price > 0.0 && price.is_finite()) {
        return Err(Error::Domain(format!(
            "paths need a positive start, got sigma={sigma}, P={price}"
        )));
    }
    Ok(())
}

/// Hedge ratios of the retained `b` fields, ordered by PDE time.
#[derive(Debug, Clone)]
pub struct ThetaSchedule {
    grid: Grid2D,
    times: Vec<f64>,
    fields: Vec<Field2D>,
}

impl ThetaSchedule {
    pub fn new(states: &[SystemState], params: &ModelParams) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::Domain("hedging needs at least one retained state".into()))?;
        let grid = first.u2.grid;
        let mut times = Vec::with_capacity(states.len());
        let mut fields = Vec::with_capacity(states.len());
        for s in states {
            if let Some(&last) = times.last() {
                if s.u2.t <= last {
                    return Err(Error::Domain("retained states must have increasing time".into()));
                }
            }
            times.push(s.u2.t);
            fields.push(compute_theta(&s.u2, params));
        }
        Ok(Self { grid, times, fields })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// θ at PDE time `t`, linear between retained states and held flat
    /// outside them; the point is clamped to the grid, reporting whether it
    /// had to move.
    pub fn theta(&self, t: f64, sigma: f64, price: f64) -> (f64, bool) {
        let (x, z, moved) = self.grid.clamp(sigma, price.ln());
        let cell = self.grid.locate(x, z).expect("clamped point lies on the grid");
        let k = self.times.partition_point(|&s| s <= t);
        let value = if k == 0 {
            self.fields[0].interpolate_cell(&cell)
        } else if k == self.times.len() {
            self.fields[k - 1].interpolate_cell(&cell)
        } else {
            let (t0, t1) = (self.times[k - 1], self.times[k]);
            let w = (t - t0) / (t1 - t0);
            let (a, b) = (
                self.fields[k - 1].interpolate_cell(&cell),
                self.fields[k].interpolate_cell(&cell),
            );
            if w == 0.0 {
                a
            } else {
                a + w * (b - a)
            }
        };
        (value, moved)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOutcome {
    pub id: u64,
    pub sigma: f64,
    pub price: f64,
    pub wealth: f64,
    /// `V(T) − F(P(T), σ(T))`.
    pub error: f64,
    pub excursions: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MCEstimate {
    pub strategy: Strategy,
    pub n_paths: usize,
    /// Estimate of `E[(V(T) − F)²]`.
    pub mean_sq_error: f64,
    pub std_error: f64,
    pub mean_wealth: f64,
    pub wealth_std_error: f64,
    pub v0: f64,
    pub j0_pde: f64,
    /// Rebalancing events whose `(σ, ln P)` had to be clamped to the grid.
    pub excursions: u64,
    pub paths: Vec<PathOutcome>,
}

/// Mean and standard error of the mean, summed in path order.
fn mean_and_se(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = values.clone().sum::<f64>() / nf;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0);
    (mean, (var / nf).sqrt())
}

/// Runs the hedge on every path. `j0_pde` is carried through for the report.
#[allow(clippy::too_many_arguments)]
pub fn run_hedge(
    schedule: &ThetaSchedule,
    params: &ModelParams,
    payoff: &Payoff,
    sim: &SimConfig,
    start: EvalPoint,
    v0: f64,
    j0_pde: f64,
) -> Result<MCEstimate> {
    params.validate()?;
    sim.validate()?;
    check_start(start.sigma, start.price)?;
    let dt = params.maturity / sim.n_steps as f64;
    let outcomes: Vec<PathOutcome> = (0..sim.n_paths as u64)
        .into_par_iter()
        .map(|id| {
            let mut rng = path_rng(sim.seed, id);
            let (mut s, mut p) = (start.sigma, start.price);
            let mut wealth = v0;
            let mut excursions = 0u32;
            for n in 0..sim.n_steps {
                let theta = match sim.strategy {
                    Strategy::Tracking => {
                        let clock = params.maturity * n as f64 / sim.n_steps as f64;
                        let (th, moved) = schedule.theta(params.maturity - clock, s, p);
                        excursions += u32::from(moved);
                        th
                    }
                    Strategy::None => 0.0,
                    Strategy::Constant(c) => c,
                };
                let (s1, p1) = advance(params, s, p, dt, &mut rng);
                if !(s1.is_finite() && p1.is_finite() && s1 > 0.0 && p1 > 0.0) {
                    return Err(Error::NonFinite("simulated path"));
                }
                if theta != 0.0 {
                    wealth += theta * (p1 - p);
                }
                (s, p) = (s1, p1);
            }
            let error = wealth - payoff.eval(s, p)?;
            Ok(PathOutcome {
                id,
                sigma: s,
                price: p,
                wealth,
                error,
                excursions,
            })
        })
        .collect::<Result<_>>()?;

    let n = outcomes.len();
    let (mean_sq_error, std_error) = mean_and_se(outcomes.iter().map(|o| o.error * o.error), n);
    let (mean_wealth, wealth_std_error) = mean_and_se(outcomes.iter().map(|o| o.wealth), n);
    Ok(MCEstimate {
        strategy: sim.strategy,
        n_paths: n,
        mean_sq_error,
        std_error,
        mean_wealth,
        wealth_std_error,
        v0,
        j0_pde,
        excursions: outcomes.iter().map(|o| u64::from(o.excursions)).sum(),
        paths: outcomes,
    })
}

impl MCEstimate {
    /// `id,P,sigma,V,error` per path.
    pub fn paths_csv(&self, header: Option<&str>) -> String {
        let mut s = String::new();
        if let Some(h) = header {
            s.push_str(h);
            s.push('\n');
        }
        s.push_str("path,P,sigma,V,error\n");
        for o in &self.paths {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                o.id,
                fmt17(o.price),
                fmt17(o.sigma),
                fmt17(o.wealth),
                fmt17(o.error)
            );
        }
        s
    }
}

/// Share of `c(0)` that the one-sided check may fall short by.
pub const PDE_BUDGET: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub eval_point: EvalPoint,
    pub a0: f64,
    pub b0: f64,
    pub c0: f64,
    pub estimate: MCEstimate,
}

impl VerifyReport {
    /// `MC + 3 SE ≥ (1 − budget) J₀`.
    pub fn passes(&self) -> bool {
        self.estimate.mean_sq_error + 3.0 * self.estimate.std_error >= (1.0 - PDE_BUDGET) * self.estimate.j0_pde
    }

    /// `|MC − J₀| / J₀`; informational.
    pub fn relative_gap(&self) -> f64 {
        (self.estimate.mean_sq_error - self.estimate.j0_pde).abs() / self.estimate.j0_pde
    }

    pub fn to_text(&self, header: Option<&str>) -> String {
        let e = &self.estimate;
        let mut s = String::new();
        if let Some(h) = header {
            s.push_str(h);
            s.push('\n');
        }
        let rows: [(&str, String); 17] = [
            ("strategy", e.strategy.name()),
            ("sigma_obs", fmt17(self.eval_point.sigma)),
            ("p_obs", fmt17(self.eval_point.price)),
            ("a0", fmt17(self.a0)),
            ("b0", fmt17(self.b0)),
            ("c0", fmt17(self.c0)),
            ("v0", fmt17(e.v0)),
            ("j0_pde", fmt17(e.j0_pde)),
            ("n_paths", e.n_paths.to_string()),
            ("mc_mean_sq_error", fmt17(e.mean_sq_error)),
            ("mc_std_error", fmt17(e.std_error)),
            ("mc_mean_wealth", fmt17(e.mean_wealth)),
            ("mc_wealth_std_error", fmt17(e.wealth_std_error)),
            ("excursions", e.excursions.to_string()),
            ("budget", fmt17(PDE_BUDGET)),
            ("relative_gap", fmt17(self.relative_gap())),
            ("pass", self.passes().to_string()),
        ];
        for (k, v) in rows {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }
}

/// Solves the system, then hedges from `eval_point` with `V₀ = b(0)`.
pub fn verify(
    params: &ModelParams,
    payoff: &Payoff,
    grid: &Grid2D,
    pde_steps: usize,
    sim: &SimConfig,
    eval_point: EvalPoint,
) -> Result<VerifyReport> {
    sim.validate()?;
    let march = march_system_with(params, grid, payoff, pde_steps, MarchOptions::default(), |_, _| Ok(()))?;
    verify_with_states(&march.states, params, payoff, sim, eval_point)
}

/// As [`verify`], on an already computed trajectory.
pub fn verify_with_states(
    states: &[SystemState],
    params: &ModelParams,
    payoff: &Payoff,
    sim: &SimConfig,
    eval_point: EvalPoint,
) -> Result<VerifyReport> {
    let last = states
        .last()
        .ok_or_else(|| Error::Domain("empty trajectory".into()))?;
    let z = eval_point.price.ln();
    let a0 = last.u1.interpolate(eval_point.sigma)?.exp();
    let b0 = last.u2.interpolate(eval_point.sigma, z)?;
    let c0 = last.u3.interpolate(eval_point.sigma, z)?;
    let schedule = ThetaSchedule::new(states, params)?;
    // V₀ = b(0) makes J₀ = c(0).
    let estimate = run_hedge(&schedule, params, payoff, sim, eval_point, b0, c0)?;
    Ok(VerifyReport {
        eval_point,
        a0,
        b0,
        c0,
        estimate,
    })
}
