//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, unknown or repeated keys
//! are errors. Every value is re-validated against the invariants of the
//! module that consumes it, and failures carry the offending line.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::convergence::StudySettings;
use crate::error::{Error, Result};
use crate::grid::{fmt17, Grid1D, Grid2D};
use crate::mc::{SimConfig, Strategy};
use crate::model::{ModelParams, Payoff, PayoffTable};
use crate::replication::{EvalPoint, DEFAULT_RHOS};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub payoff: Payoff,
    /// Source of a tabulated payoff, as written in the config.
    pub payoff_table: Option<String>,
    pub x_max: f64,
    pub n_x: usize,
    pub z_half_width: f64,
    pub n_z: usize,
    pub n_steps: usize,
    pub eval_point: EvalPoint,
    pub sweep_rho: Vec<f64>,
    pub sim: SimConfig,
    pub retain_stride: usize,
    pub write_paths: bool,
    pub converge: StudySettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        let params = ModelParams::default();
        let payoff = Payoff::default();
        Self {
            eval_point: EvalPoint::default_for(&params, payoff.reference_price()),
            params,
            payoff,
            payoff_table: None,
            x_max: 1.0,
            n_x: 101,
            z_half_width: 4.0,
            n_z: 101,
            n_steps: 200,
            sweep_rho: DEFAULT_RHOS.to_vec(),
            sim: SimConfig::default(),
            retain_stride: 1,
            write_paths: false,
            converge: StudySettings::default(),
        }
    }
}

impl RunConfig {
    pub fn grid_x(&self) -> Result<Grid1D> {
        Grid1D::new(self.x_max, self.n_x)
    }

    /// Volatility grid times the log-price window centred on the evaluation price.
    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::centered(self.grid_x()?, self.eval_point.price, self.z_half_width, self.n_z)
    }

    /// Canonical listing of every effective value, one `key = value` per line.
    pub fn echo(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("k", fmt17(p.k));
        put("rho", fmt17(p.rho));
        put("delta", fmt17(p.delta));
        put("sigma1", fmt17(p.sigma1));
        put("mu", fmt17(p.mu));
        put("sigma0", fmt17(p.sigma0));
        put("T", fmt17(p.maturity));
        match &self.payoff {
            Payoff::Call { strike } => {
                put("payoff", "call".into());
                put("strike", fmt17(*strike));
            }
            Payoff::Put { strike } => {
                put("payoff", "put".into());
                put("strike", fmt17(*strike));
            }
            Payoff::Constant { value } => {
                put("payoff", "constant".into());
                put("payoff_value", fmt17(*value));
            }
            Payoff::Tabulated(_) => {
                put("payoff", "table".into());
                put("payoff_table", self.payoff_table.clone().unwrap_or_default());
            }
        }
        put("x_max", fmt17(self.x_max));
        put("n_x", self.n_x.to_string());
        put("z_half_width", fmt17(self.z_half_width));
        put("n_z", self.n_z.to_string());
        put("n_steps", self.n_steps.to_string());
        put("sigma_obs", fmt17(self.eval_point.sigma));
        put("p_obs", fmt17(self.eval_point.price));
        put(
            "sweep_rho",
            self.sweep_rho.iter().map(|r| fmt17(*r)).collect::<Vec<_>>().join(", "),
        );
        put("n_paths", self.sim.n_paths.to_string());
        put("mc_steps", self.sim.n_steps.to_string());
        put("seed", self.sim.seed.to_string());
        put("strategy", self.sim.strategy.name());
        put("retain_stride", self.retain_stride.to_string());
        put("write_paths", self.write_paths.to_string());
        let c = &self.converge;
        put("converge_nodes", c.space_nodes.to_string());
        put("converge_steps", c.space_steps.to_string());
        put("converge_time_nodes", c.time_nodes.to_string());
        put("converge_time_steps", c.time_steps.to_string());
        put("converge_halvings", c.halvings.to_string());
        s
    }

    /// First 16 hex digits of the SHA-256 of the echo (and of the table
    /// samples, for a tabulated payoff).
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.echo().as_bytes());
        if let Payoff::Tabulated(t) = &self.payoff {
            for v in t.sigmas().iter().chain(t.prices()).chain(t.values()) {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// `# config_hash=…`, the first line of every output file.
    pub fn header(&self) -> String {
        format!("# config_hash={}", self.hash())
    }
}

fn config_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>()
        .map_err(|e| config_err(line, format!("`{key}`: cannot parse `{v}`: {e}")))
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    let x: f64 = parse_num(line, key, v)?;
    if !x.is_finite() {
        return Err(config_err(line, format!("`{key}` must be finite, got `{v}`")));
    }
    Ok(x)
}

fn parse_strategy(line: usize, v: &str) -> Result<Strategy> {
    match v {
        "tracking" => Ok(Strategy::Tracking),
        "none" => Ok(Strategy::None),
        _ => match v.strip_prefix("constant:") {
            Some(c) => Ok(Strategy::Constant(parse_f64(line, "strategy", c.trim())?)),
            None => Err(config_err(
                line,
                format!("`strategy` must be tracking, none or constant:<shares>, got `{v}`"),
            )),
        },
    }
}

/// Reads a `sigma,P,value` table covering a full rectangle of samples.
pub fn parse_payoff_table(text: &str) -> Result<PayoffTable> {
    let mut rows = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("sigma") {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != 3 {
            return Err(Error::Format(format!("payoff table line {}: expected sigma,P,value", n + 1)));
        }
        let mut v = [0.0; 3];
        for (slot, c) in v.iter_mut().zip(&cells) {
            *slot = c
                .parse()
                .map_err(|e| Error::Format(format!("payoff table line {}: {e}", n + 1)))?;
        }
        rows.push(v);
    }
    let axis = |k: usize| {
        let mut a: Vec<f64> = rows.iter().map(|r| r[k]).collect();
        a.sort_by(f64::total_cmp);
        a.dedup();
        a
    };
    let (sigmas, prices) = (axis(0), axis(1));
    let mut values = vec![f64::NAN; sigmas.len() * prices.len()];
    for r in &rows {
        let i = sigmas.partition_point(|&s| s < r[0]);
        let j = prices.partition_point(|&p| p < r[1]);
        let slot = &mut values[i * prices.len() + j];
        if !slot.is_nan() {
            return Err(Error::Format(format!("payoff table repeats sample ({}, {})", r[0], r[1])));
        }
        *slot = r[2];
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Format("payoff table does not cover a full sigma x P rectangle".into()));
    }
    PayoffTable::new(sigmas, prices, values)
}

/// Reads and parses a config file; table paths are relative to its folder.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
    parse_config_in(&text, path.parent().unwrap_or(Path::new(".")))
}

/// Parses a config with table paths resolved against the working directory.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_in(text, Path::new("."))
}

/// Parses a config; a `payoff_table` path is resolved against `base`.
pub fn parse_config_in(text: &str, base: &Path) -> Result<RunConfig> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut entries: Vec<(usize, String, String)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| config_err(line, format!("expected `key = value`, got `{body}`")))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(config_err(line, format!("expected `key = value`, got `{body}`")));
        }
        if let Some(first) = seen.insert(k.to_string(), line) {
            return Err(config_err(line, format!("`{k}` already set on line {first}")));
        }
        entries.push((line, k.to_string(), v.to_string()));
    }

    let mut c = RunConfig::default();
    let mut payoff_kind: Option<(usize, String)> = None;
    let mut strike: Option<f64> = None;
    let mut payoff_value: Option<f64> = None;
    let mut sigma_obs: Option<f64> = None;
    let mut p_obs: Option<f64> = None;

    for (line, k, v) in &entries {
        let line = *line;
        let v = v.as_str();
        match k.as_str() {
            "k" => c.params.k = parse_f64(line, k, v)?,
            "rho" => c.params.rho = parse_f64(line, k, v)?,
            "delta" => c.params.delta = parse_f64(line, k, v)?,
            "sigma1" => c.params.sigma1 = parse_f64(line, k, v)?,
            "mu" => c.params.mu = parse_f64(line, k, v)?,
            "sigma0" => c.params.sigma0 = parse_f64(line, k, v)?,
            "T" => c.params.maturity = parse_f64(line, k, v)?,
            "payoff" => payoff_kind = Some((line, v.to_string())),
            "strike" => strike = Some(parse_f64(line, k, v)?),
            "payoff_value" => payoff_value = Some(parse_f64(line, k, v)?),
            "payoff_table" => c.payoff_table = Some(v.to_string()),
            "x_max" => c.x_max = parse_f64(line, k, v)?,
            "n_x" => c.n_x = parse_num(line, k, v)?,
            "z_half_width" => c.z_half_width = parse_f64(line, k, v)?,
            "n_z" => c.n_z = parse_num(line, k, v)?,
            "n_steps" => c.n_steps = parse_num(line, k, v)?,
            "sigma_obs" => sigma_obs = Some(parse_f64(line, k, v)?),
            "p_obs" => p_obs = Some(parse_f64(line, k, v)?),
            "sweep_rho" => {
                c.sweep_rho = v
                    .split(',')
                    .map(|r| parse_f64(line, k, r.trim()))
                    .collect::<Result<_>>()?;
            }
            "n_paths" => c.sim.n_paths = parse_num(line, k, v)?,
            "mc_steps" => c.sim.n_steps = parse_num(line, k, v)?,
            "seed" => c.sim.seed = parse_num(line, k, v)?,
            "strategy" => c.sim.strategy = parse_strategy(line, v)?,
            "retain_stride" => c.retain_stride = parse_num(line, k, v)?,
            "write_paths" => c.write_paths = parse_num(line, k, v)?,
            "converge_nodes" => c.converge.space_nodes = parse_num(line, k, v)?,
            "converge_steps" => c.converge.space_steps = parse_num(line, k, v)?,
            "converge_time_nodes" => c.converge.time_nodes = parse_num(line, k, v)?,
            "converge_time_steps" => c.converge.time_steps = parse_num(line, k, v)?,
            "converge_halvings" => c.converge.halvings = parse_num(line, k, v)?,
            other => return Err(config_err(line, format!("unknown key `{other}`"))),
        }
    }

    let line_of = |key: &str| seen.get(key).copied().unwrap_or(0);
    let kind = payoff_kind.clone().map(|(_, k)| k).unwrap_or_else(|| "call".into());
    let misplaced = |key: &str| {
        config_err(
            line_of(key),
            format!("`{key}` does not apply to payoff `{kind}`"),
        )
    };
    c.payoff = match kind.as_str() {
        "call" | "put" => {
            if payoff_value.is_some() {
                return Err(misplaced("payoff_value"));
            }
            if c.payoff_table.is_some() {
                return Err(misplaced("payoff_table"));
            }
            let strike = strike.unwrap_or(1.0);
            if kind == "call" {
                Payoff::Call { strike }
            } else {
                Payoff::Put { strike }
            }
        }
        "constant" => {
            if strike.is_some() {
                return Err(misplaced("strike"));
            }
            if c.payoff_table.is_some() {
                return Err(misplaced("payoff_table"));
            }
            Payoff::Constant {
                value: payoff_value.ok_or_else(|| config_err(line_of("payoff"), "payoff `constant` needs `payoff_value`"))?,
            }
        }
        "table" => {
            if strike.is_some() {
                return Err(misplaced("strike"));
            }
            if payoff_value.is_some() {
                return Err(misplaced("payoff_value"));
            }
            let rel = c
                .payoff_table
                .clone()
                .ok_or_else(|| config_err(line_of("payoff"), "payoff `table` needs `payoff_table`"))?;
            let path: PathBuf = base.join(&rel);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| config_err(line_of("payoff_table"), format!("cannot read {}: {e}", path.display())))?;
            Payoff::Tabulated(
                parse_payoff_table(&text).map_err(|e| config_err(line_of("payoff_table"), e.to_string()))?,
            )
        }
        other => {
            return Err(config_err(
                line_of("payoff"),
                format!("`payoff` must be call, put, constant or table, got `{other}`"),
            ))
        }
    };
    c.eval_point = EvalPoint {
        sigma: sigma_obs.unwrap_or(c.params.sigma1),
        price: p_obs.unwrap_or_else(|| c.payoff.reference_price()),
    };

    validate(&c).map_err(|e| match e {
        Error::InvalidParameter { name, reason } => config_err(line_of(name), format!("`{name}` {reason}")),
        Error::Config { .. } => e,
        other => config_err(0, other.to_string()),
    })?;
    Ok(c)
}

fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

fn validate(c: &RunConfig) -> Result<()> {
    c.params.validate()?;
    c.payoff.validate()?;
    let grid = c.grid()?;
    if c.x_max <= c.params.sigma1 {
        return Err(invalid("x_max", format!("must exceed sigma1 = {}", c.params.sigma1)));
    }
    if c.n_steps == 0 {
        return Err(invalid("n_steps", "must be >= 1"));
    }
    if !(c.eval_point.sigma > 0.0 && c.eval_point.sigma <= c.x_max) {
        return Err(invalid("sigma_obs", format!("must lie in (0, x_max], got {}", c.eval_point.sigma)));
    }
    if !grid.contains(c.eval_point.sigma, c.eval_point.price.ln()) {
        return Err(invalid("p_obs", "evaluation point lies outside the grid"));
    }
    if let Payoff::Tabulated(t) = &c.payoff {
        let (sl, sh) = (t.sigmas()[0], *t.sigmas().last().expect("non-empty axis"));
        let (pl, ph) = (t.prices()[0], *t.prices().last().expect("non-empty axis"));
        if sl > 0.0 || sh < c.x_max || pl > grid.z_min().exp() || ph < grid.z_max().exp() {
            return Err(invalid("payoff_table", "table must cover the whole solver grid"));
        }
    }
    if c.sweep_rho.is_empty() {
        return Err(invalid("sweep_rho", "needs at least one value"));
    }
    if let Some(r) = c.sweep_rho.iter().find(|r| !(-1.0..=1.0).contains(*r)) {
        return Err(invalid("sweep_rho", format!("values must lie in [-1, 1], got {r}")));
    }
    c.sim.validate()?;
    if c.retain_stride == 0 {
        return Err(invalid("retain_stride", "must be >= 1"));
    }
    let s = &c.converge;
    if s.space_nodes < 3 || s.time_nodes < 3 {
        return Err(invalid("converge_nodes", "need at least 3 nodes"));
    }
    if s.space_steps == 0 || s.time_steps == 0 {
        return Err(invalid("converge_steps", "must be >= 1"));
    }
    if s.halvings == 0 || s.halvings > 6 {
        return Err(invalid("converge_halvings", "must lie in 1..=6"));
    }
    Ok(())
}
