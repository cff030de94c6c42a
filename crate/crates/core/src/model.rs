//! Market model: parameters, the coefficient functions of the hedging
//! equations and the terminal payoff.
//!
//! Volatility follows `dσ = g(σ) dt + k σ dW₂` with mean reversion
//! `g(σ) = -δ σ (σ - σ₁)`, and the stock `dP = σ f(σ) P dt + σ P dW₁` where
//! `σ f(σ)` is the drift. `f` is capped at `μ / σ₀` below the cutoff `σ₀`
//! so that it stays bounded near zero volatility.

use crate::error::{Error, Result};

/// Model constants. All are time-homogeneous; there is no interest rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Vol-of-vol.
    pub k: f64,
    /// Correlation between the price and volatility Brownian motions.
    pub rho: f64,
    /// Mean-reversion speed of volatility.
    pub delta: f64,
    /// Long-run volatility level.
    pub sigma1: f64,
    /// Drift.
    pub mu: f64,
    /// Volatility below which the drift ratio `f` is frozen.
    pub sigma0: f64,
    /// Maturity.
    pub maturity: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            k: 0.4,
            rho: 0.0,
            delta: 2.0,
            sigma1: 0.153,
            mu: 0.7,
            sigma0: 0.01,
            maturity: 1.0,
        }
    }
}

fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

impl ModelParams {
    pub fn with_rho(self, rho: f64) -> Self {
        Self { rho, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("k", self.k),
            ("rho", self.rho),
            ("delta", self.delta),
            ("sigma1", self.sigma1),
            ("mu", self.mu),
            ("sigma0", self.sigma0),
            ("T", self.maturity),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.k <= 0.0 {
            return Err(invalid("k", format!("must be > 0, got {}", self.k)));
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(invalid(
                "rho",
                format!("must lie in [-1, 1], got {}", self.rho),
            ));
        }
        if self.delta <= 0.0 {
            return Err(invalid("delta", format!("must be > 0, got {}", self.delta)));
        }
        if !(self.sigma1 > 0.0 && self.sigma1 < 1.0) {
            return Err(invalid(
                "sigma1",
                format!("must lie in (0, 1), got {}", self.sigma1),
            ));
        }
        if self.mu < 0.0 {
            return Err(invalid("mu", format!("must be >= 0, got {}", self.mu)));
        }
        if self.sigma0 <= 0.0 {
            return Err(invalid(
                "sigma0",
                format!("must be > 0, got {}", self.sigma0),
            ));
        }
        if self.maturity <= 0.0 {
            return Err(invalid("T", format!("must be > 0, got {}", self.maturity)));
        }
        Ok(())
    }

    /// Drift-to-volatility ratio, `μ/σ₀` below the cutoff and `μ/x` above.
    /// Callers guarantee `x >= 0`; see [`ModelParams::eval_f`] for the checked form.
    #[inline]
    pub fn f(&self, x: f64) -> f64 {
        if x <= self.sigma0 {
            self.mu / self.sigma0
        } else {
            self.mu / x
        }
    }

    /// `x f(x) = μ min(x/σ₀, 1)`: the stock drift at volatility `x`.
    #[inline]
    pub fn x_f(&self, x: f64) -> f64 {
        if x <= self.sigma0 {
            self.mu * x / self.sigma0
        } else {
            self.mu
        }
    }

    #[inline]
    pub fn g(&self, x: f64) -> f64 {
        -self.delta * x * (x - self.sigma1)
    }

    #[inline]
    pub fn g1(&self, x: f64) -> f64 {
        self.g(x) - 2.0 * self.rho * self.k * self.x_f(x)
    }

    #[inline]
    pub fn g2(&self, x: f64) -> f64 {
        self.g(x) - self.rho * self.k * self.x_f(x)
    }

    /// `1 - ρ²`, exactly zero at `ρ = ±1`.
    #[inline]
    pub fn decorrelation(&self) -> f64 {
        1.0 - self.rho * self.rho
    }

    pub fn eval_f(&self, x: f64) -> Result<f64> {
        check_vol(x).map(|x| self.f(x))
    }

    pub fn eval_g(&self, x: f64) -> Result<f64> {
        check_vol(x).map(|x| self.g(x))
    }

    pub fn eval_g1(&self, x: f64) -> Result<f64> {
        check_vol(x).map(|x| self.g1(x))
    }

    pub fn eval_g2(&self, x: f64) -> Result<f64> {
        check_vol(x).map(|x| self.g2(x))
    }
}

fn check_vol(x: f64) -> Result<f64> {
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Domain(format!("volatility must be finite and >= 0, got {x}")))
    }
}

/// Samples of a payoff `F(σ, P)` on a rectangular table, looked up bilinearly.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffTable {
    sigmas: Vec<f64>,
    prices: Vec<f64>,
    /// Row-major, one row per sigma.
    values: Vec<f64>,
}

fn check_axis(name: &'static str, axis: &[f64]) -> Result<()> {
    if axis.len() < 2 {
        return Err(invalid(name, "table axis needs at least two samples"));
    }
    if axis.iter().any(|v| !v.is_finite()) || axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(name, "table axis must be finite and strictly increasing"));
    }
    Ok(())
}

impl PayoffTable {
    pub fn new(sigmas: Vec<f64>, prices: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_axis("payoff_table.sigma", &sigmas)?;
        check_axis("payoff_table.price", &prices)?;
        if values.len() != sigmas.len() * prices.len() {
            return Err(invalid(
                "payoff_table",
                format!(
                    "expected {} values, got {}",
                    sigmas.len() * prices.len(),
                    values.len()
                ),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("payoff_table", "values must be finite"));
        }
        Ok(Self {
            sigmas,
            prices,
            values,
        })
    }

    /// Tabulates `f(σ, P)` on the given axes.
    pub fn from_fn(sigmas: Vec<f64>, prices: Vec<f64>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = sigmas
            .iter()
            .flat_map(|&s| prices.iter().map(move |&p| (s, p)))
            .map(|(s, p)| f(s, p))
            .collect();
        Self::new(sigmas, prices, values)
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lookup(&self, sigma: f64, price: f64) -> Result<f64> {
        let (i, ws) = bracket(&self.sigmas, sigma).ok_or_else(|| {
            Error::Domain(format!("sigma {sigma} outside payoff table"))
        })?;
        let (j, wp) = bracket(&self.prices, price).ok_or_else(|| {
            Error::Domain(format!("price {price} outside payoff table"))
        })?;
        let np = self.prices.len();
        let v = |a: usize, b: usize| self.values[a * np + b];
        Ok((1.0 - ws) * ((1.0 - wp) * v(i, j) + wp * v(i, j + 1))
            + ws * ((1.0 - wp) * v(i + 1, j) + wp * v(i + 1, j + 1)))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Index of the cell containing `q` and the fractional offset within it.
fn bracket(axis: &[f64], q: f64) -> Option<(usize, f64)> {
    let (lo, hi) = (axis[0], axis[axis.len() - 1]);
    if !(q >= lo && q <= hi) {
        return None;
    }
    let cell = axis.partition_point(|&a| a <= q).clamp(1, axis.len() - 1) - 1;
    let w = (q - axis[cell]) / (axis[cell + 1] - axis[cell]);
    Some((cell, w))
}

/// Terminal claim `F(P, σ)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Payoff {
    Call { strike: f64 },
    Put { strike: f64 },
    Constant { value: f64 },
    Tabulated(PayoffTable),
}

impl Default for Payoff {
    fn default() -> Self {
        Payoff::Call { strike: 1.0 }
    }
}

impl Payoff {
    pub fn validate(&self) -> Result<()> {
        match self {
            Payoff::Call { strike } | Payoff::Put { strike } => {
                if !(strike.is_finite() && *strike > 0.0) {
                    return Err(invalid("strike", format!("must be > 0, got {strike}")));
                }
            }
            Payoff::Constant { value } => {
                if !value.is_finite() {
                    return Err(invalid("payoff_value", "must be finite"));
                }
            }
            Payoff::Tabulated(_) => {}
        }
        Ok(())
    }

    /// Value of the claim at volatility `x` and price `y > 0`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::Domain(format!("price must be > 0, got {y}")));
        }
        Ok(match self {
            Payoff::Call { strike } => (y - strike).max(0.0),
            Payoff::Put { strike } => (strike - y).max(0.0),
            Payoff::Constant { value } => *value,
            Payoff::Tabulated(table) => table.lookup(x, y)?,
        })
    }

    /// A representative price scale, used to centre the log-price window.
    pub fn reference_price(&self) -> f64 {
        match self {
            Payoff::Call { strike } | Payoff::Put { strike } => *strike,
            _ => 1.0,
        }
    }

    /// `(min F, max F)` for payoffs bounded on `(0, ∞)`.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        match self {
            Payoff::Constant { value } => Some((*value, *value)),
            Payoff::Tabulated(t) => Some((t.min_value(), t.max_value())),
            Payoff::Put { strike } => Some((0.0, *strike)),
            Payoff::Call { .. } => None,
        }
    }
}
