//! Independent reference computations shared by the integration suites.
#![allow(dead_code)]

use hedgepde::ModelParams;

/// Brute-force explicit Euler reference for `u1 = ln a` at `t = T` on
/// `n_x` nodes over `[0, x_max]`.
///
/// Goes through the Hopf–Cole substitution `w = exp(β u1)`, `β = 1 − 2ρ²`,
/// which turns the quadratic-gradient equation into the linear
///
/// ```text
/// ∂w/∂t = (k²x²/2) ∂²w/∂x² + g₁ ∂w/∂x − β f² w
/// ```
///
/// stepped with central differences. `w` is renormalised every step and the
/// scale carried as a logarithm, since `ln w` reaches thousands at `ρ² = 1`.
/// Closures match the implicit solver: exact ODE at `x = 0`, copy at `x_max`.
pub fn explicit_u1(params: &ModelParams, x_max: f64, n_x: usize, n_steps: usize) -> Vec<f64> {
    let h = x_max / (n_x - 1) as f64;
    let dt = params.maturity / n_steps as f64;
    let beta = 1.0 - 2.0 * params.rho * params.rho;
    let f = |x: f64| if x <= params.sigma0 { params.mu / params.sigma0 } else { params.mu / x };
    let g1 = |x: f64| {
        -params.delta * x * (x - params.sigma1) - 2.0 * params.rho * params.k * x * f(x)
    };
    let xs: Vec<f64> = (0..n_x).map(|i| i as f64 * h).collect();
    let diff: Vec<f64> = xs.iter().map(|x| 0.5 * params.k * params.k * x * x).collect();
    let drift: Vec<f64> = xs.iter().map(|&x| g1(x)).collect();
    let source: Vec<f64> = xs.iter().map(|&x| f(x) * f(x)).collect();

    if beta.abs() < 1e-12 {
        // ρ² = ½: the equation is already linear in u1.
        let mut u = vec![0.0; n_x];
        let mut next = vec![0.0; n_x];
        for _ in 0..n_steps {
            next[0] = u[0] - dt * source[0];
            for i in 1..n_x - 1 {
                let ux = (u[i + 1] - u[i - 1]) / (2.0 * h);
                let uxx = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
                next[i] = u[i] + dt * (diff[i] * uxx + drift[i] * ux - source[i]);
            }
            next[n_x - 1] = next[n_x - 2];
            std::mem::swap(&mut u, &mut next);
        }
        return u;
    }

    let mut w = vec![1.0; n_x];
    let mut next = vec![0.0; n_x];
    let mut log_scale = 0.0;
    for _ in 0..n_steps {
        next[0] = w[0] * (-beta * source[0] * dt).exp();
        for i in 1..n_x - 1 {
            let wx = (w[i + 1] - w[i - 1]) / (2.0 * h);
            let wxx = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h);
            next[i] = w[i] + dt * (diff[i] * wxx + drift[i] * wx - beta * source[i] * w[i]);
        }
        next[n_x - 1] = next[n_x - 2];
        let peak = next.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for v in next.iter_mut() {
            *v /= peak;
        }
        log_scale += peak.ln();
        std::mem::swap(&mut w, &mut next);
    }
    w.iter().map(|&v| (v.ln() + log_scale) / beta).collect()
}
