//! Picard backward Euler for `u1` against the explicit Hopf–Cole reference.

mod support;

use hedgepde::u1::solve_u1;
use hedgepde::{Grid1D, ModelParams};

const ORACLE_NODES: usize = 801;
const ORACLE_STEPS: usize = 200_000;

/// Relative max-norm gap on `[lo, hi]`.
fn gap(oracle: &[f64], rho: f64, nodes: usize, steps: usize, lo: f64, hi: f64) -> f64 {
    let p = ModelParams::default().with_rho(rho);
    let tr = solve_u1(&p, Grid1D::new(1.0, nodes).unwrap(), steps).unwrap();
    let (mut d, mut s) = (0.0f64, 0.0f64);
    for (i, &v) in oracle.iter().enumerate() {
        let x = i as f64 / (oracle.len() - 1) as f64;
        if (lo - 1e-12..=hi + 1e-12).contains(&x) {
            d = d.max((tr.last().interpolate(x).unwrap() - v).abs());
            s = s.max(v.abs());
        }
    }
    d / s
}

fn oracle(rho: f64) -> Vec<f64> {
    support::explicit_u1(&ModelParams::default().with_rho(rho), 1.0, ORACLE_NODES, ORACLE_STEPS)
}

#[test]
fn agrees_away_from_the_low_volatility_layer() {
    for rho in [0.0, -0.5] {
        let o = oracle(rho);
        let g = gap(&o, rho, 401, 800, 0.1, 0.5);
        assert!(g < 1.5e-3, "rho={rho}: {g:e}");
    }
    let o = oracle(0.0);
    let g = gap(&o, 0.0, 101, 200, 0.1, 0.5);
    assert!(g < 1e-2, "default resolution: {g:e}");
}

#[test]
fn gap_near_the_layer_shrinks_under_refinement() {
    let o = oracle(0.0);
    let gaps: Vec<f64> = [(101, 200), (201, 400), (401, 800)]
        .iter()
        .map(|&(n, s)| gap(&o, 0.0, n, s, 0.05, 0.5))
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < 0.8 * w[0]), "{gaps:?}");
}
