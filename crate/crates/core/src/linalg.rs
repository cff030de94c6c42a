//! Linear solvers: Thomas elimination for the 1D implicit steps and a
//! Jacobi-preconditioned BiCGStab for the 2D ones.

use crate::error::{Error, Result};

/// Solves a tridiagonal system in place. `lower[i]` multiplies `x[i-1]` and
/// `upper[i]` multiplies `x[i+1]`; `lower[0]` and `upper[n-1]` are ignored.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) -> Result<()> {
    let n = rhs.len();
    assert!(lower.len() == n && diag.len() == n && upper.len() == n);
    let mut c = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 {
        return Err(Error::Domain("singular tridiagonal system".into()));
    }
    c[0] = upper[0] / pivot;
    rhs[0] /= pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * c[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::Domain("singular tridiagonal system".into()));
        }
        c[i] = upper[i] / pivot;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
    Ok(())
}

/// A square matrix known only through its action.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn diagonal(&self) -> Vec<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovSettings {
    /// Target `‖b − Ax‖ / ‖b‖`.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for KrylovSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_iter: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovReport {
    pub iterations: usize,
    pub rel_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn residual<A: LinearOperator>(a: &A, b: &[f64], x: &[f64], r: &mut [f64]) {
    a.apply(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
}

/// BiCGStab with a Jacobi (diagonal) right preconditioner. `x` holds the
/// initial guess on entry; a guess that already meets the tolerance is
/// returned untouched.
pub fn bicgstab<A: LinearOperator>(
    a: &A,
    b: &[f64],
    x: &mut [f64],
    settings: KrylovSettings,
) -> Result<KrylovReport> {
    let n = a.dim();
    assert!(b.len() == n && x.len() == n);
    let b_norm = norm(b);
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(KrylovReport {
            iterations: 0,
            rel_residual: 0.0,
        });
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d != 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let mut r = vec![0.0; n];
    residual(a, b, x, &mut r);
    let mut rel = norm(&r) / b_norm;
    if !rel.is_finite() {
        return Err(Error::NonFinite("Krylov residual"));
    }
    if rel <= settings.rel_tol {
        return Ok(KrylovReport {
            iterations: 0,
            rel_residual: rel,
        });
    }

    let mut r_hat = r.clone();
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p_hat = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut s_hat = vec![0.0; n];
    let mut t = vec![0.0; n];
    let (mut rho_old, mut alpha, mut omega) = (1.0, 1.0, 1.0);

    for it in 1..=settings.max_iter {
        let rho = dot(&r_hat, &r);
        if rho == 0.0 || omega == 0.0 {
            // Breakdown: restart the shadow space from the current residual.
            residual(a, b, x, &mut r);
            r_hat.copy_from_slice(&r);
            p.iter_mut().for_each(|e| *e = 0.0);
            v.iter_mut().for_each(|e| *e = 0.0);
            rho_old = 1.0;
            alpha = 1.0;
            omega = 1.0;
            continue;
        }
        let beta = (rho / rho_old) * (alpha / omega);
        for k in 0..n {
            p[k] = r[k] + beta * (p[k] - omega * v[k]);
            p_hat[k] = p[k] * inv_diag[k];
        }
        a.apply(&p_hat, &mut v);
        alpha = rho / dot(&r_hat, &v);
        for k in 0..n {
            s[k] = r[k] - alpha * v[k];
        }
        if norm(&s) / b_norm <= settings.rel_tol {
            for k in 0..n {
                x[k] += alpha * p_hat[k];
            }
            residual(a, b, x, &mut r);
            rel = norm(&r) / b_norm;
            if rel <= settings.rel_tol {
                return Ok(KrylovReport {
                    iterations: it,
                    rel_residual: rel,
                });
            }
            rho_old = rho;
            continue;
        }
        for k in 0..n {
            s_hat[k] = s[k] * inv_diag[k];
        }
        a.apply(&s_hat, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for k in 0..n {
            x[k] += alpha * p_hat[k] + omega * s_hat[k];
            r[k] = s[k] - omega * t[k];
        }
        rel = norm(&r) / b_norm;
        if !rel.is_finite() {
            return Err(Error::NonFinite("Krylov iteration"));
        }
        if rel <= settings.rel_tol {
            // Guard against drift of the recursive residual.
            residual(a, b, x, &mut r);
            rel = norm(&r) / b_norm;
            if rel <= settings.rel_tol {
                return Ok(KrylovReport {
                    iterations: it,
                    rel_residual: rel,
                });
            }
        }
        rho_old = rho;
    }
    Err(Error::KrylovDiverged {
        iterations: settings.max_iter,
        residual: rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Dense {
        n: usize,
        a: Vec<f64>,
    }

    impl LinearOperator for Dense {
        fn dim(&self) -> usize {
            self.n
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for i in 0..self.n {
                y[i] = (0..self.n).map(|j| self.a[i * self.n + j] * x[j]).sum();
            }
        }
        fn diagonal(&self) -> Vec<f64> {
            (0..self.n).map(|i| self.a[i * self.n + i]).collect()
        }
    }

    #[test]
    fn thomas_matches_known_solution() {
        let n = 6;
        let lower = vec![-1.0; n];
        let upper = vec![-1.5; n];
        let diag = vec![4.0; n];
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin() + 2.0).collect();
        let mut rhs: Vec<f64> = (0..n)
            .map(|i| {
                let mut v = diag[i] * x[i];
                if i > 0 {
                    v += lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    v += upper[i] * x[i + 1];
                }
                v
            })
            .collect();
        solve_tridiagonal(&lower, &diag, &upper, &mut rhs).unwrap();
        for (a, b) in rhs.iter().zip(&x) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn bicgstab_solves_a_nonsymmetric_system() {
        let n = 30;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 3.0 + (i % 3) as f64;
            if i > 0 {
                a[i * n + i - 1] = -1.2;
            }
            if i + 1 < n {
                a[i * n + i + 1] = -0.4;
            }
            if i + 5 < n {
                a[i * n + i + 5] = 0.3;
            }
        }
        let op = Dense { n, a };
        let exact: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).cos()).collect();
        let mut b = vec![0.0; n];
        op.apply(&exact, &mut b);
        let mut x = vec![0.0; n];
        let rep = bicgstab(&op, &b, &mut x, KrylovSettings::default()).unwrap();
        assert!(rep.rel_residual <= 1e-10);
        for (u, v) in x.iter().zip(&exact) {
            assert!((u - v).abs() < 1e-8);
        }
    }

    #[test]
    fn converged_guess_is_returned_bit_for_bit() {
        let op = Dense {
            n: 2,
            a: vec![2.0, -1.0, -1.0, 2.0],
        };
        let mut x = vec![0.1, 0.3];
        let mut b = vec![0.0; 2];
        op.apply(&x, &mut b);
        let before = x.clone();
        let rep = bicgstab(&op, &b, &mut x, KrylovSettings::default()).unwrap();
        assert_eq!(rep.iterations, 0);
        assert_eq!(x, before);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let n = 40;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 1.0;
            a[i * n + (i + 1) % n] = -0.999;
        }
        let op = Dense { n, a };
        let b: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let mut x = vec![0.0; n];
        let err = bicgstab(
            &op,
            &b,
            &mut x,
            KrylovSettings {
                rel_tol: 1e-14,
                max_iter: 2,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::KrylovDiverged { iterations: 2, .. }));
    }
}
