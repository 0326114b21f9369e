//! Matrix-free conjugate gradients for the symmetric positive definite
//! systems assembled on grid interiors.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgSettings {
    /// Relative residual target `|b - Ax| <= tol |b|`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CgSettings {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOutcome {
    pub iterations: usize,
    /// Final relative residual.
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` starting from the initial guess in `x`.
///
/// `apply(p, out)` must write `A p` into `out` and act as a symmetric positive
/// definite operator on the subspace the caller works in (entries the
/// operator ignores must be zero in `b` and `x`).
pub fn conjugate_gradient<F>(apply: F, b: &[f64], x: &mut [f64], cfg: CgSettings) -> Result<CgOutcome>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgOutcome {
            iterations: 0,
            residual: 0.0,
        });
    }
    let mut ap = vec![0.0; n];
    apply(x, &mut ap);
    let mut r: Vec<f64> = b.iter().zip(&ap).map(|(bi, ai)| bi - ai).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let target = cfg.tol * bnorm;
    if rr.sqrt() <= target {
        return Ok(CgOutcome {
            iterations: 0,
            residual: rr.sqrt() / bnorm,
        });
    }
    for it in 1..=cfg.max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::LinearSolve {
                iterations: it,
                residual: rr.sqrt() / bnorm,
                reason: "operator is not positive definite".into(),
            });
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        if rr_new.sqrt() <= target {
            // confirm with the true residual to keep drift out of the report
            apply(x, &mut ap);
            let true_res = b
                .iter()
                .zip(&ap)
                .map(|(bi, ai)| (bi - ai) * (bi - ai))
                .sum::<f64>()
                .sqrt();
            if true_res <= target {
                return Ok(CgOutcome {
                    iterations: it,
                    residual: true_res / bnorm,
                });
            }
            for i in 0..n {
                r[i] = b[i] - ap[i];
            }
            rr = dot(&r, &r);
            p.copy_from_slice(&r);
            continue;
        }
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
    }
    Err(Error::LinearSolve {
        iterations: cfg.max_iter,
        residual: rr.sqrt() / bnorm,
        reason: "maximum iterations reached".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_tridiagonal_system() {
        let n = 50;
        let apply = |x: &[f64], out: &mut [f64]| {
            for i in 0..n {
                let l = if i > 0 { x[i - 1] } else { 0.0 };
                let r = if i + 1 < n { x[i + 1] } else { 0.0 };
                out[i] = 2.5 * x[i] - l - r;
            }
        };
        let exact: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut b = vec![0.0; n];
        apply(&exact, &mut b);
        let mut x = vec![0.0; n];
        let out = conjugate_gradient(apply, &b, &mut x, CgSettings::default()).unwrap();
        assert!(out.residual <= 1e-10);
        for (a, e) in x.iter().zip(&exact) {
            assert!((a - e).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let mut x = vec![1.0; 4];
        let out = conjugate_gradient(
            |p, o| o.copy_from_slice(p),
            &[0.0; 4],
            &mut x,
            CgSettings::default(),
        )
        .unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(x, vec![0.0; 4]);
    }

    #[test]
    fn reports_non_convergence() {
        let n = 200;
        let apply = |x: &[f64], out: &mut [f64]| {
            for i in 0..n {
                let l = if i > 0 { x[i - 1] } else { 0.0 };
                let r = if i + 1 < n { x[i + 1] } else { 0.0 };
                out[i] = 2.0 * x[i] - l - r;
            }
        };
        let b = vec![1.0; n];
        let mut x = vec![0.0; n];
        let cfg = CgSettings {
            tol: 1e-12,
            max_iter: 3,
        };
        assert!(matches!(
            conjugate_gradient(apply, &b, &mut x, cfg),
            Err(Error::LinearSolve { .. })
        ));
    }
}
