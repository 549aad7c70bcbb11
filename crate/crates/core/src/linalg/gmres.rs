//! Restarted GMRES with right preconditioning.

use super::csr::{dot, norm2, CsrMatrix};
use crate::error::{Error, NonConvergence, Result};

pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }
}

/// Approximate inverse `z = M^{-1} r`.
pub trait Preconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()>;
}

/// Preconditioner backed by a closure, handy for tests and exact inverses.
pub struct FnPreconditioner<F>(pub F);

impl<F: Fn(&[f64], &mut [f64]) -> Result<()>> Preconditioner for FnPreconditioner<F> {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        (self.0)(r, z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    /// Relative residual target `||b - A x|| <= tol ||b||`.
    pub tol: f64,
    pub restart: usize,
    pub max_iter: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        GmresOptions {
            tol: 1e-8,
            restart: 200,
            max_iter: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GmresResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Residual norm estimate after each iteration, preceded by the
    /// initial residual of every restart cycle.
    pub history: Vec<f64>,
}

pub fn gmres(
    op: &dyn LinearOperator,
    b: &[f64],
    precond: Option<&dyn Preconditioner>,
    opts: GmresOptions,
    x0: Option<&[f64]>,
) -> Result<GmresResult> {
    let n = op.dim();
    if b.len() != n {
        return Err(Error::invalid("GMRES right-hand side length differs from operator size"));
    }
    if !(opts.tol > 0.0) || opts.restart == 0 {
        return Err(Error::invalid("GMRES needs tol > 0 and restart >= 1"));
    }
    let mut x = match x0 {
        Some(x0) if x0.len() == n => x0.to_vec(),
        Some(_) => return Err(Error::invalid("GMRES initial guess has the wrong length")),
        None => vec![0.0; n],
    };
    let bnorm = norm2(b);
    let mut history = Vec::new();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        history.push(0.0);
        return Ok(GmresResult {
            x,
            iterations: 0,
            history,
        });
    }
    let target = opts.tol * bnorm;
    let m = opts.restart;
    let precondition = |v: &[f64], z: &mut [f64]| -> Result<()> {
        match precond {
            Some(p) => p.apply(v, z),
            None => {
                z.copy_from_slice(v);
                Ok(())
            }
        }
    };

    let mut r = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut iterations = 0;
    let mut best = (f64::INFINITY, x.clone());
    loop {
        op.apply(&x, &mut r);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        let beta = norm2(&r);
        history.push(beta);
        if beta < best.0 {
            best = (beta, x.clone());
        }
        if beta <= target {
            return Ok(GmresResult {
                x,
                iterations,
                history,
            });
        }
        if iterations >= opts.max_iter {
            return Err(Error::NonConvergence(Box::new(NonConvergence {
                what: "GMRES".into(),
                iterations,
                best: best.1,
                history,
            })));
        }
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k = 0;
        while k < m && iterations < opts.max_iter {
            precondition(&basis[k], &mut z)?;
            op.apply(&z, &mut w);
            for (i, v) in basis.iter().enumerate() {
                let hik = dot(&w, v);
                h[i][k] = hik;
                for (wj, vj) in w.iter_mut().zip(v) {
                    *wj -= hik * vj;
                }
            }
            let hnext = norm2(&w);
            h[k + 1][k] = hnext;
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let denom = h[k][k].hypot(h[k + 1][k]);
            if denom == 0.0 {
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = h[k][k] / denom;
                sn[k] = h[k + 1][k] / denom;
            }
            h[k][k] = denom;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            iterations += 1;
            k += 1;
            let res = g[k].abs();
            history.push(res);
            if res <= target || hnext <= 1e-14 * beta {
                break;
            }
            basis.push(w.iter().map(|v| v / hnext).collect());
        }
        // y = H^{-1} g, then x += M^{-1} V y
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| h[i][j] * y[j]).sum();
            y[i] = if h[i][i] != 0.0 { (g[i] - s) / h[i][i] } else { 0.0 };
        }
        let mut update = vec![0.0; n];
        for (yi, v) in y.iter().zip(&basis) {
            for (u, vi) in update.iter_mut().zip(v) {
                *u += yi * vi;
            }
        }
        precondition(&update, &mut z)?;
        for (xi, zi) in x.iter_mut().zip(&z) {
            *xi += zi;
        }
    }
}
