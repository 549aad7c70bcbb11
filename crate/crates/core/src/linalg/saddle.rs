//! Velocity-pressure block systems `[F Bᵀ; B C]`.
//!
//! `C` is zero unless pressure dofs carry essential constraints, in which
//! case it holds their unit diagonal.

use super::csr::{csr_from_triplets, CsrMatrix};
use super::gmres::LinearOperator;
use super::lu::SparseLu;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SaddleSystem {
    f: CsrMatrix,
    b: CsrMatrix,
    bt: CsrMatrix,
    c: CsrMatrix,
    rhs_u: Vec<f64>,
    rhs_p: Vec<f64>,
}

impl SaddleSystem {
    pub fn new(f: CsrMatrix, b: CsrMatrix, rhs_u: Vec<f64>, rhs_p: Vec<f64>) -> Result<Self> {
        let np = b.nrows();
        Self::with_pressure_block(f, b, CsrMatrix::zeros(np, np), rhs_u, rhs_p)
    }

    pub fn with_pressure_block(
        f: CsrMatrix,
        b: CsrMatrix,
        c: CsrMatrix,
        rhs_u: Vec<f64>,
        rhs_p: Vec<f64>,
    ) -> Result<Self> {
        let (nu, np) = (f.nrows(), b.nrows());
        if f.ncols() != nu || b.ncols() != nu || c.nrows() != np || c.ncols() != np {
            return Err(Error::invalid(format!(
                "inconsistent saddle blocks: F {}x{}, B {}x{}, C {}x{}",
                f.nrows(),
                f.ncols(),
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols()
            )));
        }
        if rhs_u.len() != nu || rhs_p.len() != np {
            return Err(Error::invalid("saddle right-hand side does not match block sizes"));
        }
        let bt = b.transpose();
        Ok(SaddleSystem {
            f,
            b,
            bt,
            c,
            rhs_u,
            rhs_p,
        })
    }

    pub fn f(&self) -> &CsrMatrix {
        &self.f
    }

    pub fn b(&self) -> &CsrMatrix {
        &self.b
    }

    pub fn bt(&self) -> &CsrMatrix {
        &self.bt
    }

    pub fn c(&self) -> &CsrMatrix {
        &self.c
    }

    pub fn rhs_u(&self) -> &[f64] {
        &self.rhs_u
    }

    pub fn rhs_p(&self) -> &[f64] {
        &self.rhs_p
    }

    pub fn n_u(&self) -> usize {
        self.f.nrows()
    }

    pub fn n_p(&self) -> usize {
        self.b.nrows()
    }

    /// Full right-hand side `[f; g]`.
    pub fn rhs(&self) -> Vec<f64> {
        let mut r = self.rhs_u.clone();
        r.extend_from_slice(&self.rhs_p);
        r
    }

    pub fn monolithic(&self) -> CsrMatrix {
        let nu = self.n_u();
        let mut trip = Vec::with_capacity(self.f.nnz() + 2 * self.b.nnz() + self.c.nnz());
        for i in 0..nu {
            trip.extend(self.f.row(i).map(|(j, v)| (i, j, v)));
            trip.extend(self.bt.row(i).map(|(j, v)| (i, nu + j, v)));
        }
        for i in 0..self.n_p() {
            trip.extend(self.b.row(i).map(|(j, v)| (nu + i, j, v)));
            trip.extend(self.c.row(i).map(|(j, v)| (nu + i, nu + j, v)));
        }
        let n = self.dim();
        csr_from_triplets(n, n, &trip).expect("block indices are in range")
    }

    /// Factor `s` balancing the pressure block against `F`: the ratio of the
    /// mean `|F_ii|` to the mean diagonal of `B diag(F)⁻¹ Bᵀ`, square-rooted.
    pub fn pressure_scale(&self) -> f64 {
        let fd = self.f.diagonal();
        if fd.is_empty() || self.n_p() == 0 {
            return 1.0;
        }
        let mf = fd.iter().map(|v| v.abs()).sum::<f64>() / fd.len() as f64;
        let ms = (0..self.n_p())
            .map(|i| self.b.row(i).filter(|&(j, _)| fd[j] != 0.0).map(|(j, v)| v * v / fd[j].abs()).sum::<f64>())
            .sum::<f64>()
            / self.n_p() as f64;
        let s = (mf / ms).sqrt();
        if s.is_finite() && s > 0.0 {
            s
        } else {
            1.0
        }
    }

    /// The same system in the unknowns `(u, p / s)` with pressure rows
    /// multiplied by `s`.
    pub fn with_pressure_scale(&self, s: f64) -> Result<SaddleSystem> {
        SaddleSystem::with_pressure_block(
            self.f.clone(),
            self.b.scaled(s),
            self.c.scaled(s * s),
            self.rhs_u.clone(),
            self.rhs_p.iter().map(|v| v * s).collect(),
        )
    }

    pub fn solve_direct(&self) -> Result<Vec<f64>> {
        let lu = SparseLu::factor(&self.monolithic())?;
        Ok(lu.solve(&self.rhs()))
    }

    /// `‖b − K x‖₂ / ‖b‖₂`, or the absolute residual for a zero right-hand side.
    pub fn relative_residual(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.dim()];
        LinearOperator::apply(self, x, &mut y);
        let rhs = self.rhs();
        let r: f64 = y.iter().zip(&rhs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let bn = super::csr::norm2(&rhs);
        if bn > 0.0 {
            r / bn
        } else {
            r
        }
    }
}

impl LinearOperator for SaddleSystem {
    fn dim(&self) -> usize {
        self.n_u() + self.n_p()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let nu = self.n_u();
        let (xu, xp) = x.split_at(nu);
        let (yu, yp) = y.split_at_mut(nu);
        self.f.matvec(xu, yu);
        for (i, yi) in yu.iter_mut().enumerate() {
            *yi += self.bt.row(i).map(|(j, v)| v * xp[j]).sum::<f64>();
        }
        self.b.matvec(xu, yp);
        for (i, yi) in yp.iter_mut().enumerate() {
            *yi += self.c.row(i).map(|(j, v)| v * xp[j]).sum::<f64>();
        }
    }
}
