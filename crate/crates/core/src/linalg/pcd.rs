//! Pressure convection-diffusion (PCD) approximation of the Schur
//! complement and the upper block-triangular preconditioner built on it.

use std::str::FromStr;

use super::csr::{csr_from_triplets, CsrMatrix};
use super::gmres::{gmres, GmresOptions, GmresResult, Preconditioner};
use super::lu::SparseLu;
use super::saddle::SaddleSystem;
use crate::error::{Block, Error, Result};
use crate::fem::{assemble_mass, assemble_pressure_boundary_flux, assemble_pressure_operator, Field, FunctionSpace, MassKind};
use crate::geometry::BoundaryTag;

/// Boundary treatment of the pressure Laplacian and convection-diffusion
/// operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PcdBoundary {
    /// Dirichlet rows on outlet pressure dofs.
    OutflowDirichlet,
    /// Outlet Dirichlet rows plus the Robin term `-ρ (w·n)` at the inlet.
    /// Without it the steady Oseen iteration counts grow with refinement.
    #[default]
    InflowRobin,
}

impl PcdBoundary {
    pub fn as_str(self) -> &'static str {
        match self {
            PcdBoundary::OutflowDirichlet => "outflow-dirichlet",
            PcdBoundary::InflowRobin => "inflow-robin",
        }
    }
}

impl FromStr for PcdBoundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "outflow-dirichlet" => Ok(PcdBoundary::OutflowDirichlet),
            "inflow-robin" => Ok(PcdBoundary::InflowRobin),
            _ => Err(Error::invalid(format!("unknown PCD boundary mode '{s}'"))),
        }
    }
}

/// Action of an approximate inverse Schur complement on a pressure vector.
pub trait SchurApprox {
    fn apply_inverse(&self, r: &[f64], z: &mut [f64]) -> Result<()>;
}

/// `S⁻¹ ≈ −A_p⁻¹ F_p M_p⁻¹`.
#[derive(Debug, Clone)]
pub struct PcdOperator {
    pub mp: CsrMatrix,
    pub ap: CsrMatrix,
    pub fp: CsrMatrix,
    pub mode: PcdBoundary,
    mp_lu: SparseLu,
    ap_lu: SparseLu,
}

/// Keeps the diagonal of the listed rows and columns and drops their other
/// entries.
fn pin(m: &CsrMatrix, dofs: &[bool]) -> CsrMatrix {
    m.filter(|i, j| i == j || (!dofs[i] && !dofs[j]))
}

/// Assembles the PCD operators. `mass_coeff` is the `α ρ / Δt` factor of an
/// unsteady step (zero for steady problems).
pub fn build_pcd(space: &FunctionSpace, mu: f64, rho: f64, w: &Field, mode: PcdBoundary, mass_coeff: f64) -> Result<PcdOperator> {
    if !(mu > 0.0) || !(rho > 0.0) || !(mass_coeff >= 0.0) {
        return Err(Error::invalid("PCD needs mu > 0, rho > 0 and a non-negative mass coefficient"));
    }
    let np = space.n_pressure();
    let mp = assemble_mass(space, MassKind::Pressure, 1.0)?;
    let ap = assemble_pressure_operator(space, 1.0, None, 0.0)?;
    let mut fp = assemble_pressure_operator(space, mu, Some((w, rho)), mass_coeff)?;
    if mode == PcdBoundary::InflowRobin {
        let robin = assemble_pressure_boundary_flux(space, BoundaryTag::Inlet, w, -rho)?;
        fp = CsrMatrix::linear_combination(&[(1.0, &fp), (1.0, &robin)])?;
    }
    let mut pinned = vec![false; np];
    let outlet = space.pressure_map().boundary_dofs(space.mesh(), BoundaryTag::Outlet);
    if outlet.is_empty() {
        // enclosed flow: fix the pressure Laplacian's constant mode at one dof
        pinned[0] = true;
    }
    for d in outlet {
        pinned[d] = true;
    }
    let ap = pin(&ap, &pinned);
    let fp = pin(&fp, &pinned);
    let wrap = |e| Error::InnerSolve {
        block: Block::Pressure,
        source: Box::new(e),
    };
    let mp_lu = SparseLu::factor(&mp).map_err(wrap)?;
    let ap_lu = SparseLu::factor(&ap).map_err(wrap)?;
    Ok(PcdOperator {
        mp,
        ap,
        fp,
        mode,
        mp_lu,
        ap_lu,
    })
}

impl SchurApprox for PcdOperator {
    fn apply_inverse(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        let y = self.mp_lu.solve(r);
        let y = self.fp.mul_vec(&y);
        self.ap_lu.solve_into(&y, z);
        z.iter_mut().for_each(|v| *v = -*v);
        Ok(())
    }
}

/// The exact Schur complement `S = −B F⁻¹ Bᵀ`, formed densely. Only
/// practical for small systems.
#[derive(Debug, Clone)]
pub struct ExactSchur {
    lu: SparseLu,
}

impl ExactSchur {
    pub fn new(sys: &SaddleSystem) -> Result<Self> {
        let f_lu = SparseLu::factor(sys.f()).map_err(|e| Error::InnerSolve {
            block: Block::Velocity,
            source: Box::new(e),
        })?;
        let (nu, np) = (sys.n_u(), sys.n_p());
        let mut trip = Vec::new();
        let mut col = vec![0.0; nu];
        for j in 0..np {
            col.iter_mut().for_each(|v| *v = 0.0);
            for i in 0..nu {
                col[i] = sys.bt().get(i, j);
            }
            let x = f_lu.solve(&col);
            let s = sys.b().mul_vec(&x);
            for (i, v) in s.into_iter().enumerate() {
                let v = v - sys.c().get(i, j);
                if v != 0.0 {
                    trip.push((i, j, -v));
                }
            }
        }
        let s = csr_from_triplets(np, np, &trip)?;
        let lu = SparseLu::factor(&s).map_err(|e| Error::InnerSolve {
            block: Block::Pressure,
            source: Box::new(e),
        })?;
        Ok(ExactSchur { lu })
    }
}

impl SchurApprox for ExactSchur {
    fn apply_inverse(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        self.lu.solve_into(r, z);
        Ok(())
    }
}

/// `P⁻¹ [r_u; r_p]` for `P = [F Bᵀ; 0 S]`: `q = S⁻¹ r_p`, then
/// `v = F⁻¹ (r_u − Bᵀ q)`.
pub struct BlockPreconditioner<'a> {
    f_lu: SparseLu,
    bt: &'a CsrMatrix,
    schur: &'a dyn SchurApprox,
}

impl<'a> BlockPreconditioner<'a> {
    pub fn new(sys: &'a SaddleSystem, schur: &'a dyn SchurApprox) -> Result<Self> {
        let f_lu = SparseLu::factor(sys.f()).map_err(|e| Error::InnerSolve {
            block: Block::Velocity,
            source: Box::new(e),
        })?;
        Ok(BlockPreconditioner {
            f_lu,
            bt: sys.bt(),
            schur,
        })
    }
}

impl Preconditioner for BlockPreconditioner<'_> {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        let nu = self.f_lu.dim();
        let (ru, rp) = r.split_at(nu);
        let (zu, zp) = z.split_at_mut(nu);
        self.schur.apply_inverse(rp, zp).map_err(|e| Error::InnerSolve {
            block: Block::Pressure,
            source: Box::new(e),
        })?;
        let mut rhs = ru.to_vec();
        let btq = self.bt.mul_vec(zp);
        for (a, b) in rhs.iter_mut().zip(&btq) {
            *a -= b;
        }
        self.f_lu.solve_into(&rhs, zu);
        Ok(())
    }
}

struct ScaledSchur<'a> {
    inner: &'a dyn SchurApprox,
    factor: f64,
}

impl SchurApprox for ScaledSchur<'_> {
    fn apply_inverse(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        self.inner.apply_inverse(r, z)?;
        z.iter_mut().for_each(|v| *v *= self.factor);
        Ok(())
    }
}

/// Right-preconditioned GMRES with the block preconditioner on the
/// pressure-balanced form of `sys` (see [`SaddleSystem::pressure_scale`]).
/// The tolerance applies to the balanced residual; the returned iterate is
/// in the original unknowns.
pub fn gmres_block(sys: &SaddleSystem, schur: &dyn SchurApprox, opts: GmresOptions, x0: Option<&[f64]>) -> Result<GmresResult> {
    let s = sys.pressure_scale();
    let nu = sys.n_u();
    let balanced = sys.with_pressure_scale(s)?;
    let scaled_schur = ScaledSchur {
        inner: schur,
        factor: 1.0 / (s * s),
    };
    let pre = BlockPreconditioner::new(&balanced, &scaled_schur)?;
    let x0: Option<Vec<f64>> = x0.map(|x| x.iter().enumerate().map(|(i, v)| if i < nu { *v } else { v / s }).collect());
    let mut res = gmres(&balanced, &balanced.rhs(), Some(&pre), opts, x0.as_deref())?;
    res.x[nu..].iter_mut().for_each(|v| *v *= s);
    Ok(res)
}

/// One application of the block preconditioner with PCD; factorizes `F`
/// on every call, so loops should hold a [`BlockPreconditioner`] instead.
pub fn apply_block_precond(sys: &SaddleSystem, pcd: &PcdOperator, residual: &[f64]) -> Result<Vec<f64>> {
    if residual.len() != sys.n_u() + sys.n_p() || pcd.mp.nrows() != sys.n_p() {
        return Err(Error::invalid("block preconditioner dimensions do not match the system"));
    }
    let p = BlockPreconditioner::new(sys, pcd)?;
    let mut z = vec![0.0; residual.len()];
    p.apply(residual, &mut z)?;
    Ok(z)
}
