//! Essential boundary conditions by symmetric elimination.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{csr_from_triplets, CsrMatrix, SaddleSystem};

/// Collects `(dof, value)` pairs, rejecting a dof given two different values.
pub fn constraint_map(pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<BTreeMap<usize, f64>> {
    let mut map = BTreeMap::new();
    for (d, v) in pairs {
        if let Some(old) = map.insert(d, v) {
            if old != v {
                return Err(Error::invalid(format!("dof {d} constrained to both {old} and {v}")));
            }
        }
    }
    Ok(map)
}

/// Replaces constrained rows and columns by a multiple of the identity, the
/// multiple being the mean magnitude of the free diagonal of `F` so the
/// constrained rows do not dominate residual norms. Indices address
/// the monolithic layout (velocity dofs, then pressure dofs). Column
/// contributions move to the right-hand side so the result stays symmetric
/// wherever the input was.
pub fn apply_dirichlet(system: &SaddleSystem, constraints: &[(usize, f64)]) -> Result<SaddleSystem> {
    let map = constraint_map(constraints.iter().copied())?;
    let (nu, np) = (system.n_u(), system.n_p());
    let n = nu + np;
    if let Some((&d, _)) = map.iter().next_back().filter(|(&d, _)| d >= n) {
        return Err(Error::invalid(format!("constrained dof {d} out of range 0..{n}")));
    }
    if map.is_empty() {
        return Ok(system.clone());
    }
    let mut fixed = vec![false; n];
    let mut xc = vec![0.0; n];
    for (&d, &v) in &map {
        fixed[d] = true;
        xc[d] = v;
    }
    let mut kx = vec![0.0; n];
    crate::linalg::LinearOperator::apply(system, &xc, &mut kx);
    let diag = system.f().diagonal();
    let free: Vec<f64> = (0..nu).filter(|&i| !fixed[i]).map(|i| diag[i].abs()).collect();
    let mut scale = free.iter().sum::<f64>() / free.len().max(1) as f64;
    if !(scale > 0.0) || !scale.is_finite() {
        scale = 1.0;
    }
    let mut rhs = system.rhs();
    for i in 0..n {
        rhs[i] = if fixed[i] { scale * xc[i] } else { rhs[i] - kx[i] };
    }

    let unit = |range: std::ops::Range<usize>, offset: usize| -> Result<CsrMatrix> {
        let trip: Vec<_> = range.clone().filter(|&i| fixed[i]).map(|i| (i - offset, i - offset, scale)).collect();
        csr_from_triplets(range.len(), range.len(), &trip)
    };
    let f = system.f().filter(|i, j| !fixed[i] && !fixed[j]);
    let f = CsrMatrix::linear_combination(&[(1.0, &f), (1.0, &unit(0..nu, 0)?)])?;
    let b = system.b().filter(|i, j| !fixed[nu + i] && !fixed[j]);
    let c = system.c().filter(|i, j| !fixed[nu + i] && !fixed[nu + j]);
    let c = CsrMatrix::linear_combination(&[(1.0, &c), (1.0, &unit(nu..n, nu)?)])?;
    let rhs_p = rhs.split_off(nu);
    SaddleSystem::with_pressure_block(f, b, c, rhs, rhs_p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d() -> SaddleSystem {
        let f = csr_from_triplets(
            3,
            3,
            &[(0, 0, 1.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0), (1, 2, -1.0), (2, 1, -1.0), (2, 2, 1.0)],
        )
        .unwrap();
        SaddleSystem::new(f, CsrMatrix::zeros(0, 3), vec![0.0; 3], vec![]).unwrap()
    }

    #[test]
    fn laplace_toy_midpoint() {
        let s = apply_dirichlet(&laplace_1d(), &[(0, 0.0), (2, 1.0)]).unwrap();
        let x = s.solve_direct().unwrap();
        assert!((x[1] - 0.5).abs() < 1e-14);
        assert_eq!((x[0], x[2]), (0.0, 1.0));
        assert!(s.f().asymmetry() < 1e-15);
    }

    #[test]
    fn constrain_nothing_or_everything() {
        let f = csr_from_triplets(2, 2, &[(0, 0, 2.0), (1, 1, 3.0), (0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let b = csr_from_triplets(1, 2, &[(0, 0, 1.0), (0, 1, 1.0)]).unwrap();
        let s = SaddleSystem::new(f, b, vec![1.0, 2.0], vec![0.5]).unwrap();
        let same = apply_dirichlet(&s, &[]).unwrap();
        assert_eq!(same.f(), s.f());
        assert_eq!(same.b(), s.b());
        assert_eq!(same.rhs(), s.rhs());
        let all = apply_dirichlet(&s, &[(0, 4.0), (1, -2.0), (2, 7.0)]).unwrap();
        assert_eq!(all.solve_direct().unwrap(), vec![4.0, -2.0, 7.0]);
    }

    #[test]
    fn conflicting_or_out_of_range() {
        let s = laplace_1d();
        assert!(apply_dirichlet(&s, &[(0, 0.0), (0, 1.0)]).is_err());
        assert!(apply_dirichlet(&s, &[(0, 1.0), (0, 1.0)]).is_ok());
        assert!(apply_dirichlet(&s, &[(3, 1.0)]).is_err());
    }
}
