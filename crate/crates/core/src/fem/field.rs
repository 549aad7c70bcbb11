//! Discrete velocity/pressure fields and their point evaluation.

use std::sync::Arc;

use super::assembly::local_values;
use super::reference::ReferenceElement;
use super::space::FunctionSpace;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Field {
    space: Arc<FunctionSpace>,
    /// `[u_r | u_z | p]`.
    pub coeffs: Vec<f64>,
}

/// Point values `(u_r, u_z, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValue {
    pub ur: f64,
    pub uz: f64,
    pub p: f64,
}

impl Field {
    pub fn new(space: Arc<FunctionSpace>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.n_total() {
            return Err(Error::invalid(format!(
                "field has {} coefficients, space has {} dofs",
                coeffs.len(),
                space.n_total()
            )));
        }
        Ok(Field { space, coeffs })
    }

    pub fn zeros(space: Arc<FunctionSpace>) -> Self {
        let n = space.n_total();
        Field {
            space,
            coeffs: vec![0.0; n],
        }
    }

    /// Nodal interpolant of `u(r, z) = [u_r, u_z]` and `p(r, z)`.
    pub fn interpolate(
        space: Arc<FunctionSpace>,
        u: &dyn Fn(f64, f64) -> [f64; 2],
        p: &dyn Fn(f64, f64) -> f64,
    ) -> Self {
        let nu = space.n_u();
        let mut coeffs = vec![0.0; space.n_total()];
        for (i, &[r, z]) in space.velocity_map().coords().iter().enumerate() {
            let v = u(r, z);
            coeffs[i] = v[0];
            coeffs[nu + i] = v[1];
        }
        let off = space.n_velocity();
        for (j, &[r, z]) in space.pressure_map().coords().iter().enumerate() {
            coeffs[off + j] = p(r, z);
        }
        Field { space, coeffs }
    }

    pub fn space(&self) -> &FunctionSpace {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<FunctionSpace> {
        &self.space
    }

    pub fn velocity(&self) -> &[f64] {
        &self.coeffs[..self.space.n_velocity()]
    }

    pub fn velocity_mut(&mut self) -> &mut [f64] {
        let n = self.space.n_velocity();
        &mut self.coeffs[..n]
    }

    pub fn pressure(&self) -> &[f64] {
        &self.coeffs[self.space.n_velocity()..]
    }

    pub fn pressure_mut(&mut self) -> &mut [f64] {
        let n = self.space.n_velocity();
        &mut self.coeffs[n..]
    }

    /// Values inside triangle `t` at barycentric point `bary`.
    pub fn eval_in(&self, t: usize, bary: [f64; 3]) -> PointValue {
        let s = &*self.space;
        let phi = ReferenceElement::new(s.velocity_degree()).expect("valid degree").eval(bary).values;
        let psi = ReferenceElement::new(s.pressure_degree()).expect("valid degree").eval(bary).values;
        let nu = s.n_u();
        let vm = s.velocity_map();
        PointValue {
            ur: local_values(vm, t, &self.coeffs[..nu], &phi),
            uz: local_values(vm, t, &self.coeffs[nu..2 * nu], &phi),
            p: local_values(s.pressure_map(), t, self.pressure(), &psi),
        }
    }
}

pub fn evaluate_field(field: &Field, point: [f64; 2]) -> Result<PointValue> {
    let loc = field.space().mesh().locate_point(point)?;
    Ok(field.eval_in(loc.triangle, loc.bary))
}
