//! Manufactured steady solution on `[0, 1]²` from the stream function
//! `ψ = r² e^{−r²} sin(πz) / π`, so `u` is solenoidal and regular on the
//! axis. Forcing and outlet traction (`n = e_z`) generated symbolically.

#![allow(clippy::all)]

use std::f64::consts::PI as M_PI;
use std::sync::Arc;

use nozzlebench::fem::{assemble_boundary_traction, assemble_load, Field};
use nozzlebench::geometry::BoundaryTag;
use nozzlebench::solver::{FlowCase, NsSolver};

fn exp(x: f64) -> f64 {
    x.exp()
}
fn pow(x: f64, e: f64) -> f64 {
    x.powf(e)
}
fn sin(x: f64) -> f64 {
    x.sin()
}
fn cos(x: f64) -> f64 {
    x.cos()
}

pub fn ur(r: f64, z: f64, mu: f64, rho: f64) -> f64 {
    let _ = (mu, rho);
    -M_PI*r*exp(-pow(r, 2.0))*cos(M_PI*z)
}
pub fn uz(r: f64, z: f64, mu: f64, rho: f64) -> f64 {
    let _ = (mu, rho);
    2.0*(1.0 - pow(r, 2.0))*exp(-pow(r, 2.0))*sin(M_PI*z)
}
pub fn p(r: f64, z: f64, mu: f64, rho: f64) -> f64 {
    let _ = (mu, rho);
    sin(z)*cos(pow(r, 2.0))
}
pub fn fr(r: f64, z: f64, mu: f64, rho: f64) -> f64 {
    let _ = (mu, rho);
    r*(M_PI*mu*(4.0*pow(r, 2.0) - pow(M_PI, 2.0) - 8.0)*exp(pow(r, 2.0))*cos(M_PI*z) + pow(M_PI, 2.0)*rho*(-2.0*pow(r, 2.0) + pow(sin(M_PI*z), 2.0) + 1.0) - 2.0*exp(2.0*pow(r, 2.0))*sin(pow(r, 2.0))*sin(z))*exp(-2.0*pow(r, 2.0))
}
pub fn fz(r: f64, z: f64, mu: f64, rho: f64) -> f64 {
    let _ = (mu, rho);
    (2.0*mu*(4.0*pow(r, 4.0) - 16.0*pow(r, 2.0) - pow(M_PI, 2.0)*pow(r, 2.0) + 8.0 + pow(M_PI, 2.0))*exp(pow(r, 2.0))*sin(M_PI*z) + 2.0*M_PI*rho*sin(2.0*M_PI*z) + exp(2.0*pow(r, 2.0))*cos(pow(r, 2.0))*cos(z))*exp(-2.0*pow(r, 2.0))
}
pub fn tr(r: f64, z: f64, mu: f64, rho: f64) -> f64 {
    let _ = (mu, rho);
    pow(M_PI, 2.0)*mu*r*exp(-pow(r, 2.0))*sin(M_PI*z)
}
pub fn tz(r: f64, z: f64, mu: f64, rho: f64) -> f64 {
    let _ = (mu, rho);
    2.0*M_PI*mu*(1.0 - pow(r, 2.0))*exp(-pow(r, 2.0))*cos(M_PI*z) - sin(z)*cos(pow(r, 2.0))
}

pub fn velocity(r: f64, z: f64) -> [f64; 2] {
    [ur(r, z, 1.0, 1.0), uz(r, z, 1.0, 1.0)]
}

pub fn pressure(r: f64, z: f64) -> f64 {
    p(r, z, 1.0, 1.0)
}

/// Steady solve with μ = ρ = 1 on an `n × n` grid of the unit square.
pub fn solve(n: usize, order: usize, convection: bool) -> Field {
    let mesh = super::pipe_mesh(1.0, 1.0, n, n);
    let mut case = FlowCase::new(mesh, 1.0, 1.0, 1.0);
    case.mu = 1.0;
    case.rho = 1.0;
    case.order = order;
    case.convection = convection;
    let rho = if convection { 1.0 } else { 0.0 };
    let data = |tag: BoundaryTag, r: f64, z: f64| match tag {
        BoundaryTag::Axis => [Some(0.0), None],
        BoundaryTag::Outlet => [None, None],
        _ => velocity(r, z).map(Some),
    };
    let space = Arc::new(nozzlebench::fem::FunctionSpace::new(case.mesh.clone(), order).unwrap());
    let f = assemble_load(&space, &|r, z| [fr(r, z, 1.0, rho), fz(r, z, 1.0, rho)]).unwrap();
    let t = assemble_boundary_traction(&space, BoundaryTag::Outlet, &|r, z, _| [tr(r, z, 1.0, 1.0), tz(r, z, 1.0, 1.0)])
        .unwrap();
    let load: Vec<f64> = f.iter().zip(&t).map(|(a, b)| a + b).collect();
    let solver = NsSolver::with_boundary(case, &data, Some(load)).unwrap();
    solver.steady().unwrap().field
}
