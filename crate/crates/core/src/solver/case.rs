//! Benchmark regimes: fluid properties, discretization choices and the
//! inflow derived from the throat Reynolds number.

use std::f64::consts::PI;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::AxisymMesh;
use crate::linalg::pcd::PcdBoundary;
use crate::linalg::GmresOptions;

pub const DEFAULT_DENSITY: f64 = 1056.0;
pub const DEFAULT_VISCOSITY: f64 = 0.0035;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMode {
    Direct,
    GmresPcd,
}

impl SolverMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverMode::Direct => "direct",
            SolverMode::GmresPcd => "gmres-pcd",
        }
    }
}

impl FromStr for SolverMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(SolverMode::Direct),
            "gmres-pcd" | "gmres+pcd" => Ok(SolverMode::GmresPcd),
            _ => Err(Error::invalid(format!("unknown solver mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonlinearMode {
    Picard,
    SemiImplicit,
}

impl NonlinearMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NonlinearMode::Picard => "picard",
            NonlinearMode::SemiImplicit => "semi-implicit",
        }
    }
}

impl FromStr for NonlinearMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "picard" => Ok(NonlinearMode::Picard),
            "semi-implicit" => Ok(NonlinearMode::SemiImplicit),
            _ => Err(Error::invalid(format!("unknown nonlinear mode '{s}'"))),
        }
    }
}

/// `Q = π d_t μ Re_t / (4 ρ)`.
pub fn flow_rate_from_reynolds(re_t: f64, mu: f64, rho: f64, d_t: f64) -> Result<f64> {
    for (name, v) in [("Re_t", re_t), ("mu", mu), ("rho", rho), ("d_t", d_t)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::invalid(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(PI * d_t * mu * re_t / (4.0 * rho))
}

/// Mean velocity `4 Q / (π d²)` through a circular section of diameter `d`.
pub fn mean_velocity(q: f64, d: f64) -> f64 {
    4.0 * q / (PI * d * d)
}

/// Parabolic inflow `u_z(r) = 2 ū (1 − (2r/d)²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Poiseuille {
    pub mean: f64,
    pub diameter: f64,
}

impl Poiseuille {
    pub fn value(&self, r: f64) -> f64 {
        let s = 2.0 * r / self.diameter;
        2.0 * self.mean * (1.0 - s * s)
    }

    pub fn centerline(&self) -> f64 {
        2.0 * self.mean
    }

    /// `dp/dz` of the fully developed flow, `−8 μ ū / R²`.
    pub fn pressure_gradient(&self, mu: f64) -> f64 {
        let r = 0.5 * self.diameter;
        -8.0 * mu * self.mean / (r * r)
    }
}

pub fn poiseuille_inlet(q: f64, d_i: f64) -> Result<Poiseuille> {
    if !(q > 0.0) || !(d_i > 0.0) {
        return Err(Error::invalid(format!("Poiseuille profile needs Q > 0 and d_i > 0, got {q}, {d_i}")));
    }
    Ok(Poiseuille {
        mean: mean_velocity(q, d_i),
        diameter: d_i,
    })
}

/// One benchmark regime on a given mesh.
#[derive(Debug, Clone)]
pub struct FlowCase {
    pub re_throat: f64,
    pub rho: f64,
    pub mu: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Taylor-Hood order `N`: velocity `P_{N+1}`, pressure `P_N`.
    pub order: usize,
    pub solver: SolverMode,
    pub nonlinear: NonlinearMode,
    pub pcd_boundary: PcdBoundary,
    pub gmres: GmresOptions,
    /// Include the convective term; off gives the Stokes problem.
    pub convection: bool,
    /// Stop a transient run once `‖u^n − u^{n−10}‖ / ‖u^n‖` falls below this.
    pub steady_tol: Option<f64>,
    pub throat_diameter: f64,
    pub inlet_diameter: f64,
    pub mesh: Arc<AxisymMesh>,
}

impl FlowCase {
    /// Defaults: ρ = 1056, μ = 0.0035, Δt = 1e-3, T = 3, N = 1, direct
    /// solves, semi-implicit convection.
    pub fn new(mesh: Arc<AxisymMesh>, re_throat: f64, throat_diameter: f64, inlet_diameter: f64) -> Self {
        FlowCase {
            re_throat,
            rho: DEFAULT_DENSITY,
            mu: DEFAULT_VISCOSITY,
            dt: 1e-3,
            t_end: 3.0,
            order: 1,
            solver: SolverMode::Direct,
            nonlinear: NonlinearMode::SemiImplicit,
            pcd_boundary: PcdBoundary::default(),
            gmres: GmresOptions::default(),
            convection: true,
            steady_tol: None,
            throat_diameter,
            inlet_diameter,
            mesh,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("re_throat", self.re_throat),
            ("rho", self.rho),
            ("mu", self.mu),
            ("dt", self.dt),
            ("t_end", self.t_end),
            ("throat_diameter", self.throat_diameter),
            ("inlet_diameter", self.inlet_diameter),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.dt >= self.t_end {
            return Err(Error::invalid(format!("dt = {} must be below t_end = {}", self.dt, self.t_end)));
        }
        if !(1..=2).contains(&self.order) {
            return Err(Error::invalid(format!("order N = {} is not 1 or 2", self.order)));
        }
        if let Some(t) = self.steady_tol {
            if !(t > 0.0) {
                return Err(Error::invalid("steady_tol must be positive"));
            }
        }
        Ok(())
    }

    pub fn flow_rate(&self) -> Result<f64> {
        flow_rate_from_reynolds(self.re_throat, self.mu, self.rho, self.throat_diameter)
    }

    pub fn inlet_profile(&self) -> Result<Poiseuille> {
        poiseuille_inlet(self.flow_rate()?, self.inlet_diameter)
    }

    /// `ū_i`, `ū_t`.
    pub fn mean_velocities(&self) -> Result<(f64, f64)> {
        let q = self.flow_rate()?;
        Ok((mean_velocity(q, self.inlet_diameter), mean_velocity(q, self.throat_diameter)))
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil() as usize
    }
}
