//! Run configuration: a TOML file with documented keys, defaults filled in
//! and echoed back as the effective configuration.
//!
//! ```toml
//! re_throat = 500.0        # required
//! driver = "steady"        # or "transient"
//! order = 1
//! [mesh]
//! h_throat = 4e-4
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{build_nozzle_profile, NozzleDims, NozzleProfile, Sizing};
use crate::linalg::pcd::PcdBoundary;
use crate::linalg::GmresOptions;
use crate::solver::{FlowCase, NonlinearMode, SolverMode, DEFAULT_DENSITY, DEFAULT_VISCOSITY};
use crate::validation::default_stations;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Driver {
    /// Picard iteration on the steady equations.
    Steady,
    /// BDF time stepping from rest up to `t_end`.
    Transient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverChoice {
    Direct,
    GmresPcd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearChoice {
    Picard,
    SemiImplicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PcdChoice {
    OutflowDirichlet,
    InflowRobin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NozzleConfig {
    pub inlet_radius: f64,
    pub throat_radius: f64,
    pub inlet_length: f64,
    pub convergent_length: f64,
    pub throat_length: f64,
    pub outlet_length: f64,
    pub z_origin: f64,
}

impl Default for NozzleConfig {
    fn default() -> Self {
        let p = NozzleProfile::default();
        NozzleConfig {
            inlet_radius: p.inlet_radius,
            throat_radius: p.throat_radius,
            inlet_length: p.inlet_length,
            convergent_length: p.convergent_length,
            throat_length: p.throat_length,
            outlet_length: p.outlet_length,
            z_origin: p.z_origin,
        }
    }
}

/// Target edge lengths per region plus uniform refinement levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshConfig {
    pub h_inlet_pipe: f64,
    pub h_convergent: f64,
    pub h_throat: f64,
    pub h_expansion: f64,
    /// Uniform red refinements applied after generation.
    pub refine: usize,
}

impl Default for MeshConfig {
    fn default() -> Self {
        MeshConfig {
            h_inlet_pipe: 1.5e-3,
            h_convergent: 7e-4,
            h_throat: 4e-4,
            h_expansion: 1e-3,
            refine: 0,
        }
    }
}

impl MeshConfig {
    pub fn sizing(&self) -> Sizing {
        Sizing::per_region(self.h_inlet_pipe, self.h_convergent, self.h_throat, self.h_expansion)
    }
}

fn default_rho() -> f64 {
    DEFAULT_DENSITY
}
fn default_mu() -> f64 {
    DEFAULT_VISCOSITY
}
fn default_dt() -> f64 {
    1e-3
}
fn default_t_end() -> f64 {
    3.0
}
fn default_order() -> usize {
    1
}
fn default_driver() -> Driver {
    Driver::Steady
}
fn default_solver() -> SolverChoice {
    SolverChoice::Direct
}
fn default_nonlinear() -> NonlinearChoice {
    NonlinearChoice::SemiImplicit
}
fn default_pcd() -> PcdChoice {
    PcdChoice::InflowRobin
}
fn default_gmres_tol() -> f64 {
    GmresOptions::default().tol
}
fn default_gmres_restart() -> usize {
    GmresOptions::default().restart
}
fn default_gmres_max_iter() -> usize {
    GmresOptions::default().max_iter
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("run")
}
fn default_stations_field() -> Vec<f64> {
    default_stations()
}
fn default_chart_range() -> [f64; 2] {
    [-0.1, 0.1]
}
fn default_profile_points() -> usize {
    201
}
fn default_convection() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub re_throat: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default = "default_driver")]
    pub driver: Driver,
    #[serde(default = "default_solver")]
    pub solver: SolverChoice,
    #[serde(default = "default_nonlinear")]
    pub nonlinear: NonlinearChoice,
    #[serde(default = "default_convection")]
    pub convection: bool,
    #[serde(default = "default_pcd")]
    pub pcd_boundary: PcdChoice,
    #[serde(default = "default_gmres_tol")]
    pub gmres_tol: f64,
    #[serde(default = "default_gmres_restart")]
    pub gmres_restart: usize,
    #[serde(default = "default_gmres_max_iter")]
    pub gmres_max_iter: usize,
    /// Stop a transient run early once the 10-step relative change falls
    /// below this; absent means run to `t_end`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady_tol: Option<f64>,
    /// Write `checkpoints/step_NNNNNN.txt` every this many steps; 0 keeps
    /// only the final state.
    #[serde(default)]
    pub checkpoint_every: usize,
    /// Drives the mesh generator's lattice jitter.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Metric stations `z`, metres.
    #[serde(default = "default_stations_field")]
    pub stations: Vec<f64>,
    /// Axial range of the profile tables.
    #[serde(default = "default_chart_range")]
    pub chart_range: [f64; 2],
    #[serde(default = "default_profile_points")]
    pub profile_points: usize,
    #[serde(default)]
    pub velocity_data: Vec<PathBuf>,
    #[serde(default)]
    pub pressure_data: Vec<PathBuf>,
    #[serde(default)]
    pub nozzle: NozzleConfig,
    #[serde(default)]
    pub mesh: MeshConfig,
}

fn config_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

/// Best guess at the key a TOML error refers to: a backquoted name in the
/// message, else the key on the line the error points at.
fn error_key(err: &toml::de::Error, text: &str) -> String {
    let msg = err.message();
    if msg.starts_with("unknown field") || msg.starts_with("missing field") {
        if let Some(name) = msg.split('`').nth(1) {
            return name.to_string();
        }
    }
    if let Some(span) = err.span() {
        let start = text[..span.start.min(text.len())].rfind('\n').map_or(0, |i| i + 1);
        let line = text[start..].lines().next().unwrap_or("");
        if let Some((key, _)) = line.split_once('=') {
            return key.trim().to_string();
        }
        return line.trim().to_string();
    }
    "<config>".to_string()
}

impl RunConfig {
    /// A config with every default and the given throat Reynolds number.
    pub fn with_reynolds(re_throat: f64) -> RunConfig {
        toml::from_str(&format!("re_throat = {re_throat:?}")).expect("defaults deserialize")
    }

    /// Parses TOML text. Relative paths are resolved against `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<RunConfig> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| config_err(&error_key(&e, text), e.message()))?;
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Makes every path absolute, taking relative ones from `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            let joined = base.join(&*p);
            *p = std::path::absolute(&joined).unwrap_or(joined);
        };
        fix(&mut self.out_dir);
        self.velocity_data.iter_mut().for_each(fix);
        self.pressure_data.iter_mut().for_each(fix);
    }

    pub fn nozzle_profile(&self) -> Result<NozzleProfile> {
        let n = &self.nozzle;
        build_nozzle_profile(&NozzleDims {
            inlet_radius: Some(n.inlet_radius),
            throat_radius: Some(n.throat_radius),
            inlet_length: Some(n.inlet_length),
            convergent_length: Some(n.convergent_length),
            throat_length: Some(n.throat_length),
            outlet_length: Some(n.outlet_length),
            z_origin: Some(n.z_origin),
        })
    }

    /// The solver case on `mesh` described by this config.
    pub fn flow_case(&self, mesh: std::sync::Arc<crate::geometry::AxisymMesh>) -> Result<FlowCase> {
        let profile = self.nozzle_profile()?;
        let mut case = FlowCase::new(mesh, self.re_throat, profile.throat_diameter(), profile.inlet_diameter());
        case.rho = self.rho;
        case.mu = self.mu;
        case.dt = self.dt;
        case.t_end = self.t_end;
        case.order = self.order;
        case.solver = match self.solver {
            SolverChoice::Direct => SolverMode::Direct,
            SolverChoice::GmresPcd => SolverMode::GmresPcd,
        };
        case.nonlinear = match self.nonlinear {
            NonlinearChoice::Picard => NonlinearMode::Picard,
            NonlinearChoice::SemiImplicit => NonlinearMode::SemiImplicit,
        };
        case.pcd_boundary = match self.pcd_boundary {
            PcdChoice::OutflowDirichlet => PcdBoundary::OutflowDirichlet,
            PcdChoice::InflowRobin => PcdBoundary::InflowRobin,
        };
        case.gmres = GmresOptions {
            tol: self.gmres_tol,
            restart: self.gmres_restart,
            max_iter: self.gmres_max_iter,
        };
        case.convection = self.convection;
        case.steady_tol = self.steady_tol;
        case.validate()?;
        Ok(case)
    }

    /// Checks every constraint, naming the offending key.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("re_throat", self.re_throat),
            ("rho", self.rho),
            ("mu", self.mu),
            ("dt", self.dt),
            ("t_end", self.t_end),
            ("gmres_tol", self.gmres_tol),
            ("mesh.h_inlet_pipe", self.mesh.h_inlet_pipe),
            ("mesh.h_convergent", self.mesh.h_convergent),
            ("mesh.h_throat", self.mesh.h_throat),
            ("mesh.h_expansion", self.mesh.h_expansion),
            ("nozzle.inlet_radius", self.nozzle.inlet_radius),
            ("nozzle.throat_radius", self.nozzle.throat_radius),
            ("nozzle.inlet_length", self.nozzle.inlet_length),
            ("nozzle.convergent_length", self.nozzle.convergent_length),
            ("nozzle.throat_length", self.nozzle.throat_length),
            ("nozzle.outlet_length", self.nozzle.outlet_length),
        ];
        for (key, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(config_err(key, format!("must be positive and finite, got {v}")));
            }
        }
        if self.dt >= self.t_end {
            return Err(config_err("dt", format!("must be below t_end = {}, got {}", self.t_end, self.dt)));
        }
        if !(1..=2).contains(&self.order) {
            return Err(config_err("order", format!("must be 1 or 2, got {}", self.order)));
        }
        if self.gmres_tol >= 1.0 {
            return Err(config_err("gmres_tol", "must be below 1"));
        }
        if self.gmres_restart == 0 {
            return Err(config_err("gmres_restart", "must be at least 1"));
        }
        if self.gmres_max_iter == 0 {
            return Err(config_err("gmres_max_iter", "must be at least 1"));
        }
        if let Some(t) = self.steady_tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(config_err("steady_tol", format!("must be positive, got {t}")));
            }
        }
        if self.mesh.refine > 3 {
            return Err(config_err("mesh.refine", format!("at most 3 levels, got {}", self.mesh.refine)));
        }
        if !self.nozzle.z_origin.is_finite() {
            return Err(config_err("nozzle.z_origin", "must be finite"));
        }
        if self.nozzle.throat_radius >= self.nozzle.inlet_radius {
            return Err(config_err("nozzle.throat_radius", "must be smaller than nozzle.inlet_radius"));
        }
        let profile = self.nozzle_profile().map_err(|e| config_err("nozzle", e.to_string()))?;
        let (z0, z1) = (profile.z_inlet(), profile.z_outlet());
        let inside = |z: f64| z.is_finite() && z >= z0 && z <= z1;
        if self.stations.is_empty() {
            return Err(config_err("stations", "needs at least one station"));
        }
        if let Some(z) = self.stations.iter().find(|&&z| !inside(z)) {
            return Err(config_err("stations", format!("station {z} lies outside the domain [{z0}, {z1}]")));
        }
        let [a, b] = self.chart_range;
        if !(inside(a) && inside(b) && a < b) {
            return Err(config_err("chart_range", format!("must be increasing and inside [{z0}, {z1}]")));
        }
        if !(a..=b).contains(&0.0) {
            return Err(config_err("chart_range", "must contain z = 0, the pressure reference"));
        }
        if self.profile_points < 2 {
            return Err(config_err("profile_points", "must be at least 2"));
        }
        for (key, paths) in [("velocity_data", &self.velocity_data), ("pressure_data", &self.pressure_data)] {
            if let Some(p) = paths.iter().find(|p| !p.is_file()) {
                return Err(config_err(key, format!("{} is not a readable file", p.display())));
            }
        }
        Ok(())
    }
}

/// Reads and validates a config file; relative paths are taken from its
/// directory.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    RunConfig::from_toml(&text, base)
}
