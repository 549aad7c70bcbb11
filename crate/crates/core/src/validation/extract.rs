//! Sampling computed fields along the axis and the wall, and the
//! benchmark normalizations.

use super::dataset::{interpolate, Profile, ProfileKind};
use crate::error::{Error, Result};
use crate::fem::{evaluate_field, Field};
use crate::solver::FlowCase;

fn sorted(z: &[f64]) -> Vec<f64> {
    let mut z = z.to_vec();
    z.sort_by(f64::total_cmp);
    z
}

fn sample(field: &Field, kind: ProfileKind, z: &[f64], at: impl Fn(f64) -> [f64; 2]) -> Result<Profile> {
    let mut samples = Vec::with_capacity(z.len());
    for z in sorted(z) {
        let p = at(z);
        let v = evaluate_field(field, p).map_err(|_| Error::NotFound(format!("sample z = {z} at r = {} is outside the mesh", p[0])))?;
        samples.push((z, if kind == ProfileKind::Velocity { v.uz } else { v.p }));
    }
    Ok(Profile { kind, samples })
}

/// `u_z(0, z)` at the given stations, sorted by `z`.
pub fn extract_centerline(field: &Field, z_samples: &[f64]) -> Result<Profile> {
    sample(field, ProfileKind::Velocity, z_samples, |z| [0.0, z])
}

/// Pressure on the wall `r = r_wall(z)`.
pub fn extract_wall_pressure(field: &Field, wall_radius: &dyn Fn(f64) -> f64, z_samples: &[f64]) -> Result<Profile> {
    sample(field, ProfileKind::Pressure, z_samples, |z| [wall_radius(z), z])
}

/// Scales taken from the flow case: `ū_i`, `ū_t` and `½ ρ ū_t²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    pub mean_inlet: f64,
    pub mean_throat: f64,
    pub dynamic_pressure: f64,
}

impl Normalization {
    pub fn from_case(case: &FlowCase) -> Result<Self> {
        let (ui, ut) = case.mean_velocities()?;
        Ok(Normalization {
            mean_inlet: ui,
            mean_throat: ut,
            dynamic_pressure: 0.5 * case.rho * ut * ut,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedProfile {
    pub kind: ProfileKind,
    pub samples: Vec<(f64, f64)>,
    pub constants: Normalization,
    /// `p(z = 0)` removed before scaling (pressure only).
    pub reference: f64,
}

impl NormalizedProfile {
    pub fn interpolate(&self, z: f64) -> Option<f64> {
        interpolate(&self.samples, z)
    }
}

/// `u_z / ū_i`, or `(p − p(0)) / (½ ρ ū_t²)`.
pub fn normalize(profile: &Profile, constants: Normalization) -> Result<NormalizedProfile> {
    let (scale, reference) = match profile.kind {
        ProfileKind::Velocity => (constants.mean_inlet, 0.0),
        ProfileKind::Pressure => {
            let p0 = profile
                .interpolate(0.0)
                .ok_or_else(|| Error::invalid("pressure profile does not cover z = 0"))?;
            (constants.dynamic_pressure, p0)
        }
    };
    Ok(NormalizedProfile {
        kind: profile.kind,
        samples: profile.samples.iter().map(|&(z, v)| (z, (v - reference) / scale)).collect(),
        constants,
        reference,
    })
}

pub fn denormalize(profile: &NormalizedProfile) -> Profile {
    let scale = match profile.kind {
        ProfileKind::Velocity => profile.constants.mean_inlet,
        ProfileKind::Pressure => profile.constants.dynamic_pressure,
    };
    Profile {
        kind: profile.kind,
        samples: profile.samples.iter().map(|&(z, v)| (z, v * scale + profile.reference)).collect(),
    }
}
