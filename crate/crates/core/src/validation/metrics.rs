//! Mass-conservation error `E_Q` and centerline validation metric `E_z`.

use std::f64::consts::PI;

use super::extract::NormalizedProfile;
use crate::error::{Error, Result};
use crate::fem::quadrature::gauss_unit;
use crate::fem::{evaluate_field, Field};

/// Radial panels of the composite rule; four Gauss points each.
pub const EQ_PANELS: usize = 64;
const EQ_POINTS: usize = 4;
/// Floor on `|ū_exp|` in the relative `E_z`.
pub const EZ_EPSILON: f64 = 1e-3;

/// `2π ∫₀^{r_wall} u_z r dr` at the section `z`.
pub fn section_flow_rate(field: &Field, r_wall: f64, z: f64) -> Result<f64> {
    let (x, w) = gauss_unit(EQ_POINTS);
    let h = r_wall / EQ_PANELS as f64;
    let mut q = 0.0;
    for k in 0..EQ_PANELS {
        for (xi, wi) in x.iter().zip(&w) {
            let r = (k as f64 + xi) * h;
            let v = evaluate_field(field, [r, z])
                .map_err(|_| Error::NotFound(format!("section z = {z}: point r = {r} is outside the mesh")))?;
            q += wi * h * v.uz * r;
        }
    }
    Ok(2.0 * PI * q)
}

/// `E_Q(z) = 100 |Q_num(z) − Q| / Q` per section, in input order.
pub fn compute_eq(field: &Field, q: f64, wall_radius: &dyn Fn(f64) -> f64, z_sections: &[f64]) -> Result<Vec<(f64, f64)>> {
    if !(q > 0.0) {
        return Err(Error::invalid("prescribed flow rate must be positive"));
    }
    z_sections
        .iter()
        .map(|&z| Ok((z, 100.0 * (section_flow_rate(field, wall_radius(z), z)? - q).abs() / q)))
        .collect()
}

/// `E_z(z) = |u_comp(z) − ū_exp(z)| / max(|ū_exp(z)|, ε)`, the mean taken
/// over the datasets covering `z`.
pub fn compute_ez(computed: &NormalizedProfile, datasets: &[NormalizedProfile], locations: &[f64]) -> Result<Vec<(f64, f64)>> {
    locations
        .iter()
        .map(|&z| {
            let c = computed
                .interpolate(z)
                .ok_or_else(|| Error::InsufficientData(format!("computed profile does not cover z = {z}")))?;
            let mut values: Vec<f64> = datasets.iter().filter_map(|d| d.interpolate(z)).collect();
            if values.is_empty() {
                return Err(Error::InsufficientData(format!("no experimental dataset covers z = {z}")));
            }
            // sorted and anchored so the mean is order-free and exact for equal values
            values.sort_by(f64::total_cmp);
            let base = values[0];
            let mean = base + values.iter().map(|v| v - base).sum::<f64>() / values.len() as f64;
            Ok((z, (c - mean).abs() / mean.abs().max(EZ_EPSILON)))
        })
        .collect()
}
