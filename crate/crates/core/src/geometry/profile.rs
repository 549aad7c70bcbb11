//! Parametric FDA nozzle cross-section and the polygonal (r, z) domains
//! handed to the mesh generator.
//!
//! Coordinates are `[r, z]` in metres. The sudden-expansion plane sits at
//! `z_origin` (0 by default); everything upstream has negative `z`.

use crate::error::{Error, Result};

/// Radius of the inlet pipe and the expansion pipe (D_i = 12 mm).
pub const DEFAULT_INLET_RADIUS: f64 = 0.006;
/// Radius of the throat (D_t = 4 mm).
pub const DEFAULT_THROAT_RADIUS: f64 = 0.002;
/// Upstream pipe length; puts the inlet plane below the first chart station at z = -0.1 m.
pub const DEFAULT_INLET_LENGTH: f64 = 0.05;
/// Length of a 10 degree half-angle cone from 6 mm down to 2 mm radius.
pub const DEFAULT_CONVERGENT_LENGTH: f64 = 0.022_685_127_278_470_84;
pub const DEFAULT_THROAT_LENGTH: f64 = 0.04;
pub const DEFAULT_OUTLET_LENGTH: f64 = 0.15;

/// Mesh region of a triangle. The nozzle uses all four; a straight pipe
/// only uses [`Region::InletPipe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Region {
    InletPipe = 0,
    Convergent = 1,
    Throat = 2,
    Expansion = 3,
}

impl Region {
    pub const ALL: [Region; 4] = [
        Region::InletPipe,
        Region::Convergent,
        Region::Throat,
        Region::Expansion,
    ];

    pub fn id(self) -> usize {
        self as usize
    }

    pub fn from_id(id: usize) -> Option<Region> {
        Region::ALL.get(id).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Region::InletPipe => "inlet-pipe",
            Region::Convergent => "convergent",
            Region::Throat => "throat",
            Region::Expansion => "expansion-pipe",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundaryTag {
    Inlet,
    Wall,
    Outlet,
    Axis,
}

impl BoundaryTag {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryTag::Inlet => "inlet",
            BoundaryTag::Wall => "wall",
            BoundaryTag::Outlet => "outlet",
            BoundaryTag::Axis => "axis",
        }
    }

    pub fn parse(s: &str) -> Option<BoundaryTag> {
        match s {
            "inlet" => Some(BoundaryTag::Inlet),
            "wall" => Some(BoundaryTag::Wall),
            "outlet" => Some(BoundaryTag::Outlet),
            "axis" => Some(BoundaryTag::Axis),
            _ => None,
        }
    }
}

/// Optional overrides for [`build_nozzle_profile`]. `None` keeps the default.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NozzleDims {
    pub inlet_radius: Option<f64>,
    pub throat_radius: Option<f64>,
    pub inlet_length: Option<f64>,
    pub convergent_length: Option<f64>,
    pub throat_length: Option<f64>,
    pub outlet_length: Option<f64>,
    pub z_origin: Option<f64>,
}

/// Meridian profile of the benchmark nozzle: inlet pipe, conical
/// convergent, throat, sudden expansion into an outlet pipe of the inlet
/// radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NozzleProfile {
    pub inlet_radius: f64,
    pub throat_radius: f64,
    pub inlet_length: f64,
    pub convergent_length: f64,
    pub throat_length: f64,
    pub outlet_length: f64,
    pub z_origin: f64,
}

impl Default for NozzleProfile {
    fn default() -> Self {
        NozzleProfile {
            inlet_radius: DEFAULT_INLET_RADIUS,
            throat_radius: DEFAULT_THROAT_RADIUS,
            inlet_length: DEFAULT_INLET_LENGTH,
            convergent_length: DEFAULT_CONVERGENT_LENGTH,
            throat_length: DEFAULT_THROAT_LENGTH,
            outlet_length: DEFAULT_OUTLET_LENGTH,
            z_origin: 0.0,
        }
    }
}

pub fn build_nozzle_profile(dims: &NozzleDims) -> Result<NozzleProfile> {
    let d = NozzleProfile::default();
    let p = NozzleProfile {
        inlet_radius: dims.inlet_radius.unwrap_or(d.inlet_radius),
        throat_radius: dims.throat_radius.unwrap_or(d.throat_radius),
        inlet_length: dims.inlet_length.unwrap_or(d.inlet_length),
        convergent_length: dims.convergent_length.unwrap_or(d.convergent_length),
        throat_length: dims.throat_length.unwrap_or(d.throat_length),
        outlet_length: dims.outlet_length.unwrap_or(d.outlet_length),
        z_origin: dims.z_origin.unwrap_or(d.z_origin),
    };
    p.validate()?;
    Ok(p)
}

impl NozzleProfile {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("inlet_radius", self.inlet_radius),
            ("throat_radius", self.throat_radius),
            ("inlet_length", self.inlet_length),
            ("convergent_length", self.convergent_length),
            ("throat_length", self.throat_length),
            ("outlet_length", self.outlet_length),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.z_origin.is_finite() {
            return Err(Error::invalid("z_origin must be finite"));
        }
        if self.throat_radius >= self.inlet_radius {
            return Err(Error::invalid(format!(
                "throat_radius {} must be smaller than inlet_radius {}",
                self.throat_radius, self.inlet_radius
            )));
        }
        Ok(())
    }

    pub fn inlet_diameter(&self) -> f64 {
        2.0 * self.inlet_radius
    }

    pub fn throat_diameter(&self) -> f64 {
        2.0 * self.throat_radius
    }

    pub fn z_inlet(&self) -> f64 {
        self.z_throat_start() - self.convergent_length - self.inlet_length
    }

    pub fn z_convergent_start(&self) -> f64 {
        self.z_throat_start() - self.convergent_length
    }

    pub fn z_throat_start(&self) -> f64 {
        self.z_origin - self.throat_length
    }

    pub fn z_outlet(&self) -> f64 {
        self.z_origin + self.outlet_length
    }

    /// Wall radius at axial position `z`. The jump at `z_origin` is
    /// left-continuous: `radius(z_origin)` is the throat radius.
    pub fn radius(&self, z: f64) -> f64 {
        let zc = self.z_convergent_start();
        let zt = self.z_throat_start();
        if z <= zc {
            self.inlet_radius
        } else if z <= zt {
            let s = (z - zc) / self.convergent_length;
            self.inlet_radius + s * (self.throat_radius - self.inlet_radius)
        } else if z <= self.z_origin {
            self.throat_radius
        } else {
            self.inlet_radius
        }
    }

    pub fn domain(&self) -> Domain {
        let (ri, rt) = (self.inlet_radius, self.throat_radius);
        let (z0, z1, z2, z3, z4) = (
            self.z_inlet(),
            self.z_convergent_start(),
            self.z_throat_start(),
            self.z_origin,
            self.z_outlet(),
        );
        use BoundaryTag::*;
        use Region::*;
        let seg = |a: [f64; 2], b: [f64; 2], tag, region| BoundarySegment { a, b, tag, region };
        Domain {
            regions: vec![
                RegionShape {
                    region: InletPipe,
                    polygon: vec![[0.0, z0], [ri, z0], [ri, z1], [0.0, z1]],
                },
                RegionShape {
                    region: Convergent,
                    polygon: vec![[0.0, z1], [ri, z1], [rt, z2], [0.0, z2]],
                },
                RegionShape {
                    region: Throat,
                    polygon: vec![[0.0, z2], [rt, z2], [rt, z3], [0.0, z3]],
                },
                RegionShape {
                    region: Expansion,
                    polygon: vec![[0.0, z3], [ri, z3], [ri, z4], [0.0, z4]],
                },
            ],
            boundary: vec![
                seg([0.0, z0], [ri, z0], Inlet, InletPipe),
                seg([ri, z0], [ri, z1], Wall, InletPipe),
                seg([ri, z1], [rt, z2], Wall, Convergent),
                seg([rt, z2], [rt, z3], Wall, Throat),
                seg([rt, z3], [ri, z3], Wall, Expansion),
                seg([ri, z3], [ri, z4], Wall, Expansion),
                seg([ri, z4], [0.0, z4], Outlet, Expansion),
                seg([0.0, z4], [0.0, z3], Axis, Expansion),
                seg([0.0, z3], [0.0, z2], Axis, Throat),
                seg([0.0, z2], [0.0, z1], Axis, Convergent),
                seg([0.0, z1], [0.0, z0], Axis, InletPipe),
            ],
        }
    }
}

/// Convex polygon (counter-clockwise in (r, z)) covering one region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionShape {
    pub region: Region,
    pub polygon: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySegment {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub tag: BoundaryTag,
    pub region: Region,
}

impl BoundarySegment {
    pub fn length(&self) -> f64 {
        dist(self.a, self.b)
    }

    pub fn distance_to(&self, p: [f64; 2]) -> f64 {
        point_segment_distance(p, self.a, self.b)
    }
}

/// Meshable (r, z) half-domain: a counter-clockwise closed loop of tagged
/// boundary segments and a partition into convex regions.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub regions: Vec<RegionShape>,
    pub boundary: Vec<BoundarySegment>,
}

impl Domain {
    /// Straight pipe `r in [0, radius]`, `z in [z_in, z_out]`, one region.
    pub fn pipe(radius: f64, z_in: f64, z_out: f64) -> Result<Domain> {
        if !(radius > 0.0 && z_out > z_in) {
            return Err(Error::invalid(format!(
                "pipe needs radius > 0 and z_out > z_in (got {radius}, {z_in}..{z_out})"
            )));
        }
        use BoundaryTag::*;
        let r = Region::InletPipe;
        let corners = [[0.0, z_in], [radius, z_in], [radius, z_out], [0.0, z_out]];
        Ok(Domain {
            regions: vec![RegionShape {
                region: r,
                polygon: corners.to_vec(),
            }],
            boundary: [Inlet, Wall, Outlet, Axis]
                .into_iter()
                .enumerate()
                .map(|(i, tag)| BoundarySegment {
                    a: corners[i],
                    b: corners[(i + 1) % 4],
                    tag,
                    region: r,
                })
                .collect(),
        })
    }

    /// Signed area of the boundary loop.
    pub fn area(&self) -> f64 {
        0.5 * self
            .boundary
            .iter()
            .map(|s| s.a[0] * s.b[1] - s.b[0] * s.a[1])
            .sum::<f64>()
    }

    pub fn region_at(&self, p: [f64; 2]) -> Option<Region> {
        self.regions
            .iter()
            .find(|s| convex_contains(&s.polygon, p, 1e-14))
            .map(|s| s.region)
    }

    pub fn shape(&self, region: Region) -> Option<&RegionShape> {
        self.regions.iter().find(|s| s.region == region)
    }

    /// Smallest radial extent of a region, i.e. the narrowest opening.
    pub fn radial_extent(&self, region: Region) -> Option<f64> {
        let shape = self.shape(region)?;
        let zs: Vec<f64> = shape.polygon.iter().map(|p| p[1]).collect();
        let zmin = zs.iter().cloned().fold(f64::INFINITY, f64::min);
        let zmax = zs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let rmax_at = |z: f64| {
            shape
                .polygon
                .iter()
                .enumerate()
                .filter_map(|(i, &a)| {
                    let b = shape.polygon[(i + 1) % shape.polygon.len()];
                    let (lo, hi) = (a[1].min(b[1]), a[1].max(b[1]));
                    if z < lo || z > hi {
                        return None;
                    }
                    if (b[1] - a[1]).abs() < 1e-300 {
                        return Some(a[0].max(b[0]));
                    }
                    let t = (z - a[1]) / (b[1] - a[1]);
                    Some(a[0] + t * (b[0] - a[0]))
                })
                .fold(0.0, f64::max)
        };
        Some(rmax_at(zmin).min(rmax_at(zmax)))
    }

    /// Even-odd test against the boundary loop, with points on the
    /// boundary (within `tol`) counted as inside.
    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        if self.boundary.iter().any(|s| s.distance_to(p) <= tol) {
            return true;
        }
        let mut inside = false;
        for s in &self.boundary {
            let (a, b) = (s.a, s.b);
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        self.boundary
            .iter()
            .map(|s| s.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

pub(crate) fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    dist(p, [a[0] + t * d[0], a[1] + t * d[1]])
}

pub(crate) fn convex_contains(poly: &[[f64; 2]], p: [f64; 2], tol: f64) -> bool {
    let n = poly.len();
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let len = dist(a, b);
        let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        cross >= -tol * len.max(1.0)
    })
}

/// Distance from `p` to a convex polygon, zero inside.
pub(crate) fn convex_distance(poly: &[[f64; 2]], p: [f64; 2]) -> f64 {
    if convex_contains(poly, p, 0.0) {
        return 0.0;
    }
    let n = poly.len();
    (0..n)
        .map(|i| point_segment_distance(p, poly[i], poly[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_profile_radii() {
        let p = build_nozzle_profile(&NozzleDims::default()).unwrap();
        assert_eq!(p.radius(-0.01), 0.002);
        assert_eq!(p.radius(-1e-9), 0.002);
        assert_eq!(p.radius(1e-9), 0.006);
        assert_eq!(p.radius(p.z_inlet()), 0.006);
        assert_eq!(p.z_origin, 0.0);
        // cone is continuous at both ends
        let zc = p.z_convergent_start();
        let zt = p.z_throat_start();
        assert!((p.radius(zc + 1e-12) - 0.006).abs() < 1e-12);
        assert!((p.radius(zt - 1e-12) - 0.002).abs() < 1e-12);
        // 10 degree half-angle
        let half = ((0.006 - 0.002) / p.convergent_length).atan().to_degrees();
        assert!((half - 10.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_degenerate_nozzle() {
        let equal = NozzleDims {
            inlet_radius: Some(0.002),
            throat_radius: Some(0.002),
            ..Default::default()
        };
        assert!(matches!(
            build_nozzle_profile(&equal),
            Err(Error::InvalidParameter(_))
        ));
        let no_cone = NozzleDims {
            convergent_length: Some(0.0),
            ..Default::default()
        };
        assert!(matches!(
            build_nozzle_profile(&no_cone),
            Err(Error::InvalidParameter(_))
        ));
        let negative = NozzleDims {
            throat_length: Some(-1.0),
            ..Default::default()
        };
        assert!(build_nozzle_profile(&negative).is_err());
    }

    #[test]
    fn domain_area_matches_regions() {
        let d = NozzleProfile::default().domain();
        let regions: f64 = d
            .regions
            .iter()
            .map(|s| {
                let n = s.polygon.len();
                0.5 * (0..n)
                    .map(|i| {
                        let (a, b) = (s.polygon[i], s.polygon[(i + 1) % n]);
                        a[0] * b[1] - b[0] * a[1]
                    })
                    .sum::<f64>()
            })
            .sum();
        assert!(d.area() > 0.0);
        assert!((d.area() - regions).abs() < 1e-15);
        // loop is closed
        for w in d.boundary.windows(2) {
            assert_eq!(w[0].b, w[1].a);
        }
        assert_eq!(d.boundary.last().unwrap().b, d.boundary[0].a);
    }

    #[test]
    fn containment_and_extent() {
        let d = NozzleProfile::default().domain();
        assert!(d.contains([0.001, -0.01], 0.0));
        assert!(!d.contains([0.004, -0.01], 1e-10));
        assert!(d.contains([0.006, 0.05], 1e-10));
        assert_eq!(d.region_at([0.001, -0.01]), Some(Region::Throat));
        assert_eq!(d.radial_extent(Region::Throat), Some(0.002));
        assert_eq!(d.radial_extent(Region::Convergent), Some(0.002));
        assert_eq!(d.radial_extent(Region::Expansion), Some(0.006));
    }
}
