//! Graded triangular meshing of a [`Domain`] by constrained Delaunay
//! refinement.
//!
//! The boundary loop is split according to a graded size field and inserted
//! as constraint edges; interior points are seeded on jittered hexagonal
//! lattices, region by region from finest to coarsest. Delaunay refinement
//! then enforces the angle floor, and a size pass inserts centroids of
//! triangles that are still too long for the local target until none
//! remain.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};

use super::mesh::{edge_key, AxisymMesh, BoundaryEdge};
use super::profile::{convex_distance, dist, Domain, Region};
use crate::error::{Error, Result};

/// Minimum interior angle guaranteed on every generated triangle.
pub const MIN_ANGLE_DEG: f64 = 20.0;
// Refinement target; a margin above the guarantee absorbs the size pass.
const REFINE_ANGLE_DEG: f64 = 22.0;
// Size field growth per unit distance away from a finer region.
const GRADING: f64 = 0.3;
// Triangles whose longest edge exceeds this multiple of the local size get split.
const SPLIT_FACTOR: f64 = 1.5;
const MAX_SIZE_PASSES: usize = 40;

/// Target edge length per region, metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sizing {
    pub h: [f64; 4],
}

impl Sizing {
    pub fn uniform(h: f64) -> Self {
        Sizing { h: [h; 4] }
    }

    pub fn per_region(inlet_pipe: f64, convergent: f64, throat: f64, expansion: f64) -> Self {
        Sizing {
            h: [inlet_pipe, convergent, throat, expansion],
        }
    }

    pub fn get(&self, region: Region) -> f64 {
        self.h[region.id()]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Sizing {
            h: self.h.map(|h| h * factor),
        }
    }
}

struct SizeField<'a> {
    domain: &'a Domain,
    sizing: &'a Sizing,
}

impl SizeField<'_> {
    fn at(&self, p: [f64; 2]) -> f64 {
        self.domain
            .regions
            .iter()
            .map(|s| self.sizing.get(s.region) + GRADING * convex_distance(&s.polygon, p))
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn generate_axisym_mesh(domain: &Domain, sizing: &Sizing) -> Result<AxisymMesh> {
    generate_axisym_mesh_seeded(domain, sizing, 0)
}

/// As [`generate_axisym_mesh`]; `seed` drives the lattice jitter, so equal
/// seeds give identical meshes.
pub fn generate_axisym_mesh_seeded(domain: &Domain, sizing: &Sizing, seed: u64) -> Result<AxisymMesh> {
    for shape in &domain.regions {
        let h = sizing.get(shape.region);
        let name = shape.region.name();
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Meshing {
                region: name.into(),
                reason: format!("target size {h} must be positive"),
            });
        }
        let extent = domain.radial_extent(shape.region).unwrap_or(0.0);
        if h >= extent {
            return Err(Error::Meshing {
                region: name.into(),
                reason: format!("target size {h} m is not smaller than the radial extent {extent} m"),
            });
        }
    }
    let field = SizeField { domain, sizing };
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    let fail = |reason: String| Error::Meshing {
        region: "domain".into(),
        reason,
    };

    let boundary = boundary_points(domain, &field);
    let mut handles = Vec::with_capacity(boundary.len());
    for p in &boundary {
        handles.push(
            cdt.insert(Point2::new(p[0], p[1]))
                .map_err(|e| fail(format!("boundary insertion failed: {e:?}")))?,
        );
    }
    for i in 0..handles.len() {
        cdt.add_constraint(handles[i], handles[(i + 1) % handles.len()]);
    }
    for p in seed_points(domain, sizing, &field, &boundary, seed) {
        cdt.insert(Point2::new(p[0], p[1]))
            .map_err(|e| fail(format!("seed insertion failed: {e:?}")))?;
    }

    let mut excluded: HashSet<_>;
    let mut pass = 0;
    loop {
        let params = RefinementParameters::<f64>::new()
            .with_angle_limit(AngleLimit::from_deg(REFINE_ANGLE_DEG))
            .exclude_outer_faces(true)
            .with_max_additional_vertices(2_000_000);
        let res = cdt.refine(params);
        if !res.refinement_complete {
            return Err(fail("Delaunay refinement ran out of vertices".into()));
        }
        excluded = res.excluded_faces.into_iter().collect();
        let mut splits = Vec::new();
        for face in cdt.inner_faces() {
            if excluded.contains(&face.fix()) {
                continue;
            }
            let tri = face.vertices().map(|v| {
                let p = v.position();
                [p.x, p.y]
            });
            let c = centroid(tri);
            let longest = (0..3).map(|i| dist(tri[i], tri[(i + 1) % 3])).fold(0.0, f64::max);
            if longest > SPLIT_FACTOR * field.at(c) {
                splits.push(c);
            }
        }
        if splits.is_empty() {
            break;
        }
        pass += 1;
        if pass > MAX_SIZE_PASSES {
            return Err(fail("size refinement did not settle".into()));
        }
        for c in splits {
            cdt.insert(Point2::new(c[0], c[1]))
                .map_err(|e| fail(format!("size refinement insertion failed: {e:?}")))?;
        }
    }

    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut regions = Vec::new();
    for face in cdt.inner_faces() {
        if excluded.contains(&face.fix()) {
            continue;
        }
        let vs = face.vertices();
        let mut tri = [0usize; 3];
        for (k, v) in vs.iter().enumerate() {
            let next = vertices.len();
            tri[k] = *index.entry(v.fix().index()).or_insert_with(|| {
                let p = v.position();
                vertices.push([p.x.max(0.0), p.y]);
                next
            });
        }
        let coords = tri.map(|i| vertices[i]);
        let c = centroid(coords);
        let region = domain
            .region_at(c)
            .ok_or_else(|| fail(format!("triangle centroid {c:?} lies in no region")))?;
        triangles.push(tri);
        regions.push(region);
    }

    let scale = domain
        .boundary
        .iter()
        .map(|s| s.length())
        .fold(0.0, f64::max);
    let on_tol = 1e-9 * scale;
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for tri in &triangles {
        for i in 0..3 {
            *count.entry(edge_key(tri[i], tri[(i + 1) % 3])).or_insert(0) += 1;
        }
    }
    let mut boundary_edges = Vec::new();
    for tri in &triangles {
        for i in 0..3 {
            let (a, b) = (tri[i], tri[(i + 1) % 3]);
            if count[&edge_key(a, b)] != 1 {
                continue;
            }
            let (pa, pb) = (vertices[a], vertices[b]);
            let seg = domain
                .boundary
                .iter()
                .find(|s| s.distance_to(pa) <= on_tol && s.distance_to(pb) <= on_tol)
                .ok_or_else(|| fail(format!("boundary edge {pa:?}-{pb:?} lies on no boundary segment")))?;
            boundary_edges.push(BoundaryEdge {
                vertices: [a, b],
                tag: seg.tag,
            });
        }
    }
    let mesh = AxisymMesh::new(vertices, triangles, regions, boundary_edges);
    mesh.validate()?;
    check_quality(&mesh, sizing)?;
    Ok(mesh)
}

fn centroid(t: [[f64; 2]; 3]) -> [f64; 2] {
    [(t[0][0] + t[1][0] + t[2][0]) / 3.0, (t[0][1] + t[1][1] + t[2][1]) / 3.0]
}

/// Smallest interior angle of a triangle, degrees.
pub fn min_angle_deg(t: [[f64; 2]; 3]) -> f64 {
    (0..3)
        .map(|i| {
            let (a, b, c) = (t[i], t[(i + 1) % 3], t[(i + 2) % 3]);
            let u = [b[0] - a[0], b[1] - a[1]];
            let v = [c[0] - a[0], c[1] - a[1]];
            let cos = (u[0] * v[0] + u[1] * v[1]) / ((u[0].hypot(u[1])) * (v[0].hypot(v[1])));
            cos.clamp(-1.0, 1.0).acos().to_degrees()
        })
        .fold(180.0, f64::min)
}

fn check_quality(mesh: &AxisymMesh, sizing: &Sizing) -> Result<()> {
    for t in 0..mesh.n_triangles() {
        let tri = mesh.triangle_coords(t);
        let region = mesh.regions[t];
        let angle = min_angle_deg(tri);
        let longest = (0..3).map(|i| dist(tri[i], tri[(i + 1) % 3])).fold(0.0, f64::max);
        if angle < MIN_ANGLE_DEG || longest > 2.0 * sizing.get(region) {
            return Err(Error::Meshing {
                region: region.name().into(),
                reason: format!(
                    "triangle {t} fails quality (min angle {angle:.2} deg, longest edge {longest:e} m)"
                ),
            });
        }
    }
    Ok(())
}

/// Boundary loop vertices, each segment split so that the size field is
/// equidistributed along it.
fn boundary_points(domain: &Domain, field: &SizeField) -> Vec<[f64; 2]> {
    const SAMPLES: usize = 400;
    let mut pts = Vec::new();
    for seg in &domain.boundary {
        let at = |t: f64| [seg.a[0] + t * (seg.b[0] - seg.a[0]), seg.a[1] + t * (seg.b[1] - seg.a[1])];
        let len = seg.length();
        // cumulative integral of 1/h along the segment
        let mut cum = vec![0.0; SAMPLES + 1];
        for k in 1..=SAMPLES {
            let (t0, t1) = ((k - 1) as f64 / SAMPLES as f64, k as f64 / SAMPLES as f64);
            let mid = 0.5 * (1.0 / field.at(at(t0)) + 1.0 / field.at(at(t1)));
            cum[k] = cum[k - 1] + mid * len / SAMPLES as f64;
        }
        let n = (cum[SAMPLES].ceil() as usize).max(1);
        pts.push(seg.a);
        let mut k = 0;
        for j in 1..n {
            let target = cum[SAMPLES] * j as f64 / n as f64;
            while cum[k + 1] < target {
                k += 1;
            }
            let frac = (target - cum[k]) / (cum[k + 1] - cum[k]);
            pts.push(at((k as f64 + frac) / SAMPLES as f64));
        }
    }
    pts
}

fn seed_points(
    domain: &Domain,
    sizing: &Sizing,
    field: &SizeField,
    boundary: &[[f64; 2]],
    seed: u64,
) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h_min = domain
        .regions
        .iter()
        .map(|s| sizing.get(s.region))
        .fold(f64::INFINITY, f64::min);
    let mut grid: HashMap<(i64, i64), Vec<[f64; 2]>> = HashMap::new();
    let key = |p: [f64; 2]| ((p[0] / h_min).floor() as i64, (p[1] / h_min).floor() as i64);
    for &p in boundary {
        grid.entry(key(p)).or_default().push(p);
    }
    let too_close = |grid: &HashMap<(i64, i64), Vec<[f64; 2]>>, p: [f64; 2], r: f64| {
        let reach = (r / h_min).ceil() as i64;
        let (ci, cj) = key(p);
        for i in ci - reach..=ci + reach {
            for j in cj - reach..=cj + reach {
                if let Some(v) = grid.get(&(i, j)) {
                    if v.iter().any(|&q| dist(p, q) < r) {
                        return true;
                    }
                }
            }
        }
        false
    };

    let mut order: Vec<_> = domain.regions.iter().collect();
    order.sort_by(|a, b| sizing.get(a.region).total_cmp(&sizing.get(b.region)));
    let mut out = Vec::new();
    for shape in order {
        let h = sizing.get(shape.region);
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for v in &shape.polygon {
            for d in 0..2 {
                lo[d] = lo[d].min(v[d]);
                hi[d] = hi[d].max(v[d]);
            }
        }
        let dz = h * 3f64.sqrt() / 2.0;
        let rows = ((hi[1] - lo[1]) / dz).ceil() as usize + 1;
        let cols = ((hi[0] - lo[0]) / h).ceil() as usize + 2;
        for j in 0..rows {
            let shift = if j % 2 == 1 { 0.5 * h } else { 0.0 };
            for i in 0..cols {
                let jitter = [rng.gen_range(-0.05..0.05) * h, rng.gen_range(-0.05..0.05) * h];
                let p = [
                    lo[0] + shift + i as f64 * h + jitter[0],
                    lo[1] + j as f64 * dz + jitter[1],
                ];
                if convex_distance(&shape.polygon, p) > 0.0 || !domain.contains(p, 0.0) {
                    continue;
                }
                let hp = field.at(p);
                if domain.boundary_distance(p) < 0.5 * hp || too_close(&grid, p, 0.7 * hp) {
                    continue;
                }
                grid.entry(key(p)).or_default().push(p);
                out.push(p);
            }
        }
    }
    out
}
