//! Point location on a triangle mesh via a uniform bucket grid.

use super::mesh::{orient, AxisymMesh};
use super::profile::point_segment_distance;
use crate::error::{Error, Result};

/// Points this far outside the mesh (in metres) still snap to the
/// nearest triangle.
pub const LOCATE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub triangle: usize,
    /// Barycentric coordinates with respect to the triangle's vertices, in order.
    pub bary: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct PointLocator {
    origin: [f64; 2],
    cell: f64,
    dims: [usize; 2],
    buckets: Vec<Vec<u32>>,
}

pub(crate) fn barycentric(tri: [[f64; 2]; 3], p: [f64; 2]) -> [f64; 3] {
    let [a, b, c] = tri;
    let area2 = orient(a, b, c);
    let l0 = orient(p, b, c) / area2;
    let l1 = orient(a, p, c) / area2;
    [l0, l1, 1.0 - l0 - l1]
}

fn triangle_distance(tri: [[f64; 2]; 3], p: [f64; 2]) -> f64 {
    let b = barycentric(tri, p);
    if b.iter().all(|&l| l >= 0.0) {
        return 0.0;
    }
    (0..3)
        .map(|i| point_segment_distance(p, tri[i], tri[(i + 1) % 3]))
        .fold(f64::INFINITY, f64::min)
}

impl PointLocator {
    pub fn new(mesh: &AxisymMesh) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &mesh.vertices {
            for d in 0..2 {
                lo[d] = lo[d].min(v[d]);
                hi[d] = hi[d].max(v[d]);
            }
        }
        if mesh.triangles.is_empty() || !lo[0].is_finite() {
            return PointLocator {
                origin: [0.0; 2],
                cell: 1.0,
                dims: [1, 1],
                buckets: vec![Vec::new()],
            };
        }
        // about two triangles per cell
        let area = (hi[0] - lo[0]).max(1e-300) * (hi[1] - lo[1]).max(1e-300);
        let cell = (2.0 * area / mesh.triangles.len() as f64).sqrt().max(1e-300);
        let dims = [
            (((hi[0] - lo[0]) / cell).ceil() as usize).clamp(1, 1 << 14),
            (((hi[1] - lo[1]) / cell).ceil() as usize).clamp(1, 1 << 14),
        ];
        let mut loc = PointLocator {
            origin: lo,
            cell,
            dims,
            buckets: vec![Vec::new(); dims[0] * dims[1]],
        };
        for t in 0..mesh.triangles.len() {
            let tri = mesh.triangle_coords(t);
            let (mut bl, mut bh) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
            for v in tri {
                for d in 0..2 {
                    bl[d] = bl[d].min(v[d]);
                    bh[d] = bh[d].max(v[d]);
                }
            }
            let (i0, j0) = loc.cell_of([bl[0] - LOCATE_TOLERANCE, bl[1] - LOCATE_TOLERANCE]);
            let (i1, j1) = loc.cell_of([bh[0] + LOCATE_TOLERANCE, bh[1] + LOCATE_TOLERANCE]);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    loc.buckets[j * dims[0] + i].push(t as u32);
                }
            }
        }
        loc
    }

    fn cell_of(&self, p: [f64; 2]) -> (usize, usize) {
        let f = |d: usize| {
            let x = ((p[d] - self.origin[d]) / self.cell).floor();
            (x.max(0.0) as usize).min(self.dims[d] - 1)
        };
        (f(0), f(1))
    }

    /// Finds the triangle containing `p`. Points on shared edges resolve to
    /// the candidate with the largest minimum barycentric coordinate.
    pub fn locate(&self, mesh: &AxisymMesh, p: [f64; 2]) -> Result<Location> {
        let not_found = || Error::NotFound(format!("point (r={:e}, z={:e}) is outside the mesh", p[0], p[1]));
        if !(p[0].is_finite() && p[1].is_finite()) {
            return Err(not_found());
        }
        let outside = |d: usize| {
            p[d] < self.origin[d] - LOCATE_TOLERANCE
                || p[d] > self.origin[d] + self.dims[d] as f64 * self.cell + LOCATE_TOLERANCE
        };
        if outside(0) || outside(1) {
            return Err(not_found());
        }
        let (i, j) = self.cell_of(p);
        let mut best: Option<(f64, usize, [f64; 3])> = None;
        for &t in &self.buckets[j * self.dims[0] + i] {
            let t = t as usize;
            let b = barycentric(mesh.triangle_coords(t), p);
            let m = b[0].min(b[1]).min(b[2]);
            if best.map_or(true, |(bm, _, _)| m > bm) {
                best = Some((m, t, b));
            }
        }
        let (m, t, b) = best.ok_or_else(not_found)?;
        if m >= 0.0 {
            return Ok(Location { triangle: t, bary: b });
        }
        // Slightly outside every candidate: accept the nearest triangle
        // within the geometric tolerance.
        let mut near: Option<(f64, usize)> = None;
        for &t in &self.buckets[j * self.dims[0] + i] {
            let d = triangle_distance(mesh.triangle_coords(t as usize), p);
            if near.map_or(true, |(nd, _)| d < nd) {
                near = Some((d, t as usize));
            }
        }
        let (d, t) = near.ok_or_else(not_found)?;
        if d > LOCATE_TOLERANCE {
            return Err(not_found());
        }
        let b = barycentric(mesh.triangle_coords(t), p);
        let clamped = b.map(|l| l.max(0.0));
        let s: f64 = clamped.iter().sum();
        let l0 = clamped[0] / s;
        let l1 = clamped[1] / s;
        Ok(Location {
            triangle: t,
            bary: [l0, l1, 1.0 - l0 - l1],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mesh::{refine_uniform, tests::unit_square};

    fn fine_square() -> AxisymMesh {
        let mut m = unit_square();
        for _ in 0..3 {
            m = refine_uniform(&m).unwrap();
        }
        m
    }

    #[test]
    fn vertex_and_centroid() {
        let m = fine_square();
        for t in [0, 7, 100, m.n_triangles() - 1] {
            let tri = m.triangle_coords(t);
            let c = [
                (tri[0][0] + tri[1][0] + tri[2][0]) / 3.0,
                (tri[0][1] + tri[1][1] + tri[2][1]) / 3.0,
            ];
            let loc = m.locate_point(c).unwrap();
            assert_eq!(loc.triangle, t);
            for l in loc.bary {
                assert!((l - 1.0 / 3.0).abs() < 1e-12);
            }
            let loc = m.locate_point(tri[1]).unwrap();
            let v = m.triangles[t][1];
            let k = m.triangles[loc.triangle].iter().position(|&x| x == v).unwrap();
            assert!((loc.bary[k] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn outside_points() {
        let m = fine_square();
        assert!(matches!(m.locate_point([1.5, 0.5]), Err(Error::NotFound(_))));
        assert!(m.locate_point([-1e-9, 0.5]).is_err());
        let loc = m.locate_point([-1e-11, 0.5]).unwrap();
        assert!(loc.bary.iter().all(|&l| (-1e-10..=1.0 + 1e-10).contains(&l)));
        assert!((loc.bary.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
