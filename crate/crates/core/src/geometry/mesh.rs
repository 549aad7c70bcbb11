//! Triangulated (r, z) half-domain, its statistics, uniform refinement and
//! the plain-text `axisym-mesh v1` format.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use super::locate::{Location, PointLocator};
use super::profile::{dist, BoundaryTag, Region};
use crate::error::{Error, Result};

pub const MESH_FORMAT_HEADER: &str = "axisym-mesh v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub tag: BoundaryTag,
}

#[derive(Debug, Default)]
pub struct AxisymMesh {
    /// Vertex coordinates `[r, z]`.
    pub vertices: Vec<[f64; 2]>,
    /// Counter-clockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub regions: Vec<Region>,
    pub boundary_edges: Vec<BoundaryEdge>,
    locator: OnceLock<PointLocator>,
}

impl Clone for AxisymMesh {
    fn clone(&self) -> Self {
        AxisymMesh::new(
            self.vertices.clone(),
            self.triangles.clone(),
            self.regions.clone(),
            self.boundary_edges.clone(),
        )
    }
}

impl PartialEq for AxisymMesh {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.triangles == other.triangles
            && self.regions == other.regions
            && self.boundary_edges == other.boundary_edges
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshStats {
    pub h_min: f64,
    pub h_max: f64,
    pub h_avg: f64,
    pub n_elt: usize,
    pub n_vertices: usize,
}

pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Twice the signed area of `(a, b, c)`; positive when counter-clockwise.
pub(crate) fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])
}

impl AxisymMesh {
    pub fn new(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        regions: Vec<Region>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Self {
        AxisymMesh {
            vertices,
            triangles,
            regions,
            boundary_edges,
            locator: OnceLock::new(),
        }
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_coords(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_coords(t);
        0.5 * orient(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.signed_area(t)).sum()
    }

    /// Unique edges in first-seen order over the triangle list.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut seen = HashMap::with_capacity(self.triangles.len() * 2);
        let mut out = Vec::with_capacity(self.triangles.len() * 2);
        for tri in &self.triangles {
            for i in 0..3 {
                let k = edge_key(tri[i], tri[(i + 1) % 3]);
                if seen.insert(k, ()).is_none() {
                    out.push([k.0, k.1]);
                }
            }
        }
        out
    }

    /// Number of triangles sharing each unique edge.
    pub fn edge_multiplicity(&self) -> HashMap<(usize, usize), usize> {
        let mut m = HashMap::with_capacity(self.triangles.len() * 2);
        for tri in &self.triangles {
            for i in 0..3 {
                *m.entry(edge_key(tri[i], tri[(i + 1) % 3])).or_insert(0) += 1;
            }
        }
        m
    }

    pub fn boundary_tag_of(&self, a: usize, b: usize) -> Option<BoundaryTag> {
        let k = edge_key(a, b);
        self.boundary_edges
            .iter()
            .find(|e| edge_key(e.vertices[0], e.vertices[1]) == k)
            .map(|e| e.tag)
    }

    /// Total length of boundary edges carrying `tag`.
    pub fn tag_length(&self, tag: BoundaryTag) -> f64 {
        self.boundary_edges
            .iter()
            .filter(|e| e.tag == tag)
            .map(|e| dist(self.vertices[e.vertices[0]], self.vertices[e.vertices[1]]))
            .sum()
    }

    /// Checks every structural invariant: indices in range, r >= 0,
    /// counter-clockwise triangles, conformity, one tag per boundary edge
    /// and axis edges on r = 0.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.triangles.is_empty() {
            return bad("mesh has no triangles".into());
        }
        if self.regions.len() != self.triangles.len() {
            return bad("region list length differs from triangle count".into());
        }
        let nv = self.vertices.len();
        for (i, v) in self.vertices.iter().enumerate() {
            if !(v[0].is_finite() && v[1].is_finite()) || v[0] < -1e-12 {
                return bad(format!("vertex {i} at {v:?} is invalid or has r < 0"));
            }
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return bad(format!("triangle {t} references a missing vertex"));
            }
            if self.signed_area(t) <= 0.0 {
                return bad(format!("triangle {t} is not positively oriented"));
            }
        }
        let mult = self.edge_multiplicity();
        if let Some((k, m)) = mult.iter().find(|(_, &m)| m > 2) {
            return bad(format!("edge {k:?} shared by {m} triangles"));
        }
        let mut tagged: HashMap<(usize, usize), usize> = HashMap::new();
        for e in &self.boundary_edges {
            let k = edge_key(e.vertices[0], e.vertices[1]);
            *tagged.entry(k).or_insert(0) += 1;
            if mult.get(&k) != Some(&1) {
                return bad(format!("boundary edge {k:?} is not a boundary edge of the mesh"));
            }
            if e.tag == BoundaryTag::Axis
                && (self.vertices[k.0][0].abs() > 1e-12 || self.vertices[k.1][0].abs() > 1e-12)
            {
                return bad(format!("axis edge {k:?} is off r = 0"));
            }
        }
        if let Some((k, _)) = tagged.iter().find(|(_, &c)| c > 1) {
            return bad(format!("boundary edge {k:?} tagged more than once"));
        }
        let n_boundary = mult.values().filter(|&&m| m == 1).count();
        if n_boundary != tagged.len() {
            return bad(format!(
                "{} boundary edges but {} tagged",
                n_boundary,
                tagged.len()
            ));
        }
        Ok(())
    }

    pub fn stats(&self) -> Result<MeshStats> {
        mesh_stats(self)
    }

    pub fn locator(&self) -> &PointLocator {
        self.locator.get_or_init(|| PointLocator::new(self))
    }

    pub fn locate_point(&self, p: [f64; 2]) -> Result<Location> {
        self.locator().locate(self, p)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{MESH_FORMAT_HEADER}").unwrap();
        writeln!(s, "{}", self.vertices.len()).unwrap();
        for v in &self.vertices {
            writeln!(s, "{:e} {:e}", v[0], v[1]).unwrap();
        }
        writeln!(s, "{}", self.triangles.len()).unwrap();
        for (t, r) in self.triangles.iter().zip(&self.regions) {
            writeln!(s, "{} {} {} {}", t[0], t[1], t[2], r.id()).unwrap();
        }
        let mut edges = self.boundary_edges.clone();
        edges.sort();
        writeln!(s, "{}", edges.len()).unwrap();
        for e in &edges {
            writeln!(s, "{} {} {}", e.vertices[0], e.vertices[1], e.tag.as_str()).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<AxisymMesh> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line: usize, message: String| Error::Parse {
            path: "<mesh>".into(),
            line,
            message,
        };
        let (l, header) = lines.next().ok_or_else(|| err(1, "empty mesh file".into()))?;
        if header != MESH_FORMAT_HEADER {
            return Err(err(l, format!("expected header `{MESH_FORMAT_HEADER}`")));
        }
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| err(0, format!("unexpected end of file reading {what}")))
        };
        let count = |(l, s): (usize, &str)| {
            s.parse::<usize>()
                .map_err(|e| err(l, format!("bad count `{s}`: {e}")))
        };
        let nv = count(next("vertex count")?)?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (l, s) = next("vertex")?;
            let f: Vec<f64> = s
                .split_whitespace()
                .map(|x| x.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| err(l, format!("bad vertex: {e}")))?;
            if f.len() != 2 {
                return Err(err(l, "vertex line needs 2 values".into()));
            }
            vertices.push([f[0], f[1]]);
        }
        let nt = count(next("triangle count")?)?;
        let mut triangles = Vec::with_capacity(nt);
        let mut regions = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (l, s) = next("triangle")?;
            let f: Vec<usize> = s
                .split_whitespace()
                .map(|x| x.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| err(l, format!("bad triangle: {e}")))?;
            if f.len() != 4 {
                return Err(err(l, "triangle line needs 3 indices and a region".into()));
            }
            triangles.push([f[0], f[1], f[2]]);
            regions.push(Region::from_id(f[3]).ok_or_else(|| err(l, "bad region id".into()))?);
        }
        let nb = count(next("boundary edge count")?)?;
        let mut boundary_edges = Vec::with_capacity(nb);
        for _ in 0..nb {
            let (l, s) = next("boundary edge")?;
            let f: Vec<&str> = s.split_whitespace().collect();
            if f.len() != 3 {
                return Err(err(l, "boundary edge line needs 2 indices and a tag".into()));
            }
            let a = f[0].parse::<usize>().map_err(|e| err(l, e.to_string()))?;
            let b = f[1].parse::<usize>().map_err(|e| err(l, e.to_string()))?;
            let tag = BoundaryTag::parse(f[2]).ok_or_else(|| err(l, format!("bad tag `{}`", f[2])))?;
            boundary_edges.push(BoundaryEdge {
                vertices: [a, b],
                tag,
            });
        }
        let mesh = AxisymMesh::new(vertices, triangles, regions, boundary_edges);
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<AxisymMesh> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        AxisymMesh::from_text(&text).map_err(|e| match e {
            Error::Parse { line, message, .. } => Error::Parse {
                path: path.display().to_string(),
                line,
                message,
            },
            other => other,
        })
    }
}

/// Edge-length statistics over the unique edge set.
pub fn mesh_stats(mesh: &AxisymMesh) -> Result<MeshStats> {
    if mesh.triangles.is_empty() {
        return Err(Error::InvalidInput("mesh_stats on an empty mesh".into()));
    }
    let edges = mesh.edges();
    let (mut h_min, mut h_max, mut sum) = (f64::INFINITY, 0.0f64, 0.0);
    for [a, b] in &edges {
        let l = dist(mesh.vertices[*a], mesh.vertices[*b]);
        h_min = h_min.min(l);
        h_max = h_max.max(l);
        sum += l;
    }
    Ok(MeshStats {
        h_min,
        h_max,
        h_avg: sum / edges.len() as f64,
        n_elt: mesh.triangles.len(),
        n_vertices: mesh.vertices.len(),
    })
}

/// Splits every triangle into four by its edge midpoints.
pub fn refine_uniform(mesh: &AxisymMesh) -> Result<AxisymMesh> {
    mesh.validate()?;
    let mut vertices = mesh.vertices.clone();
    let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
    let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<[f64; 2]>| -> usize {
        *mid.entry(edge_key(a, b)).or_insert_with(|| {
            let (p, q) = (vertices[a], vertices[b]);
            vertices.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
            vertices.len() - 1
        })
    };
    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    let mut regions = Vec::with_capacity(4 * mesh.triangles.len());
    for (tri, &region) in mesh.triangles.iter().zip(&mesh.regions) {
        let [a, b, c] = *tri;
        let ab = midpoint(a, b, &mut vertices);
        let bc = midpoint(b, c, &mut vertices);
        let ca = midpoint(c, a, &mut vertices);
        triangles.extend_from_slice(&[[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        regions.extend_from_slice(&[region; 4]);
    }
    let mut boundary_edges = Vec::with_capacity(2 * mesh.boundary_edges.len());
    for e in &mesh.boundary_edges {
        let [a, b] = e.vertices;
        let m = midpoint(a, b, &mut vertices);
        boundary_edges.push(BoundaryEdge {
            vertices: [a, m],
            tag: e.tag,
        });
        boundary_edges.push(BoundaryEdge {
            vertices: [m, b],
            tag: e.tag,
        });
    }
    Ok(AxisymMesh::new(vertices, triangles, regions, boundary_edges))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::geometry::profile::Region;

    /// Two counter-clockwise triangles on the unit square `[0,1]^2`.
    pub(crate) fn unit_square() -> AxisymMesh {
        use BoundaryTag::*;
        AxisymMesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3]],
            vec![Region::InletPipe; 2],
            vec![
                BoundaryEdge { vertices: [0, 1], tag: Inlet },
                BoundaryEdge { vertices: [1, 2], tag: Wall },
                BoundaryEdge { vertices: [2, 3], tag: Outlet },
                BoundaryEdge { vertices: [3, 0], tag: Axis },
            ],
        )
    }

    #[test]
    fn unit_square_is_valid() {
        unit_square().validate().unwrap();
    }

    #[test]
    fn right_triangle_stats() {
        let m = AxisymMesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            vec![[0, 1, 2]],
            vec![Region::InletPipe],
            vec![],
        );
        let s = mesh_stats(&m).unwrap();
        assert_eq!(s.h_min, 1.0);
        assert!((s.h_max - 2f64.sqrt()).abs() < 1e-15);
        assert!((s.h_avg - (2.0 + 2f64.sqrt()) / 3.0).abs() < 1e-15);
        assert_eq!(s.n_elt, 1);
    }

    #[test]
    fn empty_mesh_stats_rejected() {
        assert!(matches!(
            mesh_stats(&AxisymMesh::default()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn refine_counts() {
        let m = unit_square();
        let r1 = refine_uniform(&m).unwrap();
        assert_eq!(r1.n_triangles(), 8);
        r1.validate().unwrap();
        let r2 = refine_uniform(&r1).unwrap();
        assert_eq!(r2.n_triangles(), 32);
        assert!((r2.total_area() - 1.0).abs() < 1e-15);
        for tag in [BoundaryTag::Inlet, BoundaryTag::Wall, BoundaryTag::Outlet, BoundaryTag::Axis] {
            assert!((r2.tag_length(tag) - m.tag_length(tag)).abs() < 1e-15);
        }
        let (s0, s1) = (m.stats().unwrap(), r1.stats().unwrap());
        assert!((s1.h_max / s0.h_max - 0.5).abs() < 1e-12);
    }

    #[test]
    fn validate_catches_defects() {
        let mut m = unit_square();
        m.triangles[0] = [0, 2, 1];
        assert!(m.validate().is_err());
        let mut m = unit_square();
        m.boundary_edges.pop();
        assert!(m.validate().is_err());
        let mut m = unit_square();
        m.boundary_edges[1].tag = BoundaryTag::Axis;
        assert!(m.validate().is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let m = refine_uniform(&unit_square()).unwrap();
        let text = m.to_text();
        assert!(text.starts_with("axisym-mesh v1\n9\n"));
        let back = AxisymMesh::from_text(&text).unwrap();
        assert_eq!(back.vertices, m.vertices);
        assert_eq!(back.triangles, m.triangles);
        let mut e = m.boundary_edges.clone();
        e.sort();
        assert_eq!(back.boundary_edges, e);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn text_format_errors_carry_line() {
        let err = AxisymMesh::from_text("axisym-mesh v1\n1\n0 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        assert!(AxisymMesh::from_text("mesh v2\n").is_err());
    }
}
