//! Structured triangulations of rectangles, for verification runs.

use super::mesh::{AxisymMesh, BoundaryEdge};
use super::profile::{BoundaryTag, Region};
use crate::error::{Error, Result};

/// `nr x nz` cells on `[r0, r1] x [z0, z1]`, each split along its
/// diagonal. Edges on `r = 0` are tagged axis (wall when `r0 > 0`), `r = r1`
/// wall, `z = z0` inlet and `z = z1` outlet.
pub fn rectangle_mesh(r: [f64; 2], z: [f64; 2], nr: usize, nz: usize) -> Result<AxisymMesh> {
    let [r0, r1] = r;
    let [z0, z1] = z;
    if nr == 0 || nz == 0 || !(r1 > r0) || !(z1 > z0) || r0 < 0.0 {
        return Err(Error::invalid(format!(
            "rectangle [{r0}, {r1}] x [{z0}, {z1}] with {nr} x {nz} cells is degenerate"
        )));
    }
    let id = |i: usize, j: usize| j * (nr + 1) + i;
    let mut vertices = Vec::with_capacity((nr + 1) * (nz + 1));
    for j in 0..=nz {
        for i in 0..=nr {
            vertices.push([
                r0 + (r1 - r0) * i as f64 / nr as f64,
                z0 + (z1 - z0) * j as f64 / nz as f64,
            ]);
        }
    }
    if r0 == 0.0 {
        for j in 0..=nz {
            vertices[id(0, j)][0] = 0.0;
        }
    }
    let mut triangles = Vec::with_capacity(2 * nr * nz);
    for j in 0..nz {
        for i in 0..nr {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    let left = if r0 == 0.0 { BoundaryTag::Axis } else { BoundaryTag::Wall };
    let mut boundary_edges = Vec::new();
    for i in 0..nr {
        boundary_edges.push(BoundaryEdge { vertices: [id(i, 0), id(i + 1, 0)], tag: BoundaryTag::Inlet });
        boundary_edges.push(BoundaryEdge { vertices: [id(i + 1, nz), id(i, nz)], tag: BoundaryTag::Outlet });
    }
    for j in 0..nz {
        boundary_edges.push(BoundaryEdge { vertices: [id(nr, j), id(nr, j + 1)], tag: BoundaryTag::Wall });
        boundary_edges.push(BoundaryEdge { vertices: [id(0, j + 1), id(0, j)], tag: left });
    }
    let n = triangles.len();
    let mesh = AxisymMesh::new(vertices, triangles, vec![Region::InletPipe; n], boundary_edges);
    mesh.validate()?;
    Ok(mesh)
}
