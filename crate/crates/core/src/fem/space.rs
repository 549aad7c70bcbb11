//! Global numbering of Lagrange degrees of freedom and the Taylor-Hood
//! velocity/pressure space.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::reference::{n_nodes, ReferenceElement, LOCAL_EDGES};
use crate::error::{Error, Result};
use crate::geometry::{AxisymMesh, BoundaryTag};

/// Continuous Lagrange numbering: vertex dofs first (vertex index), then
/// `k - 1` dofs per unique edge ordered from its lower-numbered vertex,
/// then interior dofs per triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    degree: usize,
    n_dofs: usize,
    n_local: usize,
    cells: Vec<usize>,
    coords: Vec<[f64; 2]>,
    n_vertices: usize,
    edge_index: HashMap<(usize, usize), usize>,
}

pub fn build_dof_map(mesh: &AxisymMesh, k: usize) -> Result<DofMap> {
    let element = ReferenceElement::new(k)?;
    if mesh.triangles.is_empty() {
        return Err(Error::invalid("cannot number dofs on an empty mesh"));
    }
    let nv = mesh.n_vertices();
    let edges = mesh.edges();
    let edge_index: HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(i, e)| ((e[0], e[1]), i)).collect();
    let per_edge = k - 1;
    let per_cell = (k - 1) * (k.max(2) - 2) / 2;
    let n_dofs = nv + per_edge * edges.len() + per_cell * mesh.n_triangles();
    let n_local = n_nodes(k);

    let mut cells = Vec::with_capacity(n_local * mesh.n_triangles());
    let mut coords = vec![[f64::NAN; 2]; n_dofs];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let start = cells.len();
        cells.extend_from_slice(tri);
        for [a, b] in LOCAL_EDGES {
            let (va, vb) = (tri[a], tri[b]);
            let e = edge_index[&(va.min(vb), va.max(vb))];
            for s in 0..per_edge {
                let along = if va < vb { s } else { per_edge - 1 - s };
                cells.push(nv + e * per_edge + along);
            }
        }
        for s in 0..per_cell {
            cells.push(nv + per_edge * edges.len() + t * per_cell + s);
        }
        let xy = mesh.triangle_coords(t);
        for (i, l) in element.nodes().iter().enumerate() {
            coords[cells[start + i]] = [
                l[0] * xy[0][0] + l[1] * xy[1][0] + l[2] * xy[2][0],
                l[0] * xy[0][1] + l[1] * xy[1][1] + l[2] * xy[2][1],
            ];
        }
    }
    Ok(DofMap {
        degree: k,
        n_dofs,
        n_local,
        cells,
        coords,
        n_vertices: nv,
        edge_index,
    })
}

impl DofMap {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn n_local(&self) -> usize {
        self.n_local
    }

    /// Global indices of triangle `t` in reference-element node order.
    pub fn cell(&self, t: usize) -> &[usize] {
        &self.cells[t * self.n_local..(t + 1) * self.n_local]
    }

    /// `(r, z)` of every dof node.
    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    /// Dofs lying on the edge `(a, b)`, endpoints included.
    pub fn edge_dofs(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let e = *self.edge_index.get(&(a.min(b), a.max(b)))?;
        let per_edge = self.degree - 1;
        let mut out = vec![a, b];
        out.extend((0..per_edge).map(|s| self.n_vertices + e * per_edge + s));
        Some(out)
    }

    /// Sorted dofs on boundary edges carrying `tag`.
    pub fn boundary_dofs(&self, mesh: &AxisymMesh, tag: BoundaryTag) -> Vec<usize> {
        let mut set = BTreeSet::new();
        for e in mesh.boundary_edges.iter().filter(|e| e.tag == tag) {
            if let Some(d) = self.edge_dofs(e.vertices[0], e.vertices[1]) {
                set.extend(d);
            }
        }
        set.into_iter().collect()
    }
}

/// Taylor-Hood pair `P_{N+1}/P_N` on a mesh. Global layout of a coefficient
/// vector: all `u_r` dofs, all `u_z` dofs, then pressure.
#[derive(Debug, Clone)]
pub struct FunctionSpace {
    mesh: Arc<AxisymMesh>,
    order: usize,
    velocity: DofMap,
    pressure: DofMap,
}

impl FunctionSpace {
    /// Velocity degree `order + 1`, pressure degree `order`.
    pub fn new(mesh: Arc<AxisymMesh>, order: usize) -> Result<Self> {
        if !(1..=2).contains(&order) {
            return Err(Error::invalid(format!("Taylor-Hood order N = {order} is not 1 or 2")));
        }
        let velocity = build_dof_map(&mesh, order + 1)?;
        let pressure = build_dof_map(&mesh, order)?;
        Ok(FunctionSpace {
            mesh,
            order,
            velocity,
            pressure,
        })
    }

    pub fn mesh(&self) -> &AxisymMesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<AxisymMesh> {
        &self.mesh
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn velocity_degree(&self) -> usize {
        self.order + 1
    }

    pub fn pressure_degree(&self) -> usize {
        self.order
    }

    pub fn velocity_map(&self) -> &DofMap {
        &self.velocity
    }

    pub fn pressure_map(&self) -> &DofMap {
        &self.pressure
    }

    /// Scalar velocity dofs per component.
    pub fn n_u(&self) -> usize {
        self.velocity.n_dofs
    }

    /// Velocity block size, both components.
    pub fn n_velocity(&self) -> usize {
        2 * self.velocity.n_dofs
    }

    pub fn n_pressure(&self) -> usize {
        self.pressure.n_dofs
    }

    pub fn n_total(&self) -> usize {
        self.n_velocity() + self.n_pressure()
    }

    pub fn ur_index(&self, i: usize) -> usize {
        i
    }

    pub fn uz_index(&self, i: usize) -> usize {
        self.velocity.n_dofs + i
    }

    pub fn p_index(&self, j: usize) -> usize {
        self.n_velocity() + j
    }

    /// Same mesh instance and degrees.
    pub fn compatible(&self, other: &FunctionSpace) -> bool {
        self.order == other.order
            && (Arc::ptr_eq(&self.mesh, &other.mesh) || *self.mesh == *other.mesh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mesh::tests::unit_square;
    use crate::geometry::{generate_axisym_mesh_seeded, Domain, Sizing};
    use std::collections::HashSet;

    #[test]
    fn square_counts() {
        let m = unit_square();
        assert_eq!(build_dof_map(&m, 1).unwrap().n_dofs(), 4);
        assert_eq!(build_dof_map(&m, 2).unwrap().n_dofs(), 9);
        assert_eq!(build_dof_map(&m, 3).unwrap().n_dofs(), 4 + 10 + 2);
        assert!(build_dof_map(&m, 4).is_err());
    }

    #[test]
    fn shared_nodes_single_valued_on_random_mesh() {
        let d = Domain::pipe(1.0, 0.0, 2.0).unwrap();
        let m = generate_axisym_mesh_seeded(&d, &Sizing::uniform(0.35), 3).unwrap();
        for k in 1..=3 {
            let map = build_dof_map(&m, k).unwrap();
            // enumeration oracle: unique vertices, edges and cells by brute force
            let mut verts = HashSet::new();
            let mut edges = HashSet::new();
            for t in &m.triangles {
                for i in 0..3 {
                    verts.insert(t[i]);
                    let (a, b) = (t[i], t[(i + 1) % 3]);
                    edges.insert((a.min(b), a.max(b)));
                }
            }
            let expect = verts.len() + (k - 1) * edges.len() + (k - 1) * (k.max(2) - 2) / 2 * m.triangles.len();
            assert_eq!(map.n_dofs(), expect, "k={k}");
            // identical coordinates give identical indices and every index is used
            let mut by_coord: HashMap<(i64, i64), usize> = HashMap::new();
            let mut used = vec![false; map.n_dofs()];
            for t in 0..m.n_triangles() {
                let el = ReferenceElement::new(k).unwrap();
                let xy = m.triangle_coords(t);
                for (i, &g) in map.cell(t).iter().enumerate() {
                    let l = el.nodes()[i];
                    let p = [0, 1].map(|d| l[0] * xy[0][d] + l[1] * xy[1][d] + l[2] * xy[2][d]);
                    let key = ((p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64);
                    assert_eq!(*by_coord.entry(key).or_insert(g), g);
                    assert!((map.coords()[g][0] - p[0]).abs() < 1e-12);
                    used[g] = true;
                }
            }
            assert!(used.iter().all(|&u| u));
        }
    }

    #[test]
    fn boundary_dofs_on_square() {
        let m = unit_square();
        let map = build_dof_map(&m, 2).unwrap();
        for tag in [BoundaryTag::Inlet, BoundaryTag::Wall, BoundaryTag::Outlet, BoundaryTag::Axis] {
            let d = map.boundary_dofs(&m, tag);
            assert_eq!(d.len(), 3, "{tag:?}");
        }
        let s = FunctionSpace::new(Arc::new(m), 1).unwrap();
        assert_eq!(s.n_total(), 2 * 9 + 4);
        assert_eq!(s.p_index(0), 18);
        assert!(FunctionSpace::new(s.mesh_arc().clone(), 3).is_err());
    }
}
