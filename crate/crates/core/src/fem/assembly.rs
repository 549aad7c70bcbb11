//! Assembly of the axisymmetric operator blocks. Every integral carries the
//! meridian-plane weight `r`; the `2π` factor is left out.

use std::str::FromStr;

use super::field::Field;
use super::quadrature::{gauss_unit, quadrature_rule, QuadratureRule};
use super::reference::{ReferenceElement, LOCAL_EDGES};
use super::space::{DofMap, FunctionSpace};
use crate::error::{Error, Result};
use crate::geometry::BoundaryTag;
use crate::linalg::{csr_from_triplets, CsrMatrix};

/// Basis values and reference gradients of one element at every quadrature point.
#[derive(Debug, Clone)]
pub(crate) struct Tabulation {
    pub values: Vec<Vec<f64>>,
    pub grads: Vec<Vec<[f64; 2]>>,
}

impl Tabulation {
    pub fn new(element: &ReferenceElement, points: &[[f64; 3]]) -> Self {
        let (values, grads) = points
            .iter()
            .map(|&p| {
                let b = element.eval(p);
                (b.values, b.grads)
            })
            .unzip();
        Tabulation { values, grads }
    }
}

/// Quadrature rule used for every block: exact to degree `2 k_u + 2`, or
/// `3 k_u` when higher, which covers the convection integrand
/// `r w (∇u) v`.
pub fn rule_for(space: &FunctionSpace) -> Result<QuadratureRule> {
    let k = space.velocity_degree();
    quadrature_rule((2 * k + 2).max(3 * k))
}

/// Per-element geometric data and physical basis gradients at quadrature
/// points, refilled in place for each triangle.
pub(crate) struct ElementCache<'a> {
    space: &'a FunctionSpace,
    pub rule: QuadratureRule,
    pub u_tab: Tabulation,
    pub p_tab: Tabulation,
    /// `(r, z)` of each quadrature point.
    pub xq: Vec<[f64; 2]>,
    /// Quadrature weight times |det J| (no `r`).
    pub jxw: Vec<f64>,
    pub u_grads: Vec<Vec<[f64; 2]>>,
    pub p_grads: Vec<Vec<[f64; 2]>>,
}

impl<'a> ElementCache<'a> {
    pub fn new(space: &'a FunctionSpace) -> Result<Self> {
        let rule = rule_for(space)?;
        let u_tab = Tabulation::new(&ReferenceElement::new(space.velocity_degree())?, &rule.points);
        let p_tab = Tabulation::new(&ReferenceElement::new(space.pressure_degree())?, &rule.points);
        let nq = rule.len();
        Ok(ElementCache {
            space,
            xq: vec![[0.0; 2]; nq],
            jxw: vec![0.0; nq],
            u_grads: u_tab.grads.clone(),
            p_grads: p_tab.grads.clone(),
            rule,
            u_tab,
            p_tab,
        })
    }

    pub fn reinit(&mut self, t: usize) {
        let xy = self.space.mesh().triangle_coords(t);
        let (inv, det) = inverse_transpose(xy);
        for (q, l) in self.rule.points.iter().enumerate() {
            self.xq[q] = [0, 1].map(|d| l[0] * xy[0][d] + l[1] * xy[1][d] + l[2] * xy[2][d]);
            self.jxw[q] = self.rule.weights[q] * det.abs();
            map_grads(&inv, &self.u_tab.grads[q], &mut self.u_grads[q]);
            map_grads(&inv, &self.p_tab.grads[q], &mut self.p_grads[q]);
        }
    }
}

/// `J^{-T}` of the affine map from the reference triangle, and `det J`.
pub(crate) fn inverse_transpose(xy: [[f64; 2]; 3]) -> ([[f64; 2]; 2], f64) {
    let (a, b) = (xy[1][0] - xy[0][0], xy[2][0] - xy[0][0]);
    let (c, d) = (xy[1][1] - xy[0][1], xy[2][1] - xy[0][1]);
    let det = a * d - b * c;
    ([[d / det, -c / det], [-b / det, a / det]], det)
}

pub(crate) fn map_grads(inv: &[[f64; 2]; 2], reference: &[[f64; 2]], out: &mut [[f64; 2]]) {
    for (o, g) in out.iter_mut().zip(reference) {
        *o = [
            inv[0][0] * g[0] + inv[0][1] * g[1],
            inv[1][0] * g[0] + inv[1][1] * g[1],
        ];
    }
}

fn natural_order(space: &FunctionSpace) -> Vec<usize> {
    (0..space.mesh().n_triangles()).collect()
}

fn check_order(space: &FunctionSpace, order: &[usize]) -> Result<()> {
    let n = space.mesh().n_triangles();
    let mut seen = vec![false; n];
    for &t in order {
        if t >= n || std::mem::replace(&mut seen[t], true) {
            return Err(Error::invalid("element order must be a permutation of the triangles"));
        }
    }
    if order.len() != n {
        return Err(Error::invalid("element order must visit every triangle"));
    }
    Ok(())
}

pub fn assemble_viscous_block(space: &FunctionSpace, mu: f64) -> Result<CsrMatrix> {
    viscous_in_order(space, mu, &natural_order(space))
}

pub(crate) fn viscous_in_order(space: &FunctionSpace, mu: f64, order: &[usize]) -> Result<CsrMatrix> {
    if !(mu > 0.0) {
        return Err(Error::invalid(format!("viscosity must be positive, got {mu}")));
    }
    check_order(space, order)?;
    let map = space.velocity_map();
    let nu = space.n_u();
    let nl = map.n_local();
    let mut cache = ElementCache::new(space)?;
    let mut trip = Vec::with_capacity(order.len() * nl * nl * 2);
    let mut kz = vec![0.0; nl * nl];
    let mut kr = vec![0.0; nl * nl];
    for &t in order {
        cache.reinit(t);
        kz.iter_mut().for_each(|v| *v = 0.0);
        kr.iter_mut().for_each(|v| *v = 0.0);
        for q in 0..cache.rule.len() {
            let r = cache.xq[q][0];
            let w = mu * cache.jxw[q] * r;
            let wr = mu * cache.jxw[q] / r;
            let g = &cache.u_grads[q];
            let v = &cache.u_tab.values[q];
            for i in 0..nl {
                for j in 0..nl {
                    let s = w * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                    kz[i * nl + j] += s;
                    kr[i * nl + j] += s + wr * v[i] * v[j];
                }
            }
        }
        let dofs = map.cell(t);
        for i in 0..nl {
            for j in 0..nl {
                trip.push((dofs[i], dofs[j], kr[i * nl + j]));
                trip.push((nu + dofs[i], nu + dofs[j], kz[i * nl + j]));
            }
        }
    }
    csr_from_triplets(2 * nu, 2 * nu, &trip)
}

/// `B[q, u] = -∫ q (∂(r u_r)/∂r + r ∂u_z/∂z) dr dz`.
pub fn assemble_divergence_block(space: &FunctionSpace) -> Result<CsrMatrix> {
    divergence_in_order(space, &natural_order(space))
}

pub(crate) fn divergence_in_order(space: &FunctionSpace, order: &[usize]) -> Result<CsrMatrix> {
    check_order(space, order)?;
    let (umap, pmap) = (space.velocity_map(), space.pressure_map());
    let nu = space.n_u();
    let (nl, npl) = (umap.n_local(), pmap.n_local());
    let mut cache = ElementCache::new(space)?;
    let mut trip = Vec::with_capacity(order.len() * nl * npl * 2);
    let mut br = vec![0.0; npl * nl];
    let mut bz = vec![0.0; npl * nl];
    for &t in order {
        cache.reinit(t);
        br.iter_mut().for_each(|v| *v = 0.0);
        bz.iter_mut().for_each(|v| *v = 0.0);
        for q in 0..cache.rule.len() {
            let r = cache.xq[q][0];
            let w = cache.jxw[q];
            let (g, v) = (&cache.u_grads[q], &cache.u_tab.values[q]);
            let pv = &cache.p_tab.values[q];
            for a in 0..npl {
                let wq = w * pv[a];
                for j in 0..nl {
                    br[a * nl + j] -= wq * (r * g[j][0] + v[j]);
                    bz[a * nl + j] -= wq * r * g[j][1];
                }
            }
        }
        let (ud, pd) = (umap.cell(t), pmap.cell(t));
        for a in 0..npl {
            for j in 0..nl {
                trip.push((pd[a], ud[j], br[a * nl + j]));
                trip.push((pd[a], nu + ud[j], bz[a * nl + j]));
            }
        }
    }
    csr_from_triplets(space.n_pressure(), 2 * nu, &trip)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassKind {
    Velocity,
    Pressure,
}

impl FromStr for MassKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "velocity" => Ok(MassKind::Velocity),
            "pressure" => Ok(MassKind::Pressure),
            _ => Err(Error::invalid(format!("unknown mass matrix kind '{s}'"))),
        }
    }
}

/// `scale ∫ φ_i φ_j r`; block diagonal over both components for velocity.
pub fn assemble_mass(space: &FunctionSpace, which: MassKind, scale: f64) -> Result<CsrMatrix> {
    mass_in_order(space, which, scale, &natural_order(space))
}

pub(crate) fn mass_in_order(space: &FunctionSpace, which: MassKind, scale: f64, order: &[usize]) -> Result<CsrMatrix> {
    if !(scale > 0.0) {
        return Err(Error::invalid(format!("mass scaling must be positive, got {scale}")));
    }
    check_order(space, order)?;
    let mut cache = ElementCache::new(space)?;
    let (map, comps) = match which {
        MassKind::Velocity => (space.velocity_map(), 2),
        MassKind::Pressure => (space.pressure_map(), 1),
    };
    let n = map.n_dofs();
    let nl = map.n_local();
    let mut m = vec![0.0; nl * nl];
    let mut trip = Vec::with_capacity(order.len() * nl * nl * comps);
    for &t in order {
        cache.reinit(t);
        m.iter_mut().for_each(|v| *v = 0.0);
        for q in 0..cache.rule.len() {
            let w = scale * cache.jxw[q] * cache.xq[q][0];
            let v = match which {
                MassKind::Velocity => &cache.u_tab.values[q],
                MassKind::Pressure => &cache.p_tab.values[q],
            };
            for i in 0..nl {
                for j in 0..nl {
                    m[i * nl + j] += w * v[i] * v[j];
                }
            }
        }
        let dofs = map.cell(t);
        for c in 0..comps {
            for i in 0..nl {
                for j in 0..nl {
                    trip.push((c * n + dofs[i], c * n + dofs[j], m[i * nl + j]));
                }
            }
        }
    }
    csr_from_triplets(comps * n, comps * n, &trip)
}

fn check_transport(space: &FunctionSpace, w: &Field) -> Result<()> {
    if !space.compatible(w.space()) {
        return Err(Error::invalid("transport field lives on a different function space"));
    }
    Ok(())
}

/// Transport velocity `w` at every quadrature point of the cached element.
fn transport_at(cache: &ElementCache, w: &Field, t: usize, out: &mut [[f64; 2]]) {
    let space = w.space();
    let dofs = space.velocity_map().cell(t);
    let nu = space.n_u();
    for (q, o) in out.iter_mut().enumerate() {
        let v = &cache.u_tab.values[q];
        let mut s = [0.0; 2];
        for (i, &d) in dofs.iter().enumerate() {
            s[0] += v[i] * w.coeffs[d];
            s[1] += v[i] * w.coeffs[nu + d];
        }
        *o = s;
    }
}

/// `ρ ∫ ((w·∇) u)·v r`, identical on both velocity components.
pub fn assemble_convection(space: &FunctionSpace, w: &Field, rho: f64) -> Result<CsrMatrix> {
    convection_in_order(space, w, rho, &natural_order(space))
}

pub(crate) fn convection_in_order(space: &FunctionSpace, w: &Field, rho: f64, order: &[usize]) -> Result<CsrMatrix> {
    check_transport(space, w)?;
    check_order(space, order)?;
    let map = space.velocity_map();
    let nu = space.n_u();
    let nl = map.n_local();
    let mut cache = ElementCache::new(space)?;
    let mut wq = vec![[0.0; 2]; cache.rule.len()];
    let mut c = vec![0.0; nl * nl];
    let mut trip = Vec::with_capacity(order.len() * nl * nl * 2);
    for &t in order {
        cache.reinit(t);
        transport_at(&cache, w, t, &mut wq);
        c.iter_mut().for_each(|v| *v = 0.0);
        for q in 0..cache.rule.len() {
            let s = rho * cache.jxw[q] * cache.xq[q][0];
            let (g, v) = (&cache.u_grads[q], &cache.u_tab.values[q]);
            for j in 0..nl {
                let adv = s * (wq[q][0] * g[j][0] + wq[q][1] * g[j][1]);
                for i in 0..nl {
                    c[i * nl + j] += adv * v[i];
                }
            }
        }
        let dofs = map.cell(t);
        for i in 0..nl {
            for j in 0..nl {
                let v = c[i * nl + j];
                if v != 0.0 {
                    trip.push((dofs[i], dofs[j], v));
                    trip.push((nu + dofs[i], nu + dofs[j], v));
                }
            }
        }
    }
    csr_from_triplets(2 * nu, 2 * nu, &trip)
}

/// Pressure-space operator `∫ (a ∇p·∇q + b (w·∇p) q + c p q) r`.
pub fn assemble_pressure_operator(
    space: &FunctionSpace,
    diffusion: f64,
    transport: Option<(&Field, f64)>,
    reaction: f64,
) -> Result<CsrMatrix> {
    if let Some((w, _)) = transport {
        check_transport(space, w)?;
    }
    let map = space.pressure_map();
    let nl = map.n_local();
    let mut cache = ElementCache::new(space)?;
    let mut wq = vec![[0.0; 2]; cache.rule.len()];
    let mut k = vec![0.0; nl * nl];
    let mut trip = Vec::with_capacity(space.mesh().n_triangles() * nl * nl);
    for t in 0..space.mesh().n_triangles() {
        cache.reinit(t);
        if let Some((w, _)) = transport {
            transport_at(&cache, w, t, &mut wq);
        }
        k.iter_mut().for_each(|v| *v = 0.0);
        for q in 0..cache.rule.len() {
            let s = cache.jxw[q] * cache.xq[q][0];
            let (g, v) = (&cache.p_grads[q], &cache.p_tab.values[q]);
            for i in 0..nl {
                for j in 0..nl {
                    let mut e = diffusion * (g[i][0] * g[j][0] + g[i][1] * g[j][1]) + reaction * v[i] * v[j];
                    if let Some((_, b)) = transport {
                        e += b * (wq[q][0] * g[j][0] + wq[q][1] * g[j][1]) * v[i];
                    }
                    k[i * nl + j] += s * e;
                }
            }
        }
        let dofs = map.cell(t);
        for i in 0..nl {
            for j in 0..nl {
                trip.push((dofs[i], dofs[j], k[i * nl + j]));
            }
        }
    }
    let n = space.n_pressure();
    csr_from_triplets(n, n, &trip)
}

/// `∫ f·v r` for a body force `f(r, z) = [f_r, f_z]`; returns a velocity-block vector.
pub fn assemble_load(space: &FunctionSpace, f: &dyn Fn(f64, f64) -> [f64; 2]) -> Result<Vec<f64>> {
    let map = space.velocity_map();
    let nu = space.n_u();
    let mut cache = ElementCache::new(space)?;
    let mut out = vec![0.0; 2 * nu];
    for t in 0..space.mesh().n_triangles() {
        cache.reinit(t);
        let dofs = map.cell(t);
        for q in 0..cache.rule.len() {
            let [r, z] = cache.xq[q];
            let val = f(r, z);
            let s = cache.jxw[q] * r;
            for (i, &d) in dofs.iter().enumerate() {
                let v = s * cache.u_tab.values[q][i];
                out[d] += v * val[0];
                out[nu + d] += v * val[1];
            }
        }
    }
    Ok(out)
}

/// A boundary edge seen from its triangle: quadrature points in the
/// triangle's barycentric coordinates, `(r, z)`, weights times length, and
/// the outward unit normal.
pub(crate) struct EdgeQuadrature {
    pub triangle: usize,
    pub bary: Vec<[f64; 3]>,
    pub xq: Vec<[f64; 2]>,
    pub wlen: Vec<f64>,
    pub normal: [f64; 2],
}

pub(crate) fn boundary_quadrature(space: &FunctionSpace, tag: BoundaryTag, npts: usize) -> Result<Vec<EdgeQuadrature>> {
    let mesh = space.mesh();
    let mut owner = std::collections::HashMap::new();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for (le, [a, b]) in LOCAL_EDGES.into_iter().enumerate() {
            owner.insert((tri[a].min(tri[b]), tri[a].max(tri[b])), (t, le));
        }
    }
    let (s, ws) = gauss_unit(npts);
    let mut out = Vec::new();
    for e in mesh.boundary_edges.iter().filter(|e| e.tag == tag) {
        let [a, b] = e.vertices;
        let &(t, le) = owner
            .get(&(a.min(b), a.max(b)))
            .ok_or_else(|| Error::InvalidInput(format!("boundary edge ({a}, {b}) is not a mesh edge")))?;
        let [la, lb] = LOCAL_EDGES[le];
        let tri = mesh.triangles[t];
        let (pa, pb) = (mesh.vertices[tri[la]], mesh.vertices[tri[lb]]);
        let len = ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt();
        // counter-clockwise triangle: the outward normal is the tangent turned clockwise
        let normal = [(pb[1] - pa[1]) / len, -(pb[0] - pa[0]) / len];
        let mut bary = Vec::with_capacity(npts);
        let mut xq = Vec::with_capacity(npts);
        for &si in &s {
            let mut l = [0.0; 3];
            l[la] = 1.0 - si;
            l[lb] = si;
            bary.push(l);
            xq.push([pa[0] + si * (pb[0] - pa[0]), pa[1] + si * (pb[1] - pa[1])]);
        }
        out.push(EdgeQuadrature {
            triangle: t,
            bary,
            xq,
            wlen: ws.iter().map(|w| w * len).collect(),
            normal,
        });
    }
    Ok(out)
}

fn edge_points(space: &FunctionSpace) -> usize {
    space.velocity_degree() + 2
}

/// `∫_Γ g·v r ds` over edges tagged `tag`, with traction `g(r, z, n)`.
pub fn assemble_boundary_traction(
    space: &FunctionSpace,
    tag: BoundaryTag,
    g: &dyn Fn(f64, f64, [f64; 2]) -> [f64; 2],
) -> Result<Vec<f64>> {
    let map = space.velocity_map();
    let nu = space.n_u();
    let element = ReferenceElement::new(space.velocity_degree())?;
    let mut out = vec![0.0; 2 * nu];
    for eq in boundary_quadrature(space, tag, edge_points(space))? {
        let dofs = map.cell(eq.triangle);
        for q in 0..eq.bary.len() {
            let [r, z] = eq.xq[q];
            let val = g(r, z, eq.normal);
            let phi = element.eval(eq.bary[q]).values;
            for (i, &d) in dofs.iter().enumerate() {
                let s = eq.wlen[q] * r * phi[i];
                out[d] += s * val[0];
                out[nu + d] += s * val[1];
            }
        }
    }
    Ok(out)
}

/// Pressure-space boundary matrix `scale ∫_Γ (w·n) p q r ds`.
pub fn assemble_pressure_boundary_flux(space: &FunctionSpace, tag: BoundaryTag, w: &Field, scale: f64) -> Result<CsrMatrix> {
    check_transport(space, w)?;
    let (umap, pmap) = (space.velocity_map(), space.pressure_map());
    let nu = space.n_u();
    let uel = ReferenceElement::new(space.velocity_degree())?;
    let pel = ReferenceElement::new(space.pressure_degree())?;
    let mut trip = Vec::new();
    for eq in boundary_quadrature(space, tag, edge_points(space))? {
        let (ud, pd) = (umap.cell(eq.triangle), pmap.cell(eq.triangle));
        for q in 0..eq.bary.len() {
            let phi = uel.eval(eq.bary[q]).values;
            let mut wv = [0.0; 2];
            for (i, &d) in ud.iter().enumerate() {
                wv[0] += phi[i] * w.coeffs[d];
                wv[1] += phi[i] * w.coeffs[nu + d];
            }
            let flux = wv[0] * eq.normal[0] + wv[1] * eq.normal[1];
            let psi = pel.eval(eq.bary[q]).values;
            let s = scale * eq.wlen[q] * eq.xq[q][0] * flux;
            for i in 0..pd.len() {
                for j in 0..pd.len() {
                    trip.push((pd[i], pd[j], s * psi[i] * psi[j]));
                }
            }
        }
    }
    let n = space.n_pressure();
    csr_from_triplets(n, n, &trip)
}

/// Scalar dof map helper shared by field evaluation.
pub(crate) fn local_values(map: &DofMap, t: usize, coeffs: &[f64], phi: &[f64]) -> f64 {
    map.cell(t).iter().zip(phi).map(|(&d, p)| coeffs[d] * p).sum()
}
