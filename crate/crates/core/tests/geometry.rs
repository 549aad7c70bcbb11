use std::collections::BTreeSet;

use nozzlebench::geometry::{
    generate_axisym_mesh, generate_axisym_mesh_seeded, mesh_stats, refine_uniform, AxisymMesh, NozzleProfile, Sizing,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn nozzle(h: Sizing) -> (NozzleProfile, AxisymMesh) {
    let p = NozzleProfile::default();
    let m = generate_axisym_mesh(&p.domain(), &h).unwrap();
    (p, m)
}

fn unique_edges(m: &AxisymMesh) -> Vec<(usize, usize)> {
    let mut edges = BTreeSet::new();
    for t in &m.triangles {
        for i in 0..3 {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            edges.insert((a.min(b), a.max(b)));
        }
    }
    edges.into_iter().collect()
}

fn length(m: &AxisymMesh, (a, b): (usize, usize)) -> f64 {
    let (p, q) = (m.vertices[a], m.vertices[b]);
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

/// `(min, max, mean)` edge length over unique edges.
fn brute_stats(m: &AxisymMesh) -> (f64, f64, f64) {
    let len: Vec<f64> = unique_edges(m).into_iter().map(|e| length(m, e)).collect();
    let min = len.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = len.iter().cloned().fold(0.0, f64::max);
    (min, max, len.iter().sum::<f64>() / len.len() as f64)
}

#[test]
fn throat_has_four_layers_at_uniform_half_millimetre() {
    let (p, m) = nozzle(Sizing::uniform(5e-4));
    let (z0, z1) = (p.z_throat_start(), p.z_origin);
    for k in 1..40 {
        let z = z0 + (z1 - z0) * (k as f64 + 0.37) / 40.0;
        let layers = m
            .triangles
            .iter()
            .filter(|t| {
                let zs = t.map(|v| m.vertices[v][1]);
                let lo = zs.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = zs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                lo < z && z < hi
            })
            .count();
        assert!(layers >= 4, "z = {z}: {layers} layers");
    }
}

#[test]
fn stats_match_brute_force_before_and_after_refinement() {
    let (_, m) = nozzle(Sizing::per_region(1.5e-3, 7e-4, 4e-4, 1e-3));
    let s = mesh_stats(&m).unwrap();
    let (lo, hi, avg) = brute_stats(&m);
    assert!((s.h_min - lo).abs() <= 1e-15 && (s.h_max - hi).abs() <= 1e-15);
    assert!((s.h_avg / avg - 1.0).abs() < 1e-12);
    assert_eq!(s.n_elt, m.triangles.len());
    let r = refine_uniform(&m).unwrap();
    let (lo_r, hi_r, avg_r) = brute_stats(&r);
    let sr = mesh_stats(&r).unwrap();
    assert!((sr.h_avg / avg_r - 1.0).abs() < 1e-12);
    assert_eq!((sr.h_min, sr.h_max), (lo_r, hi_r));
    assert!((sr.h_min / lo - 0.5).abs() < 1e-12 && (sr.h_max / hi - 0.5).abs() < 1e-12);
    // Each parent edge becomes two halves and each triangle gains three
    // edges of half its sides, so the unique-edge mean after refinement is
    // (sum L + perimeters / 2) / (2 E + 3 T), not exactly half the mean.
    let edges = unique_edges(&m);
    let total: f64 = edges.iter().map(|&e| length(&m, e)).sum();
    let perimeters: f64 = m.triangles.iter().map(|t| (0..3).map(|i| length(&m, (t[i], t[(i + 1) % 3]))).sum::<f64>()).sum();
    let predicted = (total + 0.5 * perimeters) / (2 * edges.len() + 3 * m.n_triangles()) as f64;
    assert!((sr.h_avg / predicted - 1.0).abs() < 1e-12);
    println!("h_avg ratio after refinement: {}", sr.h_avg / s.h_avg);
    assert!((sr.h_avg / s.h_avg - 0.5).abs() < 5e-3);
    assert_eq!(refine_uniform(&r).unwrap().n_triangles(), 16 * m.n_triangles());
}

#[test]
fn random_points_located_like_exhaustive_scan() {
    let (p, m) = nozzle(Sizing::uniform(1e-3));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let z = rng.gen_range(p.z_inlet()..p.z_outlet());
        let r = rng.gen_range(0.0..p.radius(z));
        let loc = m.locate_point([r, z]).unwrap();
        let inside: Vec<usize> = (0..m.n_triangles())
            .filter(|&t| {
                let c = m.triangle_coords(t);
                let area = |a: [f64; 2], b: [f64; 2], q: [f64; 2]| (b[0] - a[0]) * (q[1] - a[1]) - (q[0] - a[0]) * (b[1] - a[1]);
                let s = area(c[0], c[1], c[2]).signum();
                (0..3).all(|i| s * area(c[i], c[(i + 1) % 3], [r, z]) >= -1e-18)
            })
            .collect();
        assert!(inside.contains(&loc.triangle), "({r}, {z}): {} not in {inside:?}", loc.triangle);
        let c = m.triangle_coords(loc.triangle);
        let back = [0, 1].map(|k| (0..3).map(|i| loc.bary[i] * c[i][k]).sum::<f64>());
        assert!((back[0] - r).abs() < 1e-12 && (back[1] - z).abs() < 1e-12);
    }
}

#[test]
fn mesh_area_and_seed_reproducibility() {
    let p = NozzleProfile::default();
    let d = p.domain();
    let h = Sizing::per_region(1.5e-3, 7e-4, 4e-4, 1e-3);
    let a = generate_axisym_mesh_seeded(&d, &h, 11).unwrap();
    let b = generate_axisym_mesh_seeded(&d, &h, 11).unwrap();
    assert_eq!(a.to_text(), b.to_text());
    let exact: f64 = {
        let (ri, rt) = (p.inlet_radius, p.throat_radius);
        ri * (p.inlet_length + p.outlet_length) + 0.5 * (ri + rt) * p.convergent_length + rt * p.throat_length
    };
    assert!((a.total_area() / exact - 1.0).abs() < 1e-12);
    a.validate().unwrap();
}
