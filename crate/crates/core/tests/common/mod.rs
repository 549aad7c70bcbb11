#![allow(dead_code)]

use std::sync::Arc;

use nozzlebench::fem::{quadrature_rule, Field};
use nozzlebench::geometry::{rectangle_mesh, AxisymMesh};

pub mod mms;

pub fn pipe_mesh(radius: f64, length: f64, nr: usize, nz: usize) -> Arc<AxisymMesh> {
    Arc::new(rectangle_mesh([0.0, radius], [0.0, length], nr, nz).unwrap())
}

/// `(∫ |u_h − u|² r, ∫ |u|² r, ∫ (p_h − p)² r, ∫ p² r)` by a degree-10 rule.
pub fn l2_errors(
    field: &Field,
    u: &dyn Fn(f64, f64) -> [f64; 2],
    p: &dyn Fn(f64, f64) -> f64,
) -> [f64; 4] {
    let mesh = field.space().mesh();
    let rule = quadrature_rule(10).unwrap();
    let wsum: f64 = rule.weights.iter().sum();
    let mut acc = [0.0; 4];
    for t in 0..mesh.n_triangles() {
        let c = mesh.triangle_coords(t);
        let scale = mesh.signed_area(t).abs() / wsum;
        for (b, w) in rule.points.iter().zip(&rule.weights) {
            let r = b[0] * c[0][0] + b[1] * c[1][0] + b[2] * c[2][0];
            let z = b[0] * c[0][1] + b[1] * c[1][1] + b[2] * c[2][1];
            let v = field.eval_in(t, *b);
            let ue = u(r, z);
            let pe = p(r, z);
            let jw = w * scale * r;
            acc[0] += jw * ((v.ur - ue[0]).powi(2) + (v.uz - ue[1]).powi(2));
            acc[1] += jw * (ue[0] * ue[0] + ue[1] * ue[1]);
            acc[2] += jw * (v.p - pe).powi(2);
            acc[3] += jw * pe * pe;
        }
    }
    acc
}

pub fn rel_l2(acc: [f64; 4]) -> (f64, f64) {
    ((acc[0] / acc[1]).sqrt(), (acc[2] / acc[3]).sqrt())
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    d / b.iter().map(|x| x * x).sum::<f64>().sqrt()
}
