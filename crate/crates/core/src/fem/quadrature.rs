//! Triangle and interval quadrature.
//!
//! Triangle rules are tensor Gauss-Legendre rules collapsed onto the
//! reference triangle (Duffy map). They are not minimal but have positive
//! weights, interior points, and any requested exactness.

use crate::error::{Error, Result};

pub const MAX_EXACTNESS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    /// Barycentric coordinates `[1 - x - y, x, y]`.
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub exactness: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Gauss-Legendre rule mapped to `[0, 1]`.
pub fn gauss_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (x.iter().map(|t| 0.5 * (t + 1.0)).collect(), w.iter().map(|w| 0.5 * w).collect())
}

pub fn quadrature_rule(exactness: usize) -> Result<QuadratureRule> {
    if exactness > MAX_EXACTNESS {
        return Err(Error::Unsupported(format!(
            "quadrature exactness {exactness} exceeds {MAX_EXACTNESS}"
        )));
    }
    // the collapsed direction carries an extra linear Jacobian factor
    let n = (exactness + 2).div_ceil(2);
    let (s, ws) = gauss_unit(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (&a, &wa) in s.iter().zip(&ws) {
        for (&b, &wb) in s.iter().zip(&ws) {
            let x = a;
            let y = b * (1.0 - a);
            points.push([1.0 - x - y, x, y]);
            weights.push(wa * wb * (1.0 - a));
        }
    }
    Ok(QuadratureRule {
        points,
        weights,
        exactness,
    })
}
