//! Lagrange elements of degree 1 to 3 on the reference triangle
//! `{(x, y): x, y >= 0, x + y <= 1}`.
//!
//! Points are given in barycentric form `[l0, l1, l2]` with `l1 = x`,
//! `l2 = y`. Local node order: the three vertices, then the nodes of edges
//! (0,1), (1,2), (2,0) (for degree 3 the node nearer the edge's first
//! vertex comes first), then the interior node.

use crate::error::{Error, Result};

/// Local edges as vertex pairs.
pub const LOCAL_EDGES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

// d(lambda_i)/d(x, y)
const DLAMBDA: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceElement {
    degree: usize,
    nodes: Vec<[f64; 3]>,
}

/// Basis values and reference gradients at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisValues {
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
}

pub fn n_nodes(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

impl ReferenceElement {
    pub fn new(degree: usize) -> Result<Self> {
        if !(1..=3).contains(&degree) {
            return Err(Error::invalid(format!("Lagrange degree {degree} is not in 1..=3")));
        }
        let k = degree as f64;
        let mut nodes = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for [a, b] in LOCAL_EDGES {
            for s in 1..degree {
                let mut l = [0.0; 3];
                l[a] = (k - s as f64) / k;
                l[b] = s as f64 / k;
                nodes.push(l);
            }
        }
        if degree == 3 {
            nodes.push([1.0 / 3.0; 3]);
        }
        Ok(ReferenceElement { degree, nodes })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub fn eval(&self, l: [f64; 3]) -> BasisValues {
        let n = self.nodes.len();
        let mut values = vec![0.0; n];
        let mut grads = vec![[0.0; 2]; n];
        self.eval_into(l, &mut values, &mut grads);
        BasisValues { values, grads }
    }

    pub fn eval_into(&self, l: [f64; 3], values: &mut [f64], grads: &mut [[f64; 2]]) {
        // derivative with respect to the barycentrics, chained to (x, y)
        let mut put = |idx: usize, v: f64, dl: [f64; 3]| {
            values[idx] = v;
            grads[idx] = [
                dl[0] * DLAMBDA[0][0] + dl[1] * DLAMBDA[1][0] + dl[2] * DLAMBDA[2][0],
                dl[0] * DLAMBDA[0][1] + dl[1] * DLAMBDA[1][1] + dl[2] * DLAMBDA[2][1],
            ];
        };
        let unit = |i: usize, s: f64| {
            let mut d = [0.0; 3];
            d[i] = s;
            d
        };
        match self.degree {
            1 => {
                for i in 0..3 {
                    put(i, l[i], unit(i, 1.0));
                }
            }
            2 => {
                for i in 0..3 {
                    put(i, l[i] * (2.0 * l[i] - 1.0), unit(i, 4.0 * l[i] - 1.0));
                }
                for (e, [a, b]) in LOCAL_EDGES.into_iter().enumerate() {
                    let mut d = [0.0; 3];
                    d[a] = 4.0 * l[b];
                    d[b] = 4.0 * l[a];
                    put(3 + e, 4.0 * l[a] * l[b], d);
                }
            }
            3 => {
                for i in 0..3 {
                    let x = l[i];
                    put(
                        i,
                        0.5 * x * (3.0 * x - 1.0) * (3.0 * x - 2.0),
                        unit(i, 0.5 * (27.0 * x * x - 18.0 * x + 2.0)),
                    );
                }
                for (e, [a, b]) in LOCAL_EDGES.into_iter().enumerate() {
                    for (s, (near, far)) in [(a, b), (b, a)].into_iter().enumerate() {
                        let (x, y) = (l[near], l[far]);
                        let mut d = [0.0; 3];
                        d[near] = 4.5 * y * (6.0 * x - 1.0);
                        d[far] = 4.5 * x * (3.0 * x - 1.0);
                        put(3 + 2 * e + s, 4.5 * x * y * (3.0 * x - 1.0), d);
                    }
                }
                put(
                    9,
                    27.0 * l[0] * l[1] * l[2],
                    [27.0 * l[1] * l[2], 27.0 * l[0] * l[2], 27.0 * l[0] * l[1]],
                );
            }
            _ => unreachable!("degree checked at construction"),
        }
    }
}

/// Values and reference gradients of every basis function of degree `k` at
/// each barycentric point.
pub fn reference_basis_eval(k: usize, points: &[[f64; 3]]) -> Result<Vec<BasisValues>> {
    let el = ReferenceElement::new(k)?;
    Ok(points.iter().map(|&p| el.eval(p)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(n: usize, seed: u64) -> Vec<[f64; 3]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let (mut x, mut y): (f64, f64) = (rng.gen(), rng.gen());
                if x + y > 1.0 {
                    x = 1.0 - x;
                    y = 1.0 - y;
                }
                [1.0 - x - y, x, y]
            })
            .collect()
    }

    #[test]
    fn unsupported_degree() {
        assert!(matches!(reference_basis_eval(4, &[[1.0, 0.0, 0.0]]), Err(Error::InvalidParameter(_))));
        assert!(ReferenceElement::new(0).is_err());
    }

    #[test]
    fn kronecker_at_nodes() {
        for k in 1..=3 {
            let el = ReferenceElement::new(k).unwrap();
            assert_eq!(el.n_nodes(), n_nodes(k));
            for (i, &node) in el.nodes().iter().enumerate() {
                let v = el.eval(node);
                for (j, &vj) in v.values.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((vj - expect).abs() < 1e-12, "k={k} node {i} basis {j}: {vj}");
                }
            }
        }
    }

    #[test]
    fn partition_of_unity() {
        for k in 1..=3 {
            for b in reference_basis_eval(k, &random_points(30, k as u64)).unwrap() {
                assert!((b.values.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                let g = b.grads.iter().fold([0.0, 0.0], |s, g| [s[0] + g[0], s[1] + g[1]]);
                assert!(g[0].abs() < 1e-12 && g[1].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let h = 1e-6;
        for k in 1..=3 {
            let el = ReferenceElement::new(k).unwrap();
            let mut worst: f64 = 0.0;
            for p in random_points(20, 40 + k as u64) {
                let (x, y) = (p[1], p[2]);
                let at = |x: f64, y: f64| el.eval([1.0 - x - y, x, y]).values;
                let g = el.eval(p).grads;
                let (xp, xm, yp, ym) = (at(x + h, y), at(x - h, y), at(x, y + h), at(x, y - h));
                for i in 0..el.n_nodes() {
                    worst = worst.max(((xp[i] - xm[i]) / (2.0 * h) - g[i][0]).abs());
                    worst = worst.max(((yp[i] - ym[i]) / (2.0 * h) - g[i][1]).abs());
                }
            }
            assert!(worst < 1e-6, "k={k}: {worst}");
        }
    }
}
