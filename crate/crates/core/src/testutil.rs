//! Independent dense oracles shared by unit tests.

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m = a.to_vec();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j] * m[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Dense Gaussian elimination with partial pivoting.
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(row, &bi)| {
        let mut r = row.clone();
        r.push(bi);
        r
    }).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        m.swap(col, piv);
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            for j in col..=n {
                m[i][j] -= f * m[col][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x
}

/// Integral of `f(r, z)` over a triangle by a 16 x 16 collapsed
/// Gauss-Legendre product rule whose nodes come from bisection, exact far
/// beyond the degrees used in tests.
pub fn dense_triangle_integral(tri: [[f64; 2]; 3], f: &dyn Fn(f64, f64) -> f64) -> f64 {
    let (x, w) = legendre_by_bisection(16);
    let det = ((tri[1][0] - tri[0][0]) * (tri[2][1] - tri[0][1]) - (tri[2][0] - tri[0][0]) * (tri[1][1] - tri[0][1])).abs();
    let mut s = 0.0;
    for (&a, &wa) in x.iter().zip(&w) {
        for (&b, &wb) in x.iter().zip(&w) {
            let (u, v) = (0.5 * (a + 1.0), 0.5 * (b + 1.0));
            let (xi, eta) = (u, v * (1.0 - u));
            let p = [0, 1].map(|d| tri[0][d] + xi * (tri[1][d] - tri[0][d]) + eta * (tri[2][d] - tri[0][d]));
            s += 0.25 * wa * wb * (1.0 - u) * f(p[0], p[1]);
        }
    }
    s * det
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Gauss-Legendre nodes located by sign changes and bisection.
pub fn legendre_by_bisection(n: usize) -> (Vec<f64>, Vec<f64>) {
    let grid = 20 * n;
    let mut x = Vec::with_capacity(n);
    for k in 0..grid {
        let (mut a, mut b) = (-1.0 + 2.0 * k as f64 / grid as f64, -1.0 + 2.0 * (k + 1) as f64 / grid as f64);
        let (fa, fb) = (legendre(n, a).0, legendre(n, b).0);
        if fa == 0.0 {
            x.push(a);
            continue;
        }
        if fa * fb > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if legendre(n, a).0 * legendre(n, m).0 <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        x.push(0.5 * (a + b));
    }
    x.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    assert_eq!(x.len(), n);
    let w = x.iter().map(|&xi| {
        let d = legendre(n, xi).1;
        2.0 / ((1.0 - xi * xi) * d * d)
    }).collect();
    (x, w)
}
