//! Direct solves: reverse Cuthill-McKee ordering followed by a banded LU
//! factorization with partial pivoting.
//!
//! Row interchanges are confined to the lower bandwidth, so the upper
//! factor grows to at most `kl + ku` off-diagonals. The band is stored
//! row-wise: row `i` holds columns `i - kl .. i + kl + ku`.

use std::collections::VecDeque;

use super::csr::CsrMatrix;
use crate::error::{Error, Result};

/// Pivots smaller than this fraction of the row's largest original entry
/// are treated as zero.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

/// Reverse Cuthill-McKee permutation of the symmetrized pattern of `a`.
/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for (j, _) in a.row(i) {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for l in adj.iter_mut() {
        l.sort_unstable();
        l.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));

    // BFS returning the last level, used to find a pseudo-peripheral start
    let levels_from = |start: usize, seen: &[bool]| -> (usize, Vec<usize>) {
        let mut level = vec![usize::MAX; n];
        let mut q = VecDeque::new();
        level[start] = 0;
        q.push_back(start);
        let mut last = vec![start];
        let mut depth = 0;
        while let Some(v) = q.pop_front() {
            for &w in &adj[v] {
                if !seen[w] && level[w] == usize::MAX {
                    level[w] = level[v] + 1;
                    if level[w] > depth {
                        depth = level[w];
                        last.clear();
                    }
                    if level[w] == depth {
                        last.push(w);
                    }
                    q.push_back(w);
                }
            }
        }
        (depth, last)
    };

    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let mut start = seed;
        let (mut depth, mut last) = levels_from(start, &visited);
        for _ in 0..8 {
            let cand = *last.iter().min_by_key(|&&v| (degree[v], v)).unwrap();
            let (d2, l2) = levels_from(cand, &visited);
            if d2 > depth {
                start = cand;
                depth = d2;
                last = l2;
            } else {
                break;
            }
        }
        let mut q = VecDeque::new();
        visited[start] = true;
        q.push_back(start);
        let mut nbrs = Vec::new();
        while let Some(v) = q.pop_front() {
            order.push(v);
            nbrs.clear();
            nbrs.extend(adj[v].iter().copied().filter(|&w| !visited[w]));
            nbrs.sort_by_key(|&w| (degree[w], w));
            for &w in &nbrs {
                visited[w] = true;
                q.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Half-bandwidths `(kl, ku)` of `a` under the symmetric permutation `perm`.
pub fn bandwidths(a: &CsrMatrix, perm: &[usize]) -> (usize, usize) {
    let mut inv = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let (mut kl, mut ku) = (0, 0);
    for i in 0..a.nrows() {
        for (j, _) in a.row(i) {
            let (pi, pj) = (inv[i], inv[j]);
            if pi > pj {
                kl = kl.max(pi - pj);
            } else {
                ku = ku.max(pj - pi);
            }
        }
    }
    (kl, ku)
}

#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    perm: Vec<usize>,
    kl: usize,
    width: usize,
    band: Vec<f64>,
    pivots: Vec<usize>,
}

impl SparseLu {
    /// Factorizes with a reverse Cuthill-McKee ordering.
    pub fn factor(a: &CsrMatrix) -> Result<SparseLu> {
        let perm = reverse_cuthill_mckee(a);
        SparseLu::factor_with_ordering(a, perm)
    }

    pub fn factor_with_ordering(a: &CsrMatrix, perm: Vec<usize>) -> Result<SparseLu> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::invalid(format!("LU needs a square matrix, got {}x{}", n, a.ncols())));
        }
        if perm.len() != n {
            return Err(Error::invalid("ordering length differs from matrix size"));
        }
        let mut inv = vec![usize::MAX; n];
        for (new, &old) in perm.iter().enumerate() {
            if old >= n || inv[old] != usize::MAX {
                return Err(Error::invalid("ordering is not a permutation"));
            }
            inv[old] = new;
        }
        let (kl, ku) = bandwidths(a, &perm);
        let width = 2 * kl + ku + 1;
        let mut band = vec![0.0; n * width];
        let mut scale = vec![0.0f64; n];
        for (new, &old) in perm.iter().enumerate() {
            for (j, v) in a.row(old) {
                let col = inv[j];
                band[new * width + col + kl - new] += v;
                scale[new] = scale[new].max(v.abs());
            }
        }
        let mut pivots = vec![0; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let at = |i: usize, j: usize| i * width + j + kl - i;
            let mut p = k;
            let mut best = band[at(k, k)].abs();
            for i in k + 1..=last_row {
                let v = band[at(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= PIVOT_TOLERANCE * scale[p] || best == 0.0 {
                return Err(Error::Singular {
                    column: perm[k],
                    pivot: best,
                });
            }
            pivots[k] = p;
            let last_col = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    band.swap(at(k, j), at(p, j));
                }
                scale.swap(k, p);
            }
            let pivot = band[at(k, k)];
            let ncols = last_col - k;
            if ncols == 0 {
                continue;
            }
            let (head, tail) = band.split_at_mut((k + 1) * width);
            let urow = &head[at(k, k + 1)..at(k, k + 1) + ncols];
            for i in k + 1..=last_row {
                let base = (i - k - 1) * width;
                let lk = base + k + kl - i;
                let l = tail[lk];
                if l == 0.0 {
                    continue;
                }
                let l = l / pivot;
                tail[lk] = l;
                let s = base + k + 1 + kl - i;
                for (x, &u) in tail[s..s + ncols].iter_mut().zip(urow) {
                    *x -= l * u;
                }
            }
        }
        Ok(SparseLu {
            n,
            perm,
            kl,
            width,
            band,
            pivots,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Lower and upper bandwidth of the factor.
    pub fn bandwidth(&self) -> (usize, usize) {
        (self.kl, self.width - 2 * self.kl - 1)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        self.solve_into(b, &mut x);
        x
    }

    pub fn solve_into(&self, b: &[f64], x: &mut [f64]) {
        let n = self.n;
        assert_eq!(b.len(), n, "right-hand side length");
        let (kl, width) = (self.kl, self.width);
        let at = |i: usize, j: usize| i * width + j + kl - i;
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                y.swap(k, p);
            }
            let yk = y[k];
            if yk != 0.0 {
                for i in k + 1..=(k + kl).min(n.saturating_sub(1)) {
                    y[i] -= self.band[at(i, k)] * yk;
                }
            }
        }
        let ku_total = width - kl - 1;
        for i in (0..n).rev() {
            let mut s = y[i];
            let last = (i + ku_total).min(n - 1);
            let d = at(i, i);
            for j in i + 1..=last {
                s -= self.band[d + j - i] * y[j];
            }
            y[i] = s / self.band[d];
        }
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
    }
}

/// One-shot `A x = b`.
pub fn sparse_lu_solve(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.nrows() {
        return Err(Error::invalid("right-hand side length differs from matrix size"));
    }
    Ok(SparseLu::factor(a)?.solve(b))
}
