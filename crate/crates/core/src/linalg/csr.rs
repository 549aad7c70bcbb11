//! Compressed sparse row storage.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            data: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            data: vec![1.0; n],
        }
    }

    /// Builds from raw parts, checking the CSR invariants.
    pub fn from_parts(
        nrows: usize,
        ncols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        data: Vec<f64>,
    ) -> Result<Self> {
        if indptr.len() != nrows + 1 || indptr[0] != 0 || *indptr.last().unwrap() != indices.len() {
            return Err(Error::invalid("malformed CSR row offsets"));
        }
        if indices.len() != data.len() {
            return Err(Error::invalid("CSR indices and values differ in length"));
        }
        for i in 0..nrows {
            if indptr[i] > indptr[i + 1] {
                return Err(Error::invalid("CSR row offsets decrease"));
            }
            let row = &indices[indptr[i]..indptr[i + 1]];
            if row.windows(2).any(|w| w[0] >= w[1]) || row.last().is_some_and(|&c| c >= ncols) {
                return Err(Error::invalid(format!("CSR row {i} has unsorted or out-of-range columns")));
            }
        }
        Ok(CsrMatrix {
            nrows,
            ncols,
            indptr,
            indices,
            data,
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()].iter().copied().zip(self.data[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.indptr[i]..self.indptr[i + 1];
        match self.indices[r.clone()].binary_search(&j) {
            Ok(k) => self.data[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols, "matvec input length");
        assert_eq!(y.len(), self.nrows, "matvec output length");
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.indptr[i]..self.indptr[i + 1] {
                s += self.data[k] * x[self.indices[k]];
            }
            *yi = s;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec(x, &mut y);
        y
    }

    /// `y += A^T x`
    pub fn transpose_matvec_add(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.nrows);
        assert_eq!(y.len(), self.ncols);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for k in self.indptr[i]..self.indptr[i + 1] {
                y[self.indices[k]] += self.data[k] * xi;
            }
        }
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.ncols + 1];
        for &j in &self.indices {
            counts[j + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut indices = vec![0; self.nnz()];
        let mut data = vec![0.0; self.nnz()];
        for i in 0..self.nrows {
            for k in self.indptr[i]..self.indptr[i + 1] {
                let j = self.indices[k];
                indices[next[j]] = i;
                data[next[j]] = self.data[k];
                next[j] += 1;
            }
        }
        CsrMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            indptr: counts,
            indices,
            data,
        }
    }

    pub fn scaled(&self, s: f64) -> CsrMatrix {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|v| *v *= s);
        m
    }

    /// `sum_k c_k A_k` over matrices of equal shape; the pattern is the union.
    pub fn linear_combination(terms: &[(f64, &CsrMatrix)]) -> Result<CsrMatrix> {
        let (nrows, ncols) = match terms.first() {
            Some((_, m)) => (m.nrows, m.ncols),
            None => return Err(Error::invalid("empty linear combination")),
        };
        if terms.iter().any(|(_, m)| m.nrows != nrows || m.ncols != ncols) {
            return Err(Error::invalid("shape mismatch in linear combination"));
        }
        let mut indptr = Vec::with_capacity(nrows + 1);
        indptr.push(0);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        let mut acc = vec![0.0; ncols];
        let mut mark = vec![usize::MAX; ncols];
        let mut cols = Vec::new();
        for i in 0..nrows {
            cols.clear();
            for (c, m) in terms {
                for (j, v) in m.row(i) {
                    if mark[j] != i {
                        mark[j] = i;
                        acc[j] = 0.0;
                        cols.push(j);
                    }
                    acc[j] += c * v;
                }
            }
            cols.sort_unstable();
            for &j in &cols {
                indices.push(j);
                data.push(acc[j]);
            }
            indptr.push(indices.len());
        }
        Ok(CsrMatrix {
            nrows,
            ncols,
            indptr,
            indices,
            data,
        })
    }

    /// Keeps entries for which `keep(i, j)` holds.
    pub fn filter(&self, mut keep: impl FnMut(usize, usize) -> bool) -> CsrMatrix {
        let mut indptr = Vec::with_capacity(self.nrows + 1);
        indptr.push(0);
        let mut indices = Vec::with_capacity(self.nnz());
        let mut data = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                if keep(i, j) {
                    indices.push(j);
                    data.push(v);
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            indptr,
            indices,
            data,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest |A - A^T| entry relative to the largest |A| entry.
    pub fn asymmetry(&self) -> f64 {
        let t = self.transpose();
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                worst = worst.max((v - t.get(i, j)).abs());
            }
            for (j, v) in t.row(i) {
                worst = worst.max((v - self.get(i, j)).abs());
            }
        }
        if scale > 0.0 {
            worst / scale
        } else {
            0.0
        }
    }

    /// Matrix Market coordinate format (1-based indices).
    pub fn to_matrix_market(&self) -> String {
        let mut s = String::new();
        writeln!(s, "%%MatrixMarket matrix coordinate real general").unwrap();
        writeln!(s, "{} {} {}", self.nrows, self.ncols, self.nnz()).unwrap();
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                writeln!(s, "{} {} {:.17e}", i + 1, j + 1, v).unwrap();
            }
        }
        s
    }
}

/// Sums duplicate `(row, col, value)` entries into a CSR matrix.
pub fn csr_from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<CsrMatrix> {
    let mut counts = vec![0usize; nrows + 1];
    for &(i, j, _) in triplets {
        if i >= nrows || j >= ncols {
            return Err(Error::invalid(format!(
                "triplet ({i}, {j}) outside a {nrows}x{ncols} matrix"
            )));
        }
        counts[i + 1] += 1;
    }
    for i in 0..nrows {
        counts[i + 1] += counts[i];
    }
    let mut next = counts.clone();
    let mut cols = vec![0usize; triplets.len()];
    let mut vals = vec![0.0; triplets.len()];
    for &(i, j, v) in triplets {
        cols[next[i]] = j;
        vals[next[i]] = v;
        next[i] += 1;
    }
    let mut indptr = Vec::with_capacity(nrows + 1);
    indptr.push(0);
    let mut indices = Vec::with_capacity(triplets.len());
    let mut data = Vec::with_capacity(triplets.len());
    let mut order: Vec<usize> = Vec::new();
    for i in 0..nrows {
        let (s, e) = (counts[i], counts[i + 1]);
        order.clear();
        order.extend(s..e);
        // stable: equal columns keep insertion order so sums are reproducible
        order.sort_by_key(|&k| cols[k]);
        let mut last = usize::MAX;
        for &k in &order {
            if cols[k] == last {
                *data.last_mut().unwrap() += vals[k];
            } else {
                indices.push(cols[k]);
                data.push(vals[k]);
                last = cols[k];
            }
        }
        indptr.push(indices.len());
    }
    Ok(CsrMatrix {
        nrows,
        ncols,
        indptr,
        indices,
        data,
    })
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}
