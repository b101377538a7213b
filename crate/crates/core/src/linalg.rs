//! Sparse symmetric matrices and the linear solvers used by the obstacle
//! solvers: Jacobi-preconditioned conjugate gradients and an envelope
//! Cholesky factorization on a reverse Cuthill-McKee ordering.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Systems with at most this many unknowns are factorized directly.
pub const DIRECT_SOLVE_LIMIT: usize = 2000;

/// Relative residual at which conjugate gradients stop.
pub const CG_TOLERANCE: f64 = 1e-12;

/// Compressed sparse row matrix with sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Square matrix with the given sparsity pattern and zero values.
    /// Each row's column list is sorted and deduplicated.
    pub fn from_pattern(n: usize, mut rows: Vec<Vec<usize>>) -> Self {
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for row in rows.iter_mut() {
            row.sort_unstable();
            row.dedup();
            col_idx.extend_from_slice(row);
            row_ptr.push(col_idx.len());
        }
        let values = vec![0.0; col_idx.len()];
        Self { n, row_ptr, col_idx, values }
    }

    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows = vec![Vec::new(); n];
        for &(i, j, _) in triplets {
            rows[i].push(j);
        }
        let mut m = Self::from_pattern(n, rows);
        for &(i, j, v) in triplets {
            m.add(i, j, v);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let row = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        row.binary_search(&j).ok().map(|k| self.row_ptr[i] + k)
    }

    /// Adds `v` to entry `(i, j)`, which must be in the pattern.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.position(i, j).expect("entry outside the sparsity pattern");
        self.values[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |k| self.values[k])
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            *yi = s;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `x^T A y`.
    pub fn quadratic_form(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.n).map(|i| x[i] * self.row(i).map(|(j, v)| v * y[j]).sum::<f64>()).sum()
    }

    /// The principal submatrix on `keep`, where `local[i]` is the new index
    /// of row `i` or `usize::MAX` if it is dropped.
    pub fn principal_submatrix(&self, keep: &[usize], local: &[usize]) -> CsrMatrix {
        let mut row_ptr = Vec::with_capacity(keep.len() + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for &i in keep {
            for (j, v) in self.row(i) {
                if local[j] != usize::MAX {
                    col_idx.push(local[j]);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        // `keep` is increasing, so `local` preserves column order
        CsrMatrix { n: keep.len(), row_ptr, col_idx, values }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned conjugate gradients started from `x`. Returns the
/// iteration count; stops once `|b - Ax| <= tol * |b|`.
pub fn conjugate_gradient(a: &CsrMatrix, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> Result<usize> {
    let n = a.dim();
    let b_norm = libm::sqrt(dot(b, b));
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(0);
    }
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect();
    let mut r = a.mul_vec(x);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        if libm::sqrt(dot(&r, &r)) <= tol * b_norm {
            return Ok(it);
        }
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if libm::sqrt(dot(&r, &r)) <= tol * b_norm {
        return Ok(max_iter);
    }
    Err(Error::NoConvergence { solver: "conjugate gradients", iterations: max_iter })
}

/// Reverse Cuthill-McKee ordering of the matrix graph: `perm[k]` is the
/// original index placed at position `k`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).filter(|&(j, _)| j != i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));
    let mut neighbours = Vec::new();
    for &start in &by_degree {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            neighbours.clear();
            neighbours.extend(a.row(i).map(|(j, _)| j).filter(|&j| !visited[j]));
            neighbours.sort_by_key(|&j| (degree[j], j));
            for &j in &neighbours {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

/// Envelope (skyline) Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    factor: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factorize(a: &CsrMatrix) -> Result<Self> {
        let n = a.dim();
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (k, &i) in perm.iter().enumerate() {
            inv[i] = k;
        }
        // envelope of the lower triangle of P A P^T
        let mut first: Vec<usize> = (0..n).collect();
        for (k, &i) in perm.iter().enumerate() {
            for (j, _) in a.row(i) {
                first[k] = first[k].min(inv[j]);
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for k in 0..n {
            start.push(start[k] + (k - first[k] + 1));
        }
        let mut factor = vec![0.0; start[n]];
        for (k, &i) in perm.iter().enumerate() {
            for (j, v) in a.row(i) {
                let c = inv[j];
                if c <= k {
                    factor[start[k] + c - first[k]] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let mut s = factor[start[i] + j - fi];
                let ri = &factor[start[i] + lo - fi..start[i] + j - fi];
                let rj = &factor[start[j] + lo - fj..start[j] + j - fj];
                s -= dot(ri, rj);
                let djj = factor[start[j] + j - fj];
                factor[start[i] + j - fi] = s / djj;
            }
            let row = &factor[start[i]..start[i] + i - fi];
            let d = factor[start[i] + i - fi] - dot(row, row);
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite);
            }
            factor[start[i] + i - fi] = libm::sqrt(d);
        }
        Ok(Self { perm, first, start, factor })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.perm.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&i| b[i]).collect();
        // L y = b
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.factor[self.start[i]..self.start[i] + i - fi];
            let s = y[i] - dot(row, &y[fi..i]);
            y[i] = s / self.factor[self.start[i] + i - fi];
        }
        // L^T x = y, column sweep
        for i in (0..n).rev() {
            let fi = self.first[i];
            y[i] /= self.factor[self.start[i] + i - fi];
            let yi = y[i];
            for j in fi..i {
                y[j] -= self.factor[self.start[i] + j - fi] * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (k, &i) in self.perm.iter().enumerate() {
            x[i] = y[k];
        }
        x
    }
}

/// Solves an SPD system, directly up to [`DIRECT_SOLVE_LIMIT`] unknowns and
/// by conjugate gradients warm-started from `guess` above it.
pub fn solve_spd(a: &CsrMatrix, b: &[f64], guess: &[f64]) -> Result<Vec<f64>> {
    let n = a.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n <= DIRECT_SOLVE_LIMIT {
        return Ok(EnvelopeCholesky::factorize(a)?.solve(b));
    }
    let mut x = guess.to_vec();
    conjugate_gradient(a, b, &mut x, CG_TOLERANCE, 20 * n + 1000)?;
    Ok(x)
}
