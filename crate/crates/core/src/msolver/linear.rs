//! Sparse linear solves for the Newton corrections.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearMethod {
    Lu,
    BiCgStab,
}

/// Solves `A x = b` by sparse LU, falling back to Jacobi-preconditioned
/// BiCGSTAB when the factorization fails.
pub fn solve(n: usize, triplets: &[Triplet<usize, usize, f64>], b: &[f64]) -> Result<(Vec<f64>, LinearMethod)> {
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, triplets)
        .map_err(|e| Error::LinearSolve(format!("matrix assembly: {e:?}")))?;
    if let Ok(lu) = a.sp_lu() {
        let rhs = faer::col::Col::from_fn(n, |i| b[i]);
        let x = lu.solve(&rhs);
        let x: Vec<f64> = (0..n).map(|i| x[i]).collect();
        if x.iter().all(|v| v.is_finite()) {
            return Ok((x, LinearMethod::Lu));
        }
    }
    bicgstab(n, triplets, b, 1e-12, 20_000).map(|x| (x, LinearMethod::BiCgStab))
}

struct Csr {
    start: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

impl Csr {
    fn new(n: usize, triplets: &[Triplet<usize, usize, f64>]) -> Self {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.iter().map(|t| (t.row, t.col, t.val)).collect();
        sorted.sort_by_key(|t| (t.0, t.1));
        let mut start = vec![0; n + 1];
        let mut col = Vec::with_capacity(sorted.len());
        let mut val: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *val.last_mut().unwrap() += v;
                continue;
            }
            start[r + 1] += 1;
            col.push(c);
            val.push(v);
            last = Some((r, c));
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        Self { start, col, val }
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (self.start[i]..self.start[i + 1]).map(|k| self.val[k] * x[self.col[k]]).sum();
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.start.len() - 1)
            .map(|i| (self.start[i]..self.start[i + 1]).find(|&k| self.col[k] == i).map_or(1.0, |k| self.val[k]))
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Right-preconditioned BiCGSTAB with a Jacobi preconditioner.
pub fn bicgstab(n: usize, triplets: &[Triplet<usize, usize, f64>], b: &[f64], rtol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let a = Csr::new(n, triplets);
    let dinv: Vec<f64> = a.diagonal().iter().map(|d| if *d != 0.0 { 1.0 / d } else { 1.0 }).collect();
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let r0 = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    for _ in 0..max_iter {
        let rho_new = dot(&r0, &r);
        if rho_new == 0.0 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
            y[i] = dinv[i] * p[i];
        }
        a.apply(&y, &mut v);
        alpha = rho / dot(&r0, &v);
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if dot(&s, &s).sqrt() <= rtol * bnorm {
            for i in 0..n {
                x[i] += alpha * y[i];
            }
            return Ok(x);
        }
        for i in 0..n {
            z[i] = dinv[i] * s[i];
        }
        a.apply(&z, &mut t);
        omega = dot(&t, &s) / dot(&t, &t);
        for i in 0..n {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
        let rn = dot(&r, &r).sqrt();
        if !rn.is_finite() {
            break;
        }
        if rn <= rtol * bnorm {
            return Ok(x);
        }
    }
    Err(Error::LinearSolve("BiCGSTAB did not reach the requested tolerance".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(m: usize) -> Vec<Triplet<usize, usize, f64>> {
        let mut t = Vec::new();
        for i in 0..m {
            t.push(Triplet::new(i, i, 2.5));
            if i > 0 {
                t.push(Triplet::new(i, i - 1, -1.0));
            }
            if i + 1 < m {
                t.push(Triplet::new(i, i + 1, -1.2));
            }
        }
        t
    }

    #[test]
    fn lu_and_bicgstab_agree() {
        let m = 200;
        let t = laplacian(m);
        let b: Vec<f64> = (0..m).map(|i| (i as f64 * 0.1).sin()).collect();
        let (x, method) = solve(m, &t, &b).unwrap();
        assert_eq!(method, LinearMethod::Lu);
        let y = bicgstab(m, &t, &b, 1e-13, 5000).unwrap();
        for (a, c) in x.iter().zip(&y) {
            assert!((a - c).abs() < 1e-10);
        }
    }
}
