//! Small dense and tridiagonal linear algebra.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples rows `i` and `i+1`), by implicit QL.
///
/// With `first_row = true`, also returns the first component of each
/// normalized eigenvector (Golub–Welsch). Output is sorted ascending.
pub fn tridiag_eigen(diag: &[f64], off: &[f64], first_row: bool) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&off[..n - 1]);
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::EigenFailure);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if first_row {
                    let f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenFailure);
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let vals = idx.iter().map(|&i| d[i]).collect();
    let firsts = if first_row { idx.iter().map(|&i| z[i]).collect() } else { Vec::new() };
    Ok((vals, firsts))
}

/// Solves `A x = b` (`A` row-major `n×n`) by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n * n {
        return Err(Error::InvalidArgument("matrix shape".into()));
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().partial_cmp(&a[j * n + col].abs()).unwrap()).unwrap();
        if a[piv * n + col] == 0.0 {
            return Err(Error::InvalidArgument("singular matrix".into()));
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row * n + k] * x[k];
        }
        x[row] = s / a[row * n + row];
    }
    Ok(x)
}

/// Upper-triangular factor `R` (`k×k`, row-major) of the thin Householder QR of
/// a tall matrix given by `k` columns of equal length.
pub fn qr_r(columns: &[Vec<f64>]) -> Vec<f64> {
    let k = columns.len();
    if k == 0 {
        return Vec::new();
    }
    let n = columns[0].len();
    let mut a: Vec<Vec<f64>> = columns.to_vec();
    let steps = k.min(n);
    for j in 0..steps {
        let norm = a[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = -norm.copysign(a[j][j]);
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vn2: f64 = v.iter().map(|x| x * x).sum();
        if vn2 == 0.0 {
            continue;
        }
        for col in a.iter_mut().skip(j) {
            let dot: f64 = v.iter().zip(&col[j..]).map(|(x, y)| x * y).sum();
            let f = 2.0 * dot / vn2;
            for (c, vi) in col[j..].iter_mut().zip(&v) {
                *c -= f * vi;
            }
        }
    }
    let mut r = vec![0.0; k * k];
    for (j, col) in a.iter().enumerate() {
        for i in 0..=j.min(n.saturating_sub(1)) {
            if i < k {
                r[i * k + j] = col[i];
            }
        }
    }
    r
}

/// `‖U Vᵀ‖_F` for tall factors given column-wise, computed from their QR factors.
pub fn lowrank_frobenius(u: &[Vec<f64>], v: &[Vec<f64>]) -> f64 {
    let k = u.len();
    assert_eq!(k, v.len());
    if k == 0 {
        return 0.0;
    }
    let ru = qr_r(u);
    let rv = qr_r(v);
    // ‖Ru Rvᵀ‖_F
    let mut s = 0.0;
    for i in 0..k {
        for j in 0..k {
            let mut acc = 0.0;
            for l in 0..k {
                acc += ru[i * k + l] * rv[j * k + l];
            }
            s += acc * acc;
        }
    }
    s.sqrt()
}

/// Eigenvalues of a small symmetric matrix (row-major) by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i * n + j].powi(2)).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiag_small() {
        // [[2,1],[1,2]] -> 1, 3
        let (v, z) = tridiag_eigen(&[2.0, 2.0], &[1.0], true).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
        assert!((z[0] * z[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn tridiag_matches_jacobi() {
        let n = 9;
        let diag: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| 1.0 + (i as f64).cos() * 0.3).collect();
        let (v, z) = tridiag_eigen(&diag, &off, true).unwrap();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = diag[i];
            if i + 1 < n {
                a[i * n + i + 1] = off[i];
                a[(i + 1) * n + i] = off[i];
            }
        }
        let w = symmetric_eigenvalues(a, n);
        for (x, y) in v.iter().zip(&w) {
            assert!((x - y).abs() < 1e-12);
        }
        let s: f64 = z.iter().map(|t| t * t).sum();
        assert!((s - 1.0).abs() < 1e-13);
    }

    #[test]
    fn solve_small() {
        let x = solve(vec![0.0, 2.0, 1.0, 1.0], vec![4.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn lowrank_norm() {
        let u = vec![vec![1.0, 2.0, 0.0], vec![0.0, 1.0, 1.0]];
        let v = vec![vec![1.0, 0.0], vec![1.0, 1.0]];
        // dense U Vᵀ
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..2 {
                let e = u[0][i] * v[0][j] + u[1][i] * v[1][j];
                s += e * e;
            }
        }
        assert!((lowrank_frobenius(&u, &v) - s.sqrt()).abs() < 1e-14);
    }
}
