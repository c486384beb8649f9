//! Dense nonsymmetric eigensolver on complex matrices: balancing, Householder
//! reduction to Hessenberg form, shifted QR to Schur form, and eigenvectors by
//! back-substitution.

#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;
use thiserror::Error;

pub type CMatrix = Vec<Vec<Complex64>>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EigenError {
    #[error("QR iteration did not converge")]
    NoConvergence,
    #[error("matrix is not square")]
    NotSquare,
}

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    /// Row-major `n×n`; column `k` is the unit-norm eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

fn l1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

pub fn from_real(a: &[Vec<f64>]) -> CMatrix {
    a.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect()
}

/// Diagonal similarity scaling by powers of two; returns the scale factors.
fn balance(a: &mut CMatrix) -> Vec<f64> {
    let n = a.len();
    let mut d = vec![1.0; n];
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += l1(a[j][i]);
                    r += l1(a[i][j]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / 2.0;
            while c < g {
                f *= 2.0;
                c *= 4.0;
            }
            g = r * 2.0;
            while c >= g {
                f /= 2.0;
                c /= 4.0;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                d[i] *= f;
                for j in 0..n {
                    a[i][j] /= f;
                    a[j][i] *= f;
                }
            }
        }
    }
    d
}

/// Reduce to upper Hessenberg form in place; returns the unitary `Q` with `A = Q H Qᴴ`.
fn hessenberg(h: &mut CMatrix) -> CMatrix {
    let n = h.len();
    let mut q = identity(n);
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = (k + 1..n).map(|i| h[i][k].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[k + 1][k];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[i][k]).collect();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // H <- P H
        for j in k..n {
            let s: Complex64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * h[k + 1 + t][j]).sum();
            for (t, vi) in v.iter().enumerate() {
                h[k + 1 + t][j] -= 2.0 * vi * s;
            }
        }
        // H <- H P, Q <- Q P
        for m in [&mut *h, &mut q] {
            for row in m.iter_mut() {
                let s: Complex64 = v.iter().enumerate().map(|(t, vi)| row[k + 1 + t] * vi).sum();
                for (t, vi) in v.iter().enumerate() {
                    row[k + 1 + t] -= 2.0 * s * vi.conj();
                }
            }
        }
        for i in k + 2..n {
            h[i][k] = Complex64::new(0.0, 0.0);
        }
    }
    q
}

fn identity(n: usize) -> CMatrix {
    (0..n).map(|i| (0..n).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()).collect()
}

/// Shifted QR on a Hessenberg matrix, accumulating rotations into `z`.
/// On return `h` is upper triangular.
fn schur(h: &mut CMatrix, z: &mut CMatrix) -> Result<(), EigenError> {
    let n = h.len();
    if n == 0 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let scale = l1(h[l - 1][l - 1]) + l1(h[l][l]);
            let scale = if scale == 0.0 { 1.0 } else { scale };
            if l1(h[l][l - 1]) <= eps * scale {
                h[l][l - 1] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n {
            return Err(EigenError::NoConvergence);
        }
        let mu = if iter % 11 == 10 {
            let extra = if hi >= 2 { l1(h[hi - 1][hi - 2]) } else { 0.0 };
            h[hi][hi] + Complex64::new(0.75 * (l1(h[hi][hi - 1]) + extra), 0.0)
        } else {
            let (a, b, c, d) = (h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi]);
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let m = (a + d) * 0.5;
            let (e1, e2) = (m + disc, m - disc);
            if (e1 - d).norm() < (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };
        for k in l..=hi {
            h[k][k] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (a, b) = (h[k][k], h[k + 1][k]);
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 { (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)) } else { (a / r, b / r) };
            for j in k..n {
                let (x, y) = (h[k][j], h[k + 1][j]);
                h[k][j] = c.conj() * x + s.conj() * y;
                h[k + 1][j] = -s * x + c * y;
            }
            rots.push((c, s));
        }
        for (t, &(c, s)) in rots.iter().enumerate() {
            let k = l + t;
            let top = (k + 2).min(hi + 1);
            for row in h.iter_mut().take(top) {
                let (x, y) = (row[k], row[k + 1]);
                row[k] = x * c + y * s;
                row[k + 1] = -x * s.conj() + y * c.conj();
            }
            for row in z.iter_mut() {
                let (x, y) = (row[k], row[k + 1]);
                row[k] = x * c + y * s;
                row[k + 1] = -x * s.conj() + y * c.conj();
            }
        }
        for k in l..=hi {
            h[k][k] += mu;
        }
    }
    Ok(())
}

/// Eigenvalues and right eigenvectors of a square complex matrix.
pub fn eig(a: &[Vec<Complex64>]) -> Result<EigenDecomposition, EigenError> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(EigenError::NotSquare);
    }
    let mut h: CMatrix = a.to_vec();
    let d = balance(&mut h);
    let mut z = hessenberg(&mut h);
    schur(&mut h, &mut z)?;
    let values: Vec<Complex64> = (0..n).map(|i| h[i][i]).collect();
    let norm = h.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * norm;
    // eigenvectors of the triangular factor
    let mut y = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for k in 0..n {
        y[k][k] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let s: Complex64 = (j + 1..=k).map(|l| h[j][l] * y[l][k]).sum();
            let mut den = h[j][j] - values[k];
            if den.norm() < small {
                den = Complex64::new(small, 0.0);
            }
            y[j][k] = -s / den;
        }
    }
    let mut vectors = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for k in 0..n {
        let mut col: Vec<Complex64> =
            (0..n).map(|i| d[i] * (0..=k).map(|l| z[i][l] * y[l][k]).sum::<Complex64>()).collect();
        let nrm = col.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 0.0 {
            for x in col.iter_mut() {
                *x /= nrm;
            }
        }
        for i in 0..n {
            vectors[i][k] = col[i];
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

pub fn mat_mul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> CMatrix {
    let m = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            let mut out = vec![Complex64::new(0.0, 0.0); m];
            for (aik, brow) in row.iter().zip(b) {
                for (o, bkj) in out.iter_mut().zip(brow) {
                    *o += aik * bkj;
                }
            }
            out
        })
        .collect()
}

/// Inverse by LU with partial pivoting; `None` if numerically singular.
pub fn inverse(a: &[Vec<Complex64>]) -> Option<CMatrix> {
    let n = a.len();
    let mut m: CMatrix = a.to_vec();
    let mut inv = identity(n);
    let scale = a.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max);
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))?;
        if m[p][col].norm() <= f64::EPSILON * scale * n as f64 || m[p][col].norm() == 0.0 {
            return None;
        }
        m.swap(col, p);
        inv.swap(col, p);
        let piv = m[col][col];
        for j in 0..n {
            m[col][j] /= piv;
            inv[col][j] /= piv;
        }
        for i in 0..n {
            if i != col {
                let f = m[i][col];
                if f.norm() != 0.0 {
                    for j in 0..n {
                        let (mc, ic) = (m[col][j], inv[col][j]);
                        m[i][j] -= f * mc;
                        inv[i][j] -= f * ic;
                    }
                }
            }
        }
    }
    Some(inv)
}
