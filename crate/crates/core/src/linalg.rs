//! Dense exact matrix helpers on top of the field elimination hooks.

use crate::field::Field;
use crate::par;

pub type Matrix<E> = Vec<Vec<E>>;

pub fn transpose<E: Clone>(m: &[Vec<E>], ncols: usize) -> Matrix<E> {
    (0..ncols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn rank<F: Field>(f: &F, m: &[Vec<F::Elem>], ncols: usize) -> usize {
    f.pivot_columns(m.to_vec(), ncols).len()
}

/// Indices of a maximal independent subset of rows, greedy in row order.
pub fn independent_rows<F: Field>(f: &F, m: &[Vec<F::Elem>], ncols: usize) -> Vec<usize> {
    f.pivot_columns(transpose(m, ncols), m.len())
}

/// Basis of the right nullspace, one vector per free column in increasing
/// column order, each normalized by the field.
pub fn nullspace<F: Field>(f: &F, m: &[Vec<F::Elem>], ncols: usize) -> Matrix<F::Elem> {
    let (r, pivots) = f.rref(m.to_vec(), ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..ncols).filter(|&c| !is_pivot[c]).collect();
    par::map_range(free.len(), |idx| {
        let c = free[idx];
        let mut v = vec![f.zero(); ncols];
        v[c] = f.one();
        for (row, &p) in r.iter().zip(&pivots) {
            v[p] = f.neg(&row[c]);
        }
        f.normalize_vector(&mut v);
        v
    })
}

pub fn identity<F: Field>(f: &F, n: usize) -> Matrix<F::Elem> {
    (0..n).map(|i| (0..n).map(|j| if i == j { f.one() } else { f.zero() }).collect()).collect()
}

pub fn mat_mul<F: Field>(f: &F, a: &[Vec<F::Elem>], b: &[Vec<F::Elem>]) -> Matrix<F::Elem> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    par::map_range(a.len(), |i| {
        let mut out = vec![f.zero(); cols];
        for k in 0..inner {
            let aik = &a[i][k];
            if f.is_zero(aik) {
                continue;
            }
            for (o, bkj) in out.iter_mut().zip(&b[k]) {
                if !f.is_zero(bkj) {
                    f.add_assign(o, &f.mul(aik, bkj));
                }
            }
        }
        out
    })
}

pub fn mat_vec<F: Field>(f: &F, a: &[Vec<F::Elem>], v: &[F::Elem]) -> Vec<F::Elem> {
    a.iter()
        .map(|row| {
            let mut acc = f.zero();
            for (x, y) in row.iter().zip(v) {
                if !f.is_zero(x) && !f.is_zero(y) {
                    f.add_assign(&mut acc, &f.mul(x, y));
                }
            }
            acc
        })
        .collect()
}

pub fn mat_sub<F: Field>(f: &F, a: &[Vec<F::Elem>], b: &[Vec<F::Elem>]) -> Matrix<F::Elem> {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| f.sub(x, y)).collect()).collect()
}

pub fn is_zero_matrix<F: Field>(f: &F, a: &[Vec<F::Elem>]) -> bool {
    a.iter().all(|r| r.iter().all(|x| f.is_zero(x)))
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse<F: Field>(f: &F, a: &[Vec<F::Elem>]) -> Option<Matrix<F::Elem>> {
    let n = a.len();
    let aug: Matrix<F::Elem> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
            r
        })
        .collect();
    let (r, pivots) = f.rref(aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Select columns `cols` of every row.
pub fn select_columns<E: Clone>(m: &[Vec<E>], cols: &[usize]) -> Matrix<E> {
    m.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use num_rational::BigRational;

    fn qm(rows: &[&[i64]]) -> Matrix<BigRational> {
        rows.iter().map(|r| r.iter().map(|&x| Rationals.from_i64(x)).collect()).collect()
    }

    #[test]
    fn nullspace_is_annihilated() {
        let m = qm(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let k = nullspace(&Rationals, &m, 4);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(mat_vec(&Rationals, &m, v).iter().all(|x| x == &Rationals.zero()));
        }
        assert_eq!(independent_rows(&Rationals, &m, 4), vec![0, 2]);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = qm(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = inverse(&Rationals, &a).unwrap();
        assert_eq!(mat_mul(&Rationals, &a, &inv), identity(&Rationals, 3));
        assert!(inverse(&Rationals, &qm(&[&[1, 2], &[2, 4]])).is_none());
        let f = PrimeField::new(7).unwrap();
        let b = vec![vec![3u64, 1], vec![4, 2]];
        let ib = inverse(&f, &b).unwrap();
        assert_eq!(mat_mul(&f, &b, &ib), identity(&f, 2));
    }
}
