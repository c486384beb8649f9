//! Hilbert function, Hilbert series numerator, Hilbert regularity and degree.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::field::Field;
use crate::khov::Parameterization;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HilbertError {
    #[error("need at least {needed} Hilbert function values, got {got}")]
    TooFewValues { needed: usize, got: usize },
    #[error("invalid Grassmannian Gr({k},{m})")]
    InvalidGrassmannian { k: usize, m: usize },
}

/// Hilbert series data `HS(u) = P(u)/(1−u)^{n+1}` computed from `HF(0..=Dmax)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertData {
    pub hf: Vec<u64>,
    /// Coefficients of `P` from `u^a` to `u^b`.
    pub numerator: Vec<i64>,
    pub a: usize,
    pub b: usize,
    pub n: usize,
    pub hreg: i64,
    pub degree: i64,
    /// A run of `n+2` zero coefficients after `b` was observed.
    pub certified: bool,
}

impl HilbertData {
    /// Numerator as dense coefficients `c_0..c_b`.
    pub fn dense_numerator(&self) -> Vec<i64> {
        let mut v = vec![0; self.a];
        v.extend_from_slice(&self.numerator);
        v
    }

    /// HF values predicted by the numerator for `d = 0..len`.
    pub fn reconstruct(&self, len: usize) -> Vec<i128> {
        let c = self.dense_numerator();
        (0..len)
            .map(|d| {
                c.iter()
                    .enumerate()
                    .filter(|(k, _)| *k <= d)
                    .map(|(k, &ck)| ck as i128 * binomial((d - k + self.n) as u64, self.n as u64) as i128)
                    .sum()
            })
            .collect()
    }
}

pub fn hilbert_function<F: Field>(par: &Parameterization<F>, d: usize) -> u64 {
    par.hilbert_function(d) as u64
}

/// Enumerate `HF(0..=dmax)` and extract the numerator.
pub fn hilbert_numerator<F: Field>(par: &Parameterization<F>, dmax: usize) -> Result<HilbertData, HilbertError> {
    let n = par.n();
    if dmax < n + 2 {
        return Err(HilbertError::TooFewValues { needed: n + 3, got: dmax + 1 });
    }
    let hf: Vec<u64> = (0..=dmax).map(|d| hilbert_function(par, d)).collect();
    numerator_from_values(&hf, n)
}

/// Numerator of the Hilbert series from the values `hf[0..]` of a graded
/// algebra of Krull dimension `n+1`.
pub fn numerator_from_values(hf: &[u64], n: usize) -> Result<HilbertData, HilbertError> {
    if hf.is_empty() {
        return Err(HilbertError::TooFewValues { needed: 1, got: 0 });
    }
    let p: Vec<i128> = (0..hf.len())
        .map(|k| {
            (0..=k.min(n + 1))
                .map(|j| {
                    let s = if j % 2 == 0 { 1 } else { -1 };
                    s * binomial((n + 1) as u64, j as u64) as i128 * hf[k - j] as i128
                })
                .sum()
        })
        .collect();
    let b = p.iter().rposition(|&x| x != 0).unwrap_or(0);
    let a = p.iter().position(|&x| x != 0).unwrap_or(0);
    let certified = b + n + 2 < hf.len() && p[b + 1..=b + n + 2].iter().all(|&x| x == 0);
    let numerator: Vec<i64> = p[a..=b].iter().map(|&x| x as i64).collect();
    let degree = numerator.iter().sum();
    Ok(HilbertData { hf: hf.to_vec(), numerator, a, b, n, hreg: b as i64 - n as i64, degree, certified })
}

pub fn hilbert_regularity(hd: &HilbertData) -> i64 {
    hd.hreg
}

pub fn variety_degree(hd: &HilbertData) -> i64 {
    hd.degree
}

/// Degree bound from the regularity theorem for complete intersections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularityBound {
    /// `Σ d_i + HReg`; every degree from here on lies in the regularity.
    Bound(i64),
    /// The number of equations differs from `n`; no bound is available.
    NotSquare { equations: usize, n: usize },
}

pub fn regularity_bound(hreg: i64, degrees: &[usize], n: usize) -> RegularityBound {
    if degrees.len() != n {
        return RegularityBound::NotSquare { equations: degrees.len(), n };
    }
    RegularityBound::Bound(degrees.iter().sum::<usize>() as i64 + hreg)
}

/// Closed-form Hilbert polynomial of the Plücker embedding of `Gr(k, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrassmannianHilbert {
    pub k: usize,
    pub m: usize,
}

impl GrassmannianHilbert {
    pub fn new(k: usize, m: usize) -> Result<Self, HilbertError> {
        if k == 0 || k >= m {
            return Err(HilbertError::InvalidGrassmannian { k, m });
        }
        Ok(GrassmannianHilbert { k, m })
    }

    pub fn eval(&self, t: i64) -> BigInt {
        let (k, m) = (self.k as i64, self.m as i64);
        let mut num = BigInt::one();
        for i in 1..k {
            num *= factorial(i as u64);
        }
        let mut den = BigInt::one();
        for j in (m - k)..m {
            den *= factorial(j as u64);
        }
        let mut prod = BigInt::one();
        for i in 1..=k {
            for r in 0..(m - k) {
                prod *= BigInt::from(t + i + r);
            }
        }
        let v = BigRational::new(num * prod, den);
        assert!(v.is_integer(), "Hilbert polynomial must be integral at integers");
        v.to_integer()
    }

    pub fn hreg(&self) -> i64 {
        1 - self.m as i64
    }

    /// Krull dimension minus one.
    pub fn dimension(&self) -> usize {
        self.k * (self.m - self.k)
    }

    /// Numerator from closed-form values; certified by construction length.
    pub fn hilbert_data(&self) -> HilbertData {
        let n = self.dimension();
        let len = 2 * n + 4;
        let hf: Vec<u64> = (0..len as i64).map(|t| self.eval(t).to_u64().expect("fits")).collect();
        numerator_from_values(&hf, n).expect("nonempty")
    }
}

pub fn grassmannian_closed_forms(k: usize, m: usize) -> Result<(GrassmannianHilbert, i64), HilbertError> {
    let g = GrassmannianHilbert::new(k, m)?;
    Ok((g, g.hreg()))
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn numerator_of_projective_space() {
        let hf: Vec<u64> = (0..10).map(|d| binomial(d + 2, 2) as u64).collect();
        let hd = numerator_from_values(&hf, 2).unwrap();
        assert_eq!(hd.numerator, vec![1]);
        assert_eq!(hd.hreg, -2);
        assert!(hd.certified);
        assert_eq!(hd.reconstruct(10).iter().map(|&x| x as u64).collect::<Vec<_>>(), hf);
    }

    #[test]
    fn short_range_is_not_certified() {
        let hf: Vec<u64> = (0..4).map(|d| binomial(d + 2, 2) as u64).collect();
        assert!(!numerator_from_values(&hf, 2).unwrap().certified);
    }

    #[test]
    fn grassmannian_values() {
        let (g, hreg) = grassmannian_closed_forms(2, 4).unwrap();
        let vals: Vec<i64> = (0..7).map(|t| g.eval(t).to_i64().unwrap()).collect();
        assert_eq!(vals, vec![1, 6, 20, 50, 105, 196, 336]);
        assert_eq!(hreg, -3);
        assert_eq!(GrassmannianHilbert::new(2, 5).unwrap().eval(3), BigInt::from(175));
        let g36 = GrassmannianHilbert::new(3, 6).unwrap();
        assert_eq!(g36.eval(3), BigInt::from(980));
        assert_eq!(g36.eval(4), BigInt::from(4116));
        assert!(g36.eval(-1).is_zero());
        let hd = g36.hilbert_data();
        assert_eq!(hd.numerator, vec![1, 10, 20, 10, 1]);
        assert_eq!(hd.degree, 42);
        assert_eq!(hd.hreg, -5);
        assert!(grassmannian_closed_forms(3, 3).is_err());
    }

    #[test]
    fn bounds() {
        assert_eq!(regularity_bound(0, &[1, 1], 2), RegularityBound::Bound(2));
        assert_eq!(regularity_bound(-5, &[1; 9], 9), RegularityBound::Bound(4));
        assert_eq!(regularity_bound(0, &[1; 3], 2), RegularityBound::NotSquare { equations: 3, n: 2 });
    }
}
