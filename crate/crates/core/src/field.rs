//! Exact coefficient fields: the rationals and prime fields of up to 62 bits.
//!
//! Every algorithm in the crate is generic over [`Field`]. Elimination is a
//! trait hook so that the rationals can run fraction-free (Bareiss) while
//! prime fields use plain Gauss-Jordan.

use std::fmt::{self, Debug};
use std::hash::Hash;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

use crate::par;

/// Largest admissible prime modulus (exclusive).
pub const MAX_MODULUS: u64 = 1 << 62;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not a prime")]
    NotPrime(u64),
    #[error("modulus {0} is outside the supported range [2, 2^62)")]
    ModulusRange(u64),
    #[error("cannot parse scalar '{0}'")]
    BadScalar(String),
}

/// Which field a computation runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    PrimeField(u64),
}

impl FieldSpec {
    pub fn validate(self) -> Result<Self, FieldError> {
        if let FieldSpec::PrimeField(p) = self {
            if !(2..MAX_MODULUS).contains(&p) {
                return Err(FieldError::ModulusRange(p));
            }
            if !is_prime(p) {
                return Err(FieldError::NotPrime(p));
            }
        }
        Ok(self)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "QQ"),
            FieldSpec::PrimeField(p) => write!(f, "GF({p})"),
        }
    }
}

/// A field with exact arithmetic.
///
/// Elements are plain values; the field object carries whatever context the
/// arithmetic needs (the modulus for prime fields).
#[allow(clippy::wrong_self_convention)]
pub trait Field: Clone + Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Send + Sync;

    fn spec(&self) -> FieldSpec;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;

    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn add_assign(&self, acc: &mut Self::Elem, a: &Self::Elem) {
        *acc = self.add(acc, a);
    }

    /// `acc -= a * b`
    fn sub_mul_assign(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem) {
        *acc = self.sub(acc, &self.mul(a, b));
    }

    /// Floating-point image of an element; `None` for prime fields.
    fn to_f64(&self, a: &Self::Elem) -> Option<f64>;

    /// Exact text form: `num` or `num/den` over the rationals, the residue otherwise.
    fn format(&self, a: &Self::Elem) -> String;
    fn parse_scalar(&self, s: &str) -> Result<Self::Elem, FieldError>;

    /// A random coefficient: uniform in `1..=bound` over the rationals,
    /// uniform over the nonzero residues for prime fields.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, bound: u64) -> Self::Elem;

    /// Forward elimination. Returns the pivot columns (leftmost-first rank profile).
    fn pivot_columns(&self, rows: Vec<Vec<Self::Elem>>, ncols: usize) -> Vec<usize> {
        gauss_jordan(self, rows, ncols, false).1
    }

    /// Reduced row echelon form with unit pivots; zero rows are dropped.
    fn rref(&self, rows: Vec<Vec<Self::Elem>>, ncols: usize) -> (Vec<Vec<Self::Elem>>, Vec<usize>) {
        gauss_jordan(self, rows, ncols, true)
    }

    /// Rescale a nonzero vector to a canonical representative of its line.
    fn normalize_vector(&self, v: &mut [Self::Elem]) {
        if let Some(lead) = v.iter().find(|x| !self.is_zero(x)).cloned() {
            let inv = self.inv(&lead).expect("nonzero");
            for x in v.iter_mut() {
                *x = self.mul(x, &inv);
            }
        }
    }
}

/// Plain Gauss(-Jordan) elimination over any field. Pivot is the first
/// nonzero entry in the column, scanning rows top-down.
pub fn gauss_jordan<F: Field>(
    field: &F,
    mut rows: Vec<Vec<F::Elem>>,
    ncols: usize,
    reduced: bool,
) -> (Vec<Vec<F::Elem>>, Vec<usize>) {
    let m = rows.len();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == m {
            break;
        }
        let Some(r) = (rank..m).find(|&r| !field.is_zero(&rows[r][col])) else {
            continue;
        };
        rows.swap(rank, r);
        if reduced {
            let inv = field.inv(&rows[rank][col]).expect("nonzero pivot");
            for x in rows[rank][col..].iter_mut() {
                *x = field.mul(x, &inv);
            }
        }
        let (above, rest) = rows.split_at_mut(rank);
        let (pivot_row, below) = rest.split_first_mut().expect("pivot row");
        let pivot_row: &[F::Elem] = pivot_row;
        let eliminate = |row: &mut Vec<F::Elem>| {
            if field.is_zero(&row[col]) {
                return;
            }
            let factor =
                if reduced { row[col].clone() } else { field.div(&row[col], &pivot_row[col]).expect("nonzero pivot") };
            for j in col..ncols {
                if !field.is_zero(&pivot_row[j]) {
                    field.sub_mul_assign(&mut row[j], &factor, &pivot_row[j]);
                }
            }
        };
        par::for_each_mut(below, eliminate);
        if reduced {
            par::for_each_mut(above, eliminate);
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    (rows, pivots)
}

// ---------------------------------------------------------------------------
// Rationals
// ---------------------------------------------------------------------------

/// The field of rational numbers with arbitrary-precision entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rationals
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_bigint(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn is_one(&self, a: &BigRational) -> bool {
        a.is_one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn add_assign(&self, acc: &mut BigRational, a: &BigRational) {
        *acc += a;
    }
    fn sub_mul_assign(&self, acc: &mut BigRational, a: &BigRational, b: &BigRational) {
        *acc -= a * b;
    }
    fn to_f64(&self, a: &BigRational) -> Option<f64> {
        Some(rational_to_f64(a))
    }
    fn format(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
    fn parse_scalar(&self, s: &str) -> Result<BigRational, FieldError> {
        parse_rational(s).ok_or_else(|| FieldError::BadScalar(s.to_string()))
    }
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, bound: u64) -> BigRational {
        let v = rng.random_range(1..=bound.max(1));
        BigRational::from_integer(BigInt::from(v))
    }

    fn pivot_columns(&self, rows: Vec<Vec<BigRational>>, ncols: usize) -> Vec<usize> {
        let ints = rows.into_iter().map(|r| clear_denominators(&r)).collect();
        bareiss(ints, ncols, false).1
    }

    fn rref(&self, rows: Vec<Vec<BigRational>>, ncols: usize) -> (Vec<Vec<BigRational>>, Vec<usize>) {
        let ints = rows.into_iter().map(|r| clear_denominators(&r)).collect();
        let (ints, pivots) = bareiss(ints, ncols, true);
        // every pivot entry now equals the last pivot value
        let out = ints
            .into_iter()
            .zip(&pivots)
            .map(|(row, &pc)| {
                let d = row[pc].clone();
                row.into_iter().map(|x| BigRational::new(x, d.clone())).collect()
            })
            .collect();
        (out, pivots)
    }

    /// Primitive integer vector with positive leading entry.
    fn normalize_vector(&self, v: &mut [BigRational]) {
        let ints = clear_denominators(v);
        let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g.is_zero() {
            return;
        }
        let lead_neg = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
        let g = if lead_neg { -g } else { g };
        for (slot, x) in v.iter_mut().zip(ints) {
            *slot = BigRational::from_integer(x / &g);
        }
    }
}

fn rational_to_f64(a: &BigRational) -> f64 {
    if let Some(v) = a.to_f64() {
        return v;
    }
    // fall back to shifting both parts into range
    let (n, d) = (a.numer(), a.denom());
    let shift = n.bits().max(d.bits()).saturating_sub(1000) as usize;
    let nf = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let df = (d >> shift).to_f64().unwrap_or(f64::NAN);
    nf / df
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| BigRational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

/// Multiply a rational row by the lcm of its denominators.
fn clear_denominators(row: &[BigRational]) -> Vec<BigInt> {
    let l = row.iter().filter(|x| !x.is_zero()).fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    row.iter().map(|x| if x.is_zero() { BigInt::zero() } else { x.numer() * (&l / x.denom()) }).collect()
}

/// Fraction-free elimination on an integer matrix.
///
/// In reduced mode this is the integer-preserving Gauss-Jordan variant: every
/// intermediate entry is a minor of the input, so each division below is exact,
/// and on exit all pivot entries equal the last pivot.
pub fn bareiss(mut rows: Vec<Vec<BigInt>>, ncols: usize, reduced: bool) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let m = rows.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == m {
            break;
        }
        let Some(r) = (rank..m).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, r);
        let (above, rest) = rows.split_at_mut(rank);
        let (pivot_row, below) = rest.split_first_mut().expect("pivot row");
        let pivot_row: &[BigInt] = pivot_row;
        let p = &pivot_row[col];
        let prev_ref = &prev;
        // rows below have zeros left of `col`
        par::for_each_mut(below, |row| {
            let f = std::mem::take(&mut row[col]);
            for j in col + 1..ncols {
                let mut v = p * &row[j];
                if !f.is_zero() && !pivot_row[j].is_zero() {
                    v -= &f * &pivot_row[j];
                }
                row[j] = exact_div(v, prev_ref);
            }
        });
        if reduced {
            // rows above carry entries in free columns left of `col` as well
            par::for_each_mut(above, |row| {
                let f = std::mem::take(&mut row[col]);
                for j in 0..ncols {
                    if j == col {
                        continue;
                    }
                    let mut v = p * &row[j];
                    if !f.is_zero() && !pivot_row[j].is_zero() {
                        v -= &f * &pivot_row[j];
                    }
                    row[j] = exact_div(v, prev_ref);
                }
            });
        }
        prev = p.clone();
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    (rows, pivots)
}

fn exact_div(v: BigInt, d: &BigInt) -> BigInt {
    if d.is_one() || v.is_zero() {
        return v;
    }
    let (q, r) = v.div_rem(d);
    debug_assert!(r.is_zero(), "Bareiss division must be exact");
    let _ = r;
    q
}

// ---------------------------------------------------------------------------
// Prime fields
// ---------------------------------------------------------------------------

/// The prime field Z/pZ for a prime `p < 2^62`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
    // floor((2^64 - 1) / p) when p < 2^32, used for Barrett reduction
    barrett: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        FieldSpec::PrimeField(p).validate()?;
        let barrett = if p < (1 << 32) { u64::MAX / p } else { 0 };
        Ok(PrimeField { p, barrett })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    fn reduce_u64(&self, x: u64) -> u64 {
        let q = ((x as u128 * self.barrett as u128) >> 64) as u64;
        let mut r = x - q * self.p;
        while r >= self.p {
            r -= self.p;
        }
        r
    }

    #[inline]
    fn mulmod(&self, a: u64, b: u64) -> u64 {
        if self.barrett != 0 {
            self.reduce_u64(a * b)
        } else {
            ((a as u128 * b as u128) % self.p as u128) as u64
        }
    }

    pub fn element(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn spec(&self) -> FieldSpec {
        FieldSpec::PrimeField(self.p)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.p as i128) as u64
    }
    fn from_bigint(&self, v: &BigInt) -> u64 {
        let r = v.mod_floor(&BigInt::from(self.p));
        r.to_u64().expect("residue fits")
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.mulmod(*a, *b)
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        let (mut r0, mut r1) = (self.p as i128, *a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Some(s0.rem_euclid(self.p as i128) as u64)
    }
    #[inline]
    fn sub_mul_assign(&self, acc: &mut u64, a: &u64, b: &u64) {
        let prod = self.mulmod(*a, *b);
        *acc = self.sub(acc, &prod);
    }
    fn to_f64(&self, _a: &u64) -> Option<f64> {
        None
    }
    fn format(&self, a: &u64) -> String {
        a.to_string()
    }
    fn parse_scalar(&self, s: &str) -> Result<u64, FieldError> {
        let r = parse_rational(s).ok_or_else(|| FieldError::BadScalar(s.to_string()))?;
        let n = self.from_bigint(r.numer());
        let d = self.from_bigint(r.denom());
        self.div(&n, &d).ok_or_else(|| FieldError::BadScalar(s.to_string()))
    }
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, _bound: u64) -> u64 {
        rng.random_range(1..self.p)
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        r
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &BASES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Sign of a rational as -1, 0, 1.
pub fn rational_sign(a: &BigRational) -> i32 {
    match a.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn primality() {
        assert!(is_prime(9716633));
        assert!(is_prime(101));
        assert!(!is_prime(1));
        assert!(!is_prime(9716633 * 3));
        assert!(is_prime((1u64 << 61) - 1));
        assert!(PrimeField::new(100).is_err());
        assert!(PrimeField::new(1 << 62).is_err());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = PrimeField::new(9716633).unwrap();
        let a = f.from_i64(-5);
        assert_eq!(a, 9716628);
        let ia = f.inv(&a).unwrap();
        assert_eq!(f.mul(&a, &ia), 1);
        let big = PrimeField::new((1u64 << 61) - 1).unwrap();
        let x = big.from_i64(-3);
        assert_eq!(big.mul(&x, &big.inv(&x).unwrap()), 1);
        assert_eq!(f.parse_scalar("1/2").unwrap(), f.inv(&2).unwrap());
    }

    #[test]
    fn barrett_matches_u128() {
        let f = PrimeField::new(4294967291).unwrap();
        for (a, b) in [(4294967290u64, 4294967290u64), (123456789, 987654321), (0, 5)] {
            let want = ((a as u128 * b as u128) % 4294967291u128) as u64;
            assert_eq!(f.mul(&a, &b), want);
        }
    }

    #[test]
    fn rational_format_roundtrip() {
        let f = Rationals;
        for v in [q(3, 4), q(-7, 1), q(0, 1)] {
            assert_eq!(f.parse_scalar(&f.format(&v)).unwrap(), v);
        }
        assert_eq!(f.format(&q(6, -8)), "-3/4");
    }

    #[test]
    fn bareiss_rref_matches_plain_elimination() {
        let rows: Vec<Vec<BigRational>> = [[2, 4, -2, 6, 1], [1, 2, 0, 1, 3], [3, 6, -2, 7, 4], [0, 0, 5, -1, 2]]
            .iter()
            .map(|r| r.iter().map(|&x| q(x, 1)).collect())
            .collect();
        let (fast, pf) = Rationals.rref(rows.clone(), 5);
        let (slow, ps) = gauss_jordan(&Rationals, rows, 5, true);
        assert_eq!(pf, ps);
        assert_eq!(fast, slow);
    }

    #[test]
    fn normalize_rational_vector() {
        let mut v = vec![q(0, 1), q(-2, 3), q(4, 9)];
        Rationals.normalize_vector(&mut v);
        assert_eq!(v, vec![q(0, 1), q(3, 1), q(-2, 1)]);
    }
}
