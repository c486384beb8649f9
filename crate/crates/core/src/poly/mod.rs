//! Sparse multivariate polynomials over an exact field, plus weighted monomial orders.

mod parse;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use smallvec::SmallVec;
use thiserror::Error;

use crate::field::Field;

pub use parse::parse_polynomial;

/// Exponent type. Degrees beyond `u16::MAX` are rejected at construction.
pub type Exp = u16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown variable '{name}' at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("exponent at position {pos} is not a natural number below 65536")]
    BadExponent { pos: usize },
    #[error("polynomials live in different rings")]
    RingMismatch,
    #[error("the zero polynomial has no leading term")]
    ZeroPolynomial,
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("exponent overflow")]
    Overflow,
}

/// Exponent vector of a monomial.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Exponents(SmallVec<[Exp; 12]>);

impl Exponents {
    pub fn zero(n: usize) -> Self {
        Exponents(SmallVec::from_elem(0, n))
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = Self::zero(n);
        e.0[i] = 1;
        e
    }

    pub fn from_slice(s: &[Exp]) -> Self {
        Exponents(SmallVec::from_slice(s))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Exp] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&x| x as u32).sum()
    }

    pub fn checked_add(&self, other: &Exponents) -> Option<Exponents> {
        debug_assert_eq!(self.len(), other.len());
        let mut out = SmallVec::with_capacity(self.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_add(*b)?);
        }
        Some(Exponents(out))
    }

    /// Sum of exponents. Panics on overflow.
    pub fn add(&self, other: &Exponents) -> Exponents {
        self.checked_add(other).expect("exponent overflow")
    }

    pub fn scaled(&self, k: u32) -> Option<Exponents> {
        let mut out = SmallVec::with_capacity(self.len());
        for &a in &self.0 {
            out.push(Exp::try_from(a as u32 * k).ok()?);
        }
        Some(Exponents(out))
    }

    /// Graded-lex comparison: total degree first, then lexicographic.
    pub fn grlex_cmp(&self, other: &Exponents) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl std::ops::Index<usize> for Exponents {
    type Output = Exp;
    fn index(&self, i: usize) -> &Exp {
        &self.0[i]
    }
}

impl From<Vec<Exp>> for Exponents {
    fn from(v: Vec<Exp>) -> Self {
        Exponents(SmallVec::from_vec(v))
    }
}

/// Weighted order with grlex tie-break.
///
/// The *leading* monomial of a polynomial is the one with the smallest
/// weight `w . a`; ties go to the larger monomial in graded-lex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightOrder {
    omega: Vec<i64>,
}

impl WeightOrder {
    pub fn new(omega: Vec<i64>) -> Self {
        WeightOrder { omega }
    }

    pub fn omega(&self) -> &[i64] {
        &self.omega
    }

    pub fn nvars(&self) -> usize {
        self.omega.len()
    }

    pub fn weight(&self, e: &Exponents) -> i64 {
        self.omega.iter().zip(e.as_slice()).map(|(w, &a)| w * a as i64).sum()
    }

    pub fn key(&self, e: &Exponents) -> OrderKey {
        OrderKey { weight: self.weight(e), degree: e.degree(), exps: e.clone() }
    }

    /// `Less` when `a` comes before `b`, i.e. `a` is more leading.
    pub fn cmp(&self, a: &Exponents, b: &Exponents) -> Ordering {
        self.key(a).cmp(&self.key(b))
    }
}

/// Sort key realising a [`WeightOrder`]: the leading monomial is the minimum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderKey {
    pub weight: i64,
    pub degree: u32,
    pub exps: Exponents,
}

impl Ord for OrderKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .cmp(&other.weight)
            .then_with(|| other.degree.cmp(&self.degree))
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for OrderKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A sparse polynomial in named variables over the field `F`.
#[derive(Clone, Debug)]
pub struct MultiPoly<F: Field> {
    field: F,
    vars: Arc<[String]>,
    terms: BTreeMap<Exponents, F::Elem>,
}

impl<F: Field> PartialEq for MultiPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.vars == other.vars && self.terms == other.terms
    }
}

#[allow(clippy::len_without_is_empty)]
impl<F: Field> MultiPoly<F> {
    pub fn zero(field: F, vars: Arc<[String]>) -> Self {
        MultiPoly { field, vars, terms: BTreeMap::new() }
    }

    pub fn constant(field: F, vars: Arc<[String]>, c: F::Elem) -> Self {
        let mut p = Self::zero(field, vars);
        if !p.field.is_zero(&c) {
            p.terms.insert(Exponents::zero(p.vars.len()), c);
        }
        p
    }

    pub fn one(field: F, vars: Arc<[String]>) -> Self {
        let one = field.one();
        Self::constant(field, vars, one)
    }

    pub fn var(field: F, vars: Arc<[String]>, i: usize) -> Self {
        let n = vars.len();
        let mut p = Self::zero(field, vars);
        p.terms.insert(Exponents::unit(n, i), p.field.one());
        p
    }

    /// Build from terms; duplicate exponents are summed and zeros dropped.
    pub fn from_terms(
        field: F,
        vars: Arc<[String]>,
        terms: impl IntoIterator<Item = (Exponents, F::Elem)>,
    ) -> Result<Self, PolyError> {
        let mut p = Self::zero(field, vars);
        for (e, c) in terms {
            if e.len() != p.vars.len() {
                return Err(PolyError::LengthMismatch { expected: p.vars.len(), got: e.len() });
            }
            p.add_term(e, &c);
        }
        Ok(p)
    }

    /// Convenience ring with variables `t1..tn`.
    pub fn ring_vars(n: usize) -> Arc<[String]> {
        (1..=n).map(|i| format!("t{i}")).collect::<Vec<_>>().into()
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &F::Elem)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponents) -> Option<&F::Elem> {
        self.terms.get(e)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.degree()).max()
    }

    pub fn same_ring(&self, other: &Self) -> bool {
        self.field == other.field && (Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars)
    }

    fn add_term(&mut self, e: Exponents, c: &F::Elem) {
        if self.field.is_zero(c) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                let s = self.field.add(o.get(), c);
                if self.field.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        if !self.same_ring(other) {
            return Err(PolyError::RingMismatch);
        }
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        if !self.same_ring(other) {
            return Err(PolyError::RingMismatch);
        }
        let mut out = Self::zero(self.field.clone(), self.vars.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.checked_add(eb).ok_or(PolyError::Overflow)?;
                out.add_term(e, &self.field.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let mut out = Self::zero(self.field.clone(), self.vars.clone());
        if self.field.is_zero(c) {
            return out;
        }
        out.terms = self.terms.iter().map(|(e, x)| (e.clone(), self.field.mul(x, c))).collect();
        out
    }

    fn neg_ref(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = self.field.neg(c);
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Result<Self, PolyError> {
        let mut base = self.clone();
        let mut acc = Self::one(self.field.clone(), self.vars.clone());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Exponent of the leading term under `order`.
    pub fn leading_exponent(&self, order: &WeightOrder) -> Result<Exponents, PolyError> {
        self.leading_term(order).map(|(e, _)| e.clone())
    }

    pub fn leading_term(&self, order: &WeightOrder) -> Result<(&Exponents, &F::Elem), PolyError> {
        self.terms.iter().min_by(|a, b| order.cmp(a.0, b.0)).ok_or(PolyError::ZeroPolynomial)
    }

    /// Terms sorted so that the leading term under `order` comes first.
    pub fn ordered_terms(&self, order: &WeightOrder) -> Vec<(OrderKey, F::Elem)> {
        let mut v: Vec<_> = self.terms.iter().map(|(e, c)| (order.key(e), c.clone())).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn evaluate(&self, point: &[F::Elem]) -> Result<F::Elem, PolyError> {
        if point.len() != self.nvars() {
            return Err(PolyError::LengthMismatch { expected: self.nvars(), got: point.len() });
        }
        let f = &self.field;
        let mut acc = f.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e.as_slice()) {
                if k > 0 {
                    t = f.mul(&t, &f.pow(x, k as u64));
                }
            }
            f.add_assign(&mut acc, &t);
        }
        Ok(acc)
    }

    /// Floating-point evaluation at a complex point; `None` over prime fields.
    pub fn evaluate_complex(&self, point: &[Complex64]) -> Option<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = Complex64::new(self.field.to_f64(c)?, 0.0);
            for (x, &k) in point.iter().zip(e.as_slice()) {
                if k > 0 {
                    t *= x.powu(k as u32);
                }
            }
            acc += t;
        }
        Some(acc)
    }

    /// Parse text in the variables `vars`.
    pub fn parse(field: F, vars: Arc<[String]>, text: &str) -> Result<Self, PolyError> {
        parse_polynomial(field, vars, text)
    }
}

impl<F: Field> fmt::Display for MultiPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let mut s = self.field.format(c);
            let negative = s.starts_with('-');
            if negative {
                s.remove(0);
            }
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            first = false;
            let mono: Vec<String> = e
                .as_slice()
                .iter()
                .zip(self.vars.iter())
                .filter(|(&k, _)| k > 0)
                .map(|(&k, v)| if k == 1 { v.clone() } else { format!("{v}^{k}") })
                .collect();
            if mono.is_empty() {
                write!(f, "{s}")?;
            } else if s == "1" {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{s}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<F: Field> $tr<&MultiPoly<F>> for &MultiPoly<F> {
            type Output = MultiPoly<F>;
            fn $method(self, rhs: &MultiPoly<F>) -> MultiPoly<F> {
                self.$checked(rhs).expect("polynomial ring mismatch")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl<F: Field> Neg for &MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn neg(self) -> MultiPoly<F> {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn ring(n: usize) -> Arc<[String]> {
        MultiPoly::<Rationals>::ring_vars(n)
    }

    fn p(s: &str) -> MultiPoly<Rationals> {
        MultiPoly::parse(Rationals, ring(2), s).unwrap()
    }

    #[test]
    fn arithmetic_and_display() {
        let a = p("t1 + t2");
        let b = p("t1 - t2");
        assert_eq!(&a * &b, p("t1^2 - t2^2"));
        assert_eq!((&a + &b).to_string(), "2*t1");
        assert_eq!(p("-3 + t1^2*t2 - t2").to_string(), "t1^2*t2 - t2 - 3");
        assert_eq!(a.pow(3).unwrap(), &(&a * &a) * &a);
    }

    #[test]
    fn leading_terms_follow_weight_then_grlex() {
        let ord = WeightOrder::new(vec![0, -1]);
        let f = p("t1*(t1^2 + t2^2)");
        assert_eq!(f.leading_exponent(&ord).unwrap().as_slice(), &[1, 2]);
        let ord = WeightOrder::new(vec![-2, -1]);
        assert_eq!(p("t1 - t2").leading_exponent(&ord).unwrap().as_slice(), &[1, 0]);
        assert_eq!(p("t1*t2 - t2").leading_exponent(&ord).unwrap().as_slice(), &[1, 1]);
        // pure grlex when all weights vanish
        let ord = WeightOrder::new(vec![0, 0]);
        assert_eq!(p("t2^2 + t1*t2 + t1").leading_exponent(&ord).unwrap().as_slice(), &[1, 1]);
    }

    #[test]
    fn evaluate_over_prime_field() {
        let f = PrimeField::new(101).unwrap();
        let q = MultiPoly::parse(f, ring(2), "t1^2*t2 - 7").unwrap();
        assert_eq!(q.evaluate(&[3, 5]).unwrap(), 38);
        assert!(q.evaluate(&[1]).is_err());
    }

    #[test]
    fn ring_mismatch_is_reported() {
        let a = p("t1");
        let b = MultiPoly::parse(Rationals, ring(3), "t3").unwrap();
        assert_eq!(a.checked_add(&b), Err(PolyError::RingMismatch));
    }
}
