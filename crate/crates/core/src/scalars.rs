//! Exact arithmetic in multi-quadratic extensions `Q(sqrt d1, ..., sqrt dm)`.
//!
//! A [`Scalar`] is a finite sum `sum_l c_l * sqrt(l)` over square-free integer
//! labels `l` (label `1` is the rational part). Negative labels use the fixed
//! embedding `sqrt(d) = i * sqrt(|d|)`, so every product of radicals has a
//! well-defined sign.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of zero requested")]
    SqrtOfZero,
    #[error("scalar {0} is not rational")]
    NotRational(String),
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    // sorted by label, no zero coefficients
    terms: Vec<(i64, Rational)>,
}

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Largest `c` with `c^2 | n`, and the square-free cofactor. `n > 0`.
fn square_free_split(mut n: u64) -> (u64, u64) {
    let mut square = 1u64;
    let mut free = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            square *= p;
        }
        if e % 2 == 1 {
            free *= p;
        }
        p += 1;
    }
    (square, free * n)
}

/// Product of two square-free radicals: `sqrt(a) sqrt(b) = sign * g * sqrt(m)`.
fn mul_labels(a: i64, b: i64) -> (i64, i64) {
    if a == 1 {
        return (1, b);
    }
    if b == 1 {
        return (1, a);
    }
    let (ua, ub) = (a.unsigned_abs(), b.unsigned_abs());
    let g = ua.gcd(&ub);
    let m = (ua / g) * (ub / g);
    let g = g as i64;
    let m = m as i64;
    match (a < 0) as u8 + (b < 0) as u8 {
        0 => (g, m),
        1 => (g, -m),
        _ => (-g, m),
    }
}

/// Smallest "atom" (the sign `-1` or a prime) present in the label.
fn first_atom(label: i64) -> Option<i64> {
    if label < 0 {
        return Some(-1);
    }
    let n = label as u64;
    if n == 1 {
        return None;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return Some(p as i64);
        }
        p += 1;
    }
    Some(n as i64)
}

fn atom_divides(atom: i64, label: i64) -> bool {
    if atom == -1 {
        label < 0
    } else {
        label % atom == 0
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        Self::from_rational(rat(n, d))
    }

    pub fn from_rational(q: Rational) -> Self {
        if q.is_zero() {
            Self::zero()
        } else {
            Scalar { terms: vec![(1, q)] }
        }
    }

    /// `sqrt(-1)` under the fixed embedding.
    pub fn i() -> Self {
        Scalar { terms: vec![(-1, Rational::one())] }
    }

    fn from_terms(mut raw: Vec<(i64, Rational)>) -> Self {
        raw.sort_by_key(|a| a.0);
        let mut terms: Vec<(i64, Rational)> = Vec::with_capacity(raw.len());
        for (l, c) in raw {
            match terms.last_mut() {
                Some((pl, pc)) if *pl == l => *pc += c,
                _ => terms.push((l, c)),
            }
        }
        terms.retain(|(_, c)| !c.is_zero());
        Scalar { terms }
    }

    /// `sqrt(n)` reduced to `c * sqrt(m)` with `m` square-free.
    pub fn sqrt(n: i64) -> Result<Self, ScalarError> {
        if n == 0 {
            return Err(ScalarError::SqrtOfZero);
        }
        let (c, m) = square_free_split(n.unsigned_abs());
        let label = if n < 0 { -(m as i64) } else { m as i64 };
        Ok(Scalar { terms: vec![(label, rat_int(c as i64))] })
    }

    /// `sqrt(p/q) = sqrt(p q) / q`.
    pub fn sqrt_rational(q: &Rational) -> Result<Self, ScalarError> {
        if q.is_zero() {
            return Err(ScalarError::SqrtOfZero);
        }
        let num = q.numer() * q.denom();
        let num = num.to_i64().expect("radicand fits in i64");
        let den = q.denom().clone();
        let s = Self::sqrt(num)?;
        Ok(s * Scalar::from_rational(BigRational::new(BigInt::one(), den)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 1 && self.terms[0].1.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.iter().all(|(l, _)| *l == 1)
    }

    pub fn to_rational(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(1, c)] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn terms(&self) -> &[(i64, Rational)] {
        &self.terms
    }

    /// Re-normalizes the term list; the identity on canonical values.
    pub fn normalized(&self) -> Self {
        Self::from_terms(self.terms.clone())
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Scalar { terms: self.terms.iter().map(|(l, c)| (*l, c * q)).collect() }
    }

    fn conjugate_atom(&self, atom: i64) -> Self {
        Scalar {
            terms: self
                .terms
                .iter()
                .map(|(l, c)| if atom_divides(atom, *l) { (*l, -c.clone()) } else { (*l, c.clone()) })
                .collect(),
        }
    }

    /// Multiplicative inverse via repeated Galois conjugation: `x^{-1} = y (x y)^{-1}`
    /// where `y` flips one radical atom, so `x y` lives in a smaller field.
    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if let Some(q) = self.to_rational() {
            return Ok(Self::from_rational(q.recip()));
        }
        let atom = self.terms.iter().filter_map(|(l, _)| first_atom(*l)).min().expect("irrational scalar has an atom");
        let conj = self.conjugate_atom(atom);
        let norm = self * &conj;
        Ok(conj * norm.inv()?)
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Self, ScalarError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Stable ASCII rendering, e.g. `1/2+3*sqrt(2)-sqrt(-1)`.
    pub fn to_ascii(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (l, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k > 0 || neg {
                out.push(if neg { '-' } else { '+' });
            }
            if *l == 1 {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&format!("sqrt({l})"));
            } else {
                out.push_str(&format!("{a}*sqrt({l})"));
            }
        }
        out
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ascii())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", self.to_ascii())
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Structural order (labels then coefficients); only used for canonical sorting.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.terms.cmp(&other.terms)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::from_rational(q)
    }
}

fn add_terms(a: &[(i64, Rational)], b: &[(i64, Rational)], negate_b: bool) -> Vec<(i64, Rational)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            let c = if negate_b { -b[j].1.clone() } else { b[j].1.clone() };
            out.push((b[j].0, c));
            j += 1;
        } else {
            let c = if negate_b { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
            if !c.is_zero() {
                out.push((a[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar { terms: add_terms(&self.terms, &rhs.terms, false) }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar { terms: add_terms(&self.terms, &rhs.terms, true) }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if let [(1, q)] = rhs.terms.as_slice() {
            return self.scale(q);
        }
        if let [(1, q)] = self.terms.as_slice() {
            return rhs.scale(q);
        }
        let mut raw = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (la, ca) in &self.terms {
            for (lb, cb) in &rhs.terms {
                let (g, m) = mul_labels(*la, *lb);
                raw.push((m, ca * cb * rat_int(g)));
            }
        }
        Scalar::from_terms(raw)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { terms: self.terms.iter().map(|(l, c)| (*l, -c.clone())).collect() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(mut self) -> Scalar {
        for (_, c) in self.terms.iter_mut() {
            *c = -c.clone();
        }
        self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Panics on division by zero; use [`Scalar::checked_div`] to handle it.
impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        self.checked_div(&rhs).expect("division by zero scalar")
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero scalar")
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.terms = add_terms(&self.terms, &rhs.terms, false);
    }
}

impl AddAssign<Scalar> for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self += &rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.terms = add_terms(&self.terms, &rhs.terms, true);
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_reduces_square_factors() {
        assert_eq!(Scalar::sqrt(8).unwrap(), Scalar::from_int(2) * Scalar::sqrt(2).unwrap());
        assert_eq!(Scalar::sqrt(1).unwrap(), Scalar::one());
        assert_eq!(Scalar::sqrt(-4).unwrap(), Scalar::from_int(2) * Scalar::i());
        assert_eq!(Scalar::sqrt(0), Err(ScalarError::SqrtOfZero));
    }

    #[test]
    fn negative_radicals_follow_embedding() {
        let s = Scalar::sqrt(-2).unwrap();
        assert_eq!(&s * &s, Scalar::from_int(-2));
        let p = Scalar::sqrt(2).unwrap() * Scalar::sqrt(-2).unwrap();
        assert_eq!(p, Scalar::from_int(2) * Scalar::i());
        let q = Scalar::sqrt(-3).unwrap() * Scalar::sqrt(-6).unwrap();
        assert_eq!(q, Scalar::from_int(-3) * Scalar::sqrt(2).unwrap());
    }

    #[test]
    fn rational_arithmetic() {
        assert_eq!(Scalar::from_frac(1, 2) + Scalar::from_frac(1, 3), Scalar::from_frac(5, 6));
        assert!((Scalar::from_int(3) - Scalar::from_int(3)).is_zero());
    }

    #[test]
    fn inverse_of_one_plus_root_two() {
        let x = Scalar::one() + Scalar::sqrt(2).unwrap();
        let inv = x.inv().unwrap();
        assert_eq!(&inv * &x, Scalar::one());
        assert_eq!(inv, Scalar::from_int(-1) + Scalar::sqrt(2).unwrap());
    }

    #[test]
    fn inverse_in_triquadratic_field() {
        let x = Scalar::sqrt(2).unwrap()
            + Scalar::sqrt(-3).unwrap() * Scalar::from_int(5)
            + Scalar::sqrt(-1).unwrap()
            + Scalar::from_frac(7, 3);
        assert_eq!(x.inv().unwrap() * &x, Scalar::one());
    }

    #[test]
    fn division_by_zero_is_error() {
        assert_eq!(Scalar::one().checked_div(&Scalar::zero()), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn sqrt_of_rational() {
        let s = Scalar::sqrt_rational(&rat(1, 2)).unwrap();
        assert_eq!(&s * &s, Scalar::from_frac(1, 2));
        let s = Scalar::sqrt_rational(&rat(-8, 3)).unwrap();
        assert_eq!(&s * &s, Scalar::from_frac(-8, 3));
    }

    #[test]
    fn ascii_rendering() {
        let x = Scalar::from_frac(1, 2) + Scalar::sqrt(8).unwrap() - Scalar::i();
        assert_eq!(x.to_ascii(), "-sqrt(-1)+1/2+2*sqrt(2)");
    }
}
