//! Exact scalars `a + b·√d` with rational `a`, `b` and square-free `d`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{format_q, parse_q, Q};
use crate::error::ParseError;

/// Sign of an exact quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "+")]
    Plus,
}

impl Sign {
    pub fn of_q(q: &Q) -> Sign {
        if q.is_positive() {
            Sign::Plus
        } else if q.is_negative() {
            Sign::Minus
        } else {
            Sign::Zero
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Zero => '0',
            Sign::Plus => '+',
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// An element `a + b·√d` of ℚ(√d).
///
/// `d` is square-free or zero, and `b = 0` exactly when `d = 0`. Arithmetic
/// between elements of two different quadratic fields panics; use the
/// `checked_*` methods to get an error instead.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    pub a: Q,
    pub b: Q,
    pub d: u64,
}

/// Raised when two scalars live in different quadratic fields.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot combine elements of Q(sqrt {0}) and Q(sqrt {1})")]
pub struct MixedFieldError(pub u64, pub u64);

impl Scalar {
    pub fn new(a: Q, b: Q, d: u64) -> Scalar {
        let (k, d) = square_free_part(d);
        let b = b * Q::from_integer(BigInt::from(k));
        if d == 1 {
            return Scalar::rational(a + b);
        }
        if d == 0 || b.is_zero() {
            return Scalar::rational(a);
        }
        Scalar { a, b, d }
    }

    pub fn rational(a: Q) -> Scalar {
        Scalar {
            a,
            b: Q::zero(),
            d: 0,
        }
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::rational(Q::from_integer(n.into()))
    }

    pub fn frac(p: i64, q: i64) -> Scalar {
        Scalar::rational(Q::new(p.into(), q.into()))
    }

    /// `√d` for a non-negative integer `d`.
    pub fn sqrt(d: u64) -> Scalar {
        Scalar::new(Q::zero(), Q::one(), d)
    }

    pub fn zero() -> Scalar {
        Scalar::rational(Q::zero())
    }

    pub fn one() -> Scalar {
        Scalar::rational(Q::one())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Q> {
        if self.is_rational() {
            Some(&self.a)
        } else {
            None
        }
    }

    pub fn sign(&self) -> Sign {
        let sa = Sign::of_q(&self.a);
        let sb = Sign::of_q(&self.b);
        if sb == Sign::Zero {
            return sa;
        }
        if sa == Sign::Zero || sa == sb {
            return sb;
        }
        // a and b·√d have opposite signs: the larger square wins.
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * Q::from_integer(BigInt::from(self.d));
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Sign::Zero,
        }
    }

    fn field(&self, other: &Scalar) -> Result<u64, MixedFieldError> {
        match (self.d, other.d) {
            (0, d) | (d, 0) => Ok(d),
            (d, e) if d == e => Ok(d),
            (d, e) => Err(MixedFieldError(d, e)),
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, MixedFieldError> {
        let d = self.field(other)?;
        Ok(Scalar::new(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, MixedFieldError> {
        let d = self.field(other)?;
        Ok(Scalar::new(&self.a - &other.a, &self.b - &other.b, d))
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, MixedFieldError> {
        let d = self.field(other)?;
        let dq = Q::from_integer(BigInt::from(d));
        let a = &self.a * &other.a + &self.b * &other.b * dq;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Scalar::new(a, b, d))
    }

    /// Conjugate `a − b·√d`.
    pub fn conj(&self) -> Scalar {
        Scalar::new(self.a.clone(), -self.b.clone(), self.d)
    }

    /// Field norm `a² − b²d`.
    pub fn norm(&self) -> Q {
        &self.a * &self.a - &self.b * &self.b * Q::from_integer(BigInt::from(self.d))
    }

    pub fn recip(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        let c = self.conj();
        Some(Scalar::new(c.a / &n, c.b / &n, self.d))
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Option<Scalar>, MixedFieldError> {
        self.field(other)?;
        match other.recip() {
            Some(r) => self.checked_mul(&r).map(Some),
            None => Ok(None),
        }
    }

    pub fn mul_q(&self, q: &Q) -> Scalar {
        Scalar::new(&self.a * q, &self.b * q, self.d)
    }

    pub fn abs(&self) -> Scalar {
        if self.sign() == Sign::Minus {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Decimal approximation for display only.
    pub fn approx(&self) -> f64 {
        let f = |q: &Q| {
            let n: f64 = q.numer().to_string().parse().unwrap_or(f64::NAN);
            let d: f64 = q.denom().to_string().parse().unwrap_or(f64::NAN);
            n / d
        };
        f(&self.a) + f(&self.b) * (self.d as f64).sqrt()
    }
}

impl From<Q> for Scalar {
    fn from(q: Q) -> Scalar {
        Scalar::rational(q)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Scalar {
        Scalar::int(n)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Scalar) -> Option<Ordering> {
        self.checked_sub(other).ok().map(|s| match s.sign() {
            Sign::Minus => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        })
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs)
            .unwrap_or_else(|e| panic!("{e}"))
            .expect("division by zero scalar")
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", format_q(&self.a));
        }
        let b = if self.b.is_one() {
            String::new()
        } else if (-&self.b).is_one() {
            "-".to_string()
        } else {
            format!("{}*", format_q(&self.b))
        };
        if self.a.is_zero() {
            write!(f, "{b}sqrt({})", self.d)
        } else if self.b.is_positive() {
            write!(f, "{}+{b}sqrt({})", format_q(&self.a), self.d)
        } else {
            write!(f, "{}{b}sqrt({})", format_q(&self.a), self.d)
        }
    }
}

impl FromStr for Scalar {
    type Err = ParseError;

    /// Accepts sums of terms `p/q`, `sqrt(d)`, `sqrtd` and `c*sqrt(d)`,
    /// e.g. `1/2`, `-3`, `sqrt2`, `1-sqrt(2)`, `3/2*sqrt(5)+1`.
    fn from_str(s: &str) -> Result<Scalar, ParseError> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(ParseError::Scalar(s));
        }
        let bad = || ParseError::Scalar(s.clone());
        let mut terms = Vec::new();
        let mut start = 0;
        let mut depth = 0i32;
        for (i, ch) in s.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                '+' | '-' if depth == 0 && i > 0 => {
                    terms.push(&s[start..i]);
                    start = i;
                }
                _ => {}
            }
        }
        terms.push(&s[start..]);
        let mut acc = Scalar::zero();
        for term in terms {
            let (neg, body) = match term.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, term.strip_prefix('+').unwrap_or(term)),
            };
            let value = match body.find("sqrt") {
                None => Scalar::rational(parse_q(body).ok_or_else(bad)?),
                Some(pos) => {
                    let coeff = &body[..pos];
                    let coeff = match coeff.strip_suffix('*') {
                        Some(c) => parse_q(c).ok_or_else(bad)?,
                        None if coeff.is_empty() => Q::one(),
                        None => return Err(bad()),
                    };
                    let radicand = &body[pos + 4..];
                    let radicand = radicand
                        .strip_prefix('(')
                        .and_then(|r| r.strip_suffix(')'))
                        .unwrap_or(radicand);
                    let d: u64 = radicand.parse().map_err(|_| bad())?;
                    Scalar::sqrt(d).mul_q(&coeff)
                }
            };
            let value = if neg { -value } else { value };
            acc = acc.checked_add(&value).map_err(|_| bad())?;
        }
        Ok(acc)
    }
}

#[derive(Serialize, Deserialize)]
struct QuadraticRepr {
    a: String,
    b: String,
    d: u64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Text(String),
    Int(i64),
    Quadratic(QuadraticRepr),
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_rational() {
            s.serialize_str(&format_q(&self.a))
        } else {
            QuadraticRepr {
                a: format_q(&self.a),
                b: format_q(&self.b),
                d: self.d,
            }
            .serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        use serde::de::Error;
        match ScalarRepr::deserialize(d)? {
            ScalarRepr::Text(t) => t.parse().map_err(D::Error::custom),
            ScalarRepr::Int(n) => Ok(Scalar::int(n)),
            ScalarRepr::Quadratic(r) => {
                let a = parse_q(&r.a).ok_or_else(|| D::Error::custom("bad rational"))?;
                let b = parse_q(&r.b).ok_or_else(|| D::Error::custom("bad rational"))?;
                Ok(Scalar::new(a, b, r.d))
            }
        }
    }
}

/// Writes `d = k²·m` with `m` square-free; returns `(k, m)`.
///
/// Trial division runs to 10⁶; a remaining cofactor that is a perfect square
/// is folded in, anything else is treated as square-free.
pub fn square_free_part(d: u64) -> (u64, u64) {
    if d == 0 {
        return (1, 0);
    }
    let mut k = 1u64;
    let mut m = 1u64;
    let mut rest = d;
    let mut p = 2u64;
    while p * p <= rest && p <= 1_000_000 {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        k *= p.pow(e / 2);
        if e % 2 == 1 {
            m *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = integer_sqrt(rest);
    if r > 1 && r * r == rest {
        k *= r;
    } else {
        m *= rest;
    }
    (k, m)
}

fn integer_sqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// `√q` for a non-negative rational, as an element of ℚ(√d).
pub fn sqrt_q(q: &Q) -> Option<Scalar> {
    if q.is_negative() {
        return None;
    }
    // √(p/r) = √(p·r)/r
    let pr = q.numer() * q.denom();
    let pr: u64 = pr.try_into().ok()?;
    let (k, m) = square_free_part(pr);
    let coeff = Q::new(BigInt::from(k), q.denom().clone());
    Some(Scalar::new(Q::zero(), coeff, m))
}
