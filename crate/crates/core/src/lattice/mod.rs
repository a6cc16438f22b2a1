//! Exact arithmetic, lattice vectors and the LP/QP/eigenvalue kernels.

mod eig;
mod intlat;
mod lp;
mod matrix;
mod qp;
mod scalar;

use std::fmt;

use num::bigint::BigInt;
use num::{BigRational, Integer, One, Zero};
use serde::{Deserialize, Serialize};

pub use crate::error::LatticeError;
use crate::error::ParseError;

pub use eig::{gen_eig_bounds, simplest_between};
pub use intlat::{in_integer_span, integer_echelon};
pub use lp::{lp_feasible, strict_feasible, Feasibility};
pub use matrix::QMatrix;
pub use qp::{min_norm_qp, QpOutcome, QpSolution};
pub(crate) use qp::combinations as combinations_of;
pub use scalar::{sqrt_q, square_free_part, MixedFieldError, Scalar, Sign};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn qf(p: i64, r: i64) -> Q {
    Q::new(p.into(), r.into())
}

/// `p/q`, or `p` for integers.
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, r)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let r: BigInt = r.trim().parse().ok()?;
            if r.is_zero() {
                None
            } else {
                Some(Q::new(p, r))
            }
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub fn primitive(v: &[Q]) -> Vec<Q> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return vec![Q::zero(); v.len()];
    }
    ints.into_iter().map(|x| Q::from_integer(x / &g)).collect()
}

/// A point of `Y_T(𝕂)` in coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CocharVec {
    pub coords: Vec<Scalar>,
}

impl CocharVec {
    pub fn new(coords: Vec<Scalar>) -> CocharVec {
        CocharVec { coords }
    }

    pub fn ints(v: &[i64]) -> CocharVec {
        CocharVec::new(v.iter().map(|&x| Scalar::int(x)).collect())
    }

    pub fn rational(v: &[Q]) -> CocharVec {
        CocharVec::new(v.iter().cloned().map(Scalar::rational).collect())
    }

    pub fn zero(rank: usize) -> CocharVec {
        CocharVec::new(vec![Scalar::zero(); rank])
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coords.iter().all(Scalar::is_rational)
    }

    pub fn to_rational(&self) -> Option<Vec<Q>> {
        self.coords.iter().map(|c| c.as_rational().cloned()).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.coords
            .iter()
            .all(|c| c.as_rational().is_some_and(|x| x.is_integer()))
    }

    pub fn add(&self, other: &CocharVec) -> CocharVec {
        assert_eq!(self.len(), other.len(), "cocharacter length mismatch");
        CocharVec::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &CocharVec) -> CocharVec {
        assert_eq!(self.len(), other.len(), "cocharacter length mismatch");
        CocharVec::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: &Scalar) -> CocharVec {
        CocharVec::new(self.coords.iter().map(|c| c * s).collect())
    }

    pub fn neg(&self) -> CocharVec {
        CocharVec::new(self.coords.iter().map(|c| -c).collect())
    }

    /// Primitive integer multiple of a rational vector.
    pub fn primitive(&self) -> Option<CocharVec> {
        self.to_rational().map(|v| CocharVec::rational(&primitive(&v)))
    }
}

impl fmt::Display for CocharVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl std::str::FromStr for CocharVec {
    type Err = ParseError;

    /// Parses `(a,b,...)`, `[a,b,...]` or a bare comma-separated list.
    fn from_str(s: &str) -> Result<CocharVec, ParseError> {
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .or_else(|| t.strip_prefix('[').and_then(|x| x.strip_suffix(']')))
            .unwrap_or(t);
        if inner.trim().is_empty() {
            return Ok(CocharVec::new(vec![]));
        }
        let mut coords = Vec::new();
        let mut depth = 0;
        let mut start = 0;
        for (i, ch) in inner.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    coords.push(inner[start..i].parse().map_err(|_| ParseError::Vector(s.into()))?);
                    start = i + 1;
                }
                _ => {}
            }
        }
        coords.push(inner[start..].parse().map_err(|_| ParseError::Vector(s.into()))?);
        Ok(CocharVec::new(coords))
    }
}

/// A character: an integer covector on the cocharacter lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVec {
    pub coeffs: Vec<i64>,
}

impl WeightVec {
    pub fn new(coeffs: Vec<i64>) -> WeightVec {
        WeightVec { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn neg(&self) -> WeightVec {
        WeightVec::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn to_q(&self) -> Vec<Q> {
        self.coeffs.iter().map(|&c| q(c)).collect()
    }

    /// Primitive direction of the hyperplane `χ = 0`, up to sign.
    pub fn hyperplane(&self) -> Option<WeightVec> {
        let g = self.coeffs.iter().fold(0i64, |acc, &x| acc.gcd(&x));
        if g == 0 {
            return None;
        }
        let mut v: Vec<i64> = self.coeffs.iter().map(|x| x / g).collect();
        if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        Some(WeightVec::new(v))
    }
}

impl fmt::Display for WeightVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `⟨λ, χ⟩ = Σ λᵢχᵢ`.
pub fn pair(lambda: &CocharVec, chi: &WeightVec) -> Result<Scalar, LatticeError> {
    if lambda.len() != chi.len() {
        return Err(LatticeError::DimensionMismatch {
            expected: chi.len(),
            found: lambda.len(),
        });
    }
    let mut acc = Scalar::zero();
    for (l, &c) in lambda.coords.iter().zip(&chi.coeffs) {
        if c != 0 {
            acc = acc.checked_add(&l.mul_q(&q(c)))?;
        }
    }
    Ok(acc)
}

/// Pairing of a rational vector with a character.
pub fn pair_q(lambda: &[Q], chi: &WeightVec) -> Q {
    assert_eq!(lambda.len(), chi.len(), "pairing dimension mismatch");
    lambda
        .iter()
        .zip(&chi.coeffs)
        .filter(|(_, &c)| c != 0)
        .fold(Q::zero(), |acc, (l, &c)| acc + l * q(c))
}

/// Integer matrix `f_*: Y_T → Y_S` (target rank × source rank).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeMap {
    pub matrix: Vec<Vec<i64>>,
}

impl LatticeMap {
    pub fn new(matrix: Vec<Vec<i64>>) -> LatticeMap {
        LatticeMap { matrix }
    }

    pub fn identity(n: usize) -> LatticeMap {
        LatticeMap::new((0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.matrix.first().map_or(0, |r| r.len())
    }

    pub fn to_q(&self) -> QMatrix {
        let mut m = QMatrix::zeros(self.rows(), self.cols());
        for (i, r) in self.matrix.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                m[(i, j)] = q(x);
            }
        }
        m
    }

    pub fn apply(&self, v: &CocharVec) -> Result<CocharVec, LatticeError> {
        if v.len() != self.cols() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.cols(),
                found: v.len(),
            });
        }
        let mut out = Vec::with_capacity(self.rows());
        for r in &self.matrix {
            out.push(pair(v, &WeightVec::new(r.clone()))?);
        }
        Ok(CocharVec::new(out))
    }

    /// `fᵀχ`: the pullback of a character along `f`.
    pub fn pullback(&self, chi: &WeightVec) -> Result<WeightVec, LatticeError> {
        if chi.len() != self.rows() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.rows(),
                found: chi.len(),
            });
        }
        Ok(WeightVec::new(
            (0..self.cols())
                .map(|j| self.matrix.iter().zip(&chi.coeffs).map(|(r, c)| r[j] * c).sum())
                .collect(),
        ))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LatticeMap) -> LatticeMap {
        assert_eq!(self.cols(), other.rows(), "composition dimension mismatch");
        LatticeMap::new(
            self.matrix
                .iter()
                .map(|r| {
                    (0..other.cols())
                        .map(|j| r.iter().zip(&other.matrix).map(|(a, o)| a * o[j]).sum())
                        .collect()
                })
                .collect(),
        )
    }

    pub fn is_injective(&self) -> bool {
        self.to_q().rank() == self.cols()
    }

    pub fn det(&self) -> Q {
        self.to_q().det()
    }
}

/// A symmetric positive-definite rational form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct SPDForm {
    matrix: QMatrix,
}

impl SPDForm {
    pub fn new(matrix: QMatrix) -> Result<SPDForm, LatticeError> {
        if matrix.is_positive_definite() {
            Ok(SPDForm { matrix })
        } else {
            Err(LatticeError::NotPositiveDefinite)
        }
    }

    pub fn identity(n: usize) -> SPDForm {
        SPDForm {
            matrix: QMatrix::identity(n),
        }
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn scale(&self, s: &Q) -> Result<SPDForm, LatticeError> {
        SPDForm::new(self.matrix.scale(s))
    }

    /// `xᵀ·M·y`.
    pub fn eval(&self, x: &CocharVec, y: &CocharVec) -> Result<Scalar, LatticeError> {
        let n = self.dim();
        for v in [x, y] {
            if v.len() != n {
                return Err(LatticeError::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        let mut acc = Scalar::zero();
        for i in 0..n {
            if x.coords[i].is_zero() {
                continue;
            }
            let mut row = Scalar::zero();
            for j in 0..n {
                let m = &self.matrix[(i, j)];
                if !m.is_zero() {
                    row = row.checked_add(&y.coords[j].mul_q(m))?;
                }
            }
            acc = acc.checked_add(&x.coords[i].checked_mul(&row)?)?;
        }
        Ok(acc)
    }

    pub fn eval_q(&self, x: &[Q], y: &[Q]) -> Q {
        let my = self.matrix.mul_vec(y);
        x.iter().zip(&my).fold(Q::zero(), |a, (p, r)| a + p * r)
    }
}

impl<'de> Deserialize<'de> for SPDForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<SPDForm, D::Error> {
        use serde::de::Error;
        SPDForm::new(QMatrix::deserialize(d)?).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_examples() {
        let chi = WeightVec::new(vec![1, -1]);
        assert_eq!(pair(&CocharVec::ints(&[2, 1]), &chi).unwrap(), Scalar::int(1));
        assert_eq!(pair(&CocharVec::ints(&[0, 0]), &chi).unwrap(), Scalar::zero());
        let l: CocharVec = "(1,sqrt(2))".parse().unwrap();
        let v = pair(&l, &WeightVec::new(vec![2, -1])).unwrap();
        assert_eq!(v, "2-sqrt(2)".parse().unwrap());
        assert_eq!(v.sign(), Sign::Plus);
        assert!(pair(&l, &WeightVec::new(vec![1])).is_err());
    }

    #[test]
    fn primitive_vectors() {
        assert_eq!(primitive(&[qf(1, 2), qf(1, 3)]), vec![q(3), q(2)]);
        assert_eq!(primitive(&[q(4), q(-6)]), vec![q(2), q(-3)]);
        assert_eq!(primitive(&[q(0), q(0)]), vec![q(0), q(0)]);
    }

    #[test]
    fn lattice_maps() {
        let f = LatticeMap::new(vec![vec![1], vec![1]]);
        assert_eq!(f.apply(&CocharVec::ints(&[3])).unwrap(), CocharVec::ints(&[3, 3]));
        assert_eq!(f.pullback(&WeightVec::new(vec![1, -1])).unwrap(), WeightVec::new(vec![0]));
        assert!(f.is_injective());
        let g = LatticeMap::new(vec![vec![1, 1]]);
        assert!(!g.is_injective());
        assert_eq!(g.compose(&f), LatticeMap::new(vec![vec![2]]));
    }

    #[test]
    fn parse_vectors() {
        let v: CocharVec = "(1/2, 1/3)".parse().unwrap();
        assert_eq!(v, CocharVec::rational(&[qf(1, 2), qf(1, 3)]));
        let w: CocharVec = "[1, sqrt(2)-1]".parse().unwrap();
        assert_eq!(w.coords[1], "-1+sqrt(2)".parse().unwrap());
    }
}

/// Serde adaptor writing `Vec<Q>` as a list of `"p/q"` strings.
pub mod qser {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::{format_q, parse_q, Q};

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(format_q).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        use serde::de::Error;
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| parse_q(t).ok_or_else(|| D::Error::custom(format!("bad rational {t:?}"))))
            .collect()
    }

    /// The same for `Vec<Vec<Q>>`.
    pub mod nested {
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        use super::super::{format_q, parse_q, Q};

        pub fn serialize<S: Serializer>(v: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
            v.iter()
                .map(|r| r.iter().map(format_q).collect::<Vec<_>>())
                .collect::<Vec<_>>()
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Q>>, D::Error> {
            use serde::de::Error;
            Vec::<Vec<String>>::deserialize(d)?
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|t| parse_q(t).ok_or_else(|| D::Error::custom(format!("bad rational {t:?}"))))
                        .collect()
                })
                .collect()
        }
    }
}
