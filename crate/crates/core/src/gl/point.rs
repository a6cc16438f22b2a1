//! Weighted flags, cocharacters and edifice points.

use std::cmp::Ordering;

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::group::BlockGroupSpec;
use super::subspace::Subspace;
use crate::error::GlError;
use crate::lattice::{format_q, parse_q, QMatrix, Q};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Level {
    pub weight: Q,
    /// `F_w`: the sum of all eigenspaces of weight `≥ w`.
    pub space: Subspace,
}

/// A filtration `0 ⊊ F₁ ⊊ … ⊊ F_k = ℚⁿ` with strictly decreasing weights.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FlagFile", into = "FlagFile")]
pub struct WeightedFlag {
    n: usize,
    levels: Vec<Level>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FlagFile {
    weights: Vec<String>,
    bases: Vec<QMatrix>,
}

impl TryFrom<FlagFile> for WeightedFlag {
    type Error = GlError;

    fn try_from(f: FlagFile) -> Result<WeightedFlag, GlError> {
        if f.weights.len() != f.bases.len() || f.bases.is_empty() {
            return Err(GlError::BadPoint("weights and bases differ in length".into()));
        }
        let n = f.bases[0].cols();
        let mut levels = Vec::new();
        for (w, b) in f.weights.iter().zip(&f.bases) {
            let weight = parse_q(w).ok_or_else(|| GlError::BadPoint(format!("bad weight {w:?}")))?;
            if b.cols() != n {
                return Err(GlError::BadPoint("bases of different widths".into()));
            }
            levels.push((weight, b.to_rows()));
        }
        WeightedFlag::new(n, levels)
    }
}

impl From<WeightedFlag> for FlagFile {
    fn from(f: WeightedFlag) -> FlagFile {
        FlagFile {
            weights: f.levels.iter().map(|l| format_q(&l.weight)).collect(),
            bases: f
                .levels
                .iter()
                .map(|l| QMatrix::from_rows(l.space.basis().to_vec()))
                .collect(),
        }
    }
}

impl WeightedFlag {
    /// Builds a flag from explicit levels, given as spanning sets of the
    /// partial-sum spaces `F_w` in any order.
    pub fn new(n: usize, mut levels: Vec<(Q, Vec<Vec<Q>>)>) -> Result<WeightedFlag, GlError> {
        if n == 0 {
            return Err(GlError::BadPoint("ambient dimension 0".into()));
        }
        levels.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<Level> = Vec::new();
        for (w, vecs) in levels {
            if vecs.iter().any(|v| v.len() != n) {
                return Err(GlError::BadPoint("vector of the wrong length".into()));
            }
            let space = Subspace::span(n, &vecs);
            if let Some(prev) = out.last() {
                if prev.weight == w {
                    return Err(GlError::BadPoint("repeated weight".into()));
                }
                if !space.contains_space(&prev.space) || space.dim() == prev.space.dim() {
                    return Err(GlError::BadPoint("levels are not strictly increasing".into()));
                }
            } else if space.dim() == 0 {
                return Err(GlError::BadPoint("empty first level".into()));
            }
            out.push(Level { weight: w, space });
        }
        match out.last() {
            Some(l) if l.space.dim() == n => Ok(WeightedFlag { n, levels: out }),
            _ => Err(GlError::BadPoint("last level is not the whole space".into())),
        }
    }

    /// The flag of a grading `ℚⁿ = ⊕ E_w`, given as `(w, spanning vectors)`.
    pub fn from_grading(n: usize, parts: &[(Q, Vec<Vec<Q>>)]) -> Result<WeightedFlag, GlError> {
        let mut parts: Vec<(Q, Vec<Vec<Q>>)> = parts.to_vec();
        parts.sort_by(|a, b| b.0.cmp(&a.0));
        let mut merged: Vec<(Q, Vec<Vec<Q>>)> = Vec::new();
        for (w, v) in parts {
            match merged.last_mut() {
                Some((lw, lv)) if *lw == w => lv.extend(v),
                _ => merged.push((w, v)),
            }
        }
        let total: usize = merged.iter().map(|(_, v)| Subspace::span(n, v).dim()).sum();
        if total != n {
            return Err(GlError::BadPoint("graded pieces do not form a direct sum of ℚⁿ".into()));
        }
        let mut acc: Vec<Vec<Q>> = Vec::new();
        let mut levels = Vec::new();
        for (w, v) in merged {
            if Subspace::span(n, &v).dim() == 0 {
                continue;
            }
            acc.extend(v);
            levels.push((w, acc.clone()));
        }
        let flag = WeightedFlag::new(n, levels)?;
        if flag.levels.last().map(|l| l.space.dim()) != Some(n) {
            return Err(GlError::BadPoint("graded pieces are dependent".into()));
        }
        Ok(flag)
    }

    /// The flag of `S·diag(μ)·S⁻¹`.
    pub fn from_basis(s: &QMatrix, mu: &[Q]) -> Result<WeightedFlag, GlError> {
        let n = s.rows();
        if s.cols() != n || mu.len() != n {
            return Err(GlError::Shape {
                rows: s.rows(),
                cols: s.cols(),
                n: mu.len(),
            });
        }
        if s.det().is_zero() {
            return Err(GlError::Singular);
        }
        let parts: Vec<(Q, Vec<Vec<Q>>)> = (0..n).map(|j| (mu[j].clone(), vec![s.col(j)])).collect();
        WeightedFlag::from_grading(n, &parts)
    }

    pub fn zero(n: usize) -> WeightedFlag {
        WeightedFlag {
            n,
            levels: vec![Level {
                weight: Q::zero(),
                space: Subspace::full(n),
            }],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn weights(&self) -> Vec<Q> {
        self.levels.iter().map(|l| l.weight.clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.levels.len() == 1 && self.levels[0].weight.is_zero()
    }

    /// `dim F_i − dim F_{i−1}` per level.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut prev = 0;
        self.levels
            .iter()
            .map(|l| {
                let m = l.space.dim() - prev;
                prev = l.space.dim();
                m
            })
            .collect()
    }

    /// The weight vector sorted decreasingly with multiplicity; the type of
    /// the point.
    pub fn type_vector(&self) -> Vec<Q> {
        self.levels
            .iter()
            .zip(self.multiplicities())
            .flat_map(|(l, m)| std::iter::repeat(l.weight.clone()).take(m))
            .collect()
    }

    /// Index of the smallest level containing `v`.
    pub fn level_of(&self, v: &[Q]) -> usize {
        self.levels
            .iter()
            .position(|l| l.space.contains(v))
            .expect("the last level is everything")
    }

    /// `g·F`, weights unchanged.
    pub fn image(&self, g: &QMatrix) -> WeightedFlag {
        WeightedFlag {
            n: self.n,
            levels: self
                .levels
                .iter()
                .map(|l| Level {
                    weight: l.weight.clone(),
                    space: l.space.image(g),
                })
                .collect(),
        }
    }

    /// Multiplies every weight by `a > 0`.
    pub fn scale(&self, a: &Q) -> Result<WeightedFlag, GlError> {
        if !a.is_positive() {
            return Err(GlError::BadParameter);
        }
        Ok(WeightedFlag {
            n: self.n,
            levels: self
                .levels
                .iter()
                .map(|l| Level {
                    weight: &l.weight * a,
                    space: l.space.clone(),
                })
                .collect(),
        })
    }

    /// Weights of the columns of `S` if `S` splits the flag, else `None`.
    pub fn coords_in(&self, s: &QMatrix) -> Option<Vec<Q>> {
        if s.rows() != self.n || s.cols() != self.n {
            return None;
        }
        let mu: Vec<Q> = (0..self.n)
            .map(|j| self.levels[self.level_of(&s.col(j))].weight.clone())
            .collect();
        match WeightedFlag::from_basis(s, &mu) {
            Ok(f) if f == *self => Some(mu),
            _ => None,
        }
    }

    /// The unweighted subspaces.
    pub fn spaces(&self) -> Vec<Subspace> {
        self.levels.iter().map(|l| l.space.clone()).collect()
    }
}

/// `g·λ₀` for the diagonal cocharacter `λ₀ = diag(a^{w₁}, …, a^{wₙ})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CocharFile", into = "CocharFile")]
pub struct Cocharacter {
    conjugator: QMatrix,
    weights: Vec<Q>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CocharFile {
    conjugator: QMatrix,
    weights: Vec<String>,
}

impl TryFrom<CocharFile> for Cocharacter {
    type Error = GlError;

    fn try_from(f: CocharFile) -> Result<Cocharacter, GlError> {
        let w = f
            .weights
            .iter()
            .map(|s| parse_q(s).ok_or_else(|| GlError::BadPoint(format!("bad weight {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Cocharacter::new(f.conjugator, w)
    }
}

impl From<Cocharacter> for CocharFile {
    fn from(c: Cocharacter) -> CocharFile {
        CocharFile {
            conjugator: c.conjugator,
            weights: c.weights.iter().map(format_q).collect(),
        }
    }
}

impl Cocharacter {
    pub fn new(conjugator: QMatrix, weights: Vec<Q>) -> Result<Cocharacter, GlError> {
        let n = weights.len();
        if conjugator.rows() != n || conjugator.cols() != n {
            return Err(GlError::Shape {
                rows: conjugator.rows(),
                cols: conjugator.cols(),
                n,
            });
        }
        if conjugator.det().is_zero() {
            return Err(GlError::Singular);
        }
        Ok(Cocharacter { conjugator, weights })
    }

    pub fn diagonal(weights: Vec<Q>) -> Cocharacter {
        let n = weights.len();
        Cocharacter {
            conjugator: QMatrix::identity(n),
            weights,
        }
    }

    pub fn conjugator(&self) -> &QMatrix {
        &self.conjugator
    }

    pub fn weights(&self) -> &[Q] {
        &self.weights
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn flag(&self) -> WeightedFlag {
        WeightedFlag::from_basis(&self.conjugator, &self.weights).expect("conjugator is invertible")
    }

    pub fn neg(&self) -> Cocharacter {
        Cocharacter {
            conjugator: self.conjugator.clone(),
            weights: self.weights.iter().map(|w| -w).collect(),
        }
    }

    /// `g·λ`.
    pub fn conjugate(&self, g: &QMatrix) -> Result<Cocharacter, GlError> {
        Cocharacter::new(g * &self.conjugator, self.weights.clone())
    }

    /// Eigenspaces by decreasing weight.
    pub fn grading(&self) -> Vec<(Q, Subspace)> {
        let n = self.n();
        let mut ws: Vec<Q> = self.weights.clone();
        ws.sort_by(|a, b| b.cmp(a));
        ws.dedup();
        ws.into_iter()
            .map(|w| {
                let cols: Vec<Vec<Q>> = (0..n)
                    .filter(|&j| self.weights[j] == w)
                    .map(|j| self.conjugator.col(j))
                    .collect();
                (w, Subspace::span(n, &cols))
            })
            .collect()
    }

    /// Equality as homomorphisms (same eigenspaces and weights).
    pub fn same_as(&self, other: &Cocharacter) -> bool {
        self.grading() == other.grading()
    }

    /// Canonical representative: eigenbasis in echelon form, weights
    /// decreasing.
    pub fn canonical(&self) -> Cocharacter {
        let mut cols = Vec::new();
        let mut weights = Vec::new();
        for (w, e) in self.grading() {
            for b in e.basis() {
                cols.push(b.clone());
                weights.push(w.clone());
            }
        }
        Cocharacter {
            conjugator: QMatrix::from_cols(&cols),
            weights,
        }
    }

    /// `S⁻¹·g·S` for the eigenbasis `S`, with its columns sorted by
    /// decreasing weight; returns the permuted basis and weights too.
    pub(crate) fn sorted_basis(&self) -> (QMatrix, Vec<Q>) {
        let n = self.n();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| match self.weights[b].cmp(&self.weights[a]) {
            Ordering::Equal => a.cmp(&b),
            o => o,
        });
        let cols: Vec<Vec<Q>> = idx.iter().map(|&j| self.conjugator.col(j)).collect();
        let w = idx.iter().map(|&j| self.weights[j].clone()).collect();
        (QMatrix::from_cols(&cols), w)
    }
}

/// A point of `V_H(ℚ)`: a weighted flag of `ℚⁿ` that is the flag of some
/// cocharacter of `H`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdificePoint {
    #[serde(skip)]
    group: BlockGroupSpec,
    #[serde(flatten)]
    flag: WeightedFlag,
}

impl EdificePoint {
    /// Checks that the flag comes from a cocharacter of `H`.
    pub fn new(group: &BlockGroupSpec, flag: WeightedFlag) -> Result<EdificePoint, GlError> {
        if flag.n() != group.n() {
            return Err(GlError::BadPoint(format!(
                "flag in dimension {} for a group in GL{}",
                flag.n(),
                group.n()
            )));
        }
        if super::apartment::is_point_of(group, &flag)?.is_none() {
            return Err(GlError::PointNotInGroup(group.name().to_string()));
        }
        Ok(EdificePoint {
            group: group.clone(),
            flag,
        })
    }

    pub(crate) fn unchecked(group: &BlockGroupSpec, flag: WeightedFlag) -> EdificePoint {
        EdificePoint {
            group: group.clone(),
            flag,
        }
    }

    pub fn zero(group: &BlockGroupSpec) -> EdificePoint {
        EdificePoint::unchecked(group, WeightedFlag::zero(group.n()))
    }

    pub fn group(&self) -> &BlockGroupSpec {
        &self.group
    }

    pub fn flag(&self) -> &WeightedFlag {
        &self.flag
    }

    pub fn is_zero(&self) -> bool {
        self.flag.is_zero()
    }

    /// `a·x` for `a > 0`.
    pub fn scale(&self, a: &Q) -> Result<EdificePoint, GlError> {
        Ok(EdificePoint::unchecked(&self.group, self.flag.scale(a)?))
    }
}

/// `φ_H(λ)`.
pub fn point_from_cochar(h: &BlockGroupSpec, c: &Cocharacter) -> Result<EdificePoint, GlError> {
    if c.n() != h.n() {
        return Err(GlError::Shape {
            rows: c.n(),
            cols: c.n(),
            n: h.n(),
        });
    }
    if !h.contains_cocharacter(&c.conjugator, &c.weights) {
        return Err(GlError::CocharNotInGroup(h.name().to_string()));
    }
    Ok(EdificePoint::unchecked(h, c.flag()))
}

fn same_group(x: &EdificePoint, y: &EdificePoint) -> Result<(), GlError> {
    if x.group != y.group {
        return Err(GlError::GroupMismatch(
            x.group.name().to_string(),
            y.group.name().to_string(),
        ));
    }
    Ok(())
}

pub(crate) fn check_same_group(x: &EdificePoint, y: &EdificePoint) -> Result<(), GlError> {
    same_group(x, y)
}

/// `x ≈ y` in `V_H`. The inclusion `V_H → V_{GL_n}` is injective, so the
/// weighted flags decide.
pub fn equal_points(x: &EdificePoint, y: &EdificePoint) -> Result<bool, GlError> {
    same_group(x, y)?;
    Ok(x.flag == y.flag)
}

/// `g·x` for `g ∈ H`.
pub fn act(g: &QMatrix, x: &EdificePoint) -> Result<EdificePoint, GlError> {
    x.group.require(g)?;
    Ok(EdificePoint::unchecked(&x.group, x.flag.image(g)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gl::subspace::unit;
    use crate::lattice::q;

    #[test]
    fn diagonal_flag() {
        let c = Cocharacter::diagonal(vec![q(1), q(-1)]);
        let f = c.flag();
        assert_eq!(f.weights(), vec![q(1), q(-1)]);
        assert_eq!(f.levels()[0].space, Subspace::span(2, &[unit(2, 0)]));
        assert_eq!(f.multiplicities(), vec![1, 1]);
    }

    #[test]
    fn conjugated_flag_differs() {
        let u = QMatrix::from_i64(&[vec![1, 1], vec![0, 1]]);
        let c = Cocharacter::new(u, vec![q(-1), q(1)]).unwrap();
        let f = c.flag();
        assert_eq!(f.levels()[0].space, Subspace::span(2, &[vec![q(1), q(1)]]));
        assert_ne!(f, Cocharacter::diagonal(vec![q(-1), q(1)]).flag());
    }

    #[test]
    fn serde_round_trip() {
        let c = Cocharacter::new(QMatrix::from_i64(&[vec![1, 2], vec![0, 1]]), vec![q(3), q(-1)]).unwrap();
        let f = c.flag();
        let s = serde_json::to_string(&f).unwrap();
        let g: WeightedFlag = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        let s = serde_json::to_string(&c).unwrap();
        let d: Cocharacter = serde_json::from_str(&s).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn malformed_flags() {
        let e = |i| unit(2, i);
        assert!(WeightedFlag::new(2, vec![(q(1), vec![e(0)])]).is_err());
        assert!(WeightedFlag::new(2, vec![(q(1), vec![e(0)]), (q(0), vec![e(1)])]).is_err());
        assert!(WeightedFlag::new(2, vec![(q(1), vec![e(0)]), (q(0), vec![e(0), e(1)])]).is_ok());
    }
}
