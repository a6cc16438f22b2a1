//! One apartment of a split group, presented combinatorially by the weights
//! of an equivariant embedding and the Weyl group action.

mod fan;
mod poset;

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use num::bigint::BigInt;
use num::Signed;
use serde::{Deserialize, Serialize};

use crate::error::ApartmentError;
use crate::lattice::{
    in_integer_span, pair, strict_feasible, CocharVec, Feasibility, LatticeError, LatticeMap, QMatrix, Scalar,
    Sign, WeightVec,
};

pub use fan::{enumerate_fan, enumerate_fan_with, ConeFan, FanCell, FanOptions};
pub use poset::{parabolic_poset, simplicial_witness, ApartmentPoset, PosetNode};

pub const DEFAULT_WEYL_BOUND: usize = 10080;

/// A split group presented by one apartment.
///
/// Weyl generators act on cocharacters by `λ ↦ Wλ` and on characters by
/// `χ ↦ W⁻ᵀχ`, so pairings are preserved.
#[derive(Debug, Clone)]
pub struct ApartmentData {
    name: String,
    rank: usize,
    weights: Vec<WeightVec>,
    weyl_gens: Vec<LatticeMap>,
    roots: Option<Vec<usize>>,
    labels: BTreeMap<String, Vec<usize>>,
    weyl_group: Vec<LatticeMap>,
    warnings: Vec<String>,
}

impl ApartmentData {
    pub fn new(
        name: impl Into<String>,
        rank: usize,
        weights: Vec<WeightVec>,
        weyl_gens: Vec<LatticeMap>,
        roots: Option<Vec<usize>>,
    ) -> Result<ApartmentData, ApartmentError> {
        ApartmentData::with_bound(name, rank, weights, weyl_gens, roots, DEFAULT_WEYL_BOUND)
    }

    pub fn with_bound(
        name: impl Into<String>,
        rank: usize,
        weights: Vec<WeightVec>,
        weyl_gens: Vec<LatticeMap>,
        roots: Option<Vec<usize>>,
        bound: usize,
    ) -> Result<ApartmentData, ApartmentError> {
        for w in &weights {
            if w.len() != rank {
                return Err(LatticeError::DimensionMismatch {
                    expected: rank,
                    found: w.len(),
                }
                .into());
            }
        }
        let mut warnings = Vec::new();
        if let Some(rs) = &roots {
            for &i in rs {
                if i >= weights.len() {
                    return Err(ApartmentError::BadRootIndex(i));
                }
                if !weights.contains(&weights[i].neg()) {
                    warnings.push(format!("root {} has no negative in the weight list", weights[i]));
                }
            }
        }
        let mut sorted = weights.clone();
        sorted.sort();
        for (k, g) in weyl_gens.iter().enumerate() {
            if g.rows() != rank || g.cols() != rank || g.det().abs() != num::One::one() {
                return Err(ApartmentError::BadWeylGenerator(k));
            }
            let mut image: Vec<WeightVec> = weights
                .iter()
                .map(|w| g.pullback(w))
                .collect::<Result<_, _>>()?;
            image.sort();
            if image != sorted {
                return Err(ApartmentError::WeylNotPermuting(k));
            }
        }
        let weyl_group = weyl_closure(rank, &weyl_gens, bound)?;
        Ok(ApartmentData {
            name: name.into(),
            rank,
            weights,
            weyl_gens,
            roots,
            labels: BTreeMap::new(),
            weyl_group,
            warnings,
        })
    }

    /// Attaches display names to parabolic classes, keyed by their `geq0` sets.
    pub fn with_labels(mut self, labels: BTreeMap<String, Vec<usize>>) -> ApartmentData {
        self.labels = labels
            .into_iter()
            .map(|(k, mut v)| {
                v.sort_unstable();
                v.dedup();
                (k, v)
            })
            .collect();
        self
    }

    /// The rank-0 datum with no weights.
    pub fn trivial() -> ApartmentData {
        ApartmentData::new("trivial", 0, vec![], vec![], None).expect("trivial datum")
    }

    /// A split torus of the given rank acting trivially on its embedding.
    pub fn torus(rank: usize) -> ApartmentData {
        ApartmentData::new(
            format!("torus{rank}"),
            rank,
            vec![WeightVec::new(vec![0; rank])],
            vec![],
            None,
        )
        .expect("torus datum")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weights(&self) -> &[WeightVec] {
        &self.weights
    }

    pub fn weyl_gens(&self) -> &[LatticeMap] {
        &self.weyl_gens
    }

    pub fn roots(&self) -> Option<&[usize]> {
        self.roots.as_deref()
    }

    pub fn labels(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.labels
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn weyl_group(&self) -> &[LatticeMap] {
        &self.weyl_group
    }

    /// Label of the parabolic class with this `geq0` set, if one was supplied.
    pub fn label_of(&self, geq0: &[usize]) -> Option<&str> {
        self.labels
            .iter()
            .find(|(_, v)| v.as_slice() == geq0)
            .map(|(k, _)| k.as_str())
    }

    fn check(&self, lambda: &CocharVec) -> Result<(), ApartmentError> {
        if lambda.len() != self.rank {
            return Err(LatticeError::DimensionMismatch {
                expected: self.rank,
                found: lambda.len(),
            }
            .into());
        }
        Ok(())
    }

    /// The permutation `i ↦ j` of weight indices with `W⁻ᵀΦᵢ = Φⱼ`;
    /// duplicates are matched in index order.
    pub fn weight_permutation(&self, w: &LatticeMap) -> Result<Vec<usize>, ApartmentError> {
        let winv = w
            .to_q()
            .inverse()
            .ok_or(ApartmentError::BadWeylGenerator(0))?
            .transpose();
        let mut used = vec![false; self.weights.len()];
        let mut perm = Vec::with_capacity(self.weights.len());
        for chi in &self.weights {
            let img = winv.mul_vec(&chi.to_q());
            let j = (0..self.weights.len())
                .find(|&j| !used[j] && self.weights[j].to_q() == img)
                .ok_or(ApartmentError::WeylNotPermuting(0))?;
            used[j] = true;
            perm.push(j);
        }
        Ok(perm)
    }
}

fn weyl_closure(rank: usize, gens: &[LatticeMap], bound: usize) -> Result<Vec<LatticeMap>, ApartmentError> {
    let id = LatticeMap::identity(rank);
    let mut seen: HashSet<LatticeMap> = HashSet::new();
    let mut out = vec![id.clone()];
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.compose(&x);
            if seen.insert(y.clone()) {
                if out.len() >= bound {
                    return Err(ApartmentError::WeylTooLarge(bound));
                }
                out.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(out)
}

/// Partition of the weight indices by the sign of `⟨λ,χ⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignPattern {
    pub plus: Vec<usize>,
    pub zero: Vec<usize>,
    pub minus: Vec<usize>,
}

impl SignPattern {
    pub fn from_signs(signs: &[Sign]) -> SignPattern {
        let pick = |s: Sign| (0..signs.len()).filter(|&i| signs[i] == s).collect();
        SignPattern {
            plus: pick(Sign::Plus),
            zero: pick(Sign::Zero),
            minus: pick(Sign::Minus),
        }
    }

    /// Per-index signs, or `None` if the three sets do not partition `0..n`.
    pub fn signs(&self, n: usize) -> Option<Vec<Sign>> {
        let mut out = vec![None; n];
        for (set, s) in [(&self.plus, Sign::Plus), (&self.zero, Sign::Zero), (&self.minus, Sign::Minus)] {
            for &i in set {
                if i >= n || out[i].is_some() {
                    return None;
                }
                out[i] = Some(s);
            }
        }
        out.into_iter().collect()
    }

    pub fn key(&self) -> ParabolicKey {
        let mut geq0: Vec<usize> = self.plus.iter().chain(&self.zero).copied().collect();
        geq0.sort_unstable();
        ParabolicKey {
            geq0,
            zero: self.zero.clone(),
        }
    }

    /// Applies an index permutation: index `i` moves to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> SignPattern {
        let map = |v: &Vec<usize>| {
            let mut w: Vec<usize> = v.iter().map(|&i| perm[i]).collect();
            w.sort_unstable();
            w
        };
        SignPattern {
            plus: map(&self.plus),
            zero: map(&self.zero),
            minus: map(&self.minus),
        }
    }

    /// Compact string such as `+-0+`.
    pub fn compact(&self) -> String {
        let n = self.plus.len() + self.zero.len() + self.minus.len();
        self.signs(n)
            .map(|s| s.iter().map(|x| x.symbol()).collect())
            .unwrap_or_default()
    }
}

/// `(Φ_{λ,≥0}, Φ_{λ,0})`, identifying `P_λ` and `L_λ` in this apartment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParabolicKey {
    pub geq0: Vec<usize>,
    pub zero: Vec<usize>,
}

impl fmt::Display for ParabolicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "geq0={:?} zero={:?}", self.geq0, self.zero)
    }
}

pub fn sign_partition(a: &ApartmentData, lambda: &CocharVec) -> Result<SignPattern, ApartmentError> {
    a.check(lambda)?;
    let signs: Vec<Sign> = a
        .weights
        .iter()
        .map(|chi| pair(lambda, chi).map(|s| s.sign()))
        .collect::<Result<_, _>>()?;
    Ok(SignPattern::from_signs(&signs))
}

pub fn parabolic_key(a: &ApartmentData, lambda: &CocharVec) -> Result<ParabolicKey, ApartmentError> {
    Ok(sign_partition(a, lambda)?.key())
}

/// An integral cocharacter with exactly the sign pattern of `λ`.
pub fn cochar_approx(a: &ApartmentData, lambda: &CocharVec) -> Result<CocharVec, ApartmentError> {
    if let Some(p) = lambda.primitive() {
        a.check(lambda)?;
        return Ok(p);
    }
    let pattern = sign_partition(a, lambda)?;
    match realize_pattern(a, &pattern)? {
        Feasibility::Feasible(v) => Ok(v),
        Feasibility::Infeasible => {
            Err(LatticeError::Internal("pattern of a real cocharacter reported infeasible".into()).into())
        }
    }
}

/// Integer witness for a sign pattern, or a proof that none exists.
pub fn realize_pattern(a: &ApartmentData, s: &SignPattern) -> Result<Feasibility, ApartmentError> {
    let signs = s.signs(a.weights.len()).ok_or(ApartmentError::MalformedPattern)?;
    if a.rank == 0 {
        let ok = signs
            .iter()
            .zip(&a.weights)
            .all(|(s, _)| *s == Sign::Zero);
        return Ok(if ok {
            Feasibility::Feasible(CocharVec::zero(0))
        } else {
            Feasibility::Infeasible
        });
    }
    let mut strict = Vec::new();
    let mut zero = Vec::new();
    for (chi, sg) in a.weights.iter().zip(&signs) {
        match sg {
            Sign::Plus => strict.push(chi.clone()),
            Sign::Minus => strict.push(chi.neg()),
            Sign::Zero => zero.push(chi.clone()),
        }
    }
    Ok(strict_feasible(&strict, &[], &zero, a.rank)?)
}

/// `{w·λ : w ∈ W}`, sorted by display form.
pub fn weyl_orbit(a: &ApartmentData, lambda: &CocharVec) -> Result<Vec<CocharVec>, ApartmentError> {
    a.check(lambda)?;
    let mut out: Vec<CocharVec> = Vec::new();
    for w in &a.weyl_group {
        let img = w.apply(lambda)?;
        if !out.contains(&img) {
            out.push(img);
        }
    }
    out.sort_by_key(|v| v.to_string());
    Ok(out)
}

/// `f_*(λ)` for a lattice map `f: Y_A → Y_{A′}`.
pub fn apply_map(
    f: &LatticeMap,
    a: &ApartmentData,
    a2: &ApartmentData,
    lambda: &CocharVec,
) -> Result<CocharVec, ApartmentError> {
    if f.rows() != a2.rank || f.cols() != a.rank {
        return Err(ApartmentError::MapShape {
            rows: f.rows(),
            cols: f.cols(),
            want_rows: a2.rank,
            want_cols: a.rank,
        });
    }
    a.check(lambda)?;
    Ok(f.apply(lambda)?)
}

/// Checks that every pulled-back weight `fᵀχ′` is an integer combination of
/// the source weights, as it must be when `f` comes from a homomorphism.
pub fn check_map_compatible(f: &LatticeMap, a: &ApartmentData, a2: &ApartmentData) -> Result<(), ApartmentError> {
    let gens: Vec<Vec<BigInt>> = a
        .weights
        .iter()
        .map(|w| w.coeffs.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    for (k, chi) in a2.weights.iter().enumerate() {
        let pb = f.pullback(chi)?;
        let v: Vec<BigInt> = pb.coeffs.iter().map(|&x| BigInt::from(x)).collect();
        if !in_integer_span(&gens, &v) {
            return Err(ApartmentError::Incompatible(k));
        }
    }
    Ok(())
}

/// Product datum: `Φ = Φ₁×{0} ∪ {0}×Φ₂` with block-diagonal Weyl generators.
pub fn product(a1: &ApartmentData, a2: &ApartmentData) -> Result<ApartmentData, ApartmentError> {
    let (r1, r2) = (a1.rank, a2.rank);
    let pad = |w: &WeightVec, left: bool| {
        let mut v = vec![0; r1 + r2];
        let off = if left { 0 } else { r1 };
        v[off..off + w.len()].copy_from_slice(&w.coeffs);
        WeightVec::new(v)
    };
    let mut weights: Vec<WeightVec> = a1.weights.iter().map(|w| pad(w, true)).collect();
    weights.extend(a2.weights.iter().map(|w| pad(w, false)));
    let block = |g: &LatticeMap, left: bool| {
        let mut m = LatticeMap::identity(r1 + r2).matrix;
        let off = if left { 0 } else { r1 };
        for (i, row) in g.matrix.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m[off + i][off + j] = x;
            }
        }
        LatticeMap::new(m)
    };
    let mut gens: Vec<LatticeMap> = a1.weyl_gens.iter().map(|g| block(g, true)).collect();
    gens.extend(a2.weyl_gens.iter().map(|g| block(g, false)));
    let roots = match (&a1.roots, &a2.roots) {
        (None, None) => None,
        (r1s, r2s) => {
            let n1 = a1.weights.len();
            let mut v: Vec<usize> = r1s.clone().unwrap_or_default();
            v.extend(r2s.clone().unwrap_or_default().iter().map(|i| i + n1));
            Some(v)
        }
    };
    let bound = (a1.weyl_group.len() * a2.weyl_group.len()).max(DEFAULT_WEYL_BOUND);
    ApartmentData::with_bound(
        format!("{}x{}", a1.name, a2.name),
        r1 + r2,
        weights,
        gens,
        roots,
        bound,
    )
}

/// Primitive integer basis of `{λ : ⟨λ,χ⟩ = 0 for all χ ∈ Φ}`.
pub fn central_cochars(a: &ApartmentData) -> Vec<CocharVec> {
    if a.rank == 0 {
        return vec![];
    }
    let m = QMatrix::from_i64(&a.weights.iter().map(|w| w.coeffs.clone()).collect::<Vec<_>>());
    let kernel = if a.weights.is_empty() {
        QMatrix::identity(a.rank).to_rows()
    } else {
        m.kernel()
    };
    kernel
        .iter()
        .map(|v| CocharVec::rational(&crate::lattice::primitive(v)))
        .collect()
}

/// Sign of each weight under `λ`, as a vector (convenience for oracles).
pub fn signs_of(a: &ApartmentData, lambda: &CocharVec) -> Result<Vec<Sign>, ApartmentError> {
    let p = sign_partition(a, lambda)?;
    Ok(p.signs(a.weights.len()).expect("sign partition is a partition"))
}

/// The zero cocharacter of the datum.
pub fn origin(a: &ApartmentData) -> CocharVec {
    CocharVec::new(vec![Scalar::zero(); a.rank])
}
