//! Destabilising cocharacters for a torus acting linearly with weights `Φ`.
//!
//! A state `x = Σ x_χ v_χ` is recorded by its coordinates on the weight
//! vectors; `λ(a)·x = Σ a^{⟨λ,χ⟩} x_χ v_χ`.

use std::collections::{BTreeMap, BTreeSet};

use num::bigint::BigInt;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::apartment::{parabolic_key, ApartmentData, ParabolicKey};
use crate::error::KempfError;
use crate::lattice::{
    in_integer_span, min_norm_qp, pair, pair_q, primitive, CocharVec, LatticeError, LatticeMap, QMatrix, QpOutcome,
    QpSolution, SPDForm, Scalar, Sign, WeightVec, Q,
};
use crate::metrics::AdmissibleMetric;

#[derive(Debug, Clone)]
pub struct LinearAction {
    apartment: ApartmentData,
}

impl LinearAction {
    pub fn new(apartment: ApartmentData) -> Result<LinearAction, KempfError> {
        if apartment.weights().is_empty() {
            return Err(KempfError::NoWeights);
        }
        Ok(LinearAction { apartment })
    }

    pub fn apartment(&self) -> &ApartmentData {
        &self.apartment
    }

    pub fn rank(&self) -> usize {
        self.apartment.rank()
    }

    pub fn weights(&self) -> &[WeightVec] {
        self.apartment.weights()
    }

    fn check(&self, lambda: &CocharVec) -> Result<(), KempfError> {
        if lambda.len() != self.rank() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.rank(),
                found: lambda.len(),
            }
            .into());
        }
        Ok(())
    }
}

/// Non-zero coordinates of a vector, keyed by weight index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatePoint {
    coords: BTreeMap<usize, Scalar>,
}

impl StatePoint {
    pub fn new(a: &LinearAction, coords: Vec<(usize, Scalar)>) -> Result<StatePoint, KempfError> {
        let mut map = BTreeMap::new();
        for (i, c) in coords {
            if i >= a.weights().len() {
                return Err(KempfError::BadPoint(format!("weight index {i} out of range")));
            }
            if c.is_zero() {
                return Err(KempfError::BadPoint(format!("zero coordinate at {i}")));
            }
            if map.insert(i, c).is_some() {
                return Err(KempfError::BadPoint(format!("repeated index {i}")));
            }
        }
        Ok(StatePoint { coords: map })
    }

    /// All coordinates equal to 1 on the given support.
    pub fn unit(a: &LinearAction, support: &[usize]) -> Result<StatePoint, KempfError> {
        StatePoint::new(a, support.iter().map(|&i| (i, Scalar::one())).collect())
    }

    pub fn support(&self) -> Vec<usize> {
        self.coords.keys().copied().collect()
    }

    pub fn coord(&self, i: usize) -> Option<&Scalar> {
        self.coords.get(&i)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    fn support_weights(&self, a: &LinearAction) -> Vec<WeightVec> {
        self.coords.keys().map(|&i| a.weights()[i].clone()).collect()
    }
}

pub fn destabilizes(a: &LinearAction, x: &StatePoint, lambda: &CocharVec) -> Result<bool, KempfError> {
    a.check(lambda)?;
    for i in x.coords.keys() {
        if pair(lambda, &a.weights()[*i])?.sign() == Sign::Minus {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `lim_{a→0} λ(a)·x`, or `None` when it does not exist.
pub fn limit_point(a: &LinearAction, x: &StatePoint, lambda: &CocharVec) -> Result<Option<StatePoint>, KempfError> {
    if !destabilizes(a, x, lambda)? {
        return Ok(None);
    }
    let mut coords = BTreeMap::new();
    for (i, c) in &x.coords {
        if pair(lambda, &a.weights()[*i])?.is_zero() {
            coords.insert(*i, c.clone());
        }
    }
    Ok(Some(StatePoint { coords }))
}

/// Whether `y ∈ T(ℚ)·x` for the torus `T = 𝔾_m^r` of the apartment.
///
/// With `ρ_χ = y_χ/x_χ` this asks for `t ∈ (ℚ^×)^r` with `t^χ = ρ_χ` on the
/// support. Writing `t_i = ±Π p^{e_{i,p}}`, the exponents of each prime and
/// the signs decouple into integer and mod-2 linear systems.
pub fn in_torus_orbit(a: &LinearAction, x: &StatePoint, y: &StatePoint) -> Result<bool, KempfError> {
    if x.support() != y.support() {
        return Ok(false);
    }
    let support = x.support();
    let mut ratios = Vec::with_capacity(support.len());
    for i in &support {
        let (Some(p), Some(q)) = (x.coords[i].as_rational(), y.coords[i].as_rational()) else {
            return Err(KempfError::IrrationalInput);
        };
        ratios.push(q / p);
    }
    let rank = a.rank();
    // Column i of the system: (χ_i)_{χ ∈ support}.
    let gens: Vec<Vec<BigInt>> = (0..rank)
        .map(|i| {
            support
                .iter()
                .map(|&k| BigInt::from(a.weights()[k].coeffs[i]))
                .collect()
        })
        .collect();
    let mut primes = BTreeSet::new();
    for r in &ratios {
        for n in [r.numer(), r.denom()] {
            primes.extend(prime_factors(n)?);
        }
    }
    for p in primes {
        let v: Vec<BigInt> = ratios.iter().map(|r| BigInt::from(valuation(r, p))).collect();
        if !in_integer_span(&gens, &v) {
            return Ok(false);
        }
    }
    let signs: Vec<Vec<bool>> = support
        .iter()
        .map(|&k| a.weights()[k].coeffs.iter().map(|c| c.rem_euclid(2) == 1).collect())
        .collect();
    let rhs: Vec<bool> = ratios.iter().map(|r| r.is_negative()).collect();
    Ok(gf2_solvable(signs, rhs))
}

fn prime_factors(n: &BigInt) -> Result<Vec<u64>, KempfError> {
    let mut m = n
        .abs()
        .to_u64()
        .ok_or_else(|| LatticeError::Internal("coordinate ratio too large to factor".into()))?;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    Ok(out)
}

fn valuation(r: &Q, p: u64) -> i64 {
    let count = |n: &BigInt| {
        let p = BigInt::from(p);
        let mut n = n.abs();
        let mut k = 0;
        while !n.is_zero() && n.is_multiple_of(&p) {
            n /= &p;
            k += 1;
        }
        k
    };
    count(r.numer()) - count(r.denom())
}

fn gf2_solvable(mut rows: Vec<Vec<bool>>, mut rhs: Vec<bool>) -> bool {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c]) else {
            continue;
        };
        rows.swap(r, p);
        rhs.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i][c] {
                for j in 0..cols {
                    let v = rows[r][j];
                    rows[i][j] ^= v;
                }
                let v = rhs[r];
                rhs[i] ^= v;
            }
        }
        r += 1;
    }
    rhs[r..].iter().all(|b| !b)
}

/// `λ` destabilises `x` and the limit leaves the torus orbit of `x`.
pub fn properly_destabilizes_torus(a: &LinearAction, x: &StatePoint, lambda: &CocharVec) -> Result<bool, KempfError> {
    match limit_point(a, x, lambda)? {
        None => Ok(false),
        Some(l) => Ok(!in_torus_orbit(a, x, &l)?),
    }
}

/// `{λ : ⟨λ,χ⟩ ≥ 0 for χ ∈ supp x}`, with its lineality space and the
/// extreme rays of the pointed part orthogonal to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DestabCone {
    pub rank: usize,
    #[serde(skip)]
    pub inequalities: Vec<WeightVec>,
    #[serde(with = "crate::lattice::qser::nested")]
    pub lineality: Vec<Vec<Q>>,
    #[serde(with = "crate::lattice::qser::nested")]
    pub rays: Vec<Vec<Q>>,
}

impl DestabCone {
    pub fn contains(&self, lambda: &[Q]) -> bool {
        self.inequalities.iter().all(|chi| !pair_q(lambda, chi).is_negative())
    }

    pub fn contains_cochar(&self, lambda: &CocharVec) -> Result<bool, KempfError> {
        for chi in &self.inequalities {
            if pair(lambda, chi)?.sign() == Sign::Minus {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Double description by enumerating rank-deficient active sets: every
/// extreme ray of the pointed part is cut out by `d − 1` independent
/// inequalities together with orthogonality to the lineality space.
pub fn destab_cone(a: &LinearAction, x: &StatePoint) -> DestabCone {
    let r = a.rank();
    let ineq = x.support_weights(a);
    let rows: Vec<Vec<Q>> = ineq.iter().map(|w| w.to_q()).collect();
    let lineality = if rows.is_empty() {
        QMatrix::identity(r).to_rows()
    } else {
        QMatrix::from_rows(rows.clone()).kernel()
    };
    let d = r - lineality.len();
    let mut rays: BTreeSet<Vec<Q>> = BTreeSet::new();
    if d > 0 {
        let mut distinct: Vec<Vec<Q>> = Vec::new();
        for row in &rows {
            let p = primitive(row);
            if !distinct.contains(&p) {
                distinct.push(p);
            }
        }
        for subset in crate::lattice::combinations_of(distinct.len(), d - 1) {
            let mut eqs: Vec<Vec<Q>> = subset.iter().map(|&i| distinct[i].clone()).collect();
            eqs.extend(lineality.iter().cloned());
            let ker = if eqs.is_empty() {
                QMatrix::identity(r).to_rows()
            } else {
                QMatrix::from_rows(eqs).kernel()
            };
            if ker.len() != 1 {
                continue;
            }
            let v = primitive(&ker[0]);
            let neg: Vec<Q> = v.iter().map(|x| -x).collect();
            for cand in [v, neg] {
                if rows.iter().all(|row| !dot(row, &cand).is_negative()) {
                    rays.insert(cand);
                }
            }
        }
    }
    DestabCone {
        rank: r,
        inequalities: ineq,
        lineality: lineality.iter().map(|v| primitive(v)).collect(),
        rays: rays.into_iter().collect(),
    }
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |s, (x, y)| s + x * y)
}

/// `C = −C`, i.e. the cone is its own lineality space.
pub fn is_cr_cone(c: &DestabCone) -> bool {
    c.rays.is_empty()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KempfOptimal {
    /// Primitive integral point on the optimal ray.
    pub lambda_opt: CocharVec,
    /// The minimum-norm point of `{λ : ⟨λ,χ⟩ ≥ 1 on the support}`.
    pub lambda_star: Vec<Q>,
    /// `(max min⟨λ,χ⟩/‖λ‖)² = 1/‖λ*‖²`.
    pub value_sq: Q,
    pub certificate: QpSolution,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KempfResult {
    Optimal(KempfOptimal),
    Semistable,
}

/// The ray maximising `min_{χ ∈ supp x} ⟨λ,χ⟩ / ‖λ‖`, through the dual
/// program `min ‖λ‖²` subject to `⟨λ,χ⟩ ≥ 1`.
pub fn kempf_optimal(a: &LinearAction, x: &StatePoint, metric: &AdmissibleMetric) -> Result<KempfResult, KempfError> {
    if x.is_zero() {
        return Err(KempfError::ZeroVector);
    }
    AdmissibleMetric::for_apartment(metric.form.clone(), a.apartment())?;
    let constraints = x.support_weights(a);
    match min_norm_qp(&constraints, &metric.form)? {
        QpOutcome::Infeasible => Ok(KempfResult::Semistable),
        QpOutcome::Optimal(sol) => {
            let norm = metric.form.eval_q(&sol.lambda, &sol.lambda);
            Ok(KempfResult::Optimal(KempfOptimal {
                lambda_opt: CocharVec::rational(&primitive(&sol.lambda)),
                lambda_star: sol.lambda.clone(),
                value_sq: Q::one() / norm,
                certificate: sol,
            }))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OptimalParabolic {
    pub key: ParabolicKey,
    /// `−λ_opt` lies outside the destabilising cone.
    pub unopposed: bool,
}

pub fn optimal_parabolic(a: &LinearAction, x: &StatePoint, lambda_opt: &CocharVec) -> Result<OptimalParabolic, KempfError> {
    let key = parabolic_key(a.apartment(), lambda_opt)?;
    let cone = destab_cone(a, x);
    Ok(OptimalParabolic {
        key,
        unopposed: !cone.contains_cochar(&lambda_opt.neg())?,
    })
}

/// Input file for the `kempf` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KempfInput {
    #[serde(default = "default_name")]
    pub name: String,
    pub weights: Vec<Vec<i64>>,
    #[serde(default)]
    pub weyl_gens: Vec<Vec<Vec<i64>>>,
    pub support: Vec<usize>,
    /// Defaults to 1 on every support index.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Scalar>>,
    /// Defaults to the identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<QMatrix>,
}

fn default_name() -> String {
    "action".into()
}

impl KempfInput {
    pub fn build(&self) -> Result<(LinearAction, StatePoint, AdmissibleMetric), KempfError> {
        let rank = self.weights.first().map_or(0, |w| w.len());
        let apt = ApartmentData::new(
            self.name.clone(),
            rank,
            self.weights.iter().map(|w| WeightVec::new(w.clone())).collect(),
            self.weyl_gens.iter().map(|g| LatticeMap::new(g.clone())).collect(),
            None,
        )?;
        let action = LinearAction::new(apt)?;
        let coords = match &self.coords {
            None => vec![Scalar::one(); self.support.len()],
            Some(c) if c.len() == self.support.len() => c.clone(),
            Some(c) => {
                return Err(KempfError::BadPoint(format!(
                    "{} coordinates for a support of size {}",
                    c.len(),
                    self.support.len()
                )))
            }
        };
        let x = StatePoint::new(&action, self.support.iter().copied().zip(coords).collect())?;
        let form = match &self.form {
            None => SPDForm::identity(rank),
            Some(m) => SPDForm::new(m.clone())?,
        };
        Ok((action, x, AdmissibleMetric::base(form)))
    }
}
