//! Operations on points and cocharacters of a block group `H`.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use super::apartment::{common_apartment, splitting_basis, SplittingBasis};
use super::group::{permutations, BlockGroupSpec, DetValue, Entry};
use super::point::{check_same_group, Cocharacter, EdificePoint, WeightedFlag};
use super::subspace::Subspace;
use crate::error::GlError;
use crate::lattice::{LatticeError, QMatrix, Q};
use crate::metrics::AdmissibleMetric;

fn require_cochar(h: &BlockGroupSpec, c: &Cocharacter) -> Result<(), GlError> {
    if c.n() != h.n() || !h.contains_cocharacter(c.conjugator(), c.weights()) {
        return Err(GlError::CocharNotInGroup(h.name().to_string()));
    }
    Ok(())
}

fn common(x: &EdificePoint, y: &EdificePoint) -> Result<SplittingBasis, GlError> {
    common_apartment(x, y)?.ok_or(GlError::NoCommonApartment)
}

fn combine(x: &EdificePoint, sb: &SplittingBasis, mu: &[Q]) -> Result<EdificePoint, GlError> {
    Ok(EdificePoint::unchecked(x.group(), WeightedFlag::from_basis(&sb.basis, mu)?))
}

/// `x + y`, computed in a common apartment.
pub fn add(x: &EdificePoint, y: &EdificePoint) -> Result<EdificePoint, GlError> {
    let sb = common(x, y)?;
    let mu: Vec<Q> = sb.coords[0].iter().zip(&sb.coords[1]).map(|(a, b)| a + b).collect();
    combine(x, &sb, &mu)
}

/// `x + y` computed in the apartment of a given splitting basis of `H`.
pub fn add_in(x: &EdificePoint, y: &EdificePoint, basis: &QMatrix) -> Result<EdificePoint, GlError> {
    check_same_group(x, y)?;
    x.group().require(basis)?;
    let (Some(a), Some(b)) = (x.flag().coords_in(basis), y.flag().coords_in(basis)) else {
        return Err(GlError::NoCommonApartment);
    };
    let mu: Vec<Q> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
    Ok(EdificePoint::unchecked(x.group(), WeightedFlag::from_basis(basis, &mu)?))
}

/// `−x` in the apartment spanned by `basis`.
pub fn opposite(x: &EdificePoint, basis: &QMatrix) -> Result<EdificePoint, GlError> {
    x.group().require(basis)?;
    let mu = x
        .flag()
        .coords_in(basis)
        .ok_or_else(|| GlError::BadPoint("basis does not split the point".into()))?;
    let neg: Vec<Q> = mu.iter().map(|m| -m).collect();
    Ok(EdificePoint::unchecked(x.group(), WeightedFlag::from_basis(basis, &neg)?))
}

/// `x + y = 0` in some (equivalently every) common apartment.
pub fn is_opposite(x: &EdificePoint, y: &EdificePoint) -> Result<bool, GlError> {
    Ok(match common_apartment(x, y)? {
        None => false,
        Some(sb) => sb.coords[0].iter().zip(&sb.coords[1]).all(|(a, b)| (a + b).is_zero()),
    })
}

/// The unique `λ` with `x = φ(λ)` and `y = φ(−λ)`, in canonical form.
pub fn recover_lambda(x: &EdificePoint, y: &EdificePoint) -> Result<Cocharacter, GlError> {
    let sb = common_apartment(x, y)?.ok_or(GlError::NotOpposite)?;
    if !sb.coords[0].iter().zip(&sb.coords[1]).all(|(a, b)| (a + b).is_zero()) {
        return Err(GlError::NotOpposite);
    }
    Ok(Cocharacter::new(sb.basis, sb.coords[0].clone())?.canonical())
}

/// `t·x + (1−t)·y` for `t ∈ [0, 1]`.
pub fn geodesic(x: &EdificePoint, y: &EdificePoint, t: &Q) -> Result<EdificePoint, GlError> {
    if t.is_negative() || *t > Q::one() {
        return Err(GlError::BadParameter);
    }
    let sb = common(x, y)?;
    let s = Q::one() - t;
    let mu: Vec<Q> = sb.coords[0]
        .iter()
        .zip(&sb.coords[1])
        .map(|(a, b)| a * t + b * &s)
        .collect();
    combine(x, &sb, &mu)
}

/// `lim_{a→0} λ(a)·g·λ(a)⁻¹`.
pub fn limit_map(h: &BlockGroupSpec, c: &Cocharacter, g: &QMatrix) -> Result<QMatrix, GlError> {
    h.require(g)?;
    require_cochar(h, c)?;
    let s = c.conjugator();
    let sinv = s.inverse().expect("conjugator is invertible");
    let gp = &(&sinv * g) * s;
    let w = c.weights();
    let n = h.n();
    let mut lim = QMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let d = &w[i] - &w[j];
            if d.is_negative() && !gp[(i, j)].is_zero() {
                return Err(GlError::NoLimit);
            }
            if d.is_zero() {
                lim[(i, j)] = gp[(i, j)].clone();
            }
        }
    }
    Ok(&(s * &lim) * &sinv)
}

/// `g = p·u⁻` with `p ∈ P_λ(H)` and `u⁻ ∈ U_{−λ}(H)`.
///
/// In the eigenbasis ordered by decreasing weight, `P_λ` is block upper
/// triangular and `U_{−λ}` block unipotent lower triangular, so the factors
/// come from a block LU factorisation `g⁻¹ = L·U` with `p = U⁻¹`,
/// `u⁻ = L⁻¹`.
pub fn big_cell_factor(h: &BlockGroupSpec, c: &Cocharacter, g: &QMatrix) -> Result<(QMatrix, QMatrix), GlError> {
    h.require(g)?;
    require_cochar(h, c)?;
    let n = h.n();
    let (s, w) = c.sorted_basis();
    let sinv = s.inverse().expect("conjugator is invertible");
    let ginv = g.inverse().expect("group elements are invertible");
    let mut u = &(&sinv * &ginv) * &s;
    let mut l = QMatrix::identity(n);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        match blocks.last_mut() {
            Some(b) if w[b[0]] == w[i] => b.push(i),
            _ => blocks.push(vec![i]),
        }
    }
    for (k, bk) in blocks.iter().enumerate() {
        let pivot = u.submatrix(bk, bk).inverse().ok_or(GlError::NotInCell)?;
        for bi in &blocks[k + 1..] {
            let m = &u.submatrix(bi, bk) * &pivot;
            for (a, &r) in bi.iter().enumerate() {
                for (b, &cc) in bk.iter().enumerate() {
                    l[(r, cc)] = m[(a, b)].clone();
                }
                for col in 0..n {
                    let mut acc = Q::zero();
                    for (b, &cc) in bk.iter().enumerate() {
                        acc += &m[(a, b)] * &u[(cc, col)];
                    }
                    u[(r, col)] = &u[(r, col)] - &acc;
                }
            }
        }
    }
    let p = &(&s * &u.inverse().ok_or(GlError::NotInCell)?) * &sinv;
    let um = &(&s * &l.inverse().expect("unit triangular")) * &sinv;
    if !h.contains(&p) || !h.contains(&um) {
        return Err(GlError::NotInCell);
    }
    debug_assert_eq!(&p * &um, *g);
    Ok((p, um))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilizerKind {
    Parabolic,
    Levi,
    Unipotent,
}

/// `P_x`, `L_λ` or `U_λ` inside `H`, as a membership predicate.
#[derive(Debug, Clone)]
pub struct FlagStabilizer {
    pub kind: StabilizerKind,
    group: BlockGroupSpec,
    /// `F₁ ⊊ … ⊊ F_k`.
    flag: Vec<Subspace>,
    /// Eigenspaces, for the Levi.
    grading: Vec<Subspace>,
}

impl FlagStabilizer {
    pub fn flag(&self) -> &[Subspace] {
        &self.flag
    }

    pub fn contains(&self, g: &QMatrix) -> bool {
        if !self.group.contains(g) {
            return false;
        }
        match self.kind {
            StabilizerKind::Parabolic => stabilizes(&self.flag, g),
            StabilizerKind::Levi => stabilizes(&self.grading, g),
            StabilizerKind::Unipotent => {
                let n = self.group.n();
                let d = g.sub(&QMatrix::identity(n));
                (0..self.flag.len()).all(|i| {
                    let below = if i == 0 { Subspace::zero(n) } else { self.flag[i - 1].clone() };
                    below.contains_space(&self.flag[i].image(&d))
                })
            }
        }
    }
}

fn stabilizes(spaces: &[Subspace], g: &QMatrix) -> bool {
    spaces.iter().all(|s| s.contains_space(&s.image(g)))
}

pub fn parabolic_of(x: &EdificePoint) -> FlagStabilizer {
    FlagStabilizer {
        kind: StabilizerKind::Parabolic,
        group: x.group().clone(),
        flag: x.flag().spaces(),
        grading: vec![],
    }
}

pub fn levi_of(h: &BlockGroupSpec, c: &Cocharacter) -> Result<FlagStabilizer, GlError> {
    require_cochar(h, c)?;
    Ok(FlagStabilizer {
        kind: StabilizerKind::Levi,
        group: h.clone(),
        flag: c.flag().spaces(),
        grading: c.grading().into_iter().map(|(_, e)| e).collect(),
    })
}

pub fn unip_of(h: &BlockGroupSpec, c: &Cocharacter) -> Result<FlagStabilizer, GlError> {
    require_cochar(h, c)?;
    Ok(FlagStabilizer {
        kind: StabilizerKind::Unipotent,
        group: h.clone(),
        flag: c.flag().spaces(),
        grading: vec![],
    })
}

/// Unknowns are the entries `X_{rs}` of an `n×n` matrix, indexed `r·n+s`.
/// Adds the rows `a·X·b = rhs` for every `a` in `ann` and `b` in `vecs`.
fn push_bilinear(rows: &mut Vec<Vec<Q>>, rhs: &mut Vec<Q>, n: usize, ann: &[Vec<Q>], vecs: &[Vec<Q>], shift: bool) {
    for a in ann {
        for b in vecs {
            let mut row = vec![Q::zero(); n * n];
            for r in 0..n {
                if a[r].is_zero() {
                    continue;
                }
                for s in 0..n {
                    row[r * n + s] = &a[r] * &b[s];
                }
            }
            // With `shift`, the equation is a·(b + X·b) = 0.
            let c = if shift {
                -a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
            } else {
                Q::zero()
            };
            rows.push(row);
            rhs.push(c);
        }
    }
}

fn matrix_from_vec(n: usize, v: &[Q]) -> QMatrix {
    QMatrix::from_rows((0..n).map(|r| v[r * n..(r + 1) * n].to_vec()).collect())
}

/// The unique `u ∈ U_λ(H)` with `L_μ = u·L_λ·u⁻¹`, matching the
/// eigenspaces of `λ` and `μ` level by level.
pub fn levi_transporter(h: &BlockGroupSpec, lambda: &Cocharacter, mu: &Cocharacter) -> Result<QMatrix, GlError> {
    require_cochar(h, lambda)?;
    require_cochar(h, mu)?;
    let n = h.n();
    let fl = lambda.flag().spaces();
    if fl != mu.flag().spaces() {
        return Err(GlError::TransporterPrecondition);
    }
    let el = lambda.grading();
    let em = mu.grading();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..fl.len() {
        let below = if i == 0 { Subspace::zero(n) } else { fl[i - 1].clone() };
        push_bilinear(&mut rows, &mut rhs, n, &below.annihilator(), fl[i].basis(), false);
        push_bilinear(&mut rows, &mut rhs, n, &em[i].1.annihilator(), el[i].1.basis(), true);
    }
    let (x, kernel) = QMatrix::from_rows(rows)
        .solve(&rhs)
        .ok_or(GlError::TransporterPrecondition)?;
    if !kernel.is_empty() {
        return Err(LatticeError::Internal("Levi transporter is not unique".into()).into());
    }
    let u = QMatrix::identity(n).add(&matrix_from_vec(n, &x));
    h.require(&u)?;
    Ok(u)
}

/// Checks that a form on `ℚⁿ` is `a·I + b·J`, i.e. invariant under
/// permuting coordinates.
fn permutation_invariant(m: &QMatrix) -> bool {
    let n = m.rows();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let (i0, j0) = if i == j { (0, 0) } else { (0, 1.min(n - 1)) };
            m[(i, j)] == m[(i0, j0)]
        })
    })
}

/// `d(x, y)²` for an `S_n`-invariant form, computed in a common apartment
/// of the ambient `GL_n`.
pub fn point_dist2(metric: &AdmissibleMetric, x: &EdificePoint, y: &EdificePoint) -> Result<Q, GlError> {
    let n = x.flag().n();
    if y.flag().n() != n || metric.dim() != n {
        return Err(LatticeError::DimensionMismatch {
            expected: n,
            found: metric.dim().min(y.flag().n()),
        }
        .into());
    }
    if !permutation_invariant(metric.form.matrix()) {
        return Err(GlError::Unsupported("point distance with a form not invariant under coordinate permutations".into()));
    }
    let s = splitting_basis(x.flag(), y.flag());
    let a = x.flag().coords_in(&s).expect("splits x");
    let b = y.flag().coords_in(&s).expect("splits y");
    let d: Vec<Q> = a.iter().zip(&b).map(|(p, q)| p - q).collect();
    Ok(metric.form.eval_q(&d, &d))
}

/// The least positive `d(x, w·x)²` over coordinate permutations `w`, for a
/// point with this type vector in a fixed apartment; `None` if every
/// permutation fixes it.
pub fn same_type_gap(metric: &AdmissibleMetric, type_vector: &[Q]) -> Option<Q> {
    let n = type_vector.len();
    let mut best: Option<Q> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    permutations(&mut idx, 0, &mut |p| {
        let d: Vec<Q> = (0..n).map(|i| &type_vector[i] - &type_vector[p[i]]).collect();
        let v = metric.form.eval_q(&d, &d);
        if v.is_positive() && best.as_ref().map_or(true, |b| v < *b) {
            best = Some(v);
        }
    });
    best
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConjugacyResult {
    /// An element `g ∈ P_{λ₁}(H)(ℚ)` with `g·λ₁ = λ₂`.
    Conjugate(QMatrix),
    NotConjugate,
    Undecided,
}

/// Searches `g ∈ P_{λ₁}(H)(ℚ)` with `g·λ₁ = λ₂` directly from the
/// definition of `≈`: the conditions on `g` are linear apart from
/// invertibility and prescribed determinants.
///
/// `NotConjugate` is certified by an infeasible linear system or (for
/// `n ≤ 4`) a determinant that vanishes identically on the solution space.
/// Otherwise random solutions are tried; block determinant values are met
/// along a direction in which they are affine.
pub fn conjugacy_witness<R: Rng + ?Sized>(
    h: &BlockGroupSpec,
    l1: &Cocharacter,
    l2: &Cocharacter,
    rng: &mut R,
) -> Result<ConjugacyResult, GlError> {
    require_cochar(h, l1)?;
    require_cochar(h, l2)?;
    let n = h.n();
    let g1 = l1.grading();
    let g2 = l2.grading();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for f in l1.flag().spaces() {
        push_bilinear(&mut rows, &mut rhs, n, &f.annihilator(), f.basis(), false);
    }
    for (w, e1) in &g1 {
        let target = g2
            .iter()
            .find(|(w2, _)| w2 == w)
            .map(|(_, e)| e.clone())
            .unwrap_or_else(|| Subspace::zero(n));
        if target.dim() != e1.dim() {
            return Ok(ConjugacyResult::NotConjugate);
        }
        push_bilinear(&mut rows, &mut rhs, n, &target.annihilator(), e1.basis(), false);
    }
    for r in 0..n {
        for s in 0..n {
            let v = match h.pattern()[r][s] {
                Entry::Free => continue,
                Entry::Zero => Q::zero(),
                Entry::One => Q::one(),
            };
            let mut row = vec![Q::zero(); n * n];
            row[r * n + s] = Q::one();
            rows.push(row);
            rhs.push(v);
        }
    }
    let Some((x0, kernel)) = QMatrix::from_rows(rows).solve(&rhs) else {
        return Ok(ConjugacyResult::NotConjugate);
    };
    if n <= 4 && kernel.len() <= 12 && symbolic_det_vanishes(n, &x0, &kernel) {
        return Ok(ConjugacyResult::NotConjugate);
    }
    for attempt in 0..100 {
        let r = 2 + attempt / 10;
        let mut v = x0.clone();
        for k in &kernel {
            let t = Q::from_integer(rng.gen_range(-r..=r).into());
            for (a, b) in v.iter_mut().zip(k) {
                *a += b * &t;
            }
        }
        let mut g = matrix_from_vec(n, &v);
        if g.det().is_zero() {
            continue;
        }
        for d in h.det_constraints() {
            if let DetValue::Value(val) = &d.value {
                fix_det_along_kernel(&mut g, n, &d.block, val, &kernel);
            }
        }
        if h.contains(&g) && l1.conjugate(&g)?.same_as(l2) {
            return Ok(ConjugacyResult::Conjugate(g));
        }
    }
    Ok(ConjugacyResult::Undecided)
}

/// Moves `g` along a solution direction whose restriction to the block has
/// a single non-zero column, so the block determinant is affine in the step.
fn fix_det_along_kernel(g: &mut QMatrix, n: usize, block: &[usize], val: &Q, kernel: &[Vec<Q>]) {
    if kernel.is_empty() {
        return;
    }
    for &j in block {
        // β with (Σ βᵢ Kᵢ)[r][s] = 0 for r, s ∈ B, s ≠ j.
        let eqs: Vec<Vec<Q>> = block
            .iter()
            .flat_map(|&r| block.iter().filter(move |&&s| s != j).map(move |&s| (r, s)))
            .map(|(r, s)| kernel.iter().map(|k| k[r * n + s].clone()).collect())
            .collect();
        let betas = if eqs.is_empty() {
            QMatrix::identity(kernel.len()).to_rows()
        } else {
            QMatrix::from_rows(eqs).kernel()
        };
        for beta in betas {
            let mut dir = vec![Q::zero(); n * n];
            for (b, k) in beta.iter().zip(kernel) {
                for (d, x) in dir.iter_mut().zip(k) {
                    *d += b * x;
                }
            }
            let dm = matrix_from_vec(n, &dir);
            let alpha = g.submatrix(block, block).det();
            let moved = g.add(&dm);
            let gamma = moved.submatrix(block, block).det() - &alpha;
            if gamma.is_zero() {
                continue;
            }
            let step = (val - &alpha) / gamma;
            *g = g.add(&dm.scale(&step));
            return;
        }
    }
}

/// A random point `g·φ(μ)` with `g` sampled from `H` and `μ` a small
/// integral cocharacter of the diagonal torus of `H`.
pub fn random_point<R: Rng + ?Sized>(h: &BlockGroupSpec, rng: &mut R) -> Result<EdificePoint, GlError> {
    let n = h.n();
    let g = h.sample(rng)?;
    let mut mu: Vec<Q> = (0..n)
        .map(|i| match h.pattern()[i][i] {
            Entry::Free => Q::from_integer(rng.gen_range(-2i64..=2).into()),
            _ => Q::zero(),
        })
        .collect();
    let values: Vec<&Vec<usize>> = h
        .det_constraints()
        .iter()
        .filter(|d| matches!(d.value, DetValue::Value(_)))
        .map(|d| &d.block)
        .collect();
    for (k, block) in values.iter().enumerate() {
        let own = block.iter().rev().find(|&&j| {
            h.pattern()[j][j] == Entry::Free && values.iter().enumerate().all(|(l, b)| l == k || !b.contains(&j))
        });
        let Some(&j) = own else {
            return Err(GlError::Unsupported(format!("random torus points of {}", h.name())));
        };
        mu[j] = Q::zero();
        mu[j] = -block.iter().fold(Q::zero(), |s, &i| s + &mu[i]);
    }
    if !h.torus_weights_ok(&mu) {
        return Err(GlError::Unsupported(format!("random torus points of {}", h.name())));
    }
    Ok(EdificePoint::unchecked(h, WeightedFlag::from_basis(&g, &mu)?))
}

type Monomial = Vec<u8>;

/// `det(x₀ + Σ tᵢ Kᵢ) ≡ 0` as a polynomial in the `tᵢ`.
fn symbolic_det_vanishes(n: usize, x0: &[Q], kernel: &[Vec<Q>]) -> bool {
    let k = kernel.len();
    let entry = |idx: usize| -> BTreeMap<Monomial, Q> {
        let mut p = BTreeMap::new();
        if !x0[idx].is_zero() {
            p.insert(vec![0; k], x0[idx].clone());
        }
        for (i, kv) in kernel.iter().enumerate() {
            if !kv[idx].is_zero() {
                let mut m = vec![0; k];
                m[i] = 1;
                p.insert(m, kv[idx].clone());
            }
        }
        p
    };
    let mut total: BTreeMap<Monomial, Q> = BTreeMap::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p| {
        let mut inv = 0;
        for i in 0..n {
            for j in i + 1..n {
                if p[i] > p[j] {
                    inv += 1;
                }
            }
        }
        let mut term: BTreeMap<Monomial, Q> = BTreeMap::new();
        term.insert(vec![0; k], if inv % 2 == 0 { Q::one() } else { -Q::one() });
        for (i, &j) in p.iter().enumerate() {
            let e = entry(i * n + j);
            let mut next: BTreeMap<Monomial, Q> = BTreeMap::new();
            for (m1, c1) in &term {
                for (m2, c2) in &e {
                    let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                    *next.entry(m).or_insert_with(Q::zero) += c1 * c2;
                }
            }
            next.retain(|_, c| !c.is_zero());
            term = next;
            if term.is_empty() {
                return;
            }
        }
        for (m, c) in term {
            *total.entry(m).or_insert_with(Q::zero) += c;
        }
    });
    total.values().all(|c| c.is_zero())
}
