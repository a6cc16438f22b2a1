//! Apartments of `V_H`: splitting bases coming from maximal split tori of `H`.
//!
//! Apartments of `V_H` are the translates `g·V_{D_H}` by `g ∈ H(ℚ)` of the
//! apartment of the diagonal torus `D_H`. A family of weighted flags lies in
//! a common apartment iff some `g ∈ H(ℚ)` has columns splitting every flag
//! with diagonal weights in `Y(D_H) ⊗ ℚ`.
//!
//! For `GL_n`-like groups a splitting basis is built directly from the
//! intersection lattice of two flags. Otherwise the columns are assigned to
//! flag levels by a depth-first search; each column then ranges over an
//! affine subspace, and an invertible choice exists iff Rado's condition
//! holds for the spanned subspaces.

use std::collections::HashMap;

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::group::{BlockGroupSpec, DetValue, Entry};
use super::point::{check_same_group, EdificePoint, WeightedFlag};
use super::subspace::Subspace;
use crate::error::GlError;
use crate::lattice::{qser, LatticeError, QMatrix, Q};

/// A basis (the columns of `basis`, an element of `H`) splitting some
/// points, with each point's weights on the columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplittingBasis {
    pub basis: QMatrix,
    #[serde(with = "qser::nested")]
    pub coords: Vec<Vec<Q>>,
}

/// Seed of the generic choices made inside the search; the existence
/// decision does not depend on it.
const SEARCH_SEED: u64 = 0x5eed_a9a7;

/// A splitting basis in `H` for one flag, or `None` if the flag is not a
/// point of `V_H`.
pub fn is_point_of(h: &BlockGroupSpec, flag: &WeightedFlag) -> Result<Option<SplittingBasis>, GlError> {
    torus_search(h, &[flag])
}

/// A common apartment of `x` and `y` in `V_H`, or `None` if there is none.
pub fn common_apartment(x: &EdificePoint, y: &EdificePoint) -> Result<Option<SplittingBasis>, GlError> {
    check_same_group(x, y)?;
    torus_search(x.group(), &[x.flag(), y.flag()])
}

pub(crate) fn torus_search(h: &BlockGroupSpec, flags: &[&WeightedFlag]) -> Result<Option<SplittingBasis>, GlError> {
    if flags.iter().any(|f| f.n() != h.n()) {
        return Err(GlError::BadPoint("flag dimension does not match the group".into()));
    }
    if h.is_full_linear() && flags.len() <= 2 {
        return Ok(full_linear(h, flags));
    }
    Search::new(h, flags).run()
}

/// Basis splitting one or two flags: for each pair of levels `(i, j)`, a
/// complement of `F_{i−1}∩G_j + F_i∩G_{j−1}` in `F_i ∩ G_j`.
pub fn splitting_basis(f: &WeightedFlag, g: &WeightedFlag) -> QMatrix {
    let n = f.n();
    let fs = f.spaces();
    let gs = g.spaces();
    let get = |v: &[Subspace], i: usize| if i == 0 { Subspace::zero(n) } else { v[i - 1].clone() };
    let mut cols = Vec::with_capacity(n);
    for i in 1..=fs.len() {
        for j in 1..=gs.len() {
            let x = get(&fs, i).intersect(&get(&gs, j));
            let y = get(&fs, i - 1)
                .intersect(&get(&gs, j))
                .sum(&get(&fs, i).intersect(&get(&gs, j - 1)));
            cols.extend(y.complement_in(&x));
        }
    }
    QMatrix::from_cols(&cols)
}

fn full_linear(h: &BlockGroupSpec, flags: &[&WeightedFlag]) -> Option<SplittingBasis> {
    let n = h.n();
    let zero = WeightedFlag::zero(n);
    let f = flags.first().copied().unwrap_or(&zero);
    let g = flags.get(1).copied().unwrap_or(&zero);
    let mut s = splitting_basis(f, g);
    let coords: Vec<Vec<Q>> = flags
        .iter()
        .map(|fl| fl.coords_in(&s).expect("the intersection basis splits both flags"))
        .collect();
    if !coords.iter().all(|mu| h.torus_weights_ok(mu)) {
        return None;
    }
    for d in h.det_constraints() {
        if let DetValue::Value(v) = &d.value {
            let det = s.det();
            let factor = v / det;
            for r in 0..n {
                s[(r, 0)] = &s[(r, 0)] * &factor;
            }
        }
    }
    debug_assert!(h.contains(&s));
    Some(SplittingBasis { basis: s, coords })
}

struct ColumnSpace {
    /// Linear span of the admissible column vectors.
    span: Subspace,
    /// Particular solution when the column has entries pinned to 1.
    offset: Option<Vec<Q>>,
    /// Directions: `{v ∈ V_c : pinned entries are 0}`.
    linear: Subspace,
}

struct Search<'a> {
    h: &'a BlockGroupSpec,
    flags: &'a [&'a WeightedFlag],
    n: usize,
    intersections: HashMap<Vec<usize>, Subspace>,
    /// Level tuples, one per flag, for every column.
    tuples: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(h: &'a BlockGroupSpec, flags: &'a [&'a WeightedFlag]) -> Search<'a> {
        let mut tuples: Vec<Vec<usize>> = vec![vec![]];
        for f in flags {
            let k = f.levels().len();
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    (0..k).map(move |i| {
                        let mut t = t.clone();
                        t.push(i);
                        t
                    })
                })
                .collect();
        }
        Search {
            h,
            flags,
            n: h.n(),
            intersections: HashMap::new(),
            tuples,
        }
    }

    fn intersection(&mut self, t: &[usize]) -> Subspace {
        if let Some(s) = self.intersections.get(t) {
            return s.clone();
        }
        let mut s = Subspace::full(self.n);
        for (f, &i) in self.flags.iter().zip(t) {
            s = s.intersect(&f.levels()[i].space);
        }
        self.intersections.insert(t.to_vec(), s.clone());
        s
    }

    fn column_space(&mut self, c: usize, t: &[usize]) -> Option<ColumnSpace> {
        let v = self.intersection(t);
        if v.dim() == 0 {
            return None;
        }
        let pattern = self.h.pattern();
        let pinned: Vec<(usize, bool)> = (0..self.n)
            .filter_map(|r| match pattern[r][c] {
                Entry::Free => None,
                Entry::Zero => Some((r, false)),
                Entry::One => Some((r, true)),
            })
            .collect();
        let eqs: Vec<Vec<Q>> = pinned.iter().map(|&(r, _)| unit_row(self.n, r)).collect();
        let linear = v.intersect(&Subspace::from_equations(self.n, &eqs));
        let offset = if pinned.iter().any(|&(_, one)| one) {
            // v = Σ αₖ bₖ with the pinned coordinates prescribed.
            let b = v.basis();
            let rows: Vec<Vec<Q>> = pinned
                .iter()
                .map(|&(r, _)| b.iter().map(|bk| bk[r].clone()).collect())
                .collect();
            let rhs: Vec<Q> = pinned
                .iter()
                .map(|&(_, one)| if one { Q::one() } else { Q::zero() })
                .collect();
            let (alpha, _) = QMatrix::from_rows(rows).solve(&rhs)?;
            let mut a = vec![Q::zero(); self.n];
            for (bk, ak) in b.iter().zip(&alpha) {
                for r in 0..self.n {
                    a[r] += &bk[r] * ak;
                }
            }
            Some(a)
        } else {
            None
        };
        let span = match &offset {
            Some(a) => linear.sum(&Subspace::span(self.n, std::slice::from_ref(a))),
            None => linear.clone(),
        };
        if span.dim() == 0 {
            return None;
        }
        Some(ColumnSpace { span, offset, linear })
    }

    fn run(mut self) -> Result<Option<SplittingBasis>, GlError> {
        let counts: Vec<Vec<usize>> = self.flags.iter().map(|f| f.multiplicities()).collect();
        let mut assigned: Vec<(Vec<usize>, ColumnSpace)> = Vec::new();
        let mut remaining = counts;
        self.dfs(&mut assigned, &mut remaining)
    }

    fn dfs(
        &mut self,
        assigned: &mut Vec<(Vec<usize>, ColumnSpace)>,
        remaining: &mut Vec<Vec<usize>>,
    ) -> Result<Option<SplittingBasis>, GlError> {
        let c = assigned.len();
        if c == self.n {
            return self.finish(assigned);
        }
        let diag_pinned = self.h.pattern()[c][c] == Entry::One;
        for ti in 0..self.tuples.len() {
            let t = self.tuples[ti].clone();
            if t.iter().enumerate().any(|(f, &i)| remaining[f][i] == 0) {
                continue;
            }
            if diag_pinned
                && t.iter()
                    .enumerate()
                    .any(|(f, &i)| !self.flags[f].levels()[i].weight.is_zero())
            {
                continue;
            }
            let Some(cs) = self.column_space(c, &t) else { continue };
            if !rado_with_new(assigned.iter().map(|(_, s)| &s.span), &cs.span) {
                continue;
            }
            for (f, &i) in t.iter().enumerate() {
                remaining[f][i] -= 1;
            }
            assigned.push((t.clone(), cs));
            let found = self.dfs(assigned, remaining)?;
            assigned.pop();
            for (f, &i) in t.iter().enumerate() {
                remaining[f][i] += 1;
            }
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    fn finish(&self, assigned: &[(Vec<usize>, ColumnSpace)]) -> Result<Option<SplittingBasis>, GlError> {
        let n = self.n;
        let coords: Vec<Vec<Q>> = (0..self.flags.len())
            .map(|f| {
                assigned
                    .iter()
                    .map(|(t, _)| self.flags[f].levels()[t[f]].weight.clone())
                    .collect()
            })
            .collect();
        if !coords.iter().all(|mu| self.h.torus_weights_ok(mu)) {
            return Ok(None);
        }
        for d in self.h.det_constraints() {
            let projected: Vec<Subspace> = d.block.iter().map(|&c| assigned[c].1.span.project(&d.block)).collect();
            if !rado(&projected) {
                return Ok(None);
            }
        }
        // One column per prescribed determinant, rescaled at the end.
        let mut scale_cols: Vec<(usize, &[usize], Q)> = Vec::new();
        let value_blocks: Vec<(&[usize], &Q)> = self
            .h
            .det_constraints()
            .iter()
            .filter_map(|d| match &d.value {
                DetValue::Value(v) => Some((d.block.as_slice(), v)),
                DetValue::Unit => None,
            })
            .collect();
        for (k, (block, v)) in value_blocks.iter().enumerate() {
            let col = block.iter().copied().find(|&c| {
                assigned[c].1.offset.is_none()
                    && value_blocks
                        .iter()
                        .enumerate()
                        .all(|(k2, (b2, _))| k2 == k || !b2.contains(&c))
            });
            match col {
                Some(c) => scale_cols.push((c, block, (*v).clone())),
                None => {
                    return Err(GlError::Unsupported(format!(
                        "torus search in {} (no free column to normalise a determinant)",
                        self.h.name()
                    )))
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(SEARCH_SEED);
        for attempt in 0..200 {
            let r = 3 + attempt / 20;
            let mut cols: Vec<Vec<Q>> = assigned
                .iter()
                .map(|(_, cs)| {
                    let mut v = cs.offset.clone().unwrap_or_else(|| vec![Q::zero(); n]);
                    for b in cs.linear.basis() {
                        let t = Q::from_integer(rng.gen_range(-r..=r).into());
                        for i in 0..n {
                            v[i] += &b[i] * &t;
                        }
                    }
                    v
                })
                .collect();
            let mut g = QMatrix::from_cols(&cols);
            if g.det().is_zero() {
                continue;
            }
            let mut ok = true;
            for (c, block, v) in &scale_cols {
                let m = g.submatrix(block, block).det();
                if m.is_zero() {
                    ok = false;
                    break;
                }
                let s = v / m;
                for x in cols[*c].iter_mut() {
                    *x = &*x * &s;
                }
                g = QMatrix::from_cols(&cols);
            }
            if !ok || !self.h.contains(&g) {
                continue;
            }
            if self
                .flags
                .iter()
                .zip(&coords)
                .all(|(f, mu)| f.coords_in(&g).as_ref() == Some(mu))
            {
                return Ok(Some(SplittingBasis { basis: g, coords }));
            }
        }
        Err(LatticeError::Internal("generic choice failed although Rado's condition holds".into()).into())
    }
}

fn unit_row(n: usize, r: usize) -> Vec<Q> {
    super::subspace::unit(n, r)
}

/// Rado's condition `dim Σ_{c∈S} W_c ≥ |S|` for all subsets `S`.
fn rado(spaces: &[Subspace]) -> bool {
    let k = spaces.len();
    (1u32..(1 << k)).all(|mask| {
        let mut s = Subspace::zero(spaces[0].ambient());
        for (i, w) in spaces.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s = s.sum(w);
            }
        }
        s.dim() >= mask.count_ones() as usize
    })
}

/// Rado's condition restricted to subsets containing a new member, assuming
/// it already holds for the others.
fn rado_with_new<'b>(old: impl Iterator<Item = &'b Subspace>, new: &Subspace) -> bool {
    let old: Vec<&Subspace> = old.collect();
    let k = old.len();
    (0u32..(1 << k)).all(|mask| {
        let mut s = new.clone();
        for (i, w) in old.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s = s.sum(w);
            }
        }
        s.dim() > mask.count_ones() as usize
    })
}
