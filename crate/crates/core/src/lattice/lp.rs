//! Exact phase-I simplex and strict feasibility of homogeneous systems.

use num::{One, Signed, Zero};

use super::{pair, primitive, q, CocharVec, LatticeError, QMatrix, Sign, WeightVec, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(CocharVec),
    Infeasible,
}

impl Feasibility {
    pub fn witness(&self) -> Option<&CocharVec> {
        match self {
            Feasibility::Feasible(v) => Some(v),
            Feasibility::Infeasible => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Finds `x ≥ 0` with `Ax = b`, or `None` if no such `x` exists.
///
/// Phase I of the dense tableau simplex method with Bland's rule, so it
/// terminates on degenerate problems.
pub fn lp_feasible(a: &QMatrix, b: &[Q]) -> Option<Vec<Q>> {
    let m = a.rows();
    let n = a.cols();
    assert_eq!(b.len(), m, "right-hand side length mismatch");
    let width = n + m;
    // Tableau rows: [A | I | b], with rows negated so that b ≥ 0.
    let mut t: Vec<Vec<Q>> = (0..m)
        .map(|i| {
            let flip = b[i].is_negative();
            let mut row = vec![Q::zero(); width + 1];
            for j in 0..n {
                row[j] = if flip { -a[(i, j)].clone() } else { a[(i, j)].clone() };
            }
            row[n + i] = Q::one();
            row[width] = if flip { -b[i].clone() } else { b[i].clone() };
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..width).collect();
    // Reduced costs of w = Σ artificials, and -w in the last slot.
    let mut cost = vec![Q::zero(); width + 1];
    for row in &t {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width] -= &row[width];
    }
    loop {
        let Some(enter) = (0..width).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Q)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            // Unbounded direction cannot occur in phase I (w ≥ 0).
            break;
        };
        let piv = t[r][enter].clone();
        for x in t[r].iter_mut() {
            *x /= &piv;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        if !cost[enter].is_zero() {
            let f = cost[enter].clone();
            for (x, p) in cost.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
        basis[r] = enter;
    }
    if !cost[width].is_zero() {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &bi) in basis.iter().enumerate() {
        if bi < n {
            x[bi] = t[i][width].clone();
        }
    }
    Some(x)
}

/// Finds an integer `v` with `⟨v,χ⟩ > 0` on `strict`, `≥ 0` on `nonneg`
/// and `= 0` on `zero`, or reports infeasibility.
///
/// The system is homogeneous, so strict inequalities are replaced by
/// `⟨v,χ⟩ ≥ 1`; the rational solution is scaled to a primitive vector.
pub fn strict_feasible(
    strict: &[WeightVec],
    nonneg: &[WeightVec],
    zero: &[WeightVec],
    rank: usize,
) -> Result<Feasibility, LatticeError> {
    if rank == 0 {
        return Err(LatticeError::Internal("strict_feasible needs rank >= 1".into()));
    }
    for chi in strict.iter().chain(nonneg).chain(zero) {
        if chi.len() != rank {
            return Err(LatticeError::DimensionMismatch {
                expected: rank,
                found: chi.len(),
            });
        }
    }
    let ineq = strict.len() + nonneg.len();
    let rows = ineq + zero.len();
    let cols = 2 * rank + ineq;
    let mut a = QMatrix::zeros(rows, cols);
    let mut b = vec![Q::zero(); rows];
    for (i, chi) in strict.iter().chain(nonneg).chain(zero).enumerate() {
        for (k, &c) in chi.coeffs.iter().enumerate() {
            a[(i, k)] = q(c);
            a[(i, rank + k)] = q(-c);
        }
        if i < ineq {
            a[(i, 2 * rank + i)] = q(-1);
        }
        if i < strict.len() {
            b[i] = Q::one();
        }
    }
    let Some(x) = lp_feasible(&a, &b) else {
        return Ok(Feasibility::Infeasible);
    };
    let v: Vec<Q> = (0..rank).map(|k| &x[k] - &x[rank + k]).collect();
    let v = CocharVec::rational(&primitive(&v));
    let ok = strict.iter().all(|c| pair(&v, c).map(|s| s.sign()) == Ok(Sign::Plus))
        && nonneg.iter().all(|c| pair(&v, c).map(|s| s.sign()) != Ok(Sign::Minus))
        && zero.iter().all(|c| pair(&v, c).map(|s| s.sign()) == Ok(Sign::Zero));
    if !ok {
        return Err(LatticeError::Internal("simplex witness failed re-check".into()));
    }
    Ok(Feasibility::Feasible(v))
}
