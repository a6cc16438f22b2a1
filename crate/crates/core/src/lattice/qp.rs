//! Exact minimum-norm point of `{λ : ⟨λ,χ⟩ ≥ 1}` by active-set enumeration.

use num::{One, Signed, Zero};

use super::{pair_q, strict_feasible, Feasibility, LatticeError, QMatrix, SPDForm, WeightVec, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QpSolution {
    pub lambda: Vec<Q>,
    /// One multiplier per input constraint; repeated constraints share the
    /// multiplier of their first occurrence.
    pub multipliers: Vec<Q>,
    pub active: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QpOutcome {
    Optimal(QpSolution),
    Infeasible,
}

impl QpSolution {
    /// Checks primal feasibility, dual feasibility, complementary slackness
    /// and stationarity `2Mλ = Σ μᵢχᵢ` exactly.
    pub fn verify_kkt(&self, constraints: &[WeightVec], form: &SPDForm) -> bool {
        if self.multipliers.len() != constraints.len() {
            return false;
        }
        let r = self.lambda.len();
        let mut grad = form.matrix().mul_vec(&self.lambda);
        grad.iter_mut().for_each(|g| *g *= Q::from_integer(2.into()));
        let mut combo = vec![Q::zero(); r];
        for (chi, mu) in constraints.iter().zip(&self.multipliers) {
            let s = pair_q(&self.lambda, chi);
            if s < Q::one() || mu.is_negative() {
                return false;
            }
            if !mu.is_zero() && !s.is_one() {
                return false;
            }
            for (c, &x) in combo.iter_mut().zip(&chi.coeffs) {
                *c += mu * Q::from_integer(x.into());
            }
        }
        grad == combo
    }
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Minimises `λᵀMλ` subject to `⟨λ,χ⟩ ≥ 1` for every constraint.
///
/// Infeasibility is decided by the simplex first; otherwise active sets with
/// linearly independent rows are tried in order of size, and the first one
/// whose KKT point is primal and dual feasible is the unique optimum.
pub fn min_norm_qp(constraints: &[WeightVec], form: &SPDForm) -> Result<QpOutcome, LatticeError> {
    let r = form.dim();
    for chi in constraints {
        if chi.len() != r {
            return Err(LatticeError::DimensionMismatch {
                expected: r,
                found: chi.len(),
            });
        }
    }
    let mut distinct: Vec<WeightVec> = Vec::new();
    let mut first: Vec<usize> = Vec::new();
    for (i, chi) in constraints.iter().enumerate() {
        if !distinct.contains(chi) {
            distinct.push(chi.clone());
            first.push(i);
        }
    }
    if distinct.is_empty() {
        return Ok(QpOutcome::Optimal(QpSolution {
            lambda: vec![Q::zero(); r],
            multipliers: vec![],
            active: vec![],
        }));
    }
    if let Feasibility::Infeasible = strict_feasible(&distinct, &[], &[], r)? {
        return Ok(QpOutcome::Infeasible);
    }
    let minv = form
        .matrix()
        .inverse()
        .ok_or(LatticeError::NotPositiveDefinite)?;
    for k in 1..=r.min(distinct.len()) {
        for subset in combinations(distinct.len(), k) {
            let rows: Vec<Vec<Q>> = subset.iter().map(|&i| distinct[i].to_q()).collect();
            let a = QMatrix::from_rows(rows);
            if a.rank() < k {
                continue;
            }
            let at = a.transpose();
            let g = &(&a * &minv) * &at;
            let Some(ginv) = g.inverse() else { continue };
            let ones = vec![Q::one(); k];
            let y = ginv.mul_vec(&ones);
            if y.iter().any(|v| v.is_negative()) {
                continue;
            }
            let lambda = minv.mul_vec(&at.mul_vec(&y));
            if distinct.iter().any(|chi| pair_q(&lambda, chi) < Q::one()) {
                continue;
            }
            let mut multipliers = vec![Q::zero(); constraints.len()];
            let mut active = Vec::new();
            for (pos, &i) in subset.iter().enumerate() {
                multipliers[first[i]] = &y[pos] * Q::from_integer(2.into());
            }
            for (i, chi) in constraints.iter().enumerate() {
                if pair_q(&lambda, chi).is_one() {
                    active.push(i);
                }
            }
            return Ok(QpOutcome::Optimal(QpSolution {
                lambda,
                multipliers,
                active,
            }));
        }
    }
    Err(LatticeError::Internal(
        "feasible program without a KKT point".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::super::{q, qf};
    use super::*;

    fn w(v: &[i64]) -> WeightVec {
        WeightVec::new(v.to_vec())
    }

    fn solve(cons: &[WeightVec]) -> QpSolution {
        let form = SPDForm::identity(2);
        match min_norm_qp(cons, &form).unwrap() {
            QpOutcome::Optimal(s) => {
                assert!(s.verify_kkt(cons, &form));
                s
            }
            QpOutcome::Infeasible => panic!("unexpectedly infeasible"),
        }
    }

    #[test]
    fn half_space_and_corner() {
        assert_eq!(solve(&[w(&[1, 0])]).lambda, vec![q(1), q(0)]);
        assert_eq!(solve(&[w(&[1, 0]), w(&[0, 1])]).lambda, vec![q(1), q(1)]);
    }

    #[test]
    fn two_constraint_example() {
        // Frozen from a grid sweep: the corner (1,1) is the closest feasible point.
        let s = solve(&[w(&[1, 0]), w(&[-1, 2])]);
        assert_eq!(s.lambda, vec![q(1), q(1)]);
        assert_eq!(s.multipliers, vec![qf(3, 1), q(1)]);
    }

    #[test]
    fn infeasible() {
        let form = SPDForm::identity(2);
        assert_eq!(
            min_norm_qp(&[w(&[1, 0]), w(&[-1, 0])], &form).unwrap(),
            QpOutcome::Infeasible
        );
    }

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }
}
