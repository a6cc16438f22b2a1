//! Subspaces of ℚⁿ in reduced row-echelon form.

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::lattice::{QMatrix, Q};

/// A subspace of `ℚⁿ`, stored by its reduced row-echelon basis so that
/// equality is literal comparison.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    n: usize,
    #[serde(with = "crate::lattice::qser::nested")]
    basis: Vec<Vec<Q>>,
}

impl Subspace {
    pub fn span(n: usize, vectors: &[Vec<Q>]) -> Subspace {
        if vectors.is_empty() {
            return Subspace::zero(n);
        }
        let (r, pivots) = QMatrix::from_rows(vectors.to_vec()).rref();
        Subspace {
            n,
            basis: (0..pivots.len()).map(|i| r.row(i)).collect(),
        }
    }

    pub fn zero(n: usize) -> Subspace {
        Subspace { n, basis: vec![] }
    }

    pub fn full(n: usize) -> Subspace {
        Subspace {
            n,
            basis: QMatrix::identity(n).to_rows(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    /// Row vectors spanning the orthogonal complement; `v ∈ U` iff every one
    /// of them pairs to zero with `v`.
    pub fn annihilator(&self) -> Vec<Vec<Q>> {
        if self.basis.is_empty() {
            return QMatrix::identity(self.n).to_rows();
        }
        QMatrix::from_rows(self.basis.clone()).kernel()
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.annihilator()
            .iter()
            .all(|a| a.iter().zip(v).fold(Q::zero(), |s, (x, y)| s + x * y).is_zero())
    }

    pub fn contains_space(&self, other: &Subspace) -> bool {
        let ann = self.annihilator();
        other.basis.iter().all(|v| {
            ann.iter()
                .all(|a| a.iter().zip(v).fold(Q::zero(), |s, (x, y)| s + x * y).is_zero())
        })
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut v = self.basis.clone();
        v.extend(other.basis.iter().cloned());
        Subspace::span(self.n, &v)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        let mut ann = self.annihilator();
        ann.extend(other.annihilator());
        Subspace::from_equations(self.n, &ann)
    }

    /// `{v : a·v = 0 for every row a}`.
    pub fn from_equations(n: usize, rows: &[Vec<Q>]) -> Subspace {
        if rows.is_empty() {
            return Subspace::full(n);
        }
        Subspace::span(n, &QMatrix::from_rows(rows.to_vec()).kernel())
    }

    /// `g·U`.
    pub fn image(&self, g: &QMatrix) -> Subspace {
        let v: Vec<Vec<Q>> = self.basis.iter().map(|b| g.mul_vec(b)).collect();
        Subspace::span(self.n, &v)
    }

    /// Vectors from `candidates` (in order) extending a basis of `self` to a
    /// basis of `target`; `self ⊆ target` is assumed.
    pub fn complement_in(&self, target: &Subspace) -> Vec<Vec<Q>> {
        let mut have = self.clone();
        let mut out = Vec::new();
        let mut candidates: Vec<Vec<Q>> = (0..self.n)
            .map(|i| unit(self.n, i))
            .filter(|e| target.contains(e))
            .collect();
        candidates.extend(target.basis.iter().cloned());
        for c in candidates {
            if have.dim() == target.dim() {
                break;
            }
            if !have.contains(&c) {
                have = have.sum(&Subspace::span(self.n, std::slice::from_ref(&c)));
                out.push(c);
            }
        }
        out
    }

    /// Restriction to the coordinates in `idx`, as a subspace of `ℚ^{|idx|}`.
    pub fn project(&self, idx: &[usize]) -> Subspace {
        let v: Vec<Vec<Q>> = self
            .basis
            .iter()
            .map(|b| idx.iter().map(|&i| b[i].clone()).collect())
            .collect();
        Subspace::span(idx.len(), &v)
    }
}

pub fn unit(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::from_integer(1.into());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::q;

    fn v(x: &[i64]) -> Vec<Q> {
        x.iter().map(|&a| q(a)).collect()
    }

    #[test]
    fn lattice_operations() {
        let a = Subspace::span(3, &[v(&[1, 1, 0]), v(&[0, 0, 1])]);
        let b = Subspace::span(3, &[v(&[1, 0, 0]), v(&[0, 1, 0])]);
        let c = a.intersect(&b);
        assert_eq!(c, Subspace::span(3, &[v(&[2, 2, 0])]));
        assert_eq!(a.sum(&b), Subspace::full(3));
        assert!(a.contains(&v(&[3, 3, -1])));
        assert!(!a.contains(&v(&[1, 0, 0])));
        assert_eq!(c.complement_in(&a), vec![v(&[0, 0, 1])]);
        assert_eq!(Subspace::zero(3).intersect(&a), Subspace::zero(3));
    }
}
