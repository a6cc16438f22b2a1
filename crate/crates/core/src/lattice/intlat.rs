//! Integer row echelon forms and ℤ-span membership.

use num::bigint::BigInt;
use num::{Integer, Signed, Zero};

/// Integer row echelon form of the given rows, using unimodular row
/// operations only; pivots are positive and zero rows are dropped.
pub fn integer_echelon(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    for c in 0..cols {
        loop {
            let nz: Vec<usize> = (0..m.len()).filter(|&i| !m[i][c].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            // Reduce every other row by the row with the smallest pivot.
            let p = *nz.iter().min_by_key(|&&i| m[i][c].abs()).unwrap();
            for &i in &nz {
                if i != p {
                    let f = m[i][c].div_floor(&m[p][c]);
                    let prow = m[p].clone();
                    for (x, y) in m[i].iter_mut().zip(&prow) {
                        *x -= &f * y;
                    }
                }
            }
        }
        if let Some(p) = (0..m.len()).find(|&i| !m[i][c].is_zero()) {
            let mut row = m.remove(p);
            if row[c].is_negative() {
                row.iter_mut().for_each(|x| *x = -x.clone());
            }
            out.push(row);
        }
    }
    out
}

/// True when `v` is an integer combination of `gens`.
pub fn in_integer_span(gens: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    let ech = integer_echelon(gens);
    let mut v = v.to_vec();
    for row in &ech {
        let c = row.iter().position(|x| !x.is_zero()).unwrap();
        let (f, r) = v[c].div_rem(&row[c]);
        if !r.is_zero() {
            return false;
        }
        for (x, y) in v.iter_mut().zip(row) {
            *x -= &f * y;
        }
    }
    v.iter().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn span_membership() {
        let gens = vec![b(&[2, 0]), b(&[0, 3])];
        assert!(in_integer_span(&gens, &b(&[4, -3])));
        assert!(!in_integer_span(&gens, &b(&[1, 0])));
        let gens = vec![b(&[2]), b(&[-2]), b(&[0])];
        assert!(in_integer_span(&gens, &b(&[4])));
        assert!(!in_integer_span(&gens, &b(&[3])));
        let gens = vec![b(&[4, 6]), b(&[6, 9])];
        assert!(in_integer_span(&gens, &b(&[2, 3])));
        assert!(!in_integer_span(&gens, &b(&[1, 1])));
    }
}
