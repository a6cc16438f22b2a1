//! Independent oracles shared by the integration tests and the acceptance
//! harness. They use plain `i64`/`f64`-free integer arithmetic and do not
//! call the code paths they check.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use edifice::apartment::ApartmentData;
use edifice::io::{load, GroupSpec};
use edifice::lattice::{q, QMatrix, Scalar, Q};
use rand::Rng;

pub fn spec_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(rel)
}

pub fn load_spec(rel: &str) -> GroupSpec {
    load(&spec_path(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn apartment(rel: &str) -> ApartmentData {
    load_spec(rel).to_apartment().unwrap()
}

/// `(geq0, zero)` index sets of `λ`, from integer pairings.
pub fn key_of(weights: &[Vec<i64>], lambda: &[i64]) -> (Vec<usize>, Vec<usize>) {
    let pairings: Vec<i64> = weights
        .iter()
        .map(|w| w.iter().zip(lambda).map(|(a, b)| a * b).sum())
        .collect();
    let geq0 = (0..weights.len()).filter(|&i| pairings[i] >= 0).collect();
    let zero = (0..weights.len()).filter(|&i| pairings[i] == 0).collect();
    (geq0, zero)
}

/// Every key realised by an integer point of `[−r, r]^rank`.
pub fn grid_keys(weights: &[Vec<i64>], rank: usize, r: i64) -> BTreeSet<(Vec<usize>, Vec<usize>)> {
    let mut out = BTreeSet::new();
    let mut v = vec![-r; rank];
    loop {
        out.insert(key_of(weights, &v));
        let mut i = 0;
        while i < rank {
            if v[i] < r {
                v[i] += 1;
                break;
            }
            v[i] = -r;
            i += 1;
        }
        if i == rank {
            return out;
        }
    }
}

/// The eight regions of the `GL₂⋉V` table: a representative `(a, b)`, the
/// label and the Lie-algebra weights of `P ⋉ W`, written in the basis
/// `ε₁, ε₂`.
pub fn semidirect_table() -> Vec<((i64, i64), &'static str, Vec<[i64; 2]>)> {
    let gl2 = vec![[1, -1], [-1, 1], [0, 0]];
    let bp = vec![[1, -1], [0, 0]];
    let bm = vec![[-1, 1], [0, 0]];
    let v = vec![[1, 0], [0, 1]];
    let v1 = vec![[1, 0]];
    let v2 = vec![[0, 1]];
    let join = |a: &Vec<[i64; 2]>, b: &Vec<[i64; 2]>| a.iter().chain(b).copied().collect::<Vec<_>>();
    vec![
        ((1, 1), "G", join(&gl2, &v)),
        ((-1, -1), "GL2", gl2.clone()),
        ((2, 1), "B+xV", join(&bp, &v)),
        ((-2, -1), "B-", bm.clone()),
        ((1, -1), "B+xV1", join(&bp, &v1)),
        ((-1, 1), "B-xV2", join(&bm, &v2)),
        ((-1, -2), "B+", bp.clone()),
        ((1, 2), "B-xV", join(&bm, &v)),
    ]
}

/// Indices of `weights` that occur in `lie`.
pub fn indices_of(weights: &[Vec<i64>], lie: &[[i64; 2]]) -> Vec<usize> {
    (0..weights.len())
        .filter(|&i| lie.iter().any(|w| w[..] == weights[i][..]))
        .collect()
}

/// The primitive integer vector with `‖λ‖² ≤ bound` maximising
/// `min_χ ⟨λ,χ⟩ / ‖λ‖` among those with all pairings positive, compared
/// exactly through `m²/‖λ‖²`. Ties go to the lexicographically least vector.
///
/// Coordinates range over `[−r, r]`; callers pick `r` with
/// `r² ≥ bound / (least eigenvalue of the form)`.
pub fn brute_force_ray(support: &[Vec<i64>], form: &[Vec<i64>], bound: i64, r: i64) -> Option<Vec<i64>> {
    let rank = form.len();
    let norm = |v: &[i64]| -> i64 {
        (0..rank)
            .map(|i| (0..rank).map(|j| v[i] * form[i][j] * v[j]).sum::<i64>())
            .sum()
    };
    let mut best: Option<(Q, Vec<i64>)> = None;
    let mut v = vec![-r; rank];
    loop {
        let n = norm(&v);
        if n > 0 && n <= bound && gcd_all(&v) == 1 {
            let m = support
                .iter()
                .map(|chi| chi.iter().zip(&v).map(|(a, b)| a * b).sum::<i64>())
                .min()
                .unwrap_or(0);
            if m > 0 {
                let score = Q::new((m * m).into(), n.into());
                if best.as_ref().map_or(true, |(s, _)| score > *s) {
                    best = Some((score, v.clone()));
                }
            }
        }
        let mut i = rank;
        loop {
            if i == 0 {
                return best.map(|(_, v)| v);
            }
            i -= 1;
            if v[i] < r {
                v[i] += 1;
                for x in v.iter_mut().skip(i + 1) {
                    *x = -r;
                }
                break;
            }
        }
    }
}

fn gcd_all(v: &[i64]) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    v.iter().fold(0, |g, &x| gcd(g, x))
}

/// A random element `p + r·√2` with small rational parts.
pub fn random_q_sqrt2<R: Rng>(rng: &mut R) -> Scalar {
    let part = |rng: &mut R| Q::new(rng.gen_range(-6i64..=6).into(), rng.gen_range(1i64..=4).into());
    let a = part(rng);
    let b = part(rng);
    Scalar::new(a, b, 2)
}

pub fn random_q<R: Rng>(rng: &mut R, r: i64) -> Q {
    Q::new(rng.gen_range(-r..=r).into(), rng.gen_range(1i64..=3).into())
}

/// A random unipotent upper-triangular matrix of size `n`.
pub fn random_upper_unipotent<R: Rng>(rng: &mut R, n: usize) -> QMatrix {
    let mut m = QMatrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            m[(i, j)] = q(rng.gen_range(-4..=4));
        }
    }
    m
}
