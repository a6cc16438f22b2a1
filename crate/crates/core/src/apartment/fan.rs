//! Faces of the hyperplane arrangement `{χ = 0}` cut out by the weights.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{ApartmentData, ParabolicKey, SignPattern};
use crate::error::ApartmentError;
use crate::lattice::{strict_feasible, CocharVec, Feasibility, QMatrix, Sign, WeightVec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FanCell {
    pub pattern: SignPattern,
    pub witness: CocharVec,
    /// Dimension of the cell's linear span.
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeFan {
    pub cells: Vec<FanCell>,
    pub key_index: BTreeMap<ParabolicKey, Vec<usize>>,
}

impl ConeFan {
    pub fn keys(&self) -> Vec<&ParabolicKey> {
        self.key_index.keys().collect()
    }

    /// Distinct `geq0` sets, i.e. the distinct parabolic subgroups.
    pub fn parabolic_classes(&self) -> Vec<Vec<usize>> {
        let mut v: Vec<Vec<usize>> = self.key_index.keys().map(|k| k.geq0.clone()).collect();
        v.dedup();
        v.sort();
        v.dedup();
        v
    }

    /// Cells of full dimension (the chambers).
    pub fn chambers(&self, rank: usize) -> Vec<&FanCell> {
        self.cells.iter().filter(|c| c.dim == rank).collect()
    }

    pub fn cell_of(&self, pattern: &SignPattern) -> Option<usize> {
        self.cells.iter().position(|c| &c.pattern == pattern)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FanOptions {
    pub max_rank: usize,
}

impl Default for FanOptions {
    fn default() -> FanOptions {
        FanOptions { max_rank: 6 }
    }
}

pub fn enumerate_fan(a: &ApartmentData) -> Result<ConeFan, ApartmentError> {
    enumerate_fan_with(a, FanOptions::default())
}

/// Enumerates every realisable sign pattern.
///
/// The distinct hyperplanes are visited in order; each partial pattern is
/// extended by `−`, `0`, `+` on the next hyperplane and kept only if the
/// simplex finds a witness. Extensions of one level run in parallel and the
/// result is sorted, so the output does not depend on scheduling.
pub fn enumerate_fan_with(a: &ApartmentData, opts: FanOptions) -> Result<ConeFan, ApartmentError> {
    let rank = a.rank();
    if rank > opts.max_rank {
        return Err(ApartmentError::RankBound {
            rank,
            bound: opts.max_rank,
        });
    }
    let mut hyperplanes: Vec<WeightVec> = Vec::new();
    for w in a.weights() {
        if let Some(h) = w.hyperplane() {
            if !hyperplanes.contains(&h) {
                hyperplanes.push(h);
            }
        }
    }
    // (signs on hyperplanes so far, witness)
    let mut frontier: Vec<(Vec<Sign>, CocharVec)> = vec![(vec![], CocharVec::zero(rank))];
    for k in 0..hyperplanes.len() {
        let next: Vec<Result<Vec<(Vec<Sign>, CocharVec)>, ApartmentError>> = frontier
            .par_iter()
            .map(|(signs, _)| {
                let mut out = Vec::new();
                for s in [Sign::Minus, Sign::Zero, Sign::Plus] {
                    let mut ext = signs.clone();
                    ext.push(s);
                    if let Feasibility::Feasible(w) = realize_on(&hyperplanes[..=k], &ext, rank)? {
                        out.push((ext, w));
                    }
                }
                Ok(out)
            })
            .collect();
        frontier = Vec::new();
        for r in next {
            frontier.extend(r?);
        }
    }
    let mut cells: Vec<FanCell> = frontier
        .into_iter()
        .map(|(hsigns, witness)| {
            let signs: Vec<Sign> = a
                .weights()
                .iter()
                .map(|w| match w.hyperplane() {
                    None => Sign::Zero,
                    Some(h) => {
                        let i = hyperplanes.iter().position(|x| *x == h).unwrap();
                        let same = w.coeffs.iter().zip(&h.coeffs).any(|(x, y)| x * y > 0);
                        match (hsigns[i], same) {
                            (Sign::Zero, _) => Sign::Zero,
                            (s, true) => s,
                            (Sign::Plus, false) => Sign::Minus,
                            (_, false) => Sign::Plus,
                        }
                    }
                })
                .collect();
            let zero_rows: Vec<Vec<i64>> = hyperplanes
                .iter()
                .zip(&hsigns)
                .filter(|(_, s)| **s == Sign::Zero)
                .map(|(h, _)| h.coeffs.clone())
                .collect();
            let dim = if zero_rows.is_empty() {
                rank
            } else {
                rank - QMatrix::from_i64(&zero_rows).rank()
            };
            FanCell {
                pattern: SignPattern::from_signs(&signs),
                witness,
                dim,
            }
        })
        .collect();
    cells.sort_by(|x, y| x.pattern.compact().cmp(&y.pattern.compact()));
    let mut key_index: BTreeMap<ParabolicKey, Vec<usize>> = BTreeMap::new();
    for (i, c) in cells.iter().enumerate() {
        key_index.entry(c.pattern.key()).or_default().push(i);
    }
    Ok(ConeFan { cells, key_index })
}

fn realize_on(hyperplanes: &[WeightVec], signs: &[Sign], rank: usize) -> Result<Feasibility, ApartmentError> {
    if rank == 0 {
        return Ok(Feasibility::Feasible(CocharVec::zero(0)));
    }
    let mut strict = Vec::new();
    let mut zero = Vec::new();
    for (h, s) in hyperplanes.iter().zip(signs) {
        match s {
            Sign::Plus => strict.push(h.clone()),
            Sign::Minus => strict.push(h.neg()),
            Sign::Zero => zero.push(h.clone()),
        }
    }
    Ok(strict_feasible(&strict, &[], &zero, rank)?)
}
