mod common;

use std::collections::BTreeSet;

use edifice::apartment::{
    cochar_approx, enumerate_fan, parabolic_key, parabolic_poset, product, sign_partition, simplicial_witness,
    ApartmentData, SignPattern,
};
use edifice::lattice::{CocharVec, Scalar, Sign, Q};
use proptest::prelude::*;

use common::*;

fn keys_of(a: &ApartmentData) -> BTreeSet<(Vec<usize>, Vec<usize>)> {
    enumerate_fan(a)
        .unwrap()
        .keys()
        .iter()
        .map(|k| (k.geq0.clone(), k.zero.clone()))
        .collect()
}

fn weights_of(a: &ApartmentData) -> Vec<Vec<i64>> {
    a.weights().iter().map(|w| w.coeffs.clone()).collect()
}

#[test]
fn semidirect_fan_counts() {
    let a = apartment("gl2_semidirect.toml");
    let fan = enumerate_fan(&a).unwrap();
    assert_eq!(fan.cells.len(), 13);
    assert_eq!(fan.chambers(2).len(), 6);
    assert_eq!(fan.parabolic_classes().len(), 8);
    assert_eq!(keys_of(&a), grid_keys(&weights_of(&a), 2, 4));
    let poset = parabolic_poset(&a, &fan);
    assert!(poset.is_partial_order());
    assert!(simplicial_witness(&poset).is_some());
}

#[test]
fn sl3_and_products() {
    let sl3 = apartment("sl3.toml");
    assert_eq!(keys_of(&sl3).len(), 13);
    let sl2 = apartment("sl2.toml");
    let p = product(&sl2, &sl2).unwrap();
    let keys = keys_of(&p);
    assert_eq!(keys.len(), 9);
    assert_eq!(keys, grid_keys(&weights_of(&p), 2, 3));
    let poset = parabolic_poset(&p, &enumerate_fan(&p).unwrap());
    assert!(simplicial_witness(&poset).is_none());
}

#[test]
fn torus_fan() {
    let t = apartment("torus1.toml");
    assert_eq!(enumerate_fan(&t).unwrap().cells.len(), 3);
    let trivial = ApartmentData::torus(2);
    assert_eq!(keys_of(&trivial).len(), 1);
}

fn lambda2() -> impl Strategy<Value = CocharVec> {
    let part = (-8i64..=8, 1i64..=4).prop_map(|(p, r)| Q::new(p.into(), r.into()));
    prop::collection::vec((part.clone(), part), 2)
        .prop_map(|v| CocharVec::new(v.into_iter().map(|(a, b)| Scalar::new(a, b, 2)).collect()))
}

fn pos_q() -> impl Strategy<Value = Scalar> {
    (1i64..=9, 1i64..=9).prop_map(|(p, r)| Scalar::frac(p, r))
}

proptest! {
    #[test]
    fn scaling_keeps_key(l in lambda2(), s in pos_q(), which in 0usize..2) {
        let a = apartment(["sl3.toml", "gl2_semidirect.toml"][which]);
        prop_assert_eq!(parabolic_key(&a, &l.scale(&s)).unwrap(), parabolic_key(&a, &l).unwrap());
    }

    #[test]
    fn approximation_keeps_signs(l in lambda2(), which in 0usize..2) {
        let a = apartment(["sl3.toml", "gl2_semidirect.toml"][which]);
        let approx = cochar_approx(&a, &l).unwrap();
        prop_assert!(approx.is_integral());
        prop_assert_eq!(sign_partition(&a, &approx).unwrap(), sign_partition(&a, &l).unwrap());
    }

    #[test]
    fn weyl_generators_permute_signs(l in lambda2()) {
        let a = apartment("sl3.toml");
        let s = sign_partition(&a, &l).unwrap();
        for w in a.weyl_gens() {
            let perm = a.weight_permutation(w).unwrap();
            let img = sign_partition(&a, &w.apply(&l).unwrap()).unwrap();
            prop_assert_eq!(img, s.permuted(&perm));
        }
    }

    #[test]
    fn perturbation_shrinks_geq0(x in -6i64..=6, y in -6i64..=6, dx in -1i64..=1, dy in -1i64..=1) {
        let a = apartment("gl2_semidirect.toml");
        let l = CocharVec::ints(&[x, y]);
        // Pairings of λ are integers, so a perturbation of size 1/10 in each
        // coordinate (pairings change by at most 2/10) cannot flip a non-zero sign.
        let mu = CocharVec::new(vec![Scalar::frac(dx, 10), Scalar::frac(dy, 10)]);
        let big = parabolic_key(&a, &l).unwrap().geq0;
        let small = parabolic_key(&a, &l.add(&mu)).unwrap().geq0;
        prop_assert!(small.iter().all(|i| big.contains(i)));
    }

    #[test]
    fn sample_lands_in_one_cell(l in lambda2(), which in 0usize..2) {
        let a = apartment(["sl3.toml", "gl2_semidirect.toml"][which]);
        let fan = enumerate_fan(&a).unwrap();
        let s = sign_partition(&a, &l).unwrap();
        prop_assert_eq!(fan.cells.iter().filter(|c| c.pattern == s).count(), 1);
    }
}

#[test]
fn cell_witnesses_are_distinct() {
    for name in ["sl3.toml", "gl2_semidirect.toml", "gl3.toml"] {
        let a = apartment(name);
        let fan = enumerate_fan(&a).unwrap();
        let patterns: BTreeSet<SignPattern> = fan
            .cells
            .iter()
            .map(|c| sign_partition(&a, &c.witness).unwrap())
            .collect();
        assert_eq!(patterns.len(), fan.cells.len(), "{name}");
        for c in &fan.cells {
            assert_eq!(sign_partition(&a, &c.witness).unwrap(), c.pattern);
        }
    }
}

#[test]
fn zero_has_everything() {
    let a = apartment("gl2_semidirect.toml");
    let s = sign_partition(&a, &CocharVec::ints(&[0, 0])).unwrap();
    assert_eq!(s.signs(5).unwrap(), vec![Sign::Zero; 5]);
    assert!(s.plus.is_empty() && s.minus.is_empty());
}
