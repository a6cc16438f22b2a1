mod common;

use edifice::lattice::{CocharVec, Scalar, SPDForm, Q};
use edifice::metrics::{dist2, spherical_dist2, weyl_average, AdmissibleMetric};
use proptest::prelude::*;

use common::apartment;

fn vec2() -> impl Strategy<Value = CocharVec> {
    let part = (-8i64..=8, 1i64..=4).prop_map(|(p, r)| Q::new(p.into(), r.into()));
    prop::collection::vec((part.clone(), part), 2)
        .prop_map(|v| CocharVec::new(v.into_iter().map(|(a, b)| Scalar::new(a, b, 2)).collect()))
}

proptest! {
    #[test]
    fn homogeneous_and_symmetric(x in vec2(), y in vec2(), a in 1i64..=7, b in 1i64..=7) {
        let m = AdmissibleMetric::standard(&apartment("sl3.toml"));
        let s = Scalar::frac(a, b);
        let d = dist2(&m, &x, &y).unwrap();
        prop_assert_eq!(dist2(&m, &x.scale(&s), &y.scale(&s)).unwrap(), s.clone() * s * d.clone());
        prop_assert_eq!(dist2(&m, &y, &x).unwrap(), d);
    }

    #[test]
    fn averaged_forms_are_invariant(entries in prop::collection::vec(-3i64..=3, 4)) {
        let a = apartment("gl2_semidirect.toml");
        let m: Vec<Vec<i64>> = (0..2)
            .map(|i| (0..2).map(|j| entries[2 * i] * entries[2 * j] + entries[2 * i + 1] * entries[2 * j + 1] + i64::from(i == j)).collect())
            .collect();
        let f = SPDForm::new(edifice::lattice::QMatrix::from_i64(&m)).unwrap();
        prop_assert!(weyl_average(&f, &a).unwrap().is_weyl_invariant(&a));
    }
}

#[test]
fn spherical_example() {
    let m = AdmissibleMetric::base(SPDForm::identity(2));
    let d = spherical_dist2(&m, &CocharVec::ints(&[1, 0]), &CocharVec::ints(&[1, 1])).unwrap();
    assert_eq!(d, Scalar::int(2) - Scalar::sqrt(2));
    assert!(spherical_dist2(&m, &CocharVec::ints(&[0, 0]), &CocharVec::ints(&[1, 1])).is_err());
}

#[test]
fn non_invariant_forms_are_rejected() {
    let a = apartment("sl3.toml");
    let f = SPDForm::new(edifice::lattice::QMatrix::from_i64(&[vec![3, 1], vec![1, 2]])).unwrap();
    assert!(AdmissibleMetric::for_apartment(f.clone(), &a).is_err());
    assert!(weyl_average(&f, &a).unwrap().is_weyl_invariant(&a));
}
