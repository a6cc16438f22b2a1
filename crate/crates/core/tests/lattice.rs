use edifice::lattice::{
    gen_eig_bounds, min_norm_qp, pair, strict_feasible, CocharVec, Feasibility, QMatrix, QpOutcome, SPDForm, Scalar,
    WeightVec, Q,
};
use num::{One, Signed, Zero};
use proptest::prelude::*;

fn small_q() -> impl Strategy<Value = Q> {
    (-12i64..=12, 1i64..=5).prop_map(|(p, r)| Q::new(p.into(), r.into()))
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (small_q(), small_q()).prop_map(|(a, b)| Scalar::new(a, b, 2))
}

fn weight(rank: usize) -> impl Strategy<Value = WeightVec> {
    prop::collection::vec(-3i64..=3, rank).prop_map(WeightVec::new)
}

/// `AᵀA + I` for a small integer `A`.
fn spd(n: usize) -> impl Strategy<Value = SPDForm> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, n), n).prop_map(move |a| {
        let m: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| a[k][i] * a[k][j]).sum::<i64>() + i64::from(i == j))
                    .collect()
            })
            .collect();
        SPDForm::new(QMatrix::from_i64(&m)).unwrap()
    })
}

proptest! {
    #[test]
    fn pairing_is_bilinear(
        l in prop::collection::vec(scalar(), 3),
        m in prop::collection::vec(scalar(), 3),
        chi in weight(3),
    ) {
        let (l, m) = (CocharVec::new(l), CocharVec::new(m));
        let lhs = pair(&l.add(&m), &chi).unwrap();
        prop_assert_eq!(lhs, pair(&l, &chi).unwrap() + pair(&m, &chi).unwrap());
    }

    #[test]
    fn strict_feasible_witness_satisfies_constraints(
        strict in prop::collection::vec(weight(3), 0..4),
        nonneg in prop::collection::vec(weight(3), 0..3),
        zero in prop::collection::vec(weight(3), 0..2),
    ) {
        if let Feasibility::Feasible(v) = strict_feasible(&strict, &nonneg, &zero, 3).unwrap() {
            prop_assert!(v.is_integral());
            for chi in &strict {
                prop_assert!(pair(&v, chi).unwrap().sign() == edifice::lattice::Sign::Plus);
            }
            for chi in &nonneg {
                prop_assert!(pair(&v, chi).unwrap().sign() != edifice::lattice::Sign::Minus);
            }
            for chi in &zero {
                prop_assert!(pair(&v, chi).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn qp_optimum_beats_feasible_grid(
        cons in prop::collection::vec(weight(2), 1..5),
        form in spd(2),
    ) {
        if let QpOutcome::Optimal(sol) = min_norm_qp(&cons, &form).unwrap() {
            prop_assert!(sol.verify_kkt(&cons, &form));
            for (i, chi) in cons.iter().enumerate() {
                let p = edifice::lattice::pair_q(&sol.lambda, chi);
                prop_assert!(p >= Q::one());
                if sol.active.contains(&i) {
                    prop_assert_eq!(p, Q::one());
                }
            }
            prop_assert!(sol.multipliers.iter().all(|m| !m.is_negative()));
            let best = form.eval_q(&sol.lambda, &sol.lambda);
            // Points of the grid (1/2)ℤ² ∩ [−6, 6]² that are feasible.
            for a in -12i64..=12 {
                for b in -12i64..=12 {
                    let v = vec![Q::new(a.into(), 2.into()), Q::new(b.into(), 2.into())];
                    if cons.iter().all(|c| edifice::lattice::pair_q(&v, c) >= Q::one()) {
                        prop_assert!(form.eval_q(&v, &v) >= best);
                    }
                }
            }
        }
    }

    #[test]
    fn eigen_bounds_sandwich(
        a in spd(3),
        b in spd(3),
        vs in prop::collection::vec(prop::collection::vec(small_q(), 3), 20),
    ) {
        let (c, cc) = gen_eig_bounds(&a, &b).unwrap();
        prop_assert!(c.is_positive() && c <= cc);
        for v in vs {
            let (x, y) = (a.eval_q(&v, &v), b.eval_q(&v, &v));
            prop_assert!(&c * &y <= x && x <= &cc * &y);
        }
    }
}

#[test]
fn qp_detects_infeasible_support() {
    let cons = vec![WeightVec::new(vec![1, 0]), WeightVec::new(vec![-1, 0])];
    assert_eq!(min_norm_qp(&cons, &SPDForm::identity(2)).unwrap(), QpOutcome::Infeasible);
}

#[test]
fn bounds_are_exact_for_scaled_forms() {
    let b = SPDForm::new(QMatrix::from_i64(&[vec![2, 1], vec![1, 2]])).unwrap();
    let a = b.scale(&Q::new(9.into(), 4.into())).unwrap();
    let (c, cc) = gen_eig_bounds(&a, &b).unwrap();
    assert_eq!(c, Q::new(9.into(), 4.into()));
    assert_eq!(cc, Q::new(9.into(), 4.into()));
    assert!(Q::zero() < c);
}
