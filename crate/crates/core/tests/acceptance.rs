//! Acceptance checks. Prints one PASS/FAIL line per criterion and a summary.
//! With `ACCEPTANCE_STRICT=1` the process exits non-zero if any criterion
//! fails; otherwise failures are only reported, so a workspace test run
//! still reaches the other test targets.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use edifice::apartment::{
    cochar_approx, enumerate_fan, parabolic_key, parabolic_poset, sign_partition, simplicial_witness, ApartmentData,
};
use edifice::gl::{
    act, common_apartment, equal_points, include_map, point_from_cochar, preimage, project_f_pl,
    project_f_pl_via_limit, random_point, BlockGroupSpec, Cocharacter, EdificePoint, UnipotentQuotient, WeightedFlag,
};
use edifice::kempf::{kempf_optimal, KempfResult, LinearAction, StatePoint};
use edifice::lattice::{q, CocharVec, LatticeMap, QMatrix, SPDForm, Scalar, WeightVec, Q};
use edifice::metrics::{
    bilipschitz, central_split, dist2, product_metric, pullback, weyl_average, AdmissibleMetric,
};
use num::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn main() {
    let checks: Vec<(&str, Option<Duration>, fn() -> Outcome)> = vec![
        ("1 semidirect table", Some(Duration::from_secs(1)), table),
        ("2 non-simplicial witness", None, witness),
        ("3 SL3 fan", Some(Duration::from_secs(5)), sl3_fan),
        ("4 cocharacter approximation", None, approximation),
        ("5 key sums", None, key_sums),
        ("6 common apartment", None, borel_common),
        ("7 Borel bijection", None, borel_bijection),
        ("8 projection", None, projection),
        ("9 metrics", Some(Duration::from_secs(10)), metrics),
        ("10 Kempf oracle", None, kempf),
        ("11 quotient fibers", None, quotient),
    ];
    let total = checks.len();
    let mut failed = 0;
    for (name, limit, f) in checks {
        let start = Instant::now();
        let mut o = f();
        let took = start.elapsed();
        if let Some(limit) = limit {
            if took > limit {
                o.ok = false;
                o.detail = format!("{}; over the {:?} budget", o.detail, limit);
            }
        }
        if !o.ok {
            failed += 1;
        }
        println!(
            "{} {name}: {} ({:.2?})",
            if o.ok { "PASS" } else { "FAIL" },
            o.detail,
            took
        );
    }
    println!("{}/{total} criteria passed", total - failed);
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}

fn ints(v: &[i64]) -> CocharVec {
    CocharVec::ints(v)
}

fn weights_of(a: &ApartmentData) -> Vec<Vec<i64>> {
    a.weights().iter().map(|w| w.coeffs.clone()).collect()
}

fn table() -> Outcome {
    let a = apartment("gl2_semidirect.toml");
    let w = weights_of(&a);
    // Extra points on the boundary of each region.
    let boundary = [
        ((0, 0), "G"),
        ((-3, -3), "GL2"),
        ((2, 0), "B+xV"),
        ((-3, -1), "B-"),
        ((0, -1), "B+xV1"),
        ((-1, 0), "B-xV2"),
        ((-2, -3), "B+"),
        ((0, 1), "B-xV"),
    ];
    let lie: std::collections::BTreeMap<&str, Vec<usize>> = semidirect_table()
        .iter()
        .map(|(_, l, ws)| (*l, indices_of(&w, ws)))
        .collect();
    let mut good = 0;
    let mut total = 0;
    let rows = semidirect_table()
        .into_iter()
        .map(|(p, l, _)| (p, l))
        .chain(boundary.iter().copied());
    for ((x, y), label) in rows {
        total += 1;
        let key = parabolic_key(&a, &ints(&[x, y])).unwrap();
        if key.geq0 == lie[label] && a.label_of(&key.geq0) == Some(label) {
            good += 1;
        } else {
            println!("  ({x},{y}): got {:?}, expected {label}", a.label_of(&key.geq0));
        }
    }
    outcome(good == total, format!("{good}/{total} representatives"))
}

fn witness() -> Outcome {
    let a = apartment("gl2_semidirect.toml");
    let fan = enumerate_fan(&a).unwrap();
    let poset = parabolic_poset(&a, &fan);
    let Some((i, j)) = simplicial_witness(&poset) else {
        return outcome(false, "no witness");
    };
    let names = (poset.node_name(i), poset.node_name(j));
    // Oracle: sigma_P <= sigma_Q iff Q ⊆ P; atoms are the maximal proper parabolics.
    let classes = fan.parabolic_classes();
    let all: BTreeSet<usize> = (0..a.weights().len()).collect();
    let sub = |p: &Vec<usize>, q: &Vec<usize>| p.iter().all(|x| q.contains(x));
    let proper: Vec<&Vec<usize>> = classes
        .iter()
        .filter(|c| c.iter().copied().collect::<BTreeSet<_>>() != all)
        .collect();
    let atoms: Vec<&Vec<usize>> = proper
        .iter()
        .copied()
        .filter(|p| !proper.iter().any(|q| q != p && sub(p, q)))
        .collect();
    let minimal = |geq0: &Vec<usize>| -> Vec<&Vec<usize>> { atoms.iter().copied().filter(|t| sub(geq0, t)).collect() };
    let same = minimal(&poset.nodes[i].geq0) == minimal(&poset.nodes[j].geq0)
        && poset.minimal_elements[i] == poset.minimal_elements[j];
    let expected = ("B+xV1".to_string(), "B+xV".to_string());
    outcome(
        names == expected && same,
        format!("pair ({}, {}), same minimal elements: {same}", names.0, names.1),
    )
}

fn sl3_fan() -> Outcome {
    let a = apartment("sl3.toml");
    let fan = enumerate_fan(&a).unwrap();
    let got: BTreeSet<(Vec<usize>, Vec<usize>)> = fan.keys().iter().map(|k| (k.geq0.clone(), k.zero.clone())).collect();
    let oracle = grid_keys(&weights_of(&a), 2, 4);
    let poset = parabolic_poset(&a, &fan);
    let simplicial = simplicial_witness(&poset).is_none();
    outcome(
        got.len() == 13 && got == oracle && simplicial,
        format!(
            "{} keys, grid oracle {} keys, equal: {}, simplicial: {simplicial}",
            got.len(),
            oracle.len(),
            got == oracle
        ),
    )
}

fn approximation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut good = 0;
    for name in ["sl3.toml", "gl2_semidirect.toml"] {
        let a = apartment(name);
        for _ in 0..100 {
            let x = random_q_sqrt2(&mut rng);
            // A quarter of the samples sit on a wall: a = 0, b = 0 or a = b.
            let y = match rng.gen_range(0..8) {
                0 => Scalar::zero(),
                1 => x.clone(),
                2 => -x.clone(),
                _ => random_q_sqrt2(&mut rng),
            };
            let lambda = CocharVec::new(vec![x, y]);
            let approx = cochar_approx(&a, &lambda).unwrap();
            if approx.is_integral() && sign_partition(&a, &approx).unwrap() == sign_partition(&a, &lambda).unwrap() {
                good += 1;
            } else {
                println!("  {name}: {lambda:?} -> {approx:?}");
            }
        }
    }
    outcome(good == 200, format!("{good}/200 sign patterns preserved"))
}

fn key_sums() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let apts = [apartment("sl3.toml"), apartment("gl2_semidirect.toml")];
    let mut good = 0;
    for i in 0..500 {
        let a = &apts[i % 2];
        let lambda = CocharVec::new(vec![random_q_sqrt2(&mut rng), random_q_sqrt2(&mut rng)]);
        let key = parabolic_key(a, &lambda).unwrap();
        // μ with the same key: a positive multiple of λ plus a small
        // perturbation that keeps every pairing sign, found by rejection.
        let mu = loop {
            let s = Scalar::rational(Q::new(rng.gen_range(1i64..=5).into(), rng.gen_range(1i64..=5).into()));
            let cand = if rng.gen_bool(0.3) {
                lambda.scale(&s)
            } else {
                let d = CocharVec::new(vec![random_q_sqrt2(&mut rng), random_q_sqrt2(&mut rng)]);
                lambda.scale(&s).add(&d.scale(&Scalar::frac(1, rng.gen_range(2..=40))))
            };
            if parabolic_key(a, &cand).unwrap() == key {
                break cand;
            }
        };
        let ca = Scalar::rational(Q::new(rng.gen_range(1i64..=9).into(), rng.gen_range(1i64..=9).into()));
        let cb = Scalar::rational(Q::new(rng.gen_range(1i64..=9).into(), rng.gen_range(1i64..=9).into()));
        let sum = parabolic_key(a, &lambda.add(&mu)).unwrap();
        let comb = parabolic_key(a, &lambda.scale(&ca).add(&mu.scale(&cb))).unwrap();
        if sum == key && comb == key {
            good += 1;
        }
    }
    outcome(good == 500, format!("{good}/500 pairs"))
}

fn lam() -> Cocharacter {
    Cocharacter::diagonal(vec![q(1), q(-1)])
}

fn u() -> QMatrix {
    QMatrix::from_i64(&[vec![1, 1], vec![0, 1]])
}

fn borel_common() -> Outcome {
    let b = BlockGroupSpec::borel_sl2();
    let sl2 = BlockGroupSpec::sl(2);
    let x = point_from_cochar(&b, &lam().neg()).unwrap();
    let y = point_from_cochar(&b, &lam().neg().conjugate(&u()).unwrap()).unwrap();
    let before = common_apartment(&x, &y).unwrap();
    let (ix, iy) = (include_map(&sl2, &x).unwrap(), include_map(&sl2, &y).unwrap());
    let after = common_apartment(&ix, &iy).unwrap();
    // The basis returned must split both flags.
    let splits = after
        .as_ref()
        .map_or(false, |sb| ix.flag().coords_in(&sb.basis).is_some() && iy.flag().coords_in(&sb.basis).is_some());
    outcome(
        before.is_none() && splits,
        format!("in B: {}, in SL2: {}", found(&before), found(&after)),
    )
}

fn found<T>(o: &Option<T>) -> &'static str {
    if o.is_some() {
        "found"
    } else {
        "none"
    }
}

fn borel_bijection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let b = BlockGroupSpec::borel_sl2();
    let sl2 = BlockGroupSpec::sl(2);
    let points: Vec<EdificePoint> = (0..100).map(|_| random_point(&sl2, &mut rng).unwrap()).collect();
    let mut pre = Vec::new();
    let mut good = 0;
    for x in &points {
        let p = preimage(&b, x).unwrap();
        let ok = p
            .as_ref()
            .map_or(false, |p| equal_points(&include_map(&sl2, p).unwrap(), x).unwrap());
        if ok {
            good += 1;
        }
        pre.push(p);
    }
    let mut injective = true;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if let (Some(p), Some(q)) = (&pre[i], &pre[j]) {
                if !equal_points(&points[i], &points[j]).unwrap() && equal_points(p, q).unwrap() {
                    injective = false;
                }
            }
        }
    }
    outcome(
        good == 100 && injective,
        format!("{good}/100 preimages round-trip, distinct points stay distinct: {injective}"),
    )
}

/// `F_{B,T}` on `SL₂` computed by hand: `λ(t)` with `t → 0` moves every line
/// other than the fixed line `e_fix` of `P_λ` onto the other coordinate line.
fn projection_oracle(lambda_sign: i64, x: &EdificePoint) -> WeightedFlag {
    let f = x.flag();
    if f.levels().len() == 1 {
        return f.clone();
    }
    let (top, bottom) = (f.levels()[0].weight.clone(), f.levels()[1].weight.clone());
    let line = &f.levels()[0].space;
    let fixed = if lambda_sign > 0 { 0 } else { 1 };
    let mut e = vec![Q::zero(); 2];
    e[fixed] = Q::one();
    let mut mu = vec![bottom.clone(); 2];
    if line.contains(&e) {
        mu[fixed] = top;
    } else {
        mu[1 - fixed] = top;
    }
    WeightedFlag::from_basis(&QMatrix::identity(2), &mu).unwrap()
}

fn projection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let sl2 = BlockGroupSpec::sl(2);
    let mut good = 0;
    for i in 0..100 {
        let x = random_point(&sl2, &mut rng).unwrap();
        let k = if i % 2 == 0 { 1 } else { -1 } * rng.gen_range(1i64..=3);
        let l = Cocharacter::diagonal(vec![q(k), q(-k)]);
        let f = project_f_pl(&sl2, &l, &x).unwrap();
        let via = project_f_pl_via_limit(&sl2, &l, &x).unwrap();
        if *f.flag() == via && *f.flag() == projection_oracle(k.signum(), &x) {
            good += 1;
        }
    }
    let x = point_from_cochar(&sl2, &lam().neg()).unwrap();
    let y = act(&u(), &x).unwrap();
    let fx = project_f_pl(&sl2, &lam(), &x).unwrap();
    let fy = project_f_pl(&sl2, &lam(), &y).unwrap();
    let gx = project_f_pl(&sl2, &lam().neg(), &x).unwrap();
    let gy = project_f_pl(&sl2, &lam().neg(), &y).unwrap();
    let remark = fx.flag() == x.flag() && fy.flag() == x.flag() && gx.flag() != gy.flag();
    outcome(
        good == 100 && remark,
        format!("{good}/100 agree with the limit recipe, non-linearity witness: {remark}"),
    )
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize, with_sqrt: bool) -> CocharVec {
    CocharVec::new(
        (0..n)
            .map(|_| {
                if with_sqrt {
                    random_q_sqrt2(rng)
                } else {
                    Scalar::rational(random_q(rng, 9))
                }
            })
            .collect(),
    )
}

/// `AᵀA + I` for a random small integer `A`.
fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> SPDForm {
    let a: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect()).collect();
    let m: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[k][i] * a[k][j]).sum::<i64>() + i64::from(i == j))
                .collect()
        })
        .collect();
    SPDForm::new(QMatrix::from_i64(&m)).unwrap()
}

fn metrics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut fails = Vec::new();

    let apts = [apartment("sl3.toml"), apartment("gl2_semidirect.toml"), apartment("gl3.toml")];
    let avg: Vec<AdmissibleMetric> = apts
        .iter()
        .map(|a| weyl_average(&random_spd(&mut rng, a.rank()), a).unwrap())
        .collect();
    let mut n = 0;
    for i in 0..1000 {
        let (a, m) = (&apts[i % 3], &avg[i % 3]);
        let (x, y) = (random_vec(&mut rng, a.rank(), true), random_vec(&mut rng, a.rank(), true));
        let w = a.weyl_group().choose(&mut rng).unwrap();
        let d = dist2(m, &x, &y).unwrap();
        if d == dist2(m, &w.apply(&x).unwrap(), &w.apply(&y).unwrap()).unwrap() {
            n += 1;
        }
    }
    if n != 1000 {
        fails.push(format!("Weyl invariance {n}/1000"));
    }

    n = 0;
    for _ in 0..1000 {
        let (r, s) = (rng.gen_range(1..=3usize), rng.gen_range(1..=3usize));
        let s = s.max(r);
        let f = loop {
            let f = LatticeMap::new((0..s).map(|_| (0..r).map(|_| rng.gen_range(-3..=3)).collect()).collect());
            if f.is_injective() {
                break f;
            }
        };
        let m = AdmissibleMetric::base(random_spd(&mut rng, s));
        let pm = pullback(&m, &f).unwrap();
        let (x, y) = (random_vec(&mut rng, r, true), random_vec(&mut rng, r, true));
        if dist2(&pm, &x, &y).unwrap() == dist2(&m, &f.apply(&x).unwrap(), &f.apply(&y).unwrap()).unwrap() {
            n += 1;
        }
    }
    if n != 1000 {
        fails.push(format!("pullback {n}/1000"));
    }

    n = 0;
    for _ in 0..1000 {
        let (r1, r2) = (rng.gen_range(1..=3usize), rng.gen_range(1..=3usize));
        let d1 = AdmissibleMetric::base(random_spd(&mut rng, r1));
        let d2 = AdmissibleMetric::base(random_spd(&mut rng, r2));
        let p = product_metric(&d1, &d2);
        let (x1, y1) = (random_vec(&mut rng, r1, true), random_vec(&mut rng, r1, true));
        let (x2, y2) = (random_vec(&mut rng, r2, true), random_vec(&mut rng, r2, true));
        let cat = |a: &CocharVec, b: &CocharVec| CocharVec::new(a.coords.iter().chain(&b.coords).cloned().collect());
        let lhs = dist2(&p, &cat(&x1, &x2), &cat(&y1, &y2)).unwrap();
        if lhs == dist2(&d1, &x1, &y1).unwrap() + dist2(&d2, &x2, &y2).unwrap() {
            n += 1;
        }
    }
    if n != 1000 {
        fails.push(format!("product {n}/1000"));
    }

    n = 0;
    let gl = [apartment("gl2.toml"), apartment("gl3.toml"), apartment("gl2_semidirect.toml")];
    let splits: Vec<_> = gl
        .iter()
        .map(|a| {
            let m = weyl_average(&random_spd(&mut rng, a.rank()), a).unwrap();
            (m.clone(), central_split(&m, a).unwrap())
        })
        .collect();
    for i in 0..1000 {
        let (m, cs) = &splits[i % 3];
        let r = gl[i % 3].rank();
        let (x, y) = (random_vec(&mut rng, r, true), random_vec(&mut rng, r, true));
        let d = dist2(m, &x, &y).unwrap();
        if d == cs.dist2_z(&x, &y).unwrap() + cs.dist2_perp(&x, &y).unwrap() {
            n += 1;
        }
    }
    if n != 1000 {
        fails.push(format!("central split {n}/1000"));
    }

    n = 0;
    for _ in 0..1000 {
        let r = rng.gen_range(1..=3usize);
        let d1 = AdmissibleMetric::base(random_spd(&mut rng, r));
        let d2 = AdmissibleMetric::base(random_spd(&mut rng, r));
        let (c, cc) = bilipschitz(&d1, &d2).unwrap();
        let (x, y) = (random_vec(&mut rng, r, false), random_vec(&mut rng, r, false));
        let (a, b) = (dist2(&d1, &x, &y).unwrap(), dist2(&d2, &x, &y).unwrap());
        let (a, b) = (a.as_rational().unwrap().clone(), b.as_rational().unwrap().clone());
        if c.is_positive() && &c * &b <= a && a <= &cc * &b {
            n += 1;
        }
    }
    if n != 1000 {
        fails.push(format!("bilipschitz {n}/1000"));
    }

    outcome(
        fails.is_empty(),
        if fails.is_empty() {
            "Weyl invariance, pullback, product, central split and bilipschitz 1000/1000 each".to_string()
        } else {
            fails.join(", ")
        },
    )
}

/// A seeded Kempf instance: weights, support, form and a box half-width
/// large enough for `‖λ‖² ≤ 200` under that form.
fn kempf_instance(rng: &mut ChaCha8Rng) -> (Vec<Vec<i64>>, Vec<usize>, Vec<Vec<i64>>, i64) {
    let rank = rng.gen_range(1..=3usize);
    let (form, r): (Vec<Vec<i64>>, i64) = match (rank, rng.gen_range(0..2)) {
        (1, _) => (vec![vec![1]], 14),
        (2, 0) => (vec![vec![1, 0], vec![0, 1]], 14),
        (2, _) => (vec![vec![2, 1], vec![1, 2]], 14),
        (_, 0) => (vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]], 14),
        // least eigenvalue 1
        (_, _) => (vec![vec![2, 1, 0], vec![1, 2, 0], vec![0, 0, 1]], 14),
    };
    let count = rng.gen_range(rank..=6usize);
    let weights: Vec<Vec<i64>> = (0..count)
        .map(|_| (0..rank).map(|_| rng.gen_range(-2..=2)).collect())
        .collect();
    let support_len = rng.gen_range(1..=count);
    let mut idx: Vec<usize> = (0..count).collect();
    idx.shuffle(rng);
    let mut support = idx[..support_len].to_vec();
    support.sort();
    (weights, support, form, r)
}

fn kempf() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut good = 0;
    let mut unstable = 0;
    for _ in 0..50 {
        let (weights, support, form, r) = kempf_instance(&mut rng);
        let rank = form.len();
        let apt = ApartmentData::new(
            "instance",
            rank,
            weights.iter().map(|w| WeightVec::new(w.clone())).collect(),
            vec![],
            None,
        )
        .unwrap();
        let a = LinearAction::new(apt).unwrap();
        let x = StatePoint::unit(&a, &support).unwrap();
        let spd = SPDForm::new(QMatrix::from_i64(&form)).unwrap();
        let metric = AdmissibleMetric::base(spd.clone());
        let supp_w: Vec<Vec<i64>> = support.iter().map(|&i| weights[i].clone()).collect();
        let oracle = brute_force_ray(&supp_w, &form, 200, r);
        let ok = match kempf_optimal(&a, &x, &metric).unwrap() {
            KempfResult::Semistable => oracle.is_none(),
            KempfResult::Optimal(opt) => {
                unstable += 1;
                let cons: Vec<WeightVec> = supp_w.iter().map(|w| WeightVec::new(w.clone())).collect();
                let got: Vec<i64> = opt
                    .lambda_opt
                    .to_rational()
                    .unwrap()
                    .iter()
                    .map(|v| v.to_integer().try_into().unwrap())
                    .collect();
                let kkt = opt.certificate.verify_kkt(&cons, &spd);
                if oracle.as_ref() != Some(&got) || !kkt {
                    let n = norm_of(&form, &got);
                    println!("  {weights:?} {support:?}: qp {got:?} (norm² {n}), oracle {oracle:?}, kkt {kkt}");
                    if n > 200 {
                        // Diagnostic only: the same oracle with a ball that reaches the QP ray.
                        let wide = brute_force_ray(&supp_w, &form, 2000, 45);
                        println!("  oracle with ‖λ‖² ≤ 2000: {wide:?}");
                    }
                }
                oracle == Some(got) && kkt
            }
        };
        if ok {
            good += 1;
        }
    }
    outcome(good == 50, format!("{good}/50 instances ({unstable} unstable)"))
}

fn norm_of(form: &[Vec<i64>], v: &[i64]) -> i64 {
    (0..v.len())
        .map(|i| (0..v.len()).map(|j| v[i] * form[i][j] * v[j]).sum::<i64>())
        .sum()
}

fn quotient() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let qm = UnipotentQuotient::affine_gl2();
    let h = qm.group().clone();
    let mut good = 0;
    let mut same_fiber = 0;
    for i in 0..100 {
        let x1 = random_point(&h, &mut rng).unwrap();
        let x2 = match i % 3 {
            0 => {
                let v = QMatrix::from_rows(vec![
                    vec![q(1), q(0), random_q(&mut rng, 5)],
                    vec![q(0), q(1), random_q(&mut rng, 5)],
                    vec![q(0), q(0), q(1)],
                ]);
                act(&v, &x1).unwrap()
            }
            1 => act(&h.sample(&mut rng).unwrap(), &x1).unwrap(),
            _ => random_point(&h, &mut rng).unwrap(),
        };
        let equal_image = qm.map_point(&x1).unwrap() == qm.map_point(&x2).unwrap();
        let witness = qm.fiber_witness(&x1, &x2).unwrap();
        let witness_ok = witness.as_ref().map_or(true, |n| {
            in_v(n) && equal_points(&act(n, &x1).unwrap(), &x2).unwrap()
        });
        if equal_image {
            same_fiber += 1;
        }
        let expected_same = i % 3 != 0 || equal_image;
        if equal_image == witness.is_some() && witness_ok && expected_same {
            good += 1;
        }
    }
    outcome(good == 100, format!("{good}/100 pairs ({same_fiber} in a common fiber)"))
}

/// `[[1,0,*],[0,1,*],[0,0,1]]`.
fn in_v(n: &QMatrix) -> bool {
    let mut m = n.clone();
    m[(0, 2)] = Q::zero();
    m[(1, 2)] = Q::zero();
    m == QMatrix::identity(3)
}
