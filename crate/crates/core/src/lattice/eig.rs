//! Certified rational bounds on generalised eigenvalues of SPD pencils.

use std::cmp::Ordering;

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

use super::{LatticeError, SPDForm, Q};
#[cfg(test)]
use super::QMatrix;

/// Simplest rational (smallest denominator, then numerator) in `[lo, hi]`.
pub fn simplest_between(lo: &Q, hi: &Q) -> Q {
    assert!(lo <= hi, "empty interval");
    if !lo.is_positive() && !hi.is_negative() {
        return Q::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi.clone(), &-lo.clone());
    }
    let fl = lo.floor();
    if fl == *lo {
        return lo.clone();
    }
    let ce = lo.ceil();
    if ce <= *hi {
        return ce;
    }
    // lo and hi share the integer part n and neither is an integer.
    let lo_frac = lo - &fl;
    let hi_frac = hi - &fl;
    fl + simplest_between(&hi_frac.recip(), &lo_frac.recip()).recip()
}

enum Search {
    Exact(Q),
    Bracket(Q, Q),
}

fn frac(n: &BigInt, d: &BigInt) -> Q {
    Q::new(n.clone(), d.clone())
}

/// Locates a positive real `ρ` given an exact comparison oracle `cmp(m) =
/// m.cmp(ρ)`, walking its continued fraction with galloping steps.
fn stern_brocot(cmp: &dyn Fn(&Q) -> Ordering, width: &Q, max_terms: usize) -> Search {
    let one = BigInt::one();
    let zero = BigInt::zero();
    let (mut ln, mut ld) = (zero.clone(), one.clone());
    let (mut hn, mut hd) = (one.clone(), zero.clone());
    for _ in 0..max_terms {
        let m = frac(&(&ln + &hn), &(&ld + &hd));
        match cmp(&m) {
            Ordering::Equal => return Search::Exact(m),
            Ordering::Less => {
                // Largest k with (l + k·h) < ρ.
                let at = |k: &BigInt| frac(&(&ln + k * &hn), &(&ld + k * &hd));
                let mut good = one.clone();
                let mut step = one.clone();
                loop {
                    let next = &good + &step;
                    match cmp(&at(&next)) {
                        Ordering::Less => {
                            good = next;
                            step *= 2;
                        }
                        Ordering::Equal => return Search::Exact(at(&next)),
                        Ordering::Greater => break,
                    }
                }
                while step > one {
                    step = step.div_floor(&BigInt::from(2));
                    let next = &good + &step;
                    match cmp(&at(&next)) {
                        Ordering::Less => good = next,
                        Ordering::Equal => return Search::Exact(at(&next)),
                        Ordering::Greater => {}
                    }
                }
                ln = &ln + &good * &hn;
                ld = &ld + &good * &hd;
            }
            Ordering::Greater => {
                let at = |k: &BigInt| frac(&(&hn + k * &ln), &(&hd + k * &ld));
                let mut good = one.clone();
                let mut step = one.clone();
                loop {
                    let next = &good + &step;
                    match cmp(&at(&next)) {
                        Ordering::Greater => {
                            good = next;
                            step *= 2;
                        }
                        Ordering::Equal => return Search::Exact(at(&next)),
                        Ordering::Less => break,
                    }
                }
                while step > one {
                    step = step.div_floor(&BigInt::from(2));
                    let next = &good + &step;
                    match cmp(&at(&next)) {
                        Ordering::Greater => good = next,
                        Ordering::Equal => return Search::Exact(at(&next)),
                        Ordering::Less => {}
                    }
                }
                hn = &hn + &good * &ln;
                hd = &hd + &good * &ld;
            }
        }
        if !hd.is_zero() {
            let lo = frac(&ln, &ld);
            let hi = frac(&hn, &hd);
            if &hi - &lo < *width {
                return Search::Bracket(lo, hi);
            }
        }
    }
    let hi = if hd.is_zero() {
        Q::from_integer(ln.clone() + 1)
    } else {
        frac(&hn, &hd)
    };
    Search::Bracket(frac(&ln, &ld), hi)
}

/// Rational `(c, C)` with `c·vᵀBv ≤ vᵀAv ≤ C·vᵀBv` for all `v`.
///
/// `c` and `C` bracket the extreme roots of `det(A − tB)`. Each root is located
/// by a continued-fraction search whose comparisons are exact definiteness
/// tests, so rational roots are returned exactly and irrational ones are
/// bracketed to within `2⁻⁴⁰`. Both bounds are certified before returning.
pub fn gen_eig_bounds(a: &SPDForm, b: &SPDForm) -> Result<(Q, Q), LatticeError> {
    if a.dim() != b.dim() {
        return Err(LatticeError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let am = a.matrix();
    let bm = b.matrix();
    let pencil = |t: &Q| am.sub(&bm.scale(t));
    let width = Q::new(BigInt::one(), BigInt::one() << 40);

    // m.cmp(λ_min): m < λ_min exactly when A − mB is positive definite.
    let cmp_min = |m: &Q| {
        let p = pencil(m);
        if p.is_positive_definite() {
            Ordering::Less
        } else if p.det().is_zero() && p.is_positive_semidefinite() {
            Ordering::Equal
        } else {
            Ordering::Greater
        }
    };
    let cmp_max = |m: &Q| {
        let p = pencil(m).scale(&-Q::one());
        if p.is_positive_definite() {
            Ordering::Greater
        } else if p.det().is_zero() && p.is_positive_semidefinite() {
            Ordering::Equal
        } else {
            Ordering::Less
        }
    };
    let c = match stern_brocot(&cmp_min, &width, 256) {
        Search::Exact(x) => x,
        Search::Bracket(lo, _) => lo,
    };
    let upper = match stern_brocot(&cmp_max, &width, 256) {
        Search::Exact(x) => x,
        Search::Bracket(_, hi) => hi,
    };
    let certified = pencil(&c).is_positive_semidefinite()
        && pencil(&upper).scale(&-Q::one()).is_positive_semidefinite();
    if !certified {
        return Err(LatticeError::Internal("eigenvalue bounds failed certification".into()));
    }
    Ok((c, upper))
}
