//! Maps between edifices: inclusions, unipotent quotients and the Levi
//! projection `F_{P,L}`.

use num::{Signed, Zero};

use super::apartment::{is_point_of, splitting_basis};
use super::group::{BlockGroupSpec, DetConstraint, Entry};
use super::point::{Cocharacter, EdificePoint, WeightedFlag};
use super::subspace::{unit, Subspace};
use crate::error::GlError;
use crate::lattice::{QMatrix, Q};

/// `κ_i` for an inclusion `H ⊆ H′`: the same weighted flag, read in `H′`.
pub fn include_map(target: &BlockGroupSpec, x: &EdificePoint) -> Result<EdificePoint, GlError> {
    if !x.group().is_subgroup_of(target) {
        return Err(GlError::NotNested(x.group().name().into(), target.name().into()));
    }
    Ok(EdificePoint::unchecked(target, x.flag().clone()))
}

/// The preimage of `y ∈ V_{H′}` under `κ_i` for `H ⊆ H′`, if there is one.
pub fn preimage(h: &BlockGroupSpec, y: &EdificePoint) -> Result<Option<EdificePoint>, GlError> {
    if !h.is_subgroup_of(y.group()) {
        return Err(GlError::NotNested(h.name().into(), y.group().name().into()));
    }
    Ok(is_point_of(h, y.flag())?.map(|_| EdificePoint::unchecked(h, y.flag().clone())))
}

/// `π : H → H/N` where `N = {g ∈ H : g restricted to K×K is 1}` for a set of
/// kept coordinates `K`.
///
/// This is a homomorphism with unipotent kernel when, writing `C` for the
/// other coordinates, the `C×K` block is zero and the `C×C` block is the
/// identity (the affine shape `[[A, v], [0, 1]]`).
#[derive(Debug, Clone)]
pub struct UnipotentQuotient {
    group: BlockGroupSpec,
    kept: Vec<usize>,
    dropped: Vec<usize>,
    quotient: BlockGroupSpec,
}

impl UnipotentQuotient {
    pub fn new(h: &BlockGroupSpec, kept: &[usize]) -> Result<UnipotentQuotient, GlError> {
        let n = h.n();
        let mut kept = kept.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if kept.is_empty() || kept.iter().any(|&k| k >= n) {
            return Err(GlError::BadQuotient(format!("bad index set {kept:?}")));
        }
        let dropped: Vec<usize> = (0..n).filter(|i| !kept.contains(i)).collect();
        let p = h.pattern();
        for &c in &dropped {
            if kept.iter().any(|&k| p[c][k] != Entry::Zero) {
                return Err(GlError::BadQuotient(format!("row {c} meets the kept block")));
            }
            for &d in &dropped {
                let want = if c == d { Entry::One } else { Entry::Zero };
                if p[c][d] != want {
                    return Err(GlError::BadQuotient("the dropped block is not the identity".into()));
                }
            }
        }
        let pattern = kept.iter().map(|&i| kept.iter().map(|&j| p[i][j]).collect()).collect();
        // det g[B,B] = det g[B∩K, B∩K] by the block-triangular shape.
        let det = h
            .det_constraints()
            .iter()
            .filter_map(|d| {
                let block: Vec<usize> = d
                    .block
                    .iter()
                    .filter_map(|i| kept.iter().position(|k| k == i))
                    .collect();
                (!block.is_empty()).then(|| DetConstraint {
                    block,
                    value: d.value.clone(),
                })
            })
            .collect();
        let quotient = BlockGroupSpec::new(format!("{}/N", h.name()), kept.len(), pattern, det)?;
        Ok(UnipotentQuotient {
            group: h.clone(),
            kept,
            dropped,
            quotient,
        })
    }

    /// `GL₂⋉V → GL₂`.
    pub fn affine_gl2() -> UnipotentQuotient {
        UnipotentQuotient::new(&BlockGroupSpec::gl2_semidirect(), &[0, 1]).expect("affine quotient")
    }

    pub fn group(&self) -> &BlockGroupSpec {
        &self.group
    }

    pub fn quotient(&self) -> &BlockGroupSpec {
        &self.quotient
    }

    pub fn project_matrix(&self, g: &QMatrix) -> QMatrix {
        g.submatrix(&self.kept, &self.kept)
    }

    /// `κ_π(x)`: the levels `F_w ∩ E_K` read in the kept coordinates.
    pub fn map_point(&self, x: &EdificePoint) -> Result<EdificePoint, GlError> {
        self.check(x)?;
        let n = self.group.n();
        let ek = Subspace::span(n, &self.kept.iter().map(|&k| unit(n, k)).collect::<Vec<_>>());
        let mut levels: Vec<(Q, Vec<Vec<Q>>)> = Vec::new();
        let mut last_dim = 0;
        for l in x.flag().levels() {
            let s = l.space.intersect(&ek).project(&self.kept);
            if s.dim() > last_dim {
                last_dim = s.dim();
                levels.push((l.weight.clone(), s.basis().to_vec()));
            }
        }
        let flag = WeightedFlag::new(self.kept.len(), levels)?;
        Ok(EdificePoint::unchecked(&self.quotient, flag))
    }

    /// An `n ∈ N(ℚ)` with `n·x₁ = x₂`, if one exists.
    pub fn fiber_witness(&self, x1: &EdificePoint, x2: &EdificePoint) -> Result<Option<QMatrix>, GlError> {
        self.check(x1)?;
        self.check(x2)?;
        let n = self.group.n();
        let (f1, f2) = (x1.flag(), x2.flag());
        if f1.weights() != f2.weights() || f1.multiplicities() != f2.multiplicities() {
            return Ok(None);
        }
        let cells: Vec<(usize, usize)> = self
            .kept
            .iter()
            .flat_map(|&r| self.dropped.iter().map(move |&c| (r, c)))
            .filter(|&(r, c)| self.group.pattern()[r][c] == Entry::Free)
            .collect();
        if cells.is_empty() {
            return Ok((f1 == f2).then(|| QMatrix::identity(n)));
        }
        // a·(b + B·b) = 0 for b ∈ F¹_i and a ⊥ F²_i.
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (l1, l2) in f1.levels().iter().zip(f2.levels()) {
            for a in l2.space.annihilator() {
                for b in l1.space.basis() {
                    rows.push(cells.iter().map(|&(r, c)| &a[r] * &b[c]).collect());
                    rhs.push(-a.iter().zip(b).fold(Q::zero(), |s, (x, y)| s + x * y));
                }
            }
        }
        let Some((sol, _)) = QMatrix::from_rows(rows).solve(&rhs) else {
            return Ok(None);
        };
        let mut g = QMatrix::identity(n);
        for (&(r, c), v) in cells.iter().zip(sol) {
            g[(r, c)] = v;
        }
        debug_assert_eq!(f1.image(&g), *f2);
        Ok(Some(g))
    }

    fn check(&self, x: &EdificePoint) -> Result<(), GlError> {
        if x.group() != &self.group {
            return Err(GlError::GroupMismatch(x.group().name().into(), self.group.name().into()));
        }
        Ok(())
    }
}

/// The group in which `F_{P_λ,L_λ}` lands: the block Levi when `λ` is
/// diagonal, otherwise `G` itself.
fn levi_target(g: &BlockGroupSpec, lambda: &Cocharacter) -> Result<BlockGroupSpec, GlError> {
    if lambda.conjugator().is_diagonal() {
        g.diagonal_levi(lambda.weights())
    } else {
        Ok(g.clone())
    }
}

fn require_reductive(g: &BlockGroupSpec, lambda: &Cocharacter, x: &EdificePoint) -> Result<(), GlError> {
    let full = g.is_full_linear() && g.det_constraints().iter().all(|d| d.block.len() == g.n());
    if !full {
        return Err(GlError::Unsupported(format!("Levi projection in {}", g.name())));
    }
    if x.group() != g {
        return Err(GlError::GroupMismatch(x.group().name().into(), g.name().into()));
    }
    if !g.contains_cocharacter(lambda.conjugator(), lambda.weights()) {
        return Err(GlError::CocharNotInGroup(g.name().into()));
    }
    Ok(())
}

/// `F_{P,L}(x) = κ_f(κ_i⁻¹(x))` for `P = P_λ`, `L = L_λ` in `G = GL_n` or
/// `SL_n`.
///
/// A torus `T′ ⊆ P_λ ∩ P_x` splits both flags; in it `x = φ(μ)` and the
/// image is `c_λ ∘ μ`, whose eigenprojectors are the `λ`-block-diagonal
/// parts of those of `μ`.
pub fn project_f_pl(g: &BlockGroupSpec, lambda: &Cocharacter, x: &EdificePoint) -> Result<EdificePoint, GlError> {
    require_reductive(g, lambda, x)?;
    let n = g.n();
    let h = splitting_basis(&lambda.flag(), x.flag());
    let mu = x.flag().coords_in(&h).expect("splits x");
    let hinv = h.inverse().expect("basis");
    let s = lambda.conjugator();
    let sinv = s.inverse().expect("conjugator");
    let w = lambda.weights();
    let mut values = mu.clone();
    values.sort();
    values.dedup();
    let mut parts = Vec::new();
    for v in values {
        let ev = QMatrix::diag(&mu.iter().map(|m| if *m == v { Q::from_integer(1.into()) } else { Q::zero() }).collect::<Vec<_>>());
        let mut pi = &(&(&sinv * &h) * &ev) * &(&hinv * s);
        for i in 0..n {
            for j in 0..n {
                if w[i] != w[j] {
                    pi[(i, j)] = Q::zero();
                }
            }
        }
        let img = s * &pi;
        parts.push((v, img.column_space()));
    }
    let flag = WeightedFlag::from_grading(n, &parts)?;
    Ok(EdificePoint::unchecked(&levi_target(g, lambda)?, flag))
}

/// The same projection through `P_μ(L_λ) = P_{Nλ+μ}(L_λ)` for large `N`:
/// on each graded piece `U_v/U′_v` of the `λ`-flag the image filtration is
/// induced by the flag of `ν = Nλ + μ` at level `Nv + w`.
pub fn project_f_pl_via_limit(g: &BlockGroupSpec, lambda: &Cocharacter, x: &EdificePoint) -> Result<WeightedFlag, GlError> {
    require_reductive(g, lambda, x)?;
    let n = g.n();
    let lf = lambda.flag();
    let h = splitting_basis(&lf, x.flag());
    let mu = x.flag().coords_in(&h).expect("splits x");
    let la = lf.coords_in(&h).expect("splits λ");
    let big = big_multiplier(&lf.weights(), &mu);
    let nu: Vec<Q> = la.iter().zip(&mu).map(|(l, m)| &big * l + m).collect();
    let fnu = WeightedFlag::from_basis(&h, &nu)?;
    let at_least = |f: &WeightedFlag, t: &Q| -> Subspace {
        f.levels()
            .iter()
            .rev()
            .find(|l| l.weight >= *t)
            .map(|l| l.space.clone())
            .unwrap_or_else(|| Subspace::zero(n))
    };
    let grading = lambda.grading();
    let mut mus = mu.clone();
    mus.sort();
    mus.dedup();
    let mut levels = Vec::new();
    for w in mus.iter().rev() {
        let mut acc = Subspace::zero(n);
        for (v, ev) in &grading {
            let u = at_least(&lf, v);
            let below = lf
                .levels()
                .iter()
                .rev()
                .find(|l| l.weight > *v)
                .map(|l| l.space.clone())
                .unwrap_or_else(|| Subspace::zero(n));
            let t = &big * v + w;
            let piece = at_least(&fnu, &t).intersect(&u).sum(&below);
            acc = acc.sum(&piece.intersect(ev));
        }
        levels.push((w.clone(), acc.basis().to_vec()));
    }
    // Drop levels that do not grow.
    let mut out: Vec<(Q, Vec<Vec<Q>>)> = Vec::new();
    let mut dim = 0;
    for (w, b) in levels {
        let d = Subspace::span(n, &b).dim();
        if d > dim {
            dim = d;
            out.push((w, b));
        }
    }
    WeightedFlag::new(n, out)
}

/// `1 + ⌈2·max|μ| / (least gap between λ-weights)⌉`.
fn big_multiplier(lw: &[Q], mu: &[Q]) -> Q {
    let m = mu.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero);
    let gap = lw
        .windows(2)
        .map(|p| (&p[0] - &p[1]).abs())
        .min();
    match gap {
        None => Q::from_integer(1.into()),
        Some(gap) => Q::from_integer((m * Q::from_integer(2.into()) / gap).ceil().to_integer() + 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gl::point::point_from_cochar;
    use crate::gl::{act, common_apartment, equal_points};
    use crate::lattice::q;

    fn lam() -> Cocharacter {
        Cocharacter::diagonal(vec![q(1), q(-1)])
    }

    fn u() -> QMatrix {
        QMatrix::from_i64(&[vec![1, 1], vec![0, 1]])
    }

    #[test]
    fn borel_inclusion() {
        let b = BlockGroupSpec::borel_sl2();
        let sl2 = BlockGroupSpec::sl(2);
        let x = point_from_cochar(&b, &lam().neg()).unwrap();
        let y = point_from_cochar(&b, &lam().neg().conjugate(&u()).unwrap()).unwrap();
        assert!(common_apartment(&x, &y).unwrap().is_none());
        let (ix, iy) = (include_map(&sl2, &x).unwrap(), include_map(&sl2, &y).unwrap());
        assert!(common_apartment(&ix, &iy).unwrap().is_some());
        assert!(equal_points(&preimage(&b, &ix).unwrap().unwrap(), &x).unwrap());
        assert!(matches!(include_map(&b, &ix), Err(GlError::NotNested(..))));
    }

    #[test]
    fn affine_quotient_fibers() {
        let qm = UnipotentQuotient::affine_gl2();
        let h = qm.group().clone();
        let c = Cocharacter::diagonal(vec![q(1), q(-1), q(0)]);
        let x = point_from_cochar(&h, &c).unwrap();
        let nmat = QMatrix::from_i64(&[vec![1, 0, 4], vec![0, 1, -3], vec![0, 0, 1]]);
        let y = act(&nmat, &x).unwrap();
        assert!(!equal_points(&x, &y).unwrap());
        assert_eq!(qm.map_point(&x).unwrap(), qm.map_point(&y).unwrap());
        let n = qm.fiber_witness(&x, &y).unwrap().unwrap();
        assert!(equal_points(&act(&n, &x).unwrap(), &y).unwrap());
        let z = point_from_cochar(&h, &c.neg()).unwrap();
        assert!(qm.fiber_witness(&x, &z).unwrap().is_none());
        assert!(UnipotentQuotient::new(&BlockGroupSpec::gl(3), &[0, 1]).is_err());
    }

    #[test]
    fn projection_is_not_linear() {
        let sl2 = BlockGroupSpec::sl(2);
        let x = point_from_cochar(&sl2, &lam().neg()).unwrap();
        let y = act(&u(), &x).unwrap();
        let fx = project_f_pl(&sl2, &lam(), &x).unwrap();
        let fy = project_f_pl(&sl2, &lam(), &y).unwrap();
        assert_eq!(fx.flag(), x.flag());
        assert_eq!(fy.flag(), x.flag());
        let gx = project_f_pl(&sl2, &lam().neg(), &x).unwrap();
        let gy = project_f_pl(&sl2, &lam().neg(), &y).unwrap();
        assert_ne!(gx.flag(), gy.flag());
        for (l, p) in [(lam(), &x), (lam(), &y), (lam().neg(), &x), (lam().neg(), &y)] {
            assert_eq!(
                project_f_pl_via_limit(&sl2, &l, p).unwrap(),
                *project_f_pl(&sl2, &l, p).unwrap().flag()
            );
        }
    }
}
