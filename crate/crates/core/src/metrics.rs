//! Admissible metrics on one apartment.
//!
//! Distances are always handled squared, so every comparison stays exact.

use num::Zero;
use serde::Serialize;

use crate::apartment::{central_cochars, ApartmentData};
use crate::error::MetricError;
use crate::lattice::{gen_eig_bounds, sqrt_q, CocharVec, LatticeError, LatticeMap, QMatrix, Scalar, SPDForm, Q};

/// How a metric was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Base,
    WeylAverage { group: String, order: usize },
    Pullback { map: LatticeMap },
    Product,
    Scaled { factor: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibleMetric {
    pub form: SPDForm,
    pub provenance: Vec<Provenance>,
}

impl AdmissibleMetric {
    /// Wraps a form without any invariance check.
    pub fn base(form: SPDForm) -> AdmissibleMetric {
        AdmissibleMetric {
            form,
            provenance: vec![Provenance::Base],
        }
    }

    /// Wraps a form after checking `wᵀ·M·w = M` for every Weyl generator.
    pub fn for_apartment(form: SPDForm, a: &ApartmentData) -> Result<AdmissibleMetric, MetricError> {
        check_dim(form.dim(), a.rank())?;
        if let Some(k) = invariance_failure(&form, a) {
            return Err(MetricError::NotWeylInvariant(k));
        }
        Ok(AdmissibleMetric::base(form))
    }

    /// The identity form averaged over the Weyl group.
    pub fn standard(a: &ApartmentData) -> AdmissibleMetric {
        weyl_average(&SPDForm::identity(a.rank()), a).expect("identity has the apartment's rank")
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    /// The metric whose form is `s·M`; distances scale by `s`.
    pub fn scaled(&self, s: &Q) -> Result<AdmissibleMetric, MetricError> {
        let mut provenance = self.provenance.clone();
        provenance.push(Provenance::Scaled {
            factor: crate::lattice::format_q(s),
        });
        Ok(AdmissibleMetric {
            form: self.form.scale(s)?,
            provenance,
        })
    }

    pub fn is_weyl_invariant(&self, a: &ApartmentData) -> bool {
        self.dim() == a.rank() && invariance_failure(&self.form, a).is_none()
    }
}

fn check_dim(expected: usize, found: usize) -> Result<(), MetricError> {
    if expected != found {
        return Err(LatticeError::DimensionMismatch { expected, found }.into());
    }
    Ok(())
}

fn congruence(form: &QMatrix, w: &QMatrix) -> QMatrix {
    &(&w.transpose() * form) * w
}

fn invariance_failure(form: &SPDForm, a: &ApartmentData) -> Option<usize> {
    a.weyl_gens()
        .iter()
        .position(|w| congruence(form.matrix(), &w.to_q()) != *form.matrix())
}

/// `(1/|W|)·Σ_w wᵀ·M·w`.
pub fn weyl_average(form: &SPDForm, a: &ApartmentData) -> Result<AdmissibleMetric, MetricError> {
    check_dim(form.dim(), a.rank())?;
    let group = a.weyl_group();
    let mut acc = QMatrix::zeros(a.rank(), a.rank());
    for w in group {
        acc = acc.add(&congruence(form.matrix(), &w.to_q()));
    }
    let avg = acc.scale(&Q::new(1.into(), group.len().into()));
    Ok(AdmissibleMetric {
        form: SPDForm::new(avg)?,
        provenance: vec![
            Provenance::Base,
            Provenance::WeylAverage {
                group: a.name().to_string(),
                order: group.len(),
            },
        ],
    })
}

/// `fᵀ·M′·f` for an embedding `f` that is injective over ℚ.
pub fn pullback(metric: &AdmissibleMetric, f: &LatticeMap) -> Result<AdmissibleMetric, MetricError> {
    check_dim(metric.dim(), f.rows())?;
    if !f.is_injective() {
        return Err(MetricError::NotInjective);
    }
    let fq = f.to_q();
    let form = SPDForm::new(congruence(metric.form.matrix(), &fq))?;
    let mut provenance = metric.provenance.clone();
    provenance.push(Provenance::Pullback { map: f.clone() });
    Ok(AdmissibleMetric { form, provenance })
}

/// Block-diagonal form on the product apartment.
pub fn product_metric(d1: &AdmissibleMetric, d2: &AdmissibleMetric) -> AdmissibleMetric {
    let (n1, n2) = (d1.dim(), d2.dim());
    let mut m = QMatrix::zeros(n1 + n2, n1 + n2);
    for i in 0..n1 {
        for j in 0..n1 {
            m[(i, j)] = d1.form.matrix()[(i, j)].clone();
        }
    }
    for i in 0..n2 {
        for j in 0..n2 {
            m[(n1 + i, n1 + j)] = d2.form.matrix()[(i, j)].clone();
        }
    }
    AdmissibleMetric {
        form: SPDForm::new(m).expect("block sum of positive-definite forms"),
        provenance: vec![Provenance::Product],
    }
}

/// Form-orthogonal splitting `x = x_Z + x_⊥` along the central cocharacters.
#[derive(Debug, Clone, Serialize)]
pub struct CentralSplit {
    pub z_basis: Vec<CocharVec>,
    pub perp_basis: Vec<CocharVec>,
    /// Matrix of `x ↦ x_Z`.
    pub proj_z: QMatrix,
    /// Matrix of `x ↦ x_⊥`.
    pub proj_perp: QMatrix,
    form: SPDForm,
}

impl CentralSplit {
    pub fn split(&self, x: &CocharVec) -> Result<(CocharVec, CocharVec), MetricError> {
        let xz = apply_q(&self.proj_z, x)?;
        let xp = x.sub(&xz);
        Ok((xz, xp))
    }

    pub fn dist2_z(&self, x: &CocharVec, y: &CocharVec) -> Result<Scalar, MetricError> {
        let d = apply_q(&self.proj_z, &x.sub(y))?;
        Ok(self.form.eval(&d, &d)?)
    }

    pub fn dist2_perp(&self, x: &CocharVec, y: &CocharVec) -> Result<Scalar, MetricError> {
        let d = apply_q(&self.proj_perp, &x.sub(y))?;
        Ok(self.form.eval(&d, &d)?)
    }
}

fn apply_q(m: &QMatrix, x: &CocharVec) -> Result<CocharVec, MetricError> {
    check_dim(m.cols(), x.len())?;
    let mut out = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let mut acc = Scalar::zero();
        for j in 0..m.cols() {
            if !m[(i, j)].is_zero() {
                acc = acc.checked_add(&x.coords[j].mul_q(&m[(i, j)])).map_err(LatticeError::from)?;
            }
        }
        out.push(acc);
    }
    Ok(CocharVec::new(out))
}

pub fn central_split(metric: &AdmissibleMetric, a: &ApartmentData) -> Result<CentralSplit, MetricError> {
    let n = a.rank();
    check_dim(metric.dim(), n)?;
    let z_basis = central_cochars(a);
    let f = metric.form.matrix();
    let (proj_z, perp_basis) = if z_basis.is_empty() {
        let perp = QMatrix::identity(n).to_rows();
        (QMatrix::zeros(n, n), perp)
    } else {
        let zcols: Vec<Vec<Q>> = z_basis.iter().map(|z| z.to_rational().expect("integral")).collect();
        let zm = QMatrix::from_cols(&zcols);
        let zt_f = &zm.transpose() * f;
        let gram = &zt_f * &zm;
        let ginv = gram.inverse().expect("Gram matrix of independent vectors");
        let proj = &(&zm * &ginv) * &zt_f;
        (proj, zt_f.kernel())
    };
    let proj_perp = QMatrix::identity(n).sub(&proj_z);
    Ok(CentralSplit {
        z_basis,
        perp_basis: perp_basis
            .iter()
            .map(|v| CocharVec::rational(&crate::lattice::primitive(v)))
            .collect(),
        proj_z,
        proj_perp,
        form: metric.form.clone(),
    })
}

/// Certified `(c, C)` with `c·d₂² ≤ d₁² ≤ C·d₂²`.
pub fn bilipschitz(d1: &AdmissibleMetric, d2: &AdmissibleMetric) -> Result<(Q, Q), MetricError> {
    Ok(gen_eig_bounds(&d1.form, &d2.form)?)
}

/// `(x−y)ᵀ·M·(x−y)`.
pub fn dist2(metric: &AdmissibleMetric, x: &CocharVec, y: &CocharVec) -> Result<Scalar, MetricError> {
    check_dim(metric.dim(), x.len())?;
    check_dim(metric.dim(), y.len())?;
    let d = x.sub(y);
    Ok(metric.form.eval(&d, &d)?)
}

/// Squared chordal distance between `x/‖x‖` and `y/‖y‖`: `2 − 2⟨x,y⟩/(‖x‖‖y‖)`.
///
/// Needs rational inputs; the result lies in `ℚ(√d)` with `d` the square-free
/// part of `‖x‖²‖y‖²`.
pub fn spherical_dist2(metric: &AdmissibleMetric, x: &CocharVec, y: &CocharVec) -> Result<Scalar, MetricError> {
    check_dim(metric.dim(), x.len())?;
    check_dim(metric.dim(), y.len())?;
    let (xq, yq) = match (x.to_rational(), y.to_rational()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(MetricError::IrrationalInput),
    };
    if x.is_zero() || y.is_zero() {
        return Err(MetricError::ZeroVector);
    }
    let ip = metric.form.eval_q(&xq, &yq);
    let nn = metric.form.eval_q(&xq, &xq) * metric.form.eval_q(&yq, &yq);
    let root = sqrt_q(&nn).ok_or_else(|| LatticeError::Internal("norm product exceeds 64 bits".into()))?;
    // ip/√N = ip·√N/N
    let cos = root.mul_q(&(ip / &nn));
    Ok(Scalar::int(2) - cos.mul_q(&Q::from_integer(2.into())))
}

/// Squared norm `‖x‖²` of a rational vector.
pub fn norm2_q(metric: &AdmissibleMetric, x: &[Q]) -> Q {
    metric.form.eval_q(x, x)
}
