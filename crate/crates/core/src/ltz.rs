//! Zero-first-stage placebo tests and local-to-zero adjustment of 2SLS.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::inference::{IntervalSet, InferenceMethod, InferenceResult, Meta};
use crate::iv::{self, IVModel};
use crate::regression::{FitResult, VCovSpec};
use crate::strength::partial_f;
use crate::dist::{two_sided_p, z_critical};

/// Prior on the instruments' direct effect on the outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct LtzPrior {
    pub mu: DVector<f64>,
    pub omega: DMatrix<f64>,
}

impl LtzPrior {
    pub fn new(mu: Vec<f64>, omega: DMatrix<f64>) -> Result<Self> {
        let p = mu.len();
        if omega.shape() != (p, p) {
            return Err(Error::Config(format!(
                "prior covariance is {}x{}, expected {p}x{p}",
                omega.nrows(),
                omega.ncols()
            )));
        }
        let scale = omega.amax().max(1.0);
        if (&omega - omega.transpose()).amax() > 1e-10 * scale {
            return Err(Error::Config("prior covariance is not symmetric".into()));
        }
        let min_eig = omega.clone().symmetric_eigenvalues().min();
        if min_eig < -1e-10 * scale {
            return Err(Error::Config("prior covariance is not positive semidefinite".into()));
        }
        Ok(LtzPrior {
            mu: DVector::from_vec(mu),
            omega,
        })
    }

    pub fn zero(p_z: usize) -> Self {
        LtzPrior {
            mu: DVector::zeros(p_z),
            omega: DMatrix::zeros(p_z, p_z),
        }
    }

    /// Prior centered on a placebo reduced form, with its variance.
    pub fn from_placebo(placebo: &ZfsResult) -> Self {
        LtzPrior {
            mu: placebo.reduced_form.coef_vector(),
            omega: placebo.reduced_form.vcov.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZfsResult {
    /// Outcome on instruments within the placebo rows.
    pub reduced_form: FitResult,
    /// Treatment on instruments within the placebo rows, to check that the
    /// first stage is indeed near zero there.
    pub first_stage: FitResult,
    pub first_stage_f: f64,
    pub rows: usize,
}

/// Reduced-form regression restricted to rows where the instrument should
/// not move the treatment.
pub fn zfs_placebo(model: &IVModel, rows: &[usize], spec: &VCovSpec, alpha: f64) -> Result<ZfsResult> {
    if rows.is_empty() {
        return Err(Error::Precondition("placebo subsample is empty".into()));
    }
    if rows.len() == model.n() {
        log::warn!("placebo subsample covers every row; this is the full reduced form");
    }
    let sub = model.subset(rows)?;
    let (first_stage, reduced_form) = iv::component_fits(&sub, spec, alpha)?;
    let first_stage_f = partial_f(&first_stage).unwrap_or(f64::NAN);
    Ok(ZfsResult {
        reduced_form,
        first_stage,
        first_stage_f,
        rows: rows.len(),
    })
}

/// Local-to-zero adjustment: with `A = (d' P_Z d)^{-1} d' Z`,
/// `tau_ltz = tau_2sls - A mu` and `V_ltz = V_2sls + A omega A'`.
pub fn ltz_adjust(model: &IVModel, prior: &LtzPrior, spec: &VCovSpec, alpha: f64) -> Result<InferenceResult> {
    if prior.mu.len() != model.p_z() {
        return Err(Error::Config(format!(
            "prior has {} entries for {} instruments",
            prior.mu.len(),
            model.p_z()
        )));
    }
    let fit = iv::tsls_fit(model, spec, alpha)?;
    let proj = iv::project(model)?;
    let a = (model.z().transpose() * model.d()) / proj.dpd;
    let tau = fit.coef[0] - a.dot(&prior.mu);
    let var = fit.vcov[(0, 0)] + a.dot(&(&prior.omega * &a));
    let se = var.max(0.0).sqrt();
    let z = z_critical(alpha);
    Ok(InferenceResult {
        method: InferenceMethod::Analytic,
        point: tau,
        se: Some(se),
        ci: IntervalSet::bounded(tau - z * se, tau + z * se),
        p_null: two_sided_p(tau / se),
        alpha,
        meta: Meta {
            flavor: Some(spec.flavor),
            ..Meta::default()
        },
    })
}
