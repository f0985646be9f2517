//! First-stage strength statistics.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iv::{self, bootstrap_replicates, first_stage, IVModel};
use crate::linalg::{correlation, least_squares, quadratic_form_inv, sample_var};
use crate::regression::{sample_covariance, BootstrapMeta, FitResult, VCovFlavor, VCovSpec};

/// Effective-F cutoff treated as "strong enough".
pub const RULE_OF_THUMB: f64 = 10.0;

/// Wald statistic of the instrument coefficients divided by their count,
/// using the variance stored in the fit.
pub fn partial_f(first_stage: &FitResult) -> Result<f64> {
    let pi = first_stage.coef_vector();
    wald_over_p(&first_stage.vcov, &pi)
}

fn wald_over_p(v: &DMatrix<f64>, pi: &DVector<f64>) -> Result<f64> {
    let w = quadratic_form_inv(v, pi).ok_or_else(|| {
        Error::SingularVCov("variance of the instrument coefficients is singular".into())
    })?;
    Ok(w.max(0.0) / pi.len() as f64)
}

/// `pi' Q pi / tr(Sigma Q)` with `Q = Z'Z / N`, where `Sigma` is the variance
/// stored in the first-stage fit (robust or cluster-robust).
pub fn effective_f(first_stage: &FitResult, instruments: &DMatrix<f64>) -> Result<f64> {
    let n = instruments.nrows() as f64;
    let q = instruments.transpose() * instruments / n;
    let pi = first_stage.coef_vector();
    let num = pi.dot(&(&q * &pi));
    let den = (&first_stage.vcov * &q).trace();
    if !den.is_finite() || den <= 0.0 {
        return Err(Error::SingularVCov(
            "first-stage variance has zero trace against the instrument second moments".into(),
        ));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapF {
    /// Wald form on the first-stage coefficients.
    #[serde(with = "crate::float")]
    pub f: f64,
    /// Squared bootstrap z-statistic of the 2SLS coefficient.
    #[serde(with = "crate::float")]
    pub f_tau: f64,
    /// The bootstrap variance of the first-stage coefficients vanished.
    pub degenerate: bool,
    pub meta: BootstrapMeta,
}

pub fn bootstrap_f(model: &IVModel, spec: &VCovSpec) -> Result<BootstrapF> {
    let names = &model.names().instruments;
    let (draws, meta) = bootstrap_replicates(model, spec, |m| {
        let pi = least_squares(m.z(), m.d(), names)?.coef;
        Ok((pi, iv::tsls_point(m).ok()))
    })?;
    let pi_hat = least_squares(model.z(), model.d(), names)?.coef;
    let pis: Vec<DVector<f64>> = draws.iter().map(|(p, _)| p.clone()).collect();
    let v = sample_covariance(&pis)?;
    let scale = pi_hat.norm_squared().max(f64::MIN_POSITIVE);
    let (f, degenerate) = match wald_over_p(&v, &pi_hat) {
        Ok(f) if v.amax() > 1e-24 * scale => (f, false),
        _ => (f64::INFINITY, true),
    };
    let taus: Vec<f64> = draws.iter().filter_map(|(_, t)| *t).collect();
    let f_tau = match iv::tsls_point(model) {
        Ok(tau) if taus.len() >= 2 => tau * tau / sample_var(&taus),
        _ => f64::NAN,
    };
    Ok(BootstrapF {
        f,
        f_tau,
        degenerate,
        meta,
    })
}

/// Sample correlation between the partialled treatment and its first-stage
/// fitted values.
pub fn rho_d_dhat(model: &IVModel) -> Result<f64> {
    let proj = iv::project(model)?;
    correlation(model.d().as_slice(), proj.d_hat.as_slice()).ok_or_else(|| {
        Error::DegenerateFirstStage("fitted treatment has zero variance".into())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthReport {
    #[serde(with = "crate::float")]
    pub f_classic: f64,
    #[serde(with = "crate::float")]
    pub f_robust: f64,
    #[serde(with = "crate::float::option")]
    pub f_cluster: Option<f64>,
    #[serde(with = "crate::float")]
    pub f_boot: f64,
    #[serde(with = "crate::float")]
    pub f_effective: f64,
    pub effective_flavor: VCovFlavor,
    #[serde(with = "crate::float")]
    pub rho_d_dhat: f64,
    #[serde(with = "crate::float")]
    pub partial_r2: f64,
    pub p_z: usize,
    pub passes_rule_of_thumb: bool,
    #[serde(with = "crate::float")]
    pub f_boot_tau: f64,
    pub f_boot_degenerate: bool,
    pub bootstrap: BootstrapMeta,
}

/// All first-stage statistics for one model. Clustered statistics are
/// computed when `spec` names a cluster column; the bootstrap uses
/// `spec.boot_reps` and `spec.seed`.
pub fn strength_report(model: &IVModel, spec: &VCovSpec) -> Result<StrengthReport> {
    let classic = first_stage(model, &spec.with_flavor(VCovFlavor::Classic), 0.05)?;
    let robust = first_stage(model, &spec.with_flavor(VCovFlavor::Hc1), 0.05)?;
    let cluster = if spec.is_clustered() {
        Some(first_stage(model, &spec.with_flavor(VCovFlavor::Cr1), 0.05)?)
    } else {
        None
    };
    let f_cluster = cluster.as_ref().map(partial_f).transpose()?;
    let eff_fit = cluster.as_ref().unwrap_or(&robust);
    let f_effective = effective_f(eff_fit, model.z())?;
    let boot = bootstrap_f(model, spec)?;
    let rho = rho_d_dhat(model)?;
    Ok(StrengthReport {
        f_classic: partial_f(&classic)?,
        f_robust: partial_f(&robust)?,
        f_cluster,
        f_boot: boot.f,
        f_effective,
        effective_flavor: eff_fit.flavor,
        rho_d_dhat: rho,
        partial_r2: rho * rho,
        p_z: model.p_z(),
        passes_rule_of_thumb: f_effective > RULE_OF_THUMB,
        f_boot_tau: boot.f_tau,
        f_boot_degenerate: boot.degenerate,
        bootstrap: boot.meta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iv::ModelNames;

    fn names(p: usize) -> ModelNames {
        ModelNames {
            outcome: "y".into(),
            treatment: "d".into(),
            instruments: (0..p).map(|j| format!("z{j}")).collect(),
            controls: vec![],
        }
    }

    fn fix_a() -> IVModel {
        IVModel::from_columns(
            &[2., 1., 2., 5., 3., 7.],
            &[1., 0., 1., 2., 1., 3.],
            &[vec![0., 0., 0., 1., 1., 1.]],
            &[],
            names(1),
            true,
            None,
            None,
        )
        .unwrap()
    }

    #[test]
    fn single_instrument_f_is_squared_t() {
        let m = fix_a();
        for spec in [VCovSpec::classic(), VCovSpec::hc1()] {
            let fs = first_stage(&m, &spec, 0.05).unwrap();
            let f = partial_f(&fs).unwrap();
            assert!((f - fs.t[0] * fs.t[0]).abs() < 1e-8 * f.max(1.0));
        }
        let robust = first_stage(&m, &VCovSpec::hc1(), 0.05).unwrap();
        let fe = effective_f(&robust, m.z()).unwrap();
        assert!((fe - partial_f(&robust).unwrap()).abs() < 1e-8 * fe);
    }

    #[test]
    fn partial_r2_is_squared_rho() {
        let m = fix_a();
        let rho = rho_d_dhat(&m).unwrap();
        let d = m.d();
        let fs = first_stage(&m, &VCovSpec::classic(), 0.05).unwrap();
        let rss: f64 = fs.residuals.iter().map(|e| e * e).sum();
        let r2 = 1.0 - rss / d.norm_squared();
        assert!((rho * rho - r2).abs() < 1e-12);
    }

    #[test]
    fn deterministic_first_stage_flags_bootstrap() {
        let z: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
        let d: Vec<f64> = z.iter().map(|v| 2.0 * v + 1.0).collect();
        let y: Vec<f64> = (0..40).map(|i| (i as f64 * 0.11).cos()).collect();
        let m = IVModel::from_columns(&y, &d, &[z], &[], names(1), true, None, None).unwrap();
        let b = bootstrap_f(&m, &VCovSpec::bootstrap(50, 3)).unwrap();
        assert!(b.degenerate);
        assert!(b.f.is_infinite());
    }
}
