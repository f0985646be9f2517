//! 2SLS, its component regressions, and OLS-vs-2SLS comparisons.

mod model;

pub use model::{bootstrap_replicates, IVModel, Identification, ModelNames, INTERCEPT};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{least_squares, sample_var};
use crate::regression::{
    sample_covariance, sandwich_vcov, FitResult, SandwichInput, VCovFlavor, VCovSpec,
};

/// Below this `|corr(d, d_hat)|` the first stage is treated as exactly zero.
pub const DEGENERATE_FIRST_STAGE: f64 = 1e-12;

/// First-stage projection of the partialled treatment on the partialled
/// instruments.
#[derive(Debug, Clone)]
pub struct Projection {
    pub pi: DVector<f64>,
    pub d_hat: DVector<f64>,
    /// `d_hat' d_hat`, which equals `d' P_Z d`.
    pub dpd: f64,
}

pub fn project(model: &IVModel) -> Result<Projection> {
    let sol = least_squares(model.z(), model.d(), &model.names().instruments)?;
    let d_hat = model.d() - &sol.residuals;
    let dpd = d_hat.norm_squared();
    let dn = model.d().norm();
    let cos = if dn > 0.0 { d_hat.norm() / dn } else { 0.0 };
    if cos.is_nan() || cos < DEGENERATE_FIRST_STAGE {
        return Err(Error::DegenerateFirstStage(format!(
            "instruments are uncorrelated with '{}'",
            model.names().treatment
        )));
    }
    Ok(Projection {
        pi: sol.coef,
        d_hat,
        dpd,
    })
}

fn tau_of(model: &IVModel, proj: &Projection) -> f64 {
    proj.d_hat.dot(model.y()) / proj.dpd
}

/// 2SLS point estimate alone; cheaper than a full fit.
pub fn tsls_point(model: &IVModel) -> Result<f64> {
    let proj = project(model)?;
    Ok(tau_of(model, &proj))
}

/// 2SLS point estimate and analytic standard error under `flavor`.
pub fn tsls_point_se(model: &IVModel, flavor: VCovFlavor) -> Result<(f64, f64)> {
    let proj = project(model)?;
    let tau = tau_of(model, &proj);
    let v = tsls_analytic_vcov(model, &proj, tau, flavor)?;
    Ok((tau, v[(0, 0)].max(0.0).sqrt()))
}

fn tsls_analytic_vcov(model: &IVModel, proj: &Projection, tau: f64, flavor: VCovFlavor) -> Result<DMatrix<f64>> {
    let e = model.y() - model.d() * tau;
    let x = DMatrix::from_column_slice(model.n(), 1, proj.d_hat.as_slice());
    let bread = DMatrix::from_element(1, 1, 1.0 / proj.dpd);
    let clusters = if flavor == VCovFlavor::Cr1 {
        Some(model.clusters().ok_or_else(|| {
            Error::Config("cr1 variance requested but the model has no cluster column".into())
        })?)
    } else {
        None
    };
    sandwich_vcov(
        SandwichInput {
            x: &x,
            bread: &bread,
            clusters,
            k: 1 + model.absorbed(),
        },
        &e,
        flavor,
    )
}

/// Two-stage least squares on the partialled data. The variance uses the
/// structural residuals `y - d * tau`.
pub fn tsls_fit(model: &IVModel, spec: &VCovSpec, alpha: f64) -> Result<FitResult> {
    spec.validate()?;
    model.clusters_for(spec)?;
    let proj = project(model)?;
    let tau = tau_of(model, &proj);
    let e = model.y() - model.d() * tau;
    let (vcov, boot) = match spec.flavor {
        VCovFlavor::Bootstrap => {
            let (draws, meta) = bootstrap_replicates(model, spec, tsls_point)?;
            let v = sample_var(&draws);
            (DMatrix::from_element(1, 1, v), Some(meta))
        }
        f => (tsls_analytic_vcov(model, &proj, tau, f)?, None),
    };
    Ok(FitResult::assemble(
        vec![model.names().treatment.clone()],
        vec![tau],
        vcov,
        e.iter().copied().collect(),
        1 + model.absorbed(),
        spec.flavor,
        alpha,
        boot,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    Treatment,
    Outcome,
}

/// OLS of a partialled target on the partialled instruments.
fn instrument_regression(model: &IVModel, target: Target, spec: &VCovSpec, alpha: f64) -> Result<FitResult> {
    spec.validate()?;
    let clusters = model.clusters_for(spec)?;
    let pick = |m: &IVModel| match target {
        Target::Treatment => m.d().clone(),
        Target::Outcome => m.y().clone(),
    };
    let names = &model.names().instruments;
    let y = pick(model);
    let sol = least_squares(model.z(), &y, names)?;
    let k = model.p_z() + model.absorbed();
    let (vcov, boot) = match spec.flavor {
        VCovFlavor::Bootstrap => {
            let (draws, meta) = bootstrap_replicates(model, spec, |m| {
                Ok(least_squares(m.z(), &pick(m), names)?.coef)
            })?;
            (sample_covariance(&draws)?, Some(meta))
        }
        f => (
            sandwich_vcov(
                SandwichInput {
                    x: model.z(),
                    bread: &sol.bread,
                    clusters,
                    k,
                },
                &sol.residuals,
                f,
            )?,
            None,
        ),
    };
    Ok(FitResult::assemble(
        names.clone(),
        sol.coef.iter().copied().collect(),
        vcov,
        sol.residuals.iter().copied().collect(),
        k,
        spec.flavor,
        alpha,
        boot,
    ))
}

pub fn first_stage(model: &IVModel, spec: &VCovSpec, alpha: f64) -> Result<FitResult> {
    instrument_regression(model, Target::Treatment, spec, alpha)
}

pub fn reduced_form(model: &IVModel, spec: &VCovSpec, alpha: f64) -> Result<FitResult> {
    instrument_regression(model, Target::Outcome, spec, alpha)
}

/// First stage (treatment on instruments) and reduced form (outcome on
/// instruments), both after partialling out the controls. Only the
/// instrument coefficients are reported.
pub fn component_fits(model: &IVModel, spec: &VCovSpec, alpha: f64) -> Result<(FitResult, FitResult)> {
    Ok((first_stage(model, spec, alpha)?, reduced_form(model, spec, alpha)?))
}

/// OLS of the outcome on the treatment and controls, leaving out the
/// instruments.
pub fn naive_ols(model: &IVModel, spec: &VCovSpec, alpha: f64) -> Result<FitResult> {
    spec.validate()?;
    let clusters = model.clusters_for(spec)?;
    let name = vec![model.names().treatment.clone()];
    let x = DMatrix::from_column_slice(model.n(), 1, model.d().as_slice());
    let sol = least_squares(&x, model.y(), &name)?;
    let k = 1 + model.absorbed();
    let (vcov, boot) = match spec.flavor {
        VCovFlavor::Bootstrap => {
            let (draws, meta) = bootstrap_replicates(model, spec, |m| {
                let dd = m.d().norm_squared();
                if dd > 0.0 {
                    Ok(m.d().dot(m.y()) / dd)
                } else {
                    Err(Error::DegreesOfFreedom { n: m.n(), k: 1 })
                }
            })?;
            (DMatrix::from_element(1, 1, sample_var(&draws)), Some(meta))
        }
        f => (
            sandwich_vcov(
                SandwichInput {
                    x: &x,
                    bread: &sol.bread,
                    clusters,
                    k,
                },
                &sol.residuals,
                f,
            )?,
            None,
        ),
    };
    Ok(FitResult::assemble(
        name,
        sol.coef.iter().copied().collect(),
        vcov,
        sol.residuals.iter().copied().collect(),
        k,
        spec.flavor,
        alpha,
        boot,
    ))
}

/// Difference-in-means ratio for a binary instrument and no covariates.
pub fn wald_ratio(model: &IVModel) -> Result<f64> {
    if model.p_z() != 1 {
        return Err(Error::Precondition("the Wald ratio needs exactly one instrument".into()));
    }
    if model.absorbed() != usize::from(model.has_intercept()) || model.is_weighted() {
        return Err(Error::Precondition("the Wald ratio takes no covariates or weights".into()));
    }
    let z = model.raw_z().column(0);
    let mut levels: Vec<f64> = z.iter().copied().collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    if levels.len() != 2 {
        return Err(Error::Precondition(format!(
            "instrument '{}' is not binary ({} distinct values)",
            model.names().instruments[0],
            levels.len()
        )));
    }
    let (y, d) = (model.raw_y(), model.raw_d());
    let mean_at = |v: &DVector<f64>, level: f64| {
        let (s, c) = z
            .iter()
            .zip(v.iter())
            .filter(|(zi, _)| **zi == level)
            .fold((0.0, 0.0), |(s, c), (_, vi)| (s + vi, c + 1.0));
        s / c
    };
    let dy = mean_at(y, levels[1]) - mean_at(y, levels[0]);
    let dd = mean_at(d, levels[1]) - mean_at(d, levels[0]);
    if dd == 0.0 {
        return Err(Error::DegenerateFirstStage(
            "treatment means are equal across instrument groups".into(),
        ));
    }
    Ok(dy / dd)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    #[serde(with = "crate::float")]
    pub tau_2sls: f64,
    #[serde(with = "crate::float")]
    pub tau_ols: f64,
    /// `|tau_2sls / tau_ols|`; absent when the OLS estimate is zero.
    #[serde(with = "crate::float::option")]
    pub ratio_abs: Option<f64>,
    /// Absent when either estimate is exactly zero.
    pub same_sign: Option<bool>,
    #[serde(with = "crate::float")]
    pub se_ratio: f64,
    pub se_flavor: VCovFlavor,
    pub ols_zero: bool,
}

/// Compares 2SLS with naive OLS. Standard errors use the analytic flavor of
/// `spec`.
pub fn discrepancy(model: &IVModel, spec: &VCovSpec) -> Result<DiscrepancyReport> {
    let analytic = spec.with_flavor(spec.analytic_flavor());
    let iv = tsls_fit(model, &analytic, 0.05)?;
    let ols = naive_ols(model, &analytic, 0.05)?;
    Ok(compare(iv.coef[0], ols.coef[0], iv.se[0], ols.se[0], analytic.flavor))
}

pub(crate) fn compare(tau_2sls: f64, tau_ols: f64, se_iv: f64, se_ols: f64, flavor: VCovFlavor) -> DiscrepancyReport {
    let ols_zero = tau_ols == 0.0;
    DiscrepancyReport {
        tau_2sls,
        tau_ols,
        ratio_abs: (!ols_zero).then(|| (tau_2sls / tau_ols).abs()),
        same_sign: (!ols_zero && tau_2sls != 0.0).then_some((tau_2sls > 0.0) == (tau_ols > 0.0)),
        se_ratio: se_iv / se_ols,
        se_flavor: flavor,
        ols_zero,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Dataset, Roles};

    pub(crate) fn fix_a() -> IVModel {
        let data = Dataset::new(
            vec![
                ("z".into(), vec![0., 0., 0., 1., 1., 1.]),
                ("d".into(), vec![1., 0., 1., 2., 1., 3.]),
                ("y".into(), vec![2., 1., 2., 5., 3., 7.]),
            ],
            Roles::new("y", "d", &["z"]),
        )
        .unwrap();
        IVModel::from_dataset(&data).unwrap()
    }

    #[test]
    fn fix_a_point_estimates() {
        let m = fix_a();
        let spec = VCovSpec::classic();
        assert!((tsls_fit(&m, &spec, 0.05).unwrap().coef[0] - 2.5).abs() < 1e-12);
        assert!((naive_ols(&m, &spec, 0.05).unwrap().coef[0] - 2.125).abs() < 1e-12);
        let (fs, rf) = component_fits(&m, &spec, 0.05).unwrap();
        assert!((fs.coef[0] - 4.0 / 3.0).abs() < 1e-12);
        assert!((rf.coef[0] - 10.0 / 3.0).abs() < 1e-12);
        assert!((wald_ratio(&m).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn fix_a_discrepancy() {
        let r = discrepancy(&fix_a(), &VCovSpec::classic()).unwrap();
        assert!((r.ratio_abs.unwrap() - 2.5 / 2.125).abs() < 1e-12);
        assert_eq!(r.same_sign, Some(true));
    }

    #[test]
    fn instrument_equal_to_treatment_reproduces_ols() {
        let d = vec![0.3, 1.2, -0.4, 2.2, 0.9, -1.1, 0.5];
        let y = vec![1.0, 2.5, -0.2, 3.9, 1.1, -2.0, 0.4];
        let names = ModelNames {
            outcome: "y".into(),
            treatment: "d".into(),
            instruments: vec!["z".into()],
            controls: vec![],
        };
        let m = IVModel::from_columns(&y, &d, std::slice::from_ref(&d), &[], names, true, None, None).unwrap();
        let spec = VCovSpec::hc1();
        let iv = tsls_fit(&m, &spec, 0.05).unwrap();
        let ols = naive_ols(&m, &spec, 0.05).unwrap();
        assert_eq!(iv.coef[0], ols.coef[0]);
        let r = discrepancy(&m, &spec).unwrap();
        assert_eq!(r.ratio_abs, Some(1.0));
    }

    #[test]
    fn wald_ratio_ignores_outcome_shift_and_rejects_nonbinary() {
        let m = fix_a();
        let shifted = m.with_raw_outcome(m.raw_y().add_scalar(17.0)).unwrap();
        assert!((wald_ratio(&shifted).unwrap() - wald_ratio(&m).unwrap()).abs() < 1e-12);
        let mut z = m.raw_z().clone();
        z[(0, 0)] = 0.5;
        let nonbinary = m.with_raw_instruments(z).unwrap();
        assert!(matches!(wald_ratio(&nonbinary), Err(Error::Precondition(_))));
    }

    #[test]
    fn uncorrelated_first_stage_is_degenerate() {
        let names = ModelNames {
            outcome: "y".into(),
            treatment: "d".into(),
            instruments: vec!["z".into()],
            controls: vec![],
        };
        // z is orthogonal to d after demeaning
        let z = vec![1., -1., 1., -1.];
        let d = vec![1., 1., -1., -1.];
        let y = vec![0.5, 0.2, -0.1, 0.7];
        let m = IVModel::from_columns(&y, &d, &[z], &[], names, true, None, None).unwrap();
        assert!(matches!(
            tsls_fit(&m, &VCovSpec::classic(), 0.05),
            Err(Error::DegenerateFirstStage(_))
        ));
    }
}
