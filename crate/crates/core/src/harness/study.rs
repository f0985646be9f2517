//! One study end to end: load, fit, diagnose, infer.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::inference::{self, InferenceMethod, InferenceResult};
use crate::iv::{self, IVModel};
use crate::ltz::{self, LtzPrior};
use crate::regression::{correction_factor, VCovFlavor};
use crate::strength;

use super::config::StudyConfig;
use super::load::{load_dataset, LoadedData};
use super::report::{
    CorrectionFactors, DiagnosticsReport, FitSummary, InferenceEntry, Provenance, Section,
    SectionError, ZfsSummary, SCHEMA,
};

/// Loads the study's CSV and runs every section. Data that cannot be loaded
/// is an error; failures after that are recorded in the report.
pub fn run_study(config: &StudyConfig) -> Result<DiagnosticsReport> {
    config.validate()?;
    let loaded = load_dataset(&config.data_path(), &config.roles(), config.zfs_flag.as_deref())?;
    Ok(run_study_on(config, &loaded))
}

pub fn run_study_on(config: &StudyConfig, loaded: &LoadedData) -> DiagnosticsReport {
    let mut provenance = Provenance {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        boot_reps: config.boot_reps,
        alpha: config.alpha,
        n: Some(loaded.dataset.n_rows()),
        dropped_rows: Some(loaded.dropped),
        clusters: loaded.dataset.clusters().map(|c| c.count()),
        correction_factors: None,
        config: config.clone(),
    };
    let model = match IVModel::from_dataset(&loaded.dataset) {
        Ok(m) => m,
        Err(e) => return failed_report(config, provenance, &e),
    };
    let n = model.n();
    let k = 1 + model.absorbed();
    provenance.correction_factors = Some(CorrectionFactors {
        classic: correction_factor(VCovFlavor::Classic, n, k, n),
        hc1: correction_factor(VCovFlavor::Hc1, n, k, n),
        cr1: model
            .clusters()
            .map(|c| correction_factor(VCovFlavor::Cr1, n, k, c.count())),
    });

    let spec = config.vcov_spec();
    let alpha = config.alpha;
    let summary = |r: Result<crate::regression::FitResult>| Section::from_result(r.map(|f| FitSummary::from(&f)));

    let ols = summary(iv::naive_ols(&model, &spec, alpha));
    let tsls_fit = iv::tsls_fit(&model, &spec, alpha);
    let first_stage = summary(iv::first_stage(&model, &spec, alpha));
    let reduced_form = summary(iv::reduced_form(&model, &spec, alpha));
    let strength = Section::from_result(strength::strength_report(&model, &spec));
    let inference = run_methods(&model, config);
    let discrepancy = Section::from_result(iv::discrepancy(&model, &spec));

    let zfs_result = loaded.zfs_rows.as_ref().map(|rows| ltz::zfs_placebo(&model, rows, &spec, alpha));
    let ltz = config.ltz.as_ref().map(|cfg| {
        let prior = if cfg.from_placebo {
            match &zfs_result {
                Some(Ok(z)) => Ok(LtzPrior::from_placebo(z)),
                Some(Err(e)) => Err(Error::Precondition(format!("placebo fit failed: {e}"))),
                None => Err(Error::Config("ltz.from_placebo needs a zfs_flag column".into())),
            }
        } else {
            let mu = cfg.mu.clone().unwrap_or_default();
            let p = mu.len();
            let omega = match &cfg.omega {
                Some(rows) => matrix_from_rows(rows, p),
                None => Ok(DMatrix::zeros(p, p)),
            };
            omega.and_then(|o| LtzPrior::new(mu, o))
        };
        Section::from_result(prior.and_then(|p| ltz::ltz_adjust(&model, &p, &spec, alpha)))
    });
    let zfs = zfs_result.map(|r| Section::from_result(r.map(|z| ZfsSummary::from(&z))));

    DiagnosticsReport {
        schema: SCHEMA.to_string(),
        study: config.display_name(),
        design: config.design,
        reported_f: config.reported_f,
        ols,
        tsls: summary(tsls_fit),
        first_stage,
        reduced_form,
        strength,
        inference,
        discrepancy,
        zfs,
        ltz,
        provenance,
    }
}

fn matrix_from_rows(rows: &[Vec<f64>], p: usize) -> Result<DMatrix<f64>> {
    if rows.len() != p || rows.iter().any(|r| r.len() != p) {
        return Err(Error::Config(format!("ltz.omega must be {p}x{p}")));
    }
    Ok(DMatrix::from_fn(p, p, |i, j| rows[i][j]))
}

fn run_methods(model: &IVModel, config: &StudyConfig) -> Vec<InferenceEntry> {
    let spec = config.vcov_spec();
    let alpha = config.alpha;
    let wants_boot = config
        .methods
        .iter()
        .any(|m| matches!(m, InferenceMethod::BootstrapC | InferenceMethod::BootstrapT));
    let boot = wants_boot.then(|| inference::bootstrap_infer(model, &spec, alpha));
    config
        .methods
        .iter()
        .map(|&method| {
            let result: Result<InferenceResult> = match method {
                InferenceMethod::Analytic => inference::analytic_infer(model, &spec, alpha),
                InferenceMethod::Ar => inference::ar_infer(model, &spec, alpha),
                InferenceMethod::Tf => inference::tf_infer(model, &spec, alpha),
                InferenceMethod::BootstrapC | InferenceMethod::BootstrapT => {
                    match boot.as_ref().expect("bootstrap computed") {
                        Ok((c, t)) => Ok(if method == InferenceMethod::BootstrapC {
                            c.clone()
                        } else {
                            t.clone()
                        }),
                        Err(e) => {
                            let s = SectionError::from(e);
                            return InferenceEntry {
                                method,
                                result: Section::Error(s),
                            };
                        }
                    }
                }
            };
            InferenceEntry {
                method,
                result: Section::from_result(result),
            }
        })
        .collect()
}

fn failed_report(config: &StudyConfig, provenance: Provenance, e: &Error) -> DiagnosticsReport {
    log::warn!("model could not be built: {e}");
    let err = SectionError::from(e);
    fn fail<T>(e: &SectionError) -> Section<T> {
        Section::Error(e.clone())
    }
    DiagnosticsReport {
        schema: SCHEMA.to_string(),
        study: config.display_name(),
        design: config.design,
        reported_f: config.reported_f,
        ols: fail(&err),
        tsls: fail(&err),
        first_stage: fail(&err),
        reduced_form: fail(&err),
        strength: fail(&err),
        inference: config
            .methods
            .iter()
            .map(|&method| InferenceEntry { method, result: fail(&err) })
            .collect(),
        discrepancy: fail(&err),
        zfs: config.zfs_flag.as_ref().map(|_| fail(&err)),
        ltz: config.ltz.as_ref().map(|_| fail(&err)),
        provenance,
    }
}
