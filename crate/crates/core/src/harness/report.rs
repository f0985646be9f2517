//! The per-study diagnostics report and its JSON form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, ErrorClass};
use crate::inference::{InferenceMethod, InferenceResult};
use crate::iv::DiscrepancyReport;
use crate::ltz::ZfsResult;
use crate::regression::{FitResult, VCovFlavor};
use crate::strength::StrengthReport;

use super::config::{StudyConfig, StudyDesign};

pub const SCHEMA: &str = "ivdiag/1";

/// Why a report section could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionError {
    pub kind: String,
    pub class: String,
    pub exit_code: i32,
    pub message: String,
}

impl From<&Error> for SectionError {
    fn from(e: &Error) -> Self {
        let class = match e.class() {
            ErrorClass::Config => "config",
            ErrorClass::Data => "data",
            ErrorClass::Numerical => "numerical",
        };
        SectionError {
            kind: e.kind().to_string(),
            class: class.to_string(),
            exit_code: e.exit_code(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Section<T> {
    Ok(T),
    Error(SectionError),
}

impl<T> Section<T> {
    pub fn from_result(r: crate::Result<T>) -> Self {
        match r {
            Ok(v) => Section::Ok(v),
            Err(e) => {
                log::warn!("section failed: {e}");
                Section::Error(SectionError::from(&e))
            }
        }
    }

    pub fn ok(&self) -> Option<&T> {
        match self {
            Section::Ok(v) => Some(v),
            Section::Error(_) => None,
        }
    }

    pub fn error(&self) -> Option<&SectionError> {
        match self {
            Section::Ok(_) => None,
            Section::Error(e) => Some(e),
        }
    }
}

/// Serializable view of a [`FitResult`] without residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub names: Vec<String>,
    #[serde(with = "crate::float::vec")]
    pub coef: Vec<f64>,
    #[serde(with = "crate::float::vec")]
    pub se: Vec<f64>,
    #[serde(with = "crate::float::vec")]
    pub t: Vec<f64>,
    #[serde(with = "crate::float::vec")]
    pub p: Vec<f64>,
    #[serde(with = "crate::float::vec")]
    pub ci_low: Vec<f64>,
    #[serde(with = "crate::float::vec")]
    pub ci_high: Vec<f64>,
    pub n: usize,
    pub df_residual: usize,
    #[serde(with = "crate::float")]
    pub sigma2_hat: f64,
    pub flavor: VCovFlavor,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<crate::regression::BootstrapMeta>,
}

impl From<&FitResult> for FitSummary {
    fn from(f: &FitResult) -> Self {
        FitSummary {
            names: f.names.clone(),
            coef: f.coef.clone(),
            se: f.se.clone(),
            t: f.t.clone(),
            p: f.p.clone(),
            ci_low: f.ci_low.clone(),
            ci_high: f.ci_high.clone(),
            n: f.n,
            df_residual: f.df_residual,
            sigma2_hat: f.sigma2_hat,
            flavor: f.flavor,
            alpha: f.alpha,
            bootstrap: f.bootstrap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZfsSummary {
    pub rows: usize,
    pub reduced_form: FitSummary,
    pub first_stage: FitSummary,
    #[serde(with = "crate::float")]
    pub first_stage_f: f64,
}

impl From<&ZfsResult> for ZfsSummary {
    fn from(z: &ZfsResult) -> Self {
        ZfsSummary {
            rows: z.rows,
            reduced_form: FitSummary::from(&z.reduced_form),
            first_stage: FitSummary::from(&z.first_stage),
            first_stage_f: z.first_stage_f,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceEntry {
    pub method: InferenceMethod,
    pub result: Section<InferenceResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionFactors {
    #[serde(with = "crate::float")]
    pub classic: f64,
    #[serde(with = "crate::float")]
    pub hc1: f64,
    #[serde(default, with = "crate::float::option")]
    pub cr1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub seed: u64,
    pub boot_reps: usize,
    pub alpha: f64,
    pub n: Option<usize>,
    pub dropped_rows: Option<usize>,
    pub clusters: Option<usize>,
    pub correction_factors: Option<CorrectionFactors>,
    pub config: StudyConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub schema: String,
    pub study: String,
    pub design: Option<StudyDesign>,
    pub reported_f: Option<bool>,
    pub ols: Section<FitSummary>,
    pub tsls: Section<FitSummary>,
    pub first_stage: Section<FitSummary>,
    pub reduced_form: Section<FitSummary>,
    pub strength: Section<StrengthReport>,
    pub inference: Vec<InferenceEntry>,
    pub discrepancy: Section<DiscrepancyReport>,
    pub zfs: Option<Section<ZfsSummary>>,
    pub ltz: Option<Section<InferenceResult>>,
    pub provenance: Provenance,
}

impl DiagnosticsReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> crate::Result<Self> {
        let r: DiagnosticsReport = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("not a valid report: {e}")))?;
        if r.schema != SCHEMA {
            return Err(Error::Config(format!(
                "unsupported report schema '{}', expected '{SCHEMA}'",
                r.schema
            )));
        }
        Ok(r)
    }

    pub fn inference_for(&self, m: InferenceMethod) -> Option<&InferenceResult> {
        self.inference.iter().find(|e| e.method == m).and_then(|e| e.result.ok())
    }

    /// Every failed section, in report order.
    pub fn failures(&self) -> Vec<(&'static str, &SectionError)> {
        let mut all: Vec<(&'static str, Option<&SectionError>)> = vec![
            ("ols", self.ols.error()),
            ("tsls", self.tsls.error()),
            ("first_stage", self.first_stage.error()),
            ("reduced_form", self.reduced_form.error()),
            ("strength", self.strength.error()),
        ];
        all.extend(self.inference.iter().map(|e| (e.method.as_str(), e.result.error())));
        all.push(("discrepancy", self.discrepancy.error()));
        all.push(("zfs", self.zfs.as_ref().and_then(|s| s.error())));
        all.push(("ltz", self.ltz.as_ref().and_then(|s| s.error())));
        all.into_iter().filter_map(|(n, e)| e.map(|e| (n, e))).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.failures().is_empty()
    }
}
