//! Inference on the structural coefficient: analytic, bootstrap-c,
//! bootstrap-t, Anderson-Rubin and tF.

pub mod ar;
pub mod bootstrap;
pub mod interval;
pub mod tf;
mod tf_table;

pub use ar::{ar_confidence_set, ar_confidence_set_grid, ar_test, ArSet, ArTest};
pub use bootstrap::bootstrap_infer;
pub use interval::{Interval, IntervalSet, SetKind};
pub use tf::{tf_adjust, tf_critical_value, TfTable};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iv::{self, IVModel};
use crate::regression::{VCovFlavor, VCovSpec};
use crate::strength;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InferenceMethod {
    Analytic,
    BootstrapC,
    BootstrapT,
    Ar,
    Tf,
}

impl InferenceMethod {
    pub const ALL: [InferenceMethod; 5] = [
        InferenceMethod::Analytic,
        InferenceMethod::BootstrapC,
        InferenceMethod::BootstrapT,
        InferenceMethod::Ar,
        InferenceMethod::Tf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InferenceMethod::Analytic => "analytic",
            InferenceMethod::BootstrapC => "bootstrap_c",
            InferenceMethod::BootstrapT => "bootstrap_t",
            InferenceMethod::Ar => "ar",
            InferenceMethod::Tf => "tf",
        }
    }
}

impl std::str::FromStr for InferenceMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        InferenceMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == s || m.as_str().replace('_', "-") == s)
            .ok_or_else(|| Error::Config(format!("unknown inference method '{s}'")))
    }
}

/// Method-specific details; unused fields are omitted from JSON.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flavor: Option<VCovFlavor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boot_reps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dropped: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::float::option")]
    pub f_used: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::float::option")]
    pub critical_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::float::option")]
    pub adjustment_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excludes_point: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceResult {
    pub method: InferenceMethod,
    #[serde(with = "crate::float")]
    pub point: f64,
    #[serde(default, with = "crate::float::option")]
    pub se: Option<f64>,
    pub ci: IntervalSet,
    /// p-value for the null `tau = 0`.
    #[serde(with = "crate::float")]
    pub p_null: f64,
    pub alpha: f64,
    pub meta: Meta,
}

/// Normal-reference Wald inference on the 2SLS coefficient with the analytic
/// flavor of `spec`.
pub fn analytic_infer(model: &IVModel, spec: &VCovSpec, alpha: f64) -> Result<InferenceResult> {
    let flavor = spec.analytic_flavor();
    let fit = iv::tsls_fit(model, &spec.with_flavor(flavor), alpha)?;
    Ok(InferenceResult {
        method: InferenceMethod::Analytic,
        point: fit.coef[0],
        se: Some(fit.se[0]),
        ci: IntervalSet::bounded(fit.ci_low[0], fit.ci_high[0]),
        p_null: fit.p[0],
        alpha,
        meta: Meta {
            flavor: Some(flavor),
            ..Meta::default()
        },
    })
}

/// tF inference using the robust (or cluster-robust) 2SLS t-ratio and the
/// matching first-stage F. Needs a single instrument.
pub fn tf_infer(model: &IVModel, spec: &VCovSpec, alpha: f64) -> Result<InferenceResult> {
    if model.p_z() != 1 {
        return Err(Error::Precondition(format!(
            "tF needs exactly one instrument, got {}",
            model.p_z()
        )));
    }
    let flavor = spec.robust_flavor();
    let robust = spec.with_flavor(flavor);
    let (tau, se) = iv::tsls_point_se(model, flavor)?;
    let fs = iv::first_stage(model, &robust, alpha)?;
    let f = strength::partial_f(&fs)?;
    let mut out = tf_adjust(tau, se, f, alpha)?;
    out.meta.flavor = Some(flavor);
    Ok(out)
}

/// Anderson-Rubin inference: the confidence set from inverting the test and
/// the p-value of `tau = 0`.
pub fn ar_infer(model: &IVModel, spec: &VCovSpec, alpha: f64) -> Result<InferenceResult> {
    let set = ar_confidence_set(model, alpha, spec)?;
    let test = ar_test(model, 0.0, spec)?;
    let point = iv::tsls_point(model)?;
    let mut warnings = Vec::new();
    if set.unresolved {
        warnings.push("AR boundary unresolved at the grid limit".to_string());
    }
    Ok(InferenceResult {
        method: InferenceMethod::Ar,
        point,
        se: None,
        ci: set.set,
        p_null: test.p,
        alpha,
        meta: Meta {
            flavor: Some(test.flavor),
            grid_points: set.grid_points,
            critical_value: Some(set.critical_value),
            warnings,
            ..Meta::default()
        },
    })
}
