//! Cross-study summaries: first-stage strength, per-method significance and
//! IV/OLS discrepancy, split by study design.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::float::to_text;
use crate::inference::InferenceMethod;
use crate::linalg::median;
use crate::resample::run_replicates;
use crate::strength::RULE_OF_THUMB;

use super::config::{StudyConfig, StudyDesign};
use super::report::{DiagnosticsReport, SectionError, SCHEMA};
use super::study::run_study;

/// Significance threshold for the per-method "p > 0.05" shares.
pub const P_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodShare {
    pub method: InferenceMethod,
    pub studies: usize,
    pub share_p_above: Option<f64>,
}

/// One column of the summary table. Shares are over the studies where the
/// statistic exists; `None` when there are none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub label: String,
    pub studies: usize,
    pub share_unreported_f: Option<f64>,
    pub share_f_eff_below_10: Option<f64>,
    pub share_f_boot_below_10: Option<f64>,
    pub median_f_eff: Option<f64>,
    pub p_above: Vec<MethodShare>,
    pub share_same_sign: Option<f64>,
    pub share_ratio_above_1: Option<f64>,
    pub share_ratio_above_5: Option<f64>,
    pub share_ratio_above_10: Option<f64>,
    pub median_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyFailure {
    pub config: String,
    pub error: SectionError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub schema: String,
    pub studies: Vec<String>,
    pub panels: Vec<Panel>,
    pub failures: Vec<StudyFailure>,
}

impl BatchSummary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }

    /// Statistics as rows, panels as columns.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(to_text).unwrap_or_default();
        let mut lines: Vec<(String, Vec<String>)> = vec![
            ("studies".into(), self.panels.iter().map(|p| p.studies.to_string()).collect()),
            ("share_unreported_f".into(), self.panels.iter().map(|p| opt(p.share_unreported_f)).collect()),
            ("share_f_eff_below_10".into(), self.panels.iter().map(|p| opt(p.share_f_eff_below_10)).collect()),
            ("share_f_boot_below_10".into(), self.panels.iter().map(|p| opt(p.share_f_boot_below_10)).collect()),
            ("median_f_eff".into(), self.panels.iter().map(|p| opt(p.median_f_eff)).collect()),
        ];
        for m in InferenceMethod::ALL {
            let row: Vec<String> = self
                .panels
                .iter()
                .map(|p| opt(p.p_above.iter().find(|s| s.method == m).and_then(|s| s.share_p_above)))
                .collect();
            lines.push((format!("share_p_above_05_{}", m.as_str()), row));
        }
        lines.extend([
            ("share_same_sign".into(), self.panels.iter().map(|p| opt(p.share_same_sign)).collect()),
            ("share_ratio_above_1".into(), self.panels.iter().map(|p| opt(p.share_ratio_above_1)).collect()),
            ("share_ratio_above_5".into(), self.panels.iter().map(|p| opt(p.share_ratio_above_5)).collect()),
            ("share_ratio_above_10".into(), self.panels.iter().map(|p| opt(p.share_ratio_above_10)).collect()),
            ("median_ratio".into(), self.panels.iter().map(|p| opt(p.median_ratio)).collect()),
        ]);
        let mut out = String::from("statistic");
        for p in &self.panels {
            out.push(',');
            out.push_str(&p.label);
        }
        out.push('\n');
        for (name, vals) in lines {
            out.push_str(&name);
            for v in vals {
                out.push(',');
                out.push_str(&v);
            }
            out.push('\n');
        }
        out
    }
}

fn share<I: IntoIterator<Item = bool>>(flags: I) -> Option<f64> {
    let (mut yes, mut total) = (0usize, 0usize);
    for f in flags {
        total += 1;
        yes += usize::from(f);
    }
    (total > 0).then(|| yes as f64 / total as f64)
}

fn median_of(mut v: Vec<f64>) -> Option<f64> {
    v.retain(|x| !x.is_nan());
    (!v.is_empty()).then(|| median(&v))
}

pub fn panel(label: &str, reports: &[&DiagnosticsReport]) -> Panel {
    let strength: Vec<_> = reports.iter().filter_map(|r| r.strength.ok()).collect();
    let disc: Vec<_> = reports.iter().filter_map(|r| r.discrepancy.ok()).collect();
    let ratios: Vec<f64> = disc.iter().filter_map(|d| d.ratio_abs).collect();
    let p_above = InferenceMethod::ALL
        .into_iter()
        .filter_map(|m| {
            let ps: Vec<f64> = reports
                .iter()
                .filter_map(|r| r.inference_for(m))
                .map(|i| i.p_null)
                .collect();
            let requested = reports.iter().any(|r| r.inference.iter().any(|e| e.method == m));
            requested.then(|| MethodShare {
                method: m,
                studies: ps.len(),
                share_p_above: share(ps.iter().map(|&p| p > P_THRESHOLD)),
            })
        })
        .collect();
    Panel {
        label: label.to_string(),
        studies: reports.len(),
        share_unreported_f: share(reports.iter().filter_map(|r| r.reported_f).map(|rep| !rep)),
        share_f_eff_below_10: share(strength.iter().map(|s| s.f_effective < RULE_OF_THUMB)),
        share_f_boot_below_10: share(
            strength
                .iter()
                .filter(|s| !s.f_boot.is_nan())
                .map(|s| s.f_boot < RULE_OF_THUMB),
        ),
        median_f_eff: median_of(strength.iter().map(|s| s.f_effective).collect()),
        p_above,
        share_same_sign: share(disc.iter().filter_map(|d| d.same_sign)),
        share_ratio_above_1: share(ratios.iter().map(|&r| r > 1.0)),
        share_ratio_above_5: share(ratios.iter().map(|&r| r > 5.0)),
        share_ratio_above_10: share(ratios.iter().map(|&r| r > 10.0)),
        median_ratio: median_of(ratios.clone()),
    }
}

/// Panels for all studies and for each declared design.
pub fn summarize(names: Vec<String>, reports: &[DiagnosticsReport], failures: Vec<StudyFailure>) -> BatchSummary {
    let all: Vec<&DiagnosticsReport> = reports.iter().collect();
    let of = |d: StudyDesign| -> Vec<&DiagnosticsReport> {
        reports.iter().filter(|r| r.design == Some(d)).collect()
    };
    BatchSummary {
        schema: SCHEMA.to_string(),
        studies: names,
        panels: vec![
            panel("all", &all),
            panel("experimental", &of(StudyDesign::Experimental)),
            panel("observational", &of(StudyDesign::Observational)),
        ],
        failures,
    }
}

/// Study configs (`.toml`, `.json`) directly inside `dir`, sorted by name.
pub fn config_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("toml") || e.eq_ignore_ascii_case("json"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Config(format!("no study configs in {}", dir.display())));
    }
    Ok(files)
}

/// Runs every study config in `dir`. `adjust` applies command-line
/// overrides to each config before it runs. Studies that fail to load are
/// listed as failures and left out of the panels.
pub fn batch_summarize<F>(dir: &Path, adjust: F) -> Result<(BatchSummary, Vec<DiagnosticsReport>)>
where
    F: Fn(&mut StudyConfig) + Sync + Send,
{
    let files = config_files(dir)?;
    let results: Vec<Result<DiagnosticsReport>> = run_replicates(files.len(), |i| {
        let mut cfg = StudyConfig::from_path(&files[i])?;
        adjust(&mut cfg);
        cfg.validate()?;
        run_study(&cfg)
    });
    let mut names = Vec::new();
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (path, r) in files.iter().zip(results) {
        let label = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        match r {
            Ok(rep) => {
                names.push(label);
                reports.push(rep);
            }
            Err(e) => {
                log::warn!("{label}: {e}");
                failures.push(StudyFailure {
                    config: label,
                    error: SectionError::from(&e),
                });
            }
        }
    }
    Ok((summarize(names, &reports, failures), reports))
}
