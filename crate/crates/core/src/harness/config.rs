//! Study configuration files (TOML or JSON).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::Roles;
use crate::error::{Error, Result};
use crate::inference::InferenceMethod;
use crate::regression::{VCovFlavor, VCovSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyDesign {
    Experimental,
    Observational,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default)]
    pub json: Option<PathBuf>,
    #[serde(default)]
    pub svg: Option<PathBuf>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
}

/// Prior for the local-to-zero adjustment: explicit values, or taken from
/// the placebo subsample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LtzConfig {
    #[serde(default)]
    pub mu: Option<Vec<f64>>,
    #[serde(default)]
    pub omega: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub from_placebo: bool,
}

fn default_alpha() -> f64 {
    0.05
}

fn default_reps() -> usize {
    1000
}

fn default_vcov() -> VCovFlavor {
    VCovFlavor::Hc1
}

fn default_methods() -> Vec<InferenceMethod> {
    InferenceMethod::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    #[serde(default)]
    pub name: Option<String>,
    /// CSV path, relative to the config file.
    pub data: PathBuf,
    pub outcome: String,
    pub treatment: String,
    pub instruments: Vec<String>,
    #[serde(default)]
    pub covariates: Vec<String>,
    #[serde(default)]
    pub cluster: Option<String>,
    #[serde(default)]
    pub weight: Option<String>,
    /// Column flagging the zero-first-stage placebo rows (nonzero = in).
    #[serde(default)]
    pub zfs_flag: Option<String>,
    #[serde(default = "default_vcov")]
    pub vcov: VCovFlavor,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_reps")]
    pub boot_reps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<InferenceMethod>,
    #[serde(default)]
    pub design: Option<StudyDesign>,
    /// Whether the original study reported its first-stage F.
    #[serde(default)]
    pub reported_f: Option<bool>,
    #[serde(default)]
    pub ltz: Option<LtzConfig>,
    #[serde(default)]
    pub output: OutputPaths,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl StudyConfig {
    /// Reads a config; the format follows the extension (`.json`, else TOML).
    /// Relative data and output paths are later resolved against the
    /// config's directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::from_json(&text)?
        } else {
            Self::from_toml(&text)?
        };
        cfg.base_dir = Some(path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf());
        if cfg.name.is_none() {
            cfg.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: StudyConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("invalid study config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: StudyConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("invalid study config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p.to_path_buf(),
        }
    }

    pub fn data_path(&self) -> PathBuf {
        self.resolve(&self.data)
    }

    pub fn roles(&self) -> Roles {
        Roles {
            outcome: self.outcome.clone(),
            treatment: self.treatment.clone(),
            instruments: self.instruments.clone(),
            covariates: self.covariates.clone(),
            cluster: self.cluster.clone(),
            weight: self.weight.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.instruments.is_empty() {
            return Err(Error::Config("at least one instrument is required".into()));
        }
        if self.methods.contains(&InferenceMethod::Tf) && self.instruments.len() != 1 {
            return Err(Error::Config("tF inference needs exactly one instrument".into()));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::Config(format!("method '{}' listed twice", m.as_str())));
            }
        }
        if self.vcov == VCovFlavor::Cr1 && self.cluster.is_none() {
            return Err(Error::Config("vcov = \"cr1\" needs a cluster column".into()));
        }
        if self.boot_reps < 2 {
            return Err(Error::Config("boot_reps must be at least 2".into()));
        }
        if let Some(ltz) = &self.ltz {
            if !ltz.from_placebo && ltz.mu.is_none() {
                return Err(Error::Config("ltz needs either mu or from_placebo = true".into()));
            }
            if ltz.from_placebo && self.zfs_flag.is_none() {
                return Err(Error::Config("ltz.from_placebo needs a zfs_flag column".into()));
            }
        }
        Ok(())
    }

    pub fn vcov_spec(&self) -> VCovSpec {
        VCovSpec {
            flavor: self.vcov,
            cluster_column: self.cluster.clone(),
            boot_reps: self.boot_reps,
            seed: self.seed,
        }
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| "study".to_string())
    }

    /// Columns that must be read from the CSV.
    pub fn needed_columns(&self) -> Vec<String> {
        let roles = self.roles();
        let mut cols: Vec<String> = roles
            .assignments()
            .into_iter()
            .map(|(c, _)| c.to_string())
            .collect();
        if let Some(f) = &self.zfs_flag {
            if !cols.contains(f) {
                cols.push(f.clone());
            }
        }
        cols
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_toml_gets_defaults() {
        let cfg = StudyConfig::from_toml(
            r#"
            data = "fix_a.csv"
            outcome = "y"
            treatment = "d"
            instruments = ["z"]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.alpha, 0.05);
        assert_eq!(cfg.vcov, VCovFlavor::Hc1);
        assert_eq!(cfg.methods.len(), 5);
    }

    #[test]
    fn tf_with_two_instruments_is_rejected() {
        let err = StudyConfig::from_toml(
            r#"
            data = "x.csv"
            outcome = "y"
            treatment = "d"
            instruments = ["z1", "z2"]
            methods = ["analytic", "tf"]
            "#,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(StudyConfig::from_toml(
            r#"
            data = "x.csv"
            outcome = "y"
            treatment = "d"
            instruments = ["z"]
            alpah = 0.1
            "#,
        )
        .is_err());
    }
}
