use nalgebra::{DMatrix, DVector};

use crate::data::{Clusters, Dataset};
use crate::error::{Error, Result};
use crate::linalg;
use crate::regression::{BootstrapMeta, VCovSpec};
use crate::resample::{replicate_rng, run_replicates, Draw, Resampler};

pub const INTERCEPT: &str = "(intercept)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identification {
    JustIdentified,
    OverIdentified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelNames {
    pub outcome: String,
    pub treatment: String,
    pub instruments: Vec<String>,
    /// Partialled-out columns, including the intercept when present.
    pub controls: Vec<String>,
}

/// Single-treatment IV model.
///
/// Keeps the (weight-scaled) raw columns so that resampling and subsetting can
/// partial the controls out again, and the partialled columns that every
/// estimator works on.
#[derive(Debug, Clone)]
pub struct IVModel {
    names: ModelNames,
    raw_y: DVector<f64>,
    raw_d: DVector<f64>,
    raw_z: DMatrix<f64>,
    raw_x: DMatrix<f64>,
    clusters: Option<Clusters>,
    weighted: bool,
    y: DVector<f64>,
    d: DVector<f64>,
    z: DMatrix<f64>,
}

impl IVModel {
    /// Builds a model from raw columns. `controls` excludes the intercept,
    /// which is added when `intercept` is set. Weights scale every row by
    /// `sqrt(w)`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_columns(
        y: &[f64],
        d: &[f64],
        z: &[Vec<f64>],
        controls: &[Vec<f64>],
        names: ModelNames,
        intercept: bool,
        clusters: Option<Clusters>,
        weights: Option<&[f64]>,
    ) -> Result<Self> {
        let n = y.len();
        if d.len() != n || z.iter().chain(controls).any(|c| c.len() != n) {
            return Err(Error::Config("model columns differ in length".into()));
        }
        if z.is_empty() {
            return Err(Error::Config("at least one instrument is required".into()));
        }
        let mut names = names;
        let k = controls.len() + usize::from(intercept);
        let mut raw_x = DMatrix::zeros(n, k);
        let mut j = 0;
        if intercept {
            raw_x.column_mut(0).fill(1.0);
            if names.controls.first().map(String::as_str) != Some(INTERCEPT) {
                names.controls.insert(0, INTERCEPT.to_string());
            }
            j = 1;
        }
        for c in controls {
            raw_x.column_mut(j).copy_from_slice(c);
            j += 1;
        }
        if names.controls.len() != k || names.instruments.len() != z.len() {
            return Err(Error::Config("column names do not match the model columns".into()));
        }
        let mut raw_z = DMatrix::zeros(n, z.len());
        for (j, c) in z.iter().enumerate() {
            raw_z.column_mut(j).copy_from_slice(c);
        }
        let mut raw_y = DVector::from_column_slice(y);
        let mut raw_d = DVector::from_column_slice(d);
        if let Some(w) = weights {
            if w.len() != n {
                return Err(Error::Config("weight column differs in length".into()));
            }
            for (i, wi) in w.iter().enumerate() {
                let s = wi.sqrt();
                raw_y[i] *= s;
                raw_d[i] *= s;
                raw_z.row_mut(i).scale_mut(s);
                raw_x.row_mut(i).scale_mut(s);
            }
        }
        if let Some(c) = &clusters {
            if c.len() != n {
                return Err(Error::Config("cluster labels differ in length".into()));
            }
        }
        Self::assemble(names, raw_y, raw_d, raw_z, raw_x, clusters, weights.is_some())
    }

    /// Model with an intercept, covariates, clusters and weights taken from
    /// the dataset roles.
    pub fn from_dataset(data: &Dataset) -> Result<Self> {
        Self::from_dataset_with(data, true)
    }

    pub fn from_dataset_with(data: &Dataset, intercept: bool) -> Result<Self> {
        let roles = data.roles();
        let cols = |names: &[String]| -> Result<Vec<Vec<f64>>> {
            names.iter().map(|c| data.column(c).map(<[f64]>::to_vec)).collect()
        };
        let weights = match &roles.weight {
            Some(w) => Some(data.column(w)?),
            None => None,
        };
        Self::from_columns(
            data.column(&roles.outcome)?,
            data.column(&roles.treatment)?,
            &cols(&roles.instruments)?,
            &cols(&roles.covariates)?,
            ModelNames {
                outcome: roles.outcome.clone(),
                treatment: roles.treatment.clone(),
                instruments: roles.instruments.clone(),
                controls: roles.covariates.clone(),
            },
            intercept,
            data.clusters().cloned(),
            weights,
        )
    }

    fn assemble(
        names: ModelNames,
        raw_y: DVector<f64>,
        raw_d: DVector<f64>,
        raw_z: DMatrix<f64>,
        raw_x: DMatrix<f64>,
        clusters: Option<Clusters>,
        weighted: bool,
    ) -> Result<Self> {
        let n = raw_y.len();
        let p_z = raw_z.ncols();
        let k = p_z + raw_x.ncols();
        if n <= k {
            return Err(Error::DegreesOfFreedom { n, k });
        }
        let mut targets = DMatrix::zeros(n, 2 + p_z);
        targets.set_column(0, &raw_y);
        targets.set_column(1, &raw_d);
        targets.columns_mut(2, p_z).copy_from(&raw_z);
        let resid = linalg::residualize(&raw_x, &targets, &names.controls)?;
        let y = resid.column(0).into_owned();
        let d = resid.column(1).into_owned();
        let z = resid.columns(2, p_z).into_owned();
        // Instruments must carry variation beyond the controls, measured
        // against the raw column so the check is scale-aware.
        let near_zero: Vec<String> = (0..p_z)
            .filter(|&j| {
                let raw = raw_z.column(j).norm();
                raw == 0.0 || z.column(j).norm() / raw < linalg::RANK_TOLERANCE
            })
            .map(|j| names.instruments[j].clone())
            .collect();
        if !near_zero.is_empty() {
            return Err(Error::Collinearity { columns: near_zero });
        }
        let dep = linalg::dependent_columns(&z);
        if !dep.is_empty() {
            return Err(Error::Collinearity {
                columns: dep.iter().map(|&j| names.instruments[j].clone()).collect(),
            });
        }
        Ok(IVModel {
            names,
            raw_y,
            raw_d,
            raw_z,
            raw_x,
            clusters,
            weighted,
            y,
            d,
            z,
        })
    }

    pub fn names(&self) -> &ModelNames {
        &self.names
    }

    /// Partialled outcome.
    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    /// Partialled treatment.
    pub fn d(&self) -> &DVector<f64> {
        &self.d
    }

    /// Partialled instruments.
    pub fn z(&self) -> &DMatrix<f64> {
        &self.z
    }

    pub fn raw_y(&self) -> &DVector<f64> {
        &self.raw_y
    }

    pub fn raw_d(&self) -> &DVector<f64> {
        &self.raw_d
    }

    pub fn raw_z(&self) -> &DMatrix<f64> {
        &self.raw_z
    }

    pub fn raw_controls(&self) -> &DMatrix<f64> {
        &self.raw_x
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p_z(&self) -> usize {
        self.z.ncols()
    }

    /// Number of partialled-out columns (intercept included).
    pub fn absorbed(&self) -> usize {
        self.raw_x.ncols()
    }

    pub fn has_intercept(&self) -> bool {
        self.names.controls.first().map(String::as_str) == Some(INTERCEPT)
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn identification(&self) -> Identification {
        if self.p_z() == 1 {
            Identification::JustIdentified
        } else {
            Identification::OverIdentified
        }
    }

    pub fn clusters(&self) -> Option<&Clusters> {
        self.clusters.as_ref()
    }

    /// Cluster labels to use under `spec`, failing when clustering is
    /// requested but the model has none.
    pub fn clusters_for(&self, spec: &VCovSpec) -> Result<Option<&Clusters>> {
        if !spec.is_clustered() {
            return Ok(None);
        }
        let c = self.clusters.as_ref().ok_or_else(|| {
            Error::Config(format!(
                "clustered inference on '{}' requested but the model has no cluster column",
                spec.cluster_column.as_deref().unwrap_or_default()
            ))
        })?;
        c.require_at_least_two()?;
        Ok(Some(c))
    }

    fn rebuild(&self, rows: &[usize], clusters: Option<Clusters>) -> Result<Self> {
        Self::assemble(
            self.names.clone(),
            self.raw_y.select_rows(rows),
            self.raw_d.select_rows(rows),
            self.raw_z.select_rows(rows),
            self.raw_x.select_rows(rows),
            clusters,
            self.weighted,
        )
    }

    /// The model on a bootstrap draw, with controls partialled out afresh.
    pub fn resample(&self, draw: &Draw) -> Result<Self> {
        let clusters = match (&draw.cluster_ids, &self.clusters) {
            (Some(ids), _) => Some(Clusters::from_ids(ids)),
            (None, Some(c)) => Some(Clusters::from_ids(
                &draw.rows.iter().map(|&r| c.ids()[r]).collect::<Vec<_>>(),
            )),
            (None, None) => None,
        };
        self.rebuild(&draw.rows, clusters)
    }

    /// The model restricted to `rows`.
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n()) {
            return Err(Error::Config(format!("row {bad} out of range")));
        }
        let clusters = self.clusters.as_ref().map(|c| {
            Clusters::from_ids(&rows.iter().map(|&r| c.ids()[r]).collect::<Vec<_>>())
        });
        self.rebuild(rows, clusters)
    }

    /// Same model with the raw outcome replaced (weight scaling must already
    /// be applied by the caller).
    pub fn with_raw_outcome(&self, y: DVector<f64>) -> Result<Self> {
        if y.len() != self.n() {
            return Err(Error::Config("outcome length mismatch".into()));
        }
        Self::assemble(
            self.names.clone(),
            y,
            self.raw_d.clone(),
            self.raw_z.clone(),
            self.raw_x.clone(),
            self.clusters.clone(),
            self.weighted,
        )
    }

    /// Same model with the raw instruments replaced.
    pub fn with_raw_instruments(&self, z: DMatrix<f64>) -> Result<Self> {
        if z.nrows() != self.n() || z.ncols() != self.p_z() {
            return Err(Error::Config("instrument shape mismatch".into()));
        }
        Self::assemble(
            self.names.clone(),
            self.raw_y.clone(),
            self.raw_d.clone(),
            z,
            self.raw_x.clone(),
            self.clusters.clone(),
            self.weighted,
        )
    }
}

/// Runs `f` on `spec.boot_reps` resampled models; failed replicates are
/// dropped and counted.
pub fn bootstrap_replicates<T, F>(model: &IVModel, spec: &VCovSpec, f: F) -> Result<(Vec<T>, BootstrapMeta)>
where
    T: Send,
    F: Fn(&IVModel) -> Result<T> + Sync + Send,
{
    if spec.boot_reps < 2 {
        return Err(Error::Config("bootstrap requires at least 2 replicates".into()));
    }
    let clusters = model.clusters_for(spec)?;
    let resampler = Resampler::new(model.n(), clusters);
    let out = run_replicates(spec.boot_reps, |r| {
        let draw = resampler.draw(&mut replicate_rng(spec.seed, r as u64));
        model.resample(&draw).and_then(|m| f(&m)).ok()
    });
    let kept: Vec<T> = out.into_iter().flatten().collect();
    let meta = BootstrapMeta {
        reps: spec.boot_reps,
        dropped: spec.boot_reps - kept.len(),
        seed: spec.seed,
        cluster: clusters.is_some(),
    };
    if kept.len() < 2 {
        return Err(Error::BootstrapInstability {
            dropped: meta.dropped,
            reps: meta.reps,
        });
    }
    meta.check()?;
    Ok((kept, meta))
}
