//! Sandwich variance estimators.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::Clusters;
use crate::error::{Error, Result};
use crate::linalg::symmetrize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VCovFlavor {
    Classic,
    Hc1,
    Cr1,
    Bootstrap,
}

impl VCovFlavor {
    pub fn as_str(self) -> &'static str {
        match self {
            VCovFlavor::Classic => "classic",
            VCovFlavor::Hc1 => "hc1",
            VCovFlavor::Cr1 => "cr1",
            VCovFlavor::Bootstrap => "bootstrap",
        }
    }
}

impl std::str::FromStr for VCovFlavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "classic" | "iid" => Ok(VCovFlavor::Classic),
            "hc1" | "robust" => Ok(VCovFlavor::Hc1),
            "cr1" | "cluster" => Ok(VCovFlavor::Cr1),
            "bootstrap" | "boot" => Ok(VCovFlavor::Bootstrap),
            other => Err(Error::Config(format!("unknown vcov flavor '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VCovSpec {
    pub flavor: VCovFlavor,
    #[serde(default)]
    pub cluster_column: Option<String>,
    #[serde(default = "default_reps")]
    pub boot_reps: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_reps() -> usize {
    1000
}

impl VCovSpec {
    pub fn classic() -> Self {
        Self::of(VCovFlavor::Classic)
    }

    pub fn hc1() -> Self {
        Self::of(VCovFlavor::Hc1)
    }

    pub fn cr1(cluster_column: &str) -> Self {
        VCovSpec {
            cluster_column: Some(cluster_column.to_string()),
            ..Self::of(VCovFlavor::Cr1)
        }
    }

    pub fn bootstrap(reps: usize, seed: u64) -> Self {
        VCovSpec {
            boot_reps: reps,
            seed,
            ..Self::of(VCovFlavor::Bootstrap)
        }
    }

    fn of(flavor: VCovFlavor) -> Self {
        VCovSpec {
            flavor,
            cluster_column: None,
            boot_reps: default_reps(),
            seed: 0,
        }
    }

    pub fn with_flavor(&self, flavor: VCovFlavor) -> Self {
        VCovSpec {
            flavor,
            ..self.clone()
        }
    }

    pub fn with_cluster(mut self, column: &str) -> Self {
        self.cluster_column = Some(column.to_string());
        self
    }

    pub fn with_reps(mut self, reps: usize) -> Self {
        self.boot_reps = reps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn is_clustered(&self) -> bool {
        self.cluster_column.is_some()
    }

    pub fn validate(&self) -> Result<()> {
        if self.flavor == VCovFlavor::Cr1 && self.cluster_column.is_none() {
            return Err(Error::Config("cr1 variance requires a cluster column".into()));
        }
        if self.flavor == VCovFlavor::Bootstrap && self.boot_reps < 2 {
            return Err(Error::Config("bootstrap variance requires at least 2 replicates".into()));
        }
        Ok(())
    }

    /// Analytic flavor used where a closed form is required (studentizing
    /// bootstrap replicates, AR statistics): cluster-robust when clustered,
    /// heteroskedasticity-robust otherwise.
    pub fn analytic_flavor(&self) -> VCovFlavor {
        match self.flavor {
            VCovFlavor::Bootstrap if self.is_clustered() => VCovFlavor::Cr1,
            VCovFlavor::Bootstrap => VCovFlavor::Hc1,
            f => f,
        }
    }

    /// The robust flavor matching the clustering of this spec.
    pub fn robust_flavor(&self) -> VCovFlavor {
        if self.is_clustered() {
            VCovFlavor::Cr1
        } else {
            VCovFlavor::Hc1
        }
    }
}

/// Finite-sample factor multiplying the sandwich for `n` rows, `k`
/// parameters and `g` clusters.
pub fn correction_factor(flavor: VCovFlavor, n: usize, k: usize, g: usize) -> f64 {
    let (n, k, g) = (n as f64, k as f64, g as f64);
    match flavor {
        VCovFlavor::Classic => 1.0 / (n - k),
        VCovFlavor::Hc1 => n / (n - k),
        VCovFlavor::Cr1 => (g / (g - 1.0)) * ((n - 1.0) / (n - k)),
        VCovFlavor::Bootstrap => f64::NAN,
    }
}

/// Pieces of a fitted linear model needed to form its variance.
#[derive(Debug, Clone, Copy)]
pub struct SandwichInput<'a> {
    /// Regressors as they enter the score (fitted treatment for 2SLS).
    pub x: &'a DMatrix<f64>,
    /// `(X'X)^{-1}`
    pub bread: &'a DMatrix<f64>,
    pub clusters: Option<&'a Clusters>,
    /// Parameter count used in degrees-of-freedom corrections, including
    /// columns absorbed by partialling out.
    pub k: usize,
}

/// Variance from a single residual vector.
pub fn sandwich_vcov(
    input: SandwichInput<'_>,
    resid: &DVector<f64>,
    flavor: VCovFlavor,
) -> Result<DMatrix<f64>> {
    let mut v = cross_vcov(input, resid, resid, flavor)?;
    symmetrize(&mut v);
    Ok(v)
}

/// Bilinear variance `bread * M(e1, e2) * bread` where the meat pairs the
/// scores of two residual vectors. With `e1 == e2` this is the usual
/// sandwich; the cross terms are needed when the residual is affine in a
/// parameter, as in Anderson-Rubin inversion.
pub fn cross_vcov(
    input: SandwichInput<'_>,
    e1: &DVector<f64>,
    e2: &DVector<f64>,
    flavor: VCovFlavor,
) -> Result<DMatrix<f64>> {
    let x = input.x;
    let (n, p) = x.shape();
    let k = input.k;
    if n <= k {
        return Err(Error::DegreesOfFreedom { n, k });
    }
    let meat = match flavor {
        VCovFlavor::Classic => {
            let s12 = e1.dot(e2) * correction_factor(flavor, n, k, 0);
            return Ok(input.bread * s12);
        }
        VCovFlavor::Hc1 => {
            let mut m = DMatrix::zeros(p, p);
            for i in 0..n {
                let w = e1[i] * e2[i];
                if w != 0.0 {
                    let xi = x.row(i);
                    m.ger(w, &xi.transpose(), &xi.transpose(), 1.0);
                }
            }
            m * correction_factor(flavor, n, k, 0)
        }
        VCovFlavor::Cr1 => {
            let clusters = input
                .clusters
                .ok_or_else(|| Error::Config("cr1 variance requires cluster labels".into()))?;
            clusters.require_at_least_two()?;
            let g = clusters.count();
            let mut s1 = DMatrix::<f64>::zeros(g, p);
            let mut s2 = DMatrix::<f64>::zeros(g, p);
            for (i, &c) in clusters.ids().iter().enumerate() {
                for j in 0..p {
                    s1[(c, j)] += x[(i, j)] * e1[i];
                    s2[(c, j)] += x[(i, j)] * e2[i];
                }
            }
            s1.transpose() * s2 * correction_factor(flavor, n, k, g)
        }
        VCovFlavor::Bootstrap => {
            return Err(Error::Config(
                "bootstrap variance is formed by resampling, not from a sandwich".into(),
            ))
        }
    };
    Ok(input.bread * meat * input.bread)
}
