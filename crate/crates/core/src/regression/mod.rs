//! Least-squares fits, partialling out, and their variance estimators.

mod vcov;

pub use vcov::{
    correction_factor, cross_vcov, sandwich_vcov, SandwichInput, VCovFlavor, VCovSpec,
};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::{Clusters, Dataset};
use crate::dist::{two_sided_p, z_critical};
use crate::error::{Error, Result};
use crate::linalg::{self, least_squares};
use crate::resample::{replicate_rng, run_replicates, Resampler};

/// Share of failed bootstrap replicates above which a bootstrap is rejected.
pub const MAX_DROPPED_SHARE: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BootstrapMeta {
    pub reps: usize,
    pub dropped: usize,
    pub seed: u64,
    pub cluster: bool,
}

impl BootstrapMeta {
    pub fn check(&self) -> Result<()> {
        if self.dropped as f64 > MAX_DROPPED_SHARE * self.reps as f64 {
            Err(Error::BootstrapInstability {
                dropped: self.dropped,
                reps: self.reps,
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub names: Vec<String>,
    pub coef: Vec<f64>,
    pub vcov: DMatrix<f64>,
    pub se: Vec<f64>,
    pub t: Vec<f64>,
    pub p: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    pub n: usize,
    pub df_residual: usize,
    pub residuals: Vec<f64>,
    pub sigma2_hat: f64,
    pub flavor: VCovFlavor,
    pub alpha: f64,
    pub bootstrap: Option<BootstrapMeta>,
}

impl FitResult {
    /// Fills in the per-coefficient columns from a coefficient vector and its
    /// variance.
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        names: Vec<String>,
        coef: Vec<f64>,
        vcov: DMatrix<f64>,
        residuals: Vec<f64>,
        k: usize,
        flavor: VCovFlavor,
        alpha: f64,
        bootstrap: Option<BootstrapMeta>,
    ) -> Self {
        let n = residuals.len();
        let z = z_critical(alpha);
        let se: Vec<f64> = (0..coef.len()).map(|j| vcov[(j, j)].max(0.0).sqrt()).collect();
        let t: Vec<f64> = coef.iter().zip(&se).map(|(c, s)| c / s).collect();
        let p = t.iter().map(|&t| two_sided_p(t)).collect();
        let ci_low = coef.iter().zip(&se).map(|(c, s)| c - z * s).collect();
        let ci_high = coef.iter().zip(&se).map(|(c, s)| c + z * s).collect();
        let df_residual = n.saturating_sub(k);
        let rss: f64 = residuals.iter().map(|e| e * e).sum();
        FitResult {
            names,
            coef,
            vcov,
            se,
            t,
            p,
            ci_low,
            ci_high,
            n,
            df_residual,
            residuals,
            sigma2_hat: rss / df_residual as f64,
            flavor,
            alpha,
            bootstrap,
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coef_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.coef)
    }
}

/// Options for [`ols_fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlsOptions {
    pub intercept: bool,
    pub alpha: f64,
}

impl Default for OlsOptions {
    fn default() -> Self {
        OlsOptions {
            intercept: true,
            alpha: 0.05,
        }
    }
}

/// A regression already in matrix form.
#[derive(Debug, Clone, Copy)]
pub struct LinearDesign<'a> {
    pub y: &'a DVector<f64>,
    pub x: &'a DMatrix<f64>,
    pub names: &'a [String],
    pub clusters: Option<&'a Clusters>,
    /// Columns partialled out beforehand; they count against the degrees of
    /// freedom.
    pub absorbed: usize,
}

/// OLS of `y` on the columns of `x`, with the variance chosen by `spec`.
///
/// The bootstrap flavor resamples rows (or whole clusters) of the design as
/// given.
pub fn ols_design(design: LinearDesign<'_>, spec: &VCovSpec, alpha: f64) -> Result<FitResult> {
    spec.validate()?;
    let x = design.x;
    let (n, p) = x.shape();
    let k = p + design.absorbed;
    if n <= k {
        return Err(Error::DegreesOfFreedom { n, k });
    }
    let sol = least_squares(x, design.y, design.names)?;
    let clusters = if spec.is_clustered() {
        Some(design.clusters.ok_or_else(|| {
            Error::Config("clustered variance requested but no cluster labels supplied".into())
        })?)
    } else {
        None
    };
    let (vcov, boot) = match spec.flavor {
        VCovFlavor::Bootstrap => {
            let (v, meta) = bootstrap_ols_vcov(design, clusters, spec)?;
            (v, Some(meta))
        }
        flavor => {
            let input = SandwichInput {
                x,
                bread: &sol.bread,
                clusters,
                k,
            };
            (sandwich_vcov(input, &sol.residuals, flavor)?, None)
        }
    };
    Ok(FitResult::assemble(
        design.names.to_vec(),
        sol.coef.iter().copied().collect(),
        vcov,
        sol.residuals.iter().copied().collect(),
        k,
        spec.flavor,
        alpha,
        boot,
    ))
}

fn bootstrap_ols_vcov(
    design: LinearDesign<'_>,
    clusters: Option<&Clusters>,
    spec: &VCovSpec,
) -> Result<(DMatrix<f64>, BootstrapMeta)> {
    let n = design.x.nrows();
    let resampler = Resampler::new(n, clusters);
    let draws = run_replicates(spec.boot_reps, |r| {
        let draw = resampler.draw(&mut replicate_rng(spec.seed, r as u64));
        let x = design.x.select_rows(&draw.rows);
        let y = design.y.select_rows(&draw.rows);
        least_squares(&x, &y, design.names).ok().map(|s| s.coef)
    });
    let kept: Vec<DVector<f64>> = draws.into_iter().flatten().collect();
    let meta = BootstrapMeta {
        reps: spec.boot_reps,
        dropped: spec.boot_reps - kept.len(),
        seed: spec.seed,
        cluster: clusters.is_some(),
    };
    meta.check()?;
    Ok((sample_covariance(&kept)?, meta))
}

/// Sample covariance (divisor `m - 1`) of a set of vectors.
pub fn sample_covariance(draws: &[DVector<f64>]) -> Result<DMatrix<f64>> {
    let m = draws.len();
    if m < 2 {
        return Err(Error::BootstrapInstability {
            dropped: 0,
            reps: m,
        });
    }
    let p = draws[0].len();
    let mut mean = DVector::zeros(p);
    for d in draws {
        mean += d;
    }
    mean /= m as f64;
    let mut cov = DMatrix::zeros(p, p);
    for d in draws {
        let c = d - &mean;
        cov.ger(1.0, &c, &c, 1.0);
    }
    cov /= (m - 1) as f64;
    linalg::symmetrize(&mut cov);
    Ok(cov)
}

/// Design matrix from named columns, with an optional leading intercept.
pub fn design_matrix(data: &Dataset, columns: &[&str], intercept: bool) -> Result<(DMatrix<f64>, Vec<String>)> {
    let n = data.n_rows();
    let k = columns.len() + usize::from(intercept);
    let mut x = DMatrix::zeros(n, k);
    let mut names = Vec::with_capacity(k);
    let mut j = 0;
    if intercept {
        x.column_mut(0).fill(1.0);
        names.push("(intercept)".to_string());
        j = 1;
    }
    for c in columns {
        let col = data.column(c)?;
        x.column_mut(j).copy_from_slice(col);
        names.push(c.to_string());
        j += 1;
    }
    Ok((x, names))
}

/// OLS of a named outcome on named regressors of a dataset.
pub fn ols_fit(
    data: &Dataset,
    y: &str,
    x: &[&str],
    spec: &VCovSpec,
    opts: OlsOptions,
) -> Result<FitResult> {
    let (xm, names) = design_matrix(data, x, opts.intercept)?;
    let yv = DVector::from_column_slice(data.column(y)?);
    let clusters = match &spec.cluster_column {
        Some(c) => Some(Clusters::from_values(data.column(c)?)),
        None => None,
    };
    ols_design(
        LinearDesign {
            y: &yv,
            x: &xm,
            names: &names,
            clusters: clusters.as_ref(),
            absorbed: 0,
        },
        spec,
        opts.alpha,
    )
}

/// Replaces each target column by its residual from OLS on the controls
/// (plus an intercept when requested).
pub fn fwl_residualize(
    data: &Dataset,
    targets: &[&str],
    controls: &[&str],
    intercept: bool,
) -> Result<Dataset> {
    let (c, cnames) = design_matrix(data, controls, intercept)?;
    let (t, _) = design_matrix(data, targets, false)?;
    let resid = linalg::residualize(&c, &t, &cnames)?;
    let mut cols: Vec<(String, Vec<f64>)> = Vec::new();
    for name in data.names() {
        let values = match targets.iter().position(|t| t == name) {
            Some(j) => resid.column(j).iter().copied().collect(),
            None => data.column(name)?.to_vec(),
        };
        cols.push((name.clone(), values));
    }
    Dataset::new(cols, data.roles().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Roles;

    fn fix_a() -> Dataset {
        Dataset::new(
            vec![
                ("z".into(), vec![0., 0., 0., 1., 1., 1.]),
                ("d".into(), vec![1., 0., 1., 2., 1., 3.]),
                ("y".into(), vec![2., 1., 2., 5., 3., 7.]),
            ],
            Roles::new("y", "d", &["z"]),
        )
        .unwrap()
    }

    #[test]
    fn fix_a_ols_slope() {
        let fit = ols_fit(&fix_a(), "y", &["d"], &VCovSpec::classic(), OlsOptions::default()).unwrap();
        assert!((fit.coef[1] - 2.125).abs() < 1e-12);
    }

    #[test]
    fn exact_relation_has_zero_se() {
        let data = Dataset::new(
            vec![
                ("d".into(), vec![1., 2., 3., 4.]),
                ("y".into(), vec![2., 4., 6., 8.]),
                ("z".into(), vec![0., 1., 0., 1.]),
            ],
            Roles::new("y", "d", &["z"]),
        )
        .unwrap();
        for spec in [VCovSpec::classic(), VCovSpec::hc1()] {
            let fit = ols_fit(&data, "y", &["d"], &spec, OlsOptions::default()).unwrap();
            assert!((fit.coef[1] - 2.0).abs() < 1e-12);
            assert!(fit.residuals.iter().all(|e| e.abs() < 1e-12));
            assert!(fit.se[1] < 1e-7);
        }
    }

    #[test]
    fn intercept_only_residuals_are_deviations() {
        let r = fwl_residualize(&fix_a(), &["d"], &[], true).unwrap();
        let d = r.column("d").unwrap();
        let mean = 8.0 / 6.0;
        for (a, b) in d.iter().zip([1., 0., 1., 2., 1., 3.]) {
            assert!((a - (b - mean)).abs() < 1e-12);
        }
    }

    #[test]
    fn fwl_slope_matches_full_regression() {
        let r = fwl_residualize(&fix_a(), &["y", "d"], &[], true).unwrap();
        let fit = ols_fit(
            &r,
            "y",
            &["d"],
            &VCovSpec::classic(),
            OlsOptions {
                intercept: false,
                alpha: 0.05,
            },
        )
        .unwrap();
        assert!((fit.coef[0] - 2.125).abs() < 1e-12);
    }

    #[test]
    fn collinear_controls_are_named() {
        let data = Dataset::new(
            vec![
                ("y".into(), vec![1., 2., 3., 4., 5.]),
                ("d".into(), vec![1., 0., 1., 0., 1.]),
                ("z".into(), vec![0., 1., 1., 0., 1.]),
                ("a".into(), vec![1., 2., 3., 4., 6.]),
                ("b".into(), vec![2., 4., 6., 8., 12.]),
            ],
            Roles::new("y", "d", &["z"]).with_covariates(&["a", "b"]),
        )
        .unwrap();
        match fwl_residualize(&data, &["y"], &["a", "b"], true) {
            Err(Error::Collinearity { columns }) => assert_eq!(columns, vec!["b".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bootstrap_flavor_is_seeded() {
        let spec = VCovSpec::bootstrap(200, 11);
        let a = ols_fit(&fix_a(), "y", &["d"], &spec, OlsOptions::default());
        let b = ols_fit(&fix_a(), "y", &["d"], &spec, OlsOptions::default());
        match (a, b) {
            (Ok(a), Ok(b)) => assert_eq!(a.vcov, b.vcov),
            (Err(a), Err(b)) => assert_eq!(a.to_string(), b.to_string()),
            _ => panic!("nondeterministic bootstrap"),
        }
    }
}
