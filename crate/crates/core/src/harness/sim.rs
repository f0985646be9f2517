//! Monte Carlo laboratory for the linear-normal IV design.
//!
//! Per row, `(z_1..z_p, e, v)` is jointly normal with unit variances,
//! `corr(z_j, e) = rho_ze`, `corr(e, v) = rho_de` and all other correlations
//! zero. Then `d = pi * sum_j z_j + v` and `y = tau * d + e`. With clusters,
//! every draw is `sqrt(icc) * a_g + sqrt(1 - icc) * b_i` with cluster and row
//! shocks drawn from the same correlation, so the marginal structure is
//! unchanged.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::Clusters;
use crate::error::{Error, Result};
use crate::inference::{self, ar_test, InferenceMethod};
use crate::iv::{self, IVModel, ModelNames};
use crate::linalg::{correlation, mean, median, quantile_sorted};
use crate::regression::{VCovFlavor, VCovSpec};
use crate::resample::{replicate_rng, run_replicates};
use crate::strength;

pub const MIN_REPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimClusters {
    pub count: usize,
    /// Within-cluster correlation of every shock.
    pub icc: f64,
}

fn one() -> usize {
    1
}

fn default_tau() -> f64 {
    1.0
}

fn default_alpha() -> f64 {
    0.05
}

fn default_methods() -> Vec<InferenceMethod> {
    vec![InferenceMethod::Analytic, InferenceMethod::Ar]
}

fn default_boot_reps() -> usize {
    199
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    pub n: usize,
    #[serde(default = "one")]
    pub p_z: usize,
    /// First-stage coefficient on each instrument.
    pub pi: f64,
    #[serde(default)]
    pub rho_de: f64,
    #[serde(default)]
    pub rho_ze: f64,
    #[serde(default)]
    pub clusters: Option<SimClusters>,
    #[serde(default = "default_tau")]
    pub tau: f64,
    /// Value tested by every method; defaults to `tau`, giving size.
    #[serde(default)]
    pub null: Option<f64>,
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_methods")]
    pub methods: Vec<InferenceMethod>,
    /// Variance flavor for the tests; cr1 is implied by `clusters`.
    #[serde(default)]
    pub vcov: Option<VCovFlavor>,
    #[serde(default = "default_boot_reps")]
    pub boot_reps: usize,
}

impl SimSpec {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let spec: SimSpec = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("invalid simulation spec: {e}")))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("invalid simulation spec: {e}")))?
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < MIN_REPS {
            return Err(Error::Config(format!("reps must be at least {MIN_REPS}, got {}", self.reps)));
        }
        if self.p_z == 0 {
            return Err(Error::Config("p_z must be at least 1".into()));
        }
        if self.n < self.p_z + 3 {
            return Err(Error::Config(format!("n = {} is too small", self.n)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if let Some(c) = self.clusters {
            if c.count < 2 || c.count > self.n {
                return Err(Error::Config(format!("cluster count {} is out of range", c.count)));
            }
            if !(0.0..1.0).contains(&c.icc) {
                return Err(Error::Config(format!("icc must lie in [0, 1), got {}", c.icc)));
            }
        }
        if self.methods.contains(&InferenceMethod::Tf) && self.p_z != 1 {
            return Err(Error::Config("tF inference needs exactly one instrument".into()));
        }
        if self.vcov == Some(VCovFlavor::Cr1) && self.clusters.is_none() {
            return Err(Error::Config("cr1 needs a cluster structure".into()));
        }
        self.cholesky()?;
        Ok(())
    }

    /// Correlation of `(z_1..z_p, e, v)`.
    pub fn correlation(&self) -> DMatrix<f64> {
        let p = self.p_z;
        let mut c = DMatrix::identity(p + 2, p + 2);
        for j in 0..p {
            c[(j, p)] = self.rho_ze;
            c[(p, j)] = self.rho_ze;
        }
        c[(p, p + 1)] = self.rho_de;
        c[(p + 1, p)] = self.rho_de;
        c
    }

    pub fn cholesky(&self) -> Result<DMatrix<f64>> {
        let c = self.correlation();
        nalgebra::Cholesky::new(c)
            .map(|ch| ch.l())
            .ok_or_else(|| Error::Config("implied correlation matrix is not positive definite".into()))
    }

    fn vcov_spec(&self, rep: usize) -> VCovSpec {
        let flavor = match (self.vcov, self.clusters) {
            (Some(f), _) => f,
            (None, Some(_)) => VCovFlavor::Cr1,
            (None, None) => VCovFlavor::Hc1,
        };
        VCovSpec {
            flavor,
            cluster_column: self.clusters.map(|_| "cluster".to_string()),
            boot_reps: self.boot_reps,
            seed: self.seed ^ (rep as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        }
    }

    pub fn null_value(&self) -> f64 {
        self.null.unwrap_or(self.tau)
    }

    /// Population moments implied by the design.
    pub fn population(&self) -> Population {
        let p = self.p_z as f64;
        let var_d = p * self.pi * self.pi + 1.0;
        let cov_de = p * self.pi * self.rho_ze + self.rho_de;
        let plim_ols = self.tau + cov_de / var_d;
        let plim_iv = (self.pi != 0.0).then(|| self.tau + self.rho_ze / self.pi);
        let rho_d_e = cov_de / var_d.sqrt();
        let rho_d_dhat = (p * self.pi * self.pi / var_d).sqrt();
        let concentration = self.n as f64 * p * self.pi * self.pi;
        Population {
            plim_ols,
            plim_iv,
            rho_d_e,
            rho_d_dhat,
            rho_z_e: self.rho_ze,
            concentration,
            expected_f: 1.0 + concentration / p,
            bias_ratio: bias_ratio_formula(self.rho_ze * p.sqrt(), rho_d_e, rho_d_dhat),
        }
    }

    /// One simulated sample as raw columns.
    pub fn draw<R: Rng>(&self, rng: &mut R, l: &DMatrix<f64>) -> SimSample {
        let p = self.p_z;
        let m = p + 2;
        let shock = |rng: &mut R| -> DVector<f64> {
            let u = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
            l * u
        };
        let (ids, cluster_shocks, w_c, w_r) = match self.clusters {
            Some(c) => {
                let ids: Vec<usize> = (0..self.n).map(|i| i * c.count / self.n).collect();
                let shocks: Vec<DVector<f64>> = (0..c.count).map(|_| shock(rng)).collect();
                (Some(ids), shocks, c.icc.sqrt(), (1.0 - c.icc).sqrt())
            }
            None => (None, Vec::new(), 0.0, 1.0),
        };
        let mut z = vec![Vec::with_capacity(self.n); p];
        let mut d = Vec::with_capacity(self.n);
        let mut y = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut s = shock(rng) * w_r;
            if let Some(ids) = &ids {
                s += &cluster_shocks[ids[i]] * w_c;
            }
            let zsum: f64 = (0..p).map(|j| s[j]).sum();
            for (j, col) in z.iter_mut().enumerate() {
                col.push(s[j]);
            }
            let di = self.pi * zsum + s[p + 1];
            d.push(di);
            y.push(self.tau * di + s[p]);
        }
        SimSample {
            y,
            d,
            z,
            clusters: ids,
        }
    }
}

/// `|rho(z,e)| / (|rho(d,e)| |rho(d,d_hat)|)`.
pub fn bias_ratio_formula(rho_z_e: f64, rho_d_e: f64, rho_d_dhat: f64) -> f64 {
    rho_z_e.abs() / (rho_d_e.abs() * rho_d_dhat.abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSample {
    pub y: Vec<f64>,
    pub d: Vec<f64>,
    pub z: Vec<Vec<f64>>,
    pub clusters: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub plim_ols: f64,
    pub plim_iv: Option<f64>,
    pub rho_d_e: f64,
    pub rho_d_dhat: f64,
    pub rho_z_e: f64,
    /// `n * pi' Var(z) pi / Var(v)`.
    pub concentration: f64,
    pub expected_f: f64,
    /// Bias amplification formula at the population correlations, with
    /// `rho(z, e)` taken as the correlation of the fitted first stage with
    /// `e`.
    #[serde(with = "crate::float")]
    pub bias_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorStats {
    #[serde(with = "crate::float")]
    pub median: f64,
    #[serde(with = "crate::float")]
    pub mean: f64,
    /// Standard error of the median from the order-statistic 95% interval.
    #[serde(with = "crate::float")]
    pub median_mc_se: f64,
    #[serde(with = "crate::float")]
    pub median_bias: f64,
    #[serde(with = "crate::float")]
    pub mean_bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRate {
    pub method: InferenceMethod,
    pub valid: usize,
    pub rejections: usize,
    #[serde(with = "crate::float")]
    pub rate: f64,
    #[serde(with = "crate::float")]
    pub mc_se: f64,
    pub within_size_band: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasCheck {
    /// `|median bias 2SLS| / |median bias OLS|`.
    #[serde(with = "crate::float")]
    pub empirical_ratio: f64,
    #[serde(with = "crate::float")]
    pub formula_ratio: f64,
    #[serde(with = "crate::float")]
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioVsRho {
    /// OLS slope of `ln |tau_2sls / tau_ols|` on `|rho(d, d_hat)|`.
    #[serde(with = "crate::float")]
    pub slope: f64,
    #[serde(with = "crate::float")]
    pub slope_se: f64,
    #[serde(with = "crate::float::option")]
    pub correlation: Option<f64>,
    pub used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub spec: SimSpec,
    pub population: Population,
    /// Replications where the estimators could not be computed.
    pub failed: usize,
    pub tsls: EstimatorStats,
    pub ols: EstimatorStats,
    /// `(median 2SLS - plim OLS) / median_mc_se`.
    #[serde(with = "crate::float")]
    pub median_vs_ols_plim_z: f64,
    #[serde(with = "crate::float")]
    pub median_abs_rho_d_dhat: f64,
    #[serde(with = "crate::float")]
    pub median_first_stage_f: f64,
    pub methods: Vec<MethodRate>,
    pub size_band: (f64, f64),
    pub bias: Option<BiasCheck>,
    pub ratio_vs_rho: RatioVsRho,
}

impl SimSummary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }

    /// Flat `key,value` listing of the numeric results.
    pub fn to_csv(&self) -> String {
        use crate::float::to_text;
        let mut rows: Vec<(String, String)> = vec![
            ("reps".into(), self.spec.reps.to_string()),
            ("failed".into(), self.failed.to_string()),
            ("plim_ols".into(), to_text(self.population.plim_ols)),
            ("plim_iv".into(), self.population.plim_iv.map(to_text).unwrap_or_default()),
            ("tsls_median".into(), to_text(self.tsls.median)),
            ("tsls_mean".into(), to_text(self.tsls.mean)),
            ("tsls_median_mc_se".into(), to_text(self.tsls.median_mc_se)),
            ("ols_median".into(), to_text(self.ols.median)),
            ("ols_mean".into(), to_text(self.ols.mean)),
            ("median_vs_ols_plim_z".into(), to_text(self.median_vs_ols_plim_z)),
            ("median_abs_rho_d_dhat".into(), to_text(self.median_abs_rho_d_dhat)),
            ("median_first_stage_f".into(), to_text(self.median_first_stage_f)),
        ];
        for m in &self.methods {
            rows.push((format!("reject_{}", m.method.as_str()), to_text(m.rate)));
        }
        if let Some(b) = &self.bias {
            rows.push(("bias_ratio_empirical".into(), to_text(b.empirical_ratio)));
            rows.push(("bias_ratio_formula".into(), to_text(b.formula_ratio)));
        }
        rows.push(("ratio_vs_rho_slope".into(), to_text(self.ratio_vs_rho.slope)));
        rows.push(("ratio_vs_rho_slope_se".into(), to_text(self.ratio_vs_rho.slope_se)));
        let mut out = String::from("statistic,value\n");
        for (k, v) in rows {
            out.push_str(&format!("{k},{v}\n"));
        }
        out
    }
}

#[derive(Debug, Clone)]
struct RepOutcome {
    tau_iv: f64,
    tau_ols: f64,
    rho: f64,
    f: f64,
    rejects: Vec<Option<bool>>,
}

fn one_rep(spec: &SimSpec, l: &DMatrix<f64>, rep: usize) -> Result<RepOutcome> {
    let mut rng = replicate_rng(spec.seed, rep as u64);
    let s = spec.draw(&mut rng, l);
    let null = spec.null_value();
    // test tau = null as tau = 0 on the shifted outcome
    let y0: Vec<f64> = s.y.iter().zip(&s.d).map(|(y, d)| y - null * d).collect();
    let names = ModelNames {
        outcome: "y".into(),
        treatment: "d".into(),
        instruments: (1..=spec.p_z).map(|j| format!("z{j}")).collect(),
        controls: Vec::new(),
    };
    let clusters = s.clusters.as_deref().map(Clusters::from_ids);
    let model = IVModel::from_columns(&y0, &s.d, &s.z, &[], names, true, clusters, None)?;
    let vspec = spec.vcov_spec(rep);
    let tau_iv = iv::tsls_point(&model)? + null;
    let analytic = vspec.with_flavor(vspec.analytic_flavor());
    let tau_ols = iv::naive_ols(&model, &analytic, spec.alpha)?.coef[0] + null;
    let rho = strength::rho_d_dhat(&model)?;
    let fs = iv::first_stage(&model, &analytic, spec.alpha)?;
    let f = strength::partial_f(&fs).unwrap_or(f64::NAN);

    let boot = spec
        .methods
        .iter()
        .any(|m| matches!(m, InferenceMethod::BootstrapC | InferenceMethod::BootstrapT))
        .then(|| inference::bootstrap_infer(&model, &vspec, spec.alpha).ok())
        .flatten();
    let rejects = spec
        .methods
        .iter()
        .map(|m| {
            let p = match m {
                InferenceMethod::Analytic => inference::analytic_infer(&model, &vspec, spec.alpha).ok().map(|r| r.p_null),
                InferenceMethod::Ar => ar_test(&model, 0.0, &vspec).ok().map(|t| t.p),
                InferenceMethod::Tf => inference::tf_infer(&model, &vspec, spec.alpha).ok().map(|r| r.p_null),
                InferenceMethod::BootstrapC => boot.as_ref().map(|b| b.0.p_null),
                InferenceMethod::BootstrapT => boot.as_ref().map(|b| b.1.p_null),
            };
            p.filter(|p| p.is_finite()).map(|p| p < spec.alpha)
        })
        .collect();
    Ok(RepOutcome {
        tau_iv,
        tau_ols,
        rho,
        f,
        rejects,
    })
}

fn estimator_stats(values: &[f64], truth: f64) -> EstimatorStats {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let med = median(&sorted);
    EstimatorStats {
        median: med,
        mean: mean(values),
        median_mc_se: median_mc_se(&sorted),
        median_bias: med - truth,
        mean_bias: mean(values) - truth,
    }
}

/// Half-width of the distribution-free 95% interval for the median, over
/// 1.96. `sorted` must be ascending.
pub fn median_mc_se(sorted: &[f64]) -> f64 {
    let m = sorted.len();
    if m < 2 {
        return f64::NAN;
    }
    let half = 1.96 * (m as f64).sqrt() / 2.0;
    let lo = ((m as f64 / 2.0 - half).floor().max(0.0)) as usize;
    let hi = ((m as f64 / 2.0 + half).ceil() as usize).min(m - 1);
    (sorted[hi] - sorted[lo]) / (2.0 * 1.96)
}

fn slope_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len();
    if n < 3 {
        return (f64::NAN, f64::NAN);
    }
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let sse: f64 = x.iter().zip(y).map(|(xi, yi)| (yi - a - b * xi).powi(2)).sum();
    let se = (sse / (n as f64 - 2.0) / sxx).sqrt();
    (b, se)
}

pub fn monte_carlo(spec: &SimSpec) -> Result<SimSummary> {
    spec.validate()?;
    let l = spec.cholesky()?;
    let outcomes: Vec<Result<RepOutcome>> = run_replicates(spec.reps, |r| one_rep(spec, &l, r));
    let mut ok = Vec::with_capacity(outcomes.len());
    let mut failed = 0;
    for o in outcomes {
        match o {
            Ok(o) => ok.push(o),
            Err(e) => {
                failed += 1;
                log::debug!("replication failed: {e}");
            }
        }
    }
    if ok.len() < 2 {
        return Err(Error::DegenerateFirstStage(format!(
            "{failed} of {} replications failed",
            spec.reps
        )));
    }
    let pop = spec.population();
    let iv: Vec<f64> = ok.iter().map(|o| o.tau_iv).collect();
    let ols: Vec<f64> = ok.iter().map(|o| o.tau_ols).collect();
    let tsls = estimator_stats(&iv, spec.tau);
    let ols_stats = estimator_stats(&ols, spec.tau);

    let band_half = 3.0 * (spec.alpha * (1.0 - spec.alpha) / spec.reps as f64).sqrt();
    let size_band = (spec.alpha - band_half, spec.alpha + band_half);
    let methods = spec
        .methods
        .iter()
        .enumerate()
        .map(|(j, &method)| {
            let flags: Vec<bool> = ok.iter().filter_map(|o| o.rejects[j]).collect();
            let valid = flags.len();
            let rejections = flags.iter().filter(|&&b| b).count();
            let rate = rejections as f64 / valid as f64;
            MethodRate {
                method,
                valid,
                rejections,
                rate,
                mc_se: (rate * (1.0 - rate) / valid as f64).sqrt(),
                within_size_band: rate >= size_band.0 && rate <= size_band.1,
            }
        })
        .collect();

    let bias = (spec.rho_ze != 0.0 && ols_stats.median_bias != 0.0).then(|| {
        let empirical_ratio = tsls.median_bias.abs() / ols_stats.median_bias.abs();
        let formula_ratio = pop.bias_ratio;
        BiasCheck {
            empirical_ratio,
            formula_ratio,
            relative_error: (empirical_ratio - formula_ratio).abs() / formula_ratio,
        }
    });

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for o in &ok {
        let ratio = (o.tau_iv / o.tau_ols).abs();
        if ratio.is_finite() && ratio > 0.0 && o.rho.is_finite() {
            xs.push(o.rho.abs());
            ys.push(ratio.ln());
        }
    }
    let (slope, slope_se) = slope_fit(&xs, &ys);
    let ratio_vs_rho = RatioVsRho {
        slope,
        slope_se,
        correlation: correlation(&xs, &ys),
        used: xs.len(),
    };

    let mut abs_rho: Vec<f64> = ok.iter().map(|o| o.rho.abs()).collect();
    abs_rho.sort_by(f64::total_cmp);
    let mut fs: Vec<f64> = ok.iter().map(|o| o.f).filter(|f| f.is_finite()).collect();
    fs.sort_by(f64::total_cmp);

    Ok(SimSummary {
        spec: spec.clone(),
        median_vs_ols_plim_z: (tsls.median - pop.plim_ols) / tsls.median_mc_se,
        population: pop,
        failed,
        tsls,
        ols: ols_stats,
        median_abs_rho_d_dhat: quantile_sorted(&abs_rho, 0.5),
        median_first_stage_f: if fs.is_empty() { f64::NAN } else { quantile_sorted(&fs, 0.5) },
        methods,
        size_band,
        bias,
        ratio_vs_rho,
    })
}
