//! Percentile (bootstrap-c) and percentile-t (bootstrap-t) inference.

use super::interval::IntervalSet;
use super::{InferenceMethod, InferenceResult, Meta};
use crate::error::Result;
use crate::iv::{self, bootstrap_replicates, IVModel};
use crate::linalg::quantile_sorted;
use crate::regression::VCovSpec;

/// Largest `a` in `[0, 1]` with `q(a) <= target`, where `q` is the type-7
/// quantile function of `sorted`; `None` if every value exceeds `target`.
fn level_at_or_below(sorted: &[f64], target: f64) -> Option<f64> {
    let n = sorted.len();
    let j = sorted.partition_point(|&v| v <= target);
    if j == 0 {
        return None;
    }
    if j == n {
        return Some(1.0);
    }
    // q is linear on [(j-1)/(n-1), j/(n-1)] from sorted[j-1] <= target to sorted[j] > target
    let (lo, hi) = (sorted[j - 1], sorted[j]);
    let w = (target - lo) / (hi - lo);
    Some(((j - 1) as f64 + w) / (n - 1) as f64)
}

/// Smallest `a` with `q(a) >= target`; `None` if every value is below.
fn level_at_or_above(sorted: &[f64], target: f64) -> Option<f64> {
    let n = sorted.len();
    let j = sorted.partition_point(|&v| v < target);
    if j == n {
        return None;
    }
    if j == 0 {
        return Some(0.0);
    }
    let (lo, hi) = (sorted[j - 1], sorted[j]);
    let w = (target - lo) / (hi - lo);
    Some(((j - 1) as f64 + w) / (n - 1) as f64)
}

/// Smallest `alpha` for which `target` falls outside
/// `[q(alpha / 2), q(1 - alpha / 2)]`, found by inverting the quantile
/// function exactly.
pub fn percentile_p_value(sorted: &[f64], target: f64) -> f64 {
    let below = level_at_or_below(sorted, target).map_or(0.0, |a| 2.0 * a);
    let above = level_at_or_above(sorted, target).map_or(0.0, |a| 2.0 * (1.0 - a));
    below.min(above).clamp(0.0, 1.0)
}

/// Bootstrap-c and bootstrap-t results from the same replicates.
///
/// Replicates are drawn by pairs, or by whole clusters when `spec` names a
/// cluster column. Each replicate partials the controls out afresh and is
/// studentized with the analytic flavor of `spec`; replicates with a
/// degenerate first stage are dropped and counted.
pub fn bootstrap_infer(model: &IVModel, spec: &VCovSpec, alpha: f64) -> Result<(InferenceResult, InferenceResult)> {
    let flavor = spec.analytic_flavor();
    let (tau, se) = iv::tsls_point_se(model, flavor)?;
    let (draws, meta) = bootstrap_replicates(model, spec, |m| iv::tsls_point_se(m, flavor))?;
    let mut taus: Vec<f64> = draws.iter().map(|(t, _)| *t).collect();
    let mut ts: Vec<f64> = draws
        .iter()
        .map(|(t, s)| (t - tau) / s)
        .filter(|t| t.is_finite())
        .collect();
    taus.sort_by(f64::total_cmp);
    ts.sort_by(f64::total_cmp);
    let base = Meta {
        flavor: Some(flavor),
        boot_reps: Some(meta.reps),
        dropped: Some(meta.dropped),
        seed: Some(meta.seed),
        ..Meta::default()
    };

    let (lo, hi) = (quantile_sorted(&taus, alpha / 2.0), quantile_sorted(&taus, 1.0 - alpha / 2.0));
    let ci_c = IntervalSet::bounded(lo, hi);
    let excludes = !ci_c.contains(tau);
    let mut meta_c = base.clone();
    meta_c.excludes_point = Some(excludes);
    if excludes {
        meta_c
            .warnings
            .push("percentile interval excludes the point estimate (skewed replicates)".into());
    }
    let boot_c = InferenceResult {
        method: InferenceMethod::BootstrapC,
        point: tau,
        se: None,
        ci: ci_c,
        p_null: percentile_p_value(&taus, 0.0),
        alpha,
        meta: meta_c,
    };

    let mut meta_t = base;
    meta_t.dropped = Some(meta.dropped + (draws.len() - ts.len()));
    let boot_t = if ts.len() >= 2 {
        let (qlo, qhi) = (quantile_sorted(&ts, alpha / 2.0), quantile_sorted(&ts, 1.0 - alpha / 2.0));
        InferenceResult {
            method: InferenceMethod::BootstrapT,
            point: tau,
            se: Some(se),
            ci: IntervalSet::bounded(tau - qhi * se, tau - qlo * se),
            // 0 is inside the interval iff q(a/2) <= tau/se <= q(1 - a/2)
            p_null: percentile_p_value(&ts, tau / se),
            alpha,
            meta: meta_t,
        }
    } else {
        meta_t
            .warnings
            .push("bootstrap standard errors vanished; studentized interval undefined".into());
        InferenceResult {
            method: InferenceMethod::BootstrapT,
            point: tau,
            se: Some(se),
            ci: IntervalSet::whole_line(),
            p_null: 1.0,
            alpha,
            meta: meta_t,
        }
    };
    Ok((boot_c, boot_t))
}
