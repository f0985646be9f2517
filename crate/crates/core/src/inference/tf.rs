//! The tF procedure: t-ratio inference with a critical value that depends on
//! the first-stage F statistic.
//!
//! The critical-value curve `c(F)` is the smallest curve for which the t-test
//! has exact size `alpha` under the worst-case endogeneity `|rho| = 1`. With
//! `f ~ N(f0, 1)` the first-stage z-statistic and `|rho| = 1`, the 2SLS
//! t-ratio under the null is `|f| |f - f0| / f0`. [`derive_critical_curve`]
//! builds `c` by marching `f0` up from zero and choosing, at each step, the
//! new knot that brings the rejection rate to exactly `alpha`. The embedded
//! table in `tf_table.rs` is a log-spaced sample of that curve.


use super::interval::IntervalSet;
use super::{InferenceMethod, InferenceResult, Meta};
use crate::dist::{normal_cdf, normal_quantile, two_sided_p, z_critical};
use crate::error::{Error, Result};

use super::tf_table::{TABLE_01, TABLE_05};

/// Tabulated critical values for one significance level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfTable {
    pub alpha: f64,
    /// Knots `(F, c)`, increasing in `F`, decreasing in `c`. The first knot is
    /// the lower support; beyond the last, `c = z_{1-alpha/2}`.
    pub knots: &'static [(f64, f64)],
}

impl TfTable {
    pub fn for_alpha(alpha: f64) -> Result<&'static TfTable> {
        if (alpha - 0.05).abs() < 1e-12 {
            Ok(&TABLE_05)
        } else if (alpha - 0.01).abs() < 1e-12 {
            Ok(&TABLE_01)
        } else {
            Err(Error::UnsupportedAlpha(alpha))
        }
    }

    pub fn lower_support(&self) -> f64 {
        self.knots[0].0
    }

    /// F beyond which the usual normal critical value applies.
    pub fn upper_support(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }

    /// `None` below the lower support, where no finite critical value gives
    /// correct size.
    pub fn critical_value(&self, f: f64) -> Option<f64> {
        if f.is_nan() || f < self.lower_support() {
            return None;
        }
        if f >= self.upper_support() {
            return Some(z_critical(self.alpha));
        }
        let i = self.knots.partition_point(|&(k, _)| k <= f);
        let (f0, c0) = self.knots[i - 1];
        let (f1, c1) = self.knots[i];
        let w = (f.ln() - f0.ln()) / (f1.ln() - f0.ln());
        Some(c0 + w * (c1 - c0))
    }

    /// Critical value relative to the normal one.
    pub fn adjustment_factor(&self, f: f64) -> Option<f64> {
        self.critical_value(f).map(|c| c / z_critical(self.alpha))
    }
}

/// Critical value for first-stage `f` at level `alpha`; `Ok(None)` when `f`
/// is below the table support.
pub fn tf_critical_value(f: f64, alpha: f64) -> Result<Option<f64>> {
    Ok(TfTable::for_alpha(alpha)?.critical_value(f))
}

/// tF inference from a 2SLS estimate, its standard error and the first-stage
/// F. The confidence interval is `tau +- c(F) se`; the p-value is the
/// smallest tabulated-level-consistent value, `2 (1 - Phi(|t| z / c(F)))`.
pub fn tf_adjust(tau: f64, se: f64, f_first: f64, alpha: f64) -> Result<InferenceResult> {
    let table = TfTable::for_alpha(alpha)?;
    let z = z_critical(alpha);
    let t = tau / se;
    let meta = Meta {
        f_used: Some(f_first),
        ..Meta::default()
    };
    let (ci, p, c) = match table.critical_value(f_first) {
        Some(c) => (
            IntervalSet::bounded(tau - c * se, tau + c * se),
            two_sided_p(t * z / c),
            c,
        ),
        None => (IntervalSet::whole_line(), 1.0, f64::INFINITY),
    };
    Ok(InferenceResult {
        method: InferenceMethod::Tf,
        point: tau,
        se: Some(se),
        ci,
        p_null: p,
        alpha,
        meta: Meta {
            critical_value: Some(c),
            adjustment_factor: Some(c / z),
            ..meta
        },
    })
}

/// March step used for the embedded tables.
pub const FINE_STEP: f64 = 1e-3;

/// Number of knots in each embedded table.
pub const TABLE_KNOTS: usize = 160;

/// Knots of the worst-case critical-value curve, as a function of the
/// first-stage z-statistic `f = sqrt(F)`.
#[derive(Debug, Clone)]
pub struct CriticalCurve {
    pub alpha: f64,
    pub zc: f64,
    /// `f` knots, increasing; the first is `zc` where `c` is infinite.
    pub f: Vec<f64>,
    pub c: Vec<f64>,
}

impl CriticalCurve {
    /// Critical value at first-stage z-statistic `f`.
    pub fn at(&self, f: f64) -> f64 {
        if f <= self.zc || self.f.len() < 2 {
            return f64::INFINITY;
        }
        if f < self.f[1] {
            // 1/c is close to linear as c blows up at zc
            let w = (f - self.zc) / (self.f[1] - self.zc);
            return 1.0 / (w / self.c[1]);
        }
        let last = self.f.len() - 1;
        if f >= self.f[last] {
            return self.c[last];
        }
        let i = self.f.partition_point(|&k| k <= f);
        let w = (f - self.f[i - 1]) / (self.f[i] - self.f[i - 1]);
        self.c[i - 1] + w * (self.c[i] - self.c[i - 1])
    }

    /// `F` at which the curve reaches `zc`, or the last knot if the march
    /// stopped first.
    pub fn f_star(&self) -> f64 {
        let n = self.f.len();
        if self.c[n - 1] > self.zc {
            return self.f[n - 1] * self.f[n - 1];
        }
        let (f0, f1) = (self.f[n - 2], self.f[n - 1]);
        let (c0, c1) = (self.c[n - 2], self.c[n - 1]);
        let f = if c0 == c1 { f1 } else { f0 + (self.zc - c0) / (c1 - c0) * (f1 - f0) };
        f * f
    }
}

/// Largest first-stage F the march visits. At 1% the worst-case curve only
/// approaches `zc` asymptotically, so the march needs a stopping point.
pub const MARCH_F_CAP: f64 = 1.0e4;

/// Marches the null first-stage mean `f0` upward. At each step the rejection
/// probability contributed by the curve already built (negative `f`, and the
/// band between `zc` and `f0`) is computed, and the upper knot `u` is set so
/// that the total is `alpha`. Stops once the knot value falls to `zc`, or
/// once `f0^2` passes [`MARCH_F_CAP`].
pub fn derive_critical_curve(alpha: f64, fine_step: f64) -> CriticalCurve {
    let zc = z_critical(alpha);
    let mut curve = CriticalCurve {
        alpha,
        zc,
        f: vec![zc],
        c: vec![f64::INFINITY],
    };
    let mut f0 = fine_step;
    loop {
        let umax = *curve.f.last().unwrap();
        let pn = normal_cdf(-negative_boundary(&curve, f0, umax) - f0);
        let pl = if f0 > zc { between_mass(&curve, f0, umax) } else { 0.0 };
        let need = alpha - pn - pl;
        assert!(need > 0.0, "critical-value march lost size control at f0 = {f0}");
        let u = f0 + normal_quantile(1.0 - need);
        let c = u * (u - f0) / f0;
        if u > umax {
            curve.f.push(u);
            curve.c.push(c);
            if c <= zc {
                break;
            }
        }
        if f0 * f0 > MARCH_F_CAP {
            break;
        }
        f0 += if f0 < 2.0 { fine_step } else { 5.0 * fine_step };
    }
    curve
}

/// Smallest `x > zc` with `x (x + f0) >= f0 c(x)`; rejection on the negative
/// side is `f < -x`. Beyond the last knot the test always rejects.
fn negative_boundary(curve: &CriticalCurve, f0: f64, umax: f64) -> f64 {
    let g = |x: f64| x * (x + f0) - f0 * curve.at(x);
    if curve.f.len() < 2 || g(umax) <= 0.0 {
        return umax;
    }
    let (mut lo, mut hi) = (curve.zc, umax);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Null probability of rejecting with `zc < f < min(f0, umax)`, where the
/// t-ratio is `f (f0 - f) / f0`.
fn between_mass(curve: &CriticalCurve, f0: f64, umax: f64) -> f64 {
    if curve.f.len() < 2 {
        return 0.0;
    }
    let (a, b) = (curve.zc, f0.min(umax));
    if b <= a {
        return 0.0;
    }
    let h = |f: f64| f * (f0 - f) - f0 * curve.at(f);
    let steps = 2000;
    let grid = |i: usize| a + (b - a) * i as f64 / steps as f64;
    let refine = |mut lo: f64, mut hi: f64| {
        let rising = h(hi) > 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if (h(mid) > 0.0) == rising {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let mut mass = 0.0;
    let mut start: Option<f64> = None;
    let mut prev = grid(0);
    let mut prev_in = false;
    for i in 1..=steps {
        let x = grid(i);
        let inside = h(x) > 0.0;
        if inside && !prev_in {
            start = Some(refine(prev, x));
        } else if !inside && prev_in {
            let end = refine(prev, x);
            mass += normal_cdf(end - f0) - normal_cdf(start.take().unwrap() - f0);
        }
        prev = x;
        prev_in = inside;
    }
    if let Some(s) = start {
        mass += normal_cdf(b - f0) - normal_cdf(s - f0);
    }
    mass
}

/// Samples a derived curve as `(F, c)` knots spaced evenly in
/// `log(F - zc^2)` between the lower support and the point where `c` reaches
/// `zc`. The lower support is `zc^2 + 0.15` rounded up to one decimal.
pub fn tabulate(curve: &CriticalCurve, knots: usize) -> Vec<(f64, f64)> {
    let z2 = curve.zc * curve.zc;
    let lo = ((z2 + 0.15) * 10.0).ceil() / 10.0;
    let hi = curve.f_star();
    let (a, b) = ((lo - z2).ln(), (hi - z2).ln());
    let mut out: Vec<(f64, f64)> = (0..knots - 1)
        .map(|i| {
            let big_f = z2 + (a + (b - a) * i as f64 / (knots - 1) as f64).exp();
            let big_f = if i == 0 { lo } else { big_f };
            (big_f, curve.at(big_f.sqrt()))
        })
        .collect();
    out.push((hi, curve.c[curve.c.len() - 1].max(curve.zc)));
    out
}
