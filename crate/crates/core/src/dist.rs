//! Reference distributions used for p-values and critical values.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

pub fn normal_cdf(x: f64) -> f64 {
    std_normal().cdf(x)
}

pub fn normal_sf(x: f64) -> f64 {
    std_normal().sf(x)
}

pub fn normal_quantile(p: f64) -> f64 {
    std_normal().inverse_cdf(p)
}

/// Two-sided critical value `z_{1-alpha/2}`.
pub fn z_critical(alpha: f64) -> f64 {
    normal_quantile(1.0 - alpha / 2.0)
}

/// Two-sided normal p-value for a z statistic.
pub fn two_sided_p(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    (2.0 * normal_sf(z.abs())).min(1.0)
}

pub fn chi2_sf(x: f64, df: usize) -> f64 {
    if x.is_infinite() && x > 0.0 {
        return 0.0;
    }
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(df as f64).expect("chi-squared df > 0").sf(x)
}

pub fn chi2_quantile(p: f64, df: usize) -> f64 {
    ChiSquared::new(df as f64)
        .expect("chi-squared df > 0")
        .inverse_cdf(p)
}
