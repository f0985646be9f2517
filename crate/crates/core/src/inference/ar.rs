//! Anderson-Rubin tests and confidence sets.
//!
//! For a candidate `tau`, regress `y - tau d` on the instruments and test that
//! every coefficient is zero. Both the coefficients and the residuals are
//! affine in `tau`, so the Wald statistic is a ratio of quadratics for one
//! instrument (any variance flavor) and for the classic flavor with several
//! instruments; those sets are solved exactly. Robust flavors with several
//! instruments are inverted on a grid.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::interval::IntervalSet;
use crate::dist::{chi2_quantile, chi2_sf};
use crate::error::{Error, Result};
use crate::iv::{self, IVModel};
use crate::linalg::{least_squares, quadratic_form_inv};
use crate::regression::{cross_vcov, sandwich_vcov, SandwichInput, VCovFlavor, VCovSpec};

/// Default number of grid points for grid inversion.
pub const DEFAULT_GRID: usize = 10_001;

/// The grid spans `tau_hat +- GRID_SPAN * se` over half its points and maps
/// the rest onto the tails.
pub const GRID_SPAN: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArTest {
    #[serde(with = "crate::float")]
    pub stat: f64,
    #[serde(with = "crate::float")]
    pub p: f64,
    pub df: usize,
    pub flavor: VCovFlavor,
}

fn sandwich_input<'a>(model: &'a IVModel, bread: &'a DMatrix<f64>, spec: &VCovSpec) -> Result<SandwichInput<'a>> {
    Ok(SandwichInput {
        x: model.z(),
        bread,
        clusters: model.clusters_for(spec)?,
        k: model.p_z() + model.absorbed(),
    })
}

/// AR test of `tau = tau0` with a chi-squared reference on `p_z` degrees of
/// freedom. Uses the analytic flavor of `spec`.
pub fn ar_test(model: &IVModel, tau0: f64, spec: &VCovSpec) -> Result<ArTest> {
    let flavor = spec.analytic_flavor();
    let target = model.y() - model.d() * tau0;
    let sol = least_squares(model.z(), &target, &model.names().instruments)?;
    let v = sandwich_vcov(sandwich_input(model, &sol.bread, spec)?, &sol.residuals, flavor)?;
    let stat = quadratic_form_inv(&v, &sol.coef)
        .ok_or_else(|| Error::SingularVCov("AR coefficient variance is singular".into()))?;
    Ok(ArTest {
        stat,
        p: chi2_sf(stat, model.p_z()),
        df: model.p_z(),
        flavor,
    })
}

/// Pieces from which `W(tau)` is assembled for any `tau`.
struct ArParts {
    gy: DVector<f64>,
    gd: DVector<f64>,
    vyy: DMatrix<f64>,
    vyd: DMatrix<f64>,
    vdd: DMatrix<f64>,
    zz: DMatrix<f64>,
    ey: DVector<f64>,
    ed: DVector<f64>,
    dof: f64,
    flavor: VCovFlavor,
}

impl ArParts {
    fn new(model: &IVModel, spec: &VCovSpec) -> Result<Self> {
        let flavor = spec.analytic_flavor();
        let names = &model.names().instruments;
        let sy = least_squares(model.z(), model.y(), names)?;
        let sd = least_squares(model.z(), model.d(), names)?;
        let input = sandwich_input(model, &sy.bread, spec)?;
        let vyy = cross_vcov(input, &sy.residuals, &sy.residuals, flavor)?;
        let vyd = cross_vcov(input, &sy.residuals, &sd.residuals, flavor)?;
        let vdd = cross_vcov(input, &sd.residuals, &sd.residuals, flavor)?;
        Ok(ArParts {
            gy: sy.coef,
            gd: sd.coef,
            vyy,
            vyd,
            vdd,
            zz: model.z().transpose() * model.z(),
            ey: sy.residuals,
            ed: sd.residuals,
            dof: (model.n() - input.k) as f64,
            flavor,
        })
    }

    fn v(&self, tau: f64) -> DMatrix<f64> {
        let cross = &self.vyd + self.vyd.transpose();
        &self.vyy - cross * tau + &self.vdd * (tau * tau)
    }

    fn wald(&self, tau: f64) -> f64 {
        let g = &self.gy - &self.gd * tau;
        quadratic_form_inv(&self.v(tau), &g).unwrap_or(f64::INFINITY)
    }

    /// Limit of `W(tau)` as `|tau| -> inf`: the first-stage Wald statistic
    /// with this flavor.
    fn wald_at_infinity(&self) -> f64 {
        quadratic_form_inv(&self.vdd, &self.gd).unwrap_or(f64::INFINITY)
    }

    /// Coefficients `(n2, n1, n0)` and `(d2, d1, d0)` with
    /// `W(tau) = N(tau) / D(tau)`, `N = n2 t^2 - 2 n1 t + n0`, and the same
    /// for `D`. Available for one instrument or the classic flavor.
    fn ratio_of_quadratics(&self) -> Option<([f64; 3], [f64; 3])> {
        if self.gy.len() == 1 {
            let (gy, gd) = (self.gy[0], self.gd[0]);
            let num = [gd * gd, gy * gd, gy * gy];
            let den = [
                self.vdd[(0, 0)],
                self.vyd[(0, 0)],
                self.vyy[(0, 0)],
            ];
            return Some((num, den));
        }
        if self.flavor == VCovFlavor::Classic {
            let q = |a: &DVector<f64>, b: &DVector<f64>| a.dot(&(&self.zz * b));
            let num = [q(&self.gd, &self.gd), q(&self.gy, &self.gd), q(&self.gy, &self.gy)];
            let den = [
                self.ed.norm_squared() / self.dof,
                self.ey.dot(&self.ed) / self.dof,
                self.ey.norm_squared() / self.dof,
            ];
            return Some((num, den));
        }
        None
    }
}

/// An AR confidence set with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArSet {
    pub set: IntervalSet,
    #[serde(with = "crate::float")]
    pub critical_value: f64,
    pub closed_form: bool,
    pub grid_points: Option<usize>,
    /// The statistic at infinity sits on the critical value, so whether the
    /// set is bounded is numerically undecided.
    pub unresolved: bool,
}

/// `{tau : W(tau) <= chi2_{p_z}(1 - alpha)}`, solved exactly where the
/// statistic is a ratio of quadratics and on a grid otherwise.
pub fn ar_confidence_set(model: &IVModel, alpha: f64, spec: &VCovSpec) -> Result<ArSet> {
    let parts = ArParts::new(model, spec)?;
    let crit = chi2_quantile(1.0 - alpha, model.p_z());
    match parts.ratio_of_quadratics() {
        Some((num, den)) => Ok(ArSet {
            set: solve_quadratic_region(num, den, crit),
            critical_value: crit,
            closed_form: true,
            grid_points: None,
            unresolved: false,
        }),
        None => grid_set(model, &parts, crit, DEFAULT_GRID),
    }
}

/// Grid inversion regardless of whether a closed form exists.
pub fn ar_confidence_set_grid(model: &IVModel, alpha: f64, spec: &VCovSpec, points: usize) -> Result<ArSet> {
    let parts = ArParts::new(model, spec)?;
    let crit = chi2_quantile(1.0 - alpha, model.p_z());
    grid_set(model, &parts, crit, points)
}

/// Accept region of `N(t) <= c D(t)`, i.e. `A t^2 - 2 B t + C <= 0`.
pub fn solve_quadratic_region(num: [f64; 3], den: [f64; 3], crit: f64) -> IntervalSet {
    let a = num[0] - crit * den[0];
    let b = num[1] - crit * den[1];
    let c = num[2] - crit * den[2];
    let scale = num[0].abs() + crit * den[0].abs();
    if a.abs() <= 1e-12 * scale {
        // linear: -2 b t + c <= 0
        return if b > 0.0 {
            IntervalSet::from_intervals(vec![(c / (2.0 * b), f64::INFINITY)])
        } else if b < 0.0 {
            IntervalSet::from_intervals(vec![(f64::NEG_INFINITY, c / (2.0 * b))])
        } else if c <= 0.0 {
            IntervalSet::whole_line()
        } else {
            IntervalSet::empty()
        };
    }
    let disc = b * b - a * c;
    if disc < 0.0 {
        return if a > 0.0 {
            IntervalSet::empty()
        } else {
            IntervalSet::whole_line()
        };
    }
    // roots of a t^2 - 2 b t + c, computed without cancellation
    let q = b + b.signum() * disc.sqrt();
    let (r1, r2) = if q == 0.0 {
        (0.0, 0.0)
    } else {
        let (x, y) = (q / a, c / q);
        (x.min(y), x.max(y))
    };
    if a > 0.0 {
        IntervalSet::bounded(r1, r2)
    } else {
        IntervalSet::from_intervals(vec![(f64::NEG_INFINITY, r1), (r2, f64::INFINITY)])
    }
}

fn grid_set(model: &IVModel, parts: &ArParts, crit: f64, points: usize) -> Result<ArSet> {
    let points = points.max(3);
    let (tau_hat, se) = iv::tsls_point_se(model, parts.flavor)?;
    let half = if se.is_finite() && se > 0.0 {
        GRID_SPAN * se
    } else {
        GRID_SPAN * tau_hat.abs().max(1.0)
    };
    let w_inf = parts.wald_at_infinity();
    let tau_of = |theta: f64| tau_hat + half * theta.tan();
    let accept = |theta: f64| {
        if theta <= -FRAC_PI_2 || theta >= FRAC_PI_2 {
            w_inf <= crit
        } else {
            parts.wald(tau_of(theta)) <= crit
        }
    };
    let theta = |i: usize| -FRAC_PI_2 + std::f64::consts::PI * i as f64 / (points - 1) as f64;
    let flags: Vec<bool> = (0..points).map(|i| accept(theta(i))).collect();
    let boundary = |i: usize| {
        // sign change between grid points i and i + 1
        let (mut lo, mut hi) = (theta(i), theta(i + 1));
        let left = flags[i];
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if accept(mid) == left {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let to_tau = |t: f64| {
        if t <= -FRAC_PI_2 {
            f64::NEG_INFINITY
        } else if t >= FRAC_PI_2 {
            f64::INFINITY
        } else {
            tau_of(t)
        }
    };
    let mut pieces = Vec::new();
    let mut start = flags[0].then_some(-FRAC_PI_2);
    for i in 0..points - 1 {
        if flags[i] != flags[i + 1] {
            let b = boundary(i);
            if flags[i + 1] {
                start = Some(b);
            } else if let Some(s) = start.take() {
                pieces.push((to_tau(s), to_tau(b)));
            }
        }
    }
    if let Some(s) = start {
        pieces.push((to_tau(s), f64::INFINITY));
    }
    Ok(ArSet {
        set: IntervalSet::from_intervals(pieces),
        critical_value: crit,
        closed_form: false,
        grid_points: Some(points),
        unresolved: (w_inf - crit).abs() <= 1e-6 * crit,
    })
}
