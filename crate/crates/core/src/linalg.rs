//! Dense least squares on a thin Householder QR.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A column is treated as dependent when the part of it orthogonal to the
/// preceding columns is smaller than this fraction of its norm.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Least-squares solution together with the pieces sandwich estimators need.
#[derive(Debug, Clone)]
pub struct LsSolution {
    pub coef: DVector<f64>,
    pub residuals: DVector<f64>,
    /// `(X'X)^{-1}`
    pub bread: DMatrix<f64>,
}

/// Indices of columns that lie (numerically) in the span of earlier columns.
///
/// Reads the diagonal of R from an unpivoted QR: `|R_jj| / ||x_j||` is the
/// sine of the angle between column j and the span of columns `0..j`.
pub fn dependent_columns(x: &DMatrix<f64>) -> Vec<usize> {
    let k = x.ncols();
    if k == 0 {
        return Vec::new();
    }
    let qr = x.clone().qr();
    let r = qr.r();
    (0..k)
        .filter(|&j| {
            let norm = x.column(j).norm();
            norm == 0.0 || !norm.is_finite() || r[(j, j)].abs() / norm < RANK_TOLERANCE
        })
        .collect()
}

/// Solves `min ||y - X b||`, failing with the names of dependent columns when
/// `X` is rank deficient.
pub fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>, names: &[String]) -> Result<LsSolution> {
    let (n, k) = x.shape();
    if n < k {
        return Err(Error::DegreesOfFreedom { n, k });
    }
    check_rank(x, names)?;
    if k == 0 {
        return Ok(LsSolution {
            coef: DVector::zeros(0),
            residuals: y.clone(),
            bread: DMatrix::zeros(0, 0),
        });
    }
    let qr = x.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let qty = q.transpose() * y;
    let coef = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| collinear(names, &[k - 1]))?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| collinear(names, &[k - 1]))?;
    let bread = &r_inv * r_inv.transpose();
    let residuals = y - x * &coef;
    Ok(LsSolution {
        coef,
        residuals,
        bread,
    })
}

pub fn check_rank(x: &DMatrix<f64>, names: &[String]) -> Result<()> {
    let dep = dependent_columns(x);
    if dep.is_empty() {
        Ok(())
    } else {
        Err(collinear(names, &dep))
    }
}

fn collinear(names: &[String], idx: &[usize]) -> Error {
    Error::Collinearity {
        columns: idx
            .iter()
            .map(|&j| names.get(j).cloned().unwrap_or_else(|| format!("column {j}")))
            .collect(),
    }
}

/// Residuals of every column of `targets` after projecting on `controls`.
pub fn residualize(
    controls: &DMatrix<f64>,
    targets: &DMatrix<f64>,
    control_names: &[String],
) -> Result<DMatrix<f64>> {
    if controls.ncols() == 0 {
        return Ok(targets.clone());
    }
    let (n, k) = controls.shape();
    if n < k {
        return Err(Error::DegreesOfFreedom { n, k });
    }
    check_rank(controls, control_names)?;
    let qr = controls.clone().qr();
    let q = qr.q();
    let fitted = &q * (q.transpose() * targets);
    Ok(targets - fitted)
}

/// Inverse of a symmetric positive-definite matrix, `None` when it is not PD.
pub fn spd_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let scale = m.diagonal().iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    if !scale.is_finite() || scale <= 0.0 {
        return None;
    }
    let chol = m.clone().cholesky()?;
    let l = chol.l();
    let min_pivot = l.diagonal().iter().fold(f64::INFINITY, |a, &b| a.min(b.abs()));
    if min_pivot * min_pivot < 1e-14 * scale {
        return None;
    }
    Some(chol.inverse())
}

/// `v' M^{-1} v` for symmetric PD `M`.
pub fn quadratic_form_inv(m: &DMatrix<f64>, v: &DVector<f64>) -> Option<f64> {
    let inv = spd_inverse(m)?;
    Some(v.dot(&(inv * v)))
}

pub fn symmetrize(m: &mut DMatrix<f64>) {
    let k = m.nrows();
    for i in 0..k {
        for j in (i + 1)..k {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample variance with divisor `m - 1`.
pub fn sample_var(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() as f64 - 1.0)
}

/// Pearson correlation;`None` when either side has zero variance.
pub fn correlation(a: &[f64], b: &[f64]) -> Option<f64> {
    let ma = mean(a);
    let mb = mean(b);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return None;
    }
    Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Linear-interpolated (type 7) quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], prob: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0);
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * prob.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|j| format!("x{j}")).collect()
    }

    #[test]
    fn detects_exact_duplicate_column() {
        let x = DMatrix::from_row_slice(4, 3, &[1., 1., 2., 1., 2., 4., 1., 3., 6., 1., 5., 10.]);
        assert_eq!(dependent_columns(&x), vec![2]);
        match least_squares(&x, &DVector::from_element(4, 1.0), &names(3)) {
            Err(Error::Collinearity { columns }) => assert_eq!(columns, vec!["x2".to_string()]),
            other => panic!("expected collinearity, got {other:?}"),
        }
    }

    #[test]
    fn rank_check_is_scale_aware() {
        // Tiny but genuinely independent columns are fine.
        let x = DMatrix::from_row_slice(3, 2, &[1e-8, 0.0, 0.0, 1e-8, 1e-8, 2e-8]);
        assert!(dependent_columns(&x).is_empty());
    }

    #[test]
    fn bread_is_inverse_gram() {
        let x = DMatrix::from_row_slice(5, 2, &[1., 0.3, 1., -1.2, 1., 2.0, 1., 0.7, 1., 5.5]);
        let y = DVector::from_vec(vec![1.0, 2.0, -1.0, 0.5, 3.0]);
        let sol = least_squares(&x, &y, &names(2)).unwrap();
        let prod = &sol.bread * (x.transpose() * &x);
        assert!((prod - DMatrix::<f64>::identity(2, 2)).amax() < 1e-12);
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.0), 1.0);
        assert_eq!(quantile_sorted(&v, 1.0), 4.0);
        assert!((quantile_sorted(&v, 0.5) - 2.5).abs() < 1e-15);
    }
}
