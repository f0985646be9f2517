use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;
use proptest::prelude::*;

use ivdiag::inference::ar_confidence_set;
use ivdiag::iv::{self, IVModel, ModelNames};
use ivdiag::strength::effective_f;
use ivdiag::VCovSpec;

#[derive(Debug, Clone)]
struct Data {
    y: Vec<f64>,
    d: Vec<f64>,
    z: Vec<f64>,
    w: Vec<f64>,
}

fn data(n: std::ops::Range<usize>) -> impl Strategy<Value = Data> {
    n.prop_flat_map(|n| {
        let col = || prop::collection::vec(-3.0..3.0f64, n);
        (col(), col(), col(), col(), 0.3..2.0f64).prop_map(|(z, w, u, e, pi)| {
            let d: Vec<f64> = (0..z.len()).map(|i| pi * z[i] + 0.4 * w[i] + u[i]).collect();
            let y = (0..z.len()).map(|i| 1.5 * d[i] - w[i] + e[i] + 0.5 * u[i]).collect();
            Data { y, d, z, w }
        })
    })
}

fn build(x: &Data, with_w: bool) -> Option<IVModel> {
    let names = ModelNames {
        outcome: "y".into(),
        treatment: "d".into(),
        instruments: vec!["z".into()],
        controls: if with_w { vec!["w".into()] } else { vec![] },
    };
    let w = if with_w { vec![x.w.clone()] } else { vec![] };
    IVModel::from_columns(&x.y, &x.d, std::slice::from_ref(&x.z), &w, names, true, None, None).ok()
}

fn strong(m: &IVModel) -> bool {
    let fs = iv::first_stage(m, &VCovSpec::classic(), 0.05).unwrap();
    fs.t[0].abs() > 3.0
}

/// Solves `a b = c` exactly; `None` when `a` is singular.
fn solve_exact(mut a: Vec<Vec<Ratio<i128>>>, mut c: Vec<Ratio<i128>>) -> Option<Vec<Ratio<i128>>> {
    let k = c.len();
    for col in 0..k {
        let pivot = (col..k).find(|&r| a[r][col] != Ratio::from_integer(0))?;
        a.swap(col, pivot);
        c.swap(col, pivot);
        let pivot_row = a[col].clone();
        for r in 0..k {
            if r != col {
                let f = a[r][col] / pivot_row[col];
                for (x, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= f * *p;
                }
                let v = c[col];
                c[r] -= f * v;
            }
        }
    }
    Some((0..k).map(|i| c[i] / a[i][i]).collect())
}

/// `(L' R)^{-1} L' y` with integer columns, for OLS (`L = R`) and IV.
fn exact_coef(left: &[Vec<i64>], right: &[Vec<i64>], y: &[i64]) -> Option<Ratio<i128>> {
    let r = |v: i64| Ratio::from_integer(v as i128);
    let dotr = |a: &[i64], b: &[i64]| a.iter().zip(b).map(|(x, y)| r(*x) * r(*y)).sum::<Ratio<i128>>();
    let a = left.iter().map(|l| right.iter().map(|rc| dotr(l, rc)).collect()).collect();
    let c = left.iter().map(|l| dotr(l, y)).collect();
    solve_exact(a, c).map(|b| b[0])
}

fn to_f64(r: Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partialling_matches_the_full_system(x in data(12..60)) {
        let Some(m) = build(&x, true) else { return Ok(()) };
        prop_assume!(strong(&m));
        let n = x.y.len();
        let xs = DMatrix::from_fn(n, 3, |i, j| [x.d[i], 1.0, x.w[i]][j]);
        let zs = DMatrix::from_fn(n, 3, |i, j| [x.z[i], 1.0, x.w[i]][j]);
        let y = DVector::from_column_slice(&x.y);
        let full = (zs.transpose() * &xs).lu().solve(&(zs.transpose() * y)).unwrap();
        assert_relative_eq!(iv::tsls_point(&m).unwrap(), full[0], max_relative = 1e-9, epsilon = 1e-12);
    }

    #[test]
    fn rational_normal_equations(
        rows in prop::collection::vec((-4i64..5, -4i64..5, -4i64..5, -4i64..5), 6..14)
    ) {
        let z: Vec<i64> = rows.iter().map(|r| r.0).collect();
        let w: Vec<i64> = rows.iter().map(|r| r.1).collect();
        let d: Vec<i64> = rows.iter().map(|r| r.0 + r.2).collect();
        let y: Vec<i64> = rows.iter().map(|r| 2 * r.0 - r.1 + r.3).collect();
        let one = vec![1i64; rows.len()];
        let x_cols = [d.clone(), one.clone(), w.clone()];
        let z_cols = [z.clone(), one, w.clone()];
        let (Some(ols), Some(tsls)) = (exact_coef(&x_cols, &x_cols, &y), exact_coef(&z_cols, &x_cols, &y)) else {
            return Ok(());
        };
        let f = |v: &[i64]| v.iter().map(|&a| a as f64).collect::<Vec<f64>>();
        let x = Data { y: f(&y), d: f(&d), z: f(&z), w: f(&w) };
        let Some(m) = build(&x, true) else { return Ok(()) };
        prop_assume!(strong(&m));
        let lib_ols = iv::naive_ols(&m, &VCovSpec::classic(), 0.05).unwrap().coef[0];
        assert_relative_eq!(lib_ols, to_f64(ols), max_relative = 1e-9, epsilon = 1e-12);
        assert_relative_eq!(iv::tsls_point(&m).unwrap(), to_f64(tsls), max_relative = 1e-9, epsilon = 1e-12);
    }

    #[test]
    fn rescaling_columns(x in data(15..60), c in 0.1..20.0f64) {
        let Some(m) = build(&x, true) else { return Ok(()) };
        prop_assume!(strong(&m));
        let hc1 = VCovSpec::hc1();
        let tau = iv::tsls_point(&m).unwrap();
        let f = effective_f(&iv::first_stage(&m, &hc1, 0.05).unwrap(), m.z()).unwrap();
        let scale = |v: &[f64]| v.iter().map(|a| a * c).collect::<Vec<f64>>();

        let ys = build(&Data { y: scale(&x.y), ..x.clone() }, true).unwrap();
        assert_relative_eq!(iv::tsls_point(&ys).unwrap(), c * tau, max_relative = 1e-9);

        let ds = build(&Data { d: scale(&x.d), ..x.clone() }, true).unwrap();
        assert_relative_eq!(iv::tsls_point(&ds).unwrap(), tau / c, max_relative = 1e-9);
        let fd = effective_f(&iv::first_stage(&ds, &hc1, 0.05).unwrap(), ds.z()).unwrap();
        assert_relative_eq!(fd, f, max_relative = 1e-8);

        let zs = build(&Data { z: scale(&x.z), ..x.clone() }, true).unwrap();
        assert_relative_eq!(iv::tsls_point(&zs).unwrap(), tau, max_relative = 1e-9);
        let fz = effective_f(&iv::first_stage(&zs, &hc1, 0.05).unwrap(), zs.z()).unwrap();
        assert_relative_eq!(fz, f, max_relative = 1e-8);
    }

    #[test]
    fn row_order_is_irrelevant(x in data(10..50), seed in any::<u64>()) {
        let Some(m) = build(&x, true) else { return Ok(()) };
        prop_assume!(strong(&m));
        let n = x.y.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (i as u64).wrapping_mul(seed | 1).rotate_left(17));
        let p = |v: &[f64]| order.iter().map(|&i| v[i]).collect::<Vec<f64>>();
        let xp = Data { y: p(&x.y), d: p(&x.d), z: p(&x.z), w: p(&x.w) };
        let mp = build(&xp, true).unwrap();
        let hc1 = VCovSpec::hc1();
        let a = iv::tsls_fit(&m, &hc1, 0.05).unwrap();
        let b = iv::tsls_fit(&mp, &hc1, 0.05).unwrap();
        assert_relative_eq!(a.coef[0], b.coef[0], max_relative = 1e-9);
        assert_relative_eq!(a.se[0], b.se[0], max_relative = 1e-9);
    }

    #[test]
    fn just_identified_ar_set_holds_the_estimate(x in data(10..60)) {
        let Some(m) = build(&x, false) else { return Ok(()) };
        let Ok(tau) = iv::tsls_point(&m) else { return Ok(()) };
        for spec in [VCovSpec::classic(), VCovSpec::hc1()] {
            let set = ar_confidence_set(&m, 0.05, &spec).unwrap();
            prop_assert!(set.set.contains(tau), "{tau} not in {:?}", set.set);
        }
    }
}
