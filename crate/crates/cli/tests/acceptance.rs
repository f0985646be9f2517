//! Acceptance criteria, one PASS/FAIL line each. Runtime limits are part of
//! each criterion.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use ivdiag::dist::chi2_sf;
use ivdiag::harness::{load_dataset, monte_carlo, SimSpec};
use ivdiag::inference::{self, ar_confidence_set, ar_confidence_set_grid, ar_test, IntervalSet, SetKind, TfTable};
use ivdiag::iv::{self, IVModel, ModelNames};
use ivdiag::ltz::{ltz_adjust, LtzPrior};
use ivdiag::strength::{effective_f, partial_f};
use ivdiag::{Roles, VCovFlavor, VCovSpec};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fix_a_config() -> PathBuf {
    workspace_root().join("fixtures/fix_a/fix_a.toml")
}

// ---------------------------------------------------------------------------
// random designs

struct Raw {
    y: Vec<f64>,
    d: Vec<f64>,
    z: Vec<Vec<f64>>,
    w: Vec<Vec<f64>>,
}

#[derive(Clone, Copy)]
struct Design {
    n: usize,
    p_z: usize,
    k_w: usize,
    pi: f64,
    /// Direct effect of the last instrument on the outcome.
    direct: f64,
    hetero: bool,
    binary: bool,
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn draw(rng: &mut ChaCha8Rng, s: Design) -> Raw {
    let z: Vec<Vec<f64>> = (0..s.p_z)
        .map(|j| {
            (0..s.n)
                .map(|i| if s.binary && j == 0 { (i % 2) as f64 } else { normal(rng) })
                .collect()
        })
        .collect();
    let w: Vec<Vec<f64>> = (0..s.k_w).map(|_| (0..s.n).map(|_| normal(rng)).collect()).collect();
    let mut d = Vec::with_capacity(s.n);
    let mut y = Vec::with_capacity(s.n);
    for i in 0..s.n {
        let v = normal(rng);
        let zsum: f64 = z.iter().map(|c| c[i]).sum();
        let wsum: f64 = w.iter().map(|c| c[i]).sum();
        let scale = if s.hetero { 0.3 + z[0][i].abs() } else { 1.0 };
        let e = scale * normal(rng) + 0.6 * v;
        let di = s.pi * zsum + 0.5 * wsum + v;
        d.push(di);
        y.push(1.3 * di + 0.7 * wsum + s.direct * z[s.p_z - 1][i] + e);
    }
    Raw { y, d, z, w }
}

fn model(r: &Raw) -> IVModel {
    try_model(r).expect("model builds")
}

fn try_model(r: &Raw) -> ivdiag::Result<IVModel> {
    let names = ModelNames {
        outcome: "y".into(),
        treatment: "d".into(),
        instruments: (1..=r.z.len()).map(|j| format!("z{j}")).collect(),
        controls: (1..=r.w.len()).map(|j| format!("w{j}")).collect(),
    };
    IVModel::from_columns(&r.y, &r.d, &r.z, &r.w, names, true, None, None)
}

/// Residuals from regressing `v` on an intercept and `w`, by SVD.
fn residualize(w: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let x = DMatrix::from_fn(n, w.len() + 1, |i, j| if j == 0 { 1.0 } else { w[j - 1][i] });
    let b = x.clone().svd(true, true).solve(&DVector::from_column_slice(v), 1e-14).unwrap();
    let r = DVector::from_column_slice(v) - x * b;
    r.iter().copied().collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// ---------------------------------------------------------------------------
// criteria

fn c1_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let spec = VCovSpec::classic();
    let mut worst: f64 = 0.0;
    let mut wald_cases = 0;
    for i in 0..50 {
        let binary = i < 15;
        let design = Design {
            n: rng.random_range(10..60),
            p_z: 1,
            k_w: if binary { 0 } else { rng.random_range(0..=2) },
            pi: 1.0,
            direct: 0.0,
            hetero: i % 2 == 0,
            binary,
        };
        let raw = draw(&mut rng, design);
        let m = model(&raw);
        let tau = iv::tsls_point(&m).map_err(|e| e.to_string())?;
        let pi = iv::first_stage(&m, &spec, 0.05).map_err(|e| e.to_string())?.coef[0];
        let gamma = iv::reduced_form(&m, &spec, 0.05).map_err(|e| e.to_string())?.coef[0];
        let zt = residualize(&raw.w, &raw.z[0]);
        let cov_ratio = dot(&zt, &residualize(&raw.w, &raw.y)) / dot(&zt, &residualize(&raw.w, &raw.d));
        let mut diffs = vec![(tau - gamma / pi).abs(), (tau - cov_ratio).abs()];
        if binary {
            let wald = iv::wald_ratio(&m).map_err(|e| e.to_string())?;
            diffs.push((tau - wald).abs());
            wald_cases += 1;
        }
        let d = diffs.into_iter().fold(0.0, f64::max);
        ensure(d <= 1e-10, || format!("dataset {i}: identities differ by {d:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!("50 datasets ({wald_cases} with Wald ratio), max diff {worst:.1e}"))
}

fn covariance(a: &[Ratio<i64>], b: &[Ratio<i64>]) -> Ratio<i64> {
    let n = Ratio::from_integer(a.len() as i64);
    let ma = a.iter().copied().sum::<Ratio<i64>>() / n;
    let mb = b.iter().copied().sum::<Ratio<i64>>() / n;
    a.iter().zip(b).map(|(x, y)| (*x - ma) * (*y - mb)).sum()
}

fn c2_fix_a() -> Outcome {
    let path = workspace_root().join("fixtures/fix_a/fix_a.csv");
    let loaded = load_dataset(&path, &Roles::new("y", "d", &["z"]), None).map_err(|e| e.to_string())?;
    let m = IVModel::from_dataset(&loaded.dataset).map_err(|e| e.to_string())?;

    let col = |name: &str| -> Vec<Ratio<i64>> {
        loaded.dataset.column(name).unwrap().iter().map(|v| Ratio::from_integer(*v as i64)).collect()
    };
    let (z, d, y) = (col("z"), col("d"), col("y"));
    let pi = covariance(&z, &d) / covariance(&z, &z);
    let gamma = covariance(&z, &y) / covariance(&z, &z);
    let tau = covariance(&z, &y) / covariance(&z, &d);
    let ols = covariance(&d, &y) / covariance(&d, &d);
    ensure(
        pi == Ratio::new(4, 3) && gamma == Ratio::new(10, 3) && tau == Ratio::new(5, 2) && ols == Ratio::new(17, 8),
        || format!("rational oracle gave pi {pi}, gamma {gamma}, tau {tau}, ols {ols}"),
    )?;
    let f = |r: Ratio<i64>| *r.numer() as f64 / *r.denom() as f64;
    let spec = VCovSpec::classic();
    let lib = [
        ("tau_2sls", iv::tsls_point(&m).map_err(|e| e.to_string())?, f(tau)),
        ("tau_ols", iv::naive_ols(&m, &spec, 0.05).map_err(|e| e.to_string())?.coef[0], f(ols)),
        ("pi", iv::first_stage(&m, &spec, 0.05).map_err(|e| e.to_string())?.coef[0], f(pi)),
        ("gamma", iv::reduced_form(&m, &spec, 0.05).map_err(|e| e.to_string())?.coef[0], f(gamma)),
    ];
    for (name, got, want) in lib {
        // the exact value rounded to the nearest double, up to a few ulps
        ensure((got - want).abs() <= 4.0 * f64::EPSILON * want.abs(), || {
            format!("{name}: library {got:?}, exact {want:?}")
        })?;
    }
    Ok("tau 5/2, ols 17/8, pi 4/3, gamma 10/3 match the rational oracle to 4 ulp".into())
}

fn c3_effective_f() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let spec = VCovSpec::hc1();
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let design = Design {
            n: rng.random_range(30..200),
            p_z: 1,
            k_w: rng.random_range(0..=2),
            pi: rng.random_range(0.1..0.8),
            direct: 0.0,
            hetero: true,
            binary: false,
        };
        let raw = draw(&mut rng, design);
        let m = model(&raw);
        let fs = iv::first_stage(&m, &spec, 0.05).map_err(|e| e.to_string())?;
        let f_eff = effective_f(&fs, m.z()).map_err(|e| e.to_string())?;
        let f_rob = partial_f(&fs).map_err(|e| e.to_string())?;

        // independent robust Wald F from SVD residualization
        let n = raw.y.len() as f64;
        let k = (2 + raw.w.len()) as f64;
        let zt = residualize(&raw.w, &raw.z[0]);
        let dt = residualize(&raw.w, &raw.d);
        let zz = dot(&zt, &zt);
        let pi = dot(&zt, &dt) / zz;
        let meat: f64 = zt.iter().zip(&dt).map(|(z, d)| (z * (d - pi * z)).powi(2)).sum();
        let v = n / (n - k) * meat / (zz * zz);
        let oracle = pi * pi / v;
        let d = (f_eff - oracle).abs().max((f_eff - f_rob).abs());
        ensure(d <= 1e-8, || format!("dataset {i}: F_eff {f_eff}, robust F {f_rob}, oracle {oracle}"))?;
        worst = worst.max(d);
    }
    Ok(format!("50 datasets, max |F_eff - robust F| {worst:.1e}"))
}

fn grid_tolerance(m: &IVModel, flavor: VCovFlavor, tau: f64, points: usize) -> f64 {
    let (tau_hat, se) = iv::tsls_point_se(m, flavor).unwrap();
    let half = ivdiag::inference::ar::GRID_SPAN * se;
    let u = (tau - tau_hat) / half;
    half * (1.0 + u * u) * std::f64::consts::PI / (points - 1) as f64
}

fn compare_sets(closed: &IntervalSet, grid: &IntervalSet, tol: impl Fn(f64) -> f64) -> Result<(), String> {
    if closed.kind != grid.kind || closed.intervals.len() != grid.intervals.len() {
        return Err(format!("closed {closed:?} vs grid {grid:?}"));
    }
    for (a, b) in closed.intervals.iter().zip(&grid.intervals) {
        for (x, y) in [(a.low, b.low), (a.high, b.high)] {
            let ok = if x.is_finite() { (x - y).abs() <= tol(x) } else { x == y };
            if !ok {
                return Err(format!("endpoint {x} vs {y} (tolerance {:.2e})", tol(x)));
            }
        }
    }
    Ok(())
}

fn c4_ar() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst_p: f64 = 0.0;
    for i in 0..20 {
        let design = Design {
            n: rng.random_range(30..120),
            p_z: 1 + i % 3,
            k_w: rng.random_range(0..=2),
            pi: rng.random_range(0.0..0.6),
            direct: 0.0,
            hetero: true,
            binary: false,
        };
        let m = model(&draw(&mut rng, design));
        let spec = VCovSpec::hc1();
        let ar = ar_test(&m, 0.0, &spec).map_err(|e| e.to_string())?;
        let rf = iv::reduced_form(&m, &spec, 0.05).map_err(|e| e.to_string())?;
        let g = DVector::from_vec(rf.coef.clone());
        let w = g.dot(&(rf.vcov.clone().try_inverse().ok_or("singular reduced-form vcov")? * &g));
        let p = chi2_sf(w, m.p_z());
        let d = (ar.p - p).abs();
        ensure(d <= 1e-10, || format!("dataset {i}: AR p {} vs Wald p {p}", ar.p))?;
        worst_p = worst_p.max(d);
    }

    const POINTS: usize = 100_001;
    let targets = [SetKind::Bounded, SetKind::Disconnected, SetKind::WholeLine, SetKind::Empty];
    let mut found = Vec::new();
    let mut attempts = 0;
    for target in targets {
        let mut count = 0;
        while count < 5 {
            attempts += 1;
            if attempts > 20_000 {
                return Err(format!("could not construct 5 {} cases", target.as_str()));
            }
            let p_z = if target == SetKind::Empty { 2 } else { 1 + rng.random_range(0..2) };
            let flavor = if p_z == 1 && rng.random_bool(0.5) { VCovFlavor::Hc1 } else { VCovFlavor::Classic };
            let design = Design {
                n: rng.random_range(20..80),
                p_z,
                k_w: rng.random_range(0..=1),
                pi: [0.0, 0.05, 0.15, 0.3, 1.0][rng.random_range(0..5)],
                direct: if p_z == 2 { [0.0, 1.5][rng.random_range(0..2)] } else { 0.0 },
                hetero: flavor == VCovFlavor::Hc1,
                binary: false,
            };
            let Ok(m) = try_model(&draw(&mut rng, design)) else { continue };
            let spec = VCovSpec::classic().with_flavor(flavor);
            let Ok(closed) = ar_confidence_set(&m, 0.05, &spec) else { continue };
            if closed.closed_form && closed.set.kind == target {
                found.push((m, spec, closed));
                count += 1;
            }
        }
    }
    for (i, (m, spec, closed)) in found.iter().enumerate() {
        let grid = ar_confidence_set_grid(m, 0.05, spec, POINTS).map_err(|e| e.to_string())?;
        compare_sets(&closed.set, &grid.set, |t| grid_tolerance(m, spec.flavor, t, POINTS))
            .map_err(|e| format!("case {i} ({}): {e}", closed.set.kind.as_str()))?;
    }
    Ok(format!(
        "ar_test(0) = Wald p to {worst_p:.1e}; 20 closed-form sets (5 each bounded/disconnected/whole_line/empty) match a {POINTS}-point grid"
    ))
}

fn c5_tf_anchor() -> Outcome {
    let t = TfTable::for_alpha(0.05).map_err(|e| e.to_string())?;
    let c = t.critical_value(104.7).ok_or("104.7 outside the table")?;
    let factor = t.adjustment_factor(104.7).unwrap();
    ensure((factor - 1.0).abs() <= 0.01, || format!("factor at 104.7 is {factor}"))?;
    for table in [t, TfTable::for_alpha(0.01).unwrap()] {
        for w in table.knots.windows(2) {
            ensure(w[1].1 <= w[0].1, || format!("knot values increase: {:?} -> {:?}", w[0], w[1]))?;
        }
        let (lo, hi) = (table.lower_support(), 2.0 * table.upper_support());
        let mut prev = f64::INFINITY;
        for i in 0..=20_000 {
            let f = lo * (hi / lo).powf(i as f64 / 20_000.0);
            let a = table.adjustment_factor(f).unwrap();
            ensure(a <= prev, || format!("factor rises at F = {f} (alpha {})", table.alpha))?;
            prev = a;
        }
    }
    Ok(format!("c(104.7) = {c:.4}, factor {factor:.4}; monotone over both tables"))
}

fn c6_classic_se() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let design = Design {
            n: rng.random_range(10..300),
            p_z: 1,
            k_w: 0,
            pi: rng.random_range(0.2..1.5),
            direct: 0.0,
            hetero: i % 2 == 1,
            binary: false,
        };
        let raw = draw(&mut rng, design);
        let m = model(&raw);
        let fit = iv::tsls_fit(&m, &VCovSpec::classic(), 0.05).map_err(|e| e.to_string())?;
        let v_lib = fit.vcov[(0, 0)];

        let n = raw.y.len();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (md, my, mz) = (mean(&raw.d), mean(&raw.y), mean(&raw.z[0]));
        let dc: Vec<f64> = raw.d.iter().map(|v| v - md).collect();
        let yc: Vec<f64> = raw.y.iter().map(|v| v - my).collect();
        let zc: Vec<f64> = raw.z[0].iter().map(|v| v - mz).collect();
        let tau = dot(&zc, &yc) / dot(&zc, &dc);
        let sigma2: f64 = dc.iter().zip(&yc).map(|(d, y)| (y - tau * d).powi(2)).sum::<f64>() / (n - 2) as f64;
        let r2 = dot(&dc, &zc).powi(2) / (dot(&dc, &dc) * dot(&zc, &zc));
        let v_oracle = sigma2 / (dot(&dc, &dc) * r2);
        let rel = (v_lib - v_oracle).abs() / v_oracle;
        ensure(rel <= 1e-8, || format!("dataset {i}: V {v_lib} vs {v_oracle}"))?;
        worst = worst.max(rel);
    }
    Ok(format!("20 datasets, max relative diff {worst:.1e}"))
}

fn sim_spec(n: usize, pi: f64, rho_de: f64, rho_ze: f64, reps: usize, seed: u64, methods: &[inference::InferenceMethod]) -> SimSpec {
    let spec = SimSpec {
        n,
        p_z: 1,
        pi,
        rho_de,
        rho_ze,
        clusters: None,
        tau: 1.0,
        null: None,
        reps,
        seed,
        alpha: 0.05,
        methods: methods.to_vec(),
        vcov: Some(VCovFlavor::Hc1),
        boot_reps: 199,
    };
    spec.validate().expect("valid simulation spec");
    spec
}

fn rate(s: &ivdiag::harness::SimSummary, m: inference::InferenceMethod) -> f64 {
    s.methods.iter().find(|r| r.method == m).map(|r| r.rate).unwrap_or(f64::NAN)
}

fn c7_size() -> Outcome {
    use inference::InferenceMethod::{Analytic, Ar};
    let methods = &[Analytic, Ar];
    // population first-stage F (concentration per instrument) n pi^2 = 2
    let weak = monte_carlo(&sim_spec(1000, (2.0f64 / 1000.0).sqrt(), 0.8, 0.0, 5000, 7001, methods))
        .map_err(|e| e.to_string())?;
    let strong = monte_carlo(&sim_spec(1000, 1.0, 0.8, 0.0, 5000, 7002, methods)).map_err(|e| e.to_string())?;
    let (wt, wa) = (rate(&weak, Analytic), rate(&weak, Ar));
    let (st, sa) = (rate(&strong, Analytic), rate(&strong, Ar));
    let band = |r: f64| (0.035..=0.065).contains(&r);
    let detail = format!(
        "weak: t {:.2}%, AR {:.2}% (median F {:.2}); strong: t {:.2}%, AR {:.2}%",
        100.0 * wt,
        100.0 * wa,
        weak.median_first_stage_f,
        100.0 * st,
        100.0 * sa
    );
    ensure(wt > 0.08 && band(wa) && band(st) && band(sa), || detail.clone())?;
    Ok(detail)
}

fn c8_median_bias() -> Outcome {
    let s = monte_carlo(&sim_spec(1000, 0.0, 0.5, 0.0, 2000, 8001, &[])).map_err(|e| e.to_string())?;
    let diff = s.tsls.median - s.population.plim_ols;
    let detail = format!(
        "median 2SLS {:.4}, plim OLS {:.4}, MC se {:.4} ({:.2} se)",
        s.tsls.median,
        s.population.plim_ols,
        s.tsls.median_mc_se,
        diff / s.tsls.median_mc_se
    );
    ensure(diff.abs() <= 3.0 * s.tsls.median_mc_se, || detail.clone())?;
    Ok(detail)
}

fn c9_bias_amplification() -> Outcome {
    let s = monte_carlo(&sim_spec(20_000, 0.1, 0.1, 0.05, 1000, 9001, &[])).map_err(|e| e.to_string())?;
    let b = s.bias.as_ref().ok_or("no bias check in summary")?;
    let detail = format!(
        "empirical {:.3} vs formula {:.3} (relative error {:.1}%)",
        b.empirical_ratio,
        b.formula_ratio,
        100.0 * b.relative_error
    );
    ensure(b.relative_error <= 0.15 && b.empirical_ratio > 1.0, || detail.clone())?;
    Ok(detail)
}

fn ivdiag_bin(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_ivdiag"))
        .args(args)
        .output()
        .map_err(|e| format!("cannot start ivdiag: {e}"))
}

fn expect_ok(out: &std::process::Output) -> Result<(), String> {
    ensure(out.status.success(), || {
        format!("ivdiag exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr))
    })
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = fix_a_config();
    let spec = workspace_root().join("fixtures/sims/determinism.toml");
    for t in ["1", "4"] {
        let out_dir = dir.path().join(format!("run{t}"));
        expect_ok(&ivdiag_bin(&[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--out-dir",
            out_dir.to_str().unwrap(),
            "--threads",
            t,
        ])?)?;
        let sim_out = dir.path().join(format!("sim{t}.json"));
        expect_ok(&ivdiag_bin(&[
            "simulate",
            "--spec",
            spec.to_str().unwrap(),
            "--out",
            sim_out.to_str().unwrap(),
            "--threads",
            t,
        ])?)?;
    }
    let read = |p: PathBuf| std::fs::read(&p).map_err(|e| format!("{}: {e}", p.display()));
    for name in ["fix_a.json", "fix_a.csv"] {
        let a = read(dir.path().join("run1").join(name))?;
        let b = read(dir.path().join("run4").join(name))?;
        ensure(a == b, || format!("run output {name} differs between 1 and 4 threads"))?;
    }
    let a = read(dir.path().join("sim1.json"))?;
    let b = read(dir.path().join("sim4.json"))?;
    ensure(a == b, || "simulate output differs between 1 and 4 threads".into())?;
    Ok("run (JSON, CSV) and simulate (JSON) byte-identical at 1 and 4 threads".into())
}

fn c11_ltz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let spec = VCovSpec::hc1();
    let mut checked = 0;
    for i in 0..20 {
        let p_z = 1 + i % 2;
        let design = Design {
            n: rng.random_range(30..150),
            p_z,
            k_w: rng.random_range(0..=2),
            pi: rng.random_range(0.2..1.0),
            direct: 0.0,
            hetero: true,
            binary: false,
        };
        let m = model(&draw(&mut rng, design));
        let base = inference::analytic_infer(&m, &spec, 0.05).map_err(|e| e.to_string())?;
        let zero = ltz_adjust(&m, &LtzPrior::zero(p_z), &spec, 0.05).map_err(|e| e.to_string())?;
        ensure(
            zero.point == base.point && zero.se == base.se && zero.ci == base.ci && zero.p_null == base.p_null,
            || format!("dataset {i}: zero prior {zero:?} vs 2SLS {base:?}"),
        )?;
        for _ in 0..10 {
            let b = DMatrix::from_fn(p_z, p_z, |_, _| normal(&mut rng));
            let omega = &b * b.transpose();
            let mu: Vec<f64> = (0..p_z).map(|_| normal(&mut rng)).collect();
            let prior = LtzPrior::new(mu, omega).map_err(|e| e.to_string())?;
            let r = ltz_adjust(&m, &prior, &spec, 0.05).map_err(|e| e.to_string())?;
            ensure(r.se.unwrap() >= base.se.unwrap(), || {
                format!("dataset {i}: SE shrank from {:?} to {:?}", base.se, r.se)
            })?;
            checked += 1;
        }
    }
    Ok(format!("zero prior exact on 20 datasets; {checked} PSD priors never shrink the SE"))
}

fn attr(line: &str, name: &str) -> Option<f64> {
    let key = format!(" {name}=\"");
    let start = line.find(&key)? + key.len();
    let end = start + line[start..].find('"')?;
    line[start..end].parse().ok()
}

fn segment_width(svg: &str, row: &str) -> Option<f64> {
    let tag = format!("class=\"ci\" data-row=\"{row}\"");
    let line = svg.lines().find(|l| l.contains(&tag))?;
    Some((attr(line, "x2")? - attr(line, "x1")?).abs())
}

fn c12_end_to_end() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = ivdiag_bin(&[
        "run",
        "--config",
        fix_a_config().to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ])?;
    expect_ok(&out)?;
    let json_text = std::fs::read_to_string(dir.path().join("fix_a.json")).map_err(|e| e.to_string())?;
    let report: serde_json::Value = serde_json::from_str(&json_text).map_err(|e| format!("invalid JSON: {e}"))?;
    let schema_text =
        std::fs::read_to_string(workspace_root().join("schema/ivdiag-1.schema.json")).map_err(|e| e.to_string())?;
    let schema: serde_json::Value = serde_json::from_str(&schema_text).map_err(|e| e.to_string())?;
    let validator = jsonschema::validator_for(&schema).map_err(|e| format!("bad schema: {e}"))?;
    let errors: Vec<String> = validator.iter_errors(&report).map(|e| e.to_string()).collect();
    ensure(errors.is_empty(), || format!("schema violations: {}", errors.join("; ")))?;

    let svg = std::fs::read_to_string(dir.path().join("fix_a.svg")).map_err(|e| e.to_string())?;
    let rows = svg.matches("<g class=\"row\"").count();
    ensure(rows == 6, || format!("expected 1 OLS + 5 method rows, found {rows}"))?;
    let ols = segment_width(&svg, "ols-ols").ok_or("no OLS segment")?;
    let iv = segment_width(&svg, "2sls-analytic").ok_or("no 2SLS analytic segment")?;
    ensure(iv > ols, || format!("2SLS segment {iv} is not wider than OLS segment {ols}"))?;
    Ok(format!("schema-valid JSON; SVG rows {rows}; 2SLS segment {iv:.2} > OLS {ols:.2}"))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "just-identified identity suite", limit: Duration::from_secs(5), run: c1_identities },
        Criterion { id: 2, name: "FIX-A fixture", limit: Duration::from_secs(1), run: c2_fix_a },
        Criterion { id: 3, name: "effective-F equivalence", limit: Duration::from_secs(5), run: c3_effective_f },
        Criterion { id: 4, name: "AR duality", limit: Duration::from_secs(30), run: c4_ar },
        Criterion { id: 5, name: "tF anchor", limit: Duration::from_secs(1), run: c5_tf_anchor },
        Criterion { id: 6, name: "classic-SE identity", limit: Duration::from_secs(1), run: c6_classic_se },
        Criterion { id: 7, name: "size simulation", limit: Duration::from_secs(600), run: c7_size },
        Criterion { id: 8, name: "median-bias simulation", limit: Duration::from_secs(300), run: c8_median_bias },
        Criterion { id: 9, name: "bias-amplification simulation", limit: Duration::from_secs(300), run: c9_bias_amplification },
        Criterion { id: 10, name: "determinism", limit: Duration::from_secs(120), run: c10_determinism },
        Criterion { id: 11, name: "LTZ identity", limit: Duration::from_secs(1), run: c11_ltz },
        Criterion { id: 12, name: "end-to-end", limit: Duration::from_secs(5), run: c12_end_to_end },
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for c in criteria.iter().filter(|c| filter.is_empty() || filter.contains(&c.id)) {
        let start = Instant::now();
        let result = std::panic::catch_unwind(c.run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let (status, detail) = match result {
            Ok(d) if elapsed <= c.limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over the {:?} limit", c.limit)),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} {:>2} {} ({:.2}s): {detail}", c.id, c.name, elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
