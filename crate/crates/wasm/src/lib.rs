//! Browser bindings: a full study on pasted CSV, one simulated draw with its
//! robust intervals, and a small size study.

use ivdiag::harness::load::load_from_reader;
use ivdiag::harness::{monte_carlo, plot, run_study_on, LoadedData, SimSpec, StudyConfig};
use ivdiag::inference::InferenceMethod;
use ivdiag::{Dataset, Roles, VCovFlavor};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn split_names(list: &str) -> Vec<String> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

fn toml_list(names: &[String]) -> String {
    let quoted: Vec<String> = names.iter().map(|n| format!("{n:?}")).collect();
    format!("[{}]", quoted.join(", "))
}

fn study_config(instruments: &[String], covariates: &[String], vcov: &str, seed: u64, methods: &str) -> Result<StudyConfig, String> {
    let text = format!(
        "name = \"demo\"\ndata = \"demo.csv\"\noutcome = \"y\"\ntreatment = \"d\"\ninstruments = {}\ncovariates = {}\nvcov = {vcov:?}\nboot_reps = 499\nseed = {seed}\nmethods = {methods}\n",
        toml_list(instruments),
        toml_list(covariates),
    );
    let cfg = StudyConfig::from_toml(&text).map_err(|e| e.to_string())?;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn report_bundle(cfg: &StudyConfig, loaded: &LoadedData) -> String {
    let report = run_study_on(cfg, loaded);
    let value: serde_json::Value = serde_json::from_str(&report.to_json()).expect("report is JSON");
    json!({ "report": value, "svg": plot::render_svg(&report) }).to_string()
}

/// Columns are renamed to y, d, z..., w... so the echoed config stays short.
pub fn study_from_csv(
    csv: &str,
    outcome: &str,
    treatment: &str,
    instruments: &str,
    covariates: &str,
    vcov: &str,
    seed: u64,
) -> Result<String, String> {
    let inst = split_names(instruments);
    let cov = split_names(covariates);
    let mut roles = Roles::new(outcome, treatment, &inst.iter().map(String::as_str).collect::<Vec<_>>());
    if !cov.is_empty() {
        roles = roles.with_covariates(&cov.iter().map(String::as_str).collect::<Vec<_>>());
    }
    let loaded = load_from_reader(csv.as_bytes(), &roles, None).map_err(|e| e.to_string())?;

    let mut columns = vec![
        ("y".to_string(), loaded.dataset.column(outcome).map_err(|e| e.to_string())?.to_vec()),
        ("d".to_string(), loaded.dataset.column(treatment).map_err(|e| e.to_string())?.to_vec()),
    ];
    let z_names: Vec<String> = (1..=inst.len()).map(|j| format!("z{j}")).collect();
    let w_names: Vec<String> = (1..=cov.len()).map(|j| format!("w{j}")).collect();
    for (new, old) in z_names.iter().zip(&inst).chain(w_names.iter().zip(&cov)) {
        columns.push((new.clone(), loaded.dataset.column(old).map_err(|e| e.to_string())?.to_vec()));
    }
    let z_refs: Vec<&str> = z_names.iter().map(String::as_str).collect();
    let w_refs: Vec<&str> = w_names.iter().map(String::as_str).collect();
    let renamed = Roles::new("y", "d", &z_refs).with_covariates(&w_refs);
    let dataset = Dataset::new(columns, renamed).map_err(|e| e.to_string())?;

    let methods = if inst.len() == 1 {
        "[\"analytic\", \"ar\", \"tf\", \"bootstrap_c\", \"bootstrap_t\"]"
    } else {
        "[\"analytic\", \"ar\", \"bootstrap_c\", \"bootstrap_t\"]"
    };
    let cfg = study_config(&z_names, &w_names, vcov, seed, methods)?;
    let renamed_loaded = LoadedData { dataset, zfs_rows: None, dropped: loaded.dropped };
    Ok(report_bundle(&cfg, &renamed_loaded))
}

/// One draw from the simulation design, with analytic, AR and tF intervals.
pub fn one_draw(n: usize, pi: f64, rho_de: f64, seed: u64) -> Result<String, String> {
    let spec = SimSpec {
        n,
        p_z: 1,
        pi,
        rho_de,
        rho_ze: 0.0,
        clusters: None,
        tau: 1.0,
        null: None,
        reps: ivdiag::harness::sim::MIN_REPS,
        seed,
        alpha: 0.05,
        methods: vec![],
        vcov: Some(VCovFlavor::Hc1),
        boot_reps: 199,
    };
    spec.validate().map_err(|e| e.to_string())?;
    let l = spec.cholesky().map_err(|e| e.to_string())?;
    let sample = spec.draw(&mut ivdiag::resample::replicate_rng(seed, 0), &l);
    let columns = vec![
        ("y".to_string(), sample.y),
        ("d".to_string(), sample.d),
        ("z1".to_string(), sample.z[0].clone()),
    ];
    let dataset = Dataset::new(columns, Roles::new("y", "d", &["z1"])).map_err(|e| e.to_string())?;
    let cfg = study_config(&["z1".to_string()], &[], "hc1", seed, "[\"analytic\", \"ar\", \"tf\"]")?;
    Ok(report_bundle(&cfg, &LoadedData { dataset, zfs_rows: None, dropped: 0 }))
}

/// Rejection rates of the analytic, AR and tF tests at the true effect.
pub fn size_study(n: usize, pi: f64, rho_de: f64, reps: usize, seed: u64) -> Result<String, String> {
    let spec = SimSpec {
        n,
        p_z: 1,
        pi,
        rho_de,
        rho_ze: 0.0,
        clusters: None,
        tau: 1.0,
        null: None,
        reps,
        seed,
        alpha: 0.05,
        methods: vec![InferenceMethod::Analytic, InferenceMethod::Ar, InferenceMethod::Tf],
        vcov: Some(VCovFlavor::Hc1),
        boot_reps: 199,
    };
    monte_carlo(&spec).map(|s| s.to_json()).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn demo_study(
    csv: &str,
    outcome: &str,
    treatment: &str,
    instruments: &str,
    covariates: &str,
    vcov: &str,
    seed: u32,
) -> Result<String, JsValue> {
    study_from_csv(csv, outcome, treatment, instruments, covariates, vcov, seed as u64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn ar_explorer(n: u32, pi: f64, rho_de: f64, seed: u32) -> Result<String, JsValue> {
    one_draw(n as usize, pi, rho_de, seed as u64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn size_explorer(n: u32, pi: f64, rho_de: f64, reps: u32, seed: u32) -> Result<String, JsValue> {
    size_study(n as usize, pi, rho_de, reps as usize, seed as u64).map_err(|e| JsValue::from_str(&e))
}
