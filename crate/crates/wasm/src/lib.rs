//! Browser bindings: simulate and estimate a path, tabulate a kernel, and run
//! the kernel-oracle lattice for one family.
//!
//! Each binding wraps a plain function returning `Result<_, String>` so the
//! logic is testable off the browser.

use fracgp::estimators;
use fracgp::oracle::{self, KernelFamily, QuadratureConfig};
use fracgp::process::ProcessSpec;
use fracgp::sampler::{Sampler, TimeGrid};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest grid the page may request; keeps a tab responsive.
pub const MAX_POINTS: usize = 1 << 16;
/// Largest lattice the page may request.
pub const MAX_LATTICE: usize = 500;

fn parse_spec(spec_json: &str) -> Result<ProcessSpec, String> {
    let spec: ProcessSpec = serde_json::from_str(spec_json).map_err(|e| format!("invalid spec: {e}"))?;
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    fracgp::io::to_json(v).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct Simulation {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub method: fracgp::sampler::Method,
    pub warnings: Vec<String>,
    /// Global Hurst estimate, absent when the path is too short or degenerate.
    pub hurst: Option<f64>,
    pub hurst_radius: Option<f64>,
}

/// One path on [0, (n - 1) dt] with its aggregated-variance Hurst estimate.
pub fn simulate_path(spec_json: &str, n: usize, dt: f64, seed: u64) -> Result<Simulation, String> {
    let spec = parse_spec(spec_json)?;
    if n > MAX_POINTS {
        return Err(format!("at most {MAX_POINTS} points"));
    }
    let grid = TimeGrid::new(0.0, dt, n).map_err(|e| e.to_string())?;
    let sampler = Sampler::new(&spec, &grid).map_err(|e| e.to_string())?;
    let values = sampler.sample_values(seed);
    let est = estimators::hurst_aggregated_variance(&values, &estimators::default_scales(n)).ok();
    Ok(Simulation {
        times: grid.times(),
        method: sampler.method(),
        warnings: sampler.diagnostics().warnings.clone(),
        hurst: est.as_ref().and_then(|r| r.global_value),
        hurst_radius: est.map(|r| r.confidence_radius),
        values,
    })
}

/// Covariance of the spec between `anchor` and each of the `n` times
/// `start + i (end - start) / (n - 1)`.
pub fn kernel_curve(spec_json: &str, anchor: f64, start: f64, end: f64, n: usize) -> Result<Vec<f64>, String> {
    let spec = parse_spec(spec_json)?;
    if !(2..=MAX_POINTS).contains(&n) || !(end > start) {
        return Err("need 2 <= n and start < end".into());
    }
    let cfg = QuadratureConfig::default();
    (0..n)
        .map(|i| {
            let t = start + (end - start) * i as f64 / (n - 1) as f64;
            oracle::covariance_or_oracle(&spec, t, anchor, &cfg).map_err(|e| e.to_string())
        })
        .collect()
}

/// Kernel-oracle lattice report for one family as JSON.
pub fn verify_lattice(family: &str, points: usize, seed: u64) -> Result<String, String> {
    let family = KernelFamily::from_name(family).ok_or_else(|| format!("unknown family `{family}`"))?;
    if !(1..=MAX_LATTICE).contains(&points) {
        return Err(format!("points must be in 1..={MAX_LATTICE}"));
    }
    to_json(&oracle::verify_family(family, points, seed, &QuadratureConfig::default()))
}

#[wasm_bindgen(js_name = simulate)]
pub fn simulate_js(spec_json: &str, n: usize, dt: f64, seed: u32) -> Result<String, JsError> {
    simulate_path(spec_json, n, dt, seed as u64)
        .and_then(|s| to_json(&s))
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = kernelCurve)]
pub fn kernel_curve_js(spec_json: &str, anchor: f64, start: f64, end: f64, n: usize) -> Result<Vec<f64>, JsError> {
    kernel_curve(spec_json, anchor, start, end, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = verify)]
pub fn verify_js(family: &str, points: usize, seed: u32) -> Result<String, JsError> {
    verify_lattice(family, points, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = families)]
pub fn families_js() -> Vec<String> {
    KernelFamily::ALL.iter().map(|f| f.name().to_string()).collect()
}
