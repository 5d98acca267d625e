//! Regularity and memory estimates from sample paths.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::Memory;
use crate::process::ProcessSpec;
use crate::sampler::{SamplePath, TimeGrid};

/// Confidence radii are this many standard errors.
pub const CONFIDENCE_MULTIPLIER: f64 = 2.0;
/// A memory parameter whose upper confidence limit stays below this is
/// read as short memory.
pub const SRD_CEILING: f64 = 0.1;
/// Smallest ensemble accepted by the tangent test.
pub const MIN_ENSEMBLE: usize = 1000;
/// Share of the Fourier frequencies used by default in the log-periodogram fit.
pub const DEFAULT_LOW_FREQ_FRACTION: f64 = 0.1;

/// Output of every estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimator: String,
    pub global_value: Option<f64>,
    /// (time or scale, value) pairs.
    pub local_values: Option<Vec<(f64, f64)>>,
    pub confidence_radius: f64,
    pub window: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub memory_class: Option<Memory>,
    pub diagnostics: BTreeMap<String, serde_json::Value>,
}

impl EstimateReport {
    fn new(estimator: &str) -> Self {
        Self {
            estimator: estimator.into(),
            global_value: None,
            local_values: None,
            confidence_radius: 0.0,
            window: 0,
            memory_class: None,
            diagnostics: BTreeMap::new(),
        }
    }

    fn note(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.diagnostics.insert(key.into(), value.into());
    }
}

/// Least-squares line through (x, y): (slope, intercept, slope standard error).
fn regress(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let se = if x.len() > 2 {
        let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, intercept, se)
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::Domain(format!("non-finite value at index {i}"))),
        None => Ok(()),
    }
}

/// Dyadic scales 1, 2, 4, ... up to n/8.
pub fn default_scales(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut m = 1;
    while m * 8 <= n {
        out.push(m);
        m *= 2;
    }
    out
}

/// Global Hurst index from the growth of E[(X_{i+m} - X_i)²] with the lag m:
/// half the log-log slope.
///
/// Estimates outside (0, 1) are returned but flagged `out_of_model`.
pub fn hurst_aggregated_variance(values: &[f64], scales: &[usize]) -> Result<EstimateReport> {
    check_finite(values)?;
    if scales.len() < 2 {
        return Err(Error::InsufficientData("need at least two scales".into()));
    }
    let max_scale = *scales.iter().max().unwrap_or(&0);
    if scales.contains(&0) {
        return Err(Error::Domain("scales must be positive".into()));
    }
    if values.len() < 2 * max_scale {
        return Err(Error::InsufficientData(format!(
            "path of length {} is shorter than twice the largest scale {max_scale}",
            values.len()
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &m in scales {
        let ms = values.windows(m + 1).map(|w| (w[m] - w[0]).powi(2)).sum::<f64>() / (values.len() - m) as f64;
        if ms == 0.0 {
            return Err(Error::Degenerate(format!("increments at scale {m} are all zero")));
        }
        xs.push((m as f64).ln());
        ys.push(ms.ln());
    }
    let (slope, _, se) = regress(&xs, &ys);
    let h = slope / 2.0;
    let mut r = EstimateReport::new("aggregated-variance");
    r.global_value = Some(h);
    r.confidence_radius = CONFIDENCE_MULTIPLIER * se / 2.0;
    r.window = values.len();
    // (lag, log mean square) pairs behind the fit
    r.local_values = Some(scales.iter().zip(&ys).map(|(&m, y)| (m as f64, *y)).collect());
    r.note("scales", scales.to_vec());
    r.note("out_of_model", !(h > 0.0 && h < 1.0));
    Ok(r)
}

/// Lags of the second differences used inside each window.
const HOLDER_LAGS: [usize; 3] = [1, 2, 4];

/// Pointwise Hölder exponent from second-order quadratic variations in
/// sliding windows (stride window/2), one estimate per window centre.
pub fn local_holder(times: &[f64], values: &[f64], window: usize) -> Result<EstimateReport> {
    check_finite(values)?;
    if times.len() != values.len() {
        return Err(Error::Domain("times and values differ in length".into()));
    }
    if window < 16 {
        return Err(Error::Domain(format!("window must be at least 16, got {window}")));
    }
    if values.len() < 4 * window {
        return Err(Error::InsufficientData(format!(
            "need at least {} points for window {window}, got {}",
            4 * window,
            values.len()
        )));
    }
    let xs: Vec<f64> = HOLDER_LAGS.iter().map(|&m| (m as f64).ln()).collect();
    let mut local = Vec::new();
    let mut errors = Vec::new();
    let stride = window / 2;
    let mut start = 0;
    while start + window <= values.len() {
        let w = &values[start..start + window];
        let mut ys = Vec::with_capacity(HOLDER_LAGS.len());
        for &m in &HOLDER_LAGS {
            let count = window - 2 * m;
            let v = (0..count).map(|i| (w[i + 2 * m] - 2.0 * w[i + m] + w[i]).powi(2)).sum::<f64>() / count as f64;
            if v == 0.0 {
                return Err(Error::Degenerate(format!(
                    "second differences vanish in the window starting at index {start}"
                )));
            }
            ys.push(v.ln());
        }
        let (slope, _, se) = regress(&xs, &ys);
        local.push((times[start + window / 2], slope / 2.0));
        errors.push(se / 2.0);
        start += stride;
    }
    errors.sort_by(f64::total_cmp);
    let mut r = EstimateReport::new("local-holder");
    r.confidence_radius = CONFIDENCE_MULTIPLIER * errors[errors.len() / 2];
    r.window = window;
    r.global_value = Some(local.iter().map(|p| p.1).sum::<f64>() / local.len() as f64);
    r.local_values = Some(local);
    r.note("lags", HOLDER_LAGS.to_vec());
    r.note("stride", stride);
    Ok(r)
}

/// Log-periodogram regression near zero frequency.
///
/// Fits log I(λ_j) = c - 2d log(2 sin(λ_j/2)) over the lowest
/// `low_freq_fraction` of the Fourier frequencies. The class is LRD when d
/// exceeds its confidence radius, SRD when d plus the radius stays below
/// [`SRD_CEILING`], and Boundary otherwise.
pub fn lrd_periodogram(values: &[f64], low_freq_fraction: f64) -> Result<EstimateReport> {
    check_finite(values)?;
    if !(low_freq_fraction > 0.0 && low_freq_fraction <= 1.0) {
        return Err(Error::Domain(format!("low_freq_fraction must be in (0, 1], got {low_freq_fraction}")));
    }
    let n = values.len();
    let m = ((n / 2) as f64 * low_freq_fraction).floor() as usize;
    if m < 8 {
        return Err(Error::InsufficientData(format!("only {m} frequencies below the cutoff")));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = values.iter().map(|v| Complex64::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mut xs = Vec::with_capacity(m);
    let mut ys = Vec::with_capacity(m);
    for (j, c) in buf.iter().enumerate().take(m + 1).skip(1) {
        let lambda = 2.0 * PI * j as f64 / n as f64;
        let power = c.norm_sqr() / (2.0 * PI * n as f64);
        if power == 0.0 {
            return Err(Error::Degenerate("periodogram vanishes at a low frequency".into()));
        }
        xs.push(-2.0 * (2.0 * (lambda / 2.0).sin()).ln());
        ys.push(power.ln());
    }
    let (d, _, _) = regress(&xs, &ys);
    // asymptotic standard error of the log-periodogram slope
    let sxx: f64 = {
        let mx = xs.iter().sum::<f64>() / m as f64;
        xs.iter().map(|x| (x - mx).powi(2)).sum()
    };
    let se = (PI * PI / 6.0 / sxx).sqrt();
    let radius = CONFIDENCE_MULTIPLIER * se;
    let class = if d > radius {
        Memory::Lrd
    } else if d + radius < SRD_CEILING {
        Memory::Srd
    } else {
        Memory::Boundary
    };
    let mut r = EstimateReport::new("log-periodogram");
    r.global_value = Some(d);
    r.confidence_radius = radius;
    r.window = m;
    r.memory_class = Some(class);
    r.note("frequencies", m);
    r.note("anti_persistent", d < -radius);
    Ok(r)
}

/// [`lrd_periodogram`] on a sample path: stationary families as they are,
/// FBM through its increments, anything else rejected.
pub fn lrd_periodogram_path(path: &SamplePath, low_freq_fraction: f64) -> Result<EstimateReport> {
    match &path.spec {
        s if s.is_stationary() => lrd_periodogram(&path.values, low_freq_fraction),
        ProcessSpec::Fbm { .. } => {
            let inc: Vec<f64> = path.values.windows(2).map(|w| w[1] - w[0]).collect();
            let mut r = lrd_periodogram(&inc, low_freq_fraction)?;
            r.note("differenced", true);
            Ok(r)
        }
        s => Err(Error::NonStationary(format!("{} paths need differencing first", s.name()))),
    }
}

/// Offsets u = k/4, k = 1..4, at which rescaled increments are compared.
const TANGENT_OFFSETS: usize = 4;

fn grid_index(grid: &TimeGrid, t: f64) -> Result<usize> {
    let x = (t - grid.start) / grid.step;
    let i = x.round();
    if (x - i).abs() > 1e-6 || i < 0.0 || i as usize >= grid.n {
        return Err(Error::Domain(format!("time {t} is not a grid point")));
    }
    Ok(i as usize)
}

/// Normalised covariance distance between the rescaled increments
/// [X(t0 + ρu) - X(t0)] / ρ^κ of an ensemble and the FBM tangent with index κ,
/// one value per scale ρ.
///
/// Covariances are normalised by the variance at u = 1, which absorbs any
/// deterministic amplitude; the distance is the relative Frobenius norm.
/// `decreasing` in the diagnostics records whether it falls with ρ.
pub fn lass_tangent_test(
    grid: &TimeGrid,
    ensemble: &[Vec<f64>],
    t0: f64,
    scales: &[f64],
    kappa: f64,
) -> Result<EstimateReport> {
    if ensemble.len() < MIN_ENSEMBLE {
        return Err(Error::InsufficientData(format!(
            "need at least {MIN_ENSEMBLE} paths, got {}",
            ensemble.len()
        )));
    }
    if scales.len() < 3 {
        return Err(Error::InsufficientData("need at least three scales".into()));
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::Domain(format!("tangent index must be in (0, 1], got {kappa}")));
    }
    if ensemble.iter().any(|p| p.len() != grid.n) {
        return Err(Error::Domain("every path must match the grid".into()));
    }
    let k = TANGENT_OFFSETS;
    let us: Vec<f64> = (1..=k).map(|j| j as f64 / k as f64).collect();
    let target: Vec<f64> = us
        .iter()
        .flat_map(|&u| us.iter().map(move |&v| 0.5 * (u.powf(2.0 * kappa) + v.powf(2.0 * kappa) - (u - v).abs().powf(2.0 * kappa))))
        .collect();
    let target_norm = target.iter().map(|c| c * c).sum::<f64>().sqrt();
    let i0 = grid_index(grid, t0)?;
    let n_paths = ensemble.len() as f64;

    let mut local = Vec::new();
    for &rho in scales {
        let idx: Vec<usize> = us.iter().map(|&u| grid_index(grid, t0 + rho * u)).collect::<Result<_>>()?;
        let mut cov = vec![0.0; k * k];
        let mut means = vec![0.0; k];
        for path in ensemble {
            let z: Vec<f64> = idx.iter().map(|&i| path[i] - path[i0]).collect();
            for a in 0..k {
                means[a] += z[a];
                for b in 0..k {
                    cov[a * k + b] += z[a] * z[b];
                }
            }
        }
        for a in 0..k {
            means[a] /= n_paths;
        }
        for a in 0..k {
            for b in 0..k {
                cov[a * k + b] = cov[a * k + b] / n_paths - means[a] * means[b];
            }
        }
        let unit = cov[k * k - 1];
        if unit <= 0.0 {
            return Err(Error::Degenerate(format!("increments vanish at scale {rho}")));
        }
        let dist = cov.iter().zip(&target).map(|(c, t)| (c / unit - t).powi(2)).sum::<f64>().sqrt() / target_norm;
        local.push((rho, dist));
    }
    // entrywise sampling error of a normalised Gaussian covariance
    let noise = target.iter().map(|c| 1.0 + c * c).sum::<f64>().sqrt() / n_paths.sqrt() / target_norm;
    let mut order: Vec<(f64, f64)> = local.clone();
    order.sort_by(|a, b| b.0.total_cmp(&a.0));
    let decreasing = order.windows(2).all(|w| w[1].1 < w[0].1);
    let mut r = EstimateReport::new("lass-tangent");
    r.global_value = order.last().map(|p| p.1);
    r.local_values = Some(local);
    r.confidence_radius = CONFIDENCE_MULTIPLIER * noise;
    r.window = ensemble.len();
    r.note("kappa", kappa);
    r.note("t0", t0);
    r.note("decreasing", decreasing);
    Ok(r)
}

/// Runs [`lass_tangent_test`] for each candidate index and reports the one
/// with the smallest distance at the finest scale.
pub fn lass_best_index(
    grid: &TimeGrid,
    ensemble: &[Vec<f64>],
    t0: f64,
    scales: &[f64],
    candidates: &[f64],
) -> Result<EstimateReport> {
    let mut best: Option<EstimateReport> = None;
    let mut all = Vec::new();
    for &kappa in candidates {
        let r = lass_tangent_test(grid, ensemble, t0, scales, kappa)?;
        let d = r.global_value.unwrap_or(f64::INFINITY);
        all.push(serde_json::json!({ "kappa": kappa, "distance": d }));
        if best.as_ref().is_none_or(|b| d < b.global_value.unwrap_or(f64::INFINITY)) {
            best = Some(r);
        }
    }
    let mut best = best.ok_or_else(|| Error::InsufficientData("no candidate indices".into()))?;
    best.note("candidates", serde_json::Value::Array(all));
    Ok(best)
}
