//! Exact Gaussian sample paths on uniform time grids.
//!
//! A [`Sampler`] does the expensive setup once (factorization, embedding
//! spectrum, moving-average weights) and then produces any number of paths,
//! each a deterministic function of its seed. Ensembles derive one seed per
//! replicate with [`derive_subseed`].

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels;
use crate::oracle::{covariance_or_oracle, QuadratureConfig};
use crate::process::{HurstFunction, ProcessSpec};
use crate::rng::NormalStream;
pub use crate::rng::derive_subseed;
use crate::specfun::rgamma;

/// Jitter multipliers of the largest diagonal entry, tried in order.
pub const JITTER_LADDER: [f64; 6] = [0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8];
/// Circulant embeddings grow up to this multiple of the grid size.
pub const MAX_EMBEDDING_FACTOR: usize = 1 << 14;
/// Negative embedding eigenvalues down to this fraction of the spectrum's
/// l1 scale are clipped to zero.
pub const EIGENVALUE_CLIP: f64 = 1e-10;
/// Relative truncation bias of the moving-average sampler that triggers a
/// warning.
pub const TRUNCATION_WARNING: f64 = 1e-3;

/// Uniform grid start + i·step, i = 0..n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub start: f64,
    pub step: f64,
    pub n: usize,
}

impl TimeGrid {
    pub fn new(start: f64, step: f64, n: usize) -> Result<Self> {
        let g = Self { start, step, n };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.start.is_finite() {
            return Err(Error::InvalidSpec("grid start must be finite".into()));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidSpec(format!("grid step must be positive, got {}", self.step)));
        }
        if self.n == 0 {
            return Err(Error::InvalidSpec("grid needs at least one point".into()));
        }
        if !self.end().is_finite() {
            return Err(Error::InvalidSpec("grid end overflows".into()));
        }
        Ok(())
    }

    pub fn time(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.time(self.n.saturating_sub(1))
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.time(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Cholesky,
    Circulant,
    MovingAverage,
}

/// How a sampler was set up.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SamplerDiagnostics {
    /// Jitter added to the diagonal, as a multiple of its largest entry.
    pub jitter: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedding_size: Option<usize>,
    /// Bound on the variance lost to truncating the moving average, relative
    /// to the target variance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_bias: Option<f64>,
    pub warnings: Vec<String>,
}

/// One realisation with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub spec: ProcessSpec,
    pub seed: u64,
    pub method: Method,
    pub diagnostics: SamplerDiagnostics,
}

/// Kernel Gram matrix on a set of times.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    pub times: Vec<f64>,
    pub matrix: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Evaluates the covariance of `spec` at every pair of `times`; standard
    /// MBM entries come from the quadrature oracle.
    pub fn new(spec: &ProcessSpec, times: &[f64]) -> Result<Self> {
        spec.validate()?;
        let n = times.len();
        let cfg = QuadratureConfig::default();
        let mut matrix = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = covariance_or_oracle(spec, times[i], times[j], &cfg)?;
                matrix[(i, j)] = v;
                matrix[(j, i)] = v;
            }
        }
        Ok(Self { times: times.to_vec(), matrix })
    }

    pub fn max_diagonal(&self) -> f64 {
        self.matrix.diagonal().iter().fold(0.0, |m, &v| m.max(v))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.matrix.clone()).eigenvalues.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }
}

struct CholeskyFactor {
    /// Rows with nonzero variance.
    active: Vec<usize>,
    lower: DMatrix<f64>,
}

struct Circulant {
    n: usize,
    m: usize,
    sqrt_eig: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl Circulant {
    /// Smallest doubling of the minimal embedding with a nonnegative
    /// spectrum, or `None` when even the largest allowed one fails.
    fn build(acf: &dyn Fn(usize) -> Result<f64>, n: usize) -> Result<Option<Self>> {
        let mut m = 2 * (n - 1).max(1);
        let mut lags: Vec<f64> = Vec::new();
        let mut planner = FftPlanner::new();
        while m <= MAX_EMBEDDING_FACTOR * n {
            while lags.len() <= m / 2 {
                lags.push(acf(lags.len())?);
            }
            let mut row: Vec<Complex64> =
                (0..m).map(|k| Complex64::new(lags[k.min(m - k)], 0.0)).collect();
            let fft = planner.plan_fft_forward(m);
            fft.process(&mut row);
            let l1: f64 = row.iter().map(|c| c.re.abs()).sum();
            let min = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
            if min >= -EIGENVALUE_CLIP * l1 {
                let sqrt_eig = row.iter().map(|c| (c.re.max(0.0) / m as f64).sqrt()).collect();
                return Ok(Some(Self { n, m, sqrt_eig, fft }));
            }
            m *= 2;
        }
        Ok(None)
    }

    fn sample(&self, rng: &mut NormalStream) -> Vec<f64> {
        let mut z: Vec<Complex64> =
            self.sqrt_eig.iter().map(|&s| Complex64::new(s * rng.normal(), s * rng.normal())).collect();
        self.fft.process(&mut z);
        z[..self.n].iter().map(|c| c.re).collect()
    }
}

/// Moving-average discretization of the Mandelbrot-Van Ness integral with
/// a time-dependent exponent.
///
/// White noise lives on cells: the grid cells on (0, t_max], uniform cells
/// on [-t_max, 0) refined geometrically towards 0, and geometrically growing
/// cells beyond -t_max. Each kernel enters through its exact cell average,
/// except on the cell ending at its own time, where the pair (cell
/// increment, kernel integral) is drawn exactly.
struct MovingAverage {
    n: usize,
    step: f64,
    exps: Vec<f64>,
    norms: Vec<f64>,
    /// Negative-time cells (lo, hi).
    cells: Vec<(f64, f64)>,
    /// Per time i >= 1: loadings of the exact pair on (ξ1_i, ξ2_i).
    hybrid: Vec<(f64, f64)>,
    weights: Option<Vec<f64>>,
}

/// Cells beyond -t_max grow by this factor.
const TAIL_GROWTH: f64 = 1.1;
/// The moving average is truncated at this multiple of the grid length.
const TAIL_HORIZON: f64 = 1e12;
/// Cells near 0 shrink by this factor.
const ZERO_REFINEMENT: f64 = std::f64::consts::SQRT_2;
/// Largest weight matrix kept in memory, in entries.
const MAX_CACHED_WEIGHTS: usize = 1 << 22;

impl MovingAverage {
    fn new(hurst: &HurstFunction, grid: &TimeGrid) -> Result<(Self, f64)> {
        if grid.start != 0.0 {
            return Err(Error::Domain("the moving-average sampler needs a grid starting at 0".into()));
        }
        let n = grid.n;
        let step = grid.step;
        let t_max = grid.end().max(step);
        let exps: Vec<f64> = (0..n).map(|i| hurst.at(grid.time(i)) - 0.5).collect();
        for &a in &exps {
            if !(a > -0.5 && a < 0.5) {
                return Err(Error::Domain(format!("H must be in (0, 1), got {}", a + 0.5)));
            }
        }
        let norms: Vec<f64> = exps.iter().map(|&a| rgamma(a + 1.0)).collect();
        let h_min = exps.iter().fold(1.0f64, |m, &a| m.min(a + 0.5));

        let mut cells = Vec::new();
        // [-step, 0] refined until the remainder carries a 1e-8 share
        let levels = ((8.0 * 10f64.ln()) / (2.0 * h_min * ZERO_REFINEMENT.ln())).ceil().min(4000.0) as usize;
        let mut hi = 0.0;
        let mut lo = -step * ZERO_REFINEMENT.powi(-(levels as i32));
        cells.push((lo, hi));
        for _ in 0..levels {
            hi = lo;
            lo = hi * ZERO_REFINEMENT;
            cells.push((lo, hi));
        }
        let uniform = (t_max / step).ceil() as usize;
        for k in 1..uniform.max(1) {
            cells.push((-(k as f64 + 1.0) * step, -(k as f64) * step));
        }
        let mut edge = -(uniform.max(1) as f64) * step;
        let horizon = -TAIL_HORIZON * t_max;
        while edge > horizon {
            let next = edge * TAIL_GROWTH;
            cells.push((next, edge));
            edge = next;
        }
        let truncation = -edge;

        let hybrid = (0..n)
            .map(|i| {
                let a = exps[i];
                let var = step.powf(1.0 + 2.0 * a) / (1.0 + 2.0 * a);
                let cov = step.powf(1.0 + a) / (1.0 + a);
                let c1 = cov / step.sqrt();
                (c1, (var - c1 * c1).max(0.0).sqrt())
            })
            .collect();

        // lost variance beyond the horizon: (a t)^2 T^{2a-1} / (1-2a), relative
        // to the variance σ_H² t^{2H} of the normalised integral
        let mut bias: f64 = 0.0;
        for i in 1..n {
            let (a, t) = (exps[i], grid.time(i));
            let lost = (a * t).powi(2) * truncation.powf(2.0 * a - 1.0) / (1.0 - 2.0 * a);
            let target = kernels::fbm_sigma2(a + 0.5)? * t.powf(2.0 * a + 1.0) / norms[i].powi(2);
            bias = bias.max(lost / target);
        }

        let mut ma = Self { n, step, exps, norms, cells, hybrid, weights: None };
        let width = ma.width();
        if n * width <= MAX_CACHED_WEIGHTS {
            let mut w = Vec::with_capacity(n * width);
            for i in 0..n {
                w.extend(ma.row(i));
            }
            ma.weights = Some(w);
        }
        Ok((ma, bias))
    }

    /// Normals per path: (ξ1, ξ2) per grid cell, then one per negative cell.
    fn width(&self) -> usize {
        2 * (self.n - 1) + self.cells.len()
    }

    fn row(&self, i: usize) -> Vec<f64> {
        let mut w = vec![0.0; self.width()];
        if i == 0 {
            return w;
        }
        let a = self.exps[i];
        let t = i as f64 * self.step;
        let norm = self.norms[i];
        let sq = self.step.sqrt();
        let pa = self.step.powf(a) / (a + 1.0);
        for j in 1..i {
            // average of (t_i - u)^a over [t_{j-1}, t_j]
            let d = (i - j) as f64;
            w[j - 1] = norm * pa * ((d + 1.0).powf(a + 1.0) - d.powf(a + 1.0)) * sq;
        }
        let (c1, c2) = self.hybrid[i];
        w[i - 1] = norm * c1;
        w[self.n - 1 + i - 1] = norm * c2;
        let base = 2 * (self.n - 1);
        for (k, &(lo, hi)) in self.cells.iter().enumerate() {
            let width = hi - lo;
            w[base + k] = norm * cell_average(t, a, lo, hi) * width.sqrt();
        }
        w
    }

    fn sample(&self, rng: &mut NormalStream) -> Vec<f64> {
        let width = self.width();
        let z: Vec<f64> = (0..width).map(|_| rng.normal()).collect();
        let dot = |row: &[f64]| row.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>();
        match &self.weights {
            Some(w) => (0..self.n).map(|i| dot(&w[i * width..(i + 1) * width])).collect(),
            None => (0..self.n).map(|i| dot(&self.row(i))).collect(),
        }
    }
}

/// Average over [lo, hi] ⊂ (-∞, 0] of (t - u)^a - (-u)^a.
fn cell_average(t: f64, a: f64, lo: f64, hi: f64) -> f64 {
    let width = hi - lo;
    if -hi > 4.0 * t {
        // far cells: 5-point Gauss-Legendre on the cancellation-free form
        const X: [f64; 5] = [0.0, -0.538469310105683, 0.538469310105683, -0.906179845938664, 0.906179845938664];
        const W: [f64; 5] = [0.568888888888889, 0.478628670499366, 0.478628670499366, 0.236926885056189, 0.236926885056189];
        let c = 0.5 * (lo + hi);
        return X
            .iter()
            .zip(W)
            .map(|(x, w)| {
                let r = -(c + 0.5 * width * x);
                w * r.powf(a) * (a * (t / r).ln_1p()).exp_m1()
            })
            .sum::<f64>()
            * 0.5;
    }
    let p = a + 1.0;
    ((t - lo).powf(p) - (t - hi).powf(p) - (-lo).powf(p) + (-hi).powf(p)) / (p * width)
}

enum Engine {
    Cholesky(CholeskyFactor),
    Circulant(Circulant),
    /// FBM as cumulative sums of circulant fractional Gaussian noise.
    Fgn(Circulant),
    MovingAverage(MovingAverage),
    Zero,
}

/// Reusable sampler for one (spec, grid) pair.
pub struct Sampler {
    spec: ProcessSpec,
    grid: TimeGrid,
    method: Method,
    diagnostics: SamplerDiagnostics,
    engine: Engine,
}

impl Sampler {
    /// Picks the method by family: FGN sums for FBM on grids from 0, the
    /// moving average for MBM, circulant embedding for stationary families,
    /// Cholesky otherwise.
    pub fn new(spec: &ProcessSpec, grid: &TimeGrid) -> Result<Self> {
        match spec {
            ProcessSpec::Fbm { hurst } if grid.start == 0.0 => Self::fbm_from_fgn(*hurst, grid),
            ProcessSpec::Mbm { hurst } => Self::mbm_moving_average(hurst, grid),
            s if s.is_stationary() => Self::circulant(spec, grid),
            _ => Self::cholesky(spec, grid),
        }
    }

    pub fn cholesky(spec: &ProcessSpec, grid: &TimeGrid) -> Result<Self> {
        grid.validate()?;
        let cov = CovarianceMatrix::new(spec, &grid.times())?;
        let active: Vec<usize> = (0..grid.n).filter(|&i| cov.matrix[(i, i)] != 0.0).collect();
        let mut diagnostics = SamplerDiagnostics::default();
        if active.is_empty() {
            return Ok(Self::build(spec, grid, Method::Cholesky, diagnostics, Engine::Zero));
        }
        let sub = cov.matrix.select_rows(&active).select_columns(&active);
        let max_diag = sub.diagonal().iter().fold(0.0f64, |m, &v| m.max(v));
        for jitter in JITTER_LADDER {
            let mut m = sub.clone();
            for i in 0..m.nrows() {
                m[(i, i)] += jitter * max_diag;
            }
            if let Some(ch) = m.cholesky() {
                diagnostics.jitter = jitter;
                if jitter > 0.0 {
                    diagnostics.warnings.push(format!("added jitter {jitter:e} x max diagonal"));
                }
                let engine = Engine::Cholesky(CholeskyFactor { active, lower: ch.l() });
                return Ok(Self::build(spec, grid, Method::Cholesky, diagnostics, engine));
            }
        }
        let min_eigenvalue = SymmetricEigen::new(sub).eigenvalues.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        Err(Error::Factorization {
            min_eigenvalue,
            reason: format!("not positive definite even with jitter {:e} x max diagonal", JITTER_LADDER[5]),
        })
    }

    /// Circulant embedding for stationary specs, falling back to Cholesky
    /// with a warning when no embedding up to the size limit is nonnegative.
    pub fn circulant(spec: &ProcessSpec, grid: &TimeGrid) -> Result<Self> {
        grid.validate()?;
        spec.validate()?;
        if !spec.is_stationary() {
            return Err(Error::NonStationary(format!("{} is not stationary", spec.name())));
        }
        if grid.n < 2 {
            return Self::cholesky(spec, grid);
        }
        let step = grid.step;
        let acf = |k: usize| kernels::stationary_covariance(spec, k as f64 * step);
        match Circulant::build(&acf, grid.n)? {
            Some(c) => {
                let diagnostics = SamplerDiagnostics { embedding_size: Some(c.m), ..Default::default() };
                Ok(Self::build(spec, grid, Method::Circulant, diagnostics, Engine::Circulant(c)))
            }
            None => {
                let mut s = Self::cholesky(spec, grid)?;
                s.diagnostics
                    .warnings
                    .insert(0, "circulant embedding not nonnegative; fell back to Cholesky".into());
                Ok(s)
            }
        }
    }

    /// FBM on a grid from 0 as the cumulative sum of fractional Gaussian
    /// noise drawn by circulant embedding.
    pub fn fbm_from_fgn(h: f64, grid: &TimeGrid) -> Result<Self> {
        grid.validate()?;
        let spec = ProcessSpec::Fbm { hurst: h };
        spec.validate()?;
        if grid.start != 0.0 {
            return Err(Error::Domain("FGN summation needs a grid starting at 0".into()));
        }
        if grid.n == 1 {
            return Ok(Self::build(&spec, grid, Method::Circulant, SamplerDiagnostics::default(), Engine::Zero));
        }
        let scale = 0.5 * kernels::fbm_sigma2(h)? * grid.step.powf(2.0 * h);
        let p = 2.0 * h;
        let acf = |k: usize| -> Result<f64> {
            let k = k as f64;
            Ok(scale * ((k + 1.0).powf(p) - 2.0 * k.powf(p) + (k - 1.0).abs().powf(p)))
        };
        match Circulant::build(&acf, grid.n - 1)? {
            Some(c) => {
                let diagnostics = SamplerDiagnostics { embedding_size: Some(c.m), ..Default::default() };
                Ok(Self::build(&spec, grid, Method::Circulant, diagnostics, Engine::Fgn(c)))
            }
            None => {
                let mut s = Self::cholesky(&spec, grid)?;
                s.diagnostics.warnings.insert(0, "FGN embedding not nonnegative; fell back to Cholesky".into());
                Ok(s)
            }
        }
    }

    /// MBM by moving-average discretization on a grid from 0, normalised so
    /// that Var B(t) = σ²_{H(t)} t^{2H(t)}.
    pub fn mbm_moving_average(hurst: &HurstFunction, grid: &TimeGrid) -> Result<Self> {
        grid.validate()?;
        let spec = ProcessSpec::Mbm { hurst: hurst.clone() };
        spec.validate()?;
        let (ma, bias) = MovingAverage::new(hurst, grid)?;
        let mut diagnostics = SamplerDiagnostics { truncation_bias: Some(bias), ..Default::default() };
        if bias > TRUNCATION_WARNING {
            diagnostics.warnings.push(format!("relative truncation bias up to {bias:e}"));
        }
        Ok(Self::build(&spec, grid, Method::MovingAverage, diagnostics, Engine::MovingAverage(ma)))
    }

    fn build(spec: &ProcessSpec, grid: &TimeGrid, method: Method, diagnostics: SamplerDiagnostics, engine: Engine) -> Self {
        Self { spec: spec.clone(), grid: *grid, method, diagnostics, engine }
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn diagnostics(&self) -> &SamplerDiagnostics {
        &self.diagnostics
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Raw values of one path.
    pub fn sample_values(&self, seed: u64) -> Vec<f64> {
        let mut rng = NormalStream::new(seed);
        let n = self.grid.n;
        match &self.engine {
            Engine::Zero => vec![0.0; n],
            Engine::Cholesky(f) => {
                let z = DVector::from_fn(f.active.len(), |_, _| rng.normal());
                let x = &f.lower * z;
                let mut out = vec![0.0; n];
                for (k, &i) in f.active.iter().enumerate() {
                    out[i] = x[k];
                }
                out
            }
            Engine::Circulant(c) => c.sample(&mut rng),
            Engine::Fgn(c) => {
                let inc = c.sample(&mut rng);
                let mut out = Vec::with_capacity(n);
                let mut acc = 0.0;
                out.push(0.0);
                for d in inc {
                    acc += d;
                    out.push(acc);
                }
                out
            }
            Engine::MovingAverage(m) => m.sample(&mut rng),
        }
    }

    pub fn sample(&self, seed: u64) -> SamplePath {
        SamplePath {
            grid: self.grid,
            values: self.sample_values(seed),
            spec: self.spec.clone(),
            seed,
            method: self.method,
            diagnostics: self.diagnostics.clone(),
        }
    }

    /// `count` replicates; replicate i uses `derive_subseed(seed, i)`.
    pub fn ensemble_values(&self, seed: u64, count: usize) -> Vec<Vec<f64>> {
        let one = |i: usize| self.sample_values(derive_subseed(seed, i as u64));
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            (0..count).into_par_iter().map(one).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..count).map(one).collect()
        }
    }

    pub fn ensemble(&self, seed: u64, count: usize) -> Vec<SamplePath> {
        self.ensemble_values(seed, count)
            .into_iter()
            .enumerate()
            .map(|(i, values)| SamplePath {
                grid: self.grid,
                values,
                spec: self.spec.clone(),
                seed: derive_subseed(seed, i as u64),
                method: self.method,
                diagnostics: self.diagnostics.clone(),
            })
            .collect()
    }
}

/// One path by Cholesky factorization of the kernel Gram matrix.
pub fn cholesky_sample(spec: &ProcessSpec, grid: &TimeGrid, seed: u64) -> Result<SamplePath> {
    Ok(Sampler::cholesky(spec, grid)?.sample(seed))
}

/// One path of a stationary spec by circulant embedding.
pub fn circulant_sample(spec: &ProcessSpec, grid: &TimeGrid, seed: u64) -> Result<SamplePath> {
    Ok(Sampler::circulant(spec, grid)?.sample(seed))
}

/// One FBM path as cumulative fractional Gaussian noise.
pub fn fbm_from_fgn(h: f64, grid: &TimeGrid, seed: u64) -> Result<SamplePath> {
    Ok(Sampler::fbm_from_fgn(h, grid)?.sample(seed))
}

/// One MBM path by moving-average discretization.
pub fn mbm_moving_average_sample(hurst: &HurstFunction, grid: &TimeGrid, seed: u64) -> Result<SamplePath> {
    Ok(Sampler::mbm_moving_average(hurst, grid)?.sample(seed))
}

/// One path with the default method for the family.
pub fn sample(spec: &ProcessSpec, grid: &TimeGrid, seed: u64) -> Result<SamplePath> {
    Ok(Sampler::new(spec, grid)?.sample(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::Profile;

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 0.0, 4).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0).is_err());
        let g = TimeGrid::new(1.0, 0.5, 3).unwrap();
        assert_eq!(g.times(), vec![1.0, 1.5, 2.0]);
    }

    #[test]
    fn deterministic_paths() {
        let g = TimeGrid::new(0.0, 0.01, 64).unwrap();
        let spec = ProcessSpec::Fbm { hurst: 0.7 };
        let a = sample(&spec, &g, 42).unwrap();
        let b = sample(&spec, &g, 42).unwrap();
        assert_eq!(a.values, b.values);
        assert_ne!(a.values, sample(&spec, &g, 43).unwrap().values);
        assert_eq!(a.values[0], 0.0);
    }

    #[test]
    fn rl_path_starts_at_zero() {
        let g = TimeGrid::new(0.0, 0.1, 16).unwrap();
        let p = cholesky_sample(&ProcessSpec::RlFbm { hurst: 0.3 }, &g, 1).unwrap();
        assert_eq!(p.values[0], 0.0);
        assert!(p.values[1..].iter().all(|v| *v != 0.0));
    }

    #[test]
    fn fgn_embedding_is_nonnegative() {
        let g = TimeGrid::new(0.0, 1.0, 1025).unwrap();
        let s = Sampler::fbm_from_fgn(0.7, &g).unwrap();
        assert_eq!(s.method(), Method::Circulant);
        assert_eq!(s.diagnostics().embedding_size, Some(2046));
    }

    #[test]
    fn fallback_is_reported() {
        // GC with α = 2 is smooth enough that small embeddings go negative
        let g = TimeGrid::new(0.0, 0.05, 64).unwrap();
        let s = Sampler::circulant(&ProcessSpec::Gc { alpha: 2.0, beta: 1.0 }, &g).unwrap();
        assert!(s.method() == Method::Circulant || !s.diagnostics().warnings.is_empty());
    }

    #[test]
    fn mbm_variance_and_zero_start() {
        let hurst = HurstFunction::new(Profile::linear(0.3, 0.7, 0.0, 1.0)).unwrap();
        let g = TimeGrid::new(0.0, 1.0 / 31.0, 32).unwrap();
        let s = Sampler::mbm_moving_average(&hurst, &g).unwrap();
        let paths = s.ensemble_values(9, 4000);
        assert!(paths.iter().all(|p| p[0] == 0.0));
        for i in [1usize, 8, 31] {
            let t = g.time(i);
            let h = hurst.at(t);
            let target = kernels::fbm_sigma2(h).unwrap() * t.powf(2.0 * h);
            let var = paths.iter().map(|p| p[i] * p[i]).sum::<f64>() / paths.len() as f64;
            assert!((var / target - 1.0).abs() < 0.1, "{i}: {var} vs {target}");
        }
    }

    #[test]
    fn moving_average_weights_match_oracle_covariance() {
        // covariance implied by the weights against the oracle
        let hurst = HurstFunction::new(Profile::linear(0.25, 0.75, 0.0, 1.0)).unwrap();
        let g = TimeGrid::new(0.0, 1.0 / 15.0, 16).unwrap();
        let (ma, _) = MovingAverage::new(&hurst, &g).unwrap();
        let cfg = QuadratureConfig::default();
        for &(i, j) in &[(1usize, 1usize), (15, 15), (15, 1), (8, 7), (4, 12)] {
            let (ri, rj) = (ma.row(i), ma.row(j));
            let implied: f64 = ri.iter().zip(&rj).map(|(a, b)| a * b).sum();
            let exact = crate::oracle::oracle_mbm_cov(&hurst, g.time(i), g.time(j), &cfg).unwrap().value;
            assert!((implied / exact - 1.0).abs() < 0.01, "({i},{j}): {implied} vs {exact}");
        }
    }
}
