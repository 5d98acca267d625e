//! Closed-form variances and covariances for every process family, plus the
//! memory-class and local-regularity predicates.
//!
//! Two-time kernels named `*_cov(.., t, s)` with an `s <= t` precondition
//! report [`Error::Ordering`] otherwise; [`covariance`] sorts its arguments
//! and dispatches on a [`ProcessSpec`].

use std::f64::consts::PI;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::{AlphaFunction, HurstFunction, ProcessSpec, Profile};
use crate::specfun::{
    bessel_k_scaled, exp_sinh, gamma_fn, gauss_2f1, humbert_phi1_scaled, lower_incomplete_gamma,
    one_f_two_abs, rgamma, tricomi_psi, AccuracyBudget,
};

/// Relative rounding-error estimate above which the two-term Riesz-Bessel
/// formula is abandoned for the contour integral.
const FRBM_CANCELLATION_LIMIT: f64 = 1e-12;
/// α + γ - 1/2 this close to an integer is treated as a Γ pole.
const FRBM_POLE_GUARD: f64 = 1e-9;
/// Angle of the rotated integration ray for the Riesz-Bessel contour integral.
const FRBM_RAY_ANGLE: f64 = 1.2;

fn check_hurst(h: f64) -> Result<()> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Domain(format!("H must be in (0, 1), got {h}")));
    }
    Ok(())
}

fn check_fou(alpha: f64, omega: f64) -> Result<()> {
    if !(alpha > 0.5 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must exceed 1/2, got {alpha}")));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("omega must be positive, got {omega}")));
    }
    Ok(())
}

fn check_order(t: f64, s: f64) -> Result<()> {
    if !(t.is_finite() && s.is_finite()) {
        return Err(Error::Domain("times must be finite".into()));
    }
    if s > t {
        return Err(Error::Ordering(format!("expected s <= t, got s = {s}, t = {t}")));
    }
    Ok(())
}

fn check_one_sided(t: f64, s: f64) -> Result<()> {
    check_order(t, s)?;
    if s < 0.0 {
        return Err(Error::Domain(format!("one-sided process needs times >= 0, got {s}")));
    }
    Ok(())
}

/// σ_H² = Γ(1-2H) cos(πH) / (πH), with the removable singularity at
/// H = 1/2 filled in by its limit 1.
pub fn fbm_sigma2(h: f64) -> Result<f64> {
    check_hurst(h)?;
    // Γ(1-2H) cos(πH) = Γ(2-2H) sin(πε) / (2ε), ε = 1/2 - H
    let eps = 0.5 - h;
    let ratio = if eps == 0.0 { PI / 2.0 } else { (PI * eps).sin() / (2.0 * eps) };
    Ok(gamma_fn(2.0 - 2.0 * h)? * ratio / (PI * h))
}

/// FBM covariance σ_H²/2 (|t|^{2H} + |s|^{2H} - |t-s|^{2H}).
pub fn fbm_cov(h: f64, t: f64, s: f64) -> Result<f64> {
    let sigma2 = fbm_sigma2(h)?;
    if t == s {
        return Ok(sigma2 * t.abs().powf(2.0 * h));
    }
    let p = 2.0 * h;
    Ok(0.5 * sigma2 * (t.abs().powf(p) + s.abs().powf(p) - (t - s).abs().powf(p)))
}

/// Covariance of the increments B(t+τ₁) - B(t) and B(t+τ₂) - B(t).
pub fn fbm_increment_cov(h: f64, tau1: f64, tau2: f64) -> Result<f64> {
    fbm_cov(h, tau1, tau2)
}

/// Riemann-Liouville FBM covariance for 0 <= s <= t.
pub fn rl_fbm_cov(h: f64, t: f64, s: f64) -> Result<f64> {
    check_hurst(h)?;
    check_one_sided(t, s)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let g = rgamma(h + 0.5);
    if s == t {
        return Ok(t.powf(2.0 * h) * g * g / (2.0 * h));
    }
    let f = gauss_2f1(1.0, 0.5 - h, 1.5 + h, s / t)?;
    Ok(s.powf(h + 0.5) * t.powf(h - 0.5) * g * g / (h + 0.5) * f)
}

/// Riemann-Liouville MBM covariance for 0 <= s <= t.
pub fn rl_mbm_cov(hurst: &HurstFunction, t: f64, s: f64) -> Result<f64> {
    check_one_sided(t, s)?;
    let (ht, hs) = (hurst.at(t), hurst.at(s));
    check_hurst(ht)?;
    check_hurst(hs)?;
    if ht == hs {
        return rl_fbm_cov(ht, t, s);
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let f = gauss_2f1(1.0, 0.5 - ht, hs + 1.5, s / t)?;
    Ok(f * s.powf(hs + 0.5) * t.powf(ht - 0.5) * rgamma(hs + 0.5) * rgamma(ht + 0.5) / (hs + 0.5))
}

/// Weyl FOU variance Γ(2α-1)(2ω)^{1-2α}/Γ(α)².
pub fn weyl_fou_var(alpha: f64, omega: f64) -> Result<f64> {
    check_fou(alpha, omega)?;
    let g = rgamma(alpha);
    Ok(gamma_fn(2.0 * alpha - 1.0)? * (2.0 * omega).powf(1.0 - 2.0 * alpha) * g * g)
}

/// Weyl FOU covariance at lag τ; even in τ.
pub fn weyl_fou_cov(alpha: f64, omega: f64, tau: f64) -> Result<f64> {
    check_fou(alpha, omega)?;
    if !tau.is_finite() {
        return Err(Error::Domain(format!("lag must be finite, got {tau}")));
    }
    let x = tau.abs();
    if x == 0.0 {
        return weyl_fou_var(alpha, omega);
    }
    let nu = alpha - 0.5;
    let k = bessel_k_scaled(nu, omega * x)?;
    let log_pre = nu * (x / (2.0 * omega)).ln() - omega * x;
    Ok(log_pre.exp() * k * rgamma(alpha) / PI.sqrt())
}

/// Riemann-Liouville FOU variance at time t >= 0.
pub fn rl_fou_var(alpha: f64, omega: f64, t: f64) -> Result<f64> {
    check_fou(alpha, omega)?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    let g = rgamma(alpha);
    let a = 2.0 * alpha - 1.0;
    Ok((2.0 * omega).powf(-a) * lower_incomplete_gamma(a, 2.0 * omega * t)? * g * g)
}

/// Riemann-Liouville FOU covariance for 0 <= s <= t.
pub fn rl_fou_cov(alpha: f64, omega: f64, t: f64, s: f64) -> Result<f64> {
    check_fou(alpha, omega)?;
    check_one_sided(t, s)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    if s == t {
        return rl_fou_var(alpha, omega, t);
    }
    let phi = humbert_phi1_scaled(1.0, 1.0 - alpha, 1.0 + alpha, s / t, 2.0 * omega * s)?;
    // e^{-ω(t+s)} Φ₁ = e^{-ω(t-s)} e^{-2ωs} Φ₁
    let log_pre = -omega * (t - s) + alpha * s.ln() + (alpha - 1.0) * t.ln();
    Ok(log_pre.exp() * rgamma(alpha + 1.0) * rgamma(alpha) * phi)
}

/// Weyl MOU covariance for s <= t.
pub fn weyl_mou_cov(alpha: &AlphaFunction, omega: f64, t: f64, s: f64) -> Result<f64> {
    check_order(t, s)?;
    let (at, as_) = (alpha.at(t), alpha.at(s));
    check_fou(at, omega)?;
    check_fou(as_, omega)?;
    if s == t {
        return weyl_fou_var(at, omega);
    }
    let tau = t - s;
    let u = tricomi_psi(as_, as_ + at, 2.0 * omega * tau)?;
    let log_pre = -omega * tau + (as_ + at - 1.0) * tau.ln();
    Ok(log_pre.exp() * rgamma(at) * u)
}

/// Riemann-Liouville MOU covariance for 0 <= s <= t.
pub fn rl_mou_cov(alpha: &AlphaFunction, omega: f64, t: f64, s: f64) -> Result<f64> {
    check_one_sided(t, s)?;
    let (at, as_) = (alpha.at(t), alpha.at(s));
    check_fou(at, omega)?;
    check_fou(as_, omega)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    if s == t {
        return rl_fou_var(at, omega, t);
    }
    let phi = humbert_phi1_scaled(1.0, 1.0 - at, 1.0 + as_, s / t, 2.0 * omega * s)?;
    let log_pre = -omega * (t - s) + as_ * s.ln() + (at - 1.0) * t.ln();
    Ok(log_pre.exp() * rgamma(at) * rgamma(as_ + 1.0) * phi)
}

fn check_riesz_bessel(alpha: f64, gamma: f64, omega: f64) -> Result<()> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be >= 0, got {alpha}")));
    }
    if !(0.0..0.5).contains(&gamma) {
        return Err(Error::Domain(format!("gamma must be in [0, 1/2), got {gamma}")));
    }
    if !(alpha + gamma > 0.5) {
        return Err(Error::Domain(format!("alpha + gamma must exceed 1/2, got {}", alpha + gamma)));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("omega must be positive, got {omega}")));
    }
    Ok(())
}

/// Riesz-Bessel spectral density 1/(2π |k|^{2γ} (ω²+k²)^α), k != 0.
pub fn frbm_spectral_density(alpha: f64, gamma: f64, omega: f64, k: f64) -> Result<f64> {
    check_riesz_bessel(alpha, gamma, omega)?;
    if k == 0.0 || !k.is_finite() {
        return Err(Error::Domain(format!("frequency must be finite and nonzero, got {k}")));
    }
    let k = k.abs();
    Ok(1.0 / (2.0 * PI * k.powf(2.0 * gamma) * (omega * omega + k * k).powf(alpha)))
}

/// FRBM covariance at lag x.
///
/// Uses the two-term ₁F₂ closed form while its rounding error stays below
/// `FRBM_CANCELLATION_LIMIT`, and a contour-rotated Fourier integral at large
/// ω|x|. Parameters with α + γ - 1/2 an integer are rejected.
pub fn frbm_cov(alpha: f64, gamma: f64, omega: f64, x: f64) -> Result<f64> {
    check_riesz_bessel(alpha, gamma, omega)?;
    if !x.is_finite() {
        return Err(Error::Domain(format!("lag must be finite, got {x}")));
    }
    let nu = alpha + gamma - 0.5;
    if (nu - nu.round()).abs() < FRBM_POLE_GUARD {
        return Err(Error::Unsupported(format!(
            "alpha + gamma - 1/2 = {nu} is an integer (logarithmic case)"
        )));
    }
    let x = x.abs();
    let first_pre = omega.powf(-2.0 * nu) * gamma_fn(0.5 - gamma)? * gamma_fn(nu)? * rgamma(alpha)
        / (2.0 * PI);
    if x == 0.0 {
        return Ok(first_pre);
    }
    if let Some(v) = frbm_two_term(alpha, gamma, omega, x, first_pre)? {
        return Ok(v);
    }
    frbm_ray(alpha, gamma, omega, x)
}

/// Two-term closed form, or `None` when cancellation is too severe.
fn frbm_two_term(alpha: f64, gamma: f64, omega: f64, x: f64, first_pre: f64) -> Result<Option<f64>> {
    let ag = alpha + gamma;
    let z = (0.5 * omega * x).powi(2);
    let budget = AccuracyBudget::default();
    let (f1, a1) = one_f_two_abs(0.5 - gamma, 1.5 - ag, 0.5, z, &budget)?;
    let (f2, a2) = one_f_two_abs(alpha, ag, ag + 0.5, z, &budget)?;
    let second_pre = ((2.0 * ag - 1.0) * x.ln() - 2.0 * ag * 2f64.ln()).exp() * gamma_fn(0.5 - ag)?
        * rgamma(ag)
        / PI.sqrt();
    let t1 = first_pre * f1;
    let t2 = second_pre * f2;
    let v = t1 + t2;
    let scale = (first_pre * a1).abs() + (second_pre * a2).abs();
    let err = 8.0 * f64::EPSILON * scale;
    if v > 0.0 && err <= FRBM_CANCELLATION_LIMIT * v {
        Ok(Some(v))
    } else {
        Ok(None)
    }
}

/// C(x) = (1/π) Re ∫ e^{ikx} k^{-2γ} (ω²+k²)^{-α} dk along the ray
/// k = r e^{iθ}, θ < π/2, where the integrand decays exponentially.
fn frbm_ray(alpha: f64, gamma: f64, omega: f64, x: f64) -> Result<f64> {
    let e = Complex::from_polar(1.0, FRBM_RAY_ANGLE);
    let e2 = e * e;
    let pre = Complex::from_polar(1.0, FRBM_RAY_ANGLE * (1.0 - 2.0 * gamma));
    let w2 = omega * omega;
    let inv_x2 = 1.0 / (x * x);
    let integrand = |v: f64| -> f64 {
        let osc = (Complex::new(0.0, v) * e).exp();
        let bessel = (Complex::new(w2, 0.0) + e2 * (v * v * inv_x2)).powf(-alpha);
        (pre * osc * bessel).re * v.powf(-2.0 * gamma)
    };
    let budget = AccuracyBudget::default().tightened(0.1);
    let integral = exp_sinh(integrand, &budget)?;
    crate::error::finite(x.powf(2.0 * gamma - 1.0) * integral / PI, "frbm_cov")
}

/// Fractional Bessel covariance 2^{1/2-α}/(√π Γ(α)) (|x|/ω)^{α-1/2} K_{α-1/2}(ω|x|),
/// the γ = 0 member of the Riesz-Bessel family.
pub fn fractional_bessel_cov(alpha: f64, omega: f64, x: f64) -> Result<f64> {
    check_fou(alpha, omega)?;
    let x = x.abs();
    if x == 0.0 {
        return weyl_fou_var(alpha, omega);
    }
    let nu = alpha - 0.5;
    let log_pre = -nu * 2f64.ln() + nu * (x / omega).ln() - omega * x;
    Ok(log_pre.exp() * rgamma(alpha) / PI.sqrt() * bessel_k_scaled(nu, omega * x)?)
}

/// MRBM covariance from the harmonizable representation: the spectral
/// amplitudes at t and s multiply, giving the FRBM kernel at the averaged
/// indices.
pub fn mrbm_cov(alpha: &Profile, gamma: &Profile, omega: f64, t: f64, s: f64) -> Result<f64> {
    let a = 0.5 * (alpha.eval(t) + alpha.eval(s));
    let g = 0.5 * (gamma.eval(t) + gamma.eval(s));
    frbm_cov(a, g, omega, t - s)
}

/// Generalized Cauchy covariance (1 + |t|^α)^{-β}.
pub fn gc_cov(alpha: f64, beta: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::Domain(format!("alpha must be in (0, 2], got {alpha}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    Ok((-beta * t.abs().powf(alpha).ln_1p()).exp())
}

/// Covariance of `spec` at (t, s), in either order.
///
/// Standard MBM has no closed form; it reports [`Error::Unsupported`] here
/// and is served by the quadrature oracle instead.
pub fn covariance(spec: &ProcessSpec, t: f64, s: f64) -> Result<f64> {
    let (hi, lo) = if t >= s { (t, s) } else { (s, t) };
    match spec {
        ProcessSpec::Fbm { hurst } => fbm_cov(*hurst, t, s),
        ProcessSpec::RlFbm { hurst } => rl_fbm_cov(*hurst, hi, lo),
        ProcessSpec::Mbm { .. } => {
            Err(Error::Unsupported("standard MBM has no closed-form covariance".into()))
        }
        ProcessSpec::RlMbm { hurst } => rl_mbm_cov(hurst, hi, lo),
        ProcessSpec::WeylFou { alpha, omega } => weyl_fou_cov(*alpha, *omega, t - s),
        ProcessSpec::RlFou { alpha, omega } => rl_fou_cov(*alpha, *omega, hi, lo),
        ProcessSpec::WeylMou { alpha, omega } => weyl_mou_cov(alpha, *omega, hi, lo),
        ProcessSpec::RlMou { alpha, omega } => rl_mou_cov(alpha, *omega, hi, lo),
        ProcessSpec::Frbm { alpha, gamma, omega } => frbm_cov(*alpha, *gamma, *omega, t - s),
        ProcessSpec::Mrbm { alpha, gamma, omega } => mrbm_cov(alpha, gamma, *omega, t, s),
        ProcessSpec::Gc { alpha, beta } => gc_cov(*alpha, *beta, t - s),
    }
}

/// Covariance as a function of lag for stationary specs.
pub fn stationary_covariance(spec: &ProcessSpec, lag: f64) -> Result<f64> {
    if !spec.is_stationary() {
        return Err(Error::NonStationary(format!("{} is not stationary", spec.name())));
    }
    covariance(spec, lag, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Memory {
    Lrd,
    Srd,
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryClass {
    pub class: Memory,
    pub criterion_note: String,
}

fn class(class: Memory, note: impl Into<String>) -> MemoryClass {
    MemoryClass { class, criterion_note: note.into() }
}

/// Long- or short-range dependence of the family, from its parameters.
pub fn memory_class(spec: &ProcessSpec) -> MemoryClass {
    match spec {
        ProcessSpec::Fbm { hurst } | ProcessSpec::RlFbm { hurst } => {
            if *hurst == 0.5 {
                class(Memory::Boundary, "H = 1/2 is Brownian motion")
            } else {
                class(Memory::Lrd, "fractional Brownian family with H != 1/2")
            }
        }
        ProcessSpec::Mbm { hurst } | ProcessSpec::RlMbm { hurst } => {
            if hurst.0.extrema() == (0.5, 0.5) {
                class(Memory::Boundary, "H(t) = 1/2 identically is Brownian motion")
            } else {
                class(Memory::Lrd, "multifractional Brownian motion is long memory")
            }
        }
        ProcessSpec::WeylFou { .. }
        | ProcessSpec::RlFou { .. }
        | ProcessSpec::WeylMou { .. }
        | ProcessSpec::RlMou { .. } => {
            class(Memory::Srd, "Ornstein-Uhlenbeck covariances decay exponentially")
        }
        ProcessSpec::Frbm { gamma, .. } => {
            if *gamma == 0.0 {
                class(Memory::Srd, "gamma = 0 gives the fractional Bessel process")
            } else {
                class(Memory::Lrd, "gamma > 0 gives a |k|^{-2 gamma} pole at zero frequency")
            }
        }
        ProcessSpec::Mrbm { alpha, gamma, .. } => {
            let (gmin, gmax) = gamma.extrema();
            let (amin, _) = alpha.extrema();
            if gmax == 0.0 && amin > 0.5 {
                class(Memory::Srd, "gamma(t) = 0 with alpha(t) bounded above 1/2")
            } else if gmin > 0.0 && gmax < 0.5 && alpha.min_sum(gamma) > 0.5 {
                class(Memory::Lrd, "gamma(t) bounded inside (0, 1/2) with alpha + gamma > 1/2")
            } else {
                class(Memory::Boundary, "neither sufficient condition on alpha(t), gamma(t) holds")
            }
        }
        ProcessSpec::Gc { alpha, beta } => {
            let ab = alpha * beta;
            if ab <= 1.0 {
                class(Memory::Lrd, format!("alpha * beta = {ab} <= 1"))
            } else {
                class(Memory::Srd, format!("alpha * beta = {ab} > 1"))
            }
        }
    }
}

/// Tangent FBM index and local graph dimension at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalRegularity {
    pub tangent_index: f64,
    pub local_dimension: f64,
    pub warning: Option<String>,
}

/// Tangent index and local dimension of `spec` at `t0`.
///
/// For the generalized Cauchy family the published values (α, 5/2 - α) are
/// returned; the local expansion 1 - β|t|^α suggests α/2 instead, and the
/// warning says so.
pub fn local_regularity(spec: &ProcessSpec, t0: f64) -> LocalRegularity {
    let (index, dim, mut warning) = match spec {
        ProcessSpec::Fbm { hurst } | ProcessSpec::RlFbm { hurst } => (*hurst, 2.0 - hurst, None),
        ProcessSpec::Mbm { hurst } | ProcessSpec::RlMbm { hurst } => {
            let h = hurst.at(t0);
            (h, 2.0 - h, None)
        }
        ProcessSpec::WeylFou { alpha, .. } | ProcessSpec::RlFou { alpha, .. } => {
            (alpha - 0.5, 2.5 - alpha, None)
        }
        ProcessSpec::WeylMou { alpha, .. } | ProcessSpec::RlMou { alpha, .. } => {
            let a = alpha.at(t0);
            (a - 0.5, 2.5 - a, None)
        }
        ProcessSpec::Frbm { alpha, gamma, .. } => {
            (alpha + gamma - 0.5, 2.5 - alpha - gamma, None)
        }
        ProcessSpec::Mrbm { alpha, gamma, .. } => {
            let s = alpha.eval(t0) + gamma.eval(t0);
            (s - 0.5, 2.5 - s, None)
        }
        ProcessSpec::Gc { alpha, .. } => (
            *alpha,
            2.5 - alpha,
            Some(format!(
                "published tangent index alpha; the expansion 1 - beta|t|^alpha implies alpha/2 = {}",
                alpha / 2.0
            )),
        ),
    };
    if !(index > 0.0 && index < 1.0) {
        let msg = format!("tangent index {index} lies outside (0, 1): model inconsistency");
        warning = Some(match warning {
            Some(w) => format!("{w}; {msg}"),
            None => msg,
        });
    }
    LocalRegularity { tangent_index: index, local_dimension: dim, warning }
}

pub fn tangent_index(spec: &ProcessSpec, t0: f64) -> f64 {
    local_regularity(spec, t0).tangent_index
}

pub fn local_dimension(spec: &ProcessSpec, t0: f64) -> f64 {
    local_regularity(spec, t0).local_dimension
}

/// Kernels exactly as typeset in the source formulas, kept as negative
/// controls for the corrected versions above.
pub mod printed {
    use super::*;

    /// RL-MBM with t^{H(s)+1/2} and a (2H(s)+1) denominator.
    pub fn rl_mbm_cov(hurst: &HurstFunction, t: f64, s: f64) -> Result<f64> {
        check_one_sided(t, s)?;
        let (ht, hs) = (hurst.at(t), hurst.at(s));
        if s == 0.0 {
            return Ok(0.0);
        }
        let f = gauss_2f1(1.0, 0.5 - ht, hs + 1.5, s / t)?;
        Ok(f * s.powf(hs + 0.5) * t.powf(hs + 0.5) * rgamma(hs + 0.5) * rgamma(ht + 0.5)
            / (2.0 * hs + 1.0))
    }

    /// RL-MOU with Γ(α(s)+1)Γ(α(s)) in the denominator.
    pub fn rl_mou_cov(alpha: &AlphaFunction, omega: f64, t: f64, s: f64) -> Result<f64> {
        check_one_sided(t, s)?;
        let (at, as_) = (alpha.at(t), alpha.at(s));
        if s == 0.0 {
            return Ok(0.0);
        }
        let phi = humbert_phi1_scaled(1.0, 1.0 - at, 1.0 + as_, s / t, 2.0 * omega * s)?;
        let log_pre = -omega * (t - s) + as_ * s.ln() + (at - 1.0) * t.ln();
        Ok(log_pre.exp() * rgamma(as_) * rgamma(as_ + 1.0) * phi)
    }
}
