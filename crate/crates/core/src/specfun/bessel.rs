//! Modified Bessel function K_ν and the Tricomi confluent function U.
//!
//! K_ν follows the Temme series / Steed continued fraction split used by
//! GSL, with forward recurrence in the order.

use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::double_exp::exp_sinh;
use super::gamma::rgamma;
use super::AccuracyBudget;

// Chebyshev coefficients for the Temme auxiliary functions on [-1, 1].
const G1_DAT: [f64; 14] = [
    -1.145_164_083_662_683_1,
    0.006_360_853_113_470_842,
    0.001_862_451_930_072_068_5,
    0.000_152_833_085_873_453_5,
    0.000_017_017_464_011_802_04,
    -6.459_750_292_334_725e-7,
    -5.181_984_843_251_938e-8,
    4.518_909_289_485_818e-10,
    3.243_322_737_102_087_3e-11,
    6.830_943_402_494_752e-13,
    2.835_350_275_517_21e-14,
    -7.988_390_576_932_359e-16,
    -3.372_667_730_077_195e-17,
    -3.658_633_480_921_052e-20,
];
const G2_DAT: [f64; 15] = [
    1.882_645_524_949_671_8,
    -0.077_490_658_396_167_52,
    -0.018_256_714_847_324_93,
    0.000_633_803_020_907_489_6,
    0.000_076_229_054_350_872_9,
    -9.550_164_756_172_044e-7,
    -8.892_726_810_788_635e-8,
    -1.952_133_477_231_961_4e-9,
    -9.400_305_273_588_516e-11,
    4.687_513_384_953_239e-12,
    2.265_853_574_692_576e-13,
    -1.172_550_969_848_801_5e-15,
    -7.044_133_820_024_522e-17,
    -2.437_787_831_010_769_4e-18,
    -7.522_524_321_825_39e-20,
];

const MAX_ITER: usize = 15_000;

fn cheb_eval(c: &[f64], y: f64) -> f64 {
    let y2 = 2.0 * y;
    let (mut d, mut dd) = (0.0, 0.0);
    for &cj in c[1..].iter().rev() {
        let tmp = d;
        d = y2 * d - dd + cj;
        dd = tmp;
    }
    y * d - dd + 0.5 * c[0]
}

/// (1/Γ(1+ν), 1/Γ(1-ν), g1, g2) for |ν| <= 1/2.
fn temme_gamma(nu: f64) -> (f64, f64, f64, f64) {
    let y = 4.0 * nu.abs() - 1.0;
    let g1 = cheb_eval(&G1_DAT, y);
    let g2 = cheb_eval(&G2_DAT, y);
    (1.0 / (g2 - nu * g1), 1.0 / (g2 + nu * g1), g1, g2)
}

/// e^x K_μ(x), e^x K_{μ+1}(x) for |μ| <= 1/2 and x < 2.
fn scaled_temme(mu: f64, x: f64) -> Result<(f64, f64)> {
    let half_x = 0.5 * x;
    let ln_half_x = half_x.ln();
    let half_x_nu = (mu * ln_half_x).exp();
    let pi_nu = PI * mu;
    let sigma = -mu * ln_half_x;
    let sinrat = if pi_nu.abs() < f64::EPSILON { 1.0 } else { pi_nu / pi_nu.sin() };
    let sinhrat = if sigma.abs() < f64::EPSILON { 1.0 } else { sigma.sinh() / sigma };
    let (g_1pnu, g_1mnu, g1, g2) = temme_gamma(mu);

    let mut fk = sinrat * (sigma.cosh() * g1 - sinhrat * ln_half_x * g2);
    let mut pk = 0.5 / half_x_nu * g_1pnu;
    let mut qk = 0.5 * half_x_nu * g_1mnu;
    let mut ck = 1.0;
    let mut sum0 = fk;
    let mut sum1 = pk;
    for k in 1..=MAX_ITER {
        let k = k as f64;
        fk = (k * fk + pk + qk) / (k * k - mu * mu);
        ck *= half_x * half_x / k;
        pk /= k - mu;
        qk /= k + mu;
        let hk = -k * fk + pk;
        let del0 = ck * fk;
        sum0 += del0;
        sum1 += ck * hk;
        if del0.abs() < 0.5 * sum0.abs() * f64::EPSILON {
            let ex = x.exp();
            return Ok((sum0 * ex, sum1 * 2.0 / x * ex));
        }
    }
    Err(Error::NonConvergence(format!("K series mu={mu} x={x}")))
}

/// e^x K_μ(x), e^x K_{μ+1}(x) for |μ| <= 1/2 and x >= 2 (Steed CF2).
fn scaled_steed(mu: f64, x: f64) -> Result<(f64, f64)> {
    let mut bi = 2.0 * (1.0 + x);
    let mut di = 1.0 / bi;
    let mut delhi = di;
    let mut hi = di;
    let mut qi = 0.0;
    let mut qip1 = 1.0;
    let mut ai = -(0.25 - mu * mu);
    let a1 = ai;
    let mut ci = -ai;
    let mut bqi = -ai;
    let mut s = 1.0 + bqi * delhi;
    let mut converged = false;
    for i in 2..=MAX_ITER {
        ai -= 2.0 * (i - 1) as f64;
        ci = -ai * ci / i as f64;
        let tmp = (qi - bi * qip1) / ai;
        qi = qip1;
        qip1 = tmp;
        bqi += ci * qip1;
        bi += 2.0;
        di = 1.0 / (bi + ai * di);
        delhi *= bi * di - 1.0;
        hi += delhi;
        let dels = bqi * delhi;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(format!("K continued fraction mu={mu} x={x}")));
    }
    hi *= -a1;
    let k_mu = (PI / (2.0 * x)).sqrt() / s;
    Ok((k_mu, k_mu * (mu + x + 0.5 - hi) / x))
}

/// e^x K_ν(x), finite for large x.
pub fn bessel_k_scaled(nu: f64, x: f64) -> Result<f64> {
    if !nu.is_finite() || !x.is_finite() {
        return Err(Error::Domain("bessel_k arguments must be finite".into()));
    }
    if !(x > 0.0) {
        return Err(Error::Domain(format!("bessel_k needs z > 0, got {x}")));
    }
    let nu = nu.abs();
    let n = (nu + 0.5).floor();
    let mu = nu - n;
    let (mut k_nu, mut k_nup1) = if x < 2.0 { scaled_temme(mu, x)? } else { scaled_steed(mu, x)? };
    for j in 0..n as usize {
        let k_num1 = k_nu;
        k_nu = k_nup1;
        k_nup1 = 2.0 * (mu + j as f64 + 1.0) / x * k_nu + k_num1;
        if !k_nup1.is_finite() {
            return Err(Error::Domain(format!("K_{nu}({x}) overflows")));
        }
    }
    Ok(k_nu)
}

/// Modified Bessel function of the second kind K_ν(x), x > 0.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    let v = bessel_k_scaled(nu, x)? * (-x).exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("K_{nu}({x}) overflows")))
    }
}

/// Tricomi confluent hypergeometric function U(a, b, z) for a > 0, z > 0.
pub fn tricomi_psi(a: f64, b: f64, z: f64) -> Result<f64> {
    tricomi_psi_with(a, b, z, &AccuracyBudget::default().tightened(1e3))
}

pub fn tricomi_psi_with(a: f64, b: f64, z: f64, budget: &AccuracyBudget) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(Error::Domain("tricomi_psi arguments must be finite".into()));
    }
    if !(a > 0.0) {
        return Err(Error::Domain(format!("tricomi_psi needs a > 0, got {a}")));
    }
    if !(z > 0.0) {
        return Err(Error::Domain(format!("tricomi_psi needs z > 0, got {z}")));
    }
    if b == a + 1.0 {
        return Ok(z.powf(-a));
    }
    let p = b - a - 1.0;
    let v = if z >= 1.0 {
        // U = z^{-a}/Γ(a) ∫₀^∞ e^{-s} s^{a-1} (1 + s/z)^{b-a-1} ds
        let inv_z = 1.0 / z;
        let integral =
            exp_sinh(|s| (-s + (a - 1.0) * s.ln() + p * (s * inv_z).ln_1p()).exp(), budget)?;
        z.powf(-a) * rgamma(a) * integral
    } else {
        let integral = exp_sinh(|t| (-z * t + (a - 1.0) * t.ln() + p * t.ln_1p()).exp(), budget)?;
        rgamma(a) * integral
    };
    crate::error::finite(v, "tricomi_psi")
}
