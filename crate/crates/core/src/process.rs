//! Process specifications and time-varying index functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A continuous, piecewise-linear function of time.
///
/// `Linear` and `Tabulated` are held constant outside their knot range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Profile {
    Constant { value: f64 },
    Linear { v0: f64, v1: f64, t0: f64, t1: f64 },
    Tabulated { knots: Vec<(f64, f64)> },
}

impl Profile {
    pub fn constant(value: f64) -> Self {
        Profile::Constant { value }
    }

    pub fn linear(v0: f64, v1: f64, t0: f64, t1: f64) -> Self {
        Profile::Linear { v0, v1, t0, t1 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Profile::Constant { value } => *value,
            Profile::Linear { v0, v1, t0, t1 } => {
                if t <= *t0 {
                    *v0
                } else if t >= *t1 {
                    *v1
                } else {
                    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
                }
            }
            Profile::Tabulated { knots } => {
                let first = knots[0];
                let last = knots[knots.len() - 1];
                if t <= first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    return last.1;
                }
                let i = knots.partition_point(|k| k.0 <= t);
                let (ta, va) = knots[i - 1];
                let (tb, vb) = knots[i];
                va + (vb - va) * (t - ta) / (tb - ta)
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Profile::Constant { .. } => true,
            Profile::Linear { v0, v1, .. } => v0 == v1,
            Profile::Tabulated { knots } => knots.iter().all(|k| k.1 == knots[0].1),
        }
    }

    /// Times where the slope may change.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Profile::Constant { .. } => Vec::new(),
            Profile::Linear { t0, t1, .. } => vec![*t0, *t1],
            Profile::Tabulated { knots } => knots.iter().map(|k| k.0).collect(),
        }
    }

    /// (min, max) over the whole real line.
    pub fn extrema(&self) -> (f64, f64) {
        match self {
            Profile::Constant { value } => (*value, *value),
            Profile::Linear { v0, v1, .. } => (v0.min(*v1), v0.max(*v1)),
            Profile::Tabulated { knots } => knots
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), k| (lo.min(k.1), hi.max(k.1))),
        }
    }

    fn check_shape(&self, name: &str) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(format!("{name}: {m}")));
        match self {
            Profile::Constant { value } if !value.is_finite() => bad("value must be finite".into()),
            Profile::Linear { v0, v1, t0, t1 } => {
                if ![v0, v1, t0, t1].iter().all(|v| v.is_finite()) {
                    return bad("linear profile needs finite fields".into());
                }
                if !(t1 > t0) {
                    return bad(format!("linear profile needs t1 > t0, got [{t0}, {t1}]"));
                }
                Ok(())
            }
            Profile::Tabulated { knots } => {
                if knots.is_empty() {
                    return bad("tabulated profile needs at least one knot".into());
                }
                if knots.iter().any(|k| !k.0.is_finite() || !k.1.is_finite()) {
                    return bad("knots must be finite".into());
                }
                if knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return bad("knot times must be strictly increasing".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Checks the shape and that all values lie in the open interval (lo, hi).
    pub fn validate_open(&self, name: &str, lo: f64, hi: f64) -> Result<()> {
        self.check_shape(name)?;
        let (min, max) = self.extrema();
        if !(min > lo && max < hi) {
            return Err(Error::InvalidSpec(format!(
                "{name} must stay in ({lo}, {hi}); range is [{min}, {max}]"
            )));
        }
        Ok(())
    }

    /// Minimum of `self + other` over the real line.
    pub fn min_sum(&self, other: &Profile) -> f64 {
        let mut pts = self.breakpoints();
        pts.extend(other.breakpoints());
        if pts.is_empty() {
            pts.push(0.0);
        }
        pts.iter().map(|&t| self.eval(t) + other.eval(t)).fold(f64::INFINITY, f64::min)
    }

    pub fn max_sum(&self, other: &Profile) -> f64 {
        let mut pts = self.breakpoints();
        pts.extend(other.breakpoints());
        if pts.is_empty() {
            pts.push(0.0);
        }
        pts.iter().map(|&t| self.eval(t) + other.eval(t)).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Hurst function H(t) with values in (0, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HurstFunction(pub Profile);

impl HurstFunction {
    pub fn new(profile: Profile) -> Result<Self> {
        profile.validate_open("hurst", 0.0, 1.0)?;
        Ok(Self(profile))
    }

    pub fn constant(h: f64) -> Result<Self> {
        Self::new(Profile::constant(h))
    }

    pub fn at(&self, t: f64) -> f64 {
        self.0.eval(t)
    }
}

/// Fractional order α(t) with values above 1/2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlphaFunction(pub Profile);

impl AlphaFunction {
    pub fn new(profile: Profile) -> Result<Self> {
        profile.validate_open("alpha", 0.5, f64::INFINITY)?;
        Ok(Self(profile))
    }

    pub fn constant(a: f64) -> Result<Self> {
        Self::new(Profile::constant(a))
    }

    pub fn at(&self, t: f64) -> f64 {
        self.0.eval(t)
    }
}

/// One member of the process zoo together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "process", rename_all = "kebab-case")]
pub enum ProcessSpec {
    Fbm { hurst: f64 },
    RlFbm { hurst: f64 },
    Mbm { hurst: HurstFunction },
    RlMbm { hurst: HurstFunction },
    WeylFou { alpha: f64, omega: f64 },
    RlFou { alpha: f64, omega: f64 },
    WeylMou { alpha: AlphaFunction, omega: f64 },
    RlMou { alpha: AlphaFunction, omega: f64 },
    Frbm { alpha: f64, gamma: f64, omega: f64 },
    Mrbm { alpha: Profile, gamma: Profile, omega: f64 },
    Gc { alpha: f64, beta: f64 },
}

fn invalid<T>(msg: String) -> Result<T> {
    Err(Error::InvalidSpec(msg))
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return invalid(format!("omega must be > 0, got {omega}"));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.5 && alpha.is_finite()) {
        return invalid(format!("alpha must be > 1/2, got {alpha}"));
    }
    Ok(())
}

fn check_hurst(h: f64) -> Result<()> {
    if !(h > 0.0 && h < 1.0) {
        return invalid(format!("hurst must be in (0, 1), got {h}"));
    }
    Ok(())
}

fn check_riesz_bessel(alpha: f64, gamma: f64) -> Result<()> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return invalid(format!("alpha must be >= 0, got {alpha}"));
    }
    if !(0.0..0.5).contains(&gamma) {
        return invalid(format!("gamma must be in [0, 1/2), got {gamma}"));
    }
    if !(alpha + gamma > 0.5) {
        return invalid(format!("alpha + gamma must exceed 1/2, got {}", alpha + gamma));
    }
    Ok(())
}

impl ProcessSpec {
    /// Checks every parameter constraint of the chosen family.
    pub fn validate(&self) -> Result<()> {
        match self {
            ProcessSpec::Fbm { hurst } | ProcessSpec::RlFbm { hurst } => check_hurst(*hurst),
            ProcessSpec::Mbm { hurst } | ProcessSpec::RlMbm { hurst } => {
                hurst.0.validate_open("hurst", 0.0, 1.0)
            }
            ProcessSpec::WeylFou { alpha, omega } | ProcessSpec::RlFou { alpha, omega } => {
                check_alpha(*alpha)?;
                check_omega(*omega)
            }
            ProcessSpec::WeylMou { alpha, omega } | ProcessSpec::RlMou { alpha, omega } => {
                alpha.0.validate_open("alpha", 0.5, f64::INFINITY)?;
                check_omega(*omega)
            }
            ProcessSpec::Frbm { alpha, gamma, omega } => {
                check_riesz_bessel(*alpha, *gamma)?;
                check_omega(*omega)
            }
            ProcessSpec::Mrbm { alpha, gamma, omega } => {
                alpha.check_shape("alpha")?;
                gamma.check_shape("gamma")?;
                let (amin, _) = alpha.extrema();
                let (gmin, gmax) = gamma.extrema();
                if amin < 0.0 {
                    return invalid(format!("alpha(t) must be >= 0, min is {amin}"));
                }
                if gmin < 0.0 || gmax >= 0.5 {
                    return invalid(format!("gamma(t) must stay in [0, 1/2), range [{gmin}, {gmax}]"));
                }
                let s = alpha.min_sum(gamma);
                if !(s > 0.5) {
                    return invalid(format!("alpha(t) + gamma(t) must exceed 1/2, min is {s}"));
                }
                check_omega(*omega)
            }
            ProcessSpec::Gc { alpha, beta } => {
                if !(*alpha > 0.0 && *alpha <= 2.0) {
                    return invalid(format!("alpha must be in (0, 2], got {alpha}"));
                }
                if !(*beta > 0.0 && beta.is_finite()) {
                    return invalid(format!("beta must be > 0, got {beta}"));
                }
                Ok(())
            }
        }
    }

    /// Short kebab-case family name.
    pub fn name(&self) -> &'static str {
        match self {
            ProcessSpec::Fbm { .. } => "fbm",
            ProcessSpec::RlFbm { .. } => "rl-fbm",
            ProcessSpec::Mbm { .. } => "mbm",
            ProcessSpec::RlMbm { .. } => "rl-mbm",
            ProcessSpec::WeylFou { .. } => "weyl-fou",
            ProcessSpec::RlFou { .. } => "rl-fou",
            ProcessSpec::WeylMou { .. } => "weyl-mou",
            ProcessSpec::RlMou { .. } => "rl-mou",
            ProcessSpec::Frbm { .. } => "frbm",
            ProcessSpec::Mrbm { .. } => "mrbm",
            ProcessSpec::Gc { .. } => "gc",
        }
    }

    /// Whether the covariance depends on t - s only.
    pub fn is_stationary(&self) -> bool {
        match self {
            ProcessSpec::WeylFou { .. } | ProcessSpec::Frbm { .. } | ProcessSpec::Gc { .. } => true,
            ProcessSpec::WeylMou { alpha, .. } => alpha.0.is_constant(),
            ProcessSpec::Mrbm { alpha, gamma, .. } => alpha.is_constant() && gamma.is_constant(),
            _ => false,
        }
    }

    /// Whether the process is pinned to zero at t = 0.
    pub fn starts_at_zero(&self) -> bool {
        matches!(
            self,
            ProcessSpec::Fbm { .. }
                | ProcessSpec::RlFbm { .. }
                | ProcessSpec::Mbm { .. }
                | ProcessSpec::RlMbm { .. }
                | ProcessSpec::RlFou { .. }
                | ProcessSpec::RlMou { .. }
        )
    }

    /// Whether the family is only defined for t >= 0.
    pub fn one_sided(&self) -> bool {
        self.starts_at_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_interpolation() {
        let p = Profile::linear(0.3, 0.7, 0.0, 1.0);
        assert_eq!(p.eval(-1.0), 0.3);
        assert!((p.eval(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(p.eval(2.0), 0.7);
        let q = Profile::Tabulated { knots: vec![(0.0, 0.2), (1.0, 0.6), (3.0, 0.4)] };
        assert!((q.eval(0.5) - 0.4).abs() < 1e-15);
        assert!((q.eval(2.0) - 0.5).abs() < 1e-15);
        assert_eq!(q.eval(1.0), 0.6);
        assert_eq!(q.extrema(), (0.2, 0.6));
    }

    #[test]
    fn spec_validation() {
        assert!(ProcessSpec::Fbm { hurst: 0.7 }.validate().is_ok());
        assert!(ProcessSpec::Fbm { hurst: 1.0 }.validate().is_err());
        assert!(ProcessSpec::Frbm { alpha: 0.2, gamma: 0.2, omega: 1.0 }.validate().is_err());
        assert!(ProcessSpec::Frbm { alpha: 1.0, gamma: 0.2, omega: 1.0 }.validate().is_ok());
        assert!(ProcessSpec::Gc { alpha: 2.0, beta: 1.0 }.validate().is_ok());
        assert!(ProcessSpec::Gc { alpha: 2.5, beta: 1.0 }.validate().is_err());
        let bad_knots = Profile::Tabulated { knots: vec![(1.0, 0.5), (1.0, 0.6)] };
        assert!(ProcessSpec::Mbm { hurst: HurstFunction(bad_knots) }.validate().is_err());
        let mrbm = ProcessSpec::Mrbm {
            alpha: Profile::linear(0.2, 0.9, 0.0, 1.0),
            gamma: Profile::linear(0.2, 0.1, 0.0, 1.0),
            omega: 1.0,
        };
        // alpha + gamma dips to 0.4 at t = 0
        assert!(mrbm.validate().is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = ProcessSpec::RlMou {
            alpha: AlphaFunction(Profile::linear(1.2, 0.8, 0.0, 2.0)),
            omega: 0.5,
        };
        let s = serde_json::to_string(&spec).unwrap();
        assert!(s.contains("\"process\":\"rl-mou\""), "{s}");
        let back: ProcessSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
    }
}
