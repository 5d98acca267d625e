//! Special functions needed by the closed-form covariance kernels.
//!
//! Everything here is real-valued and evaluated in `f64`. Series and
//! quadrature based routines take an [`AccuracyBudget`]; the plain entry
//! points use [`AccuracyBudget::default`].

mod bessel;
mod double_exp;
mod gamma;
mod hypergeometric;

pub(crate) use double_exp::exp_sinh;
pub(crate) use hypergeometric::one_f_two_abs;

pub use bessel::{bessel_k, bessel_k_scaled, tricomi_psi, tricomi_psi_with};
pub use gamma::{
    digamma, gamma_fn, ln_gamma, lower_incomplete_gamma, lower_incomplete_gamma_with, rgamma,
};
pub use hypergeometric::{
    gauss_2f1, gauss_2f1_with, humbert_phi1, humbert_phi1_scaled, humbert_phi1_scaled_with,
    humbert_phi1_with, one_f_two,
    one_f_two_with,
};

use crate::error::{Error, Result};

/// Tolerances for series summation and numerical integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyBudget {
    rel_tol: f64,
    abs_tol: f64,
    max_terms: usize,
}

impl AccuracyBudget {
    pub fn new(rel_tol: f64, abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !rel_tol.is_finite() {
            return Err(Error::Domain(format!("rel_tol must be > 0, got {rel_tol}")));
        }
        if !(abs_tol >= 0.0) || !abs_tol.is_finite() {
            return Err(Error::Domain(format!("abs_tol must be >= 0, got {abs_tol}")));
        }
        if max_terms < 1 {
            return Err(Error::Domain("max_terms must be >= 1".into()));
        }
        Ok(Self { rel_tol, abs_tol, max_terms })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    /// Same budget with the relative tolerance scaled by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self { rel_tol: (self.rel_tol * factor).max(f64::EPSILON / 4.0), ..*self }
    }

    /// Whether `term` is negligible next to `sum`.
    pub(crate) fn negligible(&self, term: f64, sum: f64) -> bool {
        term.abs() <= self.rel_tol * sum.abs() || term.abs() <= self.abs_tol
    }
}

impl Default for AccuracyBudget {
    fn default() -> Self {
        Self { rel_tol: 1e-15, abs_tol: 0.0, max_terms: 20_000 }
    }
}

/// True when `x` is 0, -1, -2, ...
pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Rising factorial (x)_n.
pub fn pochhammer(x: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (x + k as f64))
}
