//! Double-exponential quadrature used as an evaluation scheme for integral
//! representations (Tricomi U, Humbert Phi1, near-degenerate 2F1).
//!
//! Kept separate from the Gauss-Kronrod engine in `oracle` so that the two
//! sides of each kernel/oracle comparison use different integrators.

use crate::error::{Error, Result};

use super::AccuracyBudget;

const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;
const MAX_LEVEL: usize = 10;
const U_MAX: f64 = 6.0;

/// Integral over [0, 1] by the tanh-sinh rule.
///
/// The integrand receives `(t, 1 - t)` with the complement computed without
/// cancellation, so endpoint factors like `(1 - t)^p` stay accurate.
pub(crate) fn tanh_sinh<F>(f: F, budget: &AccuracyBudget) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    // t = (1 + tanh(v)) / 2 with v = (pi/2) sinh(u); 1 - t = 1 / (1 + e^{2v}).
    let node = |u: f64| -> (f64, f64, f64) {
        let v = HALF_PI * u.sinh();
        let e = (-2.0 * v.abs()).exp();
        let small = e / (1.0 + e);
        let (t, tc) = if v >= 0.0 { (1.0 - small, small) } else { (small, 1.0 - small) };
        let cv = v.cosh();
        let w = HALF_PI * u.cosh() / (2.0 * cv * cv);
        (t, tc, w)
    };
    integrate_levels(node, |t, tc| f(t, tc), budget, "tanh-sinh")
}

/// Integral over [0, inf) by the exp-sinh rule.
pub(crate) fn exp_sinh<F>(f: F, budget: &AccuracyBudget) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let node = |u: f64| -> (f64, f64, f64) {
        let x = (HALF_PI * u.sinh()).exp();
        (x, f64::NAN, HALF_PI * u.cosh() * x)
    };
    integrate_levels(node, |x, _| f(x), budget, "exp-sinh")
}

fn integrate_levels<N, F>(node: N, f: F, budget: &AccuracyBudget, name: &str) -> Result<f64>
where
    N: Fn(f64) -> (f64, f64, f64),
    F: Fn(f64, f64) -> f64,
{
    let eval = |u: f64| -> f64 {
        let (x, xc, w) = node(u);
        // endpoints are never sampled
        if w == 0.0 || x == 0.0 || xc == 0.0 || !x.is_finite() {
            return 0.0;
        }
        let v = f(x, xc) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };

    let mut h = 1.0;
    let first = eval(0.0);
    let mut sum = first;
    let mut l1 = first.abs();
    let mut k = 1usize;
    loop {
        let u = k as f64 * h;
        if u > U_MAX {
            break;
        }
        let (p, m) = (eval(u), eval(-u));
        sum += p + m;
        l1 += p.abs() + m.abs();
        k += 1;
    }
    let mut estimate = sum * h;
    l1 *= h;
    for _level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut add = 0.0;
        let mut add_abs = 0.0;
        let mut k = 1usize;
        loop {
            let u = k as f64 * h;
            if u > U_MAX {
                break;
            }
            let (p, m) = (eval(u), eval(-u));
            add += p + m;
            add_abs += p.abs() + m.abs();
            k += 2;
        }
        add_abs *= 2.0 * h;
        sum += add;
        let next = sum * h;
        let diff = (next - estimate).abs();
        estimate = next;
        l1 = (l1 + add_abs) * 0.5;
        // rounding sets a floor proportional to the L1 norm
        if diff <= budget.rel_tol().max(1e-15) * estimate.abs()
            || diff <= 64.0 * f64::EPSILON * l1
            || diff <= budget.abs_tol()
        {
            return if estimate.is_finite() {
                Ok(estimate)
            } else {
                Err(Error::NonConvergence(format!("{name}: non-finite integral")))
            };
        }
    }
    Err(Error::NonConvergence(format!("{name}: no convergence after {MAX_LEVEL} levels")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_sinh_handles_endpoint_singularities() {
        let b = AccuracyBudget::default();
        // Beta(0.3, 0.6) = Γ(0.3)Γ(0.6)/Γ(0.9)
        let v = tanh_sinh(|t, tc| t.powf(-0.7) * tc.powf(-0.4), &b).unwrap();
        let exact = 4.168_914_178_907_89;
        assert!((v - exact).abs() < 1e-12 * exact, "{v}");
    }

    #[test]
    fn exp_sinh_gamma_integral() {
        let b = AccuracyBudget::default();
        // Γ(0.4)
        let v = exp_sinh(|x| x.powf(-0.6) * (-x).exp(), &b).unwrap();
        let exact = 2.218_159_543_757_688;
        assert!((v - exact).abs() < 1e-12 * exact, "{v}");
    }
}
