//! The rank-one Dunkl transform
//!
//! ```text
//! D_k f(ξ) = (1/M_k) ∫_ℝ f(x) E_k(x, -iξ) dμ_k(x),   dμ_k = 2^k |x|^{2k} dx,
//! ```
//!
//! normalized by the Gaussian mass `M_k = 2^{2k+1/2} Γ(k+1/2)` so that the
//! Gaussian `e^{-x²/2}` is a fixed point and the transform is unitary on
//! `L²(dμ_k)`.

use num::complex::Complex64;
use thiserror::Error;

use crate::kernel::{KernelError, Rank1Kernel};
use crate::quadrature::{radial_power_rule, QuadratureError};
use crate::special::gamma;

#[derive(Debug, Error)]
pub enum TransformError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Gaussian mass of the rank-one measure: `M_k = 2^{2k+1/2} Γ(k+1/2)`.
pub fn gaussian_mass(k: f64) -> f64 {
    2f64.powf(2.0 * k + 0.5) * gamma(k + 0.5)
}

/// Full-line rule for `∫_ℝ g(x) 2^k |x|^{2k} dx` truncated to `[-L, L]`,
/// with the power weight folded on each side of the origin.
#[derive(Debug, Clone)]
pub struct LineRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LineRule {
    pub fn new(k: f64, half_len: f64, n: usize) -> Result<Self, QuadratureError> {
        let base = radial_power_rule(2.0 * k, half_len, n)?;
        let scale = 2f64.powf(k);
        let mut nodes = Vec::with_capacity(2 * base.len());
        let mut weights = Vec::with_capacity(2 * base.len());
        for &(r, w) in base.iter().rev() {
            nodes.push(-r);
            weights.push(w * scale);
        }
        for &(r, w) in &base {
            nodes.push(r);
            weights.push(w * scale);
        }
        Ok(LineRule { nodes, weights })
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .sum()
    }
}

/// Evaluate `D_k f` on a grid of spectral points. One kernel sweep is
/// integrated per ξ, visiting the quadrature nodes in order of |x|.
pub fn dunkl_transform(
    k: f64,
    f: impl Fn(f64) -> f64,
    xi_grid: &[f64],
    rule: &LineRule,
) -> Result<Vec<Complex64>, TransformError> {
    let kernel = Rank1Kernel::new(k)?;
    let mass = gaussian_mass(k);
    let fvals: Vec<f64> = rule.nodes.iter().map(|&x| f(x)).collect();
    let mut out = Vec::with_capacity(xi_grid.len());
    for &xi in xi_grid {
        let y = Complex64::new(0.0, -xi);
        let kernel_vals = kernel.eval_many(&rule.nodes, y)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for ((e, fv), w) in kernel_vals.iter().zip(&fvals).zip(&rule.weights) {
            acc += e * fv * w;
        }
        out.push(acc / mass);
    }
    Ok(out)
}

/// Inverse transform of spectral data sampled on `xi_rule` nodes, evaluated
/// at the requested points: `(1/M_k) ∫ g(ξ) E_k(x, iξ) dμ_k(ξ)`.
pub fn dunkl_inverse(
    k: f64,
    g: &[Complex64],
    xi_rule: &LineRule,
    xs: &[f64],
) -> Result<Vec<Complex64>, TransformError> {
    assert_eq!(
        g.len(),
        xi_rule.nodes.len(),
        "spectral data must match the rule"
    );
    let kernel = Rank1Kernel::new(k)?;
    let mass = gaussian_mass(k);
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        // E_k(x, iξ) over the ξ nodes equals one kernel sweep in ξ with
        // spectral parameter ix, by the symmetry of the kernel.
        let y = Complex64::new(0.0, x);
        let kernel_vals = kernel.eval_many(&xi_rule.nodes, y)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for ((e, gv), w) in kernel_vals.iter().zip(g).zip(&xi_rule.weights) {
            acc += e * gv * w;
        }
        out.push(acc / mass);
    }
    Ok(out)
}

/// Both sides of the Plancherel identity `‖D_k f‖_{L²(dμ_k)} = ‖f‖_{L²(dμ_k)}`
/// for a rapidly decaying `f`, with the relative mismatch.
#[derive(Debug, Clone)]
pub struct PlancherelReport {
    pub f_norm2: f64,
    pub transform_norm2: f64,
    pub relative_residual: f64,
}

pub fn plancherel_residual(
    k: f64,
    f: impl Fn(f64) -> f64,
    half_len: f64,
    n: usize,
) -> Result<PlancherelReport, TransformError> {
    let x_rule = LineRule::new(k, half_len, n)?;
    let xi_rule = LineRule::new(k, half_len, n)?;
    let f_norm2 = x_rule.integrate(|x| f(x) * f(x));
    let spectral = dunkl_transform(k, &f, &xi_rule.nodes, &x_rule)?;
    let transform_norm2: f64 = spectral
        .iter()
        .zip(&xi_rule.weights)
        .map(|(v, w)| v.norm_sqr() * w)
        .sum();
    let denom = f_norm2.max(transform_norm2).max(f64::MIN_POSITIVE);
    Ok(PlancherelReport {
        f_norm2,
        transform_norm2,
        relative_residual: (f_norm2 - transform_norm2).abs() / denom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_mass_values() {
        // M_0 = √(2π); M_{1/2} = 2√2·Γ(1) = 2√2.
        assert_relative_eq!(
            gaussian_mass(0.0),
            (2.0 * std::f64::consts::PI).sqrt(),
            epsilon = 1e-14
        );
        assert_relative_eq!(
            gaussian_mass(0.5),
            2.0 * std::f64::consts::SQRT_2,
            epsilon = 1e-14
        );
    }

    #[test]
    fn line_rule_gaussian_mass() {
        for &k in &[0.0, 0.7, 1.4] {
            let rule = LineRule::new(k, 14.0, 80).unwrap();
            let got = rule.integrate(|x| (-x * x / 2.0).exp());
            assert_relative_eq!(got, gaussian_mass(k), max_relative = 1e-11);
        }
    }

    #[test]
    fn gaussian_is_a_fixed_point() {
        for &k in &[0.0, 0.8] {
            let rule = LineRule::new(k, 14.0, 110).unwrap();
            let xi: Vec<f64> = (0..=8).map(|i| -2.0 + 0.5 * i as f64).collect();
            let out = dunkl_transform(k, |x| (-x * x / 2.0).exp(), &xi, &rule).unwrap();
            for (v, &s) in out.iter().zip(&xi) {
                assert!(
                    (v.re - (-s * s / 2.0).exp()).abs() < 1e-8,
                    "k={k} ξ={s}: {v}"
                );
                assert!(v.im.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn even_functions_have_real_transforms() {
        let k = 1.2;
        let rule = LineRule::new(k, 12.0, 90).unwrap();
        let xi = [0.3, 1.1, 2.4];
        let out = dunkl_transform(k, |x| (-x * x).exp() * (1.0 + x * x), &xi, &rule).unwrap();
        for v in out {
            assert!(v.im.abs() < 1e-10);
        }
    }

    #[test]
    fn plancherel_identity_holds() {
        for &k in &[0.0, 0.5, 1.5] {
            let report =
                plancherel_residual(k, |x| (1.0 + x) * (-x * x / 2.0).exp(), 14.0, 110).unwrap();
            assert!(report.relative_residual < 1e-6, "k={k}: {report:?}");
        }
    }

    #[test]
    fn inverse_recovers_samples() {
        let k = 0.6;
        let rule = LineRule::new(k, 14.0, 110).unwrap();
        let f = |x: f64| (0.4 + x + 0.3 * x * x) * (-x * x / 2.0).exp();
        let spectral = dunkl_transform(k, f, &rule.nodes, &rule).unwrap();
        let xs = [0.35, 1.25, -2.0];
        let back = dunkl_inverse(k, &spectral, &rule, &xs).unwrap();
        for (&x, v) in xs.iter().zip(&back) {
            assert!((v.re - f(x)).abs() < 1e-6, "x={x}: {} vs {}", v.re, f(x));
            assert!(v.im.abs() < 1e-8);
        }
    }
}
