//! One-dimensional radial rules with a power weight `r^ρ` folded into the
//! weights, so integrands with singular or vanishing radial factors are
//! handled at full Gauss accuracy.

use super::gauss::{gauss_jacobi, gauss_legendre};
use super::QuadratureError;

/// Rule for `∫_0^R g(r) r^ρ dr` with ρ > -1. The power factor is folded:
/// sample `g` bare at the returned nodes.
pub fn radial_power_rule(
    rho: f64,
    r_max: f64,
    n: usize,
) -> Result<Vec<(f64, f64)>, QuadratureError> {
    // NaN must also be rejected, hence the negated comparison.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(r_max > 0.0) {
        return Err(QuadratureError::BadRule(format!(
            "radius must be positive, got {r_max}"
        )));
    }
    let base = gauss_jacobi(n, 0.0, rho)?;
    let half = 0.5 * r_max;
    let scale = half.powf(rho + 1.0);
    Ok(base
        .into_iter()
        .map(|(t, w)| (half * (1.0 + t), w * scale))
        .collect())
}

/// Rule for `∫_a^b g(r) r^ρ dr` with 0 < a < b: the power factor is smooth
/// here, so it is evaluated at plain Gauss-Legendre nodes.
pub fn radial_segment_rule(
    rho: f64,
    a: f64,
    b: f64,
    n: usize,
) -> Result<Vec<(f64, f64)>, QuadratureError> {
    if !(0.0 < a && a < b) {
        return Err(QuadratureError::BadRule(format!(
            "need 0 < a < b, got [{a}, {b}]"
        )));
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    Ok(gauss_legendre(n)
        .into_iter()
        .map(|(t, w)| {
            let r = mid + half * t;
            (r, w * half * r.powf(rho))
        })
        .collect())
}

/// Rule for `∫_0^∞ g(r) r^ρ dr` for `g` decaying at least like a Gaussian:
/// maps `[0, 1)` onto the half-line through `r = -s·ln(1-u)` and folds both
/// the Jacobian and the power factor. `scale` sets the decay length probed.
pub fn halfline_rule(rho: f64, scale: f64, n: usize) -> Result<Vec<(f64, f64)>, QuadratureError> {
    // NaN must also be rejected, hence the negated comparison.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(scale > 0.0) {
        return Err(QuadratureError::BadRule(format!(
            "scale must be positive, got {scale}"
        )));
    }
    // Split off [0, r0] with the folded power rule so ρ < 0 stays accurate,
    // then cover [r0, ∞) with the exponential map.
    let r0 = scale * 0.5;
    let mut rule = radial_power_rule(rho, r0, n)?;
    for (t, w) in gauss_legendre(n) {
        let u = 0.5 * (1.0 + t);
        let du = 0.5 * w;
        let r = r0 - scale * (1.0 - u).ln();
        let jac = scale / (1.0 - u);
        rule.push((r, du * jac * r.powf(rho)));
    }
    Ok(rule)
}
