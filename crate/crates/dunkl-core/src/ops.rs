//! Dunkl differential-difference operators.
//!
//! `T_i f = ∂_i f + Σ_{α>0} k_α α_i (f(x) − f(σ_α x)) / ⟨α,x⟩`.
//!
//! On polynomials the difference quotient divides exactly, and because only
//! the direction of a root enters the quotient (`α_i/⟨α,x⟩` is invariant
//! under rescaling `α`), the whole computation runs over the rationals even
//! for systems whose normalized roots have irrational coordinates. On scalar
//! fields the quotient is evaluated numerically, switching to its analytic
//! limit `⟨α, ∇f⟩` within distance `1e-7` of a reflecting hyperplane.

use num::traits::Zero;
use thiserror::Error;

use crate::field::ScalarField;
use crate::poly::{MultiPoly, PolyError};
use crate::root_system::DunklContext;
use crate::{Rational, HYPERPLANE_TOL};

#[derive(Debug, Error)]
pub enum OpsError {
    #[error("exact rational root data unavailable for this system")]
    MissingExactData,
    #[error("coordinate index {index} out of range for dimension {dim}")]
    BadIndex { index: usize, dim: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn exact_dir_rational(ctx: &DunklContext, root_index: usize) -> Result<Vec<Rational>, OpsError> {
    ctx.system()
        .root(root_index)
        .exact_dir()
        .map(|d| {
            d.iter()
                .map(|x| Rational::from_integer(x.clone()))
                .collect()
        })
        .ok_or(OpsError::MissingExactData)
}

/// Apply `T_i` to a polynomial, exactly.
pub fn dunkl_apply_poly(
    ctx: &DunklContext,
    i: usize,
    p: &MultiPoly,
) -> Result<MultiPoly, OpsError> {
    let dim = ctx.dim();
    if i >= dim {
        return Err(OpsError::BadIndex { index: i, dim });
    }
    let mut out = p.derivative(i);
    if p.is_zero() {
        return Ok(out);
    }
    for (ri, root) in ctx.system().positive_roots() {
        let k = ctx.k_exact_of_root(ri);
        if k.is_zero() {
            continue;
        }
        let refl = root
            .reflection_matrix_rational()
            .ok_or(OpsError::MissingExactData)?;
        let diff = p.sub(&p.compose_linear(&refl));
        if diff.is_zero() {
            continue;
        }
        let dir = exact_dir_rational(ctx, ri)?;
        let quotient = diff.div_linear_form(&dir)?;
        let coeff = k * &dir[i];
        out = out.add(&quotient.scale(&coeff));
    }
    Ok(out)
}

pub fn dunkl_gradient_poly(ctx: &DunklContext, p: &MultiPoly) -> Result<Vec<MultiPoly>, OpsError> {
    (0..ctx.dim())
        .map(|i| dunkl_apply_poly(ctx, i, p))
        .collect()
}

/// `Δ_k p = Σ_i T_i (T_i p)`, exactly.
pub fn dunkl_laplacian_sum_poly(ctx: &DunklContext, p: &MultiPoly) -> Result<MultiPoly, OpsError> {
    let mut out = MultiPoly::zero(ctx.dim());
    for i in 0..ctx.dim() {
        let ti = dunkl_apply_poly(ctx, i, p)?;
        out = out.add(&dunkl_apply_poly(ctx, i, &ti)?);
    }
    Ok(out)
}

/// The closed form of the Dunkl Laplacian,
/// `Δ_k p = Δp + 2 Σ_{α>0} k_α [⟨∇p,α⟩/⟨α,x⟩ − (p − p∘σ_α)/⟨α,x⟩²]`,
/// evaluated exactly: each bracket's numerator vanishes to second order on
/// the hyperplane, so two exact divisions by the linear form succeed.
pub fn dunkl_laplacian_formula_poly(
    ctx: &DunklContext,
    p: &MultiPoly,
) -> Result<MultiPoly, OpsError> {
    let mut out = p.laplacian();
    if p.is_zero() {
        return Ok(out);
    }
    let grad = p.gradient();
    for (ri, root) in ctx.system().positive_roots() {
        let k = ctx.k_exact_of_root(ri);
        if k.is_zero() {
            continue;
        }
        let dir = exact_dir_rational(ctx, ri)?;
        let scale2 = root.scale2().ok_or(OpsError::MissingExactData)?;
        let refl = root
            .reflection_matrix_rational()
            .ok_or(OpsError::MissingExactData)?;
        let diff = p.sub(&p.compose_linear(&refl));
        // ⟨∇p, dir⟩
        let mut grad_dir = MultiPoly::zero(ctx.dim());
        for (gi, di) in grad.iter().zip(&dir) {
            grad_dir = grad_dir.add(&gi.scale(di));
        }
        let lform = MultiPoly::linear_form(&dir);
        // bracket = (scale2·⟨∇p,dir⟩·L − diff) / (scale2 · L²)
        let numer = grad_dir.mul(&lform).scale(&scale2).sub(&diff);
        let once = numer.div_linear_form(&dir)?;
        let twice = once.div_linear_form(&dir)?;
        let inv_scale2 = Rational::new(scale2.denom().clone(), scale2.numer().clone());
        let coeff = Rational::from_integer(2.into()) * k * inv_scale2;
        out = out.add(&twice.scale(&coeff));
    }
    Ok(out)
}

/// Product rule: `T_i(fg) = f T_i g + g T_i f − Σ k_α α_i (f−f∘σ)(g−g∘σ)/⟨α,x⟩`,
/// returned as a polynomial (all three pieces are exact).
pub fn leibniz_apply_poly(
    ctx: &DunklContext,
    i: usize,
    f: &MultiPoly,
    g: &MultiPoly,
) -> Result<MultiPoly, OpsError> {
    let tf = dunkl_apply_poly(ctx, i, f)?;
    let tg = dunkl_apply_poly(ctx, i, g)?;
    let mut out = f.mul(&tg).add(&g.mul(&tf));
    for (ri, root) in ctx.system().positive_roots() {
        let k = ctx.k_exact_of_root(ri);
        if k.is_zero() {
            continue;
        }
        let refl = root
            .reflection_matrix_rational()
            .ok_or(OpsError::MissingExactData)?;
        let df = f.sub(&f.compose_linear(&refl));
        let dg = g.sub(&g.compose_linear(&refl));
        if df.is_zero() || dg.is_zero() {
            continue;
        }
        let dir = exact_dir_rational(ctx, ri)?;
        let quotient = df.mul(&dg).div_linear_form(&dir)?;
        let coeff = k * &dir[i];
        out = out.sub(&quotient.scale(&coeff));
    }
    Ok(out)
}

/// Evaluate `T_i f` at a point for a scalar field.
pub fn dunkl_apply_field(ctx: &DunklContext, i: usize, f: &ScalarField, x: &[f64]) -> f64 {
    let grad = f.grad(x);
    let fx = f.eval(x);
    let mut out = grad[i];
    for (ri, root) in ctx.system().positive_roots() {
        let k = ctx.k_of_root(ri);
        if k == 0.0 {
            continue;
        }
        let t = root.inner(x);
        let a_i = root.coords()[i];
        if t.abs() / std::f64::consts::SQRT_2 > HYPERPLANE_TOL {
            out += k * a_i * (fx - f.eval(&root.reflect(x))) / t;
        } else {
            // Analytic limit of the difference quotient on the hyperplane.
            let dirderiv: f64 = root.coords().iter().zip(&grad).map(|(a, g)| a * g).sum();
            out += k * a_i * dirderiv;
        }
    }
    out
}

/// The full Dunkl gradient `∇_k f(x)` (shares the per-root work).
pub fn dunkl_gradient_field(ctx: &DunklContext, f: &ScalarField, x: &[f64]) -> Vec<f64> {
    let grad = f.grad(x);
    let fx = f.eval(x);
    let mut out = grad.clone();
    for (ri, root) in ctx.system().positive_roots() {
        let k = ctx.k_of_root(ri);
        if k == 0.0 {
            continue;
        }
        let t = root.inner(x);
        let quotient = if t.abs() / std::f64::consts::SQRT_2 > HYPERPLANE_TOL {
            (fx - f.eval(&root.reflect(x))) / t
        } else {
            root.coords().iter().zip(&grad).map(|(a, g)| a * g).sum()
        };
        for (o, a) in out.iter_mut().zip(root.coords()) {
            *o += k * a * quotient;
        }
    }
    out
}

/// `⟨x, ∇_k f⟩ = ⟨x, ∇f⟩ + Σ k_α (f(x) − f(σ_α x))`: the inner product with
/// the position vector collapses the difference quotients, so this form is
/// stable arbitrarily close to the hyperplanes.
pub fn scaled_gradient_inner_field(ctx: &DunklContext, f: &ScalarField, x: &[f64]) -> f64 {
    let grad = f.grad(x);
    let fx = f.eval(x);
    let mut out: f64 = x.iter().zip(&grad).map(|(xi, g)| xi * g).sum();
    for (ri, root) in ctx.system().positive_roots() {
        let k = ctx.k_of_root(ri);
        if k == 0.0 {
            continue;
        }
        out += k * (fx - f.eval(&root.reflect(x)));
    }
    out
}

/// Pointwise Dunkl Laplacian of a field via the closed form. Near a
/// hyperplane the bracket tends to `½ αᵀ(D²f)α`, estimated by a second
/// difference along the root.
pub fn dunkl_laplacian_field(ctx: &DunklContext, f: &ScalarField, x: &[f64]) -> f64 {
    let mut out = f.laplacian(x);
    let fx = f.eval(x);
    let grad = f.grad(x);
    for (ri, root) in ctx.system().positive_roots() {
        let k = ctx.k_of_root(ri);
        if k == 0.0 {
            continue;
        }
        let t = root.inner(x);
        let bracket = if t.abs() / std::f64::consts::SQRT_2 > HYPERPLANE_TOL {
            let dirderiv: f64 = root.coords().iter().zip(&grad).map(|(a, g)| a * g).sum();
            dirderiv / t - (fx - f.eval(&root.reflect(x))) / (t * t)
        } else {
            let h = 1e-4 * (1.0 + norm(x));
            let xp: Vec<f64> = x
                .iter()
                .zip(root.coords())
                .map(|(xi, ai)| xi + h * ai)
                .collect();
            let xm: Vec<f64> = x
                .iter()
                .zip(root.coords())
                .map(|(xi, ai)| xi - h * ai)
                .collect();
            0.5 * (f.eval(&xp) - 2.0 * fx + f.eval(&xm)) / (h * h)
        };
        out += 2.0 * k * bracket;
    }
    out
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
