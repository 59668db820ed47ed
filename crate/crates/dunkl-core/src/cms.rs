//! Conjugation of the weighted Laplacian by the half-power of the weight.
//!
//! With `v(x) = Σ_{α>0} k_α α/⟨α,x⟩` and half-weight `w^{1/2} = Π |⟨α,x⟩|^{k_α}`,
//! the gauge transform `g ↦ w^{1/2} Δ_k(w^{-1/2} g)` collapses to the local
//! closed form
//!
//! ```text
//! F_k g(x) = Δg(x) - 2 Σ_{α>0} k_α (k_α g(x) - g(σ_α x)) / ⟨α,x⟩²
//! ```
//!
//! because the mixed sum `Σ_{α≠β} k_α k_β ⟨α,β⟩/(⟨α,x⟩⟨β,x⟩)` vanishes
//! identically. Both the closed form and an exact rational evaluation of the
//! mixed sum are provided, plus reflection-invariant extension of chamber
//! data.

use num::Zero;
use thiserror::Error;

use crate::field::ScalarField;
use crate::ops::dunkl_laplacian_field;
use crate::root_system::{DunklContext, ReflectionGroup, RootSystem};
use crate::Rational;

#[derive(Debug, Error)]
pub enum CmsError {
    #[error("exact rational root data unavailable for this system")]
    MissingExactData,
    #[error("point lies on the mirror of root {root_index}")]
    OnMirror { root_index: usize },
}

/// The closed-form conjugated operator `F_k g` at a point off all mirrors.
pub fn cms_apply(ctx: &DunklContext, g: &ScalarField, x: &[f64]) -> f64 {
    let mut out = g.laplacian(x);
    let gx = g.eval(x);
    for (ri, root) in ctx.system().positive_roots() {
        let k = ctx.k_of_root(ri);
        if k == 0.0 {
            continue;
        }
        let t = root.inner(x);
        let reflected = g.eval(&root.reflect(x));
        out -= 2.0 * k * (k * gx - reflected) / (t * t);
    }
    out
}

/// The scalar potential picked up by reflection-invariant functions:
/// `F_k g = Δg + potential·g` whenever `g∘σ_α = g` for all roots.
pub fn invariant_potential(ctx: &DunklContext, x: &[f64]) -> f64 {
    let mut pot = 0.0;
    for (ri, root) in ctx.system().positive_roots() {
        let k = ctx.k_of_root(ri);
        if k == 0.0 {
            continue;
        }
        let t = root.inner(x);
        pot += 2.0 * k * (1.0 - k) / (t * t);
    }
    pot
}

/// `w^{s/2}` for `s = ±1`, with analytic gradient and Laplacian:
/// `∇ w^{s/2} = s·w^{s/2} v` and `Δ w^{s/2} = w^{s/2} (|v|² + s·Δφ)` where
/// `φ = ln w^{1/2}` has `Δφ = -2 Σ k_α/⟨α,x⟩²`. The norm `|v|²` is expanded
/// as a genuine double sum, so no cancellation identity is assumed here.
pub fn half_weight_field(ctx: &DunklContext, sign: f64) -> ScalarField {
    assert!(sign == 1.0 || sign == -1.0, "sign must be ±1");
    let data: Vec<(Vec<f64>, f64)> = ctx
        .system()
        .positive_roots()
        .map(|(ri, root)| (root.coords().to_vec(), ctx.k_of_root(ri)))
        .collect();

    let value = {
        let data = data.clone();
        move |x: &[f64]| -> f64 {
            let mut w = 1.0;
            for (coords, k) in &data {
                if *k == 0.0 {
                    continue;
                }
                let t: f64 = coords.iter().zip(x).map(|(a, b)| a * b).sum();
                w *= t.abs().powf(sign * k);
            }
            w
        }
    };
    let log_gradient = {
        let data = data.clone();
        move |x: &[f64]| -> Vec<f64> {
            let mut v = vec![0.0; x.len()];
            for (coords, k) in &data {
                if *k == 0.0 {
                    continue;
                }
                let t: f64 = coords.iter().zip(x).map(|(a, b)| a * b).sum();
                for (vi, a) in v.iter_mut().zip(coords) {
                    *vi += k * a / t;
                }
            }
            v
        }
    };
    let grad_value = value.clone();
    let grad_log = log_gradient.clone();
    let lap_value = value.clone();
    let lap_log = log_gradient.clone();
    let lap_data = data.clone();
    ScalarField::from_fn(move |x| value(x))
        .with_grad(move |x| {
            let w = grad_value(x);
            grad_log(x).into_iter().map(|vi| sign * w * vi).collect()
        })
        .with_laplacian(move |x| {
            let w = lap_value(x);
            let v = lap_log(x);
            let v2: f64 = v.iter().map(|c| c * c).sum();
            let mut lap_phi = 0.0;
            for (coords, k) in &lap_data {
                if *k == 0.0 {
                    continue;
                }
                let t: f64 = coords.iter().zip(x).map(|(a, b)| a * b).sum();
                lap_phi -= 2.0 * k / (t * t);
            }
            w * (v2 + sign * lap_phi)
        })
}

/// Residual of the gauge identity at `x`: the weighted Laplacian route
/// `w^{1/2} Δ_k(w^{-1/2} g)` minus the closed form `F_k g`. Everything is
/// evaluated analytically when `g` carries analytic derivatives.
pub fn conjugation_residual(ctx: &DunklContext, g: &ScalarField, x: &[f64]) -> f64 {
    let w_minus = half_weight_field(ctx, -1.0);
    let w_plus = half_weight_field(ctx, 1.0);
    let conjugated = w_minus.product(g);
    let lhs = w_plus.eval(x) * dunkl_laplacian_field(ctx, &conjugated, x);
    let rhs = cms_apply(ctx, g, x);
    (lhs - rhs).abs()
}

/// The mixed sum `Σ_{α≠β>0} k_α k_β ⟨α,β⟩/(⟨α,x⟩⟨β,x⟩)`, evaluated exactly
/// over the rationals. The scaling of each root cancels between numerator
/// and denominator, so only the integer direction vectors enter.
pub fn cross_term_sum_exact(ctx: &DunklContext, x: &[Rational]) -> Result<Rational, CmsError> {
    let positives: Vec<usize> = ctx.system().positive_indices().to_vec();
    let mut dirs: Vec<Vec<Rational>> = Vec::with_capacity(positives.len());
    let mut inners: Vec<Rational> = Vec::with_capacity(positives.len());
    for &ri in &positives {
        let dir = ctx
            .system()
            .root(ri)
            .exact_dir()
            .ok_or(CmsError::MissingExactData)?;
        let dir_q: Vec<Rational> = dir
            .iter()
            .map(|d| Rational::from_integer(d.clone()))
            .collect();
        let mut inner = Rational::zero();
        for (d, xi) in dir_q.iter().zip(x) {
            inner += d * xi;
        }
        if inner.is_zero() {
            return Err(CmsError::OnMirror { root_index: ri });
        }
        dirs.push(dir_q);
        inners.push(inner);
    }
    let mut sum = Rational::zero();
    for a in 0..positives.len() {
        let ka = ctx.k_exact_of_root(positives[a]);
        if ka.is_zero() {
            continue;
        }
        for b in 0..positives.len() {
            if a == b {
                continue;
            }
            let kb = ctx.k_exact_of_root(positives[b]);
            if kb.is_zero() {
                continue;
            }
            let mut dot = Rational::zero();
            for (da, db) in dirs[a].iter().zip(&dirs[b]) {
                dot += da * db;
            }
            if dot.is_zero() {
                continue;
            }
            sum += ka * kb * dot / (&inners[a] * &inners[b]);
        }
    }
    Ok(sum)
}

/// Extend a function given on the closed fundamental chamber to a
/// reflection-invariant function on the whole space.
pub fn chamber_extend(
    group: &ReflectionGroup,
    system: &RootSystem,
    f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
) -> ScalarField {
    let group = group.clone();
    let system = system.clone();
    ScalarField::from_fn(move |x| {
        match group.into_fundamental_chamber(&system, x) {
            Some(idx) => f(&group.apply(idx, x)),
            // Numerically outside every closed chamber can only happen on a
            // mirror within tolerance; fall back to the raw value.
            None => f(x),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_rational;
    use crate::root_system::Family;
    use approx::assert_relative_eq;

    fn gaussian_times_linear(_dim: usize) -> ScalarField {
        // g(x) = (1 + x_0) e^{-|x|²/2} with analytic gradient and Laplacian.
        let eval = move |x: &[f64]| -> f64 {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            (1.0 + x[0]) * (-r2 / 2.0).exp()
        };
        ScalarField::from_fn(eval)
            .with_grad(move |x| {
                let r2: f64 = x.iter().map(|c| c * c).sum();
                let e = (-r2 / 2.0).exp();
                let g0 = 1.0 + x[0];
                (0..x.len())
                    .map(|i| {
                        let linear = if i == 0 { 1.0 } else { 0.0 };
                        e * (linear - g0 * x[i])
                    })
                    .collect()
            })
            .with_laplacian(move |x| {
                let r2: f64 = x.iter().map(|c| c * c).sum();
                let e = (-r2 / 2.0).exp();
                let n = x.len() as f64;
                let g0 = 1.0 + x[0];
                e * (g0 * (r2 - n) - 2.0 * x[0])
            })
    }

    #[test]
    fn cross_term_vanishes_exactly() {
        let cases: Vec<(Family, Vec<&str>)> = vec![
            (Family::A { rank: 2 }, vec!["1/2"]),
            (Family::B { rank: 2 }, vec!["3/10", "7/10"]),
            (Family::D { rank: 3 }, vec!["2/3"]),
        ];
        for (family, ks) in cases {
            let system = crate::root_system::RootSystem::build(&family).unwrap();
            let k = crate::root_system::MultiplicityFunction::parse(&ks).unwrap();
            let k = if k.num_orbits() == system.num_orbits() {
                k
            } else {
                crate::root_system::MultiplicityFunction::parse(&vec![ks[0]; system.num_orbits()])
                    .unwrap()
            };
            let ctx = DunklContext::new(system, k).unwrap();
            let dim = ctx.dim();
            let x: Vec<Rational> = (0..dim)
                .map(|i| parse_rational(&format!("{}/{}", 2 * i as i64 + 3, i as i64 + 2)).unwrap())
                .collect();
            let sum = cross_term_sum_exact(&ctx, &x).unwrap();
            assert!(sum.is_zero(), "{}: {sum}", ctx.descriptor());
        }
    }

    #[test]
    fn mirror_points_are_rejected_exactly() {
        let ctx = DunklContext::build(&Family::A { rank: 2 }, &[0.5]).unwrap();
        // x with x_0 = x_1 lies on the mirror of e_0 - e_1.
        let x = vec![
            parse_rational("1/2").unwrap(),
            parse_rational("1/2").unwrap(),
            parse_rational("2").unwrap(),
        ];
        assert!(matches!(
            cross_term_sum_exact(&ctx, &x),
            Err(CmsError::OnMirror { .. })
        ));
    }

    #[test]
    fn conjugation_identity_holds_analytically() {
        let cases: Vec<(Family, Vec<f64>)> = vec![
            (Family::Z2Power { n: 1 }, vec![0.7]),
            (Family::A { rank: 2 }, vec![0.5]),
            (Family::B { rank: 2 }, vec![0.3, 0.7]),
        ];
        for (family, k) in cases {
            let ctx = DunklContext::build(&family, &k).unwrap();
            let g = gaussian_times_linear(ctx.dim());
            let points: Vec<Vec<f64>> = match ctx.dim() {
                1 => vec![vec![0.8], vec![-1.3]],
                2 => vec![vec![0.9, 0.25], vec![-0.6, 1.4]],
                _ => vec![vec![0.9, 0.25, -0.8], vec![1.7, -0.6, 0.3]],
            };
            for x in points {
                let r = conjugation_residual(&ctx, &g, &x);
                assert!(r < 1e-9, "{} at {:?}: residual {r}", ctx.descriptor(), x);
            }
        }
    }

    #[test]
    fn invariant_functions_see_the_scalar_potential() {
        // g = e^{-|x|²/2} is reflection invariant, so
        // F_k g = Δg + potential·g pointwise.
        let ctx = DunklContext::build(&Family::A { rank: 2 }, &[0.75]).unwrap();
        let g = ScalarField::from_fn(|x: &[f64]| {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            (-r2 / 2.0).exp()
        })
        .with_laplacian(|x: &[f64]| {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            (r2 - x.len() as f64) * (-r2 / 2.0).exp()
        });
        let x = [0.4, -0.9, 1.7];
        let lhs = cms_apply(&ctx, &g, &x);
        let rhs = g.laplacian(&x) + invariant_potential(&ctx, &x) * g.eval(&x);
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
    }

    #[test]
    fn chamber_extension_is_reflection_invariant() {
        let system = crate::root_system::RootSystem::build(&Family::B { rank: 2 }).unwrap();
        let group = ReflectionGroup::generate(&system, 10_000).unwrap();
        let extended = chamber_extend(&group, &system, |x| x[0] + 3.0 * x[1] + x[0] * x[1]);
        let x = [1.3, 0.45];
        let base = extended.eval(&x);
        for idx in 0..group.order() {
            let y = group.apply(idx, &x);
            assert_relative_eq!(extended.eval(&y), base, max_relative = 1e-10);
        }
    }
}
