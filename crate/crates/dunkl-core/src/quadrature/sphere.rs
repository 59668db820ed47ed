//! Quadrature on the unit sphere against the reflection-invariant weight
//! `w_k(ξ) = Π_{α>0} |⟨α, ξ⟩|^{2k_α}`.
//!
//! Accuracy tiers by ambient dimension:
//! - dim 1: the two-point counting measure (exact);
//! - dim 2: per-arc Gauss-Jacobi between consecutive mirror crossings, with
//!   the vanishing rate `2k_α` folded at each arc endpoint (spectral for any k);
//! - dim 3 with roots spanning a plane: a rotated product rule whose polar
//!   factor folds `(sin φ)^{2γ+1}` exactly and whose azimuthal factor is the
//!   per-arc rule in the root plane (spectral for any k);
//! - dim 3 full rank and dim 4: smooth product rules (spectral only when the
//!   weight is smooth, i.e. integer exponents; algebraic otherwise);
//! - dim ≥ 5: a deterministic Halton point set (low accuracy, last resort).

use crate::root_system::DunklContext;
use crate::special::sphere_area;

use super::gauss::{gauss_jacobi, gauss_legendre};
use super::{QuadratureError, Rule};

/// Build a rule for `∫_{S^{N-1}} f(ξ) w_k(ξ) dσ(ξ)`. `level` scales the
/// one-dimensional node counts (and the point count of the Halton tier).
pub fn sphere_rule(ctx: &DunklContext, level: usize) -> Result<Rule, QuadratureError> {
    let level = level.max(4);
    match ctx.dim() {
        0 => Err(QuadratureError::BadRule(
            "zero-dimensional ambient space".into(),
        )),
        1 => Ok(point_pair(ctx)),
        2 => circle_rule(ctx, level),
        3 => match root_plane_basis(ctx) {
            Some(basis) => rotated_plane_rule(ctx, &basis, level),
            None => product_rule_3d(ctx, level),
        },
        4 => product_rule_4d(ctx, level),
        _ => Ok(halton_rule(ctx, level)),
    }
}

fn point_pair(ctx: &DunklContext) -> Rule {
    let nodes = vec![vec![1.0], vec![-1.0]];
    let weights = nodes.iter().map(|p| ctx.weight(p)).collect();
    Rule {
        nodes,
        weights,
        label: "sphere:pair".into(),
    }
}

/// Angles (mod 2π) where the unit circle crosses a mirror, with the weight's
/// vanishing exponent there. Each mirror line crosses the circle twice.
fn mirror_crossings(normals: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let tau = std::f64::consts::TAU;
    let mut kinks: Vec<(f64, f64)> = Vec::new();
    for &(theta, exponent) in normals {
        for offset in [0.5, 1.5] {
            let ang = (theta + offset * std::f64::consts::PI).rem_euclid(tau);
            kinks.push((ang, exponent));
        }
    }
    kinks.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // Merge crossings that coincide (distinct positive roots never share a
    // mirror line, but guard against near-duplicates from float angles).
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (ang, e) in kinks {
        match merged.last_mut() {
            Some(last) if (ang - last.0).abs() < 1e-9 => last.1 += e,
            _ => merged.push((ang, e)),
        }
    }
    merged
}

/// Per-arc Gauss-Jacobi nodes on the circle. `weight_at` must return the full
/// sphere weight at the embedded point for angle θ; its vanishing rates at the
/// arc endpoints are divided out and replaced by the folded Jacobi factors.
fn arc_nodes(
    kinks: &[(f64, f64)],
    per_arc: usize,
    weight_at: impl Fn(f64) -> f64,
) -> Result<Vec<(f64, f64)>, QuadratureError> {
    let tau = std::f64::consts::TAU;
    let arcs: Vec<(f64, f64, f64, f64)> = if kinks.is_empty() {
        vec![(0.0, tau / 2.0, 0.0, 0.0), (tau / 2.0, tau, 0.0, 0.0)]
    } else {
        (0..kinks.len())
            .map(|i| {
                let (a, ea) = kinks[i];
                let (b, eb) = if i + 1 < kinks.len() {
                    kinks[i + 1]
                } else {
                    (kinks[0].0 + tau, kinks[0].1)
                };
                (a, b, ea, eb)
            })
            .collect()
    };
    let mut out = Vec::new();
    for (a, b, ea, eb) in arcs {
        if b - a < 1e-12 {
            continue;
        }
        let m = 0.5 * (b - a);
        for (t, w) in gauss_jacobi(per_arc, eb, ea)? {
            let theta = a + m * (1.0 + t);
            let smooth = weight_at(theta) / ((theta - a).powf(ea) * (b - theta).powf(eb));
            out.push((theta, w * m.powf(ea + eb + 1.0) * smooth));
        }
    }
    Ok(out)
}

fn circle_rule(ctx: &DunklContext, level: usize) -> Result<Rule, QuadratureError> {
    let normals: Vec<(f64, f64)> = ctx
        .system()
        .positive_roots()
        .map(|(i, r)| (r.coords()[1].atan2(r.coords()[0]), 2.0 * ctx.k_of_root(i)))
        .collect();
    let kinks = mirror_crossings(&normals);
    let pairs = arc_nodes(&kinks, level, |theta| {
        ctx.weight(&[theta.cos(), theta.sin()])
    })?;
    let mut nodes = Vec::with_capacity(pairs.len());
    let mut weights = Vec::with_capacity(pairs.len());
    for (theta, w) in pairs {
        nodes.push(vec![theta.cos(), theta.sin()]);
        weights.push(w);
    }
    Ok(Rule {
        nodes,
        weights,
        label: format!("sphere:arcs[{level}]"),
    })
}

/// Orthonormal basis of the span of the roots together with the unit normal,
/// when that span is a plane inside ℝ³.
struct PlaneBasis {
    v1: [f64; 3],
    v2: [f64; 3],
    normal: [f64; 3],
}

fn root_plane_basis(ctx: &DunklContext) -> Option<PlaneBasis> {
    let mut basis: Vec<[f64; 3]> = Vec::new();
    for (_, root) in ctx.system().positive_roots() {
        let c = root.coords();
        let mut v = [c[0], c[1], c[2]];
        for b in &basis {
            let dot = v[0] * b[0] + v[1] * b[1] + v[2] * b[2];
            for i in 0..3 {
                v[i] -= dot * b[i];
            }
        }
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1e-9 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            basis.push(v);
            if basis.len() > 2 {
                return None;
            }
        }
    }
    if basis.len() != 2 {
        return None;
    }
    let (a, b) = (basis[0], basis[1]);
    let normal = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    Some(PlaneBasis {
        v1: a,
        v2: b,
        normal,
    })
}

/// Product rule for rank-2 systems embedded in ℝ³: polar angle φ measured
/// from the root-plane normal, azimuth θ inside the root plane. The weight
/// splits exactly as `w_k(ξ) = (sin φ)^{2γ} · w_k(v(θ))`, so the polar factor
/// `(sin φ)^{2γ+1}` (weight times surface element) is folded via Gauss-Jacobi
/// and the azimuthal factor via the per-arc rule.
fn rotated_plane_rule(
    ctx: &DunklContext,
    basis: &PlaneBasis,
    level: usize,
) -> Result<Rule, QuadratureError> {
    let pi = std::f64::consts::PI;
    let gamma = ctx.gamma();
    let a = 2.0 * gamma + 1.0;

    let embed = |theta: f64| -> [f64; 3] {
        let (s, c) = theta.sin_cos();
        [
            c * basis.v1[0] + s * basis.v2[0],
            c * basis.v1[1] + s * basis.v2[1],
            c * basis.v1[2] + s * basis.v2[2],
        ]
    };
    let normals: Vec<(f64, f64)> = ctx
        .system()
        .positive_roots()
        .map(|(i, r)| {
            let c = r.coords();
            let c1 = c[0] * basis.v1[0] + c[1] * basis.v1[1] + c[2] * basis.v1[2];
            let c2 = c[0] * basis.v2[0] + c[1] * basis.v2[1] + c[2] * basis.v2[2];
            (c2.atan2(c1), 2.0 * ctx.k_of_root(i))
        })
        .collect();
    let kinks = mirror_crossings(&normals);
    let azimuth = arc_nodes(&kinks, level, |theta| {
        let p = embed(theta);
        ctx.weight(&p)
    })?;

    // ∫_0^π G(φ) (sin φ)^{2γ+1} dφ with (sin φ)^a = φ^a (π-φ)^a R(φ),
    // R smooth and positive on [0, π].
    let half = pi / 2.0;
    let polar: Vec<(f64, f64)> = gauss_jacobi(level + 2, a, a)?
        .into_iter()
        .map(|(t, w)| {
            let phi = half * (1.0 + t);
            let smooth = (phi.sin() / (phi * (pi - phi))).powf(a);
            (phi, w * half.powf(2.0 * a + 1.0) * smooth)
        })
        .collect();

    let mut nodes = Vec::with_capacity(polar.len() * azimuth.len());
    let mut weights = Vec::with_capacity(polar.len() * azimuth.len());
    for &(phi, u) in &polar {
        let (sp, cp) = phi.sin_cos();
        for &(theta, v) in &azimuth {
            let p = embed(theta);
            nodes.push(vec![
                sp * p[0] + cp * basis.normal[0],
                sp * p[1] + cp * basis.normal[1],
                sp * p[2] + cp * basis.normal[2],
            ]);
            weights.push(u * v);
        }
    }
    Ok(Rule {
        nodes,
        weights,
        label: format!("sphere:plane-rotated[{level}]"),
    })
}

/// Fixed azimuthal offset keeping equispaced nodes off the coordinate mirrors.
const AZIMUTH_OFFSET: f64 = 0.5 + 0.078_089_563_2;

fn product_rule_3d(ctx: &DunklContext, level: usize) -> Result<Rule, QuadratureError> {
    let tau = std::f64::consts::TAU;
    let n_u = level + level % 2; // even count keeps nodes off the equator
    let m = 2 * level;
    let u_rule = gauss_legendre(n_u);
    let mut nodes = Vec::with_capacity(n_u * m);
    let mut weights = Vec::with_capacity(n_u * m);
    for (u, wu) in u_rule {
        let s = (1.0 - u * u).sqrt();
        for j in 0..m {
            let theta = tau * (j as f64 + AZIMUTH_OFFSET) / m as f64;
            let p = vec![s * theta.cos(), s * theta.sin(), u];
            let w = wu * (tau / m as f64) * ctx.weight(&p);
            nodes.push(p);
            weights.push(w);
        }
    }
    Ok(Rule {
        nodes,
        weights,
        label: format!("sphere:product3[{level}]"),
    })
}

fn product_rule_4d(ctx: &DunklContext, level: usize) -> Result<Rule, QuadratureError> {
    let tau = std::f64::consts::TAU;
    let n_ang = level + level % 2;
    let m = 2 * level;
    let chi_rule = gauss_legendre_on_angle(n_ang);
    let phi_rule = gauss_legendre_on_angle(n_ang);
    let mut nodes = Vec::with_capacity(n_ang * n_ang * m);
    let mut weights = Vec::with_capacity(n_ang * n_ang * m);
    for &(chi, wc) in &chi_rule {
        let (sc, cc) = chi.sin_cos();
        for &(phi, wp) in &phi_rule {
            let (sp, cp) = phi.sin_cos();
            for j in 0..m {
                let theta = tau * (j as f64 + AZIMUTH_OFFSET) / m as f64;
                let p = vec![sc * sp * theta.cos(), sc * sp * theta.sin(), sc * cp, cc];
                let w = wc * wp * (tau / m as f64) * sc * sc * sp * ctx.weight(&p);
                nodes.push(p);
                weights.push(w);
            }
        }
    }
    Ok(Rule {
        nodes,
        weights,
        label: format!("sphere:product4[{level}]"),
    })
}

fn gauss_legendre_on_angle(n: usize) -> Vec<(f64, f64)> {
    let pi = std::f64::consts::PI;
    gauss_legendre(n)
        .into_iter()
        .map(|(t, w)| (0.5 * pi * (1.0 + t), 0.5 * pi * w))
        .collect()
}

/// Deterministic low-discrepancy points for dimensions ≥ 5: Halton samples
/// pushed through the inverse normal map and radially projected.
fn halton_rule(ctx: &DunklContext, level: usize) -> Rule {
    const PRIMES: [usize; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];
    let dim = ctx.dim();
    let count = (level * 1200).min(60_000);
    let area = sphere_area(dim);
    let mut nodes = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for i in 1..=count {
        let mut p = vec![0.0f64; dim];
        let mut norm2 = 0.0;
        for (d, x) in p.iter_mut().enumerate() {
            *x = inverse_normal_cdf(radical_inverse(i, PRIMES[d % PRIMES.len()]));
            norm2 += *x * *x;
        }
        let norm = norm2.sqrt();
        if norm < 1e-12 {
            continue;
        }
        for x in p.iter_mut() {
            *x /= norm;
        }
        let w = area / count as f64 * ctx.weight(&p);
        nodes.push(p);
        weights.push(w);
    }
    Rule {
        nodes,
        weights,
        label: format!("sphere:halton[{count}]"),
    }
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let inv = 1.0 / base as f64;
    let mut result = 0.0;
    let mut frac = inv;
    while i > 0 {
        result += (i % base) as f64 * frac;
        i /= base;
        frac *= inv;
    }
    result
}

/// Acklam's rational approximation to the standard normal quantile
/// (relative error below 1.2e-9, ample for the Halton tier).
fn inverse_normal_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let p_low = 0.02425;
    if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -inverse_normal_cdf(1.0 - p)
    }
}
