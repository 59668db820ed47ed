//! Numerical integration against the reflection-invariant measure
//! `dμ_k = w_k(x) dx`, `w_k(x) = Π_{α>0} |⟨α, x⟩|^{2k_α}`.
//!
//! Every domain builder folds the non-smooth parts of the weight (and an
//! optional extra radial power `|x|^σ`) into Gauss-Jacobi weights, so the
//! sampled integrand stays smooth wherever the construction allows it. All
//! estimates are reported as [`IntegralEstimate`] with a two-resolution
//! Richardson-style error bar.

pub mod gauss;
mod radial;
mod sphere;

pub use gauss::{gauss_jacobi, gauss_legendre, gauss_legendre_on};
pub use radial::{halfline_rule, radial_power_rule, radial_segment_rule};
pub use sphere::sphere_rule;

use serde::Serialize;
use thiserror::Error;

use crate::root_system::DunklContext;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("invalid quadrature rule: {0}")]
    BadRule(String),
    #[error("integrand returned a non-finite value at node {index} of rule {label}")]
    NonFiniteSample { label: String, index: usize },
    #[error("i/o failure while exporting rule: {0}")]
    Io(#[from] std::io::Error),
}

/// A value together with a two-resolution error estimate and a record of the
/// rule that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct IntegralEstimate {
    pub value: f64,
    /// Absolute difference between the fine and coarse resolutions.
    pub error: f64,
    pub resolution: String,
}

/// Cubature nodes and weights; the weights already contain the measure.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub label: String,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> Result<f64, QuadratureError> {
        let mut acc = 0.0;
        for (index, (node, w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let v = f(node) * w;
            if !v.is_finite() {
                return Err(QuadratureError::NonFiniteSample {
                    label: self.label.clone(),
                    index,
                });
            }
            acc += v;
        }
        Ok(acc)
    }

    /// Export as CSV (`x1,...,xN,weight`) for external inspection.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<(), QuadratureError> {
        let dim = self.nodes.first().map_or(0, Vec::len);
        for i in 1..=dim {
            write!(out, "x{i},")?;
        }
        writeln!(out, "weight")?;
        for (node, w) in self.nodes.iter().zip(&self.weights) {
            for x in node {
                write!(out, "{x:.17e},")?;
            }
            writeln!(out, "{w:.17e}")?;
        }
        Ok(())
    }

    fn product_with(self, other: &Rule, combine: impl Fn(&[f64], &[f64]) -> Vec<f64>) -> Rule {
        let mut nodes = Vec::with_capacity(self.len() * other.len());
        let mut weights = Vec::with_capacity(self.len() * other.len());
        for (a, wa) in self.nodes.iter().zip(&self.weights) {
            for (b, wb) in other.nodes.iter().zip(&other.weights) {
                nodes.push(combine(a, b));
                weights.push(wa * wb);
            }
        }
        Rule {
            nodes,
            weights,
            label: format!("{}⊗{}", self.label, other.label),
        }
    }
}

/// Coarse/fine resolution pair driving every two-level error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Levels {
    pub coarse: usize,
    pub fine: usize,
}

impl Levels {
    pub fn new(coarse: usize, fine: usize) -> Self {
        Levels { coarse, fine }
    }
}

impl Default for Levels {
    fn default() -> Self {
        Levels {
            coarse: 16,
            fine: 32,
        }
    }
}

/// Evaluate `f` against rules built at the coarse and fine levels; the value
/// is the fine result and the error bar the difference between the two.
pub fn two_level(
    build: impl Fn(usize) -> Result<Rule, QuadratureError>,
    f: impl Fn(&[f64]) -> f64,
    levels: Levels,
) -> Result<IntegralEstimate, QuadratureError> {
    let coarse_rule = build(levels.coarse)?;
    let fine_rule = build(levels.fine)?;
    let coarse = coarse_rule.integrate(&f)?;
    let fine = fine_rule.integrate(&f)?;
    Ok(IntegralEstimate {
        value: fine,
        error: (fine - coarse).abs(),
        resolution: format!("{}→{}", coarse_rule.label, fine_rule.label),
    })
}

fn onedim_rule(pairs: Vec<(f64, f64)>, label: String) -> Rule {
    let (nodes, weights) = pairs.into_iter().map(|(x, w)| (vec![x], w)).unzip();
    Rule {
        nodes,
        weights,
        label,
    }
}

/// Tensor Gauss-Legendre box rule for the plain Lebesgue measure.
pub fn box_rule_lebesgue(lo: &[f64], hi: &[f64], n: usize) -> Result<Rule, QuadratureError> {
    if lo.len() != hi.len() || lo.is_empty() {
        return Err(QuadratureError::BadRule(
            "box bounds must be non-empty and congruent".into(),
        ));
    }
    if lo.iter().zip(hi).any(|(a, b)| a >= b) {
        return Err(QuadratureError::BadRule(
            "box must have positive extent".into(),
        ));
    }
    let mut rule = onedim_rule(gauss_legendre_on(lo[0], hi[0], n), format!("box-leb[{n}]"));
    for d in 1..lo.len() {
        let axis = onedim_rule(gauss_legendre_on(lo[d], hi[d], n), String::new());
        rule = rule.product_with(&axis, |a, b| {
            let mut v = a.to_vec();
            v.push(b[0]);
            v
        });
        rule.label = format!("box-leb[{n}]^{}", d + 1);
    }
    if rule.len() > 4_000_000 {
        return Err(QuadratureError::BadRule(format!(
            "box rule too large ({} nodes)",
            rule.len()
        )));
    }
    Ok(rule)
}

/// Box rule against `dμ_k`. Axis-aligned mirrors crossing the box are split
/// at zero with the matching power `|x_i|^{2k}` folded; the factors of all
/// remaining roots are evaluated pointwise (they are smooth off their mirrors
/// but kink across them, so expect slower convergence whenever a non-axis
/// mirror crosses the box interior).
pub fn box_rule_mu(
    ctx: &DunklContext,
    lo: &[f64],
    hi: &[f64],
    n: usize,
) -> Result<Rule, QuadratureError> {
    let dim = ctx.dim();
    if lo.len() != dim || hi.len() != dim {
        return Err(QuadratureError::BadRule(
            "box bounds do not match ambient dimension".into(),
        ));
    }
    if lo.iter().zip(hi).any(|(a, b)| a >= b) {
        return Err(QuadratureError::BadRule(
            "box must have positive extent".into(),
        ));
    }

    // Partition roots into axis-aligned (foldable per axis) and the rest.
    // An axis root √2·e_j contributes |⟨α,x⟩|^{2k} = 2^k |x_j|^{2k}: the
    // power is folded into the Jacobi rule and the constant kept separately.
    let mut axis_exponent = vec![0.0f64; dim];
    let mut axis_scale = vec![1.0f64; dim];
    let mut skew: Vec<usize> = Vec::new();
    for (idx, root) in ctx.system().positive_roots() {
        let live: Vec<usize> = (0..dim)
            .filter(|&j| root.coords()[j].abs() > 1e-12)
            .collect();
        if live.len() == 1 {
            let k = ctx.k_of_root(idx);
            axis_exponent[live[0]] += 2.0 * k;
            axis_scale[live[0]] *= root.coords()[live[0]].abs().powf(2.0 * k);
        } else {
            skew.push(idx);
        }
    }

    let mut rule: Option<Rule> = None;
    for d in 0..dim {
        let e = axis_exponent[d];
        let mut pairs: Vec<(f64, f64)> = if e == 0.0 {
            gauss_legendre_on(lo[d], hi[d], n)
        } else if lo[d] < 0.0 && hi[d] > 0.0 {
            // |x|^e folded on both sides of the mirror at 0.
            let mut p: Vec<(f64, f64)> = radial_power_rule(e, -lo[d], n)?
                .into_iter()
                .map(|(r, w)| (-r, w))
                .collect();
            p.extend(radial_power_rule(e, hi[d], n)?);
            p
        } else if lo[d] >= 0.0 {
            if lo[d] == 0.0 {
                radial_power_rule(e, hi[d], n)?
            } else {
                radial_segment_rule(e, lo[d], hi[d], n)?
            }
        } else {
            // hi[d] <= 0: mirror image of the previous case.
            if hi[d] == 0.0 {
                radial_power_rule(e, -lo[d], n)?
                    .into_iter()
                    .map(|(r, w)| (-r, w))
                    .collect()
            } else {
                radial_segment_rule(e, -hi[d], -lo[d], n)?
                    .into_iter()
                    .map(|(r, w)| (-r, w))
                    .collect()
            }
        };
        if axis_scale[d] != 1.0 {
            for (_, w) in pairs.iter_mut() {
                *w *= axis_scale[d];
            }
        }
        let axis = onedim_rule(pairs, String::new());
        rule = Some(match rule {
            None => axis,
            Some(r) => r.product_with(&axis, |a, b| {
                let mut v = a.to_vec();
                v.push(b[0]);
                v
            }),
        });
    }
    let mut rule = rule.expect("dimension is at least one");
    rule.label = format!("box-mu[{n}]^{dim}");
    if rule.len() > 4_000_000 {
        return Err(QuadratureError::BadRule(format!(
            "box rule too large ({} nodes)",
            rule.len()
        )));
    }

    // Pointwise factors of the non-axis roots.
    if !skew.is_empty() {
        for (node, w) in rule.nodes.iter().zip(rule.weights.iter_mut()) {
            let mut factor = 1.0;
            for &idx in &skew {
                let root = ctx.system().root(idx);
                let dot = root.inner(node);
                factor *= dot.abs().powf(2.0 * ctx.k_of_root(idx));
            }
            *w *= factor;
        }
    }
    Ok(rule)
}

/// Polar rule on the centered ball of the given radius for
/// `∫_B f(x) |x|^σ dμ_k(x)`; requires `N + 2γ + σ > 0`.
pub fn ball_rule(
    ctx: &DunklContext,
    radius: f64,
    sigma: f64,
    level: usize,
) -> Result<Rule, QuadratureError> {
    let rho = radial_exponent(ctx, sigma)?;
    let radial = onedim_rule(
        radial_power_rule(rho, radius, level)?,
        format!("radial[{level}]"),
    );
    let sph = sphere_rule(ctx, level)?;
    Ok(polar_product(radial, sph))
}

/// Polar rule on the annulus `r_in ≤ |x| ≤ r_out` for the same integrand
/// family as [`ball_rule`].
pub fn annulus_rule(
    ctx: &DunklContext,
    r_in: f64,
    r_out: f64,
    sigma: f64,
    level: usize,
) -> Result<Rule, QuadratureError> {
    let dim = ctx.dim() as f64;
    let rho = dim - 1.0 + 2.0 * ctx.gamma() + sigma;
    let radial = onedim_rule(
        radial_segment_rule(rho, r_in, r_out, level)?,
        format!("radial[{level}]"),
    );
    let sph = sphere_rule(ctx, level)?;
    Ok(polar_product(radial, sph))
}

/// Polar rule on all of ℝ^N for integrands decaying at least like a Gaussian
/// with the given length scale.
pub fn full_space_rule(
    ctx: &DunklContext,
    sigma: f64,
    scale: f64,
    level: usize,
) -> Result<Rule, QuadratureError> {
    let rho = radial_exponent(ctx, sigma)?;
    let radial = onedim_rule(
        halfline_rule(rho, scale, level)?,
        format!("halfline[{level}]"),
    );
    let sph = sphere_rule(ctx, level)?;
    Ok(polar_product(radial, sph))
}

fn radial_exponent(ctx: &DunklContext, sigma: f64) -> Result<f64, QuadratureError> {
    let dim = ctx.dim() as f64;
    let rho = dim - 1.0 + 2.0 * ctx.gamma() + sigma;
    if rho <= -1.0 {
        return Err(QuadratureError::BadRule(format!(
            "radial exponent {rho} is not integrable at the origin"
        )));
    }
    Ok(rho)
}

fn polar_product(radial: Rule, sph: Rule) -> Rule {
    radial.product_with(&sph, |r, xi| xi.iter().map(|c| c * r[0]).collect())
}

/// Total mass of the weighted sphere: `∫_{S^{N-1}} w_k dσ`.
pub fn sphere_constant(
    ctx: &DunklContext,
    levels: Levels,
) -> Result<IntegralEstimate, QuadratureError> {
    two_level(|lvl| sphere_rule(ctx, lvl), |_| 1.0, levels)
}

/// The Gaussian total mass `∫_{ℝ^N} e^{-|x|²/2} dμ_k(x)`.
pub fn macdonald_integral(
    ctx: &DunklContext,
    levels: Levels,
) -> Result<IntegralEstimate, QuadratureError> {
    two_level(
        |lvl| full_space_rule(ctx, 0.0, 1.3, lvl),
        |x| {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            (-r2 / 2.0).exp()
        },
        levels,
    )
}
