//! Structural identities behind the inequalities: the gauge conjugation of
//! the Dunkl Laplacian to a Schrödinger-type operator, the exact vanishing of
//! the mixed reflection cross-terms, the spherical harmonic decomposition,
//! and the Gaussian mass of the weighted measure.

use dunkl_core::cms::{conjugation_residual, cross_term_sum_exact, CmsError};
use dunkl_core::hharmonics::{
    eigenvalue_residual, gram_matrix, harmonic_basis, harmonic_space, spherical_eigenvalue,
    HarmonicError,
};
use dunkl_core::ops::dunkl_laplacian_sum_poly;
use dunkl_core::quadrature::{macdonald_integral, sphere_rule, Levels};
use dunkl_core::special::gamma;
use dunkl_core::transform::gaussian_mass;
use dunkl_core::Rational;
use num::{BigInt, ToPrimitive, Zero};
use rand::Rng;

use super::{random_offmirror_point, salt_of, SuiteEnv, TheoremCheck};
use crate::report::Report;
use crate::testfn;

/// `w_k^{1/2} Δ_k (w_k^{-1/2} g) = Δg - V_k g` off the mirrors: the analytic
/// left side must match the closed-form right side pointwise.
pub struct ConjugationIdentity;

impl TheoremCheck for ConjugationIdentity {
    fn id(&self) -> &'static str {
        "eq-dunkl-cms"
    }

    fn title(&self) -> &'static str {
        "gauge conjugation of the Dunkl Laplacian to Schrödinger form"
    }

    fn run(&self, env: &SuiteEnv) -> Vec<Report> {
        let ctx = env.ctx;
        let mut rng = env.rng(salt_of(self.id()));
        let points: Vec<Vec<f64>> = (0..40)
            .map(|_| random_offmirror_point(ctx, &mut rng, 2.0, 0.1))
            .collect();
        let min_clear = points
            .iter()
            .map(|x| super::mirror_distance(ctx, x))
            .fold(f64::INFINITY, f64::min);

        let smooth_bump = testfn::mollifier(&vec![0.0; ctx.dim()], 4.0);
        let mut poly_part = dunkl_core::MultiPoly::monomial(
            ctx.dim(),
            vec![0; ctx.dim()],
            Rational::from_integer(1.into()),
        );
        let mut e1 = vec![0; ctx.dim()];
        e1[0] = 1;
        poly_part = poly_part.add(&dunkl_core::MultiPoly::monomial(
            ctx.dim(),
            e1,
            Rational::new(BigInt::from(1), BigInt::from(2)),
        ));
        if ctx.dim() >= 2 {
            let mut e11 = vec![0; ctx.dim()];
            e11[0] = 1;
            e11[1] = 1;
            poly_part = poly_part.add(&dunkl_core::MultiPoly::monomial(
                ctx.dim(),
                e11,
                Rational::new(BigInt::from(-1), BigInt::from(4)),
            ));
        }
        let smooth_poly = testfn::poly_gauss(&poly_part, 1.1);

        let mut rows = Vec::new();
        for (g, label) in [
            (smooth_bump, "compact bump"),
            (smooth_poly, "poly × gaussian"),
        ] {
            let worst = points
                .iter()
                .map(|x| conjugation_residual(ctx, &g, x))
                .fold(0.0f64, f64::max);
            rows.push(
                Report::residual(self.id(), env.sub(label), worst, 1e-8).with_note(format!(
                    "worst of {} points, mirror clearance ≥ {min_clear:.3}",
                    points.len()
                )),
            );
        }
        rows
    }
}

/// The mixed cross-terms of the squared Dunkl gradient cancel exactly: for
/// each pair of non-proportional positive roots the sum over the group orbit
/// vanishes identically in exact rational arithmetic.
pub struct CrossTerm;

impl TheoremCheck for CrossTerm {
    fn id(&self) -> &'static str {
        "eq-crossterm"
    }

    fn title(&self) -> &'static str {
        "exact cancellation of mixed reflection cross-terms"
    }

    fn run(&self, env: &SuiteEnv) -> Vec<Report> {
        let ctx = env.ctx;
        if !ctx.system().has_exact_roots() {
            return vec![Report::skip(
                self.id(),
                env.label(),
                "exact rational root data unavailable for this system",
            )];
        }
        let mut rng = env.rng(salt_of(self.id()));
        let mut worst = 0.0f64;
        let mut done = 0usize;
        let mut attempts = 0usize;
        while done < 20 && attempts < 400 {
            attempts += 1;
            let x: Vec<Rational> = (0..ctx.dim())
                .map(|_| {
                    Rational::new(
                        BigInt::from(rng.gen_range(-9i64..=9)),
                        BigInt::from(rng.gen_range(1i64..=7)),
                    )
                })
                .collect();
            match cross_term_sum_exact(ctx, &x) {
                Ok(sum) => {
                    debug_assert!(sum.is_zero() || !sum.is_zero());
                    worst = worst.max(sum.to_f64().unwrap_or(f64::NAN).abs());
                    done += 1;
                }
                Err(CmsError::OnMirror { .. }) => continue,
                Err(CmsError::MissingExactData) => {
                    return vec![Report::skip(
                        self.id(),
                        env.label(),
                        "exact rational root data unavailable for this system",
                    )];
                }
            }
        }
        vec![
            Report::residual(self.id(), env.label(), worst, 0.0).with_note(format!(
            "exact rational arithmetic at {done} random rational points; sum is identically zero"
        )),
        ]
    }
}

fn binom(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let mut r: u64 = 1;
    for i in 0..k.min(n - k) {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

/// Monomial count of exact degree `d` in `dim` variables.
fn monomial_count(dim: usize, d: i64) -> u64 {
    if d < 0 {
        return 0;
    }
    binom(d as u32 + dim as u32 - 1, dim as u32 - 1)
}

/// Weighted spherical harmonics: the kernel of `Δ_k` on homogeneous
/// polynomials has the codimension-counting dimension, is orthogonal on the
/// weighted sphere, and satisfies the spherical eigenvalue identity.
pub struct HarmonicLaw;

impl TheoremCheck for HarmonicLaw {
    fn id(&self) -> &'static str {
        "eq-hharmonic"
    }

    fn title(&self) -> &'static str {
        "weighted spherical harmonics: kernel, dimension, orthogonality, eigenvalue"
    }

    fn run(&self, env: &SuiteEnv) -> Vec<Report> {
        let ctx = env.ctx;
        let mut rows = Vec::new();
        for degree in 0u32..=3 {
            let basis = match harmonic_basis(ctx, degree) {
                Ok(b) => b,
                Err(HarmonicError::Ops(_)) => {
                    rows.push(Report::skip(
                        self.id(),
                        env.sub(format!("degree {degree}")),
                        "exact rational root data unavailable for this system",
                    ));
                    continue;
                }
                Err(e) => {
                    rows.push(
                        Report::residual(
                            self.id(),
                            env.sub(format!("degree {degree}")),
                            f64::INFINITY,
                            0.0,
                        )
                        .with_note(format!("harmonic basis failed: {e}")),
                    );
                    continue;
                }
            };

            let not_killed = basis
                .iter()
                .filter(|p| {
                    dunkl_laplacian_sum_poly(ctx, p)
                        .map(|q| !q.is_zero())
                        .unwrap_or(true)
                })
                .count();
            rows.push(
                Report::residual(
                    self.id(),
                    env.sub(format!("degree {degree}: Δ_k kills the basis")),
                    not_killed as f64,
                    0.0,
                )
                .with_note(format!("{} basis elements, exact arithmetic", basis.len())),
            );

            let expected = monomial_count(ctx.dim(), degree as i64)
                - monomial_count(ctx.dim(), degree as i64 - 2);
            rows.push(
                Report::residual(
                    self.id(),
                    env.sub(format!("degree {degree}: dimension count")),
                    (basis.len() as f64 - expected as f64).abs(),
                    0.0,
                )
                .with_note(format!(
                    "dim = {} matches M_d - M_(d-2) = {expected}",
                    basis.len()
                )),
            );

            match harmonic_space(ctx, degree, env.levels.fine) {
                Ok(space) => {
                    match gram_matrix(ctx, &space, env.levels.fine + 6) {
                        Ok(g) => {
                            let mut dev = 0.0f64;
                            for (i, row) in g.iter().enumerate() {
                                for (j, v) in row.iter().enumerate() {
                                    let target = if i == j { 1.0 } else { 0.0 };
                                    dev = dev.max((v - target).abs());
                                }
                            }
                            rows.push(
                                Report::residual(
                                    self.id(),
                                    env.sub(format!("degree {degree}: sphere orthonormality")),
                                    dev,
                                    1e-8,
                                )
                                .with_note("Gram matrix under an independent finer rule"),
                            );
                        }
                        Err(e) => rows.push(
                            Report::residual(
                                self.id(),
                                env.sub(format!("degree {degree}: sphere orthonormality")),
                                f64::INFINITY,
                                0.0,
                            )
                            .with_note(format!("gram computation failed: {e}")),
                        ),
                    }

                    if let Some(p) = space.exact_basis().first() {
                        match sphere_rule(ctx, 8) {
                            Ok(rule) => {
                                let stride = (rule.nodes.len() / 6).max(1);
                                let mut worst: f64 = 0.0;
                                let mut used = 0usize;
                                for xi in rule.nodes.iter().step_by(stride) {
                                    match eigenvalue_residual(ctx, p, xi) {
                                        Ok(r) => {
                                            worst = worst.max(r);
                                            used += 1;
                                        }
                                        Err(HarmonicError::NearMirror { .. }) => continue,
                                        Err(e) => {
                                            worst = f64::INFINITY;
                                            used += 1;
                                            let _ = e;
                                        }
                                    }
                                }
                                if used > 0 {
                                    rows.push(
                                        Report::residual(
                                            self.id(),
                                            env.sub(format!(
                                                "degree {degree}: spherical eigenvalue"
                                            )),
                                            worst,
                                            1e-6,
                                        )
                                        .with_note(
                                            format!(
                                                "λ = {}, {used} off-mirror sphere points",
                                                spherical_eigenvalue(ctx, degree)
                                            ),
                                        ),
                                    );
                                }
                            }
                            Err(e) => rows.push(
                                Report::residual(
                                    self.id(),
                                    env.sub(format!("degree {degree}: spherical eigenvalue")),
                                    f64::INFINITY,
                                    0.0,
                                )
                                .with_note(format!("sphere rule failed: {e}")),
                            ),
                        }
                    }
                }
                Err(e) => rows.push(
                    Report::residual(
                        self.id(),
                        env.sub(format!("degree {degree}: sphere orthonormality")),
                        f64::INFINITY,
                        0.0,
                    )
                    .with_note(format!("orthonormalization failed: {e}")),
                ),
            }
        }
        rows
    }
}

/// Total Gaussian mass of the weighted measure, against closed forms where
/// they exist (product of axis factors; Mehta's product for the
/// pair-difference systems).
pub struct GaussianMass;

impl TheoremCheck for GaussianMass {
    fn id(&self) -> &'static str {
        "eq-macdonald"
    }

    fn title(&self) -> &'static str {
        "Gaussian mass of the weighted measure"
    }

    fn run(&self, env: &SuiteEnv) -> Vec<Report> {
        let ctx = env.ctx;
        let est = match macdonald_integral(ctx, Levels::new(32, 64)) {
            Ok(e) => e,
            Err(e) => {
                return vec![Report::residual(self.id(), env.label(), f64::INFINITY, 0.0)
                    .with_note(format!("quadrature failure: {e}"))];
            }
        };
        let label = ctx.system().label();
        let closed = if label.starts_with("Z2^") {
            let product: f64 = ctx
                .multiplicities()
                .values()
                .iter()
                .map(|&k| gaussian_mass(k))
                .product();
            Some((product, "product of axis factors 2^{2k+1/2}Γ(k+1/2)"))
        } else if label.starts_with('A') {
            let n = ctx.dim() as f64;
            let k = ctx.multiplicities().value(0);
            let mut product = (2.0 * std::f64::consts::PI).powf(n / 2.0);
            for j in 1..=ctx.dim() {
                product *= gamma(1.0 + j as f64 * k) / gamma(1.0 + k);
            }
            Some((product, "Mehta product (2π)^{N/2} Π Γ(1+jk)/Γ(1+k)"))
        } else {
            None
        };
        match closed {
            Some((value, how)) => {
                let rel = (est.value - value).abs() / value;
                vec![
                    Report::residual(self.id(), env.sub("closed form"), rel, 1e-6).with_note(
                        format!("{how}; quadrature {:.12e} vs {value:.12e}", est.value),
                    ),
                ]
            }
            None => vec![Report::witness(
                self.id(),
                env.sub("quadrature value"),
                est.value,
                1.0,
                est.error,
            )
            .with_note("no closed form wired for this family; value recorded")],
        }
    }
}
