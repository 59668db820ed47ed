//! Unweighted many-particle inequalities: the classical Dirichlet energy on
//! Lebesgue measure dominates a multiplicity-built potential with inverse
//! squares along root hyperplanes plus a radial Hardy term, for every
//! multiplicity, with coefficients maximized at k ≡ 1/2.

use dunkl_core::quadrature::{box_rule_lebesgue, two_level, IntegralEstimate, QuadratureError};
use dunkl_core::root_system::{DunklContext, MultiplicityFunction};

use super::{chamber_center, SuiteEnv, TheoremCheck};
use crate::report::Report;
use crate::testfn;

fn lambda_of(ctx: &DunklContext) -> f64 {
    let nu = ctx.homogeneous_dim();
    (nu - 2.0) * (nu - 2.0) / 4.0
}

/// `V(x) = 2 Σ_{α>0} (k_α - k_α²)/⟨α,x⟩² + Λ/|x|²` with the context's
/// multiplicities and its own Λ.
pub fn drift_potential(ctx: &DunklContext, x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let mut v = lambda_of(ctx) / r2;
    for (i, root) in ctx.system().positive_roots() {
        let k = ctx.k_of_root(i);
        let t = root.inner(x);
        v += 2.0 * (k - k * k) / (t * t);
    }
    v
}

struct ChamberBump {
    field: dunkl_core::ScalarField,
    lo: Vec<f64>,
    hi: Vec<f64>,
    center: Vec<f64>,
}

fn chamber_bump(ctx: &DunklContext) -> ChamberBump {
    let (center, dist) = chamber_center(ctx, 2.2);
    let rho = (0.75 * dist).min(0.9);
    let field = testfn::mollifier(&center, rho);
    let lo: Vec<f64> = center.iter().map(|c| c - rho - 0.05).collect();
    let hi: Vec<f64> = center.iter().map(|c| c + rho + 0.05).collect();
    ChamberBump {
        field,
        lo,
        hi,
        center,
    }
}

fn box_estimate(
    env: &SuiteEnv,
    lo: &[f64],
    hi: &[f64],
    f: impl Fn(&[f64]) -> f64,
) -> Result<IntegralEstimate, QuadratureError> {
    two_level(|l| box_rule_lebesgue(lo, hi, l), &f, env.levels)
}

fn lebesgue_energy(
    env: &SuiteEnv,
    bump: &ChamberBump,
) -> Result<IntegralEstimate, QuadratureError> {
    box_estimate(env, &bump.lo, &bump.hi, |x| {
        let g = bump.field.grad(x);
        g.iter().map(|v| v * v).sum()
    })
}

fn half_context(ctx: &DunklContext) -> DunklContext {
    let orbits = ctx.system().num_orbits();
    let k = MultiplicityFunction::parse(&vec!["1/2"; orbits]).expect("1/2 parses");
    DunklContext::new(ctx.system().clone(), k).expect("orbit count matches")
}

/// Classical Dirichlet energy versus the multiplicity potential, for the
/// job's multiplicity and for the optimal choice k ≡ 1/2.
pub struct ManyParticle;

impl TheoremCheck for ManyParticle {
    fn id(&self) -> &'static str {
        "thm7.1"
    }

    fn title(&self) -> &'static str {
        "unweighted many-particle Hardy inequality with root-hyperplane potential"
    }

    fn run(&self, env: &SuiteEnv) -> Vec<Report> {
        let ctx = env.ctx;
        let bump = chamber_bump(ctx);
        let mut rows = Vec::new();

        let lhs = lebesgue_energy(env, &bump);
        let rhs = box_estimate(env, &bump.lo, &bump.hi, |x| {
            let v = bump.field.eval(x);
            v * v * drift_potential(ctx, x)
        });
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => rows.push(
                super::margin_row(self.id(), env.sub("job multiplicity"), &l, &r, 1.0)
                    .with_note("classical gradient, Lebesgue measure, chamber bump"),
            ),
            (Err(e), _) | (_, Err(e)) => rows.push(
                Report::residual(self.id(), env.label(), f64::INFINITY, 0.0)
                    .with_note(format!("quadrature failure: {e}")),
            ),
        }

        // k ≡ 1/2: every inverse-square coefficient hits its maximum 1/2 and
        // the radial constant becomes (N + |R_+| - 2)²/4.
        let half = half_context(ctx);
        let n = ctx.dim() as f64;
        let npos = ctx.system().num_positive() as f64;
        let closed = (n + npos - 2.0) * (n + npos - 2.0) / 4.0;
        rows.push(
            Report::residual(
                self.id(),
                env.sub("radial constant at k ≡ 1/2"),
                (lambda_of(&half) - closed).abs(),
                1e-12,
            )
            .with_note(format!("(N + |R_+| - 2)²/4 = {closed}")),
        );
        let lhs_h = lebesgue_energy(env, &bump);
        let rhs_h = box_estimate(env, &bump.lo, &bump.hi, |x| {
            let v = bump.field.eval(x);
            v * v * drift_potential(&half, x)
        });
        match (lhs_h, rhs_h) {
            (Ok(l), Ok(r)) => rows.push(
                super::margin_row(
                    self.id(),
                    env.sub("optimal multiplicity k ≡ 1/2"),
                    &l,
                    &r,
                    1.0,
                )
                .with_note("coefficient 2(k - k²) = 1/2 on every hyperplane"),
            ),
            (Err(e), _) | (_, Err(e)) => rows.push(
                Report::residual(
                    self.id(),
                    env.sub("optimal multiplicity"),
                    f64::INFINITY,
                    0.0,
                )
                .with_note(format!("quadrature failure: {e}")),
            ),
        }
        let max_other = [0.3f64, 0.4, 0.6, 0.7]
            .iter()
            .map(|&k| 2.0 * (k - k * k))
            .fold(f64::NEG_INFINITY, f64::max);
        rows.push(
            Report::residual(
                self.id(),
                env.sub("coefficient optimality near k = 1/2"),
                max_other,
                0.5,
            )
            .with_note("2(k - k²) peaks at k = 1/2 with value 1/2"),
        );
        let _ = bump.center;
        rows
    }
}

/// Specialization to the symmetric-group systems: pair differences only,
/// with the radial constant written through N and k.
pub struct TypeARadial;

impl TheoremCheck for TypeARadial {
    fn id(&self) -> &'static str {
        "cor7.2"
    }

    fn title(&self) -> &'static str {
        "many-particle inequality for pair-difference systems"
    }

    fn run(&self, env: &SuiteEnv) -> Vec<Report> {
        let ctx = env.ctx;
        if !ctx.system().label().starts_with('A') {
            return vec![Report::skip(
                self.id(),
                env.label(),
                "statement is specific to the pair-difference family",
            )];
        }
        let n = ctx.dim() as f64;
        let k = ctx.multiplicities().value(0);
        let cor_const = (n + k * n * (n - 1.0) - 2.0).powi(2) / 4.0;
        let mut rows = vec![Report::residual(
            self.id(),
            env.sub("radial constant via N and k"),
            (cor_const - lambda_of(ctx)).abs(),
            1e-12,
        )
        .with_note(format!("(N + kN(N-1) - 2)²/4 = {cor_const}"))];

        let dim = ctx.dim();
        let coord_potential = move |x: &[f64], kk: f64, cc: f64| -> f64 {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            let mut v = cc / r2;
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let d = x[i] - x[j];
                    v += 2.0 * (kk - kk * kk) / (d * d);
                }
            }
            v
        };

        let bump = chamber_bump(ctx);
        rows.push(
            Report::residual(
                self.id(),
                env.sub("potential agrees with the generic form"),
                (coord_potential(&bump.center, k, cor_const) - drift_potential(ctx, &bump.center))
                    .abs(),
                1e-12,
            )
            .with_note("coordinate formula vs root-system formula at the chamber point"),
        );

        let lhs = lebesgue_energy(env, &bump);
        let rhs = box_estimate(env, &bump.lo, &bump.hi, |x| {
            let v = bump.field.eval(x);
            v * v * coord_potential(x, k, cor_const)
        });
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => rows.push(super::margin_row(
                self.id(),
                env.sub("pair-difference potential"),
                &l,
                &r,
                1.0,
            )),
            (Err(e), _) | (_, Err(e)) => rows.push(
                Report::residual(self.id(), env.label(), f64::INFINITY, 0.0)
                    .with_note(format!("quadrature failure: {e}")),
            ),
        }

        let half_const = (n + 0.5 * n * (n - 1.0) - 2.0).powi(2) / 4.0;
        let closed = (n * n + n - 4.0) * (n * n + n - 4.0) / 16.0;
        rows.push(
            Report::residual(
                self.id(),
                env.sub("k = 1/2 radial constant"),
                (half_const - closed).abs(),
                1e-12,
            )
            .with_note(format!("(N² + N - 4)²/16 = {closed}")),
        );
        rows
    }
}

/// Specialization to the signed-permutation systems: axis terms with
/// multiplicity k₁ and pair terms (differences and sums) with k₂.
pub struct TypeBRadial;

impl TheoremCheck for TypeBRadial {
    fn id(&self) -> &'static str {
        "cor7.3"
    }

    fn title(&self) -> &'static str {
        "many-particle inequality for signed-permutation systems"
    }

    fn run(&self, env: &SuiteEnv) -> Vec<Report> {
        let ctx = env.ctx;
        if !ctx.system().label().starts_with('B') {
            return vec![Report::skip(
                self.id(),
                env.label(),
                "statement is specific to the signed-permutation family",
            )];
        }
        let n = ctx.dim() as f64;
        let k1 = ctx.multiplicities().value(0);
        let k2 = ctx.multiplicities().value(1);
        // 2γ = 2k₁N + 2k₂N(N-1): both pair orbits (differences and sums)
        // carry k₂, so the N(N-1) term enters with the factor 2.
        let radial = |a: f64, b: f64| -> f64 {
            (n + 2.0 * a * n + 2.0 * b * n * (n - 1.0) - 2.0).powi(2) / 4.0
        };
        let cor_const = radial(k1, k2);
        let mut rows = vec![Report::residual(
            self.id(),
            env.sub("radial constant via N, k₁, k₂"),
            (cor_const - lambda_of(ctx)).abs(),
            1e-12,
        )
        .with_note(format!("(N + 2k₁N + 2k₂N(N-1) - 2)²/4 = {cor_const}"))];

        let dim = ctx.dim();
        let coord_potential = move |x: &[f64], a: f64, b: f64, cc: f64| -> f64 {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            let mut v = cc / r2;
            for xi in x.iter().take(dim) {
                v += (a - a * a) / (xi * xi);
            }
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let d = x[i] - x[j];
                    let s = x[i] + x[j];
                    v += 2.0 * (b - b * b) * (1.0 / (d * d) + 1.0 / (s * s));
                }
            }
            v
        };

        let bump = chamber_bump(ctx);
        rows.push(
            Report::residual(
                self.id(),
                env.sub("potential agrees with the generic form"),
                (coord_potential(&bump.center, k1, k2, cor_const)
                    - drift_potential(ctx, &bump.center))
                .abs(),
                1e-12,
            )
            .with_note("coordinate formula vs root-system formula at the chamber point"),
        );

        let lhs = lebesgue_energy(env, &bump);
        let rhs = box_estimate(env, &bump.lo, &bump.hi, |x| {
            let v = bump.field.eval(x);
            v * v * coord_potential(x, k1, k2, cor_const)
        });
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => rows.push(super::margin_row(
                self.id(),
                env.sub("axis + pair potential"),
                &l,
                &r,
                1.0,
            )),
            (Err(e), _) | (_, Err(e)) => rows.push(
                Report::residual(self.id(), env.label(), f64::INFINITY, 0.0)
                    .with_note(format!("quadrature failure: {e}")),
            ),
        }

        // k = (1/2, 0): axis coefficient 1/4, radial constant (N-1)².
        let tid = {
            let k = MultiplicityFunction::parse(&["1/2", "0"]).expect("parses");
            DunklContext::new(ctx.system().clone(), k).expect("orbit count matches")
        };
        rows.push(
            Report::residual(
                self.id(),
                env.sub("k = (1/2, 0) radial constant"),
                (lambda_of(&tid) - (n - 1.0) * (n - 1.0)).abs(),
                1e-12,
            )
            .with_note(format!("(N-1)² = {}", (n - 1.0) * (n - 1.0))),
        );
        let rhs_tid = box_estimate(env, &bump.lo, &bump.hi, |x| {
            let v = bump.field.eval(x);
            let mut p = (n - 1.0) * (n - 1.0) / x.iter().map(|t| t * t).sum::<f64>();
            for t in x {
                p += 0.25 / (t * t);
            }
            v * v * p
        });
        match (lebesgue_energy(env, &bump), rhs_tid) {
            (Ok(l), Ok(r)) => rows.push(
                super::margin_row(self.id(), env.sub("k = (1/2, 0) potential"), &l, &r, 1.0)
                    .with_note("axis coefficient 1/4 and radial constant (N-1)²"),
            ),
            (Err(e), _) | (_, Err(e)) => rows.push(
                Report::residual(self.id(), env.sub("k = (1/2, 0)"), f64::INFINITY, 0.0)
                    .with_note(format!("quadrature failure: {e}")),
            ),
        }
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dunkl_core::quadrature::Levels;
    use dunkl_core::root_system::Family;

    fn quick_env(ctx: &DunklContext) -> SuiteEnv<'_> {
        SuiteEnv {
            ctx,
            levels: Levels::new(8, 14),
            seed: 3,
            job_index: 0,
            functions: &[],
        }
    }

    #[test]
    fn drift_potential_matches_hand_formula_on_axis_system() {
        // Z2 ⊕ Z2 with k = (1/2, 3/4): roots √2·e₁, √2·e₂.
        let ctx = DunklContext::build(&Family::Z2Power { n: 2 }, &[0.5, 0.75]).unwrap();
        let x = [1.3, -0.7];
        let nu = ctx.homogeneous_dim();
        let lam = (nu - 2.0) * (nu - 2.0) / 4.0;
        let by_hand = lam / (x[0] * x[0] + x[1] * x[1])
            + 2.0 * (0.5 - 0.25) / (2.0 * x[0] * x[0])
            + 2.0 * (0.75 - 0.5625) / (2.0 * x[1] * x[1]);
        assert!((drift_potential(&ctx, &x) - by_hand).abs() < 1e-14);
    }

    #[test]
    fn b2_radial_constant_closed_form() {
        // γ = 2k₁ + 2k₂ for N = 2, so ν = 2 + 2γ and the displayed constant
        // must equal (ν-2)²/4 exactly.
        let ctx = DunklContext::build(&Family::B { rank: 2 }, &[0.3, 0.7]).unwrap();
        let nu = ctx.homogeneous_dim();
        assert!((nu - 6.0).abs() < 1e-12);
        let formula = (2.0 + 2.0 * 0.3 * 2.0 + 2.0 * 0.7 * 2.0 - 2.0f64).powi(2) / 4.0;
        assert!((formula - 4.0).abs() < 1e-12);
        assert!((formula - lambda_of(&ctx)).abs() < 1e-12);
    }

    #[test]
    fn many_particle_rows_pass_on_axis_system() {
        let ctx = DunklContext::build(&Family::Z2Power { n: 2 }, &[0.5, 0.75]).unwrap();
        let env = quick_env(&ctx);
        let rows = ManyParticle.run(&env);
        assert_eq!(rows.len(), 4);
        for r in rows {
            assert!(r.pass, "row failed: {}", r.to_json_line());
        }
    }

    #[test]
    fn many_particle_holds_for_large_multiplicity() {
        // k > 1 flips the hyperplane coefficients negative; the inequality
        // still holds because it is a disguised weighted Hardy bound.
        let ctx = DunklContext::build(&Family::Z2Power { n: 1 }, &[1.5]).unwrap();
        let env = quick_env(&ctx);
        for r in ManyParticle.run(&env) {
            assert!(r.pass, "row failed: {}", r.to_json_line());
        }
    }

    #[test]
    fn type_a_skips_elsewhere_and_passes_on_a2() {
        let b2 = DunklContext::build(&Family::B { rank: 2 }, &[0.3, 0.7]).unwrap();
        let env_b = quick_env(&b2);
        let rows = TypeARadial.run(&env_b);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].kind, crate::report::ReportKind::Skip);

        let a2 = DunklContext::build(&Family::A { rank: 2 }, &[0.5]).unwrap();
        let env_a = quick_env(&a2);
        for r in TypeARadial.run(&env_a) {
            assert!(r.pass, "row failed: {}", r.to_json_line());
        }
    }

    #[test]
    fn type_b_rows_pass_on_b2() {
        let ctx = DunklContext::build(&Family::B { rank: 2 }, &[0.3, 0.7]).unwrap();
        let env = quick_env(&ctx);
        let rows = TypeBRadial.run(&env);
        assert_eq!(rows.len(), 5);
        for r in rows {
            assert!(r.pass, "row failed: {}", r.to_json_line());
        }
    }
}
