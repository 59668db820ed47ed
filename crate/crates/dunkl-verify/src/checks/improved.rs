//! Logarithmically improved Hardy inequalities on bounded supports: the
//! remainder term with the weight `X(t) = (1 - ln t)^{-1}`, its
//! one-dimensional backbone lemma, and the derived remainder/Poincaré
//! estimates.

use dunkl_core::ops::dunkl_gradient_field;
use dunkl_core::quadrature::gauss_legendre_on;

use super::{mu_estimate, salt_of, SuiteEnv, TheoremCheck};
use crate::report::Report;
use crate::testfn;

/// `X(t) = 1/(1 - ln t)` on `(0, 1]`, extended by 0 below and 1 above.
pub fn log_weight(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        1.0 / (1.0 - t.ln())
    }
}

fn gl_sum(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    gauss_legendre_on(lo, hi, n)
        .into_iter()
        .map(|(x, w)| w * f(x))
        .sum()
}

/// A bump adapted to a ball of radius δ: support radius 1.3, well inside the
/// default δ = 1.8.
fn delta_bump(env: &SuiteEnv) -> (testfn::FunctionSpec, f64) {
    let dim = env.ctx.dim();
    let mut u: Vec<f64> = (0..dim).map(|j| 0.8f64.powi(j as i32)).collect();
    let un = u.iter().map(|t| t * t).sum::<f64>().sqrt();
    for t in u.iter_mut() {
        *t *= 0.3 / un;
    }
    (
        testfn::FunctionSpec::Mollifier {
            center: u,
            radius: 1.0,
        },
        1.3,
    )
}

/// Hardy with a logarithmic remainder on a ball: the remainder
/// `∫|∇_k f|² dμ - Λ ∫ f²|x|^{-2} dμ` dominates a constant times
/// `(∫ |f|^q X^{1+q/2}(|x|/δ) dμ)^{2/q}` with `q = 2ν/(ν-2)`.
pub struct ImprovedHardy;

impl TheoremCheck for ImprovedHardy {
    fn id(&self) -> &'static str {
        "thm5.1"
    }

    fn title(&self) -> &'static str {
        "logarithmically improved Hardy inequality on a ball"
    }

    fn run(&self, env: &SuiteEnv) -> Vec<Report> {
        let ctx = env.ctx;
        let nu = ctx.homogeneous_dim();
        if nu <= 2.0 {
            return vec![Report::skip(
                self.id(),
                env.label(),
                format!("hypothesis fails: ν = {nu:.6} ≤ 2"),
            )];
        }
        let lam = (nu - 2.0) * (nu - 2.0) / 4.0;
        let q = 2.0 * nu / (nu - 2.0);
        let delta = 1.8;
        let (spec, radius) = delta_bump(env);
        let f = spec.build(ctx.dim()).expect("valid built-in spec");
        let mut rows = Vec::new();

        let lhs = mu_estimate(env, radius, 0.0, |x| {
            let g = dunkl_gradient_field(ctx, &f, x);
            g.iter().map(|v| v * v).sum()
        });
        // Origin-covering bump: fold |x|^{-2} into the radial rule.
        let rhs = mu_estimate(env, radius, -2.0, |x| {
            let v = f.eval(x);
            v * v
        });
        let remainder_term = mu_estimate(env, radius, 0.0, |x| {
            let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let v = f.eval(x).abs();
            v.powf(q) * log_weight(r / delta).powf(1.0 + q / 2.0)
        });
        let remainder_term_2delta = mu_estimate(env, radius, 0.0, |x| {
            let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let v = f.eval(x).abs();
            v.powf(q) * log_weight(r / (2.0 * delta)).powf(1.0 + q / 2.0)
        });

        match (lhs, rhs, remainder_term, remainder_term_2delta) {
            (Ok(l), Ok(r), Ok(s), Ok(s2)) => {
                rows.push(super::margin_row(
                    self.id(),
                    env.sub(format!("Hardy part, {}", spec.label())),
                    &l,
                    &r,
                    lam,
                ));

                let rem = l.value - lam * r.value;
                let rem_err = l.error + lam * r.error;
                let s_val = s.value.powf(2.0 / q);
                let s_err =
                    (s.value + s.error).powf(2.0 / q) - (s.value - s.error).max(0.0).powf(2.0 / q);
                rows.push(
                    Report::witness(
                        self.id(),
                        env.sub(format!("remainder / log term, δ={delta}")),
                        rem,
                        s_val,
                        (rem_err + (rem / s_val).abs() * s_err) / s_val,
                    )
                    .with_note(format!("q = {q:.6}; empirical remainder constant")),
                );

                // Enlarging δ shrinks the weight X(|x|/δ) on a fixed support.
                let sd = s.value;
                let sd2 = s2.value;
                rows.push(
                    Report::margin(
                        self.id(),
                        env.sub("log-term monotonicity in δ"),
                        sd,
                        sd2,
                        1.0,
                        s.error + s2.error,
                    )
                    .with_note("∫|f|^q X^{1+q/2}(|x|/δ) dμ decreases when δ grows"),
                );
            }
            (Err(e), ..) | (_, Err(e), ..) | (_, _, Err(e), _) | (_, _, _, Err(e)) => {
                rows.push(
                    Report::residual(self.id(), env.sub(spec.label()), f64::INFINITY, 0.0)
                        .with_note(format!("quadrature failure: {e}")),
                );
            }
        }
        rows
    }
}

/// One-dimensional backbone: `∫_0^δ t g'(t)² dt` dominates a constant times
/// `(∫_0^δ |g|^q X^{1+q/2}(t/δ) t^{-1} dt)^{2/q}` for `q ≥ 2`.
pub struct LogWeight1d;

impl TheoremCheck for LogWeight1d {
    fn id(&self) -> &'static str {
        "lem5.2"
    }

    fn title(&self) -> &'static str {
        "one-dimensional log-weighted Hardy lemma on an interval"
    }

    fn run(&self, env: &SuiteEnv) -> Vec<Report> {
        if env.ctx.dim() != 1 {
            return vec![Report::skip(
                self.id(),
                env.label(),
                "one-dimensional statement; see the rank-one job",
            )];
        }
        let delta = 1.0;
        let mut rows = Vec::new();

        // Oracle: ∫_0^1 t (1-2t)² dt = 1/6 pins the quadrature plumbing.
        let lhs_oracle = gl_sum(0.0, delta, 200, |t| t * (1.0 - 2.0 * t) * (1.0 - 2.0 * t));
        rows.push(
            Report::residual(
                self.id(),
                env.sub("oracle ∫ t g'² = 1/6"),
                (lhs_oracle - 1.0 / 6.0).abs(),
                1e-12,
            )
            .with_note("g = t(1-t) on [0,1]"),
        );

        type Profile = (fn(f64) -> f64, fn(f64) -> f64, &'static str);
        let g1: Profile = (|t| t * (1.0 - t), |t| 1.0 - 2.0 * t, "g = t(1-t)");
        let g2: Profile = (
            |t| t * t * (1.0 - t) * (1.0 - t),
            |t| 2.0 * t * (1.0 - t) * (1.0 - 2.0 * t),
            "g = t²(1-t)²",
        );
        for (g, gp, label) in [g1, g2] {
            for q in [2.0f64, 4.0] {
                let eval = |n: usize| -> (f64, f64) {
                    let lhs = gl_sum(0.0, delta, n, |t| t * gp(t) * gp(t));
                    let inner = gl_sum(0.0, delta, n, |t| {
                        g(t).abs().powf(q) * log_weight(t / delta).powf(1.0 + q / 2.0) / t
                    });
                    (lhs, inner.powf(2.0 / q))
                };
                let (lc, rc) = eval(200);
                let (lf, rf) = eval(400);
                let ratio_c = lc / rc;
                let ratio_f = lf / rf;
                rows.push(
                    Report::witness(
                        self.id(),
                        env.sub(format!("{label}, q={q}")),
                        lf,
                        rf,
                        (ratio_f - ratio_c).abs(),
                    )
                    .with_note(format!(
                        "ratio {ratio_f:.6}; positive constant exists for q ≥ 2"
                    )),
                );
            }
        }
        rows
    }
}

/// Remainder form on a bounded domain: the Hardy remainder dominates a
/// positive multiple of the plain L² mass.
pub struct HardyRemainder;

impl TheoremCheck for HardyRemainder {
    fn id(&self) -> &'static str {
        "cor5.3"
    }

    fn title(&self) -> &'static str {
        "Hardy remainder dominates the L² mass on bounded supports"
    }

    fn run(&self, env: &SuiteEnv) -> Vec<Report> {
        let ctx = env.ctx;
        let nu = ctx.homogeneous_dim();
        if nu <= 2.0 {
            return vec![Report::skip(
                self.id(),
                env.label(),
                format!("hypothesis fails: ν = {nu:.6} ≤ 2"),
            )];
        }
        let lam = (nu - 2.0) * (nu - 2.0) / 4.0;
        let (spec, radius) = delta_bump(env);
        let f = spec.build(ctx.dim()).expect("valid built-in spec");

        let lhs = mu_estimate(env, radius, 0.0, |x| {
            let g = dunkl_gradient_field(ctx, &f, x);
            g.iter().map(|v| v * v).sum()
        });
        let hardy = mu_estimate(env, radius, -2.0, |x| {
            let v = f.eval(x);
            v * v
        });
        let mass = mu_estimate(env, radius, 0.0, |x| {
            let v = f.eval(x);
            v * v
        });
        match (lhs, hardy, mass) {
            (Ok(l), Ok(h), Ok(m)) => {
                let rem = l.value - lam * h.value;
                let rem_err = l.error + lam * h.error;
                vec![Report::witness(
                    self.id(),
                    env.sub(format!("remainder / mass, {}", spec.label())),
                    rem,
                    m.value,
                    (rem_err + m.error) / m.value.max(1e-300),
                )
                .with_note("empirical domain constant; positive by the remainder bound")]
            }
            (Err(e), ..) | (_, Err(e), _) | (_, _, Err(e)) => {
                vec![
                    Report::residual(self.id(), env.sub(spec.label()), f64::INFINITY, 0.0)
                        .with_note(format!("quadrature failure: {e}")),
                ]
            }
        }
    }
}

/// Poincaré inequality for the Dunkl Dirichlet form on bounded supports,
/// with the exact quadratic rescaling law of the homogeneous measure.
pub struct Poincare;

impl TheoremCheck for Poincare {
    fn id(&self) -> &'static str {
        "cor5.4"
    }

    fn title(&self) -> &'static str {
        "Poincaré inequality and its scaling law"
    }

    fn run(&self, env: &SuiteEnv) -> Vec<Report> {
        let ctx = env.ctx;
        let _ = salt_of(self.id());
        let dim = ctx.dim();
        let mut u: Vec<f64> = (0..dim).map(|j| 0.8f64.powi(j as i32)).collect();
        let un = u.iter().map(|t| t * t).sum::<f64>().sqrt();
        for t in u.iter_mut() {
            *t *= 0.3 / un;
        }
        let rho = 1.0;

        let ratio_of = |scale: f64| -> Result<(f64, f64), String> {
            let center: Vec<f64> = u.iter().map(|t| t * scale).collect();
            let f = testfn::mollifier(&center, rho * scale);
            // The radius scales with the bump so the whole quadrature rule
            // rescales exactly and the homogeneity law survives discretely.
            let radius = (0.3 + rho + 0.05) * scale;
            let energy = mu_estimate(env, radius, 0.0, |x| {
                let g = dunkl_gradient_field(ctx, &f, x);
                g.iter().map(|v| v * v).sum()
            })
            .map_err(|e| e.to_string())?;
            let mass = mu_estimate(env, radius, 0.0, |x| {
                let v = f.eval(x);
                v * v
            })
            .map_err(|e| e.to_string())?;
            let ratio = energy.value / mass.value;
            let err = (energy.error + ratio * mass.error) / mass.value;
            Ok((ratio, err))
        };

        match (ratio_of(1.0), ratio_of(2.0)) {
            (Ok((r1, e1)), Ok((r2, e2))) => {
                let mut rows = vec![Report::witness(
                    self.id(),
                    env.sub("energy / mass on the unit-scale bump"),
                    r1,
                    1.0,
                    e1,
                )
                .with_note("empirical Poincaré constant for the support")];
                // Doubling the support scales energy/mass by exactly 1/4:
                // the measure is homogeneous, so the quotient is pure scaling.
                let residual = (4.0 * r2 / r1 - 1.0).abs();
                rows.push(
                    Report::residual(self.id(), env.sub("quadratic scaling law"), residual, 1e-5)
                        .with_note(format!(
                            "ratio(2·support)·4/ratio(support) = {:.10}; errors {e1:.1e}/{e2:.1e}",
                            4.0 * r2 / r1
                        )),
                );
                rows
            }
            (Err(e), _) | (_, Err(e)) => {
                vec![Report::residual(self.id(), env.label(), f64::INFINITY, 0.0)
                    .with_note(format!("quadrature failure: {e}"))]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dunkl_core::quadrature::Levels;
    use dunkl_core::root_system::{DunklContext, Family};

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
    fn log_weight_shape() {
        assert_eq!(log_weight(0.0), 0.0);
        assert_eq!(log_weight(1.0), 1.0);
        assert!((log_weight(1.0 / std::f64::consts::E) - 0.5).abs() < 1e-15);
        // Monotone increasing on (0,1).
        assert!(log_weight(0.2) < log_weight(0.4));
        // Enlarging δ shrinks X(t/δ).
        assert!(log_weight(0.5 / 2.0) < log_weight(0.5));
    }

    #[test]
    fn one_dimensional_lemma_rows_pass() {
        let ctx = DunklContext::build(&Family::Z2Power { n: 1 }, &[1.5]).unwrap();
        let env = quick_env(&ctx);
        let rows = LogWeight1d.run(&env);
        assert!(rows.len() >= 5);
        for r in &rows {
            assert!(r.pass, "row failed: {}", r.to_json_line());
        }
    }

    #[test]
    fn lemma_skips_on_higher_rank() {
        let ctx = DunklContext::build(&Family::B { rank: 2 }, &[0.3, 0.7]).unwrap();
        let env = quick_env(&ctx);
        let rows = LogWeight1d.run(&env);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].kind, crate::report::ReportKind::Skip);
    }

    #[test]
    fn improved_hardy_rows_pass_on_rank_one() {
        let ctx = DunklContext::build(&Family::Z2Power { n: 1 }, &[1.5]).unwrap();
        let env = quick_env(&ctx);
        for r in ImprovedHardy.run(&env) {
            assert!(r.pass, "row failed: {}", r.to_json_line());
        }
    }

    #[test]
    fn poincare_scaling_law_holds() {
        let ctx = DunklContext::build(&Family::Z2Power { n: 1 }, &[1.5]).unwrap();
        let env = SuiteEnv {
            levels: Levels::new(10, 20),
            ..quick_env(&ctx)
        };
        for r in Poincare.run(&env) {
            assert!(r.pass, "row failed: {}", r.to_json_line());
        }
    }
}
