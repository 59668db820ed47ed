//! The check registry: each verified statement lives behind the
//! [`TheoremCheck`] trait, is registered under a stable id, and is selected at
//! runtime by config or CLI. Checks emit [`Report`] rows; hypothesis failures
//! become skip rows instead of errors.

pub mod fractional;
pub mod hardy;
pub mod improved;
pub mod many_particle;
pub mod rellich;
pub mod structure;

use dunkl_core::quadrature::{ball_rule, two_level, IntegralEstimate, Levels, QuadratureError};
use dunkl_core::root_system::DunklContext;
use dunkl_core::ScalarField;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::report::Report;
use crate::testfn::{self, FunctionSpec};

/// Everything a check needs to run against one context.
pub struct SuiteEnv<'a> {
    pub ctx: &'a DunklContext,
    pub levels: Levels,
    pub seed: u64,
    pub job_index: usize,
    /// Optional config-supplied test functions; empty means use built-ins.
    pub functions: &'a [FunctionSpec],
}

impl SuiteEnv<'_> {
    pub fn label(&self) -> String {
        self.ctx.descriptor()
    }

    /// Context label with a sub-case suffix.
    pub fn sub(&self, detail: impl AsRef<str>) -> String {
        format!("{} | {}", self.ctx.descriptor(), detail.as_ref())
    }

    /// Deterministic per-(job, salt) random stream, independent of evaluation
    /// order. The salt is usually a hash of the check id.
    pub fn rng(&self, salt: u64) -> ChaCha8Rng {
        let mut z = self
            .seed
            .wrapping_add((self.job_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
            .wrapping_add(salt.wrapping_mul(0xBF58_476D_1CE4_E5B9));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
    }
}

/// FNV-1a over the check id: gives each check its own random-stream salt.
pub fn salt_of(id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// One verifiable statement. Implementations are stateless and `Sync`, so the
/// suite can fan units out across threads.
pub trait TheoremCheck: Sync {
    /// Stable identifier used in configs, CLI filters, and report rows.
    fn id(&self) -> &'static str;
    /// One-line description of what the check verifies.
    fn title(&self) -> &'static str;
    fn run(&self, env: &SuiteEnv) -> Vec<Report>;
}

/// All built-in checks in their canonical (deterministic) order.
pub fn builtin_checks() -> Vec<Box<dyn TheoremCheck>> {
    vec![
        Box::new(hardy::DirichletComparison),
        Box::new(hardy::StepIdentity),
        Box::new(hardy::HardyTypePair),
        Box::new(hardy::LpHardy),
        Box::new(hardy::L2Hardy),
        Box::new(hardy::HardySharpness),
        Box::new(hardy::GradientPowerWitness),
        Box::new(fractional::FractionalHardy),
        Box::new(improved::ImprovedHardy),
        Box::new(improved::LogWeight1d),
        Box::new(improved::HardyRemainder),
        Box::new(improved::Poincare),
        Box::new(rellich::Rellich),
        Box::new(rellich::RellichSharpness),
        Box::new(rellich::Ckn),
        Box::new(many_particle::ManyParticle),
        Box::new(many_particle::TypeARadial),
        Box::new(many_particle::TypeBRadial),
        Box::new(structure::ConjugationIdentity),
        Box::new(structure::CrossTerm),
        Box::new(structure::HarmonicLaw),
        Box::new(structure::GaussianMass),
    ]
}

pub fn check_ids() -> Vec<&'static str> {
    builtin_checks().iter().map(|c| c.id()).collect()
}

pub fn find_check(id: &str) -> Option<Box<dyn TheoremCheck>> {
    builtin_checks().into_iter().find(|c| c.id() == id)
}

/// A test function plus the geometry the quadrature needs: an outer support
/// radius and the distance from the origin to the support (zero when the
/// support covers the origin).
pub struct TestFunction {
    pub label: String,
    pub field: ScalarField,
    pub radius: f64,
    pub clearance: f64,
}

fn spec_clearance(spec: &FunctionSpec) -> f64 {
    match spec {
        FunctionSpec::Mollifier { center, radius } => {
            let c: f64 = center.iter().map(|t| t * t).sum::<f64>().sqrt();
            (c - radius).max(0.0)
        }
        _ => 0.0,
    }
}

fn from_specs(env: &SuiteEnv) -> Vec<TestFunction> {
    env.functions
        .iter()
        .filter_map(|spec| {
            let field = spec.build(env.ctx.dim()).ok()?;
            Some(TestFunction {
                label: spec.label(),
                field,
                radius: spec.support_radius(),
                clearance: spec_clearance(spec),
            })
        })
        .collect()
}

/// Smooth bumps whose support contains the origin; used by checks without a
/// singular weight on the right-hand side. Config-supplied functions replace
/// the built-ins wholesale.
pub fn origin_functions(env: &SuiteEnv) -> Vec<TestFunction> {
    let custom = from_specs(env);
    if !custom.is_empty() {
        return custom;
    }
    let dim = env.ctx.dim();
    let center: Vec<f64> = (0..dim).map(|j| 0.35 * 0.8f64.powi(j as i32)).collect();
    let m1 = TestFunction {
        label: "mollifier at 0.35u, r=1.1".into(),
        field: testfn::mollifier(&center, 1.1),
        radius: center.iter().map(|t| t * t).sum::<f64>().sqrt() + 1.1,
        clearance: 0.0,
    };
    let mut exps = vec![vec![0u32; dim], {
        let mut e = vec![0u32; dim];
        e[0] = 1;
        e
    }];
    if dim >= 2 {
        let mut e = vec![0u32; dim];
        e[0] = 1;
        e[1] = 1;
        exps.push(e);
    }
    let coeffs = vec![1.0; exps.len()];
    let spec = FunctionSpec::PolyGauss {
        exponents: exps,
        coeffs,
        width: 1.0,
    };
    let m2 = TestFunction {
        label: "poly-gauss (1 + x0 + x0x1)".into(),
        field: spec.build(dim).expect("built-in spec is valid"),
        radius: spec.support_radius(),
        clearance: 0.0,
    };
    vec![m1, m2]
}

/// Smooth bumps supported away from the origin; used by checks whose
/// right-hand side carries a |x|^{-s} factor evaluated pointwise. Only
/// config functions with genuine clearance are accepted here.
pub fn punctured_functions(env: &SuiteEnv) -> Vec<TestFunction> {
    let custom: Vec<TestFunction> = from_specs(env)
        .into_iter()
        .filter(|t| t.clearance >= 0.3)
        .collect();
    if !custom.is_empty() {
        return custom;
    }
    let dim = env.ctx.dim();
    let mut u: Vec<f64> = (0..dim).map(|j| 1.0 / 1.25f64.powi(j as i32)).collect();
    let un = u.iter().map(|t| t * t).sum::<f64>().sqrt();
    for t in u.iter_mut() {
        *t /= un;
    }
    let c1: Vec<f64> = u.iter().map(|t| 2.0 * t).collect();
    let p1 = TestFunction {
        label: "mollifier at |c|=2, r=1.2".into(),
        field: testfn::mollifier(&c1, 1.2),
        radius: 3.2,
        clearance: 0.8,
    };
    // A second bump in a different direction (sign-flipped last coordinate).
    let mut v = u.clone();
    v[dim - 1] = -v[dim - 1];
    if dim >= 2 {
        v.swap(0, dim - 1);
    }
    let vn = v.iter().map(|t| t * t).sum::<f64>().sqrt();
    let c2: Vec<f64> = v.iter().map(|t| 1.6 * t / vn).collect();
    let p2 = TestFunction {
        label: "mollifier at |c|=1.6, r=1.0".into(),
        field: testfn::mollifier(&c2, 1.0),
        radius: 2.6,
        clearance: 0.6,
    };
    vec![p1, p2]
}

/// Two-level estimate of `∫ f |x|^σ dμ_k` over the centered ball that covers
/// the given support radius.
pub fn mu_estimate(
    env: &SuiteEnv,
    radius: f64,
    sigma: f64,
    f: impl Fn(&[f64]) -> f64,
) -> Result<IntegralEstimate, QuadratureError> {
    two_level(|l| ball_rule(env.ctx, radius, sigma, l), f, env.levels)
}

/// A deterministic point deep inside a Weyl chamber, scaled to the target
/// norm. Returns the point and its distance to the nearest mirror.
pub fn chamber_center(ctx: &DunklContext, target_norm: f64) -> (Vec<f64>, f64) {
    let dim = ctx.dim();
    let u: Vec<f64> = (0..dim).map(|j| (dim - j) as f64).collect();
    let un = u.iter().map(|t| t * t).sum::<f64>().sqrt();
    let c: Vec<f64> = u.iter().map(|t| t * target_norm / un).collect();
    let dist = mirror_distance(ctx, &c);
    (c, dist)
}

/// Distance from `x` to the nearest mirror hyperplane.
pub fn mirror_distance(ctx: &DunklContext, x: &[f64]) -> f64 {
    let mut dist = f64::INFINITY;
    for (_, root) in ctx.system().positive_roots() {
        let norm = root.coords().iter().map(|t| t * t).sum::<f64>().sqrt();
        dist = dist.min(root.inner(x).abs() / norm);
    }
    dist
}

/// A random point with coordinates in `(-box_half, box_half)` at distance at
/// least `min_clear` from every mirror and from the origin.
pub fn random_offmirror_point<R: Rng>(
    ctx: &DunklContext,
    rng: &mut R,
    box_half: f64,
    min_clear: f64,
) -> Vec<f64> {
    for _ in 0..500 {
        let x: Vec<f64> = (0..ctx.dim())
            .map(|_| rng.gen_range(-box_half..box_half))
            .collect();
        let r = x.iter().map(|t| t * t).sum::<f64>().sqrt();
        if r >= min_clear && mirror_distance(ctx, &x) >= min_clear {
            return x;
        }
    }
    // Clearance this large always exists; fall back to a chamber point.
    chamber_center(ctx, box_half).0
}

/// Quadrature-backed row helper: turns two estimates and a constant into a
/// margin row with the combined error bar `err(lhs) + |c|·err(rhs)`.
pub fn margin_row(
    theorem: &str,
    ctx_label: String,
    lhs: &IntegralEstimate,
    rhs: &IntegralEstimate,
    constant: f64,
) -> Report {
    let err = lhs.error + constant.abs() * rhs.error;
    Report::margin(theorem, ctx_label, lhs.value, rhs.value, constant, err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dunkl_core::root_system::Family;

    fn ctx_of(family: Family, ks: &[f64]) -> DunklContext {
        DunklContext::build(&family, ks).unwrap()
    }

    fn env_of(ctx: &DunklContext) -> SuiteEnv<'_> {
        SuiteEnv {
            ctx,
            levels: Levels::new(6, 10),
            seed: 42,
            job_index: 0,
            functions: &[],
        }
    }

    #[test]
    fn registry_ids_are_unique_and_stable() {
        let ids = check_ids();
        let mut dedup = ids.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), ids.len(), "duplicate check ids");
        for required in [
            "lem2.1",
            "eq-hardytypestep",
            "thm3.1",
            "thm3.2",
            "thm3.4",
            "thm3.4-sharpness",
            "thm4.1",
            "thm5.1",
            "lem5.2",
            "cor5.3",
            "cor5.4",
            "thm6.1",
            "thm6.1-sharpness",
            "thm6.3",
            "thm7.1",
            "cor7.2",
            "cor7.3",
            "eq-dunkl-cms",
            "eq-crossterm",
        ] {
            assert!(ids.contains(&required), "missing check id {required}");
        }
        assert!(find_check("thm3.4").is_some());
        assert!(find_check("nope").is_none());
    }

    #[test]
    fn rng_streams_are_deterministic_and_salted() {
        let ctx = ctx_of(Family::Z2Power { n: 1 }, &[0.5]);
        let env = env_of(&ctx);
        let mut a = env.rng(salt_of("thm3.4"));
        let mut b = env.rng(salt_of("thm3.4"));
        let mut c = env.rng(salt_of("thm6.1"));
        let va: f64 = a.gen();
        assert_eq!(va, b.gen::<f64>());
        assert_ne!(va, c.gen::<f64>());
    }

    #[test]
    fn chamber_center_is_off_all_mirrors() {
        for (family, ks) in [
            (Family::A { rank: 2 }, vec![0.5]),
            (Family::B { rank: 2 }, vec![0.3, 0.7]),
            (Family::Z2Power { n: 2 }, vec![0.5, 0.75]),
        ] {
            let ctx = ctx_of(family, &ks);
            let (c, dist) = chamber_center(&ctx, 2.2);
            let norm = c.iter().map(|t| t * t).sum::<f64>().sqrt();
            assert!((norm - 2.2).abs() < 1e-12);
            assert!(dist > 0.2, "chamber point too close to a mirror: {dist}");
            assert!((mirror_distance(&ctx, &c) - dist).abs() < 1e-12);
        }
    }

    #[test]
    fn random_points_respect_clearance() {
        let ctx = ctx_of(Family::B { rank: 2 }, &[0.3, 0.7]);
        let env = env_of(&ctx);
        let mut rng = env.rng(1);
        for _ in 0..50 {
            let x = random_offmirror_point(&ctx, &mut rng, 2.0, 0.1);
            assert!(mirror_distance(&ctx, &x) >= 0.1);
            assert!(x.iter().map(|t| t * t).sum::<f64>().sqrt() >= 0.1);
        }
    }

    #[test]
    fn builtin_functions_have_declared_geometry() {
        let ctx = ctx_of(Family::A { rank: 2 }, &[0.5]);
        let env = env_of(&ctx);
        for t in origin_functions(&env) {
            assert!(t.field.eval(&[0.0; 3]) != 0.0 || t.clearance == 0.0);
            // Vanishes outside the declared support radius.
            let far = vec![t.radius + 0.5, 0.0, 0.0];
            assert!(t.field.eval(&far).abs() < 1e-10, "{}", t.label);
        }
        for t in punctured_functions(&env) {
            assert!(t.clearance >= 0.3, "{}", t.label);
            assert_eq!(t.field.eval(&[0.0; 3]), 0.0, "{}", t.label);
        }
    }

    #[test]
    fn config_functions_override_builtins() {
        let ctx = ctx_of(Family::Z2Power { n: 1 }, &[0.5]);
        let specs = vec![FunctionSpec::Mollifier {
            center: vec![1.5],
            radius: 0.8,
        }];
        let env = SuiteEnv {
            ctx: &ctx,
            levels: Levels::new(6, 10),
            seed: 1,
            job_index: 0,
            functions: &specs,
        };
        let origin = origin_functions(&env);
        assert_eq!(origin.len(), 1);
        let punct = punctured_functions(&env);
        assert_eq!(punct.len(), 1);
        assert!((punct[0].clearance - 0.7).abs() < 1e-12);
    }
}
