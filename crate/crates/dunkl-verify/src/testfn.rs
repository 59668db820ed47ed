//! Test-function builders: smooth compactly supported bumps and decaying
//! profiles with closed-form gradients and Laplacians, plus config-facing
//! specs so experiment files can pick their own functions.

use dunkl_core::field::ScalarField;
use dunkl_core::poly::{rational_from_f64, MultiPoly};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TestFnError {
    #[error("function spec expects dimension {expected}, context has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("radius/width must be positive, got {0}")]
    BadScale(f64),
    #[error("polynomial spec needs as many coefficients as exponent rows ({exps} vs {coeffs})")]
    CoefficientCount { exps: usize, coeffs: usize },
}

/// Config-file description of a test function.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum FunctionSpec {
    /// Compactly supported bump `exp(-r^2/(r^2 - |x-c|^2))` on `|x-c| < r`.
    Mollifier { center: Vec<f64>, radius: f64 },
    /// Gaussian `exp(-|x-c|^2 / (2 w^2))`.
    GaussBump { center: Vec<f64>, width: f64 },
    /// `sum_j c_j x^(m_j) * exp(-|x|^2/(2 w^2))`.
    PolyGauss {
        exponents: Vec<Vec<u32>>,
        coeffs: Vec<f64>,
        width: f64,
    },
}

impl FunctionSpec {
    pub fn label(&self) -> String {
        match self {
            FunctionSpec::Mollifier { center, radius } => {
                format!("mollifier(c={center:?}, r={radius})")
            }
            FunctionSpec::GaussBump { center, width } => {
                format!("gauss(c={center:?}, w={width})")
            }
            FunctionSpec::PolyGauss { width, .. } => format!("poly-gauss(w={width})"),
        }
    }

    /// Outer radius beyond which the function is zero or negligible
    /// (for Gaussians: an 8-sigma cutoff).
    pub fn support_radius(&self) -> f64 {
        fn norm(v: &[f64]) -> f64 {
            v.iter().map(|t| t * t).sum::<f64>().sqrt()
        }
        match self {
            FunctionSpec::Mollifier { center, radius } => norm(center) + radius,
            FunctionSpec::GaussBump { center, width } => norm(center) + 8.0 * width,
            FunctionSpec::PolyGauss { width, .. } => 8.0 * width,
        }
    }

    pub fn build(&self, dim: usize) -> Result<ScalarField, TestFnError> {
        match self {
            FunctionSpec::Mollifier { center, radius } => {
                check_dim(center.len(), dim)?;
                check_scale(*radius)?;
                Ok(mollifier(center, *radius))
            }
            FunctionSpec::GaussBump { center, width } => {
                check_dim(center.len(), dim)?;
                check_scale(*width)?;
                Ok(gauss_bump(center, *width))
            }
            FunctionSpec::PolyGauss {
                exponents,
                coeffs,
                width,
            } => {
                check_scale(*width)?;
                if exponents.len() != coeffs.len() {
                    return Err(TestFnError::CoefficientCount {
                        exps: exponents.len(),
                        coeffs: coeffs.len(),
                    });
                }
                let mut p = MultiPoly::zero(dim);
                for (exp, &c) in exponents.iter().zip(coeffs) {
                    check_dim(exp.len(), dim)?;
                    p = p.add(&MultiPoly::monomial(dim, exp.clone(), rational_from_f64(c)));
                }
                Ok(poly_gauss(&p, *width))
            }
        }
    }
}

fn check_dim(expected: usize, got: usize) -> Result<(), TestFnError> {
    if expected != got {
        Err(TestFnError::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

fn check_scale(s: f64) -> Result<(), TestFnError> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(TestFnError::BadScale(s))
    }
}

/// Smooth compactly supported bump centered at `c` with support `|x-c| < rho`:
/// `f = exp(L(s))` with `s = |x-c|^2` and `L(s) = -rho^2 / (rho^2 - s)`.
///
/// Gradient and Laplacian are closed forms:
/// `grad f = 2 e^L L'(s) (x-c)`,
/// `lap f = e^L (4 s (L'^2 + L'') + 2 N L')`.
/// Values are clamped to zero slightly inside the boundary to avoid
/// overflow in the exponent.
pub fn mollifier(center: &[f64], rho: f64) -> ScalarField {
    let c = center.to_vec();
    let r2 = rho * rho;
    let cutoff = 0.995 * r2;
    let s_of = move |x: &[f64], c: &[f64]| -> f64 {
        x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
    };

    let c0 = c.clone();
    let eval = move |x: &[f64]| -> f64 {
        let s = s_of(x, &c0);
        if s >= cutoff {
            0.0
        } else {
            (-r2 / (r2 - s)).exp()
        }
    };

    let c1 = c.clone();
    let grad = move |x: &[f64]| -> Vec<f64> {
        let s = s_of(x, &c1);
        if s >= cutoff {
            return vec![0.0; x.len()];
        }
        let d = r2 - s;
        let l = (-r2 / d).exp();
        let lp = -r2 / (d * d);
        x.iter()
            .zip(&c1)
            .map(|(a, b)| 2.0 * l * lp * (a - b))
            .collect()
    };

    let c2 = c;
    let lap = move |x: &[f64]| -> f64 {
        let s = s_of(x, &c2);
        if s >= cutoff {
            return 0.0;
        }
        let n = x.len() as f64;
        let d = r2 - s;
        let l = (-r2 / d).exp();
        let lp = -r2 / (d * d);
        let lpp = -2.0 * r2 / (d * d * d);
        l * (4.0 * s * (lp * lp + lpp) + 2.0 * n * lp)
    };

    ScalarField::from_fn(eval)
        .with_grad(grad)
        .with_laplacian(lap)
}

/// Gaussian bump `exp(-|x-c|^2/(2 w^2))` with closed-form derivatives.
pub fn gauss_bump(center: &[f64], width: f64) -> ScalarField {
    let c = center.to_vec();
    let inv_w2 = 1.0 / (width * width);
    let s_of = move |x: &[f64], c: &[f64]| -> f64 {
        x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
    };

    let c0 = c.clone();
    let eval = move |x: &[f64]| (-(0.5 * inv_w2) * s_of(x, &c0)).exp();

    let c1 = c.clone();
    let grad = move |x: &[f64]| -> Vec<f64> {
        let f = (-(0.5 * inv_w2) * s_of(x, &c1)).exp();
        x.iter()
            .zip(&c1)
            .map(|(a, b)| -inv_w2 * (a - b) * f)
            .collect()
    };

    let c2 = c;
    let lap = move |x: &[f64]| -> f64 {
        let n = x.len() as f64;
        let s = s_of(x, &c2);
        let f = (-(0.5 * inv_w2) * s).exp();
        f * (inv_w2 * inv_w2 * s - n * inv_w2)
    };

    ScalarField::from_fn(eval)
        .with_grad(grad)
        .with_laplacian(lap)
}

/// Polynomial times centered Gaussian; both factors carry analytic
/// derivatives, so the product does too.
pub fn poly_gauss(p: &MultiPoly, width: f64) -> ScalarField {
    let center = vec![0.0; p.dim()];
    ScalarField::from_poly(p).product(&gauss_bump(&center, width))
}

/// Random polynomial of total degree <= 2 (odd and even monomials mixed, so
/// the result is generically not reflection-invariant) times a Gaussian.
pub fn random_poly_gauss<R: Rng>(dim: usize, rng: &mut R) -> ScalarField {
    let mut p = MultiPoly::zero(dim);
    let mut exps = vec![vec![0u32; dim]];
    for i in 0..dim {
        let mut e = vec![0u32; dim];
        e[i] = 1;
        exps.push(e);
        for j in i..dim {
            let mut e2 = vec![0u32; dim];
            e2[i] += 1;
            e2[j] += 1;
            exps.push(e2);
        }
    }
    for exp in exps {
        let c: f64 = rng.gen_range(-1.0..1.0);
        p = p.add(&MultiPoly::monomial(dim, exp, rational_from_f64(c)));
    }
    let width = rng.gen_range(0.9..1.5);
    poly_gauss(&p, width)
}

/// Quintic smoothstep on `[0,1]`: returns `(s, s', s'')` with
/// `s(t) = 6 t^5 - 15 t^4 + 10 t^3`, clamped to the constants 0/1 outside.
/// `|s'| <= 15/8` and `|s''| <= 10/sqrt(3)` on `[0,1]`.
pub fn smoothstep(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        (0.0, 0.0, 0.0)
    } else if t >= 1.0 {
        (1.0, 0.0, 0.0)
    } else {
        let t2 = t * t;
        let t3 = t2 * t;
        (
            t3 * (6.0 * t2 - 15.0 * t + 10.0),
            30.0 * t2 * (t - 1.0) * (t - 1.0),
            60.0 * t * (2.0 * t2 - 3.0 * t + 1.0),
        )
    }
}

/// Plateau cutoff `h_n(r)`: rises 0 to 1 on `[1,2]`, equals 1 on `[2,n]`,
/// falls back to 0 on `[n,2n]`. Returns `(h, h', h'')`; the derivative bounds
/// scale like `c1/n` and `c2/n^2` on the falling edge.
pub fn plateau(n: f64, r: f64) -> (f64, f64, f64) {
    assert!(n >= 2.0, "plateau needs n >= 2");
    if r <= 1.0 || r >= 2.0 * n {
        (0.0, 0.0, 0.0)
    } else if r < 2.0 {
        smoothstep(r - 1.0)
    } else if r <= n {
        (1.0, 0.0, 0.0)
    } else {
        // h(r) = s((2n - r)/n): chain rule brings factors -1/n and 1/n^2.
        let (s, sp, spp) = smoothstep((2.0 * n - r) / n);
        (s, -sp / n, spp / (n * n))
    }
}

/// Lift a radial profile `g(r) -> (g, g', g'')` to a field on R^N:
/// `f(x) = g(|x|)`, `grad f = g'(r) x/r`, `lap f = g'' + (N-1) g'/r`.
/// Not defined at the origin unless the profile vanishes there; callers keep
/// quadrature nodes away from `r = 0`.
pub fn radial_field(
    dim: usize,
    g: impl Fn(f64) -> (f64, f64, f64) + Clone + Send + Sync + 'static,
) -> ScalarField {
    let norm = |x: &[f64]| -> f64 { x.iter().map(|t| t * t).sum::<f64>().sqrt() };

    let g0 = g.clone();
    let eval = move |x: &[f64]| g0(norm(x)).0;

    let g1 = g.clone();
    let grad = move |x: &[f64]| -> Vec<f64> {
        let r = norm(x).max(1e-300);
        let (_, gp, _) = g1(r);
        x.iter().map(|t| gp * t / r).collect()
    };

    let n = dim as f64;
    let lap = move |x: &[f64]| -> f64 {
        let r = norm(x).max(1e-300);
        let (_, gp, gpp) = g(r);
        gpp + (n - 1.0) * gp / r
    };

    ScalarField::from_fn(eval)
        .with_grad(grad)
        .with_laplacian(lap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn check_derivatives(f: &ScalarField, x: &[f64], tol: f64) {
        let g = f.grad(x);
        let l = f.laplacian(x);
        let h = 1e-5;
        let mut num_lap = 0.0;
        for i in 0..x.len() {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            let d = (f.eval(&xp) - f.eval(&xm)) / (2.0 * h);
            assert_relative_eq!(g[i], d, max_relative = tol, epsilon = tol);
            num_lap += (f.eval(&xp) - 2.0 * f.eval(x) + f.eval(&xm)) / (h * h);
        }
        assert_relative_eq!(l, num_lap, max_relative = 1e-3, epsilon = 1e-3);
    }

    #[test]
    fn mollifier_matches_finite_differences() {
        let f = mollifier(&[0.3, -0.2], 1.5);
        check_derivatives(&f, &[0.5, 0.4], 1e-5);
        check_derivatives(&f, &[-0.4, 0.1], 1e-5);
    }

    #[test]
    fn mollifier_vanishes_outside_support() {
        let f = mollifier(&[0.0], 1.0);
        assert_eq!(f.eval(&[1.0]), 0.0);
        assert_eq!(f.eval(&[2.5]), 0.0);
        assert_eq!(f.grad(&[1.2])[0], 0.0);
        assert_eq!(f.laplacian(&[1.2]), 0.0);
        // No NaN right at the clamp boundary.
        let near = f.eval(&[0.9974968]);
        assert!(near.is_finite());
    }

    #[test]
    fn gauss_bump_matches_finite_differences() {
        let f = gauss_bump(&[0.1, 0.2, -0.3], 0.8);
        check_derivatives(&f, &[0.4, -0.5, 0.2], 1e-5);
    }

    #[test]
    fn poly_gauss_carries_analytic_derivatives() {
        let p = MultiPoly::monomial(2, vec![1, 0], rational_from_f64(1.0))
            .add(&MultiPoly::monomial(2, vec![0, 2], rational_from_f64(-0.5)));
        let f = poly_gauss(&p, 1.1);
        assert!(f.has_analytic_grad());
        assert!(f.has_analytic_laplacian());
        check_derivatives(&f, &[0.7, -0.3], 1e-5);
    }

    #[test]
    fn random_poly_gauss_is_generically_non_even() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let f = random_poly_gauss(1, &mut rng);
        let x = [0.7];
        let xm = [-0.7];
        assert!((f.eval(&x) - f.eval(&xm)).abs() > 1e-6);
    }

    #[test]
    fn smoothstep_endpoints_and_bounds() {
        assert_eq!(smoothstep(0.0), (0.0, 0.0, 0.0));
        assert_eq!(smoothstep(1.0), (1.0, 0.0, 0.0));
        let (s, sp, _) = smoothstep(0.5);
        assert_relative_eq!(s, 0.5);
        assert_relative_eq!(sp, 15.0 / 8.0);
        let mut max_sp: f64 = 0.0;
        let mut max_spp: f64 = 0.0;
        for i in 0..=1000 {
            let t = i as f64 / 1000.0;
            let (_, sp, spp) = smoothstep(t);
            max_sp = max_sp.max(sp.abs());
            max_spp = max_spp.max(spp.abs());
        }
        assert!(max_sp <= 15.0 / 8.0 + 1e-12);
        assert!(max_spp <= 10.0 / 3f64.sqrt() + 1e-3);
    }

    #[test]
    fn smoothstep_derivatives_match_finite_differences() {
        let h = 1e-6;
        for &t in &[0.2, 0.5, 0.8] {
            let (_, sp, spp) = smoothstep(t);
            let d = (smoothstep(t + h).0 - smoothstep(t - h).0) / (2.0 * h);
            let dd = (smoothstep(t + h).0 - 2.0 * smoothstep(t).0 + smoothstep(t - h).0) / (h * h);
            assert_relative_eq!(sp, d, max_relative = 1e-6, epsilon = 1e-6);
            assert_relative_eq!(spp, dd, max_relative = 1e-3, epsilon = 1e-3);
        }
    }

    #[test]
    fn plateau_profile_shape_and_derivative_decay() {
        let n = 8.0;
        assert_eq!(plateau(n, 0.5), (0.0, 0.0, 0.0));
        assert_eq!(plateau(n, 1.0), (0.0, 0.0, 0.0));
        assert_eq!(plateau(n, 3.0), (1.0, 0.0, 0.0));
        assert_eq!(plateau(n, 16.0), (0.0, 0.0, 0.0));
        let (h, hp, hpp) = plateau(n, 12.0);
        assert!(h > 0.0 && h < 1.0);
        assert!(hp < 0.0, "falling edge");
        assert!(hp.abs() <= 15.0 / 8.0 / n + 1e-12);
        assert!(hpp.abs() <= 10.0 / 3f64.sqrt() / (n * n) + 1e-12);
        // Continuity across segment joints.
        for &r in &[2.0, n] {
            let before = plateau(n, r - 1e-9).0;
            let after = plateau(n, r + 1e-9).0;
            assert_relative_eq!(before, after, epsilon = 1e-7);
        }
    }

    #[test]
    fn radial_field_derivatives() {
        // g(r) = exp(-r^2): g' = -2 r g, g'' = (4 r^2 - 2) g.
        let g = |r: f64| {
            let v = (-r * r).exp();
            (v, -2.0 * r * v, (4.0 * r * r - 2.0) * v)
        };
        let f = radial_field(3, g);
        check_derivatives(&f, &[0.5, -0.3, 0.8], 1e-5);
    }

    #[test]
    fn spec_roundtrip_and_build() {
        let spec = FunctionSpec::Mollifier {
            center: vec![0.5, 0.5],
            radius: 1.0,
        };
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"type\":\"mollifier\""));
        let back: FunctionSpec = serde_json::from_str(&json).unwrap();
        let f = back.build(2).unwrap();
        assert!(f.eval(&[0.5, 0.5]) > 0.3);
        assert!(matches!(
            spec.build(3),
            Err(TestFnError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn polygauss_spec_validation() {
        let bad = FunctionSpec::PolyGauss {
            exponents: vec![vec![1, 0]],
            coeffs: vec![1.0, 2.0],
            width: 1.0,
        };
        assert!(matches!(
            bad.build(2),
            Err(TestFnError::CoefficientCount { .. })
        ));
        let good = FunctionSpec::PolyGauss {
            exponents: vec![vec![1, 0], vec![0, 0]],
            coeffs: vec![1.0, 0.5],
            width: 1.0,
        };
        let f = good.build(2).unwrap();
        assert!(f.has_analytic_laplacian());
    }
}
