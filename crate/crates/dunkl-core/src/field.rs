//! Numerically evaluated scalar fields with optional analytic derivatives.
//!
//! Checks prefer fields that carry closed-form gradients and Laplacians;
//! central finite differences are the fallback and are accurate to roughly
//! `1e-10` (first order) and `1e-7` (second order) on well-scaled inputs.

use std::sync::Arc;

use crate::poly::MultiPoly;

type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub struct ScalarField {
    eval: EvalFn,
    grad: Option<GradFn>,
    laplacian: Option<EvalFn>,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("analytic_grad", &self.grad.is_some())
            .field("analytic_laplacian", &self.laplacian.is_some())
            .finish()
    }
}

impl ScalarField {
    pub fn from_fn(eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField {
            eval: Arc::new(eval),
            grad: None,
            laplacian: None,
        }
    }

    pub fn with_grad(mut self, grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.grad = Some(Arc::new(grad));
        self
    }

    pub fn with_laplacian(
        mut self,
        laplacian: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.laplacian = Some(Arc::new(laplacian));
        self
    }

    /// View an exact polynomial as a field; derivatives come from exact
    /// polynomial calculus, evaluated in floating point.
    pub fn from_poly(p: &MultiPoly) -> Self {
        let grads: Vec<MultiPoly> = p.gradient();
        let lap = p.laplacian();
        let p_eval = p.clone();
        ScalarField {
            eval: Arc::new(move |x| p_eval.eval_f64(x)),
            grad: Some(Arc::new(move |x| {
                grads.iter().map(|g| g.eval_f64(x)).collect()
            })),
            laplacian: Some(Arc::new(move |x| lap.eval_f64(x))),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub fn has_analytic_grad(&self) -> bool {
        self.grad.is_some()
    }

    pub fn has_analytic_laplacian(&self) -> bool {
        self.laplacian.is_some()
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        if let Some(g) = &self.grad {
            return g(x);
        }
        // Central differences, step scaled per coordinate.
        let mut out = Vec::with_capacity(x.len());
        let mut xp = x.to_vec();
        for i in 0..x.len() {
            let h = 1e-5 * (1.0 + x[i].abs());
            xp[i] = x[i] + h;
            let fp = (self.eval)(&xp);
            xp[i] = x[i] - h;
            let fm = (self.eval)(&xp);
            xp[i] = x[i];
            out.push((fp - fm) / (2.0 * h));
        }
        out
    }

    /// The ordinary (euclidean) Laplacian.
    pub fn laplacian(&self, x: &[f64]) -> f64 {
        if let Some(l) = &self.laplacian {
            return l(x);
        }
        let f0 = (self.eval)(x);
        let mut acc = 0.0;
        let mut xp = x.to_vec();
        for i in 0..x.len() {
            let h = 5e-4 * (1.0 + x[i].abs());
            xp[i] = x[i] + h;
            let fp = (self.eval)(&xp);
            xp[i] = x[i] - h;
            let fm = (self.eval)(&xp);
            xp[i] = x[i];
            acc += (fp - 2.0 * f0 + fm) / (h * h);
        }
        acc
    }

    /// Pointwise product, with derivatives when both factors carry them.
    pub fn product(&self, other: &ScalarField) -> ScalarField {
        let (fa, fb) = (self.clone(), other.clone());
        let mut out = ScalarField::from_fn(move |x| fa.eval(x) * fb.eval(x));
        if self.grad.is_some() && other.grad.is_some() {
            let (fa, fb) = (self.clone(), other.clone());
            out = out.with_grad(move |x| {
                let (va, vb) = (fa.eval(x), fb.eval(x));
                fa.grad(x)
                    .iter()
                    .zip(fb.grad(x))
                    .map(|(ga, gb)| ga * vb + va * gb)
                    .collect()
            });
            if self.laplacian.is_some() && other.laplacian.is_some() {
                let (fa, fb) = (self.clone(), other.clone());
                out = out.with_laplacian(move |x| {
                    let (va, vb) = (fa.eval(x), fb.eval(x));
                    let (ga, gb) = (fa.grad(x), fb.grad(x));
                    let cross: f64 = ga.iter().zip(&gb).map(|(a, b)| a * b).sum();
                    fa.laplacian(x) * vb + 2.0 * cross + va * fb.laplacian(x)
                });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use approx::assert_relative_eq;
    use num::traits::One;

    #[test]
    fn finite_difference_grad_on_gaussian() {
        let f = ScalarField::from_fn(|x| (-x[0] * x[0] - 0.5 * x[1] * x[1]).exp());
        let x = [0.7, -0.3];
        let g = f.grad(&x);
        let v = f.eval(&x);
        assert_relative_eq!(g[0], -2.0 * x[0] * v, max_relative = 1e-8);
        assert_relative_eq!(g[1], -x[1] * v, max_relative = 1e-8);
    }

    #[test]
    fn poly_field_has_exact_derivatives() {
        // p = x^2 y
        let x = MultiPoly::variable(2, 0);
        let y = MultiPoly::variable(2, 1);
        let p = x.pow(2).mul(&y);
        let f = ScalarField::from_poly(&p);
        assert!(f.has_analytic_grad());
        let at = [2.0, 3.0];
        assert_relative_eq!(f.eval(&at), 12.0, epsilon = 1e-12);
        let g = f.grad(&at);
        assert_relative_eq!(g[0], 12.0, epsilon = 1e-12);
        assert_relative_eq!(g[1], 4.0, epsilon = 1e-12);
        // Δ(x²y) = 2y
        assert_relative_eq!(f.laplacian(&at), 6.0, epsilon = 1e-12);
    }

    #[test]
    fn product_rule_propagates() {
        let x = MultiPoly::variable(1, 0);
        let f = ScalarField::from_poly(&x.pow(2));
        let g = ScalarField::from_poly(&x.add(&MultiPoly::constant(1, Rational::one())));
        let fg = f.product(&g);
        // (x²(x+1))' = 3x² + 2x at x = 2 -> 16
        assert_relative_eq!(fg.grad(&[2.0])[0], 16.0, epsilon = 1e-12);
        // second derivative 6x + 2 at x = 2 -> 14
        assert_relative_eq!(fg.laplacian(&[2.0]), 14.0, epsilon = 1e-12);
    }
}
