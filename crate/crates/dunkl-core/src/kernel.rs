//! The rank-one Dunkl kernel `E_k(x, y)`: the unique solution of
//! `T_x E = y·E`, `E(0, y) = 1`, where `T` acts in `x` with multiplicity `k`.
//!
//! Near the origin the power series `a_n = a_{n-1}·y/(n + 2k·[n odd])` is
//! summed directly. Away from it the symmetric/antisymmetric pair
//! `u(t) = E(t, y)`, `v(t) = E(-t, y)` solves the regular first-order system
//!
//! ```text
//! u' =  y·u - (k/t)(u - v)
//! v' = -y·v + (k/t)(u - v)
//! ```
//!
//! which is integrated with an adaptive embedded Runge-Kutta pair. Complex
//! spectral parameters `y` are supported so `y = -iξ` drives the transform.

use num::complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("multiplicity must be a finite non-negative number, got {0}")]
    BadMultiplicity(f64),
    #[error("step-size underflow while integrating the kernel at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("step limit exceeded while integrating the kernel (|y| = {y_norm})")]
    StepLimit { y_norm: f64 },
}

const RTOL: f64 = 1e-12;
const ATOL: f64 = 1e-14;
const MAX_STEPS: usize = 400_000;

/// Evaluator for a fixed multiplicity `k ≥ 0`.
#[derive(Debug, Clone)]
pub struct Rank1Kernel {
    k: f64,
}

impl Rank1Kernel {
    pub fn new(k: f64) -> Result<Self, KernelError> {
        if !k.is_finite() || k < 0.0 {
            return Err(KernelError::BadMultiplicity(k));
        }
        Ok(Rank1Kernel { k })
    }

    pub fn multiplicity(&self) -> f64 {
        self.k
    }

    pub fn eval(&self, x: f64, y: Complex64) -> Result<Complex64, KernelError> {
        Ok(self.eval_many(&[x], y)?[0])
    }

    pub fn eval_real(&self, x: f64, y: f64) -> Result<f64, KernelError> {
        Ok(self.eval(x, Complex64::new(y, 0.0))?.re)
    }

    /// Evaluate at many points in one sweep: targets are visited in order of
    /// increasing `|x|`, so the ODE path is integrated once per call.
    pub fn eval_many(&self, xs: &[f64], y: Complex64) -> Result<Vec<Complex64>, KernelError> {
        let mut order: Vec<usize> = (0..xs.len()).collect();
        order.sort_by(|&a, &b| xs[a].abs().partial_cmp(&xs[b].abs()).unwrap());
        let mut out = vec![Complex64::new(0.0, 0.0); xs.len()];

        let t0 = 0.5 / (1.0 + y.norm());
        let mut next = 0usize;
        while next < order.len() && xs[order[next]].abs() <= t0 {
            out[order[next]] = series(self.k, xs[order[next]], y);
            next += 1;
        }
        if next == order.len() {
            return Ok(out);
        }

        let mut state = [series(self.k, t0, y), series(self.k, -t0, y)];
        let mut t = t0;
        let mut h = 0.1 * t0;
        for &i in &order[next..] {
            let target = xs[i].abs();
            if target > t {
                (state, h) = integrate_to(self.k, y, t, target, state, h)?;
                t = target;
            }
            out[i] = if xs[i] >= 0.0 { state[0] } else { state[1] };
        }
        Ok(out)
    }
}

fn series(k: f64, x: f64, y: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for n in 1..400u32 {
        let denom = n as f64 + if n % 2 == 1 { 2.0 * k } else { 0.0 };
        term *= y * x / denom;
        sum += term;
        if term.norm() < 1e-18 * (1.0 + sum.norm()) {
            break;
        }
    }
    sum
}

type State = [Complex64; 2];

fn rhs(k: f64, y: Complex64, t: f64, s: &State) -> State {
    let mix = (s[0] - s[1]) * (k / t);
    [y * s[0] - mix, -y * s[1] + mix]
}

/// Cash-Karp 5(4) adaptive step from `t_start` to exactly `t_end`.
fn integrate_to(
    k: f64,
    y: Complex64,
    t_start: f64,
    t_end: f64,
    mut s: State,
    mut h: f64,
) -> Result<(State, f64), KernelError> {
    const A: [[f64; 5]; 5] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
        [3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0, 0.0, 0.0],
        [-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0, 0.0],
        [
            1631.0 / 55296.0,
            175.0 / 512.0,
            575.0 / 13824.0,
            44275.0 / 110592.0,
            253.0 / 4096.0,
        ],
    ];
    const C: [f64; 5] = [1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0];
    const B5: [f64; 6] = [
        37.0 / 378.0,
        0.0,
        250.0 / 621.0,
        125.0 / 594.0,
        0.0,
        512.0 / 1771.0,
    ];
    const B4: [f64; 6] = [
        2825.0 / 27648.0,
        0.0,
        18575.0 / 48384.0,
        13525.0 / 55296.0,
        277.0 / 14336.0,
        1.0 / 4.0,
    ];

    let mut t = t_start;
    let mut steps = 0usize;
    while t < t_end - 1e-15 * t_end.abs() {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(KernelError::StepLimit { y_norm: y.norm() });
        }
        h = h.min(t_end - t);
        if h < 1e-14 * (1.0 + t) {
            return Err(KernelError::StepUnderflow { t });
        }

        let mut kk: [State; 6] = [[Complex64::new(0.0, 0.0); 2]; 6];
        kk[0] = rhs(k, y, t, &s);
        for stage in 1..6 {
            let mut arg = s;
            for (j, kj) in kk.iter().enumerate().take(stage) {
                let a = A[stage - 1][j];
                if a != 0.0 {
                    arg[0] += kj[0] * (a * h);
                    arg[1] += kj[1] * (a * h);
                }
            }
            kk[stage] = rhs(k, y, t + C[stage - 1] * h, &arg);
        }

        let mut s5 = s;
        let mut s4 = s;
        for (j, kj) in kk.iter().enumerate() {
            s5[0] += kj[0] * (B5[j] * h);
            s5[1] += kj[1] * (B5[j] * h);
            s4[0] += kj[0] * (B4[j] * h);
            s4[1] += kj[1] * (B4[j] * h);
        }

        let scale = ATOL + RTOL * s5[0].norm().max(s5[1].norm());
        let err = ((s5[0] - s4[0]).norm().max((s5[1] - s4[1]).norm())) / scale;
        if err <= 1.0 {
            t += h;
            s = s5;
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
    }
    Ok((s, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Confluent limit series `₀F₁(; b; z) = Σ z^m / ((b)_m m!)`.
    fn hyper0f1(b: f64, z: Complex64) -> Complex64 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for m in 1..400 {
            term *= z / (m as f64 * (b + m as f64 - 1.0));
            sum += term;
            if term.norm() < 1e-18 * (1.0 + sum.norm()) {
                break;
            }
        }
        sum
    }

    /// Independent closed form: with z = xy,
    /// E_k(x,y) = ₀F₁(k+1/2; z²/4) + z/(2k+1) · ₀F₁(k+3/2; z²/4).
    fn oracle(k: f64, x: f64, y: Complex64) -> Complex64 {
        let z = y * x;
        let q = z * z / 4.0;
        hyper0f1(k + 0.5, q) + z / (2.0 * k + 1.0) * hyper0f1(k + 1.5, q)
    }

    #[test]
    fn zero_multiplicity_is_exponential() {
        let kernel = Rank1Kernel::new(0.0).unwrap();
        let mut x = -3.0;
        while x <= 3.0 {
            let mut y = -3.0;
            while y <= 3.0 {
                let got = kernel.eval_real(x, y).unwrap();
                assert_relative_eq!(got, (x * y).exp(), max_relative = 1e-10);
                y += 0.75;
            }
            x += 0.75;
        }
    }

    #[test]
    fn matches_hypergeometric_closed_form() {
        for &k in &[0.25, 0.7, 1.5, 3.0] {
            let kernel = Rank1Kernel::new(k).unwrap();
            for &x in &[0.05, 0.3, 1.1, 2.2, -1.7] {
                for &y in &[
                    Complex64::new(0.5, 0.0),
                    Complex64::new(-1.3, 0.0),
                    Complex64::new(2.0, 0.0),
                    Complex64::new(0.0, 1.7),
                    Complex64::new(0.8, -1.1),
                ] {
                    let got = kernel.eval(x, y).unwrap();
                    let want = oracle(k, x, y);
                    assert!(
                        (got - want).norm() <= 1e-9 * (1.0 + want.norm()),
                        "k={k} x={x} y={y}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn growth_bound_and_positivity_on_the_real_line() {
        for &k in &[0.3, 1.2] {
            let kernel = Rank1Kernel::new(k).unwrap();
            for &x in &[-2.5, -0.4, 0.9, 3.1] {
                for &y in &[-1.8, 0.25, 2.6] {
                    let e = kernel.eval_real(x, y).unwrap();
                    assert!(e > 0.0, "kernel must be positive for real arguments");
                    assert!(e <= (x.abs() * y.abs()).exp() * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn bounded_for_imaginary_spectral_parameter() {
        let kernel = Rank1Kernel::new(0.65).unwrap();
        for &x in &[0.2, 1.4, 4.0, -6.3] {
            for &xi in &[0.5, 2.0, 11.0] {
                let e = kernel.eval(x, Complex64::new(0.0, -xi)).unwrap();
                assert!(e.norm() <= 1.0 + 1e-10, "|E({x}, -{xi}i)| = {}", e.norm());
            }
        }
    }

    #[test]
    fn symmetric_and_scale_covariant() {
        let kernel = Rank1Kernel::new(0.85).unwrap();
        let pairs = [(0.7, 1.9), (2.3, -0.6), (1.1, 1.1)];
        for &(x, y) in &pairs {
            let a = kernel.eval_real(x, y).unwrap();
            let b = kernel.eval_real(y, x).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-10);
            let c = kernel.eval_real(2.0 * x, y).unwrap();
            let d = kernel.eval_real(x, 2.0 * y).unwrap();
            assert_relative_eq!(c, d, max_relative = 1e-10);
        }
    }

    #[test]
    fn batch_agrees_with_single_evaluations() {
        let kernel = Rank1Kernel::new(0.4).unwrap();
        let y = Complex64::new(0.0, -2.3);
        let xs = [1.7, -0.2, 0.0, 3.5, -3.5, 0.9];
        let batch = kernel.eval_many(&xs, y).unwrap();
        for (i, &x) in xs.iter().enumerate() {
            let single = kernel.eval(x, y).unwrap();
            assert!((batch[i] - single).norm() < 1e-11, "x={x}");
        }
    }

    #[test]
    fn at_origin_equals_one() {
        let kernel = Rank1Kernel::new(1.1).unwrap();
        let e = kernel.eval(0.0, Complex64::new(0.4, 0.8)).unwrap();
        assert!((e - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_multiplicity() {
        assert!(Rank1Kernel::new(-0.1).is_err());
        assert!(Rank1Kernel::new(f64::NAN).is_err());
    }
}
