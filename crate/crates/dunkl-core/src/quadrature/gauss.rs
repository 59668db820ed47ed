//! Gauss-Legendre and Gauss-Jacobi rules on [-1, 1] via Golub-Welsch:
//! nodes are eigenvalues of the symmetric tridiagonal recurrence matrix,
//! weights come from the first components of the normalized eigenvectors.

use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::special::beta;

use super::QuadratureError;

/// Nodes and weights for `∫_{-1}^{1} (1-x)^α (1+x)^β f(x) dx`.
/// The weight function is folded into the returned weights; `f` is sampled
/// bare. Results are cached per `(n, α, β)`.
pub fn gauss_jacobi(
    n: usize,
    alpha: f64,
    beta_exp: f64,
) -> Result<Vec<(f64, f64)>, QuadratureError> {
    if n == 0 {
        return Err(QuadratureError::BadRule("need at least one node".into()));
    }
    if alpha <= -1.0 || beta_exp <= -1.0 {
        return Err(QuadratureError::BadRule(format!(
            "jacobi exponents must exceed -1 (got α={alpha}, β={beta_exp})"
        )));
    }
    type NodeCache = Mutex<HashMap<(usize, u64, u64), Vec<(f64, f64)>>>;
    static CACHE: OnceLock<NodeCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (n, alpha.to_bits(), beta_exp.to_bits());
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }

    let (a, b) = (alpha, beta_exp);
    let mut diag = vec![0.0f64; n];
    let mut off = vec![0.0f64; n.saturating_sub(1)];
    diag[0] = (b - a) / (a + b + 2.0);
    for j in 1..n {
        let jj = j as f64;
        let denom = 2.0 * jj + a + b;
        diag[j] = (b * b - a * a) / (denom * (denom + 2.0));
        let off_sq = if j == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
        } else {
            4.0 * jj * (jj + a) * (jj + b) * (jj + a + b)
                / (denom.powi(2) * (denom + 1.0) * (denom - 1.0))
        };
        off[j - 1] = off_sq.sqrt();
    }

    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = off[i];
            m[(i + 1, i)] = off[i];
        }
    }
    let eig = m.symmetric_eigen();
    let mu0 = 2f64.powf(a + b + 1.0) * beta(a + 1.0, b + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let node = eig.eigenvalues[i];
            let first = eig.eigenvectors[(0, i)];
            (node, mu0 * first * first)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    cache.lock().unwrap().insert(key, pairs.clone());
    Ok(pairs)
}

/// Plain Gauss-Legendre on [-1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    gauss_jacobi(n, 0.0, 0.0).expect("legendre exponents are valid")
}

/// Gauss-Legendre mapped to `[lo, hi]`.
pub fn gauss_legendre_on(lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let m = 0.5 * (hi - lo);
    let c = 0.5 * (hi + lo);
    gauss_legendre(n)
        .into_iter()
        .map(|(t, w)| (c + m * t, w * m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn poly_moment_legendre(m: u32) -> f64 {
        // ∫_{-1}^1 x^m dx
        if m % 2 == 1 {
            0.0
        } else {
            2.0 / (m as f64 + 1.0)
        }
    }

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        for n in 1..=12usize {
            let rule = gauss_legendre(n);
            for m in 0..(2 * n as u32) {
                let got: f64 = rule.iter().map(|(x, w)| w * x.powi(m as i32)).sum();
                assert_relative_eq!(got, poly_moment_legendre(m), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn legendre_weights_sum_to_interval_length() {
        let rule = gauss_legendre(32);
        let total: f64 = rule.iter().map(|(_, w)| w).sum();
        assert_relative_eq!(total, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn jacobi_total_mass_matches_beta_function() {
        for &(a, b) in &[(0.0, 1.0), (0.5, 0.5), (0.0, 2.5), (1.7, 0.3), (0.0, -0.5)] {
            let rule = gauss_jacobi(24, a, b).unwrap();
            let mass: f64 = rule.iter().map(|(_, w)| w).sum();
            let expect = 2f64.powf(a + b + 1.0) * crate::special::beta(a + 1.0, b + 1.0);
            assert_relative_eq!(mass, expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn jacobi_first_moment_closed_form() {
        // ∫ (1+x)^β x dx over [-1,1] equals 2^{β+1} (β/((β+1)(β+2)) ... use
        // substitution u = (1+x)/2: ∫ u^β (2u-1) 2^{β+1} du = 2^{β+1}(2/(β+2) - 1/(β+1)).
        for &b in &[0.5, 1.0, 3.25] {
            let rule = gauss_jacobi(16, 0.0, b).unwrap();
            let got: f64 = rule.iter().map(|(x, w)| w * x).sum();
            let expect = 2f64.powf(b + 1.0) * (2.0 / (b + 2.0) - 1.0 / (b + 1.0));
            assert_relative_eq!(got, expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn jacobi_rejects_bad_exponents() {
        assert!(gauss_jacobi(8, -1.0, 0.0).is_err());
        assert!(gauss_jacobi(8, 0.0, -1.2).is_err());
        assert!(gauss_jacobi(0, 0.0, 0.0).is_err());
    }

    #[test]
    fn mapped_rule_integrates_on_interval() {
        let rule = gauss_legendre_on(1.0, 4.0, 10);
        let got: f64 = rule.iter().map(|(x, w)| w * x * x).sum();
        assert_relative_eq!(got, (64.0 - 1.0) / 3.0, epsilon = 1e-11);
    }
}
