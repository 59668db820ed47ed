//! Exact rational linear algebra: reduced row echelon form, nullspaces, and
//! consistent linear solves. Matrix sizes here stay in the dozens, so plain
//! fraction-free-ish Gaussian elimination with `BigRational` entries is fine.

use num::traits::{One, Zero};
use thiserror::Error;

use crate::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("inconsistent linear system")]
    Inconsistent,
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

pub type Matrix = Vec<Vec<Rational>>;

/// Reduce `m` in place to reduced row echelon form; returns pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut row = 0usize;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = Rational::one() / m[row][col].clone();
        for v in m[row][col..].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[row][col..].to_vec();
        for (r, target) in m.iter_mut().enumerate() {
            if r != row && !target[col].is_zero() {
                let factor = target[col].clone();
                for (t, s) in target[col..].iter_mut().zip(&pivot_row) {
                    *t -= &factor * s;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Basis of the nullspace of `m` (vectors of length `cols`).
pub fn nullspace(m: &Matrix, cols: usize) -> Vec<Vec<Rational>> {
    let mut work = m.clone();
    for row in &work {
        assert_eq!(row.len(), cols);
    }
    let pivots = rref(&mut work);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().cloned().collect();
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_set.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![Rational::zero(); cols];
        v[f] = Rational::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -work[r][f].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solve `A X = B` for all columns of `B` at once, requiring consistency.
/// `A` is `rows × cols`, `B` is `rows × nrhs`; the result is `cols × nrhs`.
/// Free variables are set to zero (the system here is always uniquely
/// solvable in practice, but the routine does not insist on it).
pub fn solve_multi(a: &Matrix, b: &Matrix, cols: usize) -> Result<Matrix, LinalgError> {
    let rows = a.len();
    if b.len() != rows {
        return Err(LinalgError::Shape(format!(
            "A has {rows} rows but B has {}",
            b.len()
        )));
    }
    let nrhs = if rows == 0 { 0 } else { b[0].len() };
    let mut work: Matrix = Vec::with_capacity(rows);
    for r in 0..rows {
        if a[r].len() != cols {
            return Err(LinalgError::Shape("ragged A".into()));
        }
        let mut row = a[r].clone();
        row.extend(b[r].iter().cloned());
        work.push(row);
    }
    let pivots = rref(&mut work);
    // Any pivot landing in the B block marks an inconsistent system.
    if pivots.iter().any(|&p| p >= cols) {
        return Err(LinalgError::Inconsistent);
    }
    // Rows that are zero in the A block must be zero in the B block too.
    for row in work.iter().take(rows).skip(pivots.len()) {
        if row[cols..].iter().any(|v| !v.is_zero()) {
            return Err(LinalgError::Inconsistent);
        }
    }
    let mut x = vec![vec![Rational::zero(); nrhs]; cols];
    for (r, &p) in pivots.iter().enumerate() {
        for j in 0..nrhs {
            x[p][j] = work[r][cols + j].clone();
        }
    }
    Ok(x)
}
