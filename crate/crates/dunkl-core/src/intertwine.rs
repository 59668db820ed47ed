//! The intertwining operator `V_k`: the unique degree-preserving linear map
//! on polynomials with `V_k 1 = 1` and `T_i ∘ V_k = V_k ∘ ∂_i` for every
//! coordinate. It is computed degree by degree with exact rational linear
//! algebra, so the returned polynomials carry no roundoff.

use std::collections::BTreeMap;

use num::{One, Zero};
use thiserror::Error;

use crate::linalg::{solve_multi, LinalgError, Matrix};
use crate::ops::{dunkl_apply_poly, OpsError};
use crate::poly::{monomial_exponents, MultiPoly};
use crate::root_system::DunklContext;
use crate::Rational;

#[derive(Debug, Error)]
pub enum IntertwineError {
    #[error(transparent)]
    Ops(#[from] OpsError),
    #[error("intertwining system at degree {degree} is not solvable: {source}")]
    Unsolvable { degree: usize, source: LinalgError },
}

/// Matrices of `V_k` on each homogeneous component, cached per degree so
/// repeated applications share the solve work.
pub struct Intertwiner<'a> {
    ctx: &'a DunklContext,
    tables: Vec<DegreeTable>,
}

struct DegreeTable {
    exps: Vec<Vec<u32>>,
    /// `columns[j]` holds the coefficients of `V(x^{exps[j]})` in the same
    /// monomial basis.
    columns: Vec<Vec<Rational>>,
}

impl<'a> Intertwiner<'a> {
    pub fn new(ctx: &'a DunklContext) -> Self {
        let dim = ctx.dim();
        let degree_zero = DegreeTable {
            exps: monomial_exponents(dim, 0),
            columns: vec![vec![Rational::one()]],
        };
        Intertwiner {
            ctx,
            tables: vec![degree_zero],
        }
    }

    /// Apply `V_k`, computing (and caching) degree tables as needed.
    pub fn apply(&mut self, p: &MultiPoly) -> Result<MultiPoly, IntertwineError> {
        let dim = self.ctx.dim();
        let Some(degree) = p.degree() else {
            return Ok(MultiPoly::zero(dim));
        };
        self.extend_to(degree as usize)?;
        let mut out = MultiPoly::zero(dim);
        for d in 0..=degree {
            let part = p.homogeneous_part(d);
            if part.is_zero() {
                continue;
            }
            let table = &self.tables[d as usize];
            let index: BTreeMap<&Vec<u32>, usize> =
                table.exps.iter().enumerate().map(|(i, e)| (e, i)).collect();
            let mut coeffs = vec![Rational::zero(); table.exps.len()];
            for (e, c) in part.terms() {
                let j = index[e];
                for (r, v) in table.columns[j].iter().enumerate() {
                    if !v.is_zero() {
                        coeffs[r] += c * v;
                    }
                }
            }
            for (r, c) in coeffs.into_iter().enumerate() {
                if !c.is_zero() {
                    out = out.add(&MultiPoly::monomial(dim, table.exps[r].clone(), c));
                }
            }
        }
        Ok(out)
    }

    fn extend_to(&mut self, degree: usize) -> Result<(), IntertwineError> {
        let dim = self.ctx.dim();
        while self.tables.len() <= degree {
            let n = self.tables.len();
            let exps = monomial_exponents(dim, n as u32);
            let q = exps.len();
            let prev = self.tables.last().expect("degree zero table present");
            let pdim = prev.exps.len();
            let prev_index: BTreeMap<&Vec<u32>, usize> =
                prev.exps.iter().enumerate().map(|(i, e)| (e, i)).collect();

            // Stack the maps T_i : P_n → P_{n-1}; the unknown matrix X obeys
            // A·X = B with B stacking V_{n-1} ∘ ∂_i on each monomial.
            let mut a: Matrix = vec![vec![Rational::zero(); q]; dim * pdim];
            let mut b: Matrix = vec![vec![Rational::zero(); q]; dim * pdim];
            for (j, e) in exps.iter().enumerate() {
                let mono = MultiPoly::monomial(dim, e.clone(), Rational::one());
                for i in 0..dim {
                    let ti = dunkl_apply_poly(self.ctx, i, &mono)?;
                    for (ex, c) in ti.terms() {
                        a[i * pdim + prev_index[ex]][j] = c.clone();
                    }
                    if e[i] > 0 {
                        let mut reduced = e.clone();
                        reduced[i] -= 1;
                        let col = &prev.columns[prev_index[&reduced]];
                        let scale = Rational::from_integer(e[i].into());
                        for (r, v) in col.iter().enumerate() {
                            if !v.is_zero() {
                                b[i * pdim + r][j] = v * &scale;
                            }
                        }
                    }
                }
            }
            let x = solve_multi(&a, &b, q)
                .map_err(|source| IntertwineError::Unsolvable { degree: n, source })?;
            let columns = (0..q)
                .map(|j| (0..q).map(|r| x[r][j].clone()).collect())
                .collect();
            self.tables.push(DegreeTable { exps, columns });
        }
        Ok(())
    }
}

/// One-shot application of `V_k` (builds the degree tables and discards them).
pub fn intertwine(ctx: &DunklContext, p: &MultiPoly) -> Result<MultiPoly, IntertwineError> {
    Intertwiner::new(ctx).apply(p)
}
