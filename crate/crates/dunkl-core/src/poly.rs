//! Multivariate polynomials with exact rational coefficients.
//!
//! Difference quotients like `(p - p∘σ) / ⟨α,x⟩` are bona fide polynomials
//! whenever the numerator vanishes on the hyperplane `⟨α,x⟩ = 0`, and the
//! whole point of this module is to perform that division exactly. Terms are
//! kept in a sorted map so operations are deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomial dimensions differ ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("division by a linear form left a nonzero remainder")]
    InexactDivision,
    #[error("the divisor linear form is zero")]
    ZeroDivisor,
    #[error("invalid polynomial data: {0}")]
    BadData(String),
}

/// A polynomial in `dim` variables over the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        MultiPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        let mut p = Self::zero(dim);
        if !c.is_zero() {
            p.terms.insert(vec![0; dim], c);
        }
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    /// The coordinate polynomial `x_i`.
    pub fn variable(dim: usize, i: usize) -> Self {
        assert!(i < dim);
        let mut exp = vec![0; dim];
        exp[i] = 1;
        Self::monomial(dim, exp, Rational::one())
    }

    pub fn monomial(dim: usize, exp: Vec<u32>, coeff: Rational) -> Self {
        assert_eq!(exp.len(), dim);
        let mut p = Self::zero(dim);
        if !coeff.is_zero() {
            p.terms.insert(exp, coeff);
        }
        p
    }

    /// A linear form `⟨c, x⟩`.
    pub fn linear_form(coeffs: &[Rational]) -> Self {
        let dim = coeffs.len();
        let mut p = Self::zero(dim);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut exp = vec![0; dim];
                exp[i] = 1;
                p.terms.insert(exp, c.clone());
            }
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &[u32]) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum::<u32>()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d0) => degs.all(|d| d == d0),
        }
    }

    /// The degree-`d` homogeneous part.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let mut p = Self::zero(self.dim);
        for (e, c) in &self.terms {
            if e.iter().sum::<u32>() == d {
                p.terms.insert(e.clone(), c.clone());
            }
        }
        p
    }

    fn insert_add(&mut self, exp: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_add(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.dim);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert_add(exp, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.dim);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        assert!(i < self.dim);
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut exp = e.clone();
            exp[i] -= 1;
            out.insert_add(exp, c * Rational::from_integer(BigInt::from(e[i])));
        }
        out
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.dim).map(|i| self.derivative(i)).collect()
    }

    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for i in 0..self.dim {
            out = out.add(&self.derivative(i).derivative(i));
        }
        out
    }

    pub fn eval_rational(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.dim);
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (xi, &ei) in x.iter().zip(e) {
                for _ in 0..ei {
                    term *= xi;
                }
            }
            acc += term;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut term = rational_to_f64(c);
            for (xi, &ei) in x.iter().zip(e) {
                term *= xi.powi(ei as i32);
            }
            acc += term;
        }
        acc
    }

    /// Substitute `x -> M x` where `M` is a `dim × dim` rational matrix,
    /// i.e. return the polynomial `p(Mx)`.
    pub fn compose_linear(&self, m: &[Vec<Rational>]) -> Self {
        assert_eq!(m.len(), self.dim);
        for row in m {
            assert_eq!(row.len(), self.dim);
        }
        // Row i of M gives the linear form that replaces x_i.
        let forms: Vec<MultiPoly> = (0..self.dim).map(|i| Self::linear_form(&m[i])).collect();
        // Cache powers of each form as they occur.
        let mut powers: Vec<Vec<MultiPoly>> = forms
            .iter()
            .map(|f| vec![Self::one(self.dim), f.clone()])
            .collect();
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            let mut term = Self::constant(self.dim, c.clone());
            for (i, &ei) in e.iter().enumerate() {
                if ei == 0 {
                    continue;
                }
                while powers[i].len() <= ei as usize {
                    let next = powers[i].last().unwrap().mul(&forms[i]);
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][ei as usize]);
            }
            out = out.add(&term);
        }
        out
    }

    /// Exact division by the linear form `⟨c, x⟩`. Fails unless the form
    /// divides `self` with zero remainder.
    pub fn div_linear_form(&self, c: &[Rational]) -> Result<Self, PolyError> {
        assert_eq!(c.len(), self.dim);
        if self.is_zero() {
            return Ok(Self::zero(self.dim));
        }
        let pivot = c
            .iter()
            .position(|ci| !ci.is_zero())
            .ok_or(PolyError::ZeroDivisor)?;
        let cp = c[pivot].clone();

        // Write self = Σ_d p_d · x_pivot^d with p_d free of x_pivot, and
        // match coefficients in self = (c_p x_pivot + L') q from the top
        // degree downward.
        let mut slices: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (e, coeff) in &self.terms {
            let d = e[pivot];
            let mut rest = e.clone();
            rest[pivot] = 0;
            slices
                .entry(d)
                .or_insert_with(|| Self::zero(self.dim))
                .insert_add(rest, coeff.clone());
        }
        let top = *slices.keys().next_back().unwrap();
        let mut lrest = c.to_vec();
        lrest[pivot] = Rational::zero();
        let lrest_poly = Self::linear_form(&lrest);

        let mut q_slices: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        let zero = Self::zero(self.dim);
        // q has degree top-1 in the pivot variable.
        for d in (1..=top).rev() {
            let p_d = slices.get(&d).unwrap_or(&zero).clone();
            let q_d = q_slices.get(&d).unwrap_or(&zero);
            let numer = p_d.sub(&lrest_poly.mul(q_d));
            let inv = Rational::one() / cp.clone();
            q_slices.insert(d - 1, numer.scale(&inv));
        }
        // Remainder check at pivot degree zero.
        let p_0 = slices.get(&0).unwrap_or(&zero).clone();
        let q_0 = q_slices.get(&0).unwrap_or(&zero);
        if p_0 != lrest_poly.mul(q_0) {
            return Err(PolyError::InexactDivision);
        }

        let mut out = Self::zero(self.dim);
        for (d, slice) in q_slices {
            for (e, coeff) in slice.terms {
                let mut exp = e;
                exp[pivot] += d;
                out.insert_add(exp, coeff);
            }
        }
        Ok(out)
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of truncated floats for huge entries.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Parse a rational from `"3"`, `"-1/2"`, or a plain decimal like `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational, PolyError> {
    let s = s.trim();
    let bad = |m: &str| PolyError::BadData(format!("{m}: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let num = BigInt::from_str(n.trim()).map_err(|_| bad("bad numerator"))?;
        let den = BigInt::from_str(d.trim()).map_err(|_| bad("bad denominator"))?;
        if den.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let neg = int_part.trim_start().starts_with('-');
        let int_digits = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            BigInt::from_str(int_part).map_err(|_| bad("bad integer part"))?
        };
        if !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad("bad fractional part"));
        }
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac = if frac_part.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(frac_part).map_err(|_| bad("bad fractional part"))?
        };
        let total = int_digits.magnitude().clone() * scale.magnitude().clone() + frac.magnitude();
        let mut r = Rational::new(BigInt::from(total), scale);
        if neg {
            r = -r;
        }
        return Ok(r);
    }
    let n = BigInt::from_str(s).map_err(|_| bad("bad integer"))?;
    Ok(Rational::from_integer(n))
}

/// Exact conversion from an f64 (every finite f64 is a dyadic rational).
pub fn rational_from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float required")
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Vec<u32>,
    num: String,
    den: String,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    dim: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = PolyRepr {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRepr {
                    exp: e.clone(),
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(deserializer)?;
        let mut p = MultiPoly::zero(repr.dim);
        for t in repr.terms {
            if t.exp.len() != repr.dim {
                return Err(serde::de::Error::custom("exponent length != dim"));
            }
            let num = BigInt::from_str(&t.num).map_err(serde::de::Error::custom)?;
            let den = BigInt::from_str(&t.den).map_err(serde::de::Error::custom)?;
            if den.is_zero() {
                return Err(serde::de::Error::custom("zero denominator"));
            }
            p.insert_add(t.exp, Rational::new(num, den));
        }
        Ok(p)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            }
            let mag = c.abs();
            let is_const = e.iter().all(|&x| x == 0);
            if !mag.is_one() || is_const {
                write!(f, "{mag}")?;
            }
            for (i, &ei) in e.iter().enumerate() {
                if ei == 1 {
                    write!(f, "x{i}")?;
                } else if ei > 1 {
                    write!(f, "x{i}^{ei}")?;
                }
            }
        }
        Ok(())
    }
}

/// All exponent vectors of total degree `deg` in `dim` variables, in
/// lexicographic order. This fixes the monomial basis used by the exact
/// linear-algebra routines.
pub fn monomial_exponents(dim: usize, deg: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; dim];
    fn rec(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, pos: usize, left: u32) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for d in (0..=left).rev() {
            cur[pos] = d;
            rec(out, cur, pos + 1, left - d);
        }
    }
    if dim == 0 {
        if deg == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(&mut out, &mut cur, 0, deg);
    out
}
