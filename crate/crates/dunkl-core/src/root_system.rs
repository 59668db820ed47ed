//! Finite root systems, their reflection groups, and multiplicity data.
//!
//! All roots are normalized to squared length 2, so the reflection in a root
//! `α` acts as `σ_α x = x − ⟨α,x⟩ α`. Where the root directions are rational
//! (types A, B, D, sign flips, and the dihedral angles that happen to give
//! rational directions) an exact primitive integer direction is carried
//! alongside the floating coordinates; the polynomial operator paths require
//! it. Dihedral systems with irrational directions fall back to floating
//! coordinates with a `1e-12` set-membership tolerance.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num::bigint::BigInt;
use num::traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{parse_rational, rational_from_f64, rational_to_f64};
use crate::{Rational, ROOT_MATCH_TOL};

/// Upper bound on reflection group size before generation aborts. Large
/// closures signal corrupted input rather than a legitimate use case.
pub const DEFAULT_GROUP_CAP: usize = 20_000;

#[derive(Debug, Error)]
pub enum RootSystemError {
    #[error("bad family parameter: {0}")]
    BadParameter(String),
    #[error("reflection group exceeded cap of {cap} elements")]
    GroupTooLarge { cap: usize },
    #[error("reflection of a root left the root set (index {index})")]
    NotClosed { index: usize },
    #[error("multiplicity values must be nonnegative")]
    NegativeMultiplicity,
    #[error("expected {expected} orbit multiplicities, got {got}")]
    OrbitCountMismatch { expected: usize, got: usize },
    #[error("exact rational root data unavailable for this system")]
    MissingExactData,
    #[error("invalid root system document: {0}")]
    BadDocument(String),
}

/// A single root, normalized to `|α|² = 2`.
#[derive(Debug, Clone)]
pub struct Root {
    coords: Vec<f64>,
    exact_dir: Option<Vec<BigInt>>,
}

impl Root {
    /// Build from a primitive integer direction; the stored coordinates are
    /// the direction rescaled to squared length 2.
    pub fn from_int_dir(dir: &[i64]) -> Self {
        let big: Vec<BigInt> = dir.iter().map(|&d| BigInt::from(d)).collect();
        let norm2: f64 = dir.iter().map(|&d| (d * d) as f64).sum();
        assert!(norm2 > 0.0, "zero direction");
        let scale = (2.0 / norm2).sqrt();
        let coords = dir.iter().map(|&d| d as f64 * scale).collect();
        Root {
            coords,
            exact_dir: Some(primitive(big)),
        }
    }

    /// Build from floating coordinates (rescaled to squared length 2),
    /// recovering an exact direction when one is evident.
    pub fn from_coords(v: &[f64]) -> Self {
        let norm2: f64 = v.iter().map(|x| x * x).sum();
        assert!(norm2 > 0.0, "zero root");
        let scale = (2.0 / norm2).sqrt();
        let coords: Vec<f64> = v.iter().map(|x| x * scale).collect();
        let exact_dir = rationalize_direction(&coords);
        Root { coords, exact_dir }
    }

    /// 2-D root at angle `theta`.
    pub fn from_angle(theta: f64) -> Self {
        Self::from_coords(&[theta.cos(), theta.sin()])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Primitive integer direction parallel to the root, if known exactly.
    pub fn exact_dir(&self) -> Option<&[BigInt]> {
        self.exact_dir.as_deref()
    }

    /// The rational square of the factor `c` with `α = c · dir`.
    pub fn scale2(&self) -> Option<Rational> {
        let dir = self.exact_dir.as_ref()?;
        let norm2: BigInt = dir.iter().map(|d| d * d).sum();
        Some(Rational::new(BigInt::from(2), norm2))
    }

    pub fn inner(&self, x: &[f64]) -> f64 {
        dot(&self.coords, x)
    }

    /// `σ_α x = x − ⟨α,x⟩ α`.
    pub fn reflect(&self, x: &[f64]) -> Vec<f64> {
        let t = self.inner(x);
        x.iter()
            .zip(&self.coords)
            .map(|(xi, ai)| xi - t * ai)
            .collect()
    }

    /// Exact reflection matrix `I − (2/|dir|²) dir dirᵀ`, rows indexed first.
    pub fn reflection_matrix_rational(&self) -> Option<Vec<Vec<Rational>>> {
        let dir = self.exact_dir.as_ref()?;
        let n = dir.len();
        let norm2: BigInt = dir.iter().map(|d| d * d).sum();
        let two_over = Rational::new(BigInt::from(2), norm2);
        let mut m = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut entry = -(&two_over * Rational::from_integer(&dir[i] * &dir[j]));
                if i == j {
                    entry += Rational::one();
                }
                m[i][j] = entry;
            }
        }
        Some(m)
    }

    /// Exact reflection of a rational point.
    pub fn reflect_rational(&self, x: &[Rational]) -> Option<Vec<Rational>> {
        let dir = self.exact_dir.as_ref()?;
        let norm2: BigInt = dir.iter().map(|d| d * d).sum();
        let mut t = Rational::zero();
        for (xi, di) in x.iter().zip(dir) {
            t += xi * Rational::from_integer(di.clone());
        }
        let factor = t * Rational::new(BigInt::from(2), norm2);
        Some(
            x.iter()
                .zip(dir)
                .map(|(xi, di)| xi - &factor * Rational::from_integer(di.clone()))
                .collect(),
        )
    }

    fn negated(&self) -> Self {
        Root {
            coords: self.coords.iter().map(|x| -x).collect(),
            exact_dir: self
                .exact_dir
                .as_ref()
                .map(|d| d.iter().map(|x| -x).collect()),
        }
    }

    fn matches(&self, v: &[f64], tol: f64) -> bool {
        self.coords.iter().zip(v).all(|(a, b)| (a - b).abs() <= tol)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for x in &v {
        g = num::integer::gcd(g, x.abs());
    }
    if !g.is_zero() && !g.is_one() {
        for x in &mut v {
            *x /= &g;
        }
    }
    v
}

/// Try to recover a primitive integer direction from floating coordinates.
fn rationalize_direction(v: &[f64]) -> Option<Vec<BigInt>> {
    let lead = v.iter().cloned().fold(0.0f64, |m, x| m.max(x.abs()));
    if lead == 0.0 {
        return None;
    }
    for q in 1..=16i64 {
        let scaled: Vec<f64> = v.iter().map(|x| x / lead * q as f64).collect();
        if scaled.iter().all(|x| (x - x.round()).abs() < 1e-9) {
            let ints: Vec<BigInt> = scaled
                .iter()
                .map(|x| BigInt::from(x.round() as i64))
                .collect();
            if ints.iter().all(|x| x.is_zero()) {
                return None;
            }
            let dir = primitive(ints);
            // Confirm the rounded direction reproduces the coordinates.
            let norm2: f64 = dir
                .iter()
                .map(|d| {
                    let f = d.to_f64().unwrap();
                    f * f
                })
                .sum();
            let scale = (2.0 / norm2).sqrt();
            let ok = dir
                .iter()
                .zip(v)
                .all(|(d, x)| (d.to_f64().unwrap() * scale - x).abs() < 1e-10);
            if ok {
                return Some(dir);
            }
        }
    }
    None
}

/// Built-in families. `A { rank }` lives in `rank + 1` coordinates (the
/// difference-of-coordinates realization); the others act on `rank`
/// coordinates. `I2 { m }` is the dihedral system with `2m` roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    A { rank: usize },
    B { rank: usize },
    D { rank: usize },
    I2 { m: usize },
    Z2Power { n: usize },
    Product(Box<Family>, Box<Family>),
}

impl Family {
    pub fn label(&self) -> String {
        match self {
            Family::A { rank } => format!("A{rank}"),
            Family::B { rank } => format!("B{rank}"),
            Family::D { rank } => format!("D{rank}"),
            Family::I2 { m } => format!("I2({m})"),
            Family::Z2Power { n } => format!("Z2^{n}"),
            Family::Product(a, b) => format!("{}x{}", a.label(), b.label()),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Family::A { rank } => rank + 1,
            Family::B { rank } | Family::D { rank } => *rank,
            Family::I2 { .. } => 2,
            Family::Z2Power { n } => *n,
            Family::Product(a, b) => a.ambient_dim() + b.ambient_dim(),
        }
    }

    /// Parse a descriptor like `A2`, `B3`, `Z2^4`, `I2(5)`, or a product
    /// `A2xZ2^1`. A bare letter takes the rank from the second argument.
    pub fn parse(s: &str, rank: Option<usize>) -> Result<Family, RootSystemError> {
        let s = s.trim();
        if let Some((a, b)) = split_product(s) {
            return Ok(Family::Product(
                Box::new(Family::parse(a, None)?),
                Box::new(Family::parse(b, None)?),
            ));
        }
        let bad = || RootSystemError::BadParameter(format!("cannot parse family {s:?}"));
        let need = |r: Option<usize>| {
            r.ok_or_else(|| {
                RootSystemError::BadParameter(format!("family {s:?} needs a rank parameter"))
            })
        };
        if let Some(rest) = s.strip_prefix("Z2") {
            let n = match rest.strip_prefix('^') {
                Some(digits) => digits.parse::<usize>().map_err(|_| bad())?,
                None if rest.is_empty() => need(rank)?,
                None => return Err(bad()),
            };
            if n == 0 {
                return Err(bad());
            }
            return Ok(Family::Z2Power { n });
        }
        if let Some(rest) = s.strip_prefix("I2") {
            let m = if rest.is_empty() {
                need(rank)?
            } else {
                rest.trim_start_matches('(')
                    .trim_end_matches(')')
                    .parse::<usize>()
                    .map_err(|_| bad())?
            };
            if m == 0 {
                return Err(bad());
            }
            return Ok(Family::I2 { m });
        }
        let (letter, rest) = s.split_at(1);
        let r = if rest.is_empty() {
            need(rank)?
        } else {
            rest.parse::<usize>().map_err(|_| bad())?
        };
        match letter {
            "A" if r >= 1 => Ok(Family::A { rank: r }),
            "B" if r >= 1 => Ok(Family::B { rank: r }),
            "D" if r >= 2 => Ok(Family::D { rank: r }),
            _ => Err(bad()),
        }
    }
}

fn split_product(s: &str) -> Option<(&str, &str)> {
    // Split on a lowercase 'x' that is not part of a token like "Z2^..".
    let mut depth = 0usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            'x' if depth == 0 && i > 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

/// A finite root system together with a fixed positive subsystem and the
/// orbit partition under its own reflection group.
#[derive(Debug, Clone)]
pub struct RootSystem {
    label: String,
    dim: usize,
    roots: Vec<Root>,
    positive: Vec<usize>,
    orbits: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
}

impl RootSystem {
    pub fn build(family: &Family) -> Result<Self, RootSystemError> {
        let roots = family_roots(family)?;
        Self::from_roots(family.label(), roots)
    }

    /// Assemble a system from an explicit list of roots (each normalized on
    /// entry). Checks pairing, closure, and computes positives and orbits.
    pub fn from_roots(label: String, roots: Vec<Root>) -> Result<Self, RootSystemError> {
        if roots.is_empty() {
            return Err(RootSystemError::BadParameter("no roots".into()));
        }
        let dim = roots[0].dim();
        for r in &roots {
            if r.dim() != dim {
                return Err(RootSystemError::BadParameter(
                    "roots of mixed dimension".into(),
                ));
            }
        }
        let find = |v: &[f64]| roots.iter().position(|r| r.matches(v, ROOT_MATCH_TOL));
        // Every root's negative must be present, and reflecting any root in
        // any other must stay inside the set.
        for (i, r) in roots.iter().enumerate() {
            let neg: Vec<f64> = r.coords().iter().map(|x| -x).collect();
            if find(&neg).is_none() {
                return Err(RootSystemError::NotClosed { index: i });
            }
        }
        for (i, mirror) in roots.iter().enumerate() {
            for r in &roots {
                let image = mirror.reflect(r.coords());
                if find(&image).is_none() {
                    return Err(RootSystemError::NotClosed { index: i });
                }
            }
        }

        // Positive subsystem: sign against a fixed generic direction.
        let generic: Vec<f64> = (0..dim).map(|i| PI.powi(-(i as i32))).collect();
        let positive: Vec<usize> = (0..roots.len())
            .filter(|&i| dot(roots[i].coords(), &generic) > 0.0)
            .collect();
        if 2 * positive.len() != roots.len() {
            return Err(RootSystemError::BadParameter(
                "generic vector failed to split the root set in half".into(),
            ));
        }

        // Orbits under the full group: close each root under all reflections.
        let mut orbit_of = vec![usize::MAX; roots.len()];
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for start in 0..roots.len() {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            let mut members = Vec::new();
            let mut queue = VecDeque::from([start]);
            orbit_of[start] = id;
            while let Some(i) = queue.pop_front() {
                members.push(i);
                for mirror in &roots {
                    let image = mirror.reflect(roots[i].coords());
                    let j = find(&image).ok_or(RootSystemError::NotClosed { index: i })?;
                    if orbit_of[j] == usize::MAX {
                        orbit_of[j] = id;
                        queue.push_back(j);
                    }
                }
            }
            members.sort_unstable();
            orbits.push(members);
        }

        Ok(RootSystem {
            label,
            dim,
            roots,
            positive,
            orbits,
            orbit_of,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn root(&self, i: usize) -> &Root {
        &self.roots[i]
    }

    pub fn num_positive(&self) -> usize {
        self.positive.len()
    }

    pub fn positive_indices(&self) -> &[usize] {
        &self.positive
    }

    pub fn positive_roots(&self) -> impl Iterator<Item = (usize, &Root)> {
        self.positive.iter().map(move |&i| (i, &self.roots[i]))
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn num_orbits(&self) -> usize {
        self.orbits.len()
    }

    pub fn orbit_of(&self, root_index: usize) -> usize {
        self.orbit_of[root_index]
    }

    /// Count of positive roots in each orbit.
    pub fn positive_orbit_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.orbits.len()];
        for &i in &self.positive {
            sizes[self.orbit_of[i]] += 1;
        }
        sizes
    }

    /// True when every root carries an exact rational direction.
    pub fn has_exact_roots(&self) -> bool {
        self.roots.iter().all(|r| r.exact_dir.is_some())
    }

    /// Signs of `⟨α, x⟩` over positive roots (0 within the hyperplane
    /// tolerance) and the euclidean distance to the nearest hyperplane.
    pub fn chamber_info(&self, x: &[f64]) -> ChamberInfo {
        let mut signs = Vec::with_capacity(self.positive.len());
        let mut distance = f64::INFINITY;
        for (_, root) in self.positive_roots() {
            let t = root.inner(x);
            // |α| = √2, so the distance to the hyperplane is |⟨α,x⟩| / √2.
            let d = t.abs() / std::f64::consts::SQRT_2;
            distance = distance.min(d);
            signs.push(if d <= crate::HYPERPLANE_TOL {
                0
            } else if t > 0.0 {
                1
            } else {
                -1
            });
        }
        ChamberInfo { signs, distance }
    }

    /// Direct sum with another system (ambient dimensions concatenate).
    pub fn product(&self, other: &RootSystem) -> Result<RootSystem, RootSystemError> {
        let dim = self.dim + other.dim;
        let mut roots = Vec::new();
        for r in &self.roots {
            let mut v = r.coords().to_vec();
            v.resize(dim, 0.0);
            roots.push(Root::from_coords(&v));
        }
        for r in &other.roots {
            let mut v = vec![0.0; self.dim];
            v.extend_from_slice(r.coords());
            roots.push(Root::from_coords(&v));
        }
        RootSystem::from_roots(format!("{}x{}", self.label, other.label), roots)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChamberInfo {
    pub signs: Vec<i8>,
    pub distance: f64,
}

fn family_roots(family: &Family) -> Result<Vec<Root>, RootSystemError> {
    let mut roots = Vec::new();
    let mut push_pair = |dir: Vec<i64>| {
        let r = Root::from_int_dir(&dir);
        let n = r.negated();
        roots.push(r);
        roots.push(n);
    };
    match family {
        Family::A { rank } => {
            if *rank < 1 {
                return Err(RootSystemError::BadParameter("A needs rank >= 1".into()));
            }
            let n = rank + 1;
            for i in 0..n {
                for j in (i + 1)..n {
                    let mut d = vec![0i64; n];
                    d[i] = 1;
                    d[j] = -1;
                    push_pair(d);
                }
            }
        }
        Family::B { rank } => {
            if *rank < 1 {
                return Err(RootSystemError::BadParameter("B needs rank >= 1".into()));
            }
            // Axis roots first so the short orbit is orbit 0.
            for i in 0..*rank {
                let mut d = vec![0i64; *rank];
                d[i] = 1;
                push_pair(d);
            }
            for i in 0..*rank {
                for j in (i + 1)..*rank {
                    for s in [1i64, -1] {
                        let mut d = vec![0i64; *rank];
                        d[i] = 1;
                        d[j] = s;
                        push_pair(d);
                    }
                }
            }
        }
        Family::D { rank } => {
            if *rank < 2 {
                return Err(RootSystemError::BadParameter("D needs rank >= 2".into()));
            }
            for i in 0..*rank {
                for j in (i + 1)..*rank {
                    for s in [1i64, -1] {
                        let mut d = vec![0i64; *rank];
                        d[i] = 1;
                        d[j] = s;
                        push_pair(d);
                    }
                }
            }
        }
        Family::Z2Power { n } => {
            if *n < 1 {
                return Err(RootSystemError::BadParameter("Z2^n needs n >= 1".into()));
            }
            for i in 0..*n {
                let mut d = vec![0i64; *n];
                d[i] = 1;
                push_pair(d);
            }
        }
        Family::I2 { m } => {
            if *m < 1 {
                return Err(RootSystemError::BadParameter("I2 needs m >= 1".into()));
            }
            let mut out = Vec::new();
            for j in 0..2 * *m {
                out.push(Root::from_angle(j as f64 * PI / *m as f64));
            }
            return Ok(out);
        }
        Family::Product(a, b) => {
            let ra = family_roots(a)?;
            let rb = family_roots(b)?;
            let da = a.ambient_dim();
            let dim = da + b.ambient_dim();
            let mut out = Vec::new();
            for r in ra {
                let mut v = r.coords().to_vec();
                v.resize(dim, 0.0);
                out.push(Root::from_coords(&v));
            }
            for r in rb {
                let mut v = vec![0.0; da];
                v.extend_from_slice(r.coords());
                out.push(Root::from_coords(&v));
            }
            return Ok(out);
        }
    }
    Ok(roots)
}

/// The finite reflection group generated by a root system, stored as dense
/// orthogonal matrices in discovery order (identity first).
#[derive(Debug, Clone)]
pub struct ReflectionGroup {
    dim: usize,
    elements: Vec<DMatrix<f64>>,
}

impl ReflectionGroup {
    /// Breadth-first closure over products of generator reflections.
    /// Elements are deduplicated by hashing entries rounded to 12 digits.
    pub fn generate(system: &RootSystem, cap: usize) -> Result<Self, RootSystemError> {
        let dim = system.dim();
        let generators: Vec<DMatrix<f64>> = system
            .positive_roots()
            .map(|(_, r)| {
                let a = DMatrix::from_fn(dim, dim, |i, j| {
                    let d = if i == j { 1.0 } else { 0.0 };
                    d - r.coords()[i] * r.coords()[j]
                });
                a
            })
            .collect();
        let key_of = |m: &DMatrix<f64>| -> Vec<i64> {
            m.iter().map(|&x| (x * 1e12).round() as i64).collect()
        };
        let mut elements = vec![DMatrix::<f64>::identity(dim, dim)];
        let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
        seen.insert(key_of(&elements[0]), 0);
        let mut frontier = VecDeque::from([0usize]);
        while let Some(idx) = frontier.pop_front() {
            let base = elements[idx].clone();
            for g in &generators {
                let next = g * &base;
                let key = key_of(&next);
                if let std::collections::hash_map::Entry::Vacant(slot) = seen.entry(key) {
                    if elements.len() >= cap {
                        return Err(RootSystemError::GroupTooLarge { cap });
                    }
                    slot.insert(elements.len());
                    frontier.push_back(elements.len());
                    elements.push(next);
                }
            }
        }
        Ok(ReflectionGroup { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[DMatrix<f64>] {
        &self.elements
    }

    pub fn apply(&self, idx: usize, x: &[f64]) -> Vec<f64> {
        let v = nalgebra::DVector::from_column_slice(x);
        let out = &self.elements[idx] * v;
        out.iter().cloned().collect()
    }

    /// Index of the group element `g` for which `g·x` has nonnegative inner
    /// product with every positive root (the closed fundamental chamber).
    pub fn into_fundamental_chamber(&self, system: &RootSystem, x: &[f64]) -> Option<usize> {
        (0..self.order()).find(|&idx| {
            let y = self.apply(idx, x);
            system.positive_roots().all(|(_, r)| r.inner(&y) >= -1e-12)
        })
    }
}

/// Multiplicity function: one nonnegative value per orbit, kept exactly.
#[derive(Debug, Clone)]
pub struct MultiplicityFunction {
    per_orbit: Vec<Rational>,
    per_orbit_f64: Vec<f64>,
}

impl MultiplicityFunction {
    pub fn from_rationals(values: Vec<Rational>) -> Result<Self, RootSystemError> {
        if values.iter().any(|v| v.is_negative()) {
            return Err(RootSystemError::NegativeMultiplicity);
        }
        let per_orbit_f64 = values.iter().map(rational_to_f64).collect();
        Ok(MultiplicityFunction {
            per_orbit: values,
            per_orbit_f64,
        })
    }

    /// Exact dyadic conversion of floating multiplicities.
    pub fn from_f64s(values: &[f64]) -> Result<Self, RootSystemError> {
        if values.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(RootSystemError::NegativeMultiplicity);
        }
        Self::from_rationals(values.iter().map(|&v| rational_from_f64(v)).collect())
    }

    /// Parse entries like `1/2`, `0.3`, `2` exactly.
    pub fn parse(values: &[&str]) -> Result<Self, RootSystemError> {
        let mut out = Vec::new();
        for s in values {
            let r = parse_rational(s).map_err(|e| RootSystemError::BadParameter(e.to_string()))?;
            out.push(r);
        }
        Self::from_rationals(out)
    }

    pub fn num_orbits(&self) -> usize {
        self.per_orbit.len()
    }

    pub fn value(&self, orbit: usize) -> f64 {
        self.per_orbit_f64[orbit]
    }

    pub fn value_exact(&self, orbit: usize) -> &Rational {
        &self.per_orbit[orbit]
    }

    pub fn values(&self) -> &[f64] {
        &self.per_orbit_f64
    }
}

/// A root system paired with a multiplicity function: the full context every
/// Dunkl-side computation needs.
#[derive(Debug, Clone)]
pub struct DunklContext {
    system: RootSystem,
    k: MultiplicityFunction,
}

impl DunklContext {
    pub fn new(system: RootSystem, k: MultiplicityFunction) -> Result<Self, RootSystemError> {
        if k.num_orbits() != system.num_orbits() {
            return Err(RootSystemError::OrbitCountMismatch {
                expected: system.num_orbits(),
                got: k.num_orbits(),
            });
        }
        Ok(DunklContext { system, k })
    }

    /// Convenience constructor: build the family and attach multiplicities
    /// (a single value is broadcast across all orbits).
    pub fn build(family: &Family, k_values: &[f64]) -> Result<Self, RootSystemError> {
        let system = RootSystem::build(family)?;
        let k = if k_values.len() == 1 && system.num_orbits() > 1 {
            MultiplicityFunction::from_f64s(&vec![k_values[0]; system.num_orbits()])?
        } else {
            MultiplicityFunction::from_f64s(k_values)?
        };
        Self::new(system, k)
    }

    pub fn system(&self) -> &RootSystem {
        &self.system
    }

    pub fn multiplicities(&self) -> &MultiplicityFunction {
        &self.k
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn k_of_root(&self, root_index: usize) -> f64 {
        self.k.value(self.system.orbit_of(root_index))
    }

    pub fn k_exact_of_root(&self, root_index: usize) -> &Rational {
        self.k.value_exact(self.system.orbit_of(root_index))
    }

    /// `γ = Σ_{α > 0} k_α`.
    pub fn gamma(&self) -> f64 {
        self.system
            .positive_indices()
            .iter()
            .map(|&i| self.k_of_root(i))
            .sum()
    }

    pub fn gamma_exact(&self) -> Rational {
        let mut g = Rational::zero();
        for &i in self.system.positive_indices() {
            g += self.k_exact_of_root(i);
        }
        g
    }

    /// Homogeneous dimension `N + 2γ` that plays the role of the euclidean
    /// dimension in all the weighted inequalities.
    pub fn homogeneous_dim(&self) -> f64 {
        self.dim() as f64 + 2.0 * self.gamma()
    }

    /// The weight `w_k(x) = Π_{α>0} |⟨α,x⟩|^{2 k_α}`.
    pub fn weight(&self, x: &[f64]) -> f64 {
        let mut w = 1.0;
        for (i, root) in self.system.positive_roots() {
            let k = self.k_of_root(i);
            if k != 0.0 {
                w *= root.inner(x).abs().powf(2.0 * k);
            }
        }
        w
    }

    /// The weight restricted to directions: `w_k(ξ)` for `ξ` on the unit
    /// sphere equals `|x|^{-2γ} w_k(x)` by homogeneity.
    pub fn weight_on_sphere(&self, xi: &[f64]) -> f64 {
        self.weight(xi)
    }

    pub fn to_json_doc(&self) -> ContextDoc {
        ContextDoc {
            family: self.system.label().to_string(),
            n: self.system.dim(),
            roots: self
                .system
                .roots()
                .iter()
                .map(|r| r.coords().to_vec())
                .collect(),
            positive_indices: self.system.positive_indices().to_vec(),
            orbits: self.system.orbits().to_vec(),
            k_per_orbit: self.k.values().to_vec(),
        }
    }

    pub fn from_json_doc(doc: &ContextDoc) -> Result<Self, RootSystemError> {
        let roots: Vec<Root> = doc.roots.iter().map(|v| Root::from_coords(v)).collect();
        let system = RootSystem::from_roots(doc.family.clone(), roots)?;
        if system.dim() != doc.n {
            return Err(RootSystemError::BadDocument(format!(
                "declared dimension {} but roots have {}",
                doc.n,
                system.dim()
            )));
        }
        // The reconstructed orbit partition must agree with the document.
        if system.orbits() != doc.orbits.as_slice() {
            return Err(RootSystemError::BadDocument(
                "orbit partition mismatch".into(),
            ));
        }
        if system.positive_indices() != doc.positive_indices.as_slice() {
            return Err(RootSystemError::BadDocument(
                "positive subsystem mismatch".into(),
            ));
        }
        let k = MultiplicityFunction::from_f64s(&doc.k_per_orbit)?;
        DunklContext::new(system, k)
    }

    /// Short human-readable descriptor used in reports.
    pub fn descriptor(&self) -> String {
        let ks: Vec<String> = self.k.values().iter().map(|v| format!("{v}")).collect();
        format!("{} k=[{}]", self.system.label(), ks.join(","))
    }
}

/// Serialization schema for a context: roots as floating coordinate rows,
/// indices into that list for the positive subsystem and orbits, and one
/// multiplicity per orbit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContextDoc {
    pub family: String,
    pub n: usize,
    pub roots: Vec<Vec<f64>>,
    pub positive_indices: Vec<usize>,
    pub orbits: Vec<Vec<usize>>,
    pub k_per_orbit: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(family: &Family, k: &[f64]) -> DunklContext {
        DunklContext::build(family, k).unwrap()
    }

    #[test]
    fn a2_counts_and_normalization() {
        let sys = RootSystem::build(&Family::A { rank: 2 }).unwrap();
        assert_eq!(sys.dim(), 3);
        assert_eq!(sys.roots().len(), 6);
        assert_eq!(sys.num_positive(), 3);
        assert_eq!(sys.num_orbits(), 1);
        for r in sys.roots() {
            let n2: f64 = r.coords().iter().map(|x| x * x).sum();
            assert_relative_eq!(n2, 2.0, epsilon = 1e-12);
        }
        assert!(sys.has_exact_roots());
    }

    #[test]
    fn b2_orbits_axis_first() {
        let sys = RootSystem::build(&Family::B { rank: 2 }).unwrap();
        assert_eq!(sys.roots().len(), 8);
        assert_eq!(sys.num_orbits(), 2);
        assert_eq!(sys.positive_orbit_sizes(), vec![2, 2]);
        // Orbit 0 holds the rescaled axis roots ±√2 e_i.
        for &i in &sys.orbits()[0] {
            let c = sys.root(i).coords();
            let nonzero = c.iter().filter(|x| x.abs() > 1e-12).count();
            assert_eq!(nonzero, 1);
        }
    }

    #[test]
    fn d3_matches_a3_root_count() {
        let d3 = RootSystem::build(&Family::D { rank: 3 }).unwrap();
        let a3 = RootSystem::build(&Family::A { rank: 3 }).unwrap();
        assert_eq!(d3.roots().len(), 12);
        assert_eq!(a3.roots().len(), 12);
    }

    #[test]
    fn gamma_values() {
        // B2 with k = (0.3, 0.7): 2 + 2 positive roots.
        let c = ctx(&Family::B { rank: 2 }, &[0.3, 0.7]);
        assert_relative_eq!(c.gamma(), 2.0, epsilon = 1e-12);
        // A2 with k = 1/2: three positive roots.
        let c = ctx(&Family::A { rank: 2 }, &[0.5]);
        assert_relative_eq!(c.gamma(), 1.5, epsilon = 1e-15);
        assert_relative_eq!(c.homogeneous_dim(), 6.0, epsilon = 1e-15);
        // Z2^4 with k = 0.25 on every axis.
        let c = ctx(&Family::Z2Power { n: 4 }, &[0.25]);
        assert_relative_eq!(c.gamma(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn weight_values() {
        // Z2^1, k = 1/2 at x = 3: |√2 · 3|^1.
        let c = ctx(&Family::Z2Power { n: 1 }, &[0.5]);
        assert_relative_eq!(c.weight(&[3.0]), 3.0 * 2f64.sqrt(), epsilon = 1e-12);
        // A2, k = 1 at x = (1,2,3): products of squared differences.
        let c = ctx(&Family::A { rank: 2 }, &[1.0]);
        let expect = (1.0f64 * 1.0) * (2.0 * 2.0) * (1.0 * 1.0); // ⟨e_i-e_j, x⟩²
        assert_relative_eq!(c.weight(&[1.0, 2.0, 3.0]), expect, epsilon = 1e-10);
    }

    #[test]
    fn weight_homogeneity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let contexts = [
            ctx(&Family::A { rank: 2 }, &[0.5]),
            ctx(&Family::B { rank: 2 }, &[0.3, 0.7]),
            ctx(&Family::Z2Power { n: 3 }, &[0.25]),
            ctx(&Family::I2 { m: 5 }, &[0.4]),
        ];
        for c in &contexts {
            let dims = c.dim();
            for _ in 0..250 {
                let x: Vec<f64> = (0..dims).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let t: f64 = rng.gen_range(0.2..3.0);
                let tx: Vec<f64> = x.iter().map(|v| v * t).collect();
                let w = c.weight(&x);
                if w < 1e-12 {
                    continue;
                }
                let scaled = c.weight(&tx);
                let predicted = t.powf(2.0 * c.gamma()) * w;
                assert!(
                    (scaled - predicted).abs() <= 1e-10 * predicted.abs().max(1.0),
                    "homogeneity failed on {}",
                    c.system().label()
                );
            }
        }
    }

    #[test]
    fn reflection_is_involutive_and_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let systems = [
            RootSystem::build(&Family::B { rank: 3 }).unwrap(),
            RootSystem::build(&Family::I2 { m: 7 }).unwrap(),
        ];
        for sys in &systems {
            for _ in 0..500 {
                let x: Vec<f64> = (0..sys.dim()).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let ridx = rng.gen_range(0..sys.roots().len());
                let root = sys.root(ridx);
                let y = root.reflect(&x);
                let back = root.reflect(&y);
                let norm_x: f64 = x.iter().map(|v| v * v).sum();
                let norm_y: f64 = y.iter().map(|v| v * v).sum();
                assert_relative_eq!(norm_x, norm_y, epsilon = 1e-12, max_relative = 1e-12);
                for (a, b) in x.iter().zip(&back) {
                    assert_relative_eq!(a, b, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn group_orders() {
        let cases = [
            (Family::A { rank: 2 }, 6),
            (Family::Z2Power { n: 1 }, 2),
            (Family::B { rank: 2 }, 8),
            (Family::B { rank: 3 }, 48),
            (Family::D { rank: 3 }, 24),
            (Family::I2 { m: 5 }, 10),
            (Family::I2 { m: 6 }, 12),
        ];
        for (family, expected) in cases {
            let sys = RootSystem::build(&family).unwrap();
            let group = ReflectionGroup::generate(&sys, DEFAULT_GROUP_CAP).unwrap();
            assert_eq!(group.order(), expected, "family {}", family.label());
        }
    }

    #[test]
    fn group_elements_permute_roots() {
        let sys = RootSystem::build(&Family::B { rank: 2 }).unwrap();
        let group = ReflectionGroup::generate(&sys, DEFAULT_GROUP_CAP).unwrap();
        for idx in 0..group.order() {
            for r in sys.roots() {
                let image = group.apply(idx, r.coords());
                assert!(
                    sys.roots().iter().any(|s| s.matches(&image, 1e-9)),
                    "group element {idx} moved a root off the set"
                );
            }
        }
    }

    #[test]
    fn chamber_count_matches_group_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for family in [Family::A { rank: 2 }, Family::B { rank: 2 }] {
            let sys = RootSystem::build(&family).unwrap();
            let group = ReflectionGroup::generate(&sys, DEFAULT_GROUP_CAP).unwrap();
            let mut patterns = std::collections::BTreeSet::new();
            for _ in 0..4000 {
                let x: Vec<f64> = (0..sys.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let info = sys.chamber_info(&x);
                if info.signs.iter().all(|&s| s != 0) {
                    patterns.insert(info.signs);
                }
            }
            assert_eq!(patterns.len(), group.order());
        }
    }

    #[test]
    fn chamber_info_examples() {
        let a2 = RootSystem::build(&Family::A { rank: 2 }).unwrap();
        let info = a2.chamber_info(&[1.0, 2.0, 3.0]);
        assert_relative_eq!(info.distance, 1.0 / 2f64.sqrt(), epsilon = 1e-12);
        assert!(info.signs.iter().all(|&s| s == -1));

        let z1 = RootSystem::build(&Family::Z2Power { n: 1 }).unwrap();
        let info = z1.chamber_info(&[5.0]);
        assert_relative_eq!(info.distance, 5.0, epsilon = 1e-12);

        // A point on a mirror reports sign zero.
        let info = a2.chamber_info(&[1.0, 1.0, 0.0]);
        assert!(info.signs.contains(&0));
    }

    #[test]
    fn into_fundamental_chamber_reaches_dominant_cone() {
        let sys = RootSystem::build(&Family::A { rank: 2 }).unwrap();
        let group = ReflectionGroup::generate(&sys, DEFAULT_GROUP_CAP).unwrap();
        let x = [0.3, -1.2, 0.9];
        let idx = group.into_fundamental_chamber(&sys, &x).unwrap();
        let y = group.apply(idx, &x);
        for (_, r) in sys.positive_roots() {
            assert!(r.inner(&y) >= -1e-12);
        }
    }

    #[test]
    fn exact_reflection_matches_float() {
        let sys = RootSystem::build(&Family::B { rank: 2 }).unwrap();
        for r in sys.roots() {
            let x = [
                Rational::new(BigInt::from(1), BigInt::from(3)),
                Rational::new(BigInt::from(-2), BigInt::from(5)),
            ];
            let exact = r.reflect_rational(&x).unwrap();
            let float = r.reflect(&[1.0 / 3.0, -0.4]);
            for (e, f) in exact.iter().zip(&float) {
                assert_relative_eq!(rational_to_f64(e), f, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn dihedral_exactness_by_angle() {
        // Right angles and 45 degrees give rational directions; pentagonal
        // angles do not.
        assert!(RootSystem::build(&Family::I2 { m: 4 })
            .unwrap()
            .has_exact_roots());
        assert!(!RootSystem::build(&Family::I2 { m: 5 })
            .unwrap()
            .has_exact_roots());
    }

    #[test]
    fn family_parsing() {
        assert_eq!(Family::parse("A2", None).unwrap(), Family::A { rank: 2 });
        assert_eq!(Family::parse("B", Some(3)).unwrap(), Family::B { rank: 3 });
        assert_eq!(
            Family::parse("Z2^4", None).unwrap(),
            Family::Z2Power { n: 4 }
        );
        assert_eq!(Family::parse("I2(6)", None).unwrap(), Family::I2 { m: 6 });
        let product = Family::parse("A2xZ2^1", None).unwrap();
        assert_eq!(product.ambient_dim(), 4);
        assert!(Family::parse("Q9", None).is_err());
        assert!(Family::parse("A", None).is_err());
    }

    #[test]
    fn product_system_counts() {
        let f = Family::Product(
            Box::new(Family::B { rank: 2 }),
            Box::new(Family::Z2Power { n: 1 }),
        );
        let sys = RootSystem::build(&f).unwrap();
        assert_eq!(sys.dim(), 3);
        assert_eq!(sys.roots().len(), 10);
        assert_eq!(sys.num_orbits(), 3);
    }

    #[test]
    fn multiplicity_validation() {
        let sys = RootSystem::build(&Family::B { rank: 2 }).unwrap();
        let bad = MultiplicityFunction::from_f64s(&[-0.5, 0.1]);
        assert!(bad.is_err());
        let wrong_count = MultiplicityFunction::from_f64s(&[0.5]).unwrap();
        assert!(DunklContext::new(sys, wrong_count).is_err());
    }

    #[test]
    fn json_document_round_trip() {
        let c = ctx(&Family::B { rank: 2 }, &[0.3, 0.7]);
        let doc = c.to_json_doc();
        let text = serde_json::to_string(&doc).unwrap();
        let parsed: ContextDoc = serde_json::from_str(&text).unwrap();
        let back = DunklContext::from_json_doc(&parsed).unwrap();
        assert_eq!(back.system().roots().len(), 8);
        assert_relative_eq!(back.gamma(), 2.0, epsilon = 1e-12);
        for (a, b) in c.system().roots().iter().zip(back.system().roots()) {
            for (x, y) in a.coords().iter().zip(b.coords()) {
                assert_relative_eq!(x, y, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn broadcast_single_multiplicity() {
        let c = ctx(&Family::B { rank: 3 }, &[0.5]);
        assert_eq!(c.multiplicities().num_orbits(), 2);
        assert_relative_eq!(c.gamma(), 0.5 * 9.0, epsilon = 1e-12);
    }
}
