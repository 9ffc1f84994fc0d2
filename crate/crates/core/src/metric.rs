//! Finite metric spaces with exact rational distances.
//!
//! A [`FiniteMetricSpace`] can only be built from a matrix that passes
//! [`validate_metric`], so every function taking one may rely on the metric
//! axioms. The generators at the bottom of the module produce the example
//! spaces used throughout the crate (cycles, the two-block space, the
//! close-to-equilateral "min" metric, subsets of the real line).

use std::collections::HashMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<Rational>>,
    index: HashMap<String, usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    Asymmetry,
    ZeroDiagonal,
    Positivity,
    Triangle,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Asymmetry => "asymmetry",
            ViolationKind::ZeroDiagonal => "zero-diagonal",
            ViolationKind::Positivity => "positivity",
            ViolationKind::Triangle => "triangle",
        };
        f.write_str(s)
    }
}

/// One failed axiom. For `Triangle`, `indices = [i, j, k]`, `lhs = d(i,k)`
/// and `rhs = d(i,j) + d(j,k)`. For `Asymmetry`, `lhs = d(i,j)`,
/// `rhs = d(j,i)`. For the diagonal and positivity checks `lhs` is the
/// offending entry and `rhs` is zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub indices: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    pub lhs: Rational,
    #[serde(with = "rational::serde_str")]
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Checks every metric axiom on a labeled matrix and reports all violations.
///
/// Only structural problems (non-square matrix, label count mismatch) are
/// returned as errors; axiom failures go into the report.
pub fn validate_metric(labels: &[String], dist: &[Vec<Rational>]) -> Result<ValidationReport> {
    let n = labels.len();
    if dist.len() != n {
        return Err(Error::Dimension(format!(
            "{} labels but {} matrix rows",
            n,
            dist.len()
        )));
    }
    if let Some((i, row)) = dist.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::Dimension(format!(
            "row {} has {} entries, expected {}",
            i,
            row.len(),
            n
        )));
    }

    let mut violations = Vec::new();
    for i in 0..n {
        if !dist[i][i].is_zero() {
            violations.push(Violation {
                kind: ViolationKind::ZeroDiagonal,
                indices: vec![i],
                lhs: dist[i][i].clone(),
                rhs: Rational::zero(),
            });
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if !dist[i][j].is_positive() {
                violations.push(Violation {
                    kind: ViolationKind::Positivity,
                    indices: vec![i, j],
                    lhs: dist[i][j].clone(),
                    rhs: Rational::zero(),
                });
            }
            if i < j && dist[i][j] != dist[j][i] {
                violations.push(Violation {
                    kind: ViolationKind::Asymmetry,
                    indices: vec![i, j],
                    lhs: dist[i][j].clone(),
                    rhs: dist[j][i].clone(),
                });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                let rhs = &dist[i][j] + &dist[j][k];
                if dist[i][k] > rhs {
                    violations.push(Violation {
                        kind: ViolationKind::Triangle,
                        indices: vec![i, j, k],
                        lhs: dist[i][k].clone(),
                        rhs,
                    });
                }
            }
        }
    }

    Ok(ValidationReport {
        ok: violations.is_empty(),
        violations,
    })
}

impl FiniteMetricSpace {
    pub fn new(labels: Vec<String>, dist: Vec<Vec<Rational>>) -> Result<Self> {
        if labels.is_empty() {
            return Err(invalid!("a metric space needs at least one point"));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(invalid!("duplicate point label `{}`", l));
            }
        }
        let report = validate_metric(&labels, &dist)?;
        if let Some(v) = report.violations.first() {
            let names: Vec<&str> = v.indices.iter().map(|&i| labels[i].as_str()).collect();
            return Err(Error::NotAMetric(format!(
                "{} violation(s), first: {} at ({})",
                report.violations.len(),
                v.kind,
                names.join(", ")
            )));
        }
        Ok(Self { labels, dist, index })
    }

    /// Builds a space from a symmetric distance function over `n` points.
    pub fn from_fn(labels: Vec<String>, mut d: impl FnMut(usize, usize) -> Rational) -> Result<Self> {
        let n = labels.len();
        let dist = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rational::zero() } else { d(i, j) })
                    .collect()
            })
            .collect();
        Self::new(labels, dist)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn d(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.dist[i]
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(invalid!("point index {} out of range for {} points", i, self.len()))
        }
    }

    /// `d(x, z) = d(x, y) + d(y, z)`.
    pub fn is_between(&self, x: usize, y: usize, z: usize) -> bool {
        self.dist[x][z] == &self.dist[x][y] + &self.dist[y][z]
    }
}

/// Whether `seq` is a linear tuple: distances from the first point strictly
/// increase along the sequence, and `d(r_i, r_k) = d(r_i, r_j) + d(r_j, r_k)`
/// for all `i < j < k`.
pub fn is_linear_tuple(space: &FiniteMetricSpace, seq: &[usize]) -> Result<bool> {
    if seq.len() < 3 {
        return Err(invalid!("a linear tuple needs at least 3 points, got {}", seq.len()));
    }
    for (a, &p) in seq.iter().enumerate() {
        space.check_index(p)?;
        if seq[..a].contains(&p) {
            return Err(invalid!("point `{}` repeated in tuple", space.label(p)));
        }
    }
    Ok(linear_tuple_unchecked(space, seq))
}

/// [`is_linear_tuple`] without argument validation; `seq` must hold distinct
/// in-range points.
pub(crate) fn linear_tuple_unchecked(space: &FiniteMetricSpace, seq: &[usize]) -> bool {
    let first = seq[0];
    let increasing = seq
        .windows(2)
        .all(|w| space.d(w[0], first) < space.d(w[1], first));
    if !increasing {
        return false;
    }
    let n = seq.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if !space.is_between(seq[i], seq[j], seq[k]) {
                    return false;
                }
            }
        }
    }
    true
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Shortest-path metric of the cycle `x1 - x2 - ... - xn - x1`, where
/// `weights[k]` is the length of the edge from `x(k+1)` to `x(k+2)` (indices
/// mod n). Unit weights when `weights` is `None`.
pub fn make_cycle(n: usize, weights: Option<&[Rational]>) -> Result<FiniteMetricSpace> {
    if n < 3 {
        return Err(invalid!("a cycle needs at least 3 vertices, got {}", n));
    }
    let weights: Vec<Rational> = match weights {
        Some(w) if w.len() != n => {
            return Err(invalid!("expected {} cycle weights, got {}", n, w.len()));
        }
        Some(w) => w.to_vec(),
        None => vec![rational::one(); n],
    };
    if let Some(w) = weights.iter().find(|w| !w.is_positive()) {
        return Err(invalid!("cycle weights must be positive, got {}", w));
    }
    // prefix[i] = clockwise distance from x1 to x(i+1)
    let mut prefix = vec![Rational::zero(); n + 1];
    for i in 0..n {
        prefix[i + 1] = &prefix[i] + &weights[i];
    }
    let total = prefix[n].clone();
    FiniteMetricSpace::from_fn(numbered("x", n), |i, j| {
        let cw = (&prefix[i.max(j)] - &prefix[i.min(j)]).abs();
        let ccw = &total - &cw;
        cw.min(ccw)
    })
}

/// Even cycle of length `2 * half.len()` whose edge weights repeat `half`
/// twice, so that the edge `x_k x_{k+1}` and the antipodal edge
/// `x_{n+k} x_{n+k+1}` have equal length.
pub fn make_symmetric_even_cycle(half: &[Rational]) -> Result<FiniteMetricSpace> {
    if half.len() < 2 {
        return Err(invalid!("a symmetric even cycle needs at least 2 half-cycle weights"));
    }
    let weights: Vec<Rational> = half.iter().chain(half.iter()).cloned().collect();
    make_cycle(weights.len(), Some(&weights))
}

/// Checks the antipodal weight symmetry `w(k) = w(k + n/2)` of a cycle weight list.
pub fn is_symmetric_cycle_weights(weights: &[Rational]) -> bool {
    let n = weights.len();
    n % 2 == 0 && (0..n / 2).all(|k| weights[k] == weights[k + n / 2])
}

/// `2m` points split into blocks `A = {a1..am}` and `B = {b1..bm}`. Distances
/// inside a block are `a = m c / (m - 1)`, across blocks `c`.
pub fn make_two_block(m: usize, c: &Rational) -> Result<FiniteMetricSpace> {
    if m < 2 {
        return Err(invalid!("two-block space needs m >= 2, got {}", m));
    }
    if !c.is_positive() {
        return Err(invalid!("cross-block distance must be positive, got {}", c));
    }
    let a = two_block_inner_distance(m, c);
    debug_assert!(a <= c * rational::int(2));
    let mut labels = numbered("a", m);
    labels.extend(numbered("b", m));
    FiniteMetricSpace::from_fn(labels, |i, j| {
        if (i < m) == (j < m) {
            a.clone()
        } else {
            c.clone()
        }
    })
}

/// Within-block distance of the two-block space.
pub fn two_block_inner_distance(m: usize, c: &Rational) -> Rational {
    let m = rational::int(m as i64);
    &m / (&m - rational::one()) * c
}

/// Points `1..n` with `d(i, j) = h(min(i, j))`; `h` must be strictly
/// increasing with values in the open interval `(1, 2)`.
pub fn make_min_metric(h: &[Rational]) -> Result<FiniteMetricSpace> {
    validate_min_metric_profile(h)?;
    FiniteMetricSpace::from_fn(numbered("", h.len()), |i, j| h[i.min(j)].clone())
}

pub(crate) fn validate_min_metric_profile(h: &[Rational]) -> Result<()> {
    if h.is_empty() {
        return Err(invalid!("h must have at least one value"));
    }
    let (lo, hi) = (rational::int(1), rational::int(2));
    if let Some(x) = h.iter().find(|x| **x <= lo || **x >= hi) {
        return Err(invalid!("h values must lie in (1, 2), got {}", x));
    }
    if let Some(w) = h.windows(2).find(|w| w[0] >= w[1]) {
        return Err(invalid!("h must be strictly increasing ({} then {})", w[0], w[1]));
    }
    Ok(())
}

/// A finite subset of the real line with `d(x, y) = |x - y|`. Points are
/// labeled by their coordinate.
pub fn make_real_subset(xs: &[Rational]) -> Result<FiniteMetricSpace> {
    if xs.is_empty() {
        return Err(invalid!("need at least one coordinate"));
    }
    if let Some(w) = xs.windows(2).find(|w| w[0] >= w[1]) {
        return Err(invalid!(
            "coordinates must be strictly increasing ({} then {})",
            w[0],
            w[1]
        ));
    }
    let labels = xs.iter().map(rational::format).collect();
    FiniteMetricSpace::from_fn(labels, |i, j| (&xs[i] - &xs[j]).abs())
}

/// `n` points at mutual distance 1, labeled `a, b, c, ...` (or `p1..pn` past 26).
pub fn make_equilateral(n: usize) -> Result<FiniteMetricSpace> {
    if n == 0 {
        return Err(invalid!("need at least one point"));
    }
    let labels = if n <= 26 {
        (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        numbered("p", n)
    };
    FiniteMetricSpace::from_fn(labels, |_, _| rational::one())
}
