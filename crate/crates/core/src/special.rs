//! Close-to-equilateral spaces `d(i, j) = h(min(i, j))` and the
//! representing-set spaces of binary-weighted subsets.
//!
//! Points of a min-metric space are indexed from 0 here; point `i` carries
//! the label `i + 1`.

use num_traits::{Signed, Zero};

use crate::error::{invalid, Error, Result};
use crate::metric::{make_min_metric, FiniteMetricSpace};
use crate::rational::{self, Rational};
use crate::transport::{plan_cost, plan_solves, tc_norm, TransportPlan, TransportProblem};

const MAX_SIGN_VECTORS: usize = 12;
const MAX_REPRESENTING_N: usize = 12;

fn check_length(h: &[Rational], f: &TransportProblem) -> Result<()> {
    if h.len() != f.len() {
        return Err(Error::Dimension(format!(
            "h has {} values but the problem has {}",
            h.len(),
            f.len()
        )));
    }
    Ok(())
}

/// Beginning/end decomposition around the median of the support. `b` and
/// `e` are not zero-sum in general, so they are kept as plain vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MedianSplit {
    pub m: usize,
    pub b: Vec<Rational>,
    pub e: Vec<Rational>,
    pub half_mass: Rational,
}

fn l1(v: &[Rational]) -> Rational {
    v.iter().fold(Rational::zero(), |s, x| s + x.abs())
}

fn signum(x: &Rational) -> Rational {
    x.signum()
}

pub fn median_split(h: &[Rational], f: &TransportProblem) -> Result<MedianSplit> {
    check_length(h, f)?;
    if f.is_zero() {
        return Err(invalid!("the median of the zero problem is undefined"));
    }
    let v = f.values();
    let half_mass = f.l1_norm() / rational::int(2);
    let mut prefix = Rational::zero();
    let mut m = None;
    for (i, x) in v.iter().enumerate() {
        prefix += x.abs();
        if prefix >= half_mass {
            m = Some(i);
            break;
        }
    }
    let m = m.ok_or_else(|| Error::Invariant("prefix mass never reached half".into()))?;
    if v[m].abs() > half_mass {
        return Err(Error::Invariant("a single value exceeds half the mass of a zero-sum problem".into()));
    }
    let before = l1(&v[..m]);
    let after = l1(&v[m + 1..]);
    let n = v.len();
    let mut b = vec![Rational::zero(); n];
    let mut e = vec![Rational::zero(); n];
    b[..m].clone_from_slice(&v[..m]);
    e[m + 1..].clone_from_slice(&v[m + 1..]);
    b[m] = signum(&v[m]) * (&half_mass - before);
    e[m] = signum(&v[m]) * (&half_mass - after);

    let sum_ok = b.iter().zip(&e).zip(v).all(|((x, y), z)| &(x + y) == z);
    if !sum_ok || l1(&b) != half_mass || l1(&e) != half_mass {
        return Err(Error::Invariant("median split does not satisfy b + e = f with equal halves".into()));
    }
    Ok(MedianSplit { m, b, e, half_mass })
}

/// `sum_{i<m} |f_i| h(i) + (||f||_1 / 2 - sum_{i<m} |f_i|) h(m)`
pub fn fast_tc_min_metric(h: &[Rational], f: &TransportProblem) -> Result<Rational> {
    check_length(h, f)?;
    if f.is_zero() {
        return Ok(Rational::zero());
    }
    let split = median_split(h, f)?;
    let v = f.values();
    let head = (0..split.m).fold(Rational::zero(), |s, i| s + v[i].abs() * &h[i]);
    let rest = &split.half_mass - l1(&v[..split.m]);
    Ok(head + rest * &h[split.m])
}

/// Which of the three optimality conditions a plan satisfies: every move
/// stays inside the support, moves agree with the signs of `f`, and every
/// move joins the support of `b` to the support of `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalityReport {
    pub supported: bool,
    pub sign_consistent: bool,
    pub crosses_median: bool,
    pub cost: Rational,
    pub fast_cost: Rational,
}

impl OptimalityReport {
    pub fn all_hold(&self) -> bool {
        self.supported && self.sign_consistent && self.crosses_median
    }
}

pub fn check_plan_optimal_conditions(
    h: &[Rational],
    f: &TransportProblem,
    plan: &TransportPlan,
) -> Result<OptimalityReport> {
    let space = make_min_metric(h)?;
    if !plan_solves(&space, plan, f)? {
        return Err(invalid!("the plan does not solve the problem"));
    }
    let cost = plan_cost(&space, plan)?;
    let fast_cost = fast_tc_min_metric(h, f)?;
    if f.is_zero() {
        // the empty plan is the only sensible one; anything else is wasted motion
        let empty = plan.is_empty();
        return Ok(OptimalityReport {
            supported: empty,
            sign_consistent: empty,
            crosses_median: empty,
            cost,
            fast_cost,
        });
    }
    let split = median_split(h, f)?;
    let v = f.values();
    let supported = plan
        .moves
        .iter()
        .all(|m| !v[m.source].is_zero() && !v[m.sink].is_zero());
    let sign_consistent = plan
        .moves
        .iter()
        .all(|m| v[m.source].is_positive() && v[m.sink].is_negative());
    let in_b = |i: usize| !split.b[i].is_zero();
    let in_e = |i: usize| !split.e[i].is_zero();
    let crosses_median = plan
        .moves
        .iter()
        .all(|m| (in_b(m.source) && in_e(m.sink)) || (in_e(m.source) && in_b(m.sink)));
    let report = OptimalityReport {
        supported,
        sign_consistent,
        crosses_median,
        cost,
        fast_cost,
    };
    if report.all_hold() && report.cost != report.fast_cost {
        return Err(Error::Invariant(format!(
            "plan meets all optimality conditions but costs {} instead of {}",
            report.cost, report.fast_cost
        )));
    }
    Ok(report)
}

/// `||f||_1 / 2 <= ||f||_tc <= ||f||_1` on the min-metric space of `h`.
pub fn l1_bounds_check(h: &[Rational], f: &TransportProblem) -> Result<bool> {
    check_length(h, f)?;
    let space = make_min_metric(h)?;
    let tc = tc_norm(&space, f)?.value;
    let norm = f.l1_norm();
    Ok(&norm / rational::int(2) <= tc && tc <= norm)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubadditivityReport {
    pub lhs: Rational,
    pub rhs: Rational,
    pub gap: Rational,
    pub plan_lhs: TransportPlan,
    pub plan_first: TransportPlan,
    pub plan_second: TransportPlan,
}

fn subadditivity(space: &FiniteMetricSpace, x: &TransportProblem, y: &TransportProblem) -> Result<SubadditivityReport> {
    let sum = tc_norm(space, &(x + y))?;
    let first = tc_norm(space, x)?;
    let second = tc_norm(space, y)?;
    let rhs = &first.value + &second.value;
    let gap = &rhs - &sum.value;
    if !gap.is_positive() {
        return Err(Error::Invariant(format!(
            "expected a strict inequality, got lhs {} and rhs {}",
            sum.value, rhs
        )));
    }
    Ok(SubadditivityReport {
        lhs: sum.value,
        rhs,
        gap,
        plan_lhs: sum.plan,
        plan_first: first.plan,
        plan_second: second.plan,
    })
}

/// The least support point strictly above the median of `f`.
pub fn first_support_above_median(h: &[Rational], f: &TransportProblem) -> Result<usize> {
    let split = median_split(h, f)?;
    f.support()
        .into_iter()
        .find(|&i| i > split.m)
        .ok_or_else(|| Error::Invariant("zero-sum support cannot end at its median".into()))
}

/// `||x1 + xp||_tc < ||x1||_tc + ||xp||_tc` when the support of `xp` lies
/// beyond the first support point of `x1` above its median.
pub fn strict_subadditivity_experiment(
    h: &[Rational],
    x1: &TransportProblem,
    xp: &TransportProblem,
) -> Result<SubadditivityReport> {
    check_length(h, x1)?;
    check_length(h, xp)?;
    if x1.is_zero() || xp.is_zero() {
        return Err(invalid!("both problems must be nonzero"));
    }
    let sp = xp.support();
    if let Some(i) = x1.support().into_iter().find(|i| sp.contains(i)) {
        return Err(invalid!("supports overlap at point {}", i + 1));
    }
    let k = first_support_above_median(h, x1)?;
    if sp[0] <= k {
        return Err(invalid!(
            "the second support starts at {} but must lie beyond {}",
            sp[0] + 1,
            k + 1
        ));
    }
    subadditivity(&make_min_metric(h)?, x1, xp)
}

/// Strict subadditivity for two problems of opposite sign at a shared point.
pub fn overlap_experiment(h: &[Rational], x: &TransportProblem, y: &TransportProblem) -> Result<SubadditivityReport> {
    check_length(h, x)?;
    check_length(h, y)?;
    let opposite = x
        .values()
        .iter()
        .zip(y.values())
        .any(|(a, b)| (a.is_negative() && b.is_positive()) || (a.is_positive() && b.is_negative()));
    if !opposite {
        return Err(invalid!("the problems share no point with opposite signs"));
    }
    subadditivity(&make_min_metric(h)?, x, y)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignTestReport {
    pub holds: bool,
    /// Indices of vectors that were rescaled to norm 1.
    pub normalized: Vec<usize>,
    /// First sign pattern whose norm differs from the vector count, as a
    /// bitmask (bit `i` set means `-x_i`), with that norm.
    pub counterexample: Option<(u64, Rational)>,
}

/// `||sum theta_i x_i||_tc = n` for every sign pattern `theta`, after
/// scaling each `x_i` to norm 1.
pub fn l1_basis_sign_test(space: &FiniteMetricSpace, vectors: &[TransportProblem]) -> Result<SignTestReport> {
    if vectors.is_empty() {
        return Err(invalid!("need at least one vector"));
    }
    if vectors.len() > MAX_SIGN_VECTORS {
        return Err(Error::ResourceLimit(format!(
            "sign test over {} vectors needs 2^{} solver calls; the limit is {}",
            vectors.len(),
            vectors.len(),
            MAX_SIGN_VECTORS
        )));
    }
    let mut normalized = Vec::new();
    let mut unit = Vec::with_capacity(vectors.len());
    for (i, x) in vectors.iter().enumerate() {
        x.check_space(space)?;
        let norm = tc_norm(space, x)?.value;
        if norm.is_zero() {
            return Err(invalid!("vector {} is zero and cannot be normalized", i));
        }
        if norm == rational::one() {
            unit.push(x.clone());
        } else {
            normalized.push(i);
            unit.push(x.scale(&norm.recip()));
        }
    }
    let target = rational::int(vectors.len() as i64);
    let mut counterexample = None;
    for pattern in 0..(1u64 << vectors.len()) {
        let combo = unit.iter().enumerate().fold(TransportProblem::zero(space.len()), |acc, (i, x)| {
            if pattern >> i & 1 == 1 {
                &acc - x
            } else {
                &acc + x
            }
        });
        let norm = tc_norm(space, &combo)?.value;
        if norm != target {
            counterexample = Some((pattern, norm));
            break;
        }
    }
    Ok(SignTestReport {
        holds: counterexample.is_none(),
        normalized,
        counterexample,
    })
}

/// All subsets of `{1..n}`, with `d(A, B) = sum of 2^i over the symmetric
/// difference`. Point `k` is the subset whose bitmask is `k` (bit `i - 1`
/// stands for element `i`), labeled by `k` in decimal.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentingSetSpace {
    pub n: usize,
    pub space: FiniteMetricSpace,
}

impl RepresentingSetSpace {
    /// Point index of a subset given by its elements.
    pub fn subset(&self, elements: &[usize]) -> Result<usize> {
        elements.iter().try_fold(0usize, |mask, &i| {
            if i == 0 || i > self.n {
                Err(invalid!("element {} is outside 1..{}", i, self.n))
            } else {
                Ok(mask | 1 << (i - 1))
            }
        })
    }

    pub fn singleton(&self, i: usize) -> Result<usize> {
        self.subset(&[i])
    }
}

fn binary_weight(mask: usize) -> Rational {
    // element i contributes 2^i and sits at bit i - 1
    Rational::from_integer(num_bigint::BigInt::from(mask) * 2)
}

pub fn representing_set_truncation(n: usize) -> Result<RepresentingSetSpace> {
    if n == 0 {
        return Err(invalid!("n must be at least 1"));
    }
    if n > MAX_REPRESENTING_N {
        return Err(Error::ResourceLimit(format!(
            "2^{} points exceeds the limit of 2^{}",
            n, MAX_REPRESENTING_N
        )));
    }
    let labels = (0..1usize << n).map(|k| k.to_string()).collect();
    let space = FiniteMetricSpace::from_fn(labels, |a, b| binary_weight(a ^ b))?;
    Ok(RepresentingSetSpace { n, space })
}

/// `d(0, {j}) + d({j}, A) = d(0, A)` for `j` in `A`, where `a_plus` is a
/// point index (subset bitmask).
pub fn geodesic_identity_check(rep: &RepresentingSetSpace, a_plus: usize, j: usize) -> Result<bool> {
    rep.space.check_index(a_plus)?;
    let sj = rep.singleton(j)?;
    if a_plus & sj == 0 {
        return Err(invalid!("element {} is not in subset {}", j, a_plus));
    }
    let d = |x: usize, y: usize| rep.space.d(x, y).clone();
    Ok(d(0, sj) + d(sj, a_plus) == d(0, a_plus))
}

/// `2^{-i} (1_{{i}} - 1_0)` for `i = 1..count` in the representing-set space.
pub fn scaled_singletons(rep: &RepresentingSetSpace, count: usize) -> Result<Vec<TransportProblem>> {
    (1..=count)
        .map(|i| {
            let s = rep.singleton(i)?;
            let scale = Rational::new(1.into(), num_bigint::BigInt::from(1u64) << i);
            Ok(TransportProblem::unit_difference(rep.space.len(), s, 0).scale(&scale))
        })
        .collect()
}
