//! The min-condition: deciding whether a finite metric space admits a
//! smallest seminorm `||.||_K` over families satisfying conditions A and B,
//! and building the two-family strict-gap witness when it does not.
//!
//! A pair `{x, y}` is *on a geodesic between* `{u, v}` when the pairs
//! coincide, share one point with the other lying metrically between `u`
//! and `v`, or `(u, x, y, v)` or `(u, y, x, v)` is a linear tuple. The
//! minimal pair set keeps the pairs that are on no geodesic between another
//! pair. The space satisfies the min-condition iff these pairs cover every
//! pair and every other point lies between the two points of each surviving
//! pair.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{invalid, Result};
use crate::metric::{linear_tuple_unchecked, FiniteMetricSpace};
use crate::rational::{self, Rational};
use crate::seminorm::{check_condition_a, check_condition_b, k_seminorm, FamilyTag, LipschitzFamily};
use crate::transport::TransportProblem;

/// Unordered pair stored with `.0 < .1`.
pub type Pair = (usize, usize);

fn ordered(a: usize, b: usize) -> Pair {
    (a.min(b), a.max(b))
}

/// Which clause of the geodesic relation places `xy` on a geodesic between
/// `uv`: 1 (same pair), 2 (shared endpoint), 3 (`u,x,y,v` linear),
/// 4 (`u,y,x,v` linear), or 0 for none.
pub fn on_geodesic(space: &FiniteMetricSpace, xy: (usize, usize), uv: (usize, usize)) -> Result<u8> {
    let (x, y) = xy;
    let (u, v) = uv;
    for p in [x, y, u, v] {
        space.check_index(p)?;
    }
    if x == y || u == v {
        return Err(invalid!("pairs must consist of two distinct points"));
    }
    Ok(geodesic_case(space, xy, uv))
}

fn geodesic_case(space: &FiniteMetricSpace, (x, y): Pair, (u, v): Pair) -> u8 {
    if ordered(x, y) == ordered(u, v) {
        return 1;
    }
    let shared_x = x == u || x == v;
    let shared_y = y == u || y == v;
    if shared_x || shared_y {
        let z = if shared_x { y } else { x };
        return if linear_tuple_unchecked(space, &[u, z, v]) { 2 } else { 0 };
    }
    if linear_tuple_unchecked(space, &[u, x, y, v]) {
        3
    } else if linear_tuple_unchecked(space, &[u, y, x, v]) {
        4
    } else {
        0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coverage {
    pub pair: Pair,
    /// Index into [`PairSet::pairs`].
    pub witness: usize,
    pub case: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSet {
    pub pairs: Vec<Pair>,
    /// One entry per pair of distinct points, in lexicographic order.
    pub coverage: Vec<Coverage>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairSetOutcome {
    Complete(PairSet),
    /// Some pairs are on no geodesic between a surviving pair.
    Incomplete { pairs: Vec<Pair>, uncovered: Vec<Pair> },
}

impl PairSetOutcome {
    pub fn pairs(&self) -> &[Pair] {
        match self {
            PairSetOutcome::Complete(ps) => &ps.pairs,
            PairSetOutcome::Incomplete { pairs, .. } => pairs,
        }
    }
}

fn all_pairs(n: usize) -> Vec<Pair> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

/// Removes every pair lying on a geodesic between some other pair, then
/// records for every pair the first surviving pair covering it.
pub fn minimal_pair_set(space: &FiniteMetricSpace) -> Result<PairSetOutcome> {
    if space.len() < 2 {
        return Err(invalid!("the min-condition needs at least two points"));
    }
    let pairs = all_pairs(space.len());
    let survivors: Vec<Pair> = pairs
        .iter()
        .copied()
        .filter(|&p| {
            !pairs
                .iter()
                .any(|&q| q != p && geodesic_case(space, p, q) != 0)
        })
        .collect();

    let mut coverage = Vec::with_capacity(pairs.len());
    let mut uncovered = Vec::new();
    for &p in &pairs {
        let hit = survivors
            .iter()
            .enumerate()
            .find_map(|(i, &s)| match geodesic_case(space, p, s) {
                0 => None,
                case => Some(Coverage {
                    pair: p,
                    witness: i,
                    case,
                }),
            });
        match hit {
            Some(c) => coverage.push(c),
            None => uncovered.push(p),
        }
    }
    Ok(if uncovered.is_empty() {
        PairSetOutcome::Complete(PairSet {
            pairs: survivors,
            coverage,
        })
    } else {
        PairSetOutcome::Incomplete {
            pairs: survivors,
            uncovered,
        }
    })
}

/// A surviving pair `(u, v)` and a point `w` off every `u`-`v` geodesic:
/// `d(u, v) < d(u, w) + d(w, v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleViolation {
    pub pair: Pair,
    pub w: usize,
    /// `d(u, w) + d(w, v) - d(u, v) > 0`
    pub slack: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinConditionVerdict {
    pub holds: bool,
    pub outcome: PairSetOutcome,
    /// Largest-slack violation of the betweenness requirement, ties broken
    /// lexicographically by `(u, v, w)`.
    pub violation: Option<TriangleViolation>,
}

impl MinConditionVerdict {
    pub fn pair_set(&self) -> Option<&PairSet> {
        match (&self.outcome, self.holds) {
            (PairSetOutcome::Complete(ps), true) => Some(ps),
            _ => None,
        }
    }
}

pub fn check_min_condition(space: &FiniteMetricSpace) -> Result<MinConditionVerdict> {
    let outcome = minimal_pair_set(space)?;
    let mut violation: Option<TriangleViolation> = None;
    for &(u, v) in outcome.pairs() {
        for w in (0..space.len()).filter(|&w| w != u && w != v) {
            let slack = space.d(u, w) + space.d(w, v) - space.d(u, v);
            if slack.is_positive() && violation.as_ref().is_none_or(|b| slack > b.slack) {
                violation = Some(TriangleViolation {
                    pair: (u, v),
                    w,
                    slack,
                });
            }
        }
    }
    let holds = violation.is_none() && matches!(outcome, PairSetOutcome::Complete(_));
    Ok(MinConditionVerdict {
        holds,
        outcome,
        violation,
    })
}

/// Extends anchor values to the whole space by `l(x) = min_p (l(p) + d(p, x))`.
/// The result is 1-Lipschitz and agrees with the anchors provided they are
/// pairwise compatible (`|l(p) - l(q)| <= d(p, q)`).
pub fn lipschitz_extend(space: &FiniteMetricSpace, anchors: &[(usize, Rational)]) -> Result<Vec<Rational>> {
    if anchors.is_empty() {
        return Err(invalid!("at least one anchor value is required"));
    }
    for (a, (p, lp)) in anchors.iter().enumerate() {
        space.check_index(*p)?;
        for (q, lq) in &anchors[..a] {
            if (lp - lq).abs() > *space.d(*p, *q) {
                return Err(invalid!(
                    "anchors at `{}` and `{}` differ by more than their distance",
                    space.label(*p),
                    space.label(*q)
                ));
            }
        }
    }
    Ok((0..space.len())
        .map(|x| {
            anchors
                .iter()
                .map(|(p, lp)| lp + space.d(*p, x))
                .min()
                .expect("anchors are nonempty")
        })
        .collect())
}

/// Two families satisfying conditions A and B together with a problem `f` on
/// which the second gives a strictly smaller seminorm.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallestSeminormWitness {
    pub u1: usize,
    pub v1: usize,
    pub w: usize,
    /// `l1` as stored in `k` (its first member).
    pub l1: Vec<Rational>,
    pub k: LipschitzFamily,
    pub k_tilde: LipschitzFamily,
    pub f: TransportProblem,
    pub tau: Rational,
    pub value_k: Rational,
    pub value_k_tilde: Rational,
}

impl SmallestSeminormWitness {
    pub fn strict_gap(&self) -> bool {
        self.value_k_tilde < self.value_k
    }
}

/// Builds the witness that no smallest seminorm exists.
///
/// Picks the violating pair `(u1, v1)` and point `w` of largest slack, sets
/// `l1` tight on `(u1, v1)` with `l1(w)` strictly inside its admissible
/// interval, and takes
///
/// * `K = {l1} ∪ {d(z, .) : z an endpoint of another minimal pair}`,
/// * `K~ = {d(z, .) : z an endpoint of a minimal pair, z != v1}`,
/// * `f = tau (1_{v1} - 1_{u1}) + (1_{v1} - 1_w)` with `tau` the least integer
///   above `max_z (d(v1,w) + d(u1,w) - d(u1,v1)) / (d(u1,v1) - |d(z,v1) - d(z,u1)|)`.
pub fn smallest_seminorm_witness(space: &FiniteMetricSpace) -> Result<SmallestSeminormWitness> {
    let verdict = check_min_condition(space)?;
    if verdict.holds {
        return Err(invalid!(
            "the space satisfies the min-condition, so a smallest seminorm exists"
        ));
    }
    let Some(violation) = verdict.violation else {
        return Err(invalid!(
            "minimal pairs do not cover every pair; no betweenness violation to build on"
        ));
    };
    let pairs = verdict.outcome.pairs().to_vec();
    let ((u1, v1), w) = (violation.pair, violation.w);
    let d_uv = space.d(u1, v1).clone();

    // admissible interval for l1(w) is [d(u1,v1) - d(w,v1), d(u1,w)]
    let lo = &d_uv - space.d(w, v1);
    let hi = space.d(u1, w).clone();
    let mid = (&lo + &hi) * rational::ratio(1, 2);
    let l1 = lipschitz_extend(space, &[(u1, Rational::zero()), (v1, d_uv.clone()), (w, mid)])?;

    let mut endpoints_other: Vec<usize> = pairs
        .iter()
        .filter(|&&p| p != (u1, v1))
        .flat_map(|&(a, b)| [a, b])
        .collect();
    endpoints_other.sort_unstable();
    endpoints_other.dedup();
    let mut endpoints_tilde: Vec<usize> = pairs
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .filter(|&z| z != v1)
        .collect();
    endpoints_tilde.sort_unstable();
    endpoints_tilde.dedup();

    let mut k = LipschitzFamily::default();
    k.push(FamilyTag::Custom(Some("l1".into())), l1.clone());
    k.extend(LipschitzFamily::distance_functions(space, &endpoints_other));
    let k_tilde = LipschitzFamily::distance_functions(space, &endpoints_tilde);

    let excess = space.d(v1, w) + space.d(u1, w) - &d_uv;
    let mut bound = Rational::zero();
    for &z in endpoints_tilde.iter().filter(|&&z| z != u1) {
        let room = &d_uv - (space.d(z, v1) - space.d(z, u1)).abs();
        if !room.is_positive() {
            return Err(crate::error::Error::Invariant(format!(
                "point `{}` sees the minimal pair at full distance",
                space.label(z)
            )));
        }
        bound = bound.max(&excess / room);
    }
    let tau = Rational::from_integer(rational::floor(&bound) + BigInt::from(1));

    let n = space.len();
    let f = &TransportProblem::unit_difference(n, v1, u1).scale(&tau) + &TransportProblem::unit_difference(n, v1, w);
    let value_k = k_seminorm(space, &k, &f)?.value;
    let value_k_tilde = k_seminorm(space, &k_tilde, &f)?.value;

    let witness = SmallestSeminormWitness {
        u1,
        v1,
        w,
        l1,
        k,
        k_tilde,
        f,
        tau,
        value_k,
        value_k_tilde,
    };
    for fam in [&witness.k, &witness.k_tilde] {
        if !check_condition_a(space, fam)?.holds || !check_condition_b(space, fam)?.holds {
            return Err(crate::error::Error::Invariant(
                "witness family fails condition A or B".into(),
            ));
        }
    }
    if !witness.strict_gap() {
        return Err(crate::error::Error::Invariant(format!(
            "witness has no strict gap ({} vs {})",
            witness.value_k_tilde, witness.value_k
        )));
    }
    Ok(witness)
}

/// Values from the equilateral triple showing that the pointwise infimum of
/// the seminorms is not subadditive.
#[derive(Debug, Clone, PartialEq)]
pub struct InfimumDemo {
    pub space: FiniteMetricSpace,
    pub k1: LipschitzFamily,
    pub k2: LipschitzFamily,
    /// `||2·1_a - 1_b - 1_c||_{K2}`
    pub first: Rational,
    /// `||1_a + 1_b - 2·1_c||_{K1}`
    pub second: Rational,
    /// `||3(1_a - 1_c)||_{K1}`
    pub sum_k1: Rational,
    /// `||3(1_a - 1_c)||_{K2}`
    pub sum_k2: Rational,
    pub families_admissible: bool,
}

impl InfimumDemo {
    /// The infimum is at most `first + second` on the sum, yet every
    /// admissible family gives the sum a larger value.
    pub fn subadditivity_fails(&self) -> bool {
        let bound = &self.first + &self.second;
        self.sum_k1 > bound && self.sum_k2 > bound
    }
}

pub fn infimum_demo_equilateral() -> Result<InfimumDemo> {
    let space = crate::metric::make_equilateral(3)?;
    let (a, b, c) = (0, 1, 2);
    let k1 = LipschitzFamily::distance_functions(&space, &[a, b]);
    let k2 = LipschitzFamily::distance_functions(&space, &[b, c]);
    let f = TransportProblem::from_integers(&[2, -1, -1])?;
    let g = TransportProblem::from_integers(&[1, 1, -2])?;
    let sum = &f + &g;
    debug_assert_eq!(sum, TransportProblem::unit_difference(3, a, c).scale(&rational::int(3)));

    let mut families_admissible = true;
    for fam in [&k1, &k2] {
        families_admissible &= check_condition_a(&space, fam)?.holds && check_condition_b(&space, fam)?.holds;
    }
    Ok(InfimumDemo {
        first: k_seminorm(&space, &k2, &f)?.value,
        second: k_seminorm(&space, &k1, &g)?.value,
        sum_k1: k_seminorm(&space, &k1, &sum)?.value,
        sum_k2: k_seminorm(&space, &k2, &sum)?.value,
        families_admissible,
        space,
        k1,
        k2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{make_cycle, make_equilateral, make_real_subset, make_symmetric_even_cycle};
    use crate::rational::{int, ratio};

    #[test]
    fn geodesic_cases() {
        let line = make_real_subset(&[int(0), int(1), int(3)]).unwrap();
        assert_eq!(on_geodesic(&line, (0, 1), (0, 2)).unwrap(), 2);
        assert_eq!(on_geodesic(&line, (0, 2), (2, 0)).unwrap(), 1);
        let line4 = make_real_subset(&[int(0), int(1), int(3), int(6)]).unwrap();
        assert_eq!(on_geodesic(&line4, (1, 2), (0, 3)).unwrap(), 3);
        assert_eq!(on_geodesic(&line4, (2, 1), (0, 3)).unwrap(), 4);
        let eq = make_equilateral(3).unwrap();
        assert_eq!(on_geodesic(&eq, (0, 1), (1, 2)).unwrap(), 0);
        assert!(on_geodesic(&eq, (0, 0), (1, 2)).is_err());
    }

    #[test]
    fn pair_sets() {
        let line = make_real_subset(&[int(0), int(1), int(3)]).unwrap();
        let PairSetOutcome::Complete(ps) = minimal_pair_set(&line).unwrap() else {
            panic!("line pairs should cover")
        };
        assert_eq!(ps.pairs, vec![(0, 2)]);
        assert_eq!(ps.coverage.len(), 3);

        let c4 = make_cycle(4, None).unwrap();
        assert_eq!(minimal_pair_set(&c4).unwrap().pairs(), &[(0, 2), (1, 3)]);

        let eq = make_equilateral(3).unwrap();
        assert_eq!(minimal_pair_set(&eq).unwrap().pairs(), &[(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn min_condition_examples() {
        let line = make_real_subset(&[int(0), ratio(1, 2), int(2), int(7)]).unwrap();
        let v = check_min_condition(&line).unwrap();
        assert!(v.holds);
        assert_eq!(v.pair_set().unwrap().pairs, vec![(0, 3)]);

        let c6 = make_symmetric_even_cycle(&[int(1), int(2), int(3)]).unwrap();
        let v = check_min_condition(&c6).unwrap();
        assert!(v.holds);
        assert_eq!(v.pair_set().unwrap().pairs, vec![(0, 3), (1, 4), (2, 5)]);

        let eq = make_equilateral(3).unwrap();
        let v = check_min_condition(&eq).unwrap();
        assert!(!v.holds);
        let viol = v.violation.unwrap();
        assert_eq!((viol.pair, viol.w, viol.slack), ((0, 1), 2, int(1)));
    }

    #[test]
    fn extension() {
        let c4 = make_cycle(4, None).unwrap();
        let l = lipschitz_extend(&c4, &[(0, int(0)), (2, int(2))]).unwrap();
        assert_eq!(&l[2] - &l[0], int(2));
        let l = lipschitz_extend(&c4, &[(1, int(0))]).unwrap();
        assert_eq!(l, c4.row(1).to_vec());
        assert!(lipschitz_extend(&c4, &[(0, int(0)), (1, int(3))]).is_err());
        assert!(lipschitz_extend(&c4, &[]).is_err());
    }

    #[test]
    fn equilateral_triple_witness() {
        let eq = make_equilateral(3).unwrap();
        let w = smallest_seminorm_witness(&eq).unwrap();
        assert_eq!((w.u1, w.v1, w.w), (0, 1, 2));
        assert_eq!(w.l1, vec![int(0), int(1), ratio(1, 2)]);
        assert_eq!(w.tau, int(2));
        assert_eq!(w.f, TransportProblem::from_integers(&[-2, 3, -1]).unwrap());
        assert_eq!(w.value_k, int(3));
        assert_eq!(w.value_k_tilde, int(2));
    }

    #[test]
    fn witness_requires_failing_space() {
        let line = make_real_subset(&[int(0), int(1), int(3)]).unwrap();
        assert!(smallest_seminorm_witness(&line).is_err());
        let eq4 = make_equilateral(4).unwrap();
        assert!(smallest_seminorm_witness(&eq4).unwrap().strict_gap());
    }

    #[test]
    fn infimum_demo() {
        let d = infimum_demo_equilateral().unwrap();
        assert_eq!(d.first, int(1));
        assert_eq!(d.second, int(1));
        assert_eq!(d.sum_k1, int(3));
        assert_eq!(d.sum_k2, int(3));
        assert!(d.families_admissible);
        assert!(d.subadditivity_fails());
    }
}
