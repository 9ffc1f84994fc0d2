//! Seminorms `||f||_K = max_{l in K} |sum_v l(v) f(v)|` over finite families
//! of functions, the Fréchet and double-point families, and the kernel of
//! the double-point seminorm.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::metric::FiniteMetricSpace;
use crate::rational::{self, Rational};
use crate::transport::TransportProblem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyTag {
    /// `d(v, .)`
    Frechet(usize),
    /// `(d(v, .) - d(u, .)) / 2` for the pair `(u, v)`
    DoublePoint(usize, usize),
    Custom(Option<String>),
}

impl FamilyTag {
    pub fn render(&self, space: &FiniteMetricSpace) -> String {
        match self {
            FamilyTag::Frechet(v) => format!("frechet:{}", space.label(*v)),
            FamilyTag::DoublePoint(u, v) => {
                format!("doublepoint:{},{}", space.label(*u), space.label(*v))
            }
            FamilyTag::Custom(None) => "custom".to_string(),
            FamilyTag::Custom(Some(name)) => format!("custom:{name}"),
        }
    }

    /// Inverse of [`FamilyTag::render`]. Unrecognised tags become custom.
    pub fn parse(s: &str, space: &FiniteMetricSpace) -> Result<Self> {
        if let Some(v) = s.strip_prefix("frechet:") {
            return Ok(FamilyTag::Frechet(space.index_of(v)?));
        }
        if let Some(rest) = s.strip_prefix("doublepoint:") {
            let (u, v) = rest
                .split_once(',')
                .ok_or_else(|| Error::Malformed(format!("double-point tag `{s}` needs two labels")))?;
            return Ok(FamilyTag::DoublePoint(space.index_of(u)?, space.index_of(v)?));
        }
        Ok(match s.strip_prefix("custom:") {
            Some(name) => FamilyTag::Custom(Some(name.to_string())),
            None if s == "custom" || s.is_empty() => FamilyTag::Custom(None),
            None => FamilyTag::Custom(Some(s.to_string())),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub tag: FamilyTag,
    pub values: Vec<Rational>,
}

/// A finite set of real functions on the points of a space.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LipschitzFamily {
    pub functions: Vec<FamilyMember>,
}

impl LipschitzFamily {
    pub fn new(functions: Vec<FamilyMember>) -> Self {
        Self { functions }
    }

    pub fn from_values(values: Vec<Vec<Rational>>) -> Self {
        Self::new(
            values
                .into_iter()
                .map(|values| FamilyMember {
                    tag: FamilyTag::Custom(None),
                    values,
                })
                .collect(),
        )
    }

    /// `{d(z, .) : z in points}`
    pub fn distance_functions(space: &FiniteMetricSpace, points: &[usize]) -> Self {
        Self::new(
            points
                .iter()
                .map(|&z| FamilyMember {
                    tag: FamilyTag::Frechet(z),
                    values: space.row(z).to_vec(),
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn push(&mut self, tag: FamilyTag, values: Vec<Rational>) {
        self.functions.push(FamilyMember { tag, values });
    }

    pub fn extend(&mut self, other: LipschitzFamily) {
        self.functions.extend(other.functions);
    }

    fn check_space(&self, space: &FiniteMetricSpace) -> Result<()> {
        match self.functions.iter().position(|m| m.values.len() != space.len()) {
            Some(i) => Err(Error::Dimension(format!(
                "family function {} has {} values but the space has {} points",
                i,
                self.functions[i].values.len(),
                space.len()
            ))),
            None => Ok(()),
        }
    }
}

/// Outcome of a family condition check. `witness` is `(function, u, v)` for
/// condition A and `(u, v)` for condition B, absent when the check passes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionCheck<W> {
    pub holds: bool,
    pub witness: Option<W>,
}

impl<W> ConditionCheck<W> {
    fn from_witness(witness: Option<W>) -> Self {
        Self {
            holds: witness.is_none(),
            witness,
        }
    }
}

impl<W: fmt::Debug> fmt::Display for ConditionCheck<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "holds"),
            Some(w) => write!(f, "fails at {w:?}"),
        }
    }
}

/// Condition A: every member is 1-Lipschitz.
pub fn check_condition_a(
    space: &FiniteMetricSpace,
    family: &LipschitzFamily,
) -> Result<ConditionCheck<(usize, usize, usize)>> {
    family.check_space(space)?;
    let witness = family.functions.iter().enumerate().find_map(|(k, m)| {
        crate::transport::lipschitz_violation(space, &m.values).map(|(u, v)| (k, u, v))
    });
    Ok(ConditionCheck::from_witness(witness))
}

/// Condition B: every pair `u != v` is realised, `|l(u) - l(v)| = d(u, v)`
/// for some member `l`.
pub fn check_condition_b(
    space: &FiniteMetricSpace,
    family: &LipschitzFamily,
) -> Result<ConditionCheck<(usize, usize)>> {
    if space.len() < 2 {
        return Err(invalid!("condition B needs at least two points"));
    }
    family.check_space(space)?;
    let n = space.len();
    let realised = |u: usize, v: usize| {
        family
            .functions
            .iter()
            .any(|m| (&m.values[u] - &m.values[v]).abs() == *space.d(u, v))
    };
    let witness = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .find(|&(u, v)| !realised(u, v));
    Ok(ConditionCheck::from_witness(witness))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeminormValue {
    pub value: Rational,
    /// Lowest-index member attaining the maximum.
    pub argmax: usize,
}

pub fn k_seminorm(
    space: &FiniteMetricSpace,
    family: &LipschitzFamily,
    f: &TransportProblem,
) -> Result<SeminormValue> {
    if family.is_empty() {
        return Err(invalid!("the function family is empty"));
    }
    family.check_space(space)?;
    if f.len() != space.len() {
        return Err(Error::Dimension(format!(
            "problem has {} values but the space has {} points",
            f.len(),
            space.len()
        )));
    }
    let mut best: Option<SeminormValue> = None;
    for (k, m) in family.functions.iter().enumerate() {
        let v = f.pair(&m.values).abs();
        if best.as_ref().is_none_or(|b| v > b.value) {
            best = Some(SeminormValue { value: v, argmax: k });
        }
    }
    Ok(best.expect("family is nonempty"))
}

/// All distance functions `d(v, .)`, in point order.
pub fn frechet_family(space: &FiniteMetricSpace) -> LipschitzFamily {
    let all: Vec<usize> = (0..space.len()).collect();
    LipschitzFamily::distance_functions(space, &all)
}

/// `phi_{u,v} = (d(v, .) - d(u, .)) / 2` for `u < v`, skipping any function
/// equal to a stored one or its negative.
pub fn dp_family(space: &FiniteMetricSpace) -> LipschitzFamily {
    let n = space.len();
    let half = rational::ratio(1, 2);
    let mut family = LipschitzFamily::default();
    for u in 0..n {
        for v in u + 1..n {
            let values: Vec<Rational> = (0..n)
                .map(|x| (space.d(v, x) - space.d(u, x)) * &half)
                .collect();
            let neg: Vec<Rational> = values.iter().map(|x| -x).collect();
            if family
                .functions
                .iter()
                .any(|m| m.values == values || m.values == neg)
            {
                continue;
            }
            family.push(FamilyTag::DoublePoint(u, v), values);
        }
    }
    family
}

/// Basis of `{f in tp(M) : ||f||_DP = 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBasis {
    pub vectors: Vec<TransportProblem>,
}

impl KernelBasis {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }

    /// Whether `f` lies in the span of the basis.
    pub fn contains(&self, f: &TransportProblem) -> bool {
        let n = f.len();
        let mut rows: Vec<Vec<Rational>> = self.vectors.iter().map(|v| v.values().to_vec()).collect();
        let r = linalg::rank(&rows, n);
        rows.push(f.values().to_vec());
        linalg::rank(&rows, n) == r
    }
}

/// Kernel of the double-point seminorm by exact elimination.
///
/// `||f||_DP = 0` exactly when `sum_x f(x) d(v, x)` is the same for every
/// `v`, so the kernel is the null space of the rows
/// `x -> d(v, x) - d(v0, x)` (`v != v0`) together with the zero-sum row.
/// Vectors are returned in primitive integer form with a positive leading
/// entry, and each one is re-checked against [`dp_family`].
pub fn dp_kernel(space: &FiniteMetricSpace) -> Result<KernelBasis> {
    let n = space.len();
    if n < 2 {
        return Err(invalid!("the double-point kernel needs at least two points"));
    }
    let mut rows = vec![vec![rational::one(); n]];
    for v in 1..n {
        rows.push((0..n).map(|x| space.d(v, x) - space.d(0, x)).collect());
    }
    let family = dp_family(space);
    let mut vectors = Vec::new();
    for raw in linalg::null_space(&rows, n) {
        let f = TransportProblem::new(rational::primitive_integer_form(&raw))?;
        let dp = k_seminorm(space, &family, &f)?;
        if !dp.value.is_zero() {
            return Err(Error::Invariant(format!(
                "kernel vector has double-point seminorm {}",
                dp.value
            )));
        }
        vectors.push(f);
    }
    Ok(KernelBasis { vectors })
}

/// The four-point sufficient condition for `1_{x1} - 1_{x2} + 1_{x3} - 1_{x4}`
/// to have zero double-point seminorm: equal consecutive sides, both
/// diagonals twice a side, and `d(x,x1) + d(x,x3) = d(x,x2) + d(x,x4)` for
/// every `x`.
pub fn verify_quadruple_kernel(space: &FiniteMetricSpace, quad: [usize; 4]) -> Result<bool> {
    for (k, &p) in quad.iter().enumerate() {
        space.check_index(p)?;
        if quad[..k].contains(&p) {
            return Err(invalid!("quadruple repeats point `{}`", space.label(p)));
        }
    }
    let [x1, x2, x3, x4] = quad;
    let side = space.d(x1, x2);
    let sides_equal = space.d(x2, x3) == side && space.d(x3, x4) == side && space.d(x4, x1) == side;
    let diag = side * rational::int(2);
    let diagonals = *space.d(x1, x3) == diag && *space.d(x2, x4) == diag;
    let balanced = (0..space.len())
        .all(|x| space.d(x, x1) + space.d(x, x3) == space.d(x, x2) + space.d(x, x4));
    Ok(sides_equal && diagonals && balanced)
}

/// `1_{x1} - 1_{x2} + 1_{x3} - 1_{x4}`
pub fn alternating_quadruple(n: usize, quad: [usize; 4]) -> TransportProblem {
    let [x1, x2, x3, x4] = quad;
    &TransportProblem::unit_difference(n, x1, x2) + &TransportProblem::unit_difference(n, x3, x4)
}

/// Compares `||f||_F` with the sup-norm of the image of `f` under the linear
/// extension of the Fréchet embedding `v -> (d(v, x) - d(O, x))_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrechetEmbeddingCheck {
    pub seminorm: Rational,
    pub sup_norm: Rational,
}

impl FrechetEmbeddingCheck {
    pub fn holds(&self) -> bool {
        self.seminorm == self.sup_norm
    }
}

pub fn anyx_frechet_check(
    space: &FiniteMetricSpace,
    base: usize,
    f: &TransportProblem,
) -> Result<FrechetEmbeddingCheck> {
    space.check_index(base)?;
    let seminorm = k_seminorm(space, &frechet_family(space), f)?.value;
    let n = space.len();
    // sum_v f(v) (E(v) - E(O)) evaluated coordinatewise
    let image: Vec<Rational> = (0..n)
        .map(|x| {
            (0..n).fold(Rational::zero(), |acc, v| {
                acc + f.get(v) * (space.d(v, x) - space.d(base, x))
            })
        })
        .collect();
    let sup_norm = image
        .iter()
        .map(Signed::abs)
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(FrechetEmbeddingCheck { seminorm, sup_norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{make_cycle, make_equilateral, make_real_subset, make_two_block};
    use crate::rational::{int, ratio};

    #[test]
    fn condition_a() {
        let c4 = make_cycle(4, None).unwrap();
        assert!(check_condition_a(&c4, &frechet_family(&c4)).unwrap().holds);
        assert!(check_condition_a(&c4, &dp_family(&c4)).unwrap().holds);
        let doubled = LipschitzFamily::from_values(vec![c4.row(0).iter().map(|x| x * int(2)).collect()]);
        let r = check_condition_a(&c4, &doubled).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witness, Some((0, 0, 1)));
    }

    #[test]
    fn condition_b() {
        let eq = make_equilateral(3).unwrap();
        assert!(check_condition_b(&eq, &frechet_family(&eq)).unwrap().holds);
        assert!(check_condition_b(&eq, &dp_family(&eq)).unwrap().holds);
        let only_a = LipschitzFamily::distance_functions(&eq, &[0]);
        let r = check_condition_b(&eq, &only_a).unwrap();
        assert_eq!(r.witness, Some((1, 2)));
        let single = make_equilateral(1).unwrap();
        assert!(check_condition_b(&single, &frechet_family(&single)).is_err());
    }

    #[test]
    fn equilateral_seminorm_values() {
        let eq = make_equilateral(3).unwrap();
        let k1 = LipschitzFamily::distance_functions(&eq, &[0, 1]);
        let k2 = LipschitzFamily::distance_functions(&eq, &[1, 2]);
        let f = TransportProblem::from_integers(&[2, -1, -1]).unwrap();
        let g = TransportProblem::from_integers(&[1, 1, -2]).unwrap();
        assert_eq!(k_seminorm(&eq, &k2, &f).unwrap().value, int(1));
        assert_eq!(k_seminorm(&eq, &k1, &g).unwrap().value, int(1));
        let h = TransportProblem::from_integers(&[3, 0, -3]).unwrap();
        assert_eq!(k_seminorm(&eq, &k1, &h).unwrap().value, int(3));
        assert_eq!(k_seminorm(&eq, &k2, &h).unwrap().value, int(3));
    }

    #[test]
    fn argmax_takes_lowest_index() {
        let eq = make_equilateral(3).unwrap();
        let k2 = LipschitzFamily::distance_functions(&eq, &[1, 2]);
        let f = TransportProblem::from_integers(&[2, -1, -1]).unwrap();
        // both members give |.| = 1
        assert_eq!(k_seminorm(&eq, &k2, &f).unwrap().argmax, 0);
    }

    #[test]
    fn empty_family_is_rejected() {
        let eq = make_equilateral(3).unwrap();
        let f = TransportProblem::zero(3);
        assert!(k_seminorm(&eq, &LipschitzFamily::default(), &f).is_err());
    }

    #[test]
    fn frechet_family_shapes() {
        let eq = make_equilateral(3).unwrap();
        let fam = frechet_family(&eq);
        assert_eq!(fam.len(), 3);
        for m in &fam.functions {
            let mut v = m.values.clone();
            v.sort();
            assert_eq!(v, vec![int(0), int(1), int(1)]);
        }
        let single = make_equilateral(1).unwrap();
        assert_eq!(frechet_family(&single).functions[0].values, vec![int(0)]);
        let c4 = make_cycle(4, None).unwrap();
        for m in &frechet_family(&c4).functions {
            let mut v = m.values.clone();
            v.sort();
            assert_eq!(v, vec![int(0), int(1), int(1), int(2)]);
        }
    }

    #[test]
    fn dp_family_shapes() {
        let two = make_real_subset(&[int(0), int(1)]).unwrap();
        let fam = dp_family(&two);
        assert_eq!(fam.len(), 1);
        assert_eq!(fam.functions[0].values, vec![ratio(1, 2), ratio(-1, 2)]);

        let c4 = make_cycle(4, None).unwrap();
        let fam = dp_family(&c4);
        assert!(fam.len() <= 6);
        let phi13 = fam
            .functions
            .iter()
            .find(|m| m.tag == FamilyTag::DoublePoint(0, 2))
            .unwrap();
        // (d(x3, .) - d(x1, .)) / 2
        assert_eq!(phi13.values, vec![int(1), int(0), int(-1), int(0)]);
    }

    #[test]
    fn four_cycle_kernel() {
        let c4 = make_cycle(4, None).unwrap();
        let k = dp_kernel(&c4).unwrap();
        assert_eq!(k.dimension(), 1);
        assert_eq!(k.vectors[0], TransportProblem::from_integers(&[1, -1, 1, -1]).unwrap());
    }

    #[test]
    fn two_block_kernel_contains_block_difference() {
        let s = make_two_block(3, &int(1)).unwrap();
        let k = dp_kernel(&s).unwrap();
        let f = TransportProblem::from_integers(&[1, 1, 1, -1, -1, -1]).unwrap();
        assert!(k.contains(&f));
    }

    #[test]
    fn real_line_kernel_is_trivial() {
        let s = make_real_subset(&[int(0), int(1), int(3)]).unwrap();
        assert_eq!(dp_kernel(&s).unwrap().dimension(), 0);
    }

    #[test]
    fn quadruple_condition() {
        let c4 = make_cycle(4, None).unwrap();
        assert!(verify_quadruple_kernel(&c4, [0, 1, 2, 3]).unwrap());
        let f = alternating_quadruple(4, [0, 1, 2, 3]);
        assert_eq!(k_seminorm(&c4, &dp_family(&c4), &f).unwrap().value, int(0));

        let eq4 = make_equilateral(4).unwrap();
        assert!(!verify_quadruple_kernel(&eq4, [0, 1, 2, 3]).unwrap());
        let c6 = make_cycle(6, None).unwrap();
        assert!(!verify_quadruple_kernel(&c6, [0, 1, 2, 3]).unwrap());
        assert!(verify_quadruple_kernel(&c4, [0, 1, 2, 0]).is_err());
    }

    #[test]
    fn frechet_embedding_examples() {
        let c4 = make_cycle(4, None).unwrap();
        let f = TransportProblem::unit_difference(4, 0, 2);
        let r = anyx_frechet_check(&c4, 1, &f).unwrap();
        assert!(r.holds());
        assert_eq!(r.seminorm, int(2));
        let z = anyx_frechet_check(&c4, 0, &TransportProblem::zero(4)).unwrap();
        assert!(z.holds());
        assert_eq!(z.sup_norm, int(0));
    }

    #[test]
    fn tags_round_trip() {
        let c4 = make_cycle(4, None).unwrap();
        for tag in [
            FamilyTag::Frechet(2),
            FamilyTag::DoublePoint(0, 3),
            FamilyTag::Custom(None),
            FamilyTag::Custom(Some("l1".into())),
        ] {
            assert_eq!(FamilyTag::parse(&tag.render(&c4), &c4).unwrap(), tag);
        }
    }
}
