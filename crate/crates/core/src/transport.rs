//! Transportation problems, plans, and the exact transportation cost norm.
//!
//! [`tc_norm`] solves the problem as a min-cost flow on the complete bipartite
//! graph between supply points (`f > 0`) and demand points (`f < 0`) using
//! successive shortest paths over exact rationals. The returned
//! [`DualCertificate`] is a 1-Lipschitz potential tight on every move of the
//! returned plan, which proves optimality on its own (see
//! [`verify_certificate`]).

use std::ops::{Add, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::error::{invalid, Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::rational::{self, Rational};

/// A zero-sum function on the points of a space, stored densely by point index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransportProblem {
    values: Vec<Rational>,
}

impl TransportProblem {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        let s = rational::sum(&values);
        if !s.is_zero() {
            return Err(Error::NotZeroSum(s));
        }
        Ok(Self { values })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            values: vec![Rational::zero(); n],
        }
    }

    /// `1_u - 1_v` on `n` points.
    pub fn unit_difference(n: usize, u: usize, v: usize) -> Self {
        let mut p = Self::zero(n);
        p.values[u] += rational::one();
        p.values[v] -= rational::one();
        p
    }

    /// Builds a problem from sparse `(index, value)` entries; repeated indices add up.
    pub fn from_sparse(n: usize, entries: &[(usize, Rational)]) -> Result<Self> {
        let mut values = vec![Rational::zero(); n];
        for (i, v) in entries {
            if *i >= n {
                return Err(invalid!("point index {} out of range for {} points", i, n));
            }
            values[*i] += v;
        }
        Self::new(values)
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| rational::int(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.values[i]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| !self.values[i].is_zero())
            .collect()
    }

    pub fn l1_norm(&self) -> Rational {
        self.values.iter().fold(Rational::zero(), |acc, x| acc + x.abs())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            values: self.values.iter().map(|x| x * c).collect(),
        }
    }

    /// Pairing `sum_v l(v) f(v)` with a function given by its values.
    pub fn pair(&self, l: &[Rational]) -> Rational {
        self.values
            .iter()
            .zip(l)
            .fold(Rational::zero(), |acc, (f, l)| acc + f * l)
    }

    pub(crate) fn check_space(&self, space: &FiniteMetricSpace) -> Result<()> {
        if self.len() != space.len() {
            return Err(Error::Dimension(format!(
                "problem has {} values but the space has {} points",
                self.len(),
                space.len()
            )));
        }
        Ok(())
    }
}

impl Add for &TransportProblem {
    type Output = TransportProblem;

    fn add(self, rhs: Self) -> TransportProblem {
        assert_eq!(self.len(), rhs.len(), "adding problems of different lengths");
        TransportProblem {
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &TransportProblem {
    type Output = TransportProblem;

    fn sub(self, rhs: Self) -> TransportProblem {
        self + &(-rhs)
    }
}

impl Neg for &TransportProblem {
    type Output = TransportProblem;

    fn neg(self) -> TransportProblem {
        TransportProblem {
            values: self.values.iter().map(|x| -x).collect(),
        }
    }
}

/// Ship `amount` units from `source` to `sink`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub source: usize,
    pub sink: usize,
    pub amount: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TransportPlan {
    pub moves: Vec<Move>,
}

impl TransportPlan {
    pub fn new(moves: Vec<Move>) -> Result<Self> {
        if let Some(m) = moves.iter().find(|m| !m.amount.is_positive()) {
            return Err(invalid!("move amounts must be positive, got {}", m.amount));
        }
        Ok(Self { moves })
    }

    pub fn from_triples(triples: &[(usize, usize, Rational)]) -> Result<Self> {
        Self::new(
            triples
                .iter()
                .map(|(s, t, a)| Move {
                    source: *s,
                    sink: *t,
                    amount: a.clone(),
                })
                .collect(),
        )
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// The problem this plan solves: `sum a_i (1_{x_i} - 1_{y_i})`.
    pub fn net_flow(&self, n: usize) -> Vec<Rational> {
        let mut net = vec![Rational::zero(); n];
        for m in &self.moves {
            net[m.source] += &m.amount;
            net[m.sink] -= &m.amount;
        }
        net
    }

    fn check_space(&self, space: &FiniteMetricSpace) -> Result<()> {
        for m in &self.moves {
            space.check_index(m.source)?;
            space.check_index(m.sink)?;
        }
        Ok(())
    }
}

/// A potential on every point of the space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCertificate {
    pub potential: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TcResult {
    pub value: Rational,
    pub plan: TransportPlan,
    pub certificate: DualCertificate,
}

/// `sum a_i d(x_i, y_i)`.
pub fn plan_cost(space: &FiniteMetricSpace, plan: &TransportPlan) -> Result<Rational> {
    plan.check_space(space)?;
    Ok(plan
        .moves
        .iter()
        .fold(Rational::zero(), |acc, m| acc + &m.amount * space.d(m.source, m.sink)))
}

pub fn plan_solves(space: &FiniteMetricSpace, plan: &TransportPlan, f: &TransportProblem) -> Result<bool> {
    plan.check_space(space)?;
    f.check_space(space)?;
    Ok(plan.net_flow(space.len()) == f.values)
}

/// Whether `l` is 1-Lipschitz; returns the first violating pair otherwise.
pub fn lipschitz_violation(space: &FiniteMetricSpace, l: &[Rational]) -> Option<(usize, usize)> {
    let n = space.len();
    for u in 0..n {
        for v in u + 1..n {
            if (&l[u] - &l[v]).abs() > *space.d(u, v) {
                return Some((u, v));
            }
        }
    }
    None
}

/// True iff the certificate is 1-Lipschitz and `l(x_i) - l(y_i) = d(x_i, y_i)`
/// on every move. A `true` answer proves the plan optimal.
pub fn verify_certificate(
    space: &FiniteMetricSpace,
    f: &TransportProblem,
    plan: &TransportPlan,
    certificate: &DualCertificate,
) -> Result<bool> {
    if !plan_solves(space, plan, f)? {
        return Err(invalid!("plan does not solve the transportation problem"));
    }
    let l = &certificate.potential;
    if l.len() != space.len() {
        return Err(Error::Dimension(format!(
            "certificate has {} values but the space has {} points",
            l.len(),
            space.len()
        )));
    }
    if lipschitz_violation(space, l).is_some() {
        return Ok(false);
    }
    Ok(plan
        .moves
        .iter()
        .all(|m| &l[m.source] - &l[m.sink] == *space.d(m.source, m.sink)))
}

#[derive(Debug, Clone)]
enum Capacity {
    Finite(Rational),
    Unbounded,
}

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    rev: usize,
    cap: Capacity,
    cost: Rational,
}

impl Arc {
    fn residual(&self) -> bool {
        match &self.cap {
            Capacity::Finite(c) => c.is_positive(),
            Capacity::Unbounded => true,
        }
    }
}

struct FlowNetwork {
    adj: Vec<Vec<Arc>>,
}

impl FlowNetwork {
    fn new(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: Capacity, cost: Rational) {
        let rev_from = self.adj[to].len();
        let rev_to = self.adj[from].len();
        self.adj[from].push(Arc {
            to,
            rev: rev_from,
            cap,
            cost: cost.clone(),
        });
        self.adj[to].push(Arc {
            to: from,
            rev: rev_to,
            cap: Capacity::Finite(Rational::zero()),
            cost: -cost,
        });
    }

    /// Bellman-Ford from `source` over residual arcs. Nodes and arcs are
    /// scanned in index order and labels change only on strict improvement,
    /// so the predecessor tree is deterministic.
    fn shortest_paths(&self, source: usize) -> Vec<Option<(usize, usize)>> {
        let n = self.adj.len();
        let mut dist: Vec<Option<Rational>> = vec![None; n];
        let mut pred: Vec<Option<(usize, usize)>> = vec![None; n];
        dist[source] = Some(Rational::zero());
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n {
                let Some(du) = dist[u].clone() else { continue };
                for (k, arc) in self.adj[u].iter().enumerate() {
                    if !arc.residual() {
                        continue;
                    }
                    let cand = &du + &arc.cost;
                    if dist[arc.to].as_ref().is_none_or(|dv| cand < *dv) {
                        dist[arc.to] = Some(cand);
                        pred[arc.to] = Some((u, k));
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        pred
    }

    fn augment(&mut self, source: usize, sink: usize) -> bool {
        let pred = self.shortest_paths(source);
        if pred[sink].is_none() {
            return false;
        }
        let mut path = Vec::new();
        let mut v = sink;
        while v != source {
            let (u, k) = pred[v].expect("predecessor chain reaches the source");
            path.push((u, k));
            v = u;
        }
        let bottleneck = path
            .iter()
            .filter_map(|&(u, k)| match &self.adj[u][k].cap {
                Capacity::Finite(c) => Some(c.clone()),
                Capacity::Unbounded => None,
            })
            .min()
            .expect("every augmenting path uses a finite source arc");
        for (u, k) in path {
            let (to, rev) = (self.adj[u][k].to, self.adj[u][k].rev);
            if let Capacity::Finite(c) = &mut self.adj[u][k].cap {
                *c -= &bottleneck;
            }
            if let Capacity::Finite(c) = &mut self.adj[to][rev].cap {
                *c += &bottleneck;
            }
        }
        true
    }
}

/// Exact transportation cost of `f`, with an optimal plan and a dual certificate.
///
/// Plans come out sorted by source index then sink index, one move per
/// (source, sink) pair.
pub fn tc_norm(space: &FiniteMetricSpace, f: &TransportProblem) -> Result<TcResult> {
    f.check_space(space)?;
    let n = space.len();
    let supply: Vec<usize> = (0..n).filter(|&i| f.get(i).is_positive()).collect();
    let demand: Vec<usize> = (0..n).filter(|&i| f.get(i).is_negative()).collect();

    if supply.is_empty() {
        return Ok(TcResult {
            value: Rational::zero(),
            plan: TransportPlan::default(),
            certificate: DualCertificate {
                potential: vec![Rational::zero(); n],
            },
        });
    }

    // node 0: source, 1..=S: supply, S+1..=S+T: demand, S+T+1: sink
    let s_count = supply.len();
    let t_count = demand.len();
    let source = 0;
    let sink = s_count + t_count + 1;
    let mut net = FlowNetwork::new(sink + 1);
    for (a, &p) in supply.iter().enumerate() {
        net.add_arc(source, 1 + a, Capacity::Finite(f.get(p).clone()), Rational::zero());
    }
    for (a, &p) in supply.iter().enumerate() {
        for (b, &q) in demand.iter().enumerate() {
            net.add_arc(1 + a, 1 + s_count + b, Capacity::Unbounded, space.d(p, q).clone());
        }
    }
    for (b, &q) in demand.iter().enumerate() {
        net.add_arc(1 + s_count + b, sink, Capacity::Finite(-f.get(q)), Rational::zero());
    }

    while net.augment(source, sink) {}

    let mut moves = Vec::new();
    for (a, &p) in supply.iter().enumerate() {
        for arc in &net.adj[1 + a] {
            if arc.to <= s_count || arc.to == sink {
                continue;
            }
            let Capacity::Finite(flow) = &net.adj[arc.to][arc.rev].cap else {
                unreachable!("reverse arcs are finite")
            };
            if flow.is_positive() {
                moves.push(Move {
                    source: p,
                    sink: demand[arc.to - 1 - s_count],
                    amount: flow.clone(),
                });
            }
        }
    }
    let plan = TransportPlan { moves };
    if plan.net_flow(n) != f.values {
        return Err(Error::Invariant("min-cost flow did not route all supply".into()));
    }
    let value = plan_cost(space, &plan)?;
    let certificate = certificate_for(space, f, &plan)?;
    if f.pair(&certificate.potential) != value {
        return Err(Error::Invariant("certificate pairing differs from plan cost".into()));
    }
    Ok(TcResult {
        value,
        plan,
        certificate,
    })
}

/// Potentials on `supp f` from the residual graph of the optimal plan, then
/// the tight extension to all of M.
fn certificate_for(space: &FiniteMetricSpace, f: &TransportProblem, plan: &TransportPlan) -> Result<DualCertificate> {
    let support = f.support();
    let k = support.len();
    let pos = |p: usize| support.binary_search(&p).expect("plan stays on the support");

    // residual arcs: every ordered support pair at cost d, plus the reverse of
    // every used move at cost -d
    let mut arcs: Vec<(usize, usize, Rational)> = Vec::new();
    for a in 0..k {
        for b in 0..k {
            if a != b {
                arcs.push((a, b, space.d(support[a], support[b]).clone()));
            }
        }
    }
    for m in &plan.moves {
        arcs.push((pos(m.sink), pos(m.source), -space.d(m.source, m.sink)));
    }

    // shortest distances from a virtual root joined to every node at cost 0
    let mut pi = vec![Rational::zero(); k];
    let mut settled = false;
    for _ in 0..=k {
        let mut changed = false;
        for (a, b, c) in &arcs {
            let cand = &pi[*a] + c;
            if cand < pi[*b] {
                pi[*b] = cand;
                changed = true;
            }
        }
        if !changed {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(Error::Invariant(
            "negative cycle in the residual graph: plan is not optimal".into(),
        ));
    }

    let anchors: Vec<(usize, Rational)> = support.iter().zip(pi).map(|(&p, v)| (p, -v)).collect();
    let potential = crate::min_condition::lipschitz_extend(space, &anchors)?;
    Ok(DualCertificate { potential })
}

/// Whether `v -> 1_v - 1_O` is isometric into `(tp(M), tc)`, i.e.
/// `tc(1_u - 1_v) = d(u, v)` for every pair.
pub fn canonical_embedding_check(space: &FiniteMetricSpace, base: usize) -> Result<bool> {
    space.check_index(base)?;
    let n = space.len();
    for u in 0..n {
        for v in u + 1..n {
            // (1_u - 1_O) - (1_v - 1_O)
            let eu = TransportProblem::unit_difference(n, u, base);
            let ev = TransportProblem::unit_difference(n, v, base);
            if tc_norm(space, &(&eu - &ev))?.value != *space.d(u, v) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
