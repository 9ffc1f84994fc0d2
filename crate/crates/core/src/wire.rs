//! JSON reading and writing. Rationals travel as canonical `"p/q"` strings;
//! points are referred to by label.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, ValidationReport};
use crate::min_condition::{
    InfimumDemo, MinConditionVerdict, Pair, PairSetOutcome, SmallestSeminormWitness, TriangleViolation,
};
use crate::rational::{self, Rational};
use crate::seminorm::{FamilyMember, FamilyTag, KernelBasis, LipschitzFamily};
use crate::special::{MedianSplit, OptimalityReport, SignTestReport, SubadditivityReport};
use crate::transport::{DualCertificate, Move, TcResult, TransportPlan, TransportProblem};
use crate::tree::{Sandwich, WeightedTree};

pub fn rat(r: &Rational) -> Value {
    Value::String(rational::format(r))
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(format!("invalid JSON: {e}")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::Malformed(format!("missing field `{key}`")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Malformed(format!("`{what}` must be an array")))
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::Malformed(format!("`{what}` must be an object")))
}

fn string<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::Malformed(format!("`{what}` must be a string")))
}

/// A rational given as a string or a JSON integer.
pub fn rational_value(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => rational::parse(s),
        Value::Number(n) => n
            .as_i64()
            .map(rational::int)
            .ok_or_else(|| Error::ParseRational(format!("`{n}` is not an integer; write fractions as \"p/q\""))),
        other => Err(Error::ParseRational(format!("expected a rational, got {other}"))),
    }
}

fn labeled_values(space_labels: &[String], v: &Value, what: &str) -> Result<Vec<Rational>> {
    let mut out = vec![rational::zero(); space_labels.len()];
    for (label, x) in object(v, what)? {
        let i = space_labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
        out[i] = rational_value(x)?;
    }
    Ok(out)
}

fn values_json(labels: &[String], values: &[Rational]) -> Value {
    Value::Object(
        labels
            .iter()
            .zip(values)
            .map(|(l, x)| (l.clone(), rat(x)))
            .collect(),
    )
}

fn pair_json(labels: &[String], (u, v): Pair) -> Value {
    json!([labels[u], labels[v]])
}

// ---- metric ----

/// Labels and matrix exactly as written, without checking the axioms.
pub fn parse_metric_raw(text: &str) -> Result<(Vec<String>, Vec<Vec<Rational>>)> {
    let v = parse_json(text)?;
    let labels = array(field(&v, "points")?, "points")?
        .iter()
        .map(|p| string(p, "points").map(str::to_string))
        .collect::<Result<Vec<_>>>()?;
    let dist = array(field(&v, "dist")?, "dist")?
        .iter()
        .map(|row| array(row, "dist")?.iter().map(rational_value).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    Ok((labels, dist))
}

pub fn parse_metric(text: &str) -> Result<FiniteMetricSpace> {
    let (labels, dist) = parse_metric_raw(text)?;
    FiniteMetricSpace::new(labels, dist)
}

pub fn metric_json(space: &FiniteMetricSpace) -> Value {
    json!({
        "points": space.labels(),
        "dist": space.matrix().iter().map(|r| r.iter().map(rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn validation_json(labels: &[String], report: &ValidationReport) -> Value {
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(|v| {
            json!({
                "kind": v.kind.to_string(),
                "points": v.indices.iter().map(|&i| labels.get(i).cloned().unwrap_or_else(|| i.to_string())).collect::<Vec<_>>(),
                "lhs": rat(&v.lhs),
                "rhs": rat(&v.rhs),
            })
        })
        .collect();
    json!({ "ok": report.ok, "violations": violations })
}

// ---- transport ----

/// Labels absent from the object are zero.
pub fn parse_problem(text: &str, labels: &[String]) -> Result<TransportProblem> {
    let v = parse_json(text)?;
    TransportProblem::new(labeled_values(labels, field(&v, "values")?, "values")?)
}

pub fn problem_json(labels: &[String], f: &TransportProblem) -> Value {
    json!({ "values": values_json(labels, f.values()) })
}

pub fn parse_plan(text: &str, labels: &[String]) -> Result<TransportPlan> {
    let v = parse_json(text)?;
    let index = |l: &Value| -> Result<usize> {
        let l = string(l, "moves")?;
        labels
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| Error::UnknownLabel(l.to_string()))
    };
    let moves = array(field(&v, "moves")?, "moves")?
        .iter()
        .map(|m| match array(m, "moves")?.as_slice() {
            [s, t, a] => Ok(Move {
                source: index(s)?,
                sink: index(t)?,
                amount: rational_value(a)?,
            }),
            _ => Err(Error::Malformed("each move is [source, sink, amount]".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    TransportPlan::new(moves)
}

pub fn plan_json(labels: &[String], plan: &TransportPlan) -> Value {
    let moves: Vec<Value> = plan
        .moves
        .iter()
        .map(|m| json!([labels[m.source], labels[m.sink], rat(&m.amount)]))
        .collect();
    json!({ "moves": moves })
}

pub fn parse_certificate(text: &str, labels: &[String]) -> Result<DualCertificate> {
    let v = parse_json(text)?;
    Ok(DualCertificate {
        potential: labeled_values(labels, field(&v, "potential")?, "potential")?,
    })
}

pub fn certificate_json(labels: &[String], cert: &DualCertificate) -> Value {
    json!({ "potential": values_json(labels, &cert.potential) })
}

pub fn tc_json(labels: &[String], r: &TcResult) -> Value {
    json!({
        "value": rat(&r.value),
        "plan": plan_json(labels, &r.plan),
        "certificate": certificate_json(labels, &r.certificate),
    })
}

// ---- seminorms ----

pub fn parse_family(text: &str, space: &FiniteMetricSpace) -> Result<LipschitzFamily> {
    let v = parse_json(text)?;
    let functions = array(field(&v, "functions")?, "functions")?
        .iter()
        .map(|m| {
            let tag = match m.get("tag") {
                Some(t) => FamilyTag::parse(string(t, "tag")?, space)?,
                None => FamilyTag::Custom(None),
            };
            Ok(FamilyMember {
                tag,
                values: labeled_values(space.labels(), field(m, "values")?, "values")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LipschitzFamily::new(functions))
}

pub fn family_json(space: &FiniteMetricSpace, family: &LipschitzFamily) -> Value {
    let functions: Vec<Value> = family
        .functions
        .iter()
        .map(|m| json!({ "tag": m.tag.render(space), "values": values_json(space.labels(), &m.values) }))
        .collect();
    json!({ "functions": functions })
}

pub fn kernel_json(labels: &[String], k: &KernelBasis) -> Value {
    json!({
        "dimension": k.dimension(),
        "basis": k.vectors.iter().map(|f| problem_json(labels, f)).collect::<Vec<_>>(),
    })
}

// ---- min-condition ----

fn violation_json(labels: &[String], v: &TriangleViolation) -> Value {
    json!({
        "pair": pair_json(labels, v.pair),
        "w": labels[v.w],
        "slack": rat(&v.slack),
    })
}

pub fn verdict_json(space: &FiniteMetricSpace, verdict: &MinConditionVerdict) -> Value {
    let labels = space.labels();
    let pairs: Vec<Value> = verdict.outcome.pairs().iter().map(|&p| pair_json(labels, p)).collect();
    let mut out = json!({
        "holds": verdict.holds,
        "pairs": pairs,
    });
    match &verdict.outcome {
        PairSetOutcome::Complete(ps) => {
            out["coverage"] = ps
                .coverage
                .iter()
                .map(|c| {
                    json!({
                        "pair": pair_json(labels, c.pair),
                        "covered_by": pair_json(labels, ps.pairs[c.witness]),
                        "case": c.case,
                    })
                })
                .collect();
        }
        PairSetOutcome::Incomplete { uncovered, .. } => {
            out["uncovered"] = uncovered.iter().map(|&p| pair_json(labels, p)).collect();
        }
    }
    out["violation"] = verdict
        .violation
        .as_ref()
        .map_or(Value::Null, |v| violation_json(labels, v));
    out
}

pub fn witness_json(space: &FiniteMetricSpace, w: &SmallestSeminormWitness) -> Value {
    let labels = space.labels();
    json!({
        "u1": labels[w.u1],
        "v1": labels[w.v1],
        "w": labels[w.w],
        "l1": values_json(labels, &w.l1),
        "k": family_json(space, &w.k),
        "k_tilde": family_json(space, &w.k_tilde),
        "f": problem_json(labels, &w.f),
        "tau": rat(&w.tau),
        "value_k": rat(&w.value_k),
        "value_k_tilde": rat(&w.value_k_tilde),
        "strict_gap": w.strict_gap(),
    })
}

pub fn infimum_json(d: &InfimumDemo) -> Value {
    json!({
        "space": metric_json(&d.space),
        "k1": family_json(&d.space, &d.k1),
        "k2": family_json(&d.space, &d.k2),
        "first": rat(&d.first),
        "second": rat(&d.second),
        "sum_k1": rat(&d.sum_k1),
        "sum_k2": rat(&d.sum_k2),
        "families_admissible": d.families_admissible,
        "subadditivity_fails": d.subadditivity_fails(),
    })
}

// ---- trees ----

/// `{"root": "r", "edges": [["r", "a", "3/2"], ...]}`; `root` is optional.
pub fn parse_tree(text: &str) -> Result<WeightedTree> {
    let v = parse_json(text)?;
    let root = match v.get("root") {
        Some(r) => Some(string(r, "root")?.to_string()),
        None => None,
    };
    let edges = array(field(&v, "edges")?, "edges")?
        .iter()
        .map(|e| match array(e, "edges")?.as_slice() {
            [a, b, w] => Ok((
                string(a, "edges")?.to_string(),
                string(b, "edges")?.to_string(),
                rational_value(w)?,
            )),
            _ => Err(Error::Malformed("each edge is [parent, child, weight]".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    WeightedTree::from_labeled_edges(root.as_deref(), &edges)
}

pub fn tree_json(t: &WeightedTree) -> Value {
    let l = t.labels();
    let edges: Vec<Value> = t
        .edges()
        .iter()
        .map(|e| json!([l[e.parent], l[e.child], rat(&e.weight)]))
        .collect();
    json!({ "root": l[t.root()], "edges": edges })
}

/// Per-edge values keyed by the child label of each edge.
pub fn edge_values_json(t: &WeightedTree, values: &[Rational]) -> Value {
    Value::Object(
        t.edges()
            .iter()
            .zip(values)
            .map(|(e, x)| (t.labels()[e.child].clone(), rat(x)))
            .collect(),
    )
}

pub fn sandwich_json(t: &WeightedTree, s: &Sandwich) -> Value {
    json!({
        "root": t.labels()[s.root],
        "dp_norm": rat(&s.dp_norm),
        "d_sup": rat(&s.d_sup),
        "holds": s.holds(),
    })
}

// ---- special metrics ----

pub fn median_json(labels: &[String], s: &MedianSplit) -> Value {
    json!({
        "m": labels[s.m],
        "half_mass": rat(&s.half_mass),
        "b": values_json(labels, &s.b),
        "e": values_json(labels, &s.e),
    })
}

pub fn optimality_json(r: &OptimalityReport) -> Value {
    json!({
        "supported": r.supported,
        "sign_consistent": r.sign_consistent,
        "crosses_median": r.crosses_median,
        "all_hold": r.all_hold(),
        "cost": rat(&r.cost),
        "fast_cost": rat(&r.fast_cost),
    })
}

pub fn subadditivity_json(labels: &[String], r: &SubadditivityReport) -> Value {
    json!({
        "lhs": rat(&r.lhs),
        "rhs": rat(&r.rhs),
        "gap": rat(&r.gap),
        "plan_lhs": plan_json(labels, &r.plan_lhs),
        "plan_first": plan_json(labels, &r.plan_first),
        "plan_second": plan_json(labels, &r.plan_second),
    })
}

pub fn sign_test_json(r: &SignTestReport) -> Value {
    json!({
        "holds": r.holds,
        "normalized": r.normalized,
        "counterexample": r.counterexample.as_ref().map(|(mask, norm)| json!({ "pattern": mask, "norm": rat(norm) })),
    })
}
