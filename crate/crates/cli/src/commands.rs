use std::fs;
use std::path::{Path, PathBuf};

use clap::Subcommand;
use serde_json::{json, Value};

use tcspace_core::metric::{
    make_cycle, make_equilateral, make_min_metric, make_real_subset, make_symmetric_even_cycle, make_two_block,
    validate_metric, FiniteMetricSpace,
};
use tcspace_core::min_condition::{check_min_condition, smallest_seminorm_witness};
use tcspace_core::rational::{self, Rational};
use tcspace_core::seminorm::{check_condition_a, check_condition_b, dp_family, frechet_family, k_seminorm};
use tcspace_core::special::{
    check_plan_optimal_conditions, fast_tc_min_metric, geodesic_identity_check, l1_basis_sign_test,
    median_split, overlap_experiment, representing_set_truncation, scaled_singletons,
    strict_subadditivity_experiment,
};
use tcspace_core::transport::{plan_cost, tc_norm, verify_certificate};
use tcspace_core::tree::{check_bm_sandwich, d_map, edge_coefficients, tree_dp_norm, tree_tc_norm, WeightedTree};
use tcspace_core::wire::{self, rat};
use tcspace_core::{random, Error, TransportProblem};

use crate::{Failure, FamilyKind, Outcome, ProblemInput};

const DEFAULT_MAX_POINTS: usize = 4096;

#[derive(Debug, Subcommand)]
pub enum SpecialOp {
    /// Median index and beginning/end split of a problem on the min-metric of h
    Median {
        #[arg(long, value_delimiter = ',', required = true)]
        h: Vec<String>,
        #[command(flatten)]
        problem: ProblemInput,
    },
    /// Closed-form cost against the general solver
    FastTc {
        #[arg(long, value_delimiter = ',', required = true)]
        h: Vec<String>,
        #[command(flatten)]
        problem: ProblemInput,
    },
    /// Which optimality conditions a plan meets (default: the solver's plan)
    Optimality {
        #[arg(long, value_delimiter = ',', required = true)]
        h: Vec<String>,
        #[command(flatten)]
        problem: ProblemInput,
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// ||f||_1 / 2 <= ||f||_tc <= ||f||_1
    Bounds {
        #[arg(long, value_delimiter = ',', required = true)]
        h: Vec<String>,
        #[command(flatten)]
        problem: ProblemInput,
    },
    /// Strict subadditivity for two problems given as value lists
    Subadditivity {
        #[arg(long, value_delimiter = ',', required = true)]
        h: Vec<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x1: Vec<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        xp: Vec<String>,
        /// Use the shared-point precondition instead of separated supports
        #[arg(long)]
        overlap: bool,
    },
    /// All subsets of {1..n} with binary-weighted symmetric difference distance
    Representing {
        #[arg(long)]
        n: usize,
    },
    /// d(0,{j}) + d({j},A) = d(0,A) in the representing-set space
    Geodesic {
        #[arg(long)]
        n: usize,
        /// Elements of A, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        subset: Vec<usize>,
        #[arg(long)]
        j: usize,
    },
    /// Every signed sum of the (normalized) vectors has norm equal to their count
    SignTest {
        #[arg(long, requires = "vectors", conflicts_with = "representing")]
        space: Option<PathBuf>,
        /// {"vectors": [{"values": {...}}, ...]}
        #[arg(long, requires = "space")]
        vectors: Option<PathBuf>,
        /// Use 2^-i (1_{i} - 1_0), i = 1..n, in the representing-set space of size n
        #[arg(long, required_unless_present = "space")]
        representing: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenKind {
    /// Cycle x1..xn with unit or given edge weights
    Cycle {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<String>>,
    },
    /// Even cycle whose weights repeat the given half
    SymmetricCycle {
        #[arg(long, value_delimiter = ',', required = true)]
        half: Vec<String>,
    },
    /// Two blocks of m points, cross distance c
    TwoBlock {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "1")]
        c: String,
    },
    /// d(i, j) = h(min(i, j))
    MinMetric {
        #[arg(long, value_delimiter = ',', required = true)]
        h: Vec<String>,
    },
    /// Points on the real line
    RealSubset {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        xs: Vec<String>,
    },
    /// n points at mutual distance 1
    Equilateral {
        #[arg(long)]
        n: usize,
    },
    /// Subsets of {1..n} with binary weights
    Representing {
        #[arg(long)]
        n: usize,
    },
    /// Shortest-path closure of random edge weights
    RandomMetric {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random weighted tree
    RandomTree {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random zero-sum problem on the points of a space
    RandomProblem {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn max_points() -> Result<usize, Error> {
    match std::env::var("TCSPACE_MAX_POINTS") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("TCSPACE_MAX_POINTS must be a count, got `{s}`"))),
        Err(_) => Ok(DEFAULT_MAX_POINTS),
    }
}

fn guard(n: usize) -> Result<(), Error> {
    let limit = max_points()?;
    if n > limit {
        return Err(Error::ResourceLimit(format!(
            "{n} points exceeds the limit of {limit} (set TCSPACE_MAX_POINTS to raise it)"
        )));
    }
    Ok(())
}

fn load_space(path: &Path) -> Result<FiniteMetricSpace, Error> {
    let (labels, dist) = wire::parse_metric_raw(&read(path)?)?;
    guard(labels.len())?;
    FiniteMetricSpace::new(labels, dist)
}

fn rationals(items: &[String]) -> Result<Vec<Rational>, Error> {
    items.iter().map(|s| rational::parse(s)).collect()
}

fn dense_problem(items: &[String], n: usize) -> Result<TransportProblem, Error> {
    let values = rationals(items)?;
    if values.len() != n {
        return Err(Error::Dimension(format!("expected {n} values, got {}", values.len())));
    }
    TransportProblem::new(values)
}

fn load_problem(input: &ProblemInput, labels: &[String]) -> Result<TransportProblem, Error> {
    match (&input.problem, &input.values) {
        (Some(path), _) => wire::parse_problem(&read(path)?, labels),
        (None, Some(values)) => dense_problem(values, labels.len()),
        (None, None) => Err(Error::InvalidArgument("a problem is required (--problem or --values)".into())),
    }
}

fn check(v: Value, passed: bool) -> Outcome {
    if passed {
        Ok(v)
    } else {
        Err(Failure::Assertion(v))
    }
}

pub fn validate(path: &Path) -> Outcome {
    let (labels, dist) = wire::parse_metric_raw(&read(path)?)?;
    guard(labels.len())?;
    let report = validate_metric(&labels, &dist)?;
    check(wire::validation_json(&labels, &report), report.ok)
}

pub fn tc(path: &Path, problem: &ProblemInput, plan: Option<&Path>, certificate: Option<&Path>) -> Outcome {
    let space = load_space(path)?;
    let f = load_problem(problem, space.labels())?;
    match (plan, certificate) {
        (Some(p), Some(c)) => {
            let plan = wire::parse_plan(&read(p)?, space.labels())?;
            let cert = wire::parse_certificate(&read(c)?, space.labels())?;
            let verified = verify_certificate(&space, &f, &plan, &cert)?;
            let report = json!({
                "verified": verified,
                "plan_cost": rat(&plan_cost(&space, &plan)?),
                "pairing": rat(&f.pair(&cert.potential)),
            });
            check(report, verified)
        }
        _ => Ok(wire::tc_json(space.labels(), &tc_norm(&space, &f)?)),
    }
}

pub fn seminorm(path: &Path, problem: &ProblemInput, family: Option<&Path>, kind: FamilyKind) -> Outcome {
    let space = load_space(path)?;
    let f = load_problem(problem, space.labels())?;
    let family = match family {
        Some(p) => wire::parse_family(&read(p)?, &space)?,
        None => match kind {
            FamilyKind::Dp => dp_family(&space),
            FamilyKind::Frechet => frechet_family(&space),
        },
    };
    let value = k_seminorm(&space, &family, &f)?;
    let a = check_condition_a(&space, &family)?;
    let label = |i: usize| space.label(i).to_string();
    let condition_b = if space.len() >= 2 {
        let b = check_condition_b(&space, &family)?;
        json!({ "holds": b.holds, "witness": b.witness.map(|(u, v)| json!([label(u), label(v)])) })
    } else {
        Value::Null
    };
    Ok(json!({
        "value": rat(&value.value),
        "argmax": family.functions[value.argmax].tag.render(&space),
        "family_size": family.len(),
        "condition_a": {
            "holds": a.holds,
            "witness": a.witness.map(|(k, u, v)| json!({ "function": k, "pair": [label(u), label(v)] })),
        },
        "condition_b": condition_b,
    }))
}

pub fn dp_kernel(path: &Path) -> Outcome {
    let space = load_space(path)?;
    Ok(wire::kernel_json(space.labels(), &tcspace_core::seminorm::dp_kernel(&space)?))
}

pub fn min_condition(path: &Path) -> Outcome {
    let space = load_space(path)?;
    let verdict = check_min_condition(&space)?;
    let mut report = wire::verdict_json(&space, &verdict);
    if !verdict.holds {
        report["witness"] = match smallest_seminorm_witness(&space) {
            Ok(w) => wire::witness_json(&space, &w),
            Err(e @ Error::Invariant(_)) => return Err(e.into()),
            Err(e) => json!({ "unavailable": e.to_string() }),
        };
    }
    Ok(report)
}

pub fn tree_cmd(path: &Path, problem: &ProblemInput, root: Option<&str>) -> Outcome {
    let mut tree = wire::parse_tree(&read(path)?)?;
    guard(tree.len())?;
    if let Some(r) = root {
        tree = tree.rerooted(tree.index_of(r)?)?;
    }
    let mut report = json!({ "tree": wire::tree_json(&tree) });
    if problem.problem.is_some() || problem.values.is_some() {
        let f = load_problem(problem, tree.labels())?;
        let coefficients = edge_coefficients(&tree, &f)?;
        let sandwich = check_bm_sandwich(&tree, &f)?;
        report["coefficients"] = wire::edge_values_json(&tree, &coefficients.coefficients);
        report["tc"] = rat(&tree_tc_norm(&tree, &f)?);
        report["d_map"] = wire::edge_values_json(&tree, &d_map(&tree, &f)?);
        report["dp_norm"] = rat(&tree_dp_norm(&tree, &f)?);
        report["sandwich"] = wire::sandwich_json(&tree, &sandwich);
        return check(report, sandwich.holds());
    }
    Ok(report)
}

fn min_metric_problem(h: &[String], problem: &ProblemInput) -> Result<(Vec<Rational>, FiniteMetricSpace, TransportProblem), Error> {
    let h = rationals(h)?;
    guard(h.len())?;
    let space = make_min_metric(&h)?;
    let f = load_problem(problem, space.labels())?;
    Ok((h, space, f))
}

pub fn special(op: SpecialOp) -> Outcome {
    match op {
        SpecialOp::Median { h, problem } => {
            let (h, space, f) = min_metric_problem(&h, &problem)?;
            Ok(wire::median_json(space.labels(), &median_split(&h, &f)?))
        }
        SpecialOp::FastTc { h, problem } => {
            let (h, space, f) = min_metric_problem(&h, &problem)?;
            let fast = fast_tc_min_metric(&h, &f)?;
            let solved = tc_norm(&space, &f)?.value;
            check(
                json!({ "fast": rat(&fast), "tc": rat(&solved), "equal": fast == solved }),
                fast == solved,
            )
        }
        SpecialOp::Optimality { h, problem, plan } => {
            let (h, space, f) = min_metric_problem(&h, &problem)?;
            let plan = match plan {
                Some(p) => wire::parse_plan(&read(&p)?, space.labels())?,
                None => tc_norm(&space, &f)?.plan,
            };
            let report = check_plan_optimal_conditions(&h, &f, &plan)?;
            let mut out = wire::optimality_json(&report);
            out["plan"] = wire::plan_json(space.labels(), &plan);
            Ok(out)
        }
        SpecialOp::Bounds { h, problem } => {
            let (_, space, f) = min_metric_problem(&h, &problem)?;
            let tc = tc_norm(&space, &f)?.value;
            let l1 = f.l1_norm();
            let half = &l1 / rational::int(2);
            let holds = half <= tc && tc <= l1;
            check(json!({ "half_l1": rat(&half), "tc": rat(&tc), "l1": rat(&l1), "holds": holds }), holds)
        }
        SpecialOp::Subadditivity { h, x1, xp, overlap } => {
            let h = rationals(&h)?;
            guard(h.len())?;
            let space = make_min_metric(&h)?;
            let x1 = dense_problem(&x1, h.len())?;
            let xp = dense_problem(&xp, h.len())?;
            let report = if overlap {
                overlap_experiment(&h, &x1, &xp)?
            } else {
                strict_subadditivity_experiment(&h, &x1, &xp)?
            };
            Ok(wire::subadditivity_json(space.labels(), &report))
        }
        SpecialOp::Representing { n } => {
            let rep = representing_set_truncation(n)?;
            guard(rep.space.len())?;
            let valid = validate_metric(rep.space.labels(), rep.space.matrix())?.ok;
            check(json!({ "n": n, "valid": valid, "space": wire::metric_json(&rep.space) }), valid)
        }
        SpecialOp::Geodesic { n, subset, j } => {
            let rep = representing_set_truncation(n)?;
            let a = rep.subset(&subset)?;
            let holds = geodesic_identity_check(&rep, a, j)?;
            let d = |x: usize, y: usize| rat(rep.space.d(x, y));
            let sj = rep.singleton(j)?;
            check(
                json!({
                    "subset": rep.space.label(a),
                    "j": j,
                    "d_empty_j": d(0, sj),
                    "d_j_subset": d(sj, a),
                    "d_empty_subset": d(0, a),
                    "holds": holds,
                }),
                holds,
            )
        }
        SpecialOp::SignTest {
            space,
            vectors,
            representing,
        } => {
            let (space, xs) = match (space, vectors, representing) {
                (_, _, Some(n)) => {
                    let rep = representing_set_truncation(n)?;
                    guard(rep.space.len())?;
                    let xs = scaled_singletons(&rep, n)?;
                    (rep.space, xs)
                }
                (Some(s), Some(v), None) => {
                    let space = load_space(&s)?;
                    let xs = parse_vectors(&read(&v)?, space.labels())?;
                    (space, xs)
                }
                _ => return Err(Error::InvalidArgument("give --representing, or --space with --vectors".into()).into()),
            };
            let report = l1_basis_sign_test(&space, &xs)?;
            check(wire::sign_test_json(&report), report.holds)
        }
    }
}

fn parse_vectors(text: &str, labels: &[String]) -> Result<Vec<TransportProblem>, Error> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Malformed(format!("invalid JSON: {e}")))?;
    v.get("vectors")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Malformed("expected {\"vectors\": [...]}".into()))?
        .iter()
        .map(|x| wire::parse_problem(&x.to_string(), labels))
        .collect()
}

pub fn gen(kind: GenKind) -> Outcome {
    let space = match kind {
        GenKind::Cycle { n, weights } => {
            guard(n)?;
            let w = weights.as_deref().map(rationals).transpose()?;
            make_cycle(n, w.as_deref())?
        }
        GenKind::SymmetricCycle { half } => {
            guard(2 * half.len())?;
            make_symmetric_even_cycle(&rationals(&half)?)?
        }
        GenKind::TwoBlock { m, c } => {
            guard(2 * m)?;
            make_two_block(m, &rational::parse(&c)?)?
        }
        GenKind::MinMetric { h } => {
            guard(h.len())?;
            make_min_metric(&rationals(&h)?)?
        }
        GenKind::RealSubset { xs } => {
            guard(xs.len())?;
            make_real_subset(&rationals(&xs)?)?
        }
        GenKind::Equilateral { n } => {
            guard(n)?;
            make_equilateral(n)?
        }
        GenKind::Representing { n } => {
            let rep = representing_set_truncation(n)?;
            guard(rep.space.len())?;
            rep.space
        }
        GenKind::RandomMetric { n, seed } => {
            guard(n)?;
            random::random_metric(&mut random::rng(seed), n)?
        }
        GenKind::RandomTree { n, seed } => {
            guard(n)?;
            let tree: WeightedTree = random::random_tree(&mut random::rng(seed), n)?;
            return Ok(wire::tree_json(&tree));
        }
        GenKind::RandomProblem { space, seed } => {
            let space = load_space(&space)?;
            let f = random::random_problem(&mut random::rng(seed), space.len())?;
            return Ok(wire::problem_json(space.labels(), &f));
        }
    };
    Ok(wire::metric_json(&space))
}
