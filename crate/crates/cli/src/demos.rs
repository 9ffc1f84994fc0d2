//! Named, deterministic scenarios that check themselves.

use rand::seq::{index::sample, SliceRandom};
use rand::Rng;
use serde_json::{json, Map, Value};

use tcspace_core::metric::{
    make_cycle, make_equilateral, make_min_metric, make_real_subset, make_symmetric_even_cycle, make_two_block,
    two_block_inner_distance, validate_metric,
};
use tcspace_core::min_condition::{check_min_condition, infimum_demo_equilateral, smallest_seminorm_witness};
use tcspace_core::random::{random_min_profile, random_problem, random_problem_on, random_real_subset, random_tree, rng};
use tcspace_core::rational::{self, Rational};
use tcspace_core::seminorm::{
    alternating_quadruple, check_condition_a, check_condition_b, dp_family, dp_kernel, k_seminorm,
    verify_quadruple_kernel,
};
use tcspace_core::special::{
    fast_tc_min_metric, first_support_above_median, geodesic_identity_check, l1_basis_sign_test, l1_bounds_check,
    median_split, overlap_experiment, representing_set_truncation, scaled_singletons,
    strict_subadditivity_experiment,
};
use tcspace_core::transport::tc_norm;
use tcspace_core::tree::{check_bm_sandwich, tree_dp_norm, tree_metric, tree_tc_norm};
use tcspace_core::wire::{self, rat};
use tcspace_core::{Error, TransportProblem};

use crate::{Failure, Outcome};

pub const DEFAULT_SEED: u64 = 20170101;

pub const NAMES: [&str; 8] = [
    "equilateral_infimum",
    "four_cycle_kernel",
    "median_fast_path",
    "min_condition_gallery",
    "representing_set",
    "strict_subadditivity",
    "tree_sandwich",
    "two_block_kernel",
];

type DemoResult = Result<Report, Error>;

#[derive(Default)]
struct Report {
    checks: Vec<(String, bool)>,
    details: Map<String, Value>,
}

impl Report {
    fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push((name.into(), ok));
    }

    fn detail(&mut self, key: &str, v: Value) {
        self.details.insert(key.to_string(), v);
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    fn into_json(self, name: &str) -> Value {
        let passed = self.passed();
        let checks: Vec<Value> = self
            .checks
            .into_iter()
            .map(|(n, ok)| json!({ "name": n, "passed": ok }))
            .collect();
        let mut out = json!({ "demo": name, "passed": passed, "checks": checks });
        for (k, v) in self.details {
            out[k] = v;
        }
        out
    }
}

fn dispatch(name: &str, seed: u64) -> Option<DemoResult> {
    Some(match name {
        "four_cycle_kernel" => four_cycle_kernel(),
        "two_block_kernel" => two_block_kernel(),
        "equilateral_infimum" => equilateral_infimum(),
        "min_condition_gallery" => min_condition_gallery(seed),
        "tree_sandwich" => tree_sandwich(seed),
        "median_fast_path" => median_fast_path(seed),
        "strict_subadditivity" => strict_subadditivity(seed),
        "representing_set" => representing_set(),
        _ => return None,
    })
}

pub fn run(name: &str, seed: u64) -> Outcome {
    let result = dispatch(name, seed).ok_or_else(|| {
        Error::InvalidArgument(format!("unknown demo `{name}`; known demos: {}", NAMES.join(", ")))
    })?;
    let report = result?;
    let passed = report.passed();
    let v = report.into_json(name);
    if passed {
        Ok(v)
    } else {
        Err(Failure::Assertion(v))
    }
}

pub fn run_all(seed: u64) -> Outcome {
    let mut all_passed = true;
    let mut results = Vec::new();
    for name in NAMES {
        let report = dispatch(name, seed).expect("registered demo")?;
        all_passed &= report.passed();
        results.push(report.into_json(name));
    }
    let v = json!({ "passed": all_passed, "demos": results });
    if all_passed {
        Ok(v)
    } else {
        Err(Failure::Assertion(v))
    }
}

fn four_cycle_kernel() -> DemoResult {
    let mut r = Report::default();
    let c4 = make_cycle(4, None)?;
    let kernel = dp_kernel(&c4)?;
    let alt = alternating_quadruple(4, [0, 1, 2, 3]);
    let dp = k_seminorm(&c4, &dp_family(&c4), &alt)?.value;
    r.check("kernel is nontrivial", kernel.dimension() >= 1);
    r.check("(1,-1,1,-1) lies in the kernel", kernel.contains(&alt));
    r.check("double-point seminorm is 0", dp == rational::zero());
    r.check("quadruple condition holds", verify_quadruple_kernel(&c4, [0, 1, 2, 3])?);
    r.check("tc norm is positive", tc_norm(&c4, &alt)?.value > rational::zero());
    r.detail("kernel_vector", wire::problem_json(c4.labels(), &alt));
    r.detail("dp_seminorm", rat(&dp));
    r.detail("tc_norm", rat(&tc_norm(&c4, &alt)?.value));
    r.detail("kernel", wire::kernel_json(c4.labels(), &kernel));
    Ok(r)
}

fn two_block_kernel() -> DemoResult {
    let mut r = Report::default();
    let mut rows = Vec::new();
    for m in 2..=5 {
        let c = rational::one();
        let space = make_two_block(m, &c)?;
        let values: Vec<Rational> = (0..2 * m)
            .map(|i| if i < m { rational::one() } else { -rational::one() })
            .collect();
        let f = TransportProblem::new(values)?;
        let kernel = dp_kernel(&space)?;
        let dp = k_seminorm(&space, &dp_family(&space), &f)?.value;
        r.check(format!("m = {m}: 1_A - 1_B in the kernel"), kernel.contains(&f));
        r.check(format!("m = {m}: double-point seminorm is 0"), dp == rational::zero());
        rows.push(json!({
            "m": m,
            "inner_distance": rat(&two_block_inner_distance(m, &c)),
            "kernel_dimension": kernel.dimension(),
            "dp_seminorm": rat(&dp),
            "tc_norm": rat(&tc_norm(&space, &f)?.value),
        }));
    }
    r.detail("spaces", Value::Array(rows));
    Ok(r)
}

fn equilateral_infimum() -> DemoResult {
    let mut r = Report::default();
    let d = infimum_demo_equilateral()?;
    let (one, three) = (rational::one(), rational::int(3));
    r.check("both families satisfy A and B", d.families_admissible);
    r.check("||2a - b - c||_K2 = 1", d.first == one);
    r.check("||a + b - 2c||_K1 = 1", d.second == one);
    r.check("||3(a - c)|| = 3 under both families", d.sum_k1 == three && d.sum_k2 == three);
    r.check("3 > 1 + 1", d.subadditivity_fails());
    r.detail("values", wire::infimum_json(&d));
    Ok(r)
}

fn min_condition_gallery(seed: u64) -> DemoResult {
    let mut r = Report::default();
    let mut g = rng(seed);
    let mut real_ok = true;
    for _ in 0..50 {
        let n = g.gen_range(2..=9);
        let space = make_real_subset(&random_real_subset(&mut g, n)?)?;
        let v = check_min_condition(&space)?;
        real_ok &= v.holds && v.outcome.pairs() == [(0, n - 1)];
    }
    r.check("50 real subsets: holds with the single pair {min, max}", real_ok);

    let mut cycles = Vec::new();
    for half in [2usize, 3, 4] {
        let weights: Vec<Rational> = (0..half)
            .map(|_| rational::ratio(g.gen_range(1..=9), g.gen_range(1..=3)))
            .collect();
        let space = make_symmetric_even_cycle(&weights)?;
        let v = check_min_condition(&space)?;
        let antipodal: Vec<(usize, usize)> = (0..half).map(|i| (i, i + half)).collect();
        r.check(
            format!("symmetric cycle of length {}: antipodal pairs", 2 * half),
            v.holds && v.outcome.pairs() == antipodal,
        );
        cycles.push(wire::verdict_json(&space, &v));
    }
    r.detail("cycles", Value::Array(cycles));

    let mut witnesses = Vec::new();
    for n in 3..=5 {
        let space = make_equilateral(n)?;
        let v = check_min_condition(&space)?;
        r.check(format!("equilateral {n}: fails"), !v.holds);
        let w = smallest_seminorm_witness(&space)?;
        let admissible = [&w.k, &w.k_tilde].iter().try_fold(true, |acc, fam| {
            Ok::<_, Error>(acc && check_condition_a(&space, fam)?.holds && check_condition_b(&space, fam)?.holds)
        })?;
        r.check(format!("equilateral {n}: witness families satisfy A and B"), admissible);
        r.check(format!("equilateral {n}: strict gap"), w.value_k_tilde < w.value_k);
        witnesses.push(wire::witness_json(&space, &w));
    }
    r.detail("witnesses", Value::Array(witnesses));
    Ok(r)
}

fn tree_sandwich(seed: u64) -> DemoResult {
    let mut r = Report::default();
    let mut g = rng(seed);
    let (mut iso, mut path) = (true, true);
    for _ in 0..100 {
        let n = g.gen_range(2..=12);
        let tree = random_tree(&mut g, n)?;
        let f = random_problem(&mut g, n)?;
        let space = tree_metric(&tree)?;
        iso &= tree_tc_norm(&tree, &f)? == tc_norm(&space, &f)?.value;
        path &= tree_dp_norm(&tree, &f)? == k_seminorm(&space, &dp_family(&space), &f)?.value;
    }
    r.check("100 trees: edge formula equals the solver", iso);
    r.check("100 trees: path formula equals the double-point family", path);
    let mut sandwich = true;
    let mut tightest: Option<Rational> = None;
    for _ in 0..500 {
        let n = g.gen_range(2..=12);
        let tree = random_tree(&mut g, n)?;
        let f = random_problem(&mut g, n)?;
        let root = g.gen_range(0..n);
        let s = check_bm_sandwich(&tree.rerooted(root)?, &f)?;
        sandwich &= s.holds();
        if s.dp_norm > rational::zero() {
            let ratio = &s.d_sup / &s.dp_norm;
            tightest = Some(tightest.map_or(ratio.clone(), |t| t.min(ratio)));
        }
    }
    r.check("500 trees: dp/4 <= sup |Df| <= dp", sandwich);
    r.detail("smallest_ratio", tightest.as_ref().map_or(Value::Null, rat));
    Ok(r)
}

fn median_fast_path(seed: u64) -> DemoResult {
    let mut r = Report::default();
    let mut g = rng(seed);
    let (mut fast_ok, mut split_ok, mut bounds_ok) = (true, true, true);
    for _ in 0..300 {
        let n = g.gen_range(1..=10);
        let h = random_min_profile(&mut g, n)?;
        let f = random_problem(&mut g, n)?;
        let space = make_min_metric(&h)?;
        fast_ok &= fast_tc_min_metric(&h, &f)? == tc_norm(&space, &f)?.value;
        if !f.is_zero() {
            // median_split refuses to return a split violating its invariants
            split_ok &= median_split(&h, &f).is_ok();
        }
        bounds_ok &= l1_bounds_check(&h, &f)?;
    }
    r.check("300 instances: closed form equals the solver", fast_ok);
    r.check("300 instances: b + e = f with equal halves", split_ok);
    r.check("300 instances: l1 bounds", bounds_ok);
    let h = [rational::ratio(5, 4), rational::ratio(3, 2), rational::ratio(7, 4)];
    let f = TransportProblem::from_integers(&[1, 1, -2])?;
    let example = fast_tc_min_metric(&h, &f)?;
    r.check("worked example costs 11/4", example == rational::ratio(11, 4));
    let space = make_min_metric(&h)?;
    r.detail("example", json!({
        "h": h.iter().map(rat).collect::<Vec<_>>(),
        "f": wire::problem_json(space.labels(), &f),
        "split": wire::median_json(space.labels(), &median_split(&h, &f)?),
        "cost": rat(&example),
    }));
    Ok(r)
}

fn strict_subadditivity(seed: u64) -> DemoResult {
    let mut r = Report::default();
    let mut g = rng(seed);
    let mut smallest_gap: Option<Rational> = None;
    let mut all = true;
    let mut done = 0;
    while done < 100 {
        let n = g.gen_range(4..=10);
        let h = random_min_profile(&mut g, n)?;
        let size = g.gen_range(2..=(n - 2).min(4));
        let mut pts = sample(&mut g, n - 2, size).into_vec();
        pts.sort_unstable();
        let x1 = random_problem_on(&mut g, n, &pts)?;
        let k = first_support_above_median(&h, &x1)?;
        let free: Vec<usize> = (k + 1..n).filter(|i| !pts.contains(i)).collect();
        if free.len() < 2 {
            continue;
        }
        let take = g.gen_range(2..=free.len());
        let mut chosen: Vec<usize> = free.choose_multiple(&mut g, take).copied().collect();
        chosen.sort_unstable();
        let xp = random_problem_on(&mut g, n, &chosen)?;
        let rep = strict_subadditivity_experiment(&h, &x1, &xp)?;
        all &= rep.gap > rational::zero();
        smallest_gap = Some(smallest_gap.map_or(rep.gap.clone(), |s| s.min(rep.gap)));
        done += 1;
    }
    r.check("100 separated pairs: strict inequality", all);
    let mut overlap_ok = true;
    for _ in 0..100 {
        let n = g.gen_range(3..=10);
        let h = random_min_profile(&mut g, n)?;
        let x = random_problem(&mut g, n)?;
        let x = if x.is_zero() { TransportProblem::unit_difference(n, 0, n - 1) } else { x };
        let support = x.support();
        let shared = *support.choose(&mut g).expect("nonzero problem");
        let others: Vec<usize> = (0..n).filter(|&i| i != shared).collect();
        let partner = *others.choose(&mut g).expect("at least three points");
        let mag = rational::ratio(g.gen_range(1..=6), g.gen_range(1..=3));
        let y = if x.get(shared) > &rational::zero() {
            TransportProblem::unit_difference(n, partner, shared).scale(&mag)
        } else {
            TransportProblem::unit_difference(n, shared, partner).scale(&mag)
        };
        let rep = overlap_experiment(&h, &x, &y)?;
        overlap_ok &= rep.lhs < rep.rhs;
    }
    r.check("100 overlapping pairs: strict inequality", overlap_ok);
    let h: Vec<Rational> = (0..6).map(|i| rational::ratio(10 + i, 8)).collect();
    let example = strict_subadditivity_experiment(
        &h,
        &TransportProblem::unit_difference(6, 0, 1),
        &TransportProblem::unit_difference(6, 3, 4),
    )?;
    let space = make_min_metric(&h)?;
    r.detail("smallest_gap", smallest_gap.as_ref().map_or(Value::Null, rat));
    r.detail("example", wire::subadditivity_json(space.labels(), &example));
    Ok(r)
}

fn representing_set() -> DemoResult {
    let mut r = Report::default();
    let mut rows = Vec::new();
    for n in 1..=5 {
        let rep = representing_set_truncation(n)?;
        let valid = validate_metric(rep.space.labels(), rep.space.matrix())?.ok;
        let mut identities = true;
        for a in 1..rep.space.len() {
            for j in (1..=n).filter(|j| a >> (j - 1) & 1 == 1) {
                identities &= geodesic_identity_check(&rep, a, j)?;
            }
        }
        r.check(format!("n = {n}: metric"), valid);
        r.check(format!("n = {n}: geodesic identities"), identities);
        let mut row = json!({ "n": n, "points": rep.space.len() });
        if n <= 4 {
            let test = l1_basis_sign_test(&rep.space, &scaled_singletons(&rep, n)?)?;
            r.check(format!("n = {n}: sign test"), test.holds);
            row["sign_test"] = wire::sign_test_json(&test);
        }
        rows.push(row);
    }
    r.detail("truncations", Value::Array(rows));
    Ok(r)
}
