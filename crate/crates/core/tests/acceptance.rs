//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use tcspace_core::metric::{
    make_cycle, make_equilateral, make_min_metric, make_real_subset, make_symmetric_even_cycle, make_two_block,
    validate_metric,
};
use tcspace_core::min_condition::{check_min_condition, infimum_demo_equilateral, smallest_seminorm_witness};
use tcspace_core::random::{
    random_metric, random_min_profile, random_problem, random_problem_on, random_real_subset, random_tree, rng,
};
use tcspace_core::rational::{int, ratio};
use tcspace_core::seminorm::{
    anyx_frechet_check, check_condition_a, check_condition_b, dp_family, dp_kernel,
    frechet_family, k_seminorm,
};
use tcspace_core::special::{
    fast_tc_min_metric, first_support_above_median, geodesic_identity_check, l1_basis_sign_test, l1_bounds_check,
    median_split, overlap_experiment, representing_set_truncation, scaled_singletons,
    strict_subadditivity_experiment,
};
use tcspace_core::transport::{plan_cost, tc_norm, verify_certificate};
use tcspace_core::tree::{check_bm_sandwich, tree_dp_norm, tree_metric, tree_tc_norm};
use tcspace_core::{Rational, TransportProblem};

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn ok<T>(r: tcspace_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn duality_exactness() -> Outcome {
    let mut r = rng(1);
    for case in 0..200 {
        let n = r.gen_range(1..=12);
        let space = ok(random_metric(&mut r, n))?;
        let f = ok(random_problem(&mut r, n))?;
        let res = ok(tc_norm(&space, &f))?;
        let cost = ok(plan_cost(&space, &res.plan))?;
        let pairing = f.pair(&res.certificate.potential);
        ensure!(res.value == cost, "case {case}: value {} but plan cost {}", res.value, cost);
        ensure!(res.value == pairing, "case {case}: value {} but pairing {}", res.value, pairing);
        ensure!(
            ok(verify_certificate(&space, &f, &res.plan, &res.certificate))?,
            "case {case}: certificate rejected"
        );
    }
    Ok(())
}

fn canonical_embedding() -> Outcome {
    let mut r = rng(1);
    for case in 0..200 {
        let n = r.gen_range(1..=12);
        let space = ok(random_metric(&mut r, n))?;
        let _ = ok(random_problem(&mut r, n))?;
        for u in 0..n {
            for v in 0..n {
                let e = TransportProblem::unit_difference(n, u, v);
                let value = ok(tc_norm(&space, &e))?.value;
                ensure!(value == *space.d(u, v), "case {case}: tc(1_{u} - 1_{v}) = {value}");
            }
        }
    }
    Ok(())
}

fn tree_l1_isometry() -> Outcome {
    let mut r = rng(3);
    for case in 0..100 {
        let n = r.gen_range(1..=12);
        let tree = ok(random_tree(&mut r, n))?;
        let f = ok(random_problem(&mut r, n))?;
        let closed = ok(tree_tc_norm(&tree, &f))?;
        let solved = ok(tc_norm(&ok(tree_metric(&tree))?, &f))?.value;
        ensure!(closed == solved, "case {case}: closed form {closed}, solver {solved}");
    }
    Ok(())
}

fn tree_dp_formula() -> Outcome {
    let mut r = rng(4);
    for case in 0..100 {
        let n = r.gen_range(2..=12);
        let tree = ok(random_tree(&mut r, n))?;
        let f = ok(random_problem(&mut r, n))?;
        let space = ok(tree_metric(&tree))?;
        let path = ok(tree_dp_norm(&tree, &f))?;
        let family = ok(k_seminorm(&space, &dp_family(&space), &f))?.value;
        ensure!(path == family, "case {case}: path formula {path}, family {family}");
    }
    for case in 0..500 {
        let n = r.gen_range(2..=12);
        let tree = ok(random_tree(&mut r, n))?;
        let f = ok(random_problem(&mut r, n))?;
        let root = r.gen_range(0..n);
        let s = ok(check_bm_sandwich(&ok(tree.rerooted(root))?, &f))?;
        ensure!(s.holds(), "sandwich case {case}: dp {}, sup {}", s.dp_norm, s.d_sup);
    }
    Ok(())
}

fn dp_kernel_examples() -> Outcome {
    let c4 = ok(make_cycle(4, None))?;
    let kernel = ok(dp_kernel(&c4))?;
    ensure!(kernel.dimension() >= 1, "four-cycle kernel is trivial");
    let alt = ok(TransportProblem::from_integers(&[1, -1, 1, -1]))?;
    ensure!(kernel.contains(&alt), "(1,-1,1,-1) not in the kernel");
    let v = ok(k_seminorm(&c4, &dp_family(&c4), &alt))?.value;
    ensure!(v.is_zero(), "DP seminorm of (1,-1,1,-1) is {v}");
    for m in 2..=5 {
        let space = ok(make_two_block(m, &int(1)))?;
        let values: Vec<Rational> = (0..2 * m).map(|i| if i < m { int(1) } else { int(-1) }).collect();
        let f = ok(TransportProblem::new(values))?;
        let kernel = ok(dp_kernel(&space))?;
        ensure!(kernel.contains(&f), "m = {m}: 1_A - 1_B not in the kernel");
        let v = ok(k_seminorm(&space, &dp_family(&space), &f))?.value;
        ensure!(v.is_zero(), "m = {m}: DP seminorm of 1_A - 1_B is {v}");
    }
    Ok(())
}

fn median_fast_path() -> Outcome {
    let mut r = rng(6);
    for case in 0..300 {
        let n = r.gen_range(1..=10);
        let h = ok(random_min_profile(&mut r, n))?;
        let f = ok(random_problem(&mut r, n))?;
        let space = ok(make_min_metric(&h))?;
        let fast = ok(fast_tc_min_metric(&h, &f))?;
        let solved = ok(tc_norm(&space, &f))?.value;
        ensure!(fast == solved, "case {case}: fast {fast}, solver {solved}");
        if !f.is_zero() {
            let s = ok(median_split(&h, &f))?;
            let sum: Vec<Rational> = s.b.iter().zip(&s.e).map(|(x, y)| x + y).collect();
            let l1 = |v: &[Rational]| v.iter().fold(Rational::zero(), |a, x| a + x.abs());
            ensure!(sum == f.values(), "case {case}: b + e != f");
            ensure!(
                l1(&s.b) == s.half_mass && l1(&s.e) == s.half_mass && s.half_mass == f.l1_norm() / int(2),
                "case {case}: halves unequal"
            );
        }
        ensure!(ok(l1_bounds_check(&h, &f))?, "case {case}: l1 bounds fail");
    }
    Ok(())
}

fn strict_subadditivity() -> Outcome {
    let mut r = rng(7);
    let mut done = 0;
    while done < 100 {
        let n = r.gen_range(4..=10);
        let h = ok(random_min_profile(&mut r, n))?;
        let size = r.gen_range(2..=(n - 2).min(4));
        let mut pts: Vec<usize> = rand::seq::index::sample(&mut r, n - 2, size).into_vec();
        pts.sort_unstable();
        let x1 = ok(random_problem_on(&mut r, n, &pts))?;
        let k = ok(first_support_above_median(&h, &x1))?;
        let free: Vec<usize> = (k + 1..n).filter(|i| !pts.contains(i)).collect();
        if free.len() < 2 {
            continue;
        }
        let take = r.gen_range(2..=free.len());
        let mut chosen: Vec<usize> = free.choose_multiple(&mut r, take).copied().collect();
        chosen.sort_unstable();
        let xp = ok(random_problem_on(&mut r, n, &chosen))?;
        let rep = ok(strict_subadditivity_experiment(&h, &x1, &xp))?;
        ensure!(rep.gap.is_positive() && rep.lhs < rep.rhs, "pair {done}: gap {}", rep.gap);
        done += 1;
    }
    for case in 0..100 {
        let n = r.gen_range(3..=10);
        let h = ok(random_min_profile(&mut r, n))?;
        let x = ok(random_problem(&mut r, n))?;
        let x = if x.is_zero() { TransportProblem::unit_difference(n, 0, n - 1) } else { x };
        let shared = *x.support().choose(&mut r).expect("nonzero problem");
        let others: Vec<usize> = (0..n).filter(|&i| i != shared).collect();
        let partner = *others.choose(&mut r).expect("n >= 3");
        let mag = ratio(r.gen_range(1..=6), r.gen_range(1..=3));
        // y(shared) has the opposite sign of x(shared)
        let y = if x.get(shared).is_positive() {
            TransportProblem::unit_difference(n, partner, shared).scale(&mag)
        } else {
            TransportProblem::unit_difference(n, shared, partner).scale(&mag)
        };
        let rep = ok(overlap_experiment(&h, &x, &y))?;
        ensure!(rep.lhs < rep.rhs, "overlap case {case}: lhs {}, rhs {}", rep.lhs, rep.rhs);
    }
    Ok(())
}

fn min_condition_gallery() -> Outcome {
    let mut r = rng(8);
    for case in 0..50 {
        let n = r.gen_range(2..=9);
        let space = ok(make_real_subset(&ok(random_real_subset(&mut r, n))?))?;
        let v = ok(check_min_condition(&space))?;
        ensure!(v.holds, "real subset {case}: min-condition fails");
        ensure!(v.outcome.pairs() == [(0, n - 1)], "real subset {case}: pairs {:?}", v.outcome.pairs());
    }
    for half in [2usize, 3, 4] {
        for trial in 0..4 {
            let weights: Vec<Rational> = if trial == 0 {
                vec![int(1); half]
            } else {
                (0..half).map(|_| ratio(r.gen_range(1..=9), r.gen_range(1..=3))).collect()
            };
            let space = ok(make_symmetric_even_cycle(&weights))?;
            let v = ok(check_min_condition(&space))?;
            let antipodal: Vec<(usize, usize)> = (0..half).map(|i| (i, i + half)).collect();
            ensure!(v.holds, "cycle of length {}: min-condition fails", 2 * half);
            ensure!(
                v.outcome.pairs() == antipodal,
                "cycle of length {}: pairs {:?}",
                2 * half,
                v.outcome.pairs()
            );
        }
    }
    for n in 3..=5 {
        let space = ok(make_equilateral(n))?;
        let v = ok(check_min_condition(&space))?;
        ensure!(!v.holds, "equilateral {n}: min-condition holds");
        let w = ok(smallest_seminorm_witness(&space))?;
        for (name, fam) in [("K", &w.k), ("K~", &w.k_tilde)] {
            ensure!(ok(check_condition_a(&space, fam))?.holds, "equilateral {n}: {name} fails A");
            ensure!(ok(check_condition_b(&space, fam))?.holds, "equilateral {n}: {name} fails B");
        }
        let vk = ok(k_seminorm(&space, &w.k, &w.f))?.value;
        let vkt = ok(k_seminorm(&space, &w.k_tilde, &w.f))?.value;
        ensure!(vk == w.value_k && vkt == w.value_k_tilde, "equilateral {n}: reported values disagree");
        ensure!(vkt < vk, "equilateral {n}: {vkt} is not below {vk}");
    }
    Ok(())
}

fn infimum_demo() -> Outcome {
    let d = ok(infimum_demo_equilateral())?;
    ensure!(d.families_admissible, "families fail A or B");
    ensure!(d.first == int(1), "first value {}", d.first);
    ensure!(d.second == int(1), "second value {}", d.second);
    ensure!(d.sum_k1 == int(3) && d.sum_k2 == int(3), "sum values {} and {}", d.sum_k1, d.sum_k2);
    ensure!(d.subadditivity_fails(), "3 > 1 + 1 not reported");
    Ok(())
}

fn domination_chain() -> Outcome {
    let mut r = rng(10);
    for case in 0..300 {
        let n = r.gen_range(2..=10);
        let space = ok(random_metric(&mut r, n))?;
        let f = ok(random_problem(&mut r, n))?;
        let dp = ok(k_seminorm(&space, &dp_family(&space), &f))?.value;
        let fr = ok(k_seminorm(&space, &frechet_family(&space), &f))?.value;
        let tc = ok(tc_norm(&space, &f))?.value;
        ensure!(dp <= fr && fr <= tc, "case {case}: dp {dp}, frechet {fr}, tc {tc}");
        let base = r.gen_range(0..n);
        ensure!(ok(anyx_frechet_check(&space, base, &f))?.holds(), "case {case}: embedding check fails");
    }
    Ok(())
}

fn representing_set() -> Outcome {
    for n in 1..=5 {
        let rep = ok(representing_set_truncation(n))?;
        let report = ok(validate_metric(rep.space.labels(), rep.space.matrix()))?;
        ensure!(report.ok, "n = {n}: not a metric");
        for a in 1..rep.space.len() {
            for j in (1..=n).filter(|j| a >> (j - 1) & 1 == 1) {
                ensure!(ok(geodesic_identity_check(&rep, a, j))?, "n = {n}: identity fails at ({a}, {j})");
            }
        }
        if n <= 4 {
            let xs = ok(scaled_singletons(&rep, n))?;
            let t = ok(l1_basis_sign_test(&rep.space, &xs))?;
            ensure!(t.holds, "n = {n}: sign test fails at {:?}", t.counterexample);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("duality exactness", duality_exactness),
        ("canonical embedding isometry", canonical_embedding),
        ("tree l1 isometry", tree_l1_isometry),
        ("tree double-point path formula and sandwich", tree_dp_formula),
        ("double-point kernel", dp_kernel_examples),
        ("median fast path", median_fast_path),
        ("strict subadditivity", strict_subadditivity),
        ("min-condition gallery", min_condition_gallery),
        ("infimum demo", infimum_demo),
        ("domination chain", domination_chain),
        ("representing set", representing_set),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(()) => println!("PASS {:>2} {name}", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {e}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
