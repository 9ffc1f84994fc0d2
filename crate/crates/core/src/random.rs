//! Seeded instance generators for sweeps and demos.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::metric::FiniteMetricSpace;
use crate::rational::{self, Rational};
use crate::transport::TransportProblem;
use crate::tree::WeightedTree;

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

fn positive_rational(rng: &mut impl Rng, max_num: i64, max_den: i64) -> Rational {
    rational::ratio(rng.gen_range(1..=max_num), rng.gen_range(1..=max_den))
}

fn point_labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Shortest-path closure of random positive edge weights on the complete
/// graph, so some triangle inequalities are tight and some strict.
pub fn random_metric(rng: &mut impl Rng, n: usize) -> Result<FiniteMetricSpace> {
    if n == 0 {
        return Err(invalid!("need at least one point"));
    }
    let mut d = vec![vec![rational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = positive_rational(rng, 12, 3);
            d[i][j] = w.clone();
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &d[i][k] + &d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    FiniteMetricSpace::new(point_labels("p", n), d)
}

/// A zero-sum problem with small rational values and random support.
pub fn random_problem(rng: &mut impl Rng, n: usize) -> Result<TransportProblem> {
    if n == 0 {
        return Err(invalid!("need at least one point"));
    }
    let mut values: Vec<Rational> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.25) {
                rational::zero()
            } else {
                rational::ratio(rng.gen_range(-6..=6), rng.gen_range(1..=3))
            }
        })
        .collect();
    let fix = rng.gen_range(0..n);
    let rest = values
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != fix)
        .fold(rational::zero(), |s, (_, x)| s + x);
    values[fix] = -rest;
    TransportProblem::new(values)
}

/// A zero-sum problem supported inside `points`, none of whose values vanish.
pub fn random_problem_on(rng: &mut impl Rng, n: usize, points: &[usize]) -> Result<TransportProblem> {
    if points.len() < 2 {
        return Err(invalid!("need at least two support points"));
    }
    loop {
        let mut values = vec![rational::zero(); n];
        let mut total = rational::zero();
        for &p in &points[1..] {
            let mag = positive_rational(rng, 6, 3);
            let x = if rng.gen_bool(0.5) { mag } else { -mag };
            total += &x;
            values[p] = x;
        }
        if total == rational::zero() {
            continue;
        }
        values[points[0]] = -total;
        return TransportProblem::new(values);
    }
}

/// Each node `i > 0` hangs from a uniformly chosen earlier node.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> Result<WeightedTree> {
    if n == 0 {
        return Err(invalid!("need at least one node"));
    }
    let edges: Vec<(usize, usize, Rational)> = (1..n)
        .map(|i| (rng.gen_range(0..i), i, positive_rational(rng, 9, 4)))
        .collect();
    WeightedTree::new(point_labels("t", n), &edges, 0)
}

/// Strictly increasing values in `(1, 2)` on a grid of step `1/64`.
pub fn random_min_profile(rng: &mut impl Rng, n: usize) -> Result<Vec<Rational>> {
    const DEN: usize = 64;
    if n == 0 || n >= DEN {
        return Err(invalid!("profile length must be in 1..{}", DEN));
    }
    let mut picks = sample(rng, DEN - 1, n).into_vec();
    picks.sort_unstable();
    Ok(picks
        .into_iter()
        .map(|k| rational::one() + rational::ratio(k as i64 + 1, DEN as i64))
        .collect())
}

/// Strictly increasing coordinates with random positive gaps.
pub fn random_real_subset(rng: &mut impl Rng, n: usize) -> Result<Vec<Rational>> {
    if n == 0 {
        return Err(invalid!("need at least one point"));
    }
    let mut x = rational::ratio(rng.gen_range(-10..=10), rng.gen_range(1..=3));
    let mut xs = Vec::with_capacity(n);
    for _ in 0..n {
        xs.push(x.clone());
        x += positive_rational(rng, 8, 3);
    }
    Ok(xs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{make_min_metric, make_real_subset, validate_metric};
    use crate::tree::tree_metric;

    #[test]
    fn generators_are_deterministic() {
        let a = random_metric(&mut rng(7), 6).unwrap();
        let b = random_metric(&mut rng(7), 6).unwrap();
        assert_eq!(a, b);
        let f = random_problem(&mut rng(3), 8).unwrap();
        assert_eq!(f, random_problem(&mut rng(3), 8).unwrap());
    }

    #[test]
    fn generated_instances_are_valid() {
        let mut r = rng(11);
        for n in 1..9 {
            let m = random_metric(&mut r, n).unwrap();
            assert!(validate_metric(m.labels(), m.matrix()).unwrap().ok);
            let t = random_tree(&mut r, n).unwrap();
            let tm = tree_metric(&t).unwrap();
            assert!(validate_metric(tm.labels(), tm.matrix()).unwrap().ok);
            make_min_metric(&random_min_profile(&mut r, n).unwrap()).unwrap();
            make_real_subset(&random_real_subset(&mut r, n).unwrap()).unwrap();
        }
        let f = random_problem_on(&mut r, 6, &[1, 3, 4]).unwrap();
        assert_eq!(f.support(), vec![1, 3, 4]);
    }
}
