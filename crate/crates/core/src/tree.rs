//! Weighted trees: closed-form transportation cost and double-point seminorm.
//!
//! Every problem on a rooted tree decomposes uniquely as `f = sum_e a_e f_e`
//! where `f_e = 1_w - 1_z` for the edge `e = (w, z)` with `w` the end closer
//! to the root. The transportation cost is then `sum_e d_e |a_e|`, and the
//! double-point seminorm is the largest `|P(f)|` over vertex-to-vertex paths.

use std::collections::{HashMap, VecDeque};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::rational::{self, Rational};
use crate::transport::TransportProblem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeEdge {
    pub parent: usize,
    pub child: usize,
    pub weight: Rational,
}

/// A rooted tree with positive edge weights. Edges are indexed in
/// breadth-first order from the root; `parent_edge[v]` is the index of the
/// edge joining `v` to its parent.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTree {
    labels: Vec<String>,
    root: usize,
    edges: Vec<TreeEdge>,
    parent_edge: Vec<Option<usize>>,
    depth: Vec<usize>,
    /// Vertices in breadth-first order from the root.
    order: Vec<usize>,
}

impl WeightedTree {
    /// Builds a tree from undirected weighted edges, oriented away from `root`.
    /// The given orientation of each edge is ignored.
    pub fn new(labels: Vec<String>, edges: &[(usize, usize, Rational)], root: usize) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidTree("a tree needs at least one node".into()));
        }
        let mut seen = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if seen.insert(l.as_str(), i).is_some() {
                return Err(Error::InvalidTree(format!("duplicate node label `{l}`")));
            }
        }
        if root >= n {
            return Err(Error::InvalidTree(format!("root index {root} out of range")));
        }
        if edges.len() + 1 != n {
            return Err(Error::InvalidTree(format!(
                "{} nodes need {} edges, got {}",
                n,
                n - 1,
                edges.len()
            )));
        }
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (k, (a, b, w)) in edges.iter().enumerate() {
            if *a >= n || *b >= n {
                return Err(Error::InvalidTree(format!("edge {k} references a missing node")));
            }
            if a == b {
                return Err(Error::InvalidTree(format!("edge {k} is a self-loop")));
            }
            if !w.is_positive() {
                return Err(Error::InvalidTree(format!("edge {k} has nonpositive weight {w}")));
            }
            adj[*a].push((*b, k));
            adj[*b].push((*a, k));
        }

        let mut parent_edge = vec![None; n];
        let mut depth = vec![0; n];
        let mut visited = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut oriented = Vec::with_capacity(n - 1);
        let mut queue = VecDeque::from([root]);
        visited[root] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &(v, k) in &adj[u] {
                if visited[v] {
                    continue;
                }
                visited[v] = true;
                depth[v] = depth[u] + 1;
                parent_edge[v] = Some(oriented.len());
                oriented.push(TreeEdge {
                    parent: u,
                    child: v,
                    weight: edges[k].2.clone(),
                });
                queue.push_back(v);
            }
        }
        if order.len() != n {
            return Err(Error::InvalidTree("the edges do not connect every node".into()));
        }
        Ok(Self {
            labels,
            root,
            edges: oriented,
            parent_edge,
            depth,
            order,
        })
    }

    /// Builds a tree from labeled edges. Nodes are numbered in order of first
    /// appearance; the root defaults to the lexicographically smallest label.
    pub fn from_labeled_edges(root: Option<&str>, edges: &[(String, String, Rational)]) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut intern = |l: &str| -> usize {
            if let Some(&i) = index.get(l) {
                return i;
            }
            labels.push(l.to_string());
            index.insert(l.to_string(), labels.len() - 1);
            labels.len() - 1
        };
        if let (Some(r), true) = (root, edges.is_empty()) {
            intern(r);
        }
        let idx_edges: Vec<(usize, usize, Rational)> = edges
            .iter()
            .map(|(a, b, w)| (intern(a), intern(b), w.clone()))
            .collect();
        let root_idx = match root {
            Some(r) => labels
                .iter()
                .position(|l| l == r)
                .ok_or_else(|| Error::UnknownLabel(r.to_string()))?,
            None => (0..labels.len())
                .min_by(|&a, &b| labels[a].cmp(&labels[b]))
                .ok_or_else(|| Error::InvalidTree("a tree needs at least one node".into()))?,
        };
        Self::new(labels, &idx_edges, root_idx)
    }

    /// The same tree re-rooted at `root`.
    pub fn rerooted(&self, root: usize) -> Result<Self> {
        let edges: Vec<(usize, usize, Rational)> = self
            .edges
            .iter()
            .map(|e| (e.parent, e.child, e.weight.clone()))
            .collect();
        Self::new(self.labels.clone(), &edges, root)
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

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    fn parent(&self, v: usize) -> Option<usize> {
        self.parent_edge[v].map(|e| self.edges[e].parent)
    }

    /// Edge indices on the path from `v` up to `ancestor`.
    fn edges_up_to(&self, mut v: usize, ancestor: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while v != ancestor {
            let e = self.parent_edge[v].expect("ancestor lies above v");
            out.push(e);
            v = self.edges[e].parent;
        }
        out
    }

    fn meeting_vertex(&self, mut u: usize, mut v: usize) -> usize {
        while self.depth[u] > self.depth[v] {
            u = self.parent(u).expect("deeper vertex has a parent");
        }
        while self.depth[v] > self.depth[u] {
            v = self.parent(v).expect("deeper vertex has a parent");
        }
        while u != v {
            u = self.parent(u).expect("non-root vertex has a parent");
            v = self.parent(v).expect("non-root vertex has a parent");
        }
        u
    }

    fn check_problem(&self, f: &TransportProblem) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::Dimension(format!(
                "problem has {} values but the tree has {} nodes",
                f.len(),
                self.len()
            )));
        }
        Ok(())
    }

    /// `f_e = 1_parent - 1_child`
    pub fn edge_problem(&self, e: usize) -> TransportProblem {
        let edge = &self.edges[e];
        TransportProblem::unit_difference(self.len(), edge.parent, edge.child)
    }
}

/// Path-length metric on the nodes of the tree.
pub fn tree_metric(tree: &WeightedTree) -> Result<FiniteMetricSpace> {
    let n = tree.len();
    let mut dist = vec![vec![Rational::zero(); n]; n];
    for s in 0..n {
        // walk outward from s over the undirected tree
        let mut stack = vec![(s, usize::MAX)];
        while let Some((u, from)) = stack.pop() {
            for e in &tree.edges {
                let next = if e.parent == u {
                    e.child
                } else if e.child == u {
                    e.parent
                } else {
                    continue;
                };
                if next == from {
                    continue;
                }
                dist[s][next] = &dist[s][u] + &e.weight;
                stack.push((next, u));
            }
        }
    }
    FiniteMetricSpace::new(tree.labels.clone(), dist)
}

/// Coefficients `a_e` of `f = sum_e a_e f_e`, indexed like [`WeightedTree::edges`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeCoefficients {
    pub coefficients: Vec<Rational>,
}

impl EdgeCoefficients {
    /// `sum_e a_e f_e`
    pub fn reconstruct(&self, tree: &WeightedTree) -> TransportProblem {
        self.coefficients
            .iter()
            .enumerate()
            .fold(TransportProblem::zero(tree.len()), |acc, (e, a)| {
                &acc + &tree.edge_problem(e).scale(a)
            })
    }
}

/// `a_e = -(sum of f over the subtree below e)`.
pub fn edge_coefficients(tree: &WeightedTree, f: &TransportProblem) -> Result<EdgeCoefficients> {
    tree.check_problem(f)?;
    let mut subtree: Vec<Rational> = f.values().to_vec();
    let mut coefficients = vec![Rational::zero(); tree.edges.len()];
    for &v in tree.order.iter().rev() {
        if let Some(e) = tree.parent_edge[v] {
            coefficients[e] = -subtree[v].clone();
            let p = tree.edges[e].parent;
            let sv = subtree[v].clone();
            subtree[p] += sv;
        }
    }
    let ec = EdgeCoefficients { coefficients };
    if ec.reconstruct(tree) != *f {
        return Err(Error::Invariant("edge decomposition does not reconstruct f".into()));
    }
    Ok(ec)
}

/// `sum_e d_e |a_e|`
pub fn tree_tc_norm(tree: &WeightedTree, f: &TransportProblem) -> Result<Rational> {
    let a = edge_coefficients(tree, f)?;
    Ok(tree
        .edges
        .iter()
        .zip(&a.coefficients)
        .fold(Rational::zero(), |acc, (e, a)| acc + &e.weight * a.abs()))
}

/// `s_g = sum of d_e a_e over the edges from the root down to g, inclusive`,
/// indexed by edge.
pub fn d_map(tree: &WeightedTree, f: &TransportProblem) -> Result<Vec<Rational>> {
    let a = edge_coefficients(tree, f)?;
    let mut s = vec![Rational::zero(); tree.edges.len()];
    for &v in &tree.order {
        if let Some(e) = tree.parent_edge[v] {
            let above = tree.parent_edge[tree.edges[e].parent]
                .map(|pe| s[pe].clone())
                .unwrap_or_else(Rational::zero);
            s[e] = above + &tree.edges[e].weight * &a.coefficients[e];
        }
    }
    Ok(s)
}

/// `max over vertex pairs (u, v) of |P(f)|` where the `u`-`v` path is split
/// at its highest vertex into the upward part `P1` and downward part `P2`,
/// and `P(f) = sum_{P1} d_e a_e - sum_{P2} d_e a_e`.
pub fn tree_dp_norm(tree: &WeightedTree, f: &TransportProblem) -> Result<Rational> {
    let a = edge_coefficients(tree, f)?;
    let weighted: Vec<Rational> = tree
        .edges
        .iter()
        .zip(&a.coefficients)
        .map(|(e, a)| &e.weight * a)
        .collect();
    let n = tree.len();
    let mut best = Rational::zero();
    for u in 0..n {
        for v in u + 1..n {
            let top = tree.meeting_vertex(u, v);
            let up = rational::sum(tree.edges_up_to(u, top).iter().map(|&e| &weighted[e]));
            let down = rational::sum(tree.edges_up_to(v, top).iter().map(|&e| &weighted[e]));
            best = best.max((up - down).abs());
        }
    }
    Ok(best)
}

/// The two sides of `||f||_DP / 4 <= ||Df||_inf <= ||f||_DP`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sandwich {
    pub root: usize,
    pub dp_norm: Rational,
    pub d_sup: Rational,
}

impl Sandwich {
    pub fn holds(&self) -> bool {
        &self.dp_norm * rational::ratio(1, 4) <= self.d_sup && self.d_sup <= self.dp_norm
    }
}

pub fn check_bm_sandwich(tree: &WeightedTree, f: &TransportProblem) -> Result<Sandwich> {
    let dp_norm = tree_dp_norm(tree, f)?;
    let d_sup = d_map(tree, f)?
        .iter()
        .map(Signed::abs)
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(Sandwich {
        root: tree.root,
        dp_norm,
        d_sup,
    })
}
