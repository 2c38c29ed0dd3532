//! The sum graph `G^S_{n,i,j}` (edges `a ~ b` when `a + b ≡ i` or `≡ j`) and
//! the difference graph `G_{n,k}` (edges `a ~ a + k`), with a structural
//! classification.
//!
//! A set `A` avoids `i` and `j` in `A+A` exactly when it is independent in
//! the sum graph (a loop at `v`, from `2v ≡ i`, forbids `v` itself), and `k`
//! is missing from `A-A` exactly when `A` is independent in the difference
//! graph.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sets::ResidueSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    /// A Hamiltonian path whose two endpoints carry loops.
    PathWithEndLoops {
        ends: (usize, usize),
    },
    /// One cycle through all `n` vertices (a doubled edge counts as a 2-cycle).
    SingleCycle {
        length: usize,
    },
    /// `count >= 2` vertex-disjoint cycles of equal `length`.
    DisjointCycles {
        count: usize,
        length: usize,
    },
    Other,
}

/// An undirected multigraph on `{0, ..., n-1}`. Edges are stored as
/// `(min, max)`; loops are `(v, v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    kind: GraphKind,
}

impl PairGraph {
    fn new(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let kind = classify_edges(n, &edges);
        Self { n, edges, kind }
    }

    pub fn modulus(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn loops(&self) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|(a, b)| a == b)
            .map(|&(a, _)| a)
            .collect()
    }

    /// Graphviz rendering.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("graph {name} {{\n");
        for v in 0..self.n {
            out.push_str(&format!("  {v};\n"));
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!("  {a} -- {b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

fn check_modulus(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::ModulusTooSmall {
            n: n as u64,
            min: 2,
        });
    }
    Ok(())
}

pub fn build_sum_graph(n: usize, i: usize, j: usize) -> Result<PairGraph> {
    check_modulus(n)?;
    let (i, j) = (i % n, j % n);
    if i == j {
        return Err(Error::EqualTargets(i as u64));
    }
    let mut edges = Vec::with_capacity(n + 2);
    for target in [i, j] {
        for a in 0..n {
            let b = (target + n - a) % n;
            if a <= b {
                edges.push((a, b));
            }
        }
    }
    Ok(PairGraph::new(n, edges))
}

pub fn build_diff_graph(n: usize, k: usize) -> Result<PairGraph> {
    check_modulus(n)?;
    if k % n == 0 {
        return Err(Error::ZeroResidue {
            k: k as u64,
            n: n as u64,
        });
    }
    let edges = (0..n)
        .map(|a| {
            let b = (a + k) % n;
            (a.min(b), a.max(b))
        })
        .collect();
    Ok(PairGraph::new(n, edges))
}

pub fn classify(g: &PairGraph) -> GraphKind {
    classify_edges(g.n, &g.edges)
}

fn classify_edges(n: usize, edges: &[(usize, usize)]) -> GraphKind {
    let mut adjacency = vec![Vec::new(); n];
    let mut loops = Vec::new();
    for &(a, b) in edges {
        if a == b {
            loops.push(a);
        } else {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
    }
    let degree = |v: usize| adjacency[v].len();

    if loops.len() == 2 && loops[0] != loops[1] {
        let (u, w) = (loops[0].min(loops[1]), loops[0].max(loops[1]));
        let path_edges = edges.len() - 2;
        let degrees_ok = (0..n).all(|v| {
            if v == u || v == w {
                degree(v) == 1
            } else {
                degree(v) == 2
            }
        });
        if path_edges == n - 1 && degrees_ok && component_sizes(&adjacency).len() == 1 {
            return GraphKind::PathWithEndLoops { ends: (u, w) };
        }
        return GraphKind::Other;
    }

    if loops.is_empty() && (0..n).all(|v| degree(v) == 2) {
        let sizes = component_sizes(&adjacency);
        let length = sizes[0];
        if sizes.iter().all(|&s| s == length) {
            return if sizes.len() == 1 {
                GraphKind::SingleCycle { length }
            } else {
                GraphKind::DisjointCycles {
                    count: sizes.len(),
                    length,
                }
            };
        }
    }
    GraphKind::Other
}

fn component_sizes(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let mut seen = vec![false; adjacency.len()];
    let mut sizes = Vec::new();
    for start in 0..adjacency.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    sizes
}

/// True when no edge of `g` has both endpoints in `a` (so a looped vertex
/// may not be in `a`).
pub fn independence_event_holds(a: &ResidueSet, g: &PairGraph) -> Result<bool> {
    if a.modulus() != g.n {
        return Err(Error::Parameter(format!(
            "set modulus {} does not match graph modulus {}",
            a.modulus(),
            g.n
        )));
    }
    Ok(g.edges
        .iter()
        .all(|&(u, v)| !(a.contains(u) && a.contains(v))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_graph_seven_two_five() {
        let g = build_sum_graph(7, 2, 5).unwrap();
        assert_eq!(
            g.edges(),
            &[
                (0, 2),
                (1, 1),
                (3, 6),
                (4, 5),
                (0, 5),
                (1, 4),
                (2, 3),
                (6, 6)
            ]
        );
        assert_eq!(g.kind(), GraphKind::PathWithEndLoops { ends: (1, 6) });
        assert_eq!(g.loops(), vec![1, 6]);
    }

    #[test]
    fn sum_graph_five_zero_one() {
        let g = build_sum_graph(5, 0, 1).unwrap();
        assert!(matches!(g.kind(), GraphKind::PathWithEndLoops { .. }));
        assert_eq!(g.edges().len(), 6);
    }

    #[test]
    fn sum_graph_rejects_equal_targets() {
        assert_eq!(build_sum_graph(7, 2, 9), Err(Error::EqualTargets(2)));
    }

    #[test]
    fn diff_graph_seven_two() {
        let g = build_diff_graph(7, 2).unwrap();
        assert_eq!(g.kind(), GraphKind::SingleCycle { length: 7 });
        // Walk 0 -> 2 -> 4 -> 6 -> 1 -> 3 -> 5 -> 0.
        let mut walk = vec![0];
        for _ in 0..7 {
            walk.push((walk.last().unwrap() + 2) % 7);
        }
        assert_eq!(walk, vec![0, 2, 4, 6, 1, 3, 5, 0]);
        for w in walk.windows(2) {
            assert!(g.edges().contains(&(w[0].min(w[1]), w[0].max(w[1]))));
        }
    }

    #[test]
    fn diff_graph_composite() {
        assert_eq!(
            build_diff_graph(6, 2).unwrap().kind(),
            GraphKind::DisjointCycles {
                count: 2,
                length: 3
            }
        );
        assert_eq!(
            build_diff_graph(6, 3).unwrap().kind(),
            GraphKind::DisjointCycles {
                count: 3,
                length: 2
            }
        );
        assert!(build_diff_graph(6, 0).is_err());
    }

    #[test]
    fn independence_examples() {
        let sum = build_sum_graph(7, 2, 5).unwrap();
        let diff = build_diff_graph(7, 2).unwrap();
        let empty = ResidueSet::empty(7).unwrap();
        assert!(independence_event_holds(&empty, &sum).unwrap());
        let one = ResidueSet::from_members(7, [1]).unwrap();
        assert!(!independence_event_holds(&one, &sum).unwrap());
        let pair = ResidueSet::from_members(7, [0, 4]).unwrap();
        assert!(independence_event_holds(&pair, &diff).unwrap());
        let wrong = ResidueSet::empty(5).unwrap();
        assert!(independence_event_holds(&wrong, &diff).is_err());
    }

    #[test]
    fn dot_output_lists_edges() {
        let dot = build_diff_graph(3, 1).unwrap().to_dot("g");
        assert!(dot.starts_with("graph g {"));
        assert!(dot.contains("0 -- 1;"));
    }
}
