//! Clique partitions and their validation.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::graph::UdgGraph;
use crate::rational::Rational;

/// Disjoint vertex blocks covering `V`, each inducing a complete subgraph.
///
/// Canonical form: every block sorted ascending, blocks ordered by their
/// smallest vertex. All library algorithms return canonical partitions so
/// equal partitions compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliquePartition {
    pub blocks: Vec<Vec<usize>>,
}

impl CliquePartition {
    pub fn new(mut blocks: Vec<Vec<usize>>) -> CliquePartition {
        blocks.retain(|b| !b.is_empty());
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.sort();
        CliquePartition { blocks }
    }

    pub fn singletons(n: usize) -> CliquePartition {
        CliquePartition { blocks: (0..n).map(|v| vec![v]).collect() }
    }

    pub fn size(&self) -> usize {
        self.blocks.len()
    }

    /// Union of two partitions over disjoint vertex sets.
    pub fn union(mut self, other: CliquePartition) -> CliquePartition {
        self.blocks.extend(other.blocks);
        CliquePartition::new(self.blocks)
    }

    /// Total weighted cost: sum over blocks of the heaviest vertex.
    pub fn weighted_cost(&self, weights: &[Rational]) -> Rational {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&v| weights[v].clone()).max().unwrap_or_else(Rational::zero))
            .sum()
    }

    /// Relabel block contents through `ids` (new id -> original id).
    pub fn relabel(&self, ids: &[usize]) -> CliquePartition {
        CliquePartition::new(
            self.blocks.iter().map(|b| b.iter().map(|&v| ids[v]).collect()).collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    MissingVertex(usize),
    DuplicateVertex(usize),
    NonEdge { u: usize, v: usize, block: usize },
    InvalidVertex(usize),
    EmptyBlock(usize),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::MissingVertex(v) => write!(f, "vertex {v} not covered by any block"),
            Violation::DuplicateVertex(v) => write!(f, "vertex {v} appears in more than one block"),
            Violation::NonEdge { u, v, block } => {
                write!(f, "non-edge ({u},{v}) inside block {block}")
            }
            Violation::InvalidVertex(v) => write!(f, "vertex {v} out of range"),
            Violation::EmptyBlock(i) => write!(f, "block {i} is empty"),
        }
    }
}

/// Outcome of `validate_partition`: `valid` holds exactly when `violations`
/// is empty.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
    pub size: usize,
    pub weighted_cost: Option<Rational>,
}

/// Check disjointness, coverage and cliqueness of `p` against `g`, and
/// compute size plus (when weights are present) the weighted cost.
pub fn validate_partition(g: &UdgGraph, p: &CliquePartition) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for (bi, block) in p.blocks.iter().enumerate() {
        if block.is_empty() {
            violations.push(Violation::EmptyBlock(bi));
        }
        for &v in block {
            if v >= g.n() {
                violations.push(Violation::InvalidVertex(v));
                continue;
            }
            if !seen.insert(v) {
                violations.push(Violation::DuplicateVertex(v));
            }
        }
        for (i, &u) in block.iter().enumerate() {
            for &v in block.iter().skip(i + 1) {
                if u == v || u >= g.n() || v >= g.n() {
                    continue;
                }
                if !g.has_edge(u, v) {
                    violations.push(Violation::NonEdge { u, v, block: bi });
                }
            }
        }
    }
    for v in 0..g.n() {
        if !seen.contains(&v) {
            violations.push(Violation::MissingVertex(v));
        }
    }
    let weighted_cost = g.weights.as_ref().map(|w| p.weighted_cost(w));
    ValidationReport { valid: violations.is_empty(), violations, size: p.size(), weighted_cost }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::UdgGraph;
    use crate::rational::rat_int;

    #[test]
    fn path_partition_valid() {
        let g = UdgGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let p = CliquePartition::new(vec![vec![0, 1], vec![2]]);
        let r = validate_partition(&g, &p);
        assert!(r.valid);
        assert_eq!(r.size, 2);
    }

    #[test]
    fn non_edge_inside_block_detected() {
        let g = UdgGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let p = CliquePartition::new(vec![vec![0, 2], vec![1]]);
        let r = validate_partition(&g, &p);
        assert!(!r.valid);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NonEdge { u: 0, v: 2, .. })));
    }

    #[test]
    fn weighted_cost_takes_heaviest_vertex() {
        let mut g = UdgGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        g.weights = Some(vec![rat_int(5), rat_int(3), rat_int(1)]);
        let p = CliquePartition::new(vec![vec![0, 1, 2]]);
        let r = validate_partition(&g, &p);
        assert!(r.valid);
        assert_eq!(r.weighted_cost, Some(rat_int(5)));
    }

    #[test]
    fn missing_and_duplicate_vertices_detected() {
        let g = UdgGraph::from_edges(2, &[(0, 1)]).unwrap();
        let p = CliquePartition::new(vec![vec![0], vec![0]]);
        let r = validate_partition(&g, &p);
        assert!(!r.valid);
        assert!(r.violations.iter().any(|v| matches!(v, Violation::DuplicateVertex(0))));
        assert!(r.violations.iter().any(|v| matches!(v, Violation::MissingVertex(1))));
    }
}
