//! Instance data model: point sets, unit disk graphs, hop balls.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::rational::{sq_dist, Rational};

use num_traits::One;

/// Unordered edge, stored with `u < v`.
pub type Edge = (usize, usize);

pub fn edge(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Planar points with exact rational coordinates and optional positive
/// vertex weights.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    pub points: Vec<(Rational, Rational)>,
    pub weights: Option<Vec<Rational>>,
}

impl PointSet {
    pub fn new(points: Vec<(Rational, Rational)>) -> PointSet {
        PointSet { points, weights: None }
    }

    pub fn with_weights(points: Vec<(Rational, Rational)>, weights: Vec<Rational>) -> PointSet {
        assert_eq!(points.len(), weights.len());
        PointSet { points, weights: Some(weights) }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A graph with squared rational edge lengths. The metric algorithms touch
/// no geometry other than `sqlen`; adjacency-only graphs simply carry an
/// empty length map.
#[derive(Clone, Debug, PartialEq)]
pub struct UdgGraph {
    n: usize,
    adj: Vec<BTreeSet<usize>>,
    sqlen: BTreeMap<Edge, Rational>,
    pub weights: Option<Vec<Rational>>,
}

impl UdgGraph {
    pub fn empty(n: usize) -> UdgGraph {
        UdgGraph { n, adj: vec![BTreeSet::new(); n], sqlen: BTreeMap::new(), weights: None }
    }

    /// Adjacency-only construction.
    pub fn from_edges(n: usize, edges: &[Edge]) -> Result<UdgGraph> {
        let mut g = UdgGraph::empty(n);
        for &(u, v) in edges {
            g.check_vertex(u)?;
            g.check_vertex(v)?;
            if u == v {
                return Err(Error::InvalidInstance(format!("self loop at {u}")));
            }
            g.adj[u].insert(v);
            g.adj[v].insert(u);
        }
        Ok(g)
    }

    /// Construction with explicit squared lengths on every edge.
    pub fn from_edges_with_sqlen(n: usize, edges: &[(usize, usize, Rational)]) -> Result<UdgGraph> {
        let plain: Vec<Edge> = edges.iter().map(|&(u, v, _)| edge(u, v)).collect();
        let mut g = UdgGraph::from_edges(n, &plain)?;
        for (u, v, l) in edges {
            if l <= &Rational::from_integer(0.into()) {
                return Err(Error::InvalidInstance(format!(
                    "squared length on edge ({u},{v}) must be positive"
                )));
            }
            g.sqlen.insert(edge(*u, *v), l.clone());
        }
        Ok(g)
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::VertexOutOfRange(v, self.n))
        } else {
            Ok(())
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|s| s.len()).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].contains(&v)
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Squared length of an existing edge; `None` on non-edges or
    /// adjacency-only graphs.
    pub fn sqlen(&self, u: usize, v: usize) -> Option<&Rational> {
        self.sqlen.get(&edge(u, v))
    }

    /// True when every edge carries a squared length.
    pub fn has_lengths(&self) -> bool {
        self.sqlen.len() == self.edge_count()
    }

    pub fn sqlen_map(&self) -> &BTreeMap<Edge, Rational> {
        &self.sqlen
    }

    pub fn weight(&self, v: usize) -> Option<&Rational> {
        self.weights.as_ref().map(|w| &w[v])
    }

    /// Induced subgraph on `keep` (sorted). Returns the subgraph together
    /// with the mapping from new ids to original ids.
    pub fn induced(&self, keep: &BTreeSet<usize>) -> (UdgGraph, Vec<usize>) {
        let ids: Vec<usize> = keep.iter().copied().collect();
        let back: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut g = UdgGraph::empty(ids.len());
        for (i, &v) in ids.iter().enumerate() {
            for &u in self.adj[v].iter() {
                if let Some(&j) = back.get(&u) {
                    if j > i {
                        g.adj[i].insert(j);
                        g.adj[j].insert(i);
                        if let Some(l) = self.sqlen.get(&edge(v, u)) {
                            g.sqlen.insert((i, j), l.clone());
                        }
                    }
                }
            }
        }
        g.weights = self
            .weights
            .as_ref()
            .map(|w| ids.iter().map(|&v| w[v].clone()).collect());
        (g, ids)
    }

    /// Hop ball `B_r(v)`: all vertices within `r` edges of `v`, restricted to
    /// `alive` when provided. `ball(v, 0) = {v}`.
    pub fn ball(&self, v: usize, r: usize) -> BTreeSet<usize> {
        self.ball_filtered(v, r, None)
    }

    pub fn ball_filtered(
        &self,
        v: usize,
        r: usize,
        alive: Option<&BTreeSet<usize>>,
    ) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        if let Some(a) = alive {
            if !a.contains(&v) {
                return seen;
            }
        }
        seen.insert(v);
        queue.push_back((v, 0usize));
        while let Some((u, d)) = queue.pop_front() {
            if d == r {
                continue;
            }
            for &w in self.adj[u].iter() {
                if seen.contains(&w) {
                    continue;
                }
                if let Some(a) = alive {
                    if !a.contains(&w) {
                        continue;
                    }
                }
                seen.insert(w);
                queue.push_back((w, d + 1));
            }
        }
        seen
    }

    /// Hop distances from `v` (BFS); `usize::MAX` marks unreachable vertices.
    pub fn distances(&self, v: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        dist[v] = 0;
        queue.push_back(v);
        while let Some(u) = queue.pop_front() {
            for &w in self.adj[u].iter() {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Bit-adjacency rows for combinatorial kernels; requires `n <= 64`.
    pub fn bit_adjacency(&self) -> Result<Vec<u64>> {
        if self.n > 64 {
            return Err(Error::BudgetExceeded { what: "bitset kernel vertex count", limit: 64 });
        }
        let mut rows = vec![0u64; self.n];
        for (u, v) in self.edges() {
            rows[u] |= 1 << v;
            rows[v] |= 1 << u;
        }
        Ok(rows)
    }
}

/// Build the unit disk graph of a point set: `{u,v}` is an edge exactly when
/// the squared distance is at most 1, decided by exact rational comparison.
///
/// Duplicate points are rejected: distance-zero pairs break every
/// separator-line argument downstream, so they are a documented input
/// restriction rather than a silent hazard.
pub fn build_udg(ps: &PointSet) -> Result<UdgGraph> {
    let n = ps.len();
    let one = Rational::one();
    let mut g = UdgGraph::empty(n);
    g.weights = ps.weights.clone();
    if let Some(w) = &ps.weights {
        if w.len() != n {
            return Err(Error::InvalidInstance(format!(
                "{} weights for {} points",
                w.len(),
                n
            )));
        }
        if let Some(i) = w.iter().position(|x| x <= &Rational::from_integer(0.into())) {
            return Err(Error::InvalidInstance(format!("weight of vertex {i} not positive")));
        }
    }
    for u in 0..n {
        for v in (u + 1)..n {
            let d2 = sq_dist(&ps.points[u], &ps.points[v]);
            if d2 == Rational::from_integer(0.into()) {
                return Err(Error::DuplicatePoints(u, v));
            }
            if d2 <= one {
                g.adj[u].insert(v);
                g.adj[v].insert(u);
                g.sqlen.insert((u, v), d2);
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn pt(x: Rational, y: Rational) -> (Rational, Rational) {
        (x, y)
    }

    #[test]
    fn unit_distance_is_an_edge() {
        let ps = PointSet::new(vec![pt(rat_int(0), rat_int(0)), pt(rat_int(1), rat_int(0))]);
        let g = build_udg(&ps).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.sqlen(0, 1), Some(&rat_int(1)));
    }

    #[test]
    fn distance_beyond_one_is_not_an_edge() {
        let ps = PointSet::new(vec![pt(rat_int(0), rat_int(0)), pt(rat(3, 2), rat_int(0))]);
        let g = build_udg(&ps).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn three_point_path_from_rational_coordinates() {
        let ps = PointSet::new(vec![
            pt(rat_int(0), rat_int(0)),
            pt(rat(3, 5), rat(4, 5)),
            pt(rat(6, 5), rat_int(0)),
        ]);
        let g = build_udg(&ps).unwrap();
        assert!(g.has_edge(0, 1));
        assert!(g.has_edge(1, 2));
        assert!(!g.has_edge(0, 2));
        assert_eq!(g.sqlen(0, 1), Some(&rat_int(1)));
        assert_eq!(g.sqlen(1, 2), Some(&rat_int(1)));
    }

    #[test]
    fn duplicate_points_rejected() {
        let ps = PointSet::new(vec![pt(rat_int(2), rat_int(3)), pt(rat_int(2), rat_int(3))]);
        assert!(matches!(build_udg(&ps), Err(Error::DuplicatePoints(0, 1))));
    }

    #[test]
    fn ball_zero_is_the_center() {
        let g = UdgGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.ball(0, 0), BTreeSet::from([0]));
        assert_eq!(g.ball(0, 1), BTreeSet::from([0, 1]));
    }

    #[test]
    fn ball_two_covers_five_cycle() {
        let g = UdgGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        for v in 0..5 {
            assert_eq!(g.ball(v, 2).len(), 5);
        }
    }
}
