//! Exact brute-force solvers used as ground truth at desk scale.
//!
//! `exact_cover` minimizes partition size via branch-and-bound coloring of
//! the complement graph. `exact_cover_enum` is an independent set-partition
//! enumeration used to cross-check it on tiny graphs. `exact_cover_weighted`
//! minimizes the sum of per-block maximum weights.

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::UdgGraph;
use crate::partition::CliquePartition;
use crate::rational::Rational;

/// Hard limits for the exact solvers. Node counts rather than wall time so
/// that exceeding the budget is deterministic and replayable.
#[derive(Clone, Debug)]
pub struct OracleBudget {
    pub max_vertices: usize,
    pub max_nodes: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_vertices: 25, max_nodes: 200_000_000 }
    }
}

impl OracleBudget {
    pub fn with_vertices(max_vertices: usize) -> Self {
        OracleBudget { max_vertices, ..Default::default() }
    }
}

fn budget_check(n: usize, budget: &OracleBudget, what: &'static str) -> Result<()> {
    if n > budget.max_vertices || n > 64 {
        return Err(Error::BudgetExceeded { what, limit: budget.max_vertices.min(64) as u64 });
    }
    Ok(())
}

/// Greedy maximal independent set, lowest id first. Any independent set
/// lower-bounds the clique partition size.
fn greedy_independent(adj: &[u64], mut rem: u64) -> u64 {
    let mut take = 0u64;
    while rem != 0 {
        let v = rem.trailing_zeros() as usize;
        take |= 1 << v;
        rem &= !(adj[v] | (1 << v));
    }
    take
}

/// Exact maximum independent set size via branch and bound.
fn max_independent_set(adj: &[u64], rem: u64, best: &mut usize, size: usize, nodes: &mut u64) {
    *nodes += 1;
    let count = rem.count_ones() as usize;
    if size + count <= *best {
        return;
    }
    if rem == 0 {
        *best = (*best).max(size);
        return;
    }
    // Branch on a maximum-degree vertex within the remainder.
    let mut pick = usize::MAX;
    let mut pick_deg = 0usize;
    let mut m = rem;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        let d = (adj[v] & rem).count_ones() as usize;
        if pick == usize::MAX || d > pick_deg {
            pick = v;
            pick_deg = d;
        }
    }
    let v = pick;
    // Include v.
    max_independent_set(adj, rem & !(adj[v] | (1 << v)), best, size + 1, nodes);
    // Exclude v.
    max_independent_set(adj, rem & !(1 << v), best, size, nodes);
}

struct ColorSearch<'a> {
    /// Complement adjacency: coloring classes of this graph are cliques of G.
    co_adj: &'a [u64],
    n: usize,
    full: u64,
    best: usize,
    best_classes: Vec<u64>,
    nodes: u64,
    max_nodes: u64,
}

impl ColorSearch<'_> {
    /// DSATUR-style branch and bound for the chromatic number of the
    /// complement graph.
    fn run(&mut self, assigned: u64, classes: &mut Vec<u64>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::BudgetExceeded { what: "oracle color search", limit: self.max_nodes });
        }
        if classes.len() >= self.best {
            return Ok(());
        }
        if assigned == self.full {
            self.best = classes.len();
            self.best_classes = classes.clone();
            return Ok(());
        }
        // Pick the unassigned vertex with maximum saturation (distinct classes
        // it conflicts with), ties by complement degree then id.
        let mut pick = usize::MAX;
        let mut pick_key = (0usize, 0usize);
        for v in 0..self.n {
            if assigned & (1 << v) != 0 {
                continue;
            }
            let sat = classes.iter().filter(|&&c| self.co_adj[v] & c != 0).count();
            let deg = (self.co_adj[v] & !assigned).count_ones() as usize;
            if pick == usize::MAX || (sat, deg) > pick_key {
                pick = v;
                pick_key = (sat, deg);
            }
        }
        let v = pick;
        for i in 0..classes.len() {
            if self.co_adj[v] & classes[i] == 0 {
                classes[i] |= 1 << v;
                self.run(assigned | (1 << v), classes)?;
                classes[i] &= !(1 << v);
            }
        }
        if classes.len() + 1 < self.best {
            classes.push(1 << v);
            self.run(assigned | (1 << v), classes)?;
            classes.pop();
        }
        Ok(())
    }
}

/// Greedy clique partition of G used as the initial incumbent.
fn greedy_cover(adj: &[u64], n: usize) -> Vec<u64> {
    let mut rem: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut blocks = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse((adj[v].count_ones(), std::cmp::Reverse(v))));
    for &seed in &order {
        if rem & (1 << seed) == 0 {
            continue;
        }
        let mut clique = 1u64 << seed;
        let mut cand = adj[seed] & rem;
        while cand != 0 {
            // Extend with the candidate adjacent to the most other candidates.
            let mut bestv = usize::MAX;
            let mut bestd = 0usize;
            let mut m = cand;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                let d = (adj[v] & cand).count_ones() as usize;
                if bestv == usize::MAX || d > bestd {
                    bestv = v;
                    bestd = d;
                }
            }
            clique |= 1 << bestv;
            cand &= adj[bestv];
        }
        blocks.push(clique);
        rem &= !clique;
    }
    blocks
}

fn bits_to_partition(classes: &[u64]) -> CliquePartition {
    CliquePartition::new(
        classes
            .iter()
            .map(|&c| {
                let mut b = Vec::new();
                let mut m = c;
                while m != 0 {
                    let v = m.trailing_zeros() as usize;
                    m &= m - 1;
                    b.push(v);
                }
                b
            })
            .collect(),
    )
}

/// Minimum clique partition: exact chromatic number of the complement graph.
pub fn exact_cover(g: &UdgGraph, budget: &OracleBudget) -> Result<CliquePartition> {
    budget_check(g.n(), budget, "oracle exact cover")?;
    let n = g.n();
    if n == 0 {
        return Ok(CliquePartition::new(vec![]));
    }
    let adj = g.bit_adjacency()?;
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let co_adj: Vec<u64> = (0..n).map(|v| !adj[v] & full & !(1 << v)).collect();

    let greedy = greedy_cover(&adj, n);
    let mut lb = greedy_independent(&adj, full).count_ones() as usize;
    if lb < greedy.len() {
        let mut best_mis = lb;
        let mut nodes = 0u64;
        max_independent_set(&adj, full, &mut best_mis, 0, &mut nodes);
        lb = best_mis;
    }
    if lb == greedy.len() {
        return Ok(bits_to_partition(&greedy));
    }

    let mut search = ColorSearch {
        co_adj: &co_adj,
        n,
        full,
        best: greedy.len(),
        best_classes: greedy,
        nodes: 0,
        max_nodes: budget.max_nodes,
    };
    let mut classes = Vec::new();
    search.run(0, &mut classes)?;
    Ok(bits_to_partition(&search.best_classes))
}

/// Independent oracle for the oracle: direct enumeration over set
/// partitions, assigning each vertex to an existing clique block or a new
/// one. Exponential; intended for n <= 10 cross-checks.
pub fn exact_cover_enum(g: &UdgGraph) -> Result<CliquePartition> {
    if g.n() > 12 {
        return Err(Error::BudgetExceeded { what: "enumeration oracle", limit: 12 });
    }
    let n = g.n();
    let adj = g.bit_adjacency()?;
    let mut best: Option<Vec<u64>> = None;
    let mut blocks: Vec<u64> = Vec::new();
    fn rec(v: usize, n: usize, adj: &[u64], blocks: &mut Vec<u64>, best: &mut Option<Vec<u64>>) {
        if let Some(b) = best {
            if blocks.len() >= b.len() {
                return;
            }
        }
        if v == n {
            *best = Some(blocks.clone());
            return;
        }
        for i in 0..blocks.len() {
            if blocks[i] & !adj[v] == 0 {
                blocks[i] |= 1 << v;
                rec(v + 1, n, adj, blocks, best);
                blocks[i] &= !(1 << v);
            }
        }
        blocks.push(1 << v);
        rec(v + 1, n, adj, blocks, best);
        blocks.pop();
    }
    rec(0, n, &adj, &mut blocks, &mut best);
    Ok(bits_to_partition(&best.unwrap_or_default()))
}

struct WeightedSearch<'a> {
    adj: &'a [u64],
    weights: &'a [Rational],
    /// Vertices sorted by descending weight, ties by id.
    order: Vec<usize>,
    best_cost: Rational,
    best: Vec<u64>,
    memo: HashMap<u64, Rational>,
    nodes: u64,
    max_nodes: u64,
}

impl WeightedSearch<'_> {
    fn heaviest_remaining(&self, rem: u64) -> Option<usize> {
        self.order.iter().copied().find(|&v| rem & (1 << v) != 0)
    }

    fn run(&mut self, rem: u64, cost: Rational, blocks: &mut Vec<u64>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::BudgetExceeded { what: "weighted oracle", limit: self.max_nodes });
        }
        let Some(v) = self.heaviest_remaining(rem) else {
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best = blocks.clone();
            }
            return Ok(());
        };
        // Any completion of the remainder pays at least the heaviest
        // remaining weight once.
        if &cost + &self.weights[v] >= self.best_cost {
            return Ok(());
        }
        // memo holds proven lower bounds on the completion cost of a
        // remainder (see below).
        if let Some(known) = self.memo.get(&rem) {
            if &cost + known >= self.best_cost {
                return Ok(());
            }
        }
        // The block containing v costs exactly w(v): enumerate all cliques
        // containing v within the remainder, larger extensions first.
        let mut stack: Vec<(u64, u64)> = vec![(1u64 << v, self.adj[v] & rem)];
        let mut cliques: Vec<u64> = Vec::new();
        while let Some((clique, cand)) = stack.pop() {
            cliques.push(clique);
            let mut m = cand;
            while m != 0 {
                let u = m.trailing_zeros() as usize;
                m &= m - 1;
                // Canonical: only extend with vertices above the last added.
                let above = if u + 1 >= 64 { 0u64 } else { !((1u64 << (u + 1)) - 1) };
                stack.push((clique | (1 << u), cand & self.adj[u] & above));
            }
        }
        // Bigger cliques first so good incumbents appear early.
        cliques.sort_by_key(|c| std::cmp::Reverse(c.count_ones()));
        for clique in cliques {
            blocks.push(clique);
            let next_cost = &cost + &self.weights[v];
            self.run(rem & !clique, next_cost, blocks)?;
            blocks.pop();
        }
        // Every completion of `rem` strictly cheaper than best_cost - cost
        // would have been found above (no prune cuts such a path), so
        // best_cost - cost is a proven lower bound on the completion cost.
        let lb = &self.best_cost - &cost;
        match self.memo.entry(rem) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                if *e.get() < lb {
                    *e.get_mut() = lb;
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(lb);
            }
        }
        Ok(())
    }
}

/// Minimum-weight clique partition (weight of a block = heaviest vertex).
pub fn exact_cover_weighted(
    g: &UdgGraph,
    budget: &OracleBudget,
) -> Result<(CliquePartition, Rational)> {
    budget_check(g.n(), budget, "weighted oracle")?;
    let weights = g
        .weights
        .clone()
        .ok_or_else(|| Error::InvalidInstance("weighted oracle requires vertex weights".into()))?;
    let n = g.n();
    if n == 0 {
        return Ok((CliquePartition::new(vec![]), Rational::zero()));
    }
    let adj = g.bit_adjacency()?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
    // Incumbent: all singletons.
    let all_single: Rational = weights.iter().cloned().sum();
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut search = WeightedSearch {
        adj: &adj,
        weights: &weights,
        order,
        best_cost: &all_single + &Rational::from_integer(1.into()),
        best: Vec::new(),
        memo: HashMap::new(),
        nodes: 0,
        max_nodes: budget.max_nodes,
    };
    let mut blocks = Vec::new();
    search.run(full, Rational::zero(), &mut blocks)?;
    let partition = bits_to_partition(&search.best);
    let cost = search.best_cost;
    Ok((partition, cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::UdgGraph;
    use crate::rational::rat_int;

    fn complete(n: usize) -> UdgGraph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                e.push((u, v));
            }
        }
        UdgGraph::from_edges(n, &e).unwrap()
    }

    #[test]
    fn complete_graph_is_one_clique() {
        let g = complete(6);
        let p = exact_cover(&g, &OracleBudget::default()).unwrap();
        assert_eq!(p.size(), 1);
    }

    #[test]
    fn five_cycle_needs_three() {
        let g = UdgGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let p = exact_cover(&g, &OracleBudget::default()).unwrap();
        assert_eq!(p.size(), 3);
        assert_eq!(exact_cover_enum(&g).unwrap().size(), 3);
    }

    #[test]
    fn empty_graph_needs_n() {
        let g = UdgGraph::from_edges(7, &[]).unwrap();
        let p = exact_cover(&g, &OracleBudget::default()).unwrap();
        assert_eq!(p.size(), 7);
    }

    #[test]
    fn weighted_single_edge_takes_heavier() {
        let mut g = UdgGraph::from_edges(2, &[(0, 1)]).unwrap();
        g.weights = Some(vec![rat_int(5), rat_int(2)]);
        let (p, cost) = exact_cover_weighted(&g, &OracleBudget::default()).unwrap();
        assert_eq!(p.size(), 1);
        assert_eq!(cost, rat_int(5));
    }

    #[test]
    fn unit_weights_match_unweighted_size() {
        let g = UdgGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5)]).unwrap();
        let mut gw = g.clone();
        gw.weights = Some(vec![rat_int(1); 6]);
        let p = exact_cover(&g, &OracleBudget::default()).unwrap();
        let (_, cost) = exact_cover_weighted(&gw, &OracleBudget::default()).unwrap();
        assert_eq!(cost, rat_int(p.size() as i64));
    }

    #[test]
    fn budget_rejects_oversized_graphs() {
        let g = complete(30);
        let b = OracleBudget { max_vertices: 10, ..Default::default() };
        assert!(matches!(exact_cover(&g, &b), Err(Error::BudgetExceeded { .. })));
    }
}
