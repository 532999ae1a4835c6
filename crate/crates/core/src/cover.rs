//! Direct branch-and-bound search for clique partitions.
//!
//! This engine searches partitions of `G` head-on (lowest uncovered vertex
//! joins some clique), unlike the oracle which colors the complement. The
//! two routes cross-check each other in the test suite.

use crate::bits::{bits_of, full_mask, greedy_independent_lb, maximal_cliques_containing};
use crate::error::{Error, Result};
use crate::partition::CliquePartition;

pub const DEFAULT_MAX_NODES: u64 = 50_000_000;

struct MinCover<'a> {
    adj: &'a [u64],
    best: Option<Vec<u64>>,
    nodes: u64,
    max_nodes: u64,
}

impl MinCover<'_> {
    fn run(&mut self, rem: u64, blocks: &mut Vec<u64>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::BudgetExceeded { what: "clique cover search", limit: self.max_nodes });
        }
        let bound = blocks.len() + greedy_independent_lb(self.adj, rem);
        if let Some(b) = &self.best {
            if bound >= b.len() {
                return Ok(());
            }
        }
        if rem == 0 {
            self.best = Some(blocks.clone());
            return Ok(());
        }
        let v = rem.trailing_zeros() as usize;
        // An optimal partition exists in which v's block is maximal within
        // the remainder, so only maximal cliques need to be branched on.
        let Some(cliques) =
            maximal_cliques_containing(self.adj, v, rem, &mut self.nodes, self.max_nodes)
        else {
            return Err(Error::BudgetExceeded { what: "clique cover search", limit: self.max_nodes });
        };
        for clique in cliques {
            blocks.push(clique);
            self.run(rem & !clique, blocks)?;
            blocks.pop();
        }
        Ok(())
    }
}

/// Minimum clique partition of the bit graph, as block bitmasks.
pub fn min_cover_bits(adj: &[u64], n: usize, max_nodes: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Ok(vec![]);
    }
    let mut search = MinCover { adj, best: None, nodes: 0, max_nodes };
    let mut blocks = Vec::new();
    search.run(full_mask(n), &mut blocks)?;
    Ok(search.best.expect("search always finds the singleton partition"))
}

pub fn min_cover(adj: &[u64], n: usize, max_nodes: u64) -> Result<CliquePartition> {
    let blocks = min_cover_bits(adj, n, max_nodes)?;
    Ok(CliquePartition::new(blocks.iter().map(|&b| bits_of(b)).collect()))
}

/// Options for the capped decision search: find a partition into at most
/// `max_blocks` cliques where every block has at most `small_cap` vertices,
/// except that one block of arbitrary size is allowed when
/// `allow_one_large` is set.
pub struct CappedOptions {
    pub max_blocks: usize,
    pub small_cap: usize,
    pub allow_one_large: bool,
    pub max_nodes: u64,
}

struct CappedSearch<'a> {
    adj: &'a [u64],
    opts: &'a CappedOptions,
    found: Option<Vec<u64>>,
    nodes: u64,
}

impl CappedSearch<'_> {
    fn run(&mut self, rem: u64, blocks: &mut Vec<u64>, large_used: bool) -> Result<()> {
        if self.found.is_some() {
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.opts.max_nodes {
            return Err(Error::BudgetExceeded {
                what: "capped cover search",
                limit: self.opts.max_nodes,
            });
        }
        if rem == 0 {
            self.found = Some(blocks.clone());
            return Ok(());
        }
        if blocks.len() + greedy_independent_lb(self.adj, rem) > self.opts.max_blocks {
            return Ok(());
        }
        let v = rem.trailing_zeros() as usize;
        let Some(maximal) =
            maximal_cliques_containing(self.adj, v, rem, &mut self.nodes, self.opts.max_nodes)
        else {
            return Err(Error::BudgetExceeded {
                what: "capped cover search",
                limit: self.opts.max_nodes,
            });
        };
        // Candidate blocks for v: maximal cliques (possibly truncated to the
        // cap) and, when permitted, one uncapped maximal clique. A capped
        // block that is neither maximal nor at the cap can always be grown,
        // so these candidates suffice.
        let cap = self.opts.small_cap;
        let mut seen: Vec<u64> = Vec::new();
        for &m in &maximal {
            let size = m.count_ones() as usize;
            if size <= cap {
                if !seen.contains(&m) {
                    seen.push(m);
                }
            } else {
                if self.opts.allow_one_large && !large_used {
                    blocks.push(m);
                    self.run(rem & !m, blocks, true)?;
                    blocks.pop();
                    if self.found.is_some() {
                        return Ok(());
                    }
                }
                // Truncations of an oversized maximal clique down to the cap:
                // enumerate size-cap subsets containing v, canonically.
                self.truncations(m, v, cap, rem, blocks, large_used)?;
                if self.found.is_some() {
                    return Ok(());
                }
            }
        }
        for m in seen {
            blocks.push(m);
            self.run(rem & !m, blocks, large_used)?;
            blocks.pop();
            if self.found.is_some() {
                return Ok(());
            }
        }
        Ok(())
    }

    /// Enumerate subsets of the oversized maximal clique `m` of size exactly
    /// `cap` that contain `v`, and recurse on each.
    fn truncations(
        &mut self,
        m: u64,
        v: usize,
        cap: usize,
        rem: u64,
        blocks: &mut Vec<u64>,
        large_used: bool,
    ) -> Result<()> {
        if cap == 0 {
            return Ok(());
        }
        let others = bits_of(m & !(1u64 << v));
        let k = cap - 1;
        if others.len() < k {
            return Ok(());
        }
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            self.nodes += 1;
            if self.nodes > self.opts.max_nodes {
                return Err(Error::BudgetExceeded {
                    what: "capped cover search",
                    limit: self.opts.max_nodes,
                });
            }
            let mut clique = 1u64 << v;
            for &i in &idx {
                clique |= 1u64 << others[i];
            }
            blocks.push(clique);
            self.run(rem & !clique, blocks, large_used)?;
            blocks.pop();
            if self.found.is_some() {
                return Ok(());
            }
            // next combination
            let mut i = k;
            loop {
                if i == 0 {
                    return Ok(());
                }
                i -= 1;
                if idx[i] != i + others.len() - k {
                    idx[i] += 1;
                    for j in (i + 1)..k {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
}

/// Decision search per `CappedOptions`; `Ok(None)` when no partition fits.
pub fn find_capped_cover(
    adj: &[u64],
    n: usize,
    opts: &CappedOptions,
) -> Result<Option<Vec<u64>>> {
    if n == 0 {
        return Ok(Some(vec![]));
    }
    let mut search = CappedSearch { adj, opts, found: None, nodes: 0 };
    let mut blocks = Vec::new();
    search.run(full_mask(n), &mut blocks, false)?;
    Ok(search.found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::UdgGraph;
    use crate::oracle::{exact_cover, OracleBudget};

    fn bit_graph(n: usize, edges: &[(usize, usize)]) -> Vec<u64> {
        UdgGraph::from_edges(n, edges).unwrap().bit_adjacency().unwrap()
    }

    #[test]
    fn min_cover_on_five_cycle() {
        let adj = bit_graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let blocks = min_cover_bits(&adj, 5, DEFAULT_MAX_NODES).unwrap();
        assert_eq!(blocks.len(), 3);
    }

    #[test]
    fn capped_cover_respects_caps() {
        // K4: partition into 2 blocks of <= 2.
        let adj = bit_graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let opts =
            CappedOptions { max_blocks: 2, small_cap: 2, allow_one_large: false, max_nodes: 1 << 20 };
        let found = find_capped_cover(&adj, 4, &opts).unwrap().unwrap();
        assert_eq!(found.len(), 2);
        assert!(found.iter().all(|b| b.count_ones() <= 2));
        // But K4 cannot be split into 2 blocks of <= 1.
        let opts =
            CappedOptions { max_blocks: 2, small_cap: 1, allow_one_large: false, max_nodes: 1 << 20 };
        assert!(find_capped_cover(&adj, 4, &opts).unwrap().is_none());
        // With one large block allowed it works again.
        let opts =
            CappedOptions { max_blocks: 2, small_cap: 1, allow_one_large: true, max_nodes: 1 << 20 };
        assert!(find_capped_cover(&adj, 4, &opts).unwrap().is_some());
    }

    #[test]
    fn agrees_with_oracle_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let n = rng.gen_range(1..=9);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.45) {
                        edges.push((u, v));
                    }
                }
            }
            let g = UdgGraph::from_edges(n, &edges).unwrap();
            let direct = min_cover(&g.bit_adjacency().unwrap(), n, DEFAULT_MAX_NODES).unwrap();
            let oracle = exact_cover(&g, &OracleBudget::default()).unwrap();
            assert_eq!(direct.size(), oracle.size());
        }
    }
}
