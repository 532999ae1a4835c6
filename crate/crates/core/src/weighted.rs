//! Weighted minimum clique partition from adjacency alone.
//!
//! The ball-growing outer loop mirrors the metric solver but measures
//! weight; each ball is covered by repeatedly splitting the common
//! neighborhood of a guessed edge of a co-bipartite neighborhood edge
//! elimination ordering (CNEEO) into two cliques. Failure to construct a
//! CNEEO anywhere certifies the input is not a UDG.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};

use crate::bits::{bits_of, full_mask};
use crate::cert::{CertReason, Certificate, Solved};
use crate::error::{Error, Result};
use crate::graph::{edge, Edge, UdgGraph};
use crate::metric::derive_params;
use crate::partition::CliquePartition;
use crate::rational::{pow_lt, rat, rat_int, Rational, GRID_DENOM_LOG2};

/// Parameters of the weighted solver for one epsilon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedParams {
    pub epsilon: Rational,
    pub gamma: Rational,
    pub beta: usize,
    /// Packing cap `(4 beta + 2)^2` on alternative covers of a ball.
    pub x: usize,
    /// Truncation index: smallest `j` with `(x-1)((x-1)/x)^(j-2) < gamma/2`.
    pub j: usize,
    /// Clique-count cap `j + x` for the per-ball search.
    pub ell: usize,
}

/// Largest dyadic rational (denominator 2^20) `gamma` with
/// `(2 + gamma)(1 + gamma) <= 2 + epsilon`, i.e. `gamma^2 + 3 gamma <= eps`.
pub fn gamma_of(eps: &Rational) -> Result<Rational> {
    if !eps.is_positive() {
        return Err(Error::InvalidEpsilon(eps.to_string()));
    }
    let d = rat_int(1i64 << GRID_DENOM_LOG2);
    let fits = |m: i64| -> bool {
        let g = rat(m, 1i64 << GRID_DENOM_LOG2);
        &g * &g + rat_int(3) * &g <= *eps
    };
    if !fits(1) {
        return Err(Error::GammaUnderflow(eps.to_string()));
    }
    // Exponential then binary search for the largest m that fits.
    let mut lo = 1i64;
    let mut hi = 2i64;
    while fits(hi) {
        lo = hi;
        hi *= 2;
    }
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let gamma = rat(lo, 1) / d;
    debug_assert!(
        (rat_int(2) + &gamma) * (Rational::one() + &gamma) <= rat_int(2) + eps,
        "gamma postcondition"
    );
    Ok(gamma)
}

/// Smallest `j >= 2` with `(x-1) * ((x-1)/x)^(j-2) < gamma/2`, decided by
/// certified interval powering (the exponent reaches the millions).
fn truncation_index(gamma: &Rational, x: usize) -> usize {
    assert!(x >= 2);
    let base = rat((x - 1) as i64, x as i64);
    let threshold = gamma / rat_int(2) / rat_int((x - 1) as i64);
    let holds = |j: usize| pow_lt(&base, (j - 2) as u64, &threshold);
    if holds(2) {
        return 2;
    }
    let mut lo = 2usize;
    let mut hi = 4usize;
    while !holds(hi) {
        lo = hi;
        hi *= 2;
    }
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

pub fn weighted_params(eps: &Rational) -> Result<WeightedParams> {
    let gamma = gamma_of(eps)?;
    let beta = derive_params(&gamma)?.beta;
    let x = (4 * beta + 2) * (4 * beta + 2);
    let j = truncation_index(&gamma, x);
    Ok(WeightedParams { epsilon: eps.clone(), gamma, beta, x, j, ell: j + x })
}

/// A co-bipartite neighborhood edge elimination ordering together with the
/// common neighborhoods it certifies (endpoints included).
#[derive(Clone, Debug)]
pub struct Cneeo {
    pub order: Vec<Edge>,
    pub common_nbhd: Vec<BTreeSet<usize>>,
}

/// Outcome of the greedy CNEEO construction.
#[derive(Clone, Debug)]
pub enum CneeoOutcome {
    Ordering(Cneeo),
    /// No remaining edge was eligible; the residual edge set is evidence
    /// that no CNEEO exists at all (eligibility only grows as the residual
    /// shrinks, so a full ordering would have offered an eligible edge).
    Stuck(Vec<Edge>),
}

/// Common neighborhood of `e`'s endpoints through `residual` edges,
/// including the endpoints themselves.
fn common_neighborhood(e: Edge, residual: &BTreeSet<Edge>) -> BTreeSet<usize> {
    let (u, v) = e;
    let mut nbhd = BTreeSet::from([u, v]);
    let mut u_nbrs = BTreeSet::new();
    for &(a, b) in residual.iter() {
        if a == u {
            u_nbrs.insert(b);
        } else if b == u {
            u_nbrs.insert(a);
        }
    }
    for &(a, b) in residual.iter() {
        if a == v && u_nbrs.contains(&b) {
            nbhd.insert(b);
        } else if b == v && u_nbrs.contains(&a) {
            nbhd.insert(a);
        }
    }
    nbhd
}

/// Is the complement of `g[set]` bipartite? Returns the two color classes
/// (each a clique of `g`) when it is.
fn complement_bipartition(g: &UdgGraph, set: &BTreeSet<usize>) -> Option<(Vec<usize>, Vec<usize>)> {
    let verts: Vec<usize> = set.iter().copied().collect();
    let m = verts.len();
    let mut color = vec![u8::MAX; m];
    for start in 0..m {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        let mut queue = vec![start];
        while let Some(i) = queue.pop() {
            for j in 0..m {
                if i == j || g.has_edge(verts[i], verts[j]) {
                    continue; // complement edge exists only on non-edges
                }
                if color[j] == u8::MAX {
                    color[j] = 1 - color[i];
                    queue.push(j);
                } else if color[j] == color[i] {
                    return None;
                }
            }
        }
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, &v) in verts.iter().enumerate() {
        if color[i] == 0 {
            a.push(v);
        } else {
            b.push(v);
        }
    }
    Some((a, b))
}

/// Greedy CNEEO: repeatedly append the lexicographically first edge whose
/// common neighborhood in the residual induces a co-bipartite subgraph of
/// `g`. Eligibility is monotone (residuals only shrink), so a stuck greedy
/// proves no CNEEO exists.
pub fn cneeo(g: &UdgGraph) -> CneeoOutcome {
    let mut residual: BTreeSet<Edge> = g.edges().collect();
    let mut order = Vec::new();
    let mut nbhds = Vec::new();
    let mut eligible: BTreeSet<Edge> = BTreeSet::new();
    let mut pending: BTreeSet<Edge> = residual.clone();
    loop {
        // (Re)check pending edges; eligible edges never regress.
        for &e in pending.iter() {
            if !residual.contains(&e) || eligible.contains(&e) {
                continue;
            }
            let nbhd = common_neighborhood(e, &residual);
            if complement_bipartition(g, &nbhd).is_some() {
                eligible.insert(e);
            }
        }
        pending.clear();
        let Some(&e) = eligible.iter().next() else {
            if residual.is_empty() {
                return CneeoOutcome::Ordering(Cneeo { order, common_nbhd: nbhds });
            }
            return CneeoOutcome::Stuck(residual.into_iter().collect());
        };
        let nbhd = common_neighborhood(e, &residual);
        order.push(e);
        nbhds.push(nbhd);
        residual.remove(&e);
        eligible.remove(&e);
        // Only edges incident to e's endpoints can change eligibility.
        let (u, v) = e;
        for &(a, b) in residual.iter() {
            if (a == u || b == u || a == v || b == v) && !eligible.contains(&(a, b)) {
                pending.insert((a, b));
            }
        }
    }
}

/// Re-verify the CNEEO invariant from scratch: for every position, the
/// common neighborhood of the edge within the suffix is co-bipartite in
/// `g`, and the order is a permutation of the edge set.
pub fn verify_cneeo(g: &UdgGraph, c: &Cneeo) -> bool {
    let all: BTreeSet<Edge> = g.edges().collect();
    let ordered: BTreeSet<Edge> = c.order.iter().copied().collect();
    if all != ordered || c.order.len() != all.len() || c.order.len() != c.common_nbhd.len() {
        return false;
    }
    let mut residual: BTreeSet<Edge> = all;
    for (i, &e) in c.order.iter().enumerate() {
        let nbhd = common_neighborhood(e, &residual);
        if nbhd != c.common_nbhd[i] {
            return false;
        }
        if complement_bipartition(g, &nbhd).is_none() {
            return false;
        }
        residual.remove(&e);
    }
    true
}

/// Partition a co-bipartite vertex set into two cliques of `g` (the second
/// possibly empty).
pub fn co_bipartite_split(g: &UdgGraph, set: &BTreeSet<usize>) -> Result<(Vec<usize>, Vec<usize>)> {
    complement_bipartition(g, set).ok_or_else(|| {
        Error::InvariantViolation("set is not co-bipartite; cannot split into two cliques".into())
    })
}

/// Budgets for the weighted solver.
#[derive(Clone, Debug)]
pub struct WeightedBudget {
    pub max_ball: usize,
    pub max_states: u64,
}

impl Default for WeightedBudget {
    fn default() -> Self {
        WeightedBudget { max_ball: 24, max_states: 2_000_000 }
    }
}

/// Statistics of one `cp_weighted` search.
#[derive(Clone, Debug, Default)]
pub struct CpStats {
    pub states: u64,
    /// (state counter, achieved weight) every time the incumbent improved.
    pub incumbents: Vec<(u64, Rational)>,
}

enum DpOutcome {
    /// Optimal completion: weight and blocks (bitmasks over local ids).
    Value(Rational, Vec<u64>),
    /// CNEEO construction failed on the induced subgraph of this mask.
    NoCneeo(u64),
}

struct CpSearch<'a> {
    g: &'a UdgGraph,
    weights: &'a [Rational],
    ell: usize,
    budget: &'a WeightedBudget,
    states: u64,
    memo: HashMap<u64, Option<(Rational, Vec<u64>)>>,
    cneeo_cache: HashMap<u64, Option<Cneeo>>,
}

impl CpSearch<'_> {
    fn subgraph(&self, mask: u64) -> (UdgGraph, Vec<usize>) {
        let set: BTreeSet<usize> = bits_of(mask).into_iter().collect();
        self.g.induced(&set)
    }

    fn solve(&mut self, mask: u64, depth: usize) -> Result<DpOutcome> {
        if let Some(known) = self.memo.get(&mask) {
            return Ok(match known {
                Some((w, b)) => DpOutcome::Value(w.clone(), b.clone()),
                None => DpOutcome::Value(self.singleton_cost(mask), self.singleton_blocks(mask)),
            });
        }
        self.states += 1;
        if self.states > self.budget.max_states {
            return Err(Error::BudgetExceeded {
                what: "weighted edge-sequence search",
                limit: self.budget.max_states,
            });
        }
        let (sub, ids) = self.subgraph(mask);
        if sub.edge_count() == 0 {
            // Edgeless residual: cover by singletons. (A sequence step needs
            // an edge; singleton blocks close out the remainder at exactly
            // their own weight.)
            let w = self.singleton_cost(mask);
            let blocks = self.singleton_blocks(mask);
            self.memo.insert(mask, Some((w.clone(), blocks.clone())));
            return Ok(DpOutcome::Value(w, blocks));
        }
        if depth >= self.ell {
            // Sequence length cap: no completion through further guesses.
            self.memo.insert(mask, None);
            return Ok(DpOutcome::Value(self.singleton_cost(mask), self.singleton_blocks(mask)));
        }
        let cn = match self.cneeo_cache.get(&mask) {
            Some(c) => c.clone(),
            None => {
                let out = match cneeo(&sub) {
                    CneeoOutcome::Ordering(c) => Some(c),
                    CneeoOutcome::Stuck(_) => None,
                };
                self.cneeo_cache.insert(mask, out.clone());
                out
            }
        };
        let Some(cn) = cn else {
            return Ok(DpOutcome::NoCneeo(mask));
        };
        // Distinct guessed edges can share a neighborhood; branch per
        // distinct removal.
        let mut seen_removals: BTreeMap<u64, Rational> = BTreeMap::new();
        let mut residual: BTreeSet<Edge> = cn.order.iter().copied().collect();
        let mut best: Option<(Rational, Vec<u64>)> = None;
        // Walk the ordering: guessing edge f with rank i means removing
        // N_L[i], computed in the suffix from i.
        for (i, &f) in cn.order.iter().enumerate() {
            let nbhd_local = common_neighborhood(f, &residual);
            residual.remove(&f);
            debug_assert!(nbhd_local == cn.common_nbhd[i]);
            let (c1, c2) = co_bipartite_split(&sub, &nbhd_local)?;
            let step_cost = self.block_weight(&c1, &ids) + self.block_weight(&c2, &ids);
            let mut removal = 0u64;
            for &lv in &nbhd_local {
                removal |= 1u64 << lv;
            }
            // Same removal at equal or higher step cost cannot improve.
            if let Some(prev) = seen_removals.get(&removal) {
                if *prev <= step_cost {
                    continue;
                }
            }
            seen_removals.insert(removal, step_cost.clone());
            // Map local removal mask back to the global-id mask.
            let mut removal_global = 0u64;
            for lv in bits_of(removal) {
                removal_global |= 1u64 << ids[lv];
            }
            let child = mask & !removal_global;
            if let Some(best_w) = best.as_ref().map(|(w, _)| w.clone()) {
                let lower = step_cost.clone();
                if lower >= best_w {
                    continue;
                }
            }
            match self.solve(child, depth + 1)? {
                DpOutcome::NoCneeo(m) => return Ok(DpOutcome::NoCneeo(m)),
                DpOutcome::Value(wc, mut bc) => {
                    let total = &step_cost + &wc;
                    let mut blocks: Vec<u64> = Vec::new();
                    for cl in [&c1, &c2] {
                        if !cl.is_empty() {
                            let mut b = 0u64;
                            for &lv in cl {
                                b |= 1u64 << ids[lv];
                            }
                            blocks.push(b);
                        }
                    }
                    blocks.append(&mut bc);
                    match &best {
                        Some((w, _)) if *w <= total => {}
                        _ => best = Some((total, blocks)),
                    }
                }
            }
        }
        // The all-singleton cover of this residual is always available.
        let single = (self.singleton_cost(mask), self.singleton_blocks(mask));
        let value = match best {
            Some((w, b)) if w < single.0 => (w, b),
            _ => single,
        };
        self.memo.insert(mask, Some(value.clone()));
        Ok(DpOutcome::Value(value.0, value.1))
    }

    fn singleton_cost(&self, mask: u64) -> Rational {
        bits_of(mask).iter().map(|&v| self.weights[v].clone()).sum()
    }

    fn singleton_blocks(&self, mask: u64) -> Vec<u64> {
        bits_of(mask).iter().map(|&v| 1u64 << v).collect()
    }

    fn block_weight(&self, local: &[usize], ids: &[usize]) -> Rational {
        local
            .iter()
            .map(|&lv| self.weights[ids[lv]].clone())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// Outcome of the per-ball weighted cover.
pub enum CpOutcome {
    Partition(CliquePartition, Rational),
    /// Vertex set (global ids) of the residual whose CNEEO construction got
    /// stuck, plus its residual edges.
    NoCneeo(Vec<usize>, Vec<Edge>),
}

/// Algorithm CP: minimum weight over all guessed edge sequences of length
/// at most `ell`, seeded with the all-singleton cover.
pub fn cp_weighted(
    g: &UdgGraph,
    ball: &BTreeSet<usize>,
    ell: usize,
    budget: &WeightedBudget,
) -> Result<(CpOutcome, CpStats)> {
    let weights = g
        .weights
        .clone()
        .ok_or_else(|| Error::InvalidInstance("weighted solver requires weights".into()))?;
    if ball.len() > budget.max_ball || ball.len() > 64 {
        return Err(Error::BudgetExceeded {
            what: "weighted ball size",
            limit: budget.max_ball.min(64) as u64,
        });
    }
    let (sub, ids) = g.induced(ball);
    let sub_weights: Vec<Rational> = ids.iter().map(|&v| weights[v].clone()).collect();
    let mut search = CpSearch {
        g: &sub,
        weights: &sub_weights,
        ell,
        budget,
        states: 0,
        memo: HashMap::new(),
        cneeo_cache: HashMap::new(),
    };
    let mask = full_mask(sub.n());
    let outcome = search.solve(mask, 0)?;
    let mut stats = CpStats { states: search.states, incumbents: vec![] };
    match outcome {
        DpOutcome::NoCneeo(m) => {
            // Re-run the greedy on the stuck subgraph to capture its residual.
            let (stuck_sub, stuck_ids) = search.subgraph(m);
            let residual = match cneeo(&stuck_sub) {
                CneeoOutcome::Stuck(r) => r,
                CneeoOutcome::Ordering(_) => vec![],
            };
            let global_ids: Vec<usize> = stuck_ids.iter().map(|&lv| ids[lv]).collect();
            let global_edges: Vec<Edge> =
                residual.iter().map(|&(a, b)| edge(global_ids[a], global_ids[b])).collect();
            Ok((CpOutcome::NoCneeo(global_ids, global_edges), stats))
        }
        DpOutcome::Value(w, blocks) => {
            let partition = CliquePartition::new(
                blocks.iter().map(|&b| bits_of(b).iter().map(|&lv| ids[lv]).collect()).collect(),
            );
            stats.incumbents.push((stats.states, w.clone()));
            Ok((CpOutcome::Partition(partition, w), stats))
        }
    }
}

/// Record of one committed weighted ball.
#[derive(Clone, Debug)]
pub struct WeightedBallRecord {
    pub center: usize,
    pub r_star: usize,
    pub inner_weight: Rational,
    pub committed_weight: Rational,
    pub committed_ball: BTreeSet<usize>,
}

#[derive(Clone, Debug)]
pub struct WeightedOutput {
    pub solved: Solved,
    pub params: WeightedParams,
    pub balls: Vec<WeightedBallRecord>,
    pub stats: CpStats,
}

fn stuck_certificate(
    vertices: &[usize],
    edges: &[Edge],
    params: &WeightedParams,
) -> Certificate {
    // Standalone residual graph: ineligibility is preserved when moving to
    // the edge subgraph, so the greedy gets stuck on it immediately.
    let ids: Vec<usize> = vertices.to_vec();
    let back: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let local: Vec<Edge> = edges.iter().map(|&(a, b)| edge(back[&a], back[&b])).collect();
    // Minimize: drop vertices while the construction still fails.
    let mut keep: Vec<usize> = (0..ids.len()).collect();
    let mut local_edges = local;
    for v in (0..ids.len()).rev() {
        if keep.len() <= 3 {
            break;
        }
        let trial_edges: Vec<Edge> =
            local_edges.iter().copied().filter(|&(a, b)| a != v && b != v).collect();
        let trial_keep: Vec<usize> = keep.iter().copied().filter(|&u| u != v).collect();
        let compact: BTreeMap<usize, usize> =
            trial_keep.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let compact_edges: Vec<Edge> =
            trial_edges.iter().map(|&(a, b)| edge(compact[&a], compact[&b])).collect();
        if let Ok(trial_graph) = UdgGraph::from_edges(trial_keep.len(), &compact_edges) {
            if matches!(cneeo(&trial_graph), CneeoOutcome::Stuck(_)) {
                keep = trial_keep;
                local_edges = trial_edges;
            }
        }
    }
    let compact: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let compact_edges: Vec<Edge> =
        local_edges.iter().map(|&(a, b)| edge(compact[&a], compact[&b])).collect();
    let graph = UdgGraph::from_edges(keep.len(), &compact_edges).expect("valid residual");
    Certificate {
        reason: CertReason::NoCneeo,
        original_vertices: keep.iter().map(|&u| ids[u]).collect(),
        graph,
        center: None,
        radius: None,
        epsilon: Some(params.epsilon.clone()),
        beta: Some(params.beta),
        ell: Some(params.ell),
        weighted: true,
    }
}

/// Algorithm: repeatedly pick the heaviest remaining vertex, grow its ball
/// while the covered weight still grows by more than `1+gamma` per two
/// hops, then commit and delete.
pub fn mincp_weighted(g: &UdgGraph, eps: &Rational, budget: &WeightedBudget) -> Result<WeightedOutput> {
    let weights = g
        .weights
        .clone()
        .ok_or_else(|| Error::InvalidInstance("weighted solver requires weights".into()))?;
    let params = weighted_params(eps)?;
    let growth = Rational::one() + &params.gamma;
    let mut alive: BTreeSet<usize> = (0..g.n()).collect();
    let mut committed = CliquePartition::new(vec![]);
    let mut balls = Vec::new();
    let mut stats = CpStats::default();

    while !alive.is_empty() {
        // Heaviest remaining vertex, ties to the lowest id.
        let v = *alive
            .iter()
            .max_by(|&&a, &&b| weights[a].cmp(&weights[b]).then(b.cmp(&a)))
            .expect("alive nonempty");
        let mut cache: BTreeMap<usize, (BTreeSet<usize>, CliquePartition, Rational)> =
            BTreeMap::new();
        let mut failed: Option<Box<Certificate>> = None;
        let solve = |r: usize,
                     cache: &mut BTreeMap<usize, (BTreeSet<usize>, CliquePartition, Rational)>,
                         alive: &BTreeSet<usize>,
                         stats: &mut CpStats|
         -> Result<std::result::Result<Rational, Box<Certificate>>> {
            if let Some((_, _, w)) = cache.get(&r) {
                return Ok(Ok(w.clone()));
            }
            let ball = g.ball_filtered(v, r, Some(alive));
            let (outcome, s) = cp_weighted(g, &ball, params.ell, budget)?;
            stats.states += s.states;
            match outcome {
                CpOutcome::Partition(p, w) => {
                    cache.insert(r, (ball, p, w.clone()));
                    Ok(Ok(w))
                }
                CpOutcome::NoCneeo(verts, edges) => {
                    Ok(Err(Box::new(stuck_certificate(&verts, &edges, &params))))
                }
            }
        };

        let mut r = 0usize;
        loop {
            let w_r = match solve(r, &mut cache, &alive, &mut stats)? {
                Ok(w) => w,
                Err(c) => {
                    failed = Some(c);
                    break;
                }
            };
            let w_r2 = match solve(r + 2, &mut cache, &alive, &mut stats)? {
                Ok(w) => w,
                Err(c) => {
                    failed = Some(c);
                    break;
                }
            };
            if w_r2 > &growth * &w_r {
                r += 1;
                if r > params.beta {
                    let ball = g.ball_filtered(v, r, Some(&alive));
                    let (sub, ids) = g.induced(&ball);
                    failed = Some(Box::new(Certificate {
                        reason: CertReason::BallTooDeep,
                        original_vertices: ids.clone(),
                        graph: sub,
                        center: ids.iter().position(|&u| u == v),
                        radius: Some(r),
                        epsilon: Some(params.epsilon.clone()),
                        beta: Some(params.beta),
                        ell: Some(params.ell),
                        weighted: true,
                    }));
                    break;
                }
            } else {
                break;
            }
        }
        if let Some(c) = failed {
            return Ok(WeightedOutput { solved: Solved::NotUdg(c), params, balls, stats });
        }

        let (_, inner_part, inner_w) = cache.get(&r).expect("solved").clone();
        let (outer_ball, outer_part, outer_w) = cache.get(&(r + 2)).expect("solved").clone();
        let _ = inner_part;
        committed = committed.union(outer_part);
        balls.push(WeightedBallRecord {
            center: v,
            r_star: r,
            inner_weight: inner_w,
            committed_weight: outer_w,
            committed_ball: outer_ball.clone(),
        });
        for u in outer_ball {
            alive.remove(&u);
        }
    }

    Ok(WeightedOutput { solved: Solved::Partition(committed), params, balls, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_instance, with_random_weights, GenSpec};
    use crate::graph::build_udg;
    use crate::oracle::{exact_cover_weighted, OracleBudget};
    use crate::partition::validate_partition;

    #[test]
    fn gamma_of_one_is_maximal_dyadic() {
        let g = gamma_of(&rat_int(1)).unwrap();
        // (2+g)(1+g) <= 3 exactly
        assert!((rat_int(2) + &g) * (rat_int(1) + &g) <= rat_int(3));
        // the next dyadic step violates the bound
        let step = rat(1, 1 << GRID_DENOM_LOG2);
        let g2 = &g + &step;
        assert!((rat_int(2) + &g2) * (rat_int(1) + &g2) > rat_int(3));
        // gamma(1) ~ 0.302775
        assert_eq!(g, rat(317483, 1 << GRID_DENOM_LOG2));
    }

    #[test]
    fn gamma_monotone_and_positive() {
        let g1 = gamma_of(&rat(1, 10)).unwrap();
        let g2 = gamma_of(&rat(1, 2)).unwrap();
        let g3 = gamma_of(&rat_int(1)).unwrap();
        assert!(g1 > Rational::zero());
        assert!(g1 < g2 && g2 < g3);
        assert!(gamma_of(&rat(1, 1 << 25)).is_err());
    }

    #[test]
    fn truncation_index_small_case() {
        // x = 5, gamma = 1/2: need 4*(4/5)^(j-2) < 1/4, i.e. (4/5)^(j-2) < 1/16
        // (4/5)^12 = 0.0687 > 1/16, (4/5)^13 = 0.0549 < 1/16 -> j = 15
        assert_eq!(truncation_index(&rat(1, 2), 5), 15);
    }

    #[test]
    fn cneeo_on_triangle_and_complete_graphs() {
        let g = UdgGraph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        match cneeo(&g) {
            CneeoOutcome::Ordering(c) => {
                assert_eq!(c.order[0], (0, 1)); // lexicographic greedy
                assert!(verify_cneeo(&g, &c));
            }
            _ => panic!("triangle admits a CNEEO"),
        }
        let mut edges = Vec::new();
        for u in 0..6 {
            for v in (u + 1)..6 {
                edges.push((u, v));
            }
        }
        let k6 = UdgGraph::from_edges(6, &edges).unwrap();
        match cneeo(&k6) {
            CneeoOutcome::Ordering(c) => assert!(verify_cneeo(&k6, &c)),
            _ => panic!("complete graphs admit CNEEOs"),
        }
    }

    /// Three five-cycles with all cross edges: every edge's common
    /// neighborhood contains a full untouched five-cycle, whose complement
    /// is again an odd cycle, so no edge is ever eligible.
    fn triple_join_c5() -> UdgGraph {
        let mut edges = Vec::new();
        for part in 0..3usize {
            let base = part * 5;
            for i in 0..5 {
                edges.push((base + i, base + (i + 1) % 5));
            }
        }
        for p in 0..3usize {
            for q in (p + 1)..3 {
                for i in 0..5 {
                    for j in 0..5 {
                        edges.push((p * 5 + i, q * 5 + j));
                    }
                }
            }
        }
        let edges: Vec<(usize, usize)> =
            edges.into_iter().map(|(a, b)| if a < b { (a, b) } else { (b, a) }).collect();
        UdgGraph::from_edges(15, &edges).unwrap()
    }

    /// Exhaustive CNEEO existence check by memoized search over residual
    /// edge sets; independent of the greedy construction.
    fn cneeo_exists_exhaustive(g: &UdgGraph) -> bool {
        fn rec(
            g: &UdgGraph,
            residual: &BTreeSet<Edge>,
            memo: &mut HashMap<Vec<Edge>, bool>,
        ) -> bool {
            if residual.is_empty() {
                return true;
            }
            let key: Vec<Edge> = residual.iter().copied().collect();
            if let Some(&known) = memo.get(&key) {
                return known;
            }
            let mut ok = false;
            for &e in residual.iter() {
                let nbhd = common_neighborhood(e, residual);
                if complement_bipartition(g, &nbhd).is_some() {
                    let mut next = residual.clone();
                    next.remove(&e);
                    if rec(g, &next, memo) {
                        ok = true;
                        break;
                    }
                }
            }
            memo.insert(key, ok);
            ok
        }
        let residual: BTreeSet<Edge> = g.edges().collect();
        rec(g, &residual, &mut HashMap::new())
    }

    #[test]
    fn triple_join_of_five_cycles_has_no_cneeo() {
        let g = triple_join_c5();
        match cneeo(&g) {
            CneeoOutcome::Stuck(residual) => {
                assert_eq!(residual.len(), g.edge_count(), "stuck before any progress");
            }
            _ => panic!("expected no CNEEO"),
        }
        assert!(!cneeo_exists_exhaustive(&g));
    }

    #[test]
    fn split_of_clique_leaves_second_empty() {
        let g = UdgGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let (a, b) = co_bipartite_split(&g, &BTreeSet::from([0, 1, 2, 3])).unwrap();
        assert_eq!(a.len() + b.len(), 4);
        assert!(a.len() == 4 || b.len() == 4);
    }

    #[test]
    fn split_of_c4_complement_gives_two_pairs() {
        // G[S] = two disjoint edges {0,1}, {2,3}: complement is C4
        let g = UdgGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let (a, b) = co_bipartite_split(&g, &BTreeSet::from([0, 1, 2, 3])).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(b.len(), 2);
        for side in [&a, &b] {
            assert!(g.has_edge(side[0], side[1]));
        }
    }

    #[test]
    fn split_rejects_non_cobipartite() {
        // G[S] = C5: complement is C5, odd, not bipartite
        let g = UdgGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert!(co_bipartite_split(&g, &BTreeSet::from([0, 1, 2, 3, 4])).is_err());
    }

    #[test]
    fn cp_weighted_single_clique_costs_its_heaviest() {
        let mut g =
            UdgGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        g.weights = Some(vec![rat_int(1); 4]);
        let ball: BTreeSet<usize> = (0..4).collect();
        let (out, _) = cp_weighted(&g, &ball, 100, &WeightedBudget::default()).unwrap();
        match out {
            CpOutcome::Partition(p, w) => {
                assert_eq!(w, rat_int(1));
                assert_eq!(p.size(), 1);
            }
            _ => panic!("clique must be covered"),
        }
    }

    #[test]
    fn cp_weighted_on_matching_cliques_within_double_opt() {
        let ps = gen_instance(&GenSpec::MatchingCliques { t: 3 }, 0).unwrap();
        let mut g = build_udg(&ps).unwrap();
        g.weights = Some(vec![rat_int(1); 6]);
        let ball: BTreeSet<usize> = (0..6).collect();
        let (out, _) = cp_weighted(&g, &ball, 100, &WeightedBudget::default()).unwrap();
        match out {
            CpOutcome::Partition(p, w) => {
                assert!(validate_partition(&g, &p).valid);
                assert!(w <= rat_int(4), "weight {w} > 2 * opt");
            }
            _ => panic!("expected partition"),
        }
    }

    #[test]
    fn mincp_weighted_edgeless_pays_total_weight() {
        let mut g = UdgGraph::from_edges(4, &[]).unwrap();
        g.weights = Some(vec![rat_int(2), rat_int(3), rat_int(5), rat_int(7)]);
        let out = mincp_weighted(&g, &rat_int(1), &WeightedBudget::default()).unwrap();
        match out.solved {
            Solved::Partition(p) => {
                assert_eq!(p.size(), 4);
                assert_eq!(p.weighted_cost(g.weights.as_ref().unwrap()), rat_int(17));
            }
            _ => panic!("expected partition"),
        }
    }

    #[test]
    fn mincp_weighted_two_kgon_within_bound() {
        let ps = gen_instance(&GenSpec::TwoKgon { k: 7 }, 0).unwrap();
        let g = build_udg(&ps).unwrap();
        let out = mincp_weighted(&g, &rat_int(1), &WeightedBudget::default()).unwrap();
        match out.solved {
            Solved::Partition(p) => {
                let w = p.weighted_cost(g.weights.as_ref().unwrap());
                assert!(validate_partition(&g, &p).valid);
                assert!(w <= rat_int(24), "weight {w} above (2+eps) * 8");
            }
            _ => panic!("expected partition"),
        }
    }

    #[test]
    fn mincp_weighted_random_instances_meet_guarantee() {
        for seed in 0..6 {
            let ps = gen_instance(&GenSpec::RandomUdg { n: 12, box_side: 2 }, seed).unwrap();
            let ps = with_random_weights(&ps, seed, 9);
            let g = build_udg(&ps).unwrap();
            let (_, opt) = exact_cover_weighted(&g, &OracleBudget::default()).unwrap();
            let out = mincp_weighted(&g, &rat_int(1), &WeightedBudget::default()).unwrap();
            match out.solved {
                Solved::Partition(p) => {
                    let w = p.weighted_cost(g.weights.as_ref().unwrap());
                    assert!(validate_partition(&g, &p).valid);
                    assert!(w <= rat_int(3) * &opt, "seed {seed}: {w} > 3 * {opt}");
                }
                _ => panic!("unexpected certificate on a realized UDG"),
            }
        }
    }
}
