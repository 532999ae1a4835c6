//! Weakly-robust PTAS from edge lengths only.
//!
//! `mincp2` grows hop balls until their optimal partitions stop improving
//! fast, solving each ball with `opt_cp`. Every structural assumption that
//! holds for true unit disk graphs is checked; a failed check surfaces as a
//! certificate carrying the offending ball.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Signed};

use crate::bits::{bits_of, full_mask, greedy_independent_lb};
use crate::cert::{CertReason, Certificate, Solved};
use crate::cover::{self, CappedOptions};
use crate::error::{Error, Result};
use crate::graph::UdgGraph;
use crate::partition::CliquePartition;
use crate::predicates::{same_side, QuadDistances, SideResult};
use crate::rational::{rat_int, Rational};

/// Ball-radius cap and clique-count cap for one epsilon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PtasParams {
    pub epsilon: Rational,
    pub beta: usize,
    pub ell: usize,
}

/// Derive the radius cap `beta` and the per-ball clique cap `ell`.
///
/// `beta` is the smallest even `R >= 2` whose forced growth
/// `(1+epsilon)^(R/2)` exceeds the packing cap `(2R+2)^2`; past that point a
/// ball of a true UDG cannot keep growing. `ell = (4*beta+2)^2` caps the
/// partition size of any committed ball via the half-grid cover of its
/// radius. Epsilon above 1 is clamped to 1.
pub fn derive_params(eps: &Rational) -> Result<PtasParams> {
    if !eps.is_positive() {
        return Err(Error::InvalidEpsilon(eps.to_string()));
    }
    let one = Rational::one();
    let eps = if *eps > one { one.clone() } else { eps.clone() };
    let growth = &one + &eps;
    let mut power = growth.clone(); // (1+eps)^(R/2) at R = 2
    let mut r = 2usize;
    loop {
        let cap = rat_int((2 * r + 2) as i64);
        if power > &cap * &cap {
            let beta = r;
            let ell = (4 * beta + 2) * (4 * beta + 2);
            return Ok(PtasParams { epsilon: eps, beta, ell });
        }
        r += 2;
        power *= &growth;
        if r > 100_000 {
            return Err(Error::InvalidEpsilon(format!("epsilon {eps} gives an impractical beta")));
        }
    }
}

/// Search/enumeration budgets for the metric solver.
#[derive(Clone, Debug)]
pub struct MetricBudget {
    pub max_ball: usize,
    pub max_nodes: u64,
    /// Cap on separator-line configurations evaluated per opt_cp call.
    pub max_configs: u64,
}

impl Default for MetricBudget {
    fn default() -> Self {
        MetricBudget { max_ball: 60, max_nodes: cover::DEFAULT_MAX_NODES, max_configs: 20_000_000 }
    }
}

/// Which clique a tested point is on the positive side of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassifyOutcome {
    PositiveI,
    PositiveJ,
    Inconsistent,
    /// A required edge (hence length) is absent; the point cannot belong to
    /// the line-owning clique and the line tells it nothing else.
    NotApplicable,
}

/// Side classification of `p` against the line through `u` and `v` owned by
/// the clique of representative `c_i` (`c_j` identifies the opposing clique
/// but does not enter the quadruple).
pub fn classify_side(
    g: &UdgGraph,
    p: usize,
    c_i: usize,
    u: usize,
    v: usize,
    _c_j: usize,
) -> ClassifyOutcome {
    let Some(quad) = quad_of(g, p, u, v, c_i) else {
        return ClassifyOutcome::NotApplicable;
    };
    match same_side(&quad) {
        SideResult::SameSide => ClassifyOutcome::PositiveI,
        SideResult::OppositeSide => ClassifyOutcome::PositiveJ,
        SideResult::Inconsistent => ClassifyOutcome::Inconsistent,
    }
}

/// The six squared lengths among `p, u, v, c` if all of them are edges.
fn quad_of(g: &UdgGraph, p: usize, u: usize, v: usize, c: usize) -> Option<QuadDistances> {
    Some(QuadDistances {
        pa2: g.sqlen(p, u)?.clone(),
        pb2: g.sqlen(p, v)?.clone(),
        pr2: g.sqlen(p, c)?.clone(),
        ab2: g.sqlen(u, v)?.clone(),
        ar2: g.sqlen(u, c)?.clone(),
        br2: g.sqlen(v, c)?.clone(),
    })
}

/// Internal outcome of OPT-CP on one ball.
#[derive(Clone, Debug)]
pub enum OptCpOutcome {
    Partition(CliquePartition),
    Failed(CertReason),
}

struct OptCp<'a> {
    g: &'a UdgGraph,
    adj: Vec<u64>,
    n: usize,
    budget: &'a MetricBudget,
    configs: u64,
    side_cache: HashMap<(usize, usize, usize, usize), SideResult>,
    cover_cache: HashMap<(u64, usize), bool>,
}

impl OptCp<'_> {
    fn charge(&mut self) -> Result<()> {
        self.configs += 1;
        if self.configs > self.budget.max_configs {
            return Err(Error::BudgetExceeded {
                what: "opt_cp configuration enumeration",
                limit: self.budget.max_configs,
            });
        }
        Ok(())
    }

    /// Neighborhood independence screen: a vertex of a UDG never has six
    /// pairwise non-adjacent neighbors.
    fn screen_neighborhood_independence(&mut self) -> Result<bool> {
        for v in 0..self.n {
            if self.has_independent_set(self.adj[v], 6)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn has_independent_set(&mut self, rem: u64, need: usize) -> Result<bool> {
        self.charge()?;
        if need == 0 {
            return Ok(true);
        }
        if (rem.count_ones() as usize) < need {
            return Ok(false);
        }
        let v = rem.trailing_zeros() as usize;
        if self.has_independent_set(rem & !(self.adj[v] | (1u64 << v)), need - 1)? {
            return Ok(true);
        }
        self.has_independent_set(rem & !(1u64 << v), need)
    }

    fn cached_side(&mut self, p: usize, u: usize, v: usize, c: usize) -> Option<SideResult> {
        let key = if u < v { (p, u, v, c) } else { (p, v, u, c) };
        if let Some(r) = self.side_cache.get(&key) {
            return Some(*r);
        }
        let quad = quad_of(self.g, p, u, v, c)?;
        let r = same_side(&quad);
        self.side_cache.insert(key, r);
        Some(r)
    }

    fn coverable(&mut self, rem: u64, limit: usize) -> Result<bool> {
        if let Some(&known) = self.cover_cache.get(&(rem, limit)) {
            return Ok(known);
        }
        if greedy_independent_lb(&self.adj, rem) > limit {
            self.cover_cache.insert((rem, limit), false);
            return Ok(false);
        }
        let verts = bits_of(rem);
        let sub_adj: Vec<u64> = verts
            .iter()
            .map(|&v| {
                let mut row = 0u64;
                for (j, &u) in verts.iter().enumerate() {
                    if self.adj[v] & (1u64 << u) != 0 {
                        row |= 1u64 << j;
                    }
                }
                row
            })
            .collect();
        let ok = match cover::min_cover_bits(&sub_adj, verts.len(), self.budget.max_nodes) {
            Ok(blocks) => blocks.len() <= limit,
            Err(e) => return Err(e),
        };
        self.cover_cache.insert((rem, limit), ok);
        Ok(ok)
    }
}

/// OPT-CP: minimum clique partition of a ball subgraph, or a reason it
/// cannot be a UDG.
///
/// Configurations are searched in ascending partition size starting at the
/// graph-theoretic minimum (smaller sizes cannot pass the final cliqueness
/// and coverage check, so skipping them preserves "first success is
/// minimum"). Shapes without two large cliques need no separator lines; with
/// two or more, representatives and line pairs are enumerated and every
/// remaining vertex is placed by exact side tests. Any inconsistent
/// quadruple aborts the whole call.
pub fn opt_cp(sub: &UdgGraph, ell: usize, budget: &MetricBudget) -> Result<OptCpOutcome> {
    let n = sub.n();
    if n == 0 {
        return Ok(OptCpOutcome::Partition(CliquePartition::new(vec![])));
    }
    if n > budget.max_ball || n > 64 {
        return Err(Error::BudgetExceeded { what: "opt_cp ball size", limit: budget.max_ball.min(64) as u64 });
    }
    let adj = sub.bit_adjacency()?;
    let mut ctx = OptCp {
        g: sub,
        adj,
        n,
        budget,
        configs: 0,
        side_cache: HashMap::new(),
        cover_cache: HashMap::new(),
    };
    if ctx.screen_neighborhood_independence()? {
        return Ok(OptCpOutcome::Failed(CertReason::NoValidConfiguration));
    }
    let min_blocks = cover::min_cover_bits(&ctx.adj, n, budget.max_nodes)?;
    let alpha_star = min_blocks.len();
    if alpha_star > ell {
        return Ok(OptCpOutcome::Failed(CertReason::NoValidConfiguration));
    }
    for alpha in alpha_star..=ell.min(n) {
        match try_alpha(&mut ctx, alpha, &min_blocks)? {
            AlphaOutcome::Found(p) => return Ok(OptCpOutcome::Partition(p)),
            AlphaOutcome::Inconsistent => {
                return Ok(OptCpOutcome::Failed(CertReason::InconsistentQuadrilateral))
            }
            AlphaOutcome::NoConfig => {}
        }
    }
    Ok(OptCpOutcome::Failed(CertReason::NoValidConfiguration))
}

enum AlphaOutcome {
    Found(CliquePartition),
    NoConfig,
    Inconsistent,
}

fn blocks_to_partition(blocks: &[u64]) -> CliquePartition {
    CliquePartition::new(blocks.iter().map(|&b| bits_of(b)).collect())
}

fn try_alpha(ctx: &mut OptCp<'_>, alpha: usize, min_blocks: &[u64]) -> Result<AlphaOutcome> {
    let n = ctx.n;
    let cap = 2 * alpha - 2;
    let big = 2 * alpha - 1;
    // Shapes with at most one large clique: no separator lines involved.
    let opts = CappedOptions {
        max_blocks: alpha,
        small_cap: cap,
        allow_one_large: true,
        max_nodes: ctx.budget.max_nodes,
    };
    if let Some(found) = cover::find_capped_cover(&ctx.adj, n, &opts)? {
        return Ok(AlphaOutcome::Found(blocks_to_partition(&found)));
    }
    // Shapes with L >= 2 large cliques. Try the shape of the known minimum
    // partition first: its small blocks are a promising sigma.
    let l_max = alpha.min(n / big);
    let mut shapes: Vec<usize> = (2..=l_max).rev().collect();
    let p_star_large = min_blocks.iter().filter(|b| b.count_ones() as usize >= big).count();
    if alpha == min_blocks.len() && p_star_large >= 2 {
        shapes.retain(|&l| l != p_star_large);
        shapes.insert(0, p_star_large);
    }
    for l in shapes {
        let s = alpha - l;
        let mut sigma_stream = SigmaStream::new(ctx.n, cap, s);
        // Seed the stream with the minimum partition's small blocks when the
        // shape matches.
        if alpha == min_blocks.len() && p_star_large == l {
            let smalls: Vec<u64> = min_blocks
                .iter()
                .copied()
                .filter(|b| (b.count_ones() as usize) < big)
                .collect();
            if smalls.len() == s {
                sigma_stream.seed(smalls);
            }
        }
        while let Some(sigma) = sigma_stream.next(ctx)? {
            let used: u64 = sigma.iter().copied().fold(0, |a, b| a | b);
            let rest = full_mask(n) & !used;
            if (rest.count_ones() as usize) < l * big {
                continue;
            }
            if !ctx.coverable(rest, l)? {
                continue;
            }
            match search_lines(ctx, &sigma, rest, l)? {
                AlphaOutcome::NoConfig => {}
                other => return Ok(other),
            }
        }
    }
    Ok(AlphaOutcome::NoConfig)
}

/// Stream of canonical families of `s` disjoint cliques, each of size at
/// most `cap`. Families are produced in ascending order of their sorted
/// minimum vertices; an optional seed family is produced first.
struct SigmaStream {
    n: usize,
    cap: usize,
    s: usize,
    seed: Option<Vec<u64>>,
    stack: Vec<(Vec<u64>, u64)>, // (family so far, lowest vertex allowed next)
    started: bool,
}

impl SigmaStream {
    fn new(n: usize, cap: usize, s: usize) -> SigmaStream {
        SigmaStream { n, cap, s, seed: None, stack: Vec::new(), started: false }
    }

    fn seed(&mut self, family: Vec<u64>) {
        self.seed = Some(family);
    }

    fn next(&mut self, ctx: &mut OptCp<'_>) -> Result<Option<Vec<u64>>> {
        if let Some(seed) = self.seed.take() {
            return Ok(Some(seed));
        }
        if !self.started {
            self.started = true;
            self.stack.push((Vec::new(), 0));
        }
        while let Some((family, from)) = self.stack.pop() {
            ctx.charge()?;
            if family.len() == self.s {
                if self.seeded_equals(&family) {
                    continue;
                }
                return Ok(Some(family));
            }
            // Extend with a clique whose minimum vertex is >= from, taken
            // from the unused vertices. Push extensions in reverse so the
            // lexicographically smallest continuation pops first.
            let used: u64 = family.iter().copied().fold(0, |a, b| a | b);
            let mut extensions: Vec<(Vec<u64>, u64)> = Vec::new();
            for anchor in (from as usize)..self.n {
                if used & (1u64 << anchor) != 0 {
                    continue;
                }
                let avail = ctx.adj[anchor] & !used & !((1u64 << anchor) - 1) & full_mask(self.n);
                let mut cliques = Vec::new();
                enumerate_cliques_from(ctx, anchor, avail, self.cap, &mut cliques)?;
                for c in cliques {
                    let mut fam = family.clone();
                    fam.push(c);
                    extensions.push((fam, anchor as u64 + 1));
                }
            }
            for e in extensions.into_iter().rev() {
                self.stack.push(e);
            }
        }
        Ok(None)
    }

    fn seeded_equals(&self, _family: &[u64]) -> bool {
        false // seed is consumed before enumeration starts; duplicates are
              // harmless for a first-success search
    }
}

/// All cliques containing `anchor` with other members drawn from `avail`
/// (all above `anchor`), of size at most `cap`.
fn enumerate_cliques_from(
    ctx: &mut OptCp<'_>,
    anchor: usize,
    avail: u64,
    cap: usize,
    out: &mut Vec<u64>,
) -> Result<()> {
    ctx.charge()?;
    fn rec(
        adj: &[u64],
        clique: u64,
        cand: u64,
        cap: usize,
        out: &mut Vec<u64>,
    ) {
        out.push(clique);
        if (clique.count_ones() as usize) >= cap {
            return;
        }
        let mut m = cand;
        while m != 0 {
            let u = m.trailing_zeros() as usize;
            m &= m - 1;
            let above = if u + 1 >= 64 { 0u64 } else { !((1u64 << (u + 1)) - 1) };
            rec(adj, clique | (1u64 << u), cand & adj[u] & above, cap, out);
        }
    }
    if cap == 0 {
        return Ok(());
    }
    rec(&ctx.adj, 1u64 << anchor, avail, cap, out);
    Ok(())
}

/// Enumerate representatives and separator lines for `l >= 2` large cliques
/// over the vertex set `rest`, assigning every vertex by exact side tests.
fn search_lines(ctx: &mut OptCp<'_>, sigma: &[u64], rest: u64, l: usize) -> Result<AlphaOutcome> {
    let rest_verts = bits_of(rest);
    // Candidate representatives ordered by degree inside `rest` (descending),
    // then id: high-degree vertices are likelier hearts of large cliques.
    let mut cand = rest_verts.clone();
    cand.sort_by_key(|&v| (std::cmp::Reverse((ctx.adj[v] & rest).count_ones()), v));
    let mut reps = vec![0usize; l];
    search_reps(ctx, sigma, rest, l, &cand, 0, 0, &mut reps)
}

fn search_reps(
    ctx: &mut OptCp<'_>,
    sigma: &[u64],
    rest: u64,
    l: usize,
    cand: &[usize],
    from: usize,
    depth: usize,
    reps: &mut Vec<usize>,
) -> Result<AlphaOutcome> {
    if depth == l {
        // Coverage precheck: every vertex of rest adjacent to some rep.
        let mut covered = 0u64;
        for &c in reps.iter() {
            covered |= ctx.adj[c] | (1u64 << c);
        }
        if rest & !covered != 0 {
            return Ok(AlphaOutcome::NoConfig);
        }
        return assign_with_lines(ctx, sigma, rest, reps);
    }
    for i in from..cand.len() {
        if cand.len() - i < l - depth {
            break;
        }
        reps[depth] = cand[i];
        match search_reps(ctx, sigma, rest, l, cand, i + 1, depth + 1, reps)? {
            AlphaOutcome::NoConfig => {}
            other => return Ok(other),
        }
    }
    Ok(AlphaOutcome::NoConfig)
}

/// With representatives fixed, choose an owner and a line pair for every
/// clique pair, propagating membership eliminations.
fn assign_with_lines(
    ctx: &mut OptCp<'_>,
    sigma: &[u64],
    rest: u64,
    reps: &[usize],
) -> Result<AlphaOutcome> {
    ctx.charge()?;
    let l = reps.len();
    let rest_verts = bits_of(rest);
    let rep_mask: u64 = reps.iter().fold(0u64, |a, &c| a | (1u64 << c));
    // membership[vertex] = bitmask over clique indices it may still join
    let mut init: BTreeMap<usize, u32> = BTreeMap::new();
    for &p in &rest_verts {
        if let Some(t) = reps.iter().position(|&c| c == p) {
            init.insert(p, 1u32 << t);
        } else {
            let mut m = 0u32;
            for (t, &c) in reps.iter().enumerate() {
                if ctx.adj[c] & (1u64 << p) != 0 {
                    m |= 1 << t;
                }
            }
            if m == 0 {
                return Ok(AlphaOutcome::NoConfig);
            }
            init.insert(p, m);
        }
    }
    let pairs: Vec<(usize, usize)> =
        (0..l).flat_map(|i| ((i + 1)..l).map(move |j| (i, j))).collect();
    line_level(ctx, sigma, rest, reps, rep_mask, &pairs, 0, &init)
}

fn line_level(
    ctx: &mut OptCp<'_>,
    sigma: &[u64],
    rest: u64,
    reps: &[usize],
    rep_mask: u64,
    pairs: &[(usize, usize)],
    level: usize,
    membership: &BTreeMap<usize, u32>,
) -> Result<AlphaOutcome> {
    if level == pairs.len() {
        return finish_config(ctx, sigma, rest, reps, membership);
    }
    let (ti, tj) = pairs[level];
    for (owner, other) in [(ti, tj), (tj, ti)] {
        let c_o = reps[owner];
        let c_other = reps[other];
        // Line points: an adjacent pair among the owner's neighbors in rest,
        // excluding all representatives.
        let region = ctx.adj[c_o] & rest & !rep_mask;
        let verts = bits_of(region);
        for (ai, &u) in verts.iter().enumerate() {
            for &v in verts.iter().skip(ai + 1) {
                if ctx.adj[u] & (1u64 << v) == 0 {
                    continue;
                }
                ctx.charge()?;
                let mut next = membership.clone();
                let mut dead = false;
                let mut inconsistent = false;
                for (&p, mask) in next.iter_mut() {
                    let (keep_owner, keep_other) = if p == u || p == v {
                        // Line points belong to the owning clique.
                        (true, false)
                    } else if p == c_o {
                        (true, true)
                    } else if p == c_other {
                        // The opposing representative stays on its side.
                        (false, true)
                    } else {
                        match classify_vs_line(ctx, p, u, v, c_o) {
                            None => (false, true),
                            Some(SideResult::SameSide) => (true, false),
                            Some(SideResult::OppositeSide) => (false, true),
                            Some(SideResult::Inconsistent) => {
                                inconsistent = true;
                                break;
                            }
                        }
                    };
                    if !keep_owner {
                        *mask &= !(1u32 << owner);
                    }
                    if !keep_other {
                        *mask &= !(1u32 << other);
                    }
                    if *mask == 0 {
                        dead = true;
                        break;
                    }
                }
                if inconsistent {
                    return Ok(AlphaOutcome::Inconsistent);
                }
                if dead {
                    continue;
                }
                match line_level(ctx, sigma, rest, reps, rep_mask, pairs, level + 1, &next)? {
                    AlphaOutcome::NoConfig => {}
                    other_outcome => return Ok(other_outcome),
                }
            }
        }
    }
    Ok(AlphaOutcome::NoConfig)
}

fn classify_vs_line(ctx: &mut OptCp<'_>, p: usize, u: usize, v: usize, c: usize) -> Option<SideResult> {
    ctx.cached_side(p, u, v, c)
}

fn finish_config(
    ctx: &mut OptCp<'_>,
    sigma: &[u64],
    rest: u64,
    reps: &[usize],
    membership: &BTreeMap<usize, u32>,
) -> Result<AlphaOutcome> {
    ctx.charge()?;
    let l = reps.len();
    let mut cliques = vec![0u64; l];
    for (&p, &mask) in membership.iter() {
        if mask.count_ones() != 1 {
            // The pairwise eliminations leave at most one candidate; more
            // than one only happens when some pair never constrained p,
            // which the per-pair update rules exclude.
            return Ok(AlphaOutcome::NoConfig);
        }
        let t = mask.trailing_zeros() as usize;
        cliques[t] |= 1u64 << p;
    }
    let mut covered = 0u64;
    for (t, &c) in cliques.iter().enumerate() {
        let members = bits_of(c);
        for (i, &a) in members.iter().enumerate() {
            for &b in members.iter().skip(i + 1) {
                if ctx.adj[a] & (1u64 << b) == 0 {
                    return Ok(AlphaOutcome::NoConfig);
                }
            }
        }
        covered |= c;
        let _ = t;
    }
    if covered != rest {
        return Ok(AlphaOutcome::NoConfig);
    }
    let mut blocks: Vec<u64> = sigma.to_vec();
    blocks.extend(cliques.iter().copied().filter(|&c| c != 0));
    Ok(AlphaOutcome::Found(blocks_to_partition(&blocks)))
}

/// Record of one committed ball, for invariant checks and reports.
#[derive(Clone, Debug)]
pub struct BallRecord {
    pub center: usize,
    pub r_star: usize,
    pub inner_ball: BTreeSet<usize>,
    pub inner_size: usize,
    pub committed_ball: BTreeSet<usize>,
    pub committed_size: usize,
}

#[derive(Clone, Debug)]
pub struct Mincp2Output {
    pub solved: Solved,
    pub params: PtasParams,
    pub balls: Vec<BallRecord>,
}

/// Build a certificate for a failed ball, shrinking it greedily while the
/// failure still reproduces (opt_cp failures only; ball-growth certificates
/// keep the full ball).
fn make_certificate(
    g: &UdgGraph,
    ball: &BTreeSet<usize>,
    reason: CertReason,
    center: usize,
    radius: usize,
    params: &PtasParams,
    weighted: bool,
    budget: &MetricBudget,
) -> Certificate {
    let mut vertices: Vec<usize> = ball.iter().copied().collect();
    if matches!(reason, CertReason::NoValidConfiguration | CertReason::InconsistentQuadrilateral) {
        let mut keep: BTreeSet<usize> = ball.clone();
        let mut order: Vec<usize> = vertices.iter().rev().copied().collect();
        order.retain(|&v| v != center);
        for v in order {
            if keep.len() <= 2 {
                break;
            }
            let mut trial = keep.clone();
            trial.remove(&v);
            let (sub, _) = g.induced(&trial);
            match opt_cp(&sub, params.ell, budget) {
                Ok(OptCpOutcome::Failed(r)) if r == reason => {
                    keep = trial;
                }
                _ => {}
            }
        }
        vertices = keep.into_iter().collect();
    }
    let set: BTreeSet<usize> = vertices.iter().copied().collect();
    let (sub, ids) = g.induced(&set);
    let center_local = ids.iter().position(|&v| v == center);
    Certificate {
        reason,
        original_vertices: ids,
        graph: sub,
        center: center_local,
        radius: Some(radius),
        epsilon: Some(params.epsilon.clone()),
        beta: Some(params.beta),
        ell: Some(params.ell),
        weighted,
    }
}

/// Result of growing one ball to its stopping radius.
#[derive(Clone, Debug)]
pub struct BallGrowth {
    pub record: BallRecord,
    pub partition: CliquePartition,
}

/// The inner loop of the ball-growing algorithm: grow `r` while the ball
/// partition still gains more than a `1+epsilon` factor per two extra hops,
/// then return the radius-`r+2` commitment. Shared by the sequential solver
/// and the distributed simulator.
pub fn grow_ball(
    g: &UdgGraph,
    v: usize,
    alive: &BTreeSet<usize>,
    params: &PtasParams,
    budget: &MetricBudget,
) -> Result<std::result::Result<BallGrowth, Box<Certificate>>> {
    let growth = Rational::one() + &params.epsilon;
    let mut cache: BTreeMap<usize, (BTreeSet<usize>, CliquePartition)> = BTreeMap::new();
    let mut solve = |r: usize| -> Result<std::result::Result<usize, Box<Certificate>>> {
        if let Some((_, p)) = cache.get(&r) {
            return Ok(Ok(p.size()));
        }
        let ball = g.ball_filtered(v, r, Some(alive));
        let (sub, ids) = g.induced(&ball);
        match opt_cp(&sub, params.ell, budget)? {
            OptCpOutcome::Partition(p) => {
                let global = p.relabel(&ids);
                let size = global.size();
                cache.insert(r, (ball, global));
                Ok(Ok(size))
            }
            OptCpOutcome::Failed(reason) => {
                Ok(Err(Box::new(make_certificate(g, &ball, reason, v, r, params, false, budget))))
            }
        }
    };

    let mut r = 0usize;
    loop {
        let s_r = match solve(r)? {
            Ok(s) => s,
            Err(c) => return Ok(Err(c)),
        };
        let s_r2 = match solve(r + 2)? {
            Ok(s) => s,
            Err(c) => return Ok(Err(c)),
        };
        if rat_int(s_r2 as i64) > &growth * rat_int(s_r as i64) {
            r += 1;
            if r > params.beta {
                let ball = g.ball_filtered(v, r, Some(alive));
                return Ok(Err(Box::new(make_certificate(
                    g,
                    &ball,
                    CertReason::BallTooDeep,
                    v,
                    r,
                    params,
                    false,
                    budget,
                ))));
            }
        } else {
            break;
        }
    }
    let (inner_ball, inner_part) = cache.get(&r).expect("solved above").clone();
    let (outer_ball, outer_part) = cache.get(&(r + 2)).expect("solved above").clone();
    Ok(Ok(BallGrowth {
        record: BallRecord {
            center: v,
            r_star: r,
            inner_size: inner_part.size(),
            inner_ball,
            committed_size: outer_part.size(),
            committed_ball: outer_ball,
        },
        partition: outer_part,
    }))
}

/// Algorithm: repeatedly pick the lowest remaining vertex, grow its ball
/// while the partition size still grows by more than `1+epsilon` per two
/// hops, then commit the partition of the grown ball and delete it.
pub fn mincp2(g: &UdgGraph, eps: &Rational, budget: &MetricBudget) -> Result<Mincp2Output> {
    mincp2_impl(g, eps, budget, None)
}

/// Sequential run with an explicit center schedule, used to replay
/// distributed executions. Every scheduled center must still be alive when
/// its turn comes; remaining vertices after the schedule fall back to
/// lowest-id order.
pub fn mincp2_with_order(
    g: &UdgGraph,
    eps: &Rational,
    budget: &MetricBudget,
    order: &[usize],
) -> Result<Mincp2Output> {
    mincp2_impl(g, eps, budget, Some(order))
}

fn mincp2_impl(
    g: &UdgGraph,
    eps: &Rational,
    budget: &MetricBudget,
    order: Option<&[usize]>,
) -> Result<Mincp2Output> {
    if !g.has_lengths() {
        return Err(Error::MissingLengths);
    }
    let params = derive_params(eps)?;
    let mut alive: BTreeSet<usize> = (0..g.n()).collect();
    let mut committed = CliquePartition::new(vec![]);
    let mut balls: Vec<BallRecord> = Vec::new();
    let mut queue: Vec<usize> = order.map(|o| o.to_vec()).unwrap_or_default();
    queue.reverse();

    while !alive.is_empty() {
        let v = loop {
            match queue.pop() {
                Some(c) => {
                    if !alive.contains(&c) {
                        return Err(Error::InvariantViolation(format!(
                            "scheduled center {c} was already covered"
                        )));
                    }
                    break c;
                }
                None => break *alive.iter().next().expect("alive nonempty"),
            }
        };
        match grow_ball(g, v, &alive, &params, budget)? {
            Err(c) => return Ok(Mincp2Output { solved: Solved::NotUdg(c), params, balls }),
            Ok(growth) => {
                committed = committed.union(growth.partition);
                for u in &growth.record.committed_ball {
                    alive.remove(u);
                }
                balls.push(growth.record);
            }
        }
    }

    check_runtime_invariants(g, &params, &balls, &committed)?;
    Ok(Mincp2Output { solved: Solved::Partition(committed), params, balls })
}

/// Structural facts the analysis relies on, asserted on every run: inner
/// balls are pairwise non-adjacent, and the committed size respects the
/// per-ball growth bound.
fn check_runtime_invariants(
    g: &UdgGraph,
    params: &PtasParams,
    balls: &[BallRecord],
    committed: &CliquePartition,
) -> Result<()> {
    for (i, a) in balls.iter().enumerate() {
        for b in balls.iter().skip(i + 1) {
            for &u in &a.inner_ball {
                for &w in &b.inner_ball {
                    if g.has_edge(u, w) {
                        return Err(Error::InvariantViolation(format!(
                            "inner balls of centers {} and {} are adjacent via ({u},{w})",
                            a.center, b.center
                        )));
                    }
                }
            }
        }
    }
    let growth = Rational::one() + &params.epsilon;
    let inner_sum: usize = balls.iter().map(|b| b.inner_size).sum();
    let committed_sum: usize = balls.iter().map(|b| b.committed_size).sum();
    if rat_int(committed_sum as i64) > &growth * rat_int(inner_sum as i64) {
        return Err(Error::InvariantViolation(format!(
            "stretch bound violated: {committed_sum} > (1+eps) * {inner_sum}"
        )));
    }
    if committed.size() != committed_sum {
        return Err(Error::InvariantViolation(
            "committed partition size disagrees with per-ball sizes".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_instance, GenSpec};
    use crate::graph::build_udg;
    use crate::oracle::{exact_cover, OracleBudget};
    use crate::partition::validate_partition;
    use crate::rational::rat;

    #[test]
    fn derive_params_pinned_values() {
        let p = derive_params(&rat_int(1)).unwrap();
        assert_eq!(p.beta, 24);
        assert_eq!(p.ell, 9604);
        // defining inequality holds at beta and fails at beta - 2
        let two = rat_int(2);
        let pow = |e: u32| num_traits::pow::Pow::pow(two.clone(), e as u64);
        assert!(pow(12) > rat_int(50) * rat_int(50));
        assert!(pow(11) <= rat_int(48) * rat_int(48));
    }

    #[test]
    fn derive_params_monotone_in_epsilon() {
        let b1 = derive_params(&rat(1, 4)).unwrap().beta;
        let b2 = derive_params(&rat(1, 2)).unwrap().beta;
        let b3 = derive_params(&rat_int(1)).unwrap().beta;
        assert!(b1 >= b2 && b2 >= b3);
        for eps in [rat(1, 4), rat(1, 2), rat_int(1)] {
            let p = derive_params(&eps).unwrap();
            assert_eq!(p.ell, (4 * p.beta + 2) * (4 * p.beta + 2));
            let root = (p.ell as f64).sqrt() as usize;
            assert_eq!(root * root, p.ell);
        }
    }

    #[test]
    fn epsilon_above_one_is_clamped() {
        assert_eq!(derive_params(&rat_int(5)).unwrap(), derive_params(&rat_int(1)).unwrap());
    }

    #[test]
    fn opt_cp_single_clique() {
        let ps = gen_instance(&GenSpec::SingleCell { n: 8, k: 1 }, 3).unwrap();
        let g = build_udg(&ps).unwrap();
        if g.edge_count() == 8 * 7 / 2 {
            match opt_cp(&g, 9604, &MetricBudget::default()).unwrap() {
                OptCpOutcome::Partition(p) => assert_eq!(p.size(), 1),
                _ => panic!("expected partition"),
            }
        }
    }

    #[test]
    fn opt_cp_two_distant_cliques_uses_lines() {
        // two 5-cliques on a line, distances only
        let mut pts = Vec::new();
        for i in 0..5 {
            pts.push((rat(i, 10), rat_int(0)));
        }
        for i in 0..5 {
            pts.push((rat_int(5) + rat(i, 10), rat_int(0)));
        }
        let g = build_udg(&crate::graph::PointSet::new(pts)).unwrap();
        match opt_cp(&g, 9604, &MetricBudget::default()).unwrap() {
            OptCpOutcome::Partition(p) => {
                assert_eq!(p.size(), 2);
                assert!(validate_partition(&g, &p).valid);
            }
            _ => panic!("expected partition"),
        }
    }

    #[test]
    fn opt_cp_star_with_six_leaves_is_certified() {
        // K_{1,6} with all edge lengths 1: six pairwise far neighbors at
        // distance 1 from the center cannot be realized in the plane.
        let edges: Vec<(usize, usize, Rational)> =
            (1..=6).map(|v| (0, v, rat_int(1))).collect();
        let g = UdgGraph::from_edges_with_sqlen(7, &edges).unwrap();
        match opt_cp(&g, 9604, &MetricBudget::default()).unwrap() {
            OptCpOutcome::Failed(CertReason::NoValidConfiguration) => {}
            other => panic!("expected a certificate, got {other:?}"),
        }
    }

    #[test]
    fn mincp2_edgeless_graph_gives_singletons() {
        let g = UdgGraph::from_edges(5, &[]).unwrap();
        let out = mincp2(&g, &rat_int(1), &MetricBudget::default()).unwrap();
        match out.solved {
            Solved::Partition(p) => assert_eq!(p.size(), 5),
            _ => panic!("expected partition"),
        }
    }

    #[test]
    fn mincp2_on_realized_udg_meets_ratio() {
        let ps = gen_instance(&GenSpec::RandomUdg { n: 18, box_side: 3 }, 21).unwrap();
        let g = build_udg(&ps).unwrap();
        let opt = exact_cover(&g, &OracleBudget::default()).unwrap().size();
        let out = mincp2(&g, &rat_int(1), &MetricBudget::default()).unwrap();
        match out.solved {
            Solved::Partition(p) => {
                assert!(validate_partition(&g, &p).valid);
                assert!(p.size() <= 2 * opt, "size {} vs opt {opt}", p.size());
            }
            Solved::NotUdg(c) => panic!("unexpected certificate: {:?}", c.reason),
        }
    }

    #[test]
    fn inconsistent_lengths_produce_certificate() {
        // two 5-cliques with garbage internal lengths joined sparsely enough
        // that lines are needed; the quadruple tests must blow up
        let mut edges: Vec<(usize, usize, Rational)> = Vec::new();
        for u in 0..5 {
            for v in (u + 1)..5 {
                // triangle-inequality-violating square lengths
                edges.push((u, v, if (u + v) % 2 == 0 { rat_int(1) } else { rat(1, 100) }));
            }
        }
        for u in 5..10 {
            for v in (u + 1)..10 {
                edges.push((u, v, rat(1, 2)));
            }
        }
        let g = UdgGraph::from_edges_with_sqlen(10, &edges).unwrap();
        match opt_cp(&g, 9604, &MetricBudget::default()).unwrap() {
            OptCpOutcome::Failed(CertReason::InconsistentQuadrilateral) => {}
            other => panic!("expected inconsistent quadrilateral, got {other:?}"),
        }
    }
}
