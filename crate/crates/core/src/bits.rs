//! Small bitset helpers for the combinatorial kernels (n <= 64).

pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn bits_of(mut m: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// Greedy independent set (lowest id first). Its size lower-bounds the size
/// of any clique partition of the induced subgraph.
pub fn greedy_independent_lb(adj: &[u64], mut rem: u64) -> usize {
    let mut count = 0;
    while rem != 0 {
        let v = rem.trailing_zeros() as usize;
        count += 1;
        rem &= !(adj[v] | (1u64 << v));
    }
    count
}

/// All maximal cliques containing `v` within `rem`, via Bron-Kerbosch with
/// pivoting. Deterministic output order (descending size, then bit pattern).
pub fn maximal_cliques_containing(
    adj: &[u64],
    v: usize,
    rem: u64,
    nodes: &mut u64,
    max_nodes: u64,
) -> Option<Vec<u64>> {
    let mut out = Vec::new();
    fn bk(
        adj: &[u64],
        r: u64,
        p: u64,
        x: u64,
        out: &mut Vec<u64>,
        nodes: &mut u64,
        max_nodes: u64,
    ) -> bool {
        *nodes += 1;
        if *nodes > max_nodes {
            return false;
        }
        if p == 0 && x == 0 {
            out.push(r);
            return true;
        }
        // Pivot on the candidate covering the most of P.
        let mut pivot = usize::MAX;
        let mut best = usize::MAX;
        let mut m = p | x;
        while m != 0 {
            let u = m.trailing_zeros() as usize;
            m &= m - 1;
            let missed = (p & !adj[u]).count_ones() as usize;
            if pivot == usize::MAX || missed < best {
                pivot = u;
                best = missed;
            }
        }
        let mut cand = p & !adj[pivot];
        let mut p = p;
        let mut x = x;
        while cand != 0 {
            let u = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            if !bk(adj, r | (1u64 << u), p & adj[u], x & adj[u], out, nodes, max_nodes) {
                return false;
            }
            p &= !(1u64 << u);
            x |= 1u64 << u;
        }
        true
    }
    let ok = bk(adj, 1u64 << v, adj[v] & rem, 0, &mut out, nodes, max_nodes);
    if !ok {
        return None;
    }
    out.sort_by_key(|&c| (std::cmp::Reverse(c.count_ones()), c));
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximal_cliques_of_a_diamond() {
        // 0-1, 1-2, 2-0, 2-3, 3-0: cliques containing 0: {0,1,2}, {0,2,3}
        let adj = vec![0b1110, 0b0101, 0b1011, 0b0101];
        let mut nodes = 0;
        let cl = maximal_cliques_containing(&adj, 0, 0b1111, &mut nodes, 1 << 20).unwrap();
        assert_eq!(cl.len(), 2);
        assert!(cl.contains(&0b0111));
        assert!(cl.contains(&0b1101));
    }

    #[test]
    fn greedy_lb_on_path() {
        // path 0-1-2-3: greedy takes 0 and 2 -> lb 2
        let adj = vec![0b0010, 0b0101, 0b1010, 0b0100];
        assert_eq!(greedy_independent_lb(&adj, 0b1111), 2);
    }
}
