//! Deterministic instance generators.
//!
//! All randomness flows from a caller-provided seed through ChaCha streams;
//! random coordinates land on the 2^-20 grid so every derived squared
//! length is an exact small rational.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::PointSet;
use crate::rational::{rat, rat_int, sq_dist, Rational, GRID_DENOM_LOG2};

/// Generator specification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenSpec {
    /// `n` uniform grid points in a `box_side x box_side` square.
    RandomUdg { n: usize, box_side: u32 },
    /// Two concentric k-gons (odd k) where each `a_i` is adjacent to
    /// everything except its antipode `b_i`; weights k on the outer gon and
    /// 1 on the inner one.
    TwoKgon { k: usize },
    /// Two t-cliques joined by a perfect matching.
    MatchingCliques { t: usize },
    /// `n` uniform grid points inside one `k x k` cell.
    SingleCell { n: usize, k: u32 },
}

/// Dyadic grid coordinate in `[0, limit)`.
fn grid_coord(rng: &mut ChaCha8Rng, limit: u32) -> Rational {
    let max = (limit as i64) << GRID_DENOM_LOG2;
    let v = rng.gen_range(0..max);
    Rational::new(BigInt::from(v), BigInt::one() << GRID_DENOM_LOG2)
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, box_side: u32) -> Result<Vec<(Rational, Rational)>> {
    let mut pts: Vec<(Rational, Rational)> = Vec::with_capacity(n);
    let mut seen = BTreeSet::new();
    let mut attempts = 0;
    while pts.len() < n {
        attempts += 1;
        if attempts > 100 * n + 1000 {
            return Err(Error::InfeasibleGenerator(format!(
                "could not place {n} distinct grid points in a {box_side}x{box_side} box"
            )));
        }
        let p = (grid_coord(rng, box_side), grid_coord(rng, box_side));
        let key = (p.0.clone(), p.1.clone());
        if seen.insert(key) {
            pts.push(p);
        }
    }
    Ok(pts)
}

/// Round `v` to the nearest multiple of 2^-20.
fn snap(v: f64) -> Rational {
    let scaled = (v * (1u64 << GRID_DENOM_LOG2) as f64).round() as i64;
    Rational::new(BigInt::from(scaled), BigInt::one() << GRID_DENOM_LOG2)
}

fn two_kgon(k: usize) -> Result<PointSet> {
    if k < 3 || k % 2 == 0 {
        return Err(Error::InfeasibleGenerator(format!(
            "two_kgon requires odd k >= 3 (antipodal within-gon pairs at distance 2R > 1 are \
             required to be adjacent for even k); got {k}"
        )));
    }
    let kf = k as f64;
    let pi = std::f64::consts::PI;
    // All constraints in terms of R^2:
    //   antipodal pairs beyond unit distance: 4R^2 > 1
    //   within-gon chords at most 1:          2R^2 (1 - cos(pi (k-1)/k)) <= 1
    //   nearest cross pairs at most 1:        2R^2 (1 + cos(2 pi / k))   <= 1
    let within = 1.0 / (2.0 * (1.0 - (pi * (kf - 1.0) / kf).cos()));
    let cross = 1.0 / (2.0 * (1.0 + (2.0 * pi / kf).cos()));
    let upper = within.min(cross);
    let lower = 0.25;
    if upper <= lower + 1e-9 {
        return Err(Error::InfeasibleGenerator(format!(
            "two_kgon radius window empty for k = {k}"
        )));
    }
    let r = ((lower + upper) / 2.0).sqrt();
    let mut points = Vec::with_capacity(2 * k);
    for i in 0..k {
        let theta = 2.0 * pi * (i as f64) / kf;
        points.push((snap(r * theta.cos()), snap(r * theta.sin())));
    }
    // b_i is exactly antipodal to a_i.
    for i in 0..k {
        let (x, y) = &points[i];
        points.push((-x.clone(), -y.clone()));
    }
    let mut weights = vec![rat_int(k as i64); k];
    weights.extend(vec![rat_int(1); k]);
    let ps = PointSet::with_weights(points, weights);

    // Exact verification of the required adjacency pattern on the snapped
    // coordinates.
    let one = Rational::one();
    for i in 0..k {
        for j in 0..k {
            let d_ab = sq_dist(&ps.points[i], &ps.points[k + j]);
            if i == j {
                if d_ab <= one {
                    return Err(Error::InfeasibleGenerator(format!(
                        "two_kgon: antipodal pair {i} ended up adjacent after rounding"
                    )));
                }
            } else if d_ab > one {
                return Err(Error::InfeasibleGenerator(format!(
                    "two_kgon: cross pair ({i},{j}) not adjacent after rounding"
                )));
            }
            if i < j {
                if sq_dist(&ps.points[i], &ps.points[j]) > one
                    || sq_dist(&ps.points[k + i], &ps.points[k + j]) > one
                {
                    return Err(Error::InfeasibleGenerator(format!(
                        "two_kgon: within-gon pair ({i},{j}) not adjacent after rounding"
                    )));
                }
            }
        }
    }
    Ok(ps)
}

fn matching_cliques(t: usize) -> Result<PointSet> {
    if t == 0 {
        return Err(Error::InfeasibleGenerator("matching_cliques requires t >= 1".into()));
    }
    let mut points = Vec::with_capacity(2 * t);
    for i in 0..t {
        points.push((rat(i as i64, 4 * t as i64), rat_int(0)));
    }
    for i in 0..t {
        points.push((rat(i as i64, 4 * t as i64), rat_int(1)));
    }
    Ok(PointSet::new(points))
}

/// Generate an instance; deterministic under `seed`.
pub fn gen_instance(spec: &GenSpec, seed: u64) -> Result<PointSet> {
    match spec {
        GenSpec::RandomUdg { n, box_side } => {
            if *box_side == 0 {
                return Err(Error::InfeasibleGenerator("box_side must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(PointSet::new(random_points(&mut rng, *n, *box_side)?))
        }
        GenSpec::TwoKgon { k } => two_kgon(*k),
        GenSpec::MatchingCliques { t } => matching_cliques(*t),
        GenSpec::SingleCell { n, k } => {
            if *k == 0 {
                return Err(Error::InfeasibleGenerator("cell size must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x5ce1)); // distinct stream
            Ok(PointSet::new(random_points(&mut rng, *n, *k)?))
        }
    }
}

/// Attach seeded random integer weights in `1..=max_weight`.
pub fn with_random_weights(ps: &PointSet, seed: u64, max_weight: u32) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x77e1)); // weight stream
    let weights =
        (0..ps.len()).map(|_| rat_int(rng.gen_range(1..=max_weight) as i64)).collect();
    PointSet { points: ps.points.clone(), weights: Some(weights) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_udg;
    use crate::oracle::{exact_cover, exact_cover_weighted, OracleBudget};

    #[test]
    fn random_udg_is_deterministic_and_in_box() {
        let a = gen_instance(&GenSpec::RandomUdg { n: 20, box_side: 3 }, 42).unwrap();
        let b = gen_instance(&GenSpec::RandomUdg { n: 20, box_side: 3 }, 42).unwrap();
        assert_eq!(a, b);
        let three = rat_int(3);
        for (x, y) in &a.points {
            assert!(*x >= rat_int(0) && *x < three && *y >= rat_int(0) && *y < three);
        }
    }

    #[test]
    fn single_vertex_instance_has_optimum_one() {
        let ps = gen_instance(&GenSpec::RandomUdg { n: 1, box_side: 5 }, 9).unwrap();
        let g = build_udg(&ps).unwrap();
        let p = exact_cover(&g, &OracleBudget::default()).unwrap();
        assert_eq!(p.size(), 1);
    }

    #[test]
    fn two_kgon_seven_has_weighted_optimum_eight() {
        let ps = gen_instance(&GenSpec::TwoKgon { k: 7 }, 0).unwrap();
        let g = build_udg(&ps).unwrap();
        assert_eq!(g.n(), 14);
        // a_i adjacent to everything except b_i
        for i in 0..7 {
            assert!(!g.has_edge(i, 7 + i));
            assert_eq!(g.degree(i), 12);
        }
        let (_, cost) = exact_cover_weighted(&g, &OracleBudget::default()).unwrap();
        assert_eq!(cost, rat_int(8));
    }

    #[test]
    fn two_kgon_even_k_is_infeasible() {
        assert!(matches!(
            gen_instance(&GenSpec::TwoKgon { k: 8 }, 0),
            Err(Error::InfeasibleGenerator(_))
        ));
    }

    #[test]
    fn matching_cliques_structure_and_optimum() {
        for t in 2..=5 {
            let ps = gen_instance(&GenSpec::MatchingCliques { t }, 0).unwrap();
            let g = build_udg(&ps).unwrap();
            assert_eq!(g.n(), 2 * t);
            for i in 0..t {
                for j in 0..t {
                    assert_eq!(g.has_edge(i, t + j), i == j, "cross pair ({i},{j})");
                }
            }
            let p = exact_cover(&g, &OracleBudget::default()).unwrap();
            assert_eq!(p.size(), 2, "matching_cliques({t})");
        }
    }

    #[test]
    fn generated_instances_have_unit_edges() {
        for seed in 0..5 {
            let ps = gen_instance(&GenSpec::RandomUdg { n: 15, box_side: 2 }, seed).unwrap();
            let g = build_udg(&ps).unwrap();
            let one = rat_int(1);
            for (_, l) in g.sqlen_map() {
                assert!(*l <= one);
            }
        }
    }
}
