//! Non-UDG certificates: a subgraph with edge lengths on which the failing
//! check reproduces.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::graph::UdgGraph;
use crate::rational::{rat_int, Rational};

/// Why the certificate's subgraph cannot be a unit disk graph (or, for
/// `NoCneeo`, cannot admit the edge ordering every UDG admits).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertReason {
    /// Ball growth exceeded the radius bound that holds for every UDG.
    BallTooDeep,
    /// No separator-line configuration yields a clique partition.
    NoValidConfiguration,
    /// Some four-point distance set admits no planar realization.
    InconsistentQuadrilateral,
    /// No co-bipartite neighborhood edge elimination ordering exists.
    NoCneeo,
}

impl fmt::Display for CertReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CertReason::BallTooDeep => "ball_too_deep",
            CertReason::NoValidConfiguration => "no_valid_configuration",
            CertReason::InconsistentQuadrilateral => "inconsistent_quadrilateral",
            CertReason::NoCneeo => "no_cneeo",
        };
        write!(f, "{s}")
    }
}

impl CertReason {
    pub fn parse(s: &str) -> Option<CertReason> {
        match s {
            "ball_too_deep" => Some(CertReason::BallTooDeep),
            "no_valid_configuration" => Some(CertReason::NoValidConfiguration),
            "inconsistent_quadrilateral" => Some(CertReason::InconsistentQuadrilateral),
            "no_cneeo" => Some(CertReason::NoCneeo),
            _ => None,
        }
    }
}

/// Evidence that an input is not a UDG. `graph` uses local vertex ids
/// `0..m-1`; `original_vertices[i]` maps local id `i` back to the input.
/// The parameter fields carry whatever the failing run used, so the failure
/// replays on the certificate alone.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub reason: CertReason,
    pub original_vertices: Vec<usize>,
    pub graph: UdgGraph,
    pub center: Option<usize>,
    pub radius: Option<usize>,
    pub epsilon: Option<Rational>,
    pub beta: Option<usize>,
    pub ell: Option<usize>,
    pub weighted: bool,
}

/// Outcome of a weakly-robust solver: a clique partition or evidence that
/// the input is not a UDG.
#[derive(Clone, Debug)]
pub enum Solved {
    Partition(crate::partition::CliquePartition),
    NotUdg(Box<Certificate>),
}

impl Solved {
    pub fn partition(&self) -> Option<&crate::partition::CliquePartition> {
        match self {
            Solved::Partition(p) => Some(p),
            Solved::NotUdg(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Solved::Partition(_) => None,
            Solved::NotUdg(c) => Some(c),
        }
    }
}

/// Outcome of replaying a certificate on its own subgraph.
#[derive(Clone, Debug)]
pub struct ReplayReport {
    pub reproduced: bool,
    pub detail: String,
}

/// Re-run the failing check on the certificate subgraph alone.
///
/// Enumeration failures re-invoke the per-ball solver and must fail with the
/// same reason. Ball-growth certificates verify the recorded trajectory: the
/// growth condition holds at every radius whose balls the certificate
/// contains, and the ball at the failing radius spans the whole subgraph.
/// CNEEO certificates re-run the greedy construction, which must get stuck.
pub fn replay_certificate(
    c: &Certificate,
    metric_budget: &crate::metric::MetricBudget,
    weighted_budget: &crate::weighted::WeightedBudget,
) -> Result<ReplayReport> {
    let fail = |detail: String| ReplayReport { reproduced: false, detail };
    match c.reason {
        CertReason::NoValidConfiguration | CertReason::InconsistentQuadrilateral => {
            let ell = c.ell.ok_or_else(|| {
                Error::InvalidInstance("certificate lacks the ell parameter".into())
            })?;
            match crate::metric::opt_cp(&c.graph, ell, metric_budget)? {
                crate::metric::OptCpOutcome::Failed(r) if r == c.reason => Ok(ReplayReport {
                    reproduced: true,
                    detail: format!("opt_cp failed again with {r}"),
                }),
                crate::metric::OptCpOutcome::Failed(r) => {
                    Ok(fail(format!("opt_cp failed with {r} instead of {}", c.reason)))
                }
                crate::metric::OptCpOutcome::Partition(p) => {
                    Ok(fail(format!("opt_cp found a partition of size {}", p.size())))
                }
            }
        }
        CertReason::NoCneeo => match crate::weighted::cneeo(&c.graph) {
            crate::weighted::CneeoOutcome::Stuck(residual) => Ok(ReplayReport {
                reproduced: true,
                detail: format!(
                    "CNEEO construction stuck with {} residual edges",
                    residual.len()
                ),
            }),
            crate::weighted::CneeoOutcome::Ordering(_) => {
                Ok(fail("a CNEEO exists on the certificate subgraph".into()))
            }
        },
        CertReason::BallTooDeep => {
            let (center, radius, eps) = match (c.center, c.radius, &c.epsilon) {
                (Some(v), Some(r), Some(e)) => (v, r, e.clone()),
                _ => {
                    return Err(Error::InvalidInstance(
                        "ball certificate lacks center, radius or epsilon".into(),
                    ))
                }
            };
            let beta = c
                .beta
                .ok_or_else(|| Error::InvalidInstance("ball certificate lacks beta".into()))?;
            if radius != beta + 1 {
                return Ok(fail(format!("radius {radius} is not beta + 1 = {}", beta + 1)));
            }
            let whole: BTreeSet<usize> = (0..c.graph.n()).collect();
            if c.graph.ball(center, radius) != whole {
                return Ok(fail("certificate subgraph is not the recorded ball".into()));
            }
            if c.weighted {
                replay_weighted_growth(c, center, radius, &eps, weighted_budget)
            } else {
                replay_metric_growth(c, center, radius, &eps, metric_budget)
            }
        }
    }
}

/// Check the unweighted growth condition `|C_{r+2}| > (1+eps) |C_r|` for
/// every radius whose balls the certificate contains (`r <= radius - 2`).
fn replay_metric_growth(
    c: &Certificate,
    center: usize,
    radius: usize,
    eps: &Rational,
    budget: &crate::metric::MetricBudget,
) -> Result<ReplayReport> {
    let params = crate::metric::derive_params(eps)?;
    let growth = Rational::one() + &params.epsilon;
    let mut sizes: Vec<usize> = Vec::new();
    // Balls of radius <= the certificate radius coincide with the original
    // graph's balls, so the growth condition is checkable up to radius - 2.
    for r in 0..=radius {
        let ball = c.graph.ball(center, r);
        let (sub, _) = c.graph.induced(&ball);
        match crate::metric::opt_cp(&sub, params.ell, budget)? {
            crate::metric::OptCpOutcome::Partition(p) => sizes.push(p.size()),
            crate::metric::OptCpOutcome::Failed(reason) => {
                return Ok(ReplayReport {
                    reproduced: true,
                    detail: format!("ball of radius {r} itself fails opt_cp with {reason}"),
                })
            }
        }
    }
    for r in 0..sizes.len().saturating_sub(2) {
        let lhs = rat_int(sizes[r + 2] as i64);
        let rhs = &growth * rat_int(sizes[r] as i64);
        if lhs <= rhs {
            return Ok(ReplayReport {
                reproduced: false,
                detail: format!(
                    "growth condition broke at radius {r}: {} <= (1+eps) * {}",
                    sizes[r + 2],
                    sizes[r]
                ),
            });
        }
    }
    Ok(ReplayReport {
        reproduced: true,
        detail: format!(
            "growth persisted through radius {radius} = beta + 1 (sizes {sizes:?})"
        ),
    })
}

/// Weighted analogue with the `1+gamma` growth factor.
fn replay_weighted_growth(
    c: &Certificate,
    center: usize,
    radius: usize,
    eps: &Rational,
    budget: &crate::weighted::WeightedBudget,
) -> Result<ReplayReport> {
    let params = crate::weighted::weighted_params(eps)?;
    let growth = Rational::one() + &params.gamma;
    let mut weights: Vec<Rational> = Vec::new();
    for r in 0..=radius {
        let ball = c.graph.ball(center, r);
        match crate::weighted::cp_weighted(&c.graph, &ball, params.ell, budget)? {
            (crate::weighted::CpOutcome::Partition(_, w), _) => weights.push(w),
            (crate::weighted::CpOutcome::NoCneeo(..), _) => {
                return Ok(ReplayReport {
                    reproduced: true,
                    detail: format!("ball of radius {r} fails CNEEO construction"),
                })
            }
        }
    }
    for r in 0..weights.len().saturating_sub(2) {
        if weights[r + 2] <= &growth * &weights[r] {
            return Ok(ReplayReport {
                reproduced: false,
                detail: format!("weighted growth condition broke at radius {r}"),
            });
        }
    }
    Ok(ReplayReport {
        reproduced: true,
        detail: format!("weighted growth persisted through radius {radius} = beta + 1"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{certificate_from_json, certificate_to_json};
    use crate::metric::{mincp2, MetricBudget};
    use crate::weighted::WeightedBudget;
    use crate::graph::UdgGraph;

    #[test]
    fn star_certificate_replays_after_roundtrip() {
        // K_{1,6} with unit lengths is not a UDG; mincp2 must certify it and
        // the serialized certificate must reproduce the failure.
        let edges: Vec<(usize, usize, Rational)> =
            (1..=6).map(|v| (0, v, rat_int(1))).collect();
        let g = UdgGraph::from_edges_with_sqlen(7, &edges).unwrap();
        let out = mincp2(&g, &rat_int(1), &MetricBudget::default()).unwrap();
        let cert = match out.solved {
            Solved::NotUdg(c) => *c,
            Solved::Partition(_) => panic!("expected a certificate"),
        };
        let json = certificate_to_json(&cert).unwrap();
        let back = certificate_from_json(&json).unwrap();
        assert_eq!(back.reason, cert.reason);
        let report =
            replay_certificate(&back, &MetricBudget::default(), &WeightedBudget::default())
                .unwrap();
        assert!(report.reproduced, "{}", report.detail);
    }

    #[test]
    fn no_cneeo_certificate_replays() {
        // Triple join of five-cycles: greedy CNEEO is stuck immediately.
        let mut edges = Vec::new();
        for part in 0..3usize {
            let base = part * 5;
            for i in 0..5 {
                let (a, b) = (base + i, base + (i + 1) % 5);
                edges.push(if a < b { (a, b) } else { (b, a) });
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
        let graph = UdgGraph::from_edges(15, &edges).unwrap();
        let cert = Certificate {
            reason: CertReason::NoCneeo,
            original_vertices: (0..15).collect(),
            graph,
            center: None,
            radius: None,
            epsilon: Some(rat_int(1)),
            beta: None,
            ell: None,
            weighted: true,
        };
        let report =
            replay_certificate(&cert, &MetricBudget::default(), &WeightedBudget::default())
                .unwrap();
        assert!(report.reproduced, "{}", report.detail);
    }
}
