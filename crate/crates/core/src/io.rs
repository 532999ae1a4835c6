//! JSON serialization of instances, partitions and certificates.
//!
//! Rationals are always `[numerator, denominator]` integer pairs, never
//! decimals. Instance files carry either `points` (geometric instance) or
//! `n` + `edges` (metric or adjacency-only instance); edge entries are
//! `[u, v, num, den]` with a squared length or `[u, v]` without.

use serde::{Deserialize, Serialize};

use crate::cert::{CertReason, Certificate};
use crate::error::{Error, Result};
use crate::graph::{build_udg, PointSet, UdgGraph};
use crate::partition::CliquePartition;
use crate::rational::{from_pair, to_pair, Rational};

pub const INSTANCE_SCHEMA: &str = "udg-mcp-instance/1";
pub const PARTITION_SCHEMA: &str = "udg-mcp-partition/1";
pub const CERTIFICATE_SCHEMA: &str = "udg-mcp-certificate/1";

/// An instance is either a realized point set or a graph with optional
/// squared edge lengths.
#[derive(Clone, Debug)]
pub enum Instance {
    Points(PointSet),
    Graph { n: usize, edges: Vec<(usize, usize, Option<Rational>)>, weights: Option<Vec<Rational>> },
}

impl Instance {
    pub fn to_graph(&self) -> Result<UdgGraph> {
        match self {
            Instance::Points(ps) => build_udg(ps),
            Instance::Graph { n, edges, weights } => {
                let mut g = if edges.iter().all(|(_, _, l)| l.is_some()) {
                    let with: Vec<(usize, usize, Rational)> =
                        edges.iter().map(|(u, v, l)| (*u, *v, l.clone().unwrap())).collect();
                    UdgGraph::from_edges_with_sqlen(*n, &with)?
                } else {
                    let plain: Vec<(usize, usize)> = edges
                        .iter()
                        .map(|(u, v, _)| crate::graph::edge(*u, *v))
                        .collect();
                    UdgGraph::from_edges(*n, &plain)?
                };
                if let Some(w) = weights {
                    if w.len() != *n {
                        return Err(Error::InvalidInstance(format!(
                            "{} weights for {n} vertices",
                            w.len()
                        )));
                    }
                    g.weights = Some(w.clone());
                }
                Ok(g)
            }
        }
    }

    pub fn points(&self) -> Option<&PointSet> {
        match self {
            Instance::Points(ps) => Some(ps),
            Instance::Graph { .. } => None,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Instance::Points(ps) => ps.len(),
            Instance::Graph { n, .. } => *n,
        }
    }
}

/// `[u, v]` or `[u, v, num, den]`, kept as a raw row because serde's
/// untagged buffering cannot hold i128 values.
type EdgeRow = Vec<i128>;

enum EdgeEntry {
    WithLen(usize, usize, i128, i128),
    Plain(usize, usize),
}

impl EdgeEntry {
    fn to_row(&self) -> EdgeRow {
        match self {
            EdgeEntry::WithLen(u, v, ln, ld) => vec![*u as i128, *v as i128, *ln, *ld],
            EdgeEntry::Plain(u, v) => vec![*u as i128, *v as i128],
        }
    }

    fn from_row(row: &[i128]) -> Result<EdgeEntry> {
        let vertex = |x: i128| -> Result<usize> {
            usize::try_from(x)
                .map_err(|_| Error::InvalidInstance(format!("bad vertex id {x} in edge row")))
        };
        match row {
            [u, v] => Ok(EdgeEntry::Plain(vertex(*u)?, vertex(*v)?)),
            [u, v, ln, ld] => Ok(EdgeEntry::WithLen(vertex(*u)?, vertex(*v)?, *ln, *ld)),
            _ => Err(Error::InvalidInstance(format!(
                "edge row must have 2 or 4 entries, got {}",
                row.len()
            ))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    schema: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<Vec<[i128; 4]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<[i128; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<EdgeRow>>,
}

fn weights_to_file(w: &Option<Vec<Rational>>) -> Result<Option<Vec<[i128; 2]>>> {
    w.as_ref()
        .map(|ws| {
            ws.iter()
                .map(|x| to_pair(x).map(|(n, d)| [n, d]))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()
}

fn weights_from_file(w: &Option<Vec<[i128; 2]>>) -> Result<Option<Vec<Rational>>> {
    w.as_ref()
        .map(|ws| ws.iter().map(|[n, d]| from_pair(*n, *d)).collect::<Result<Vec<_>>>())
        .transpose()
}

pub fn instance_to_json(inst: &Instance) -> Result<String> {
    let file = match inst {
        Instance::Points(ps) => InstanceFile {
            schema: INSTANCE_SCHEMA.to_string(),
            n: None,
            points: Some(
                ps.points
                    .iter()
                    .map(|(x, y)| {
                        let (xn, xd) = to_pair(x)?;
                        let (yn, yd) = to_pair(y)?;
                        Ok([xn, xd, yn, yd])
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            weights: weights_to_file(&ps.weights)?,
            edges: None,
        },
        Instance::Graph { n, edges, weights } => InstanceFile {
            schema: INSTANCE_SCHEMA.to_string(),
            n: Some(*n),
            points: None,
            weights: weights_to_file(weights)?,
            edges: Some(
                edges
                    .iter()
                    .map(|(u, v, l)| match l {
                        Some(l) => {
                            let (ln, ld) = to_pair(l)?;
                            Ok(EdgeEntry::WithLen(*u, *v, ln, ld).to_row())
                        }
                        None => Ok(EdgeEntry::Plain(*u, *v).to_row()),
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        },
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::InvalidInstance(e.to_string()))
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidInstance(e.to_string()))?;
    if file.schema != INSTANCE_SCHEMA {
        return Err(Error::InvalidInstance(format!("unknown schema {:?}", file.schema)));
    }
    match (file.points, file.edges) {
        (Some(points), None) => {
            let pts = points
                .iter()
                .map(|[xn, xd, yn, yd]| Ok((from_pair(*xn, *xd)?, from_pair(*yn, *yd)?)))
                .collect::<Result<Vec<_>>>()?;
            let weights = weights_from_file(&file.weights)?;
            if let Some(w) = &weights {
                if w.len() != pts.len() {
                    return Err(Error::InvalidInstance("weights length mismatch".into()));
                }
            }
            Ok(Instance::Points(PointSet { points: pts, weights }))
        }
        (None, Some(edges)) => {
            let n = file
                .n
                .ok_or_else(|| Error::InvalidInstance("graph instance requires n".into()))?;
            let parsed = edges
                .iter()
                .map(|row| match EdgeEntry::from_row(row)? {
                    EdgeEntry::WithLen(u, v, ln, ld) => Ok((u, v, Some(from_pair(ln, ld)?))),
                    EdgeEntry::Plain(u, v) => Ok((u, v, None)),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Instance::Graph { n, edges: parsed, weights: weights_from_file(&file.weights)? })
        }
        (Some(_), Some(_)) => Err(Error::InvalidInstance(
            "instance carries both points and edges; use one".into(),
        )),
        (None, None) => Err(Error::InvalidInstance("instance has neither points nor edges".into())),
    }
}

#[derive(Serialize, Deserialize)]
struct PartitionFile {
    schema: String,
    blocks: Vec<Vec<usize>>,
}

pub fn partition_to_json(p: &CliquePartition) -> String {
    serde_json::to_string_pretty(&PartitionFile {
        schema: PARTITION_SCHEMA.to_string(),
        blocks: p.blocks.clone(),
    })
    .expect("partition serialization cannot fail")
}

pub fn partition_from_json(text: &str) -> Result<CliquePartition> {
    let file: PartitionFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidInstance(e.to_string()))?;
    if file.schema != PARTITION_SCHEMA {
        return Err(Error::InvalidInstance(format!("unknown schema {:?}", file.schema)));
    }
    Ok(CliquePartition::new(file.blocks))
}

#[derive(Serialize, Deserialize)]
struct CertificateFile {
    schema: String,
    reason: String,
    original_vertices: Vec<usize>,
    n: usize,
    edges: Vec<EdgeRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<[i128; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    center: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<[i128; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ell: Option<usize>,
    #[serde(default)]
    weighted: bool,
}

pub fn certificate_to_json(c: &Certificate) -> Result<String> {
    let edges = c
        .graph
        .edges()
        .map(|(u, v)| match c.graph.sqlen(u, v) {
            Some(l) => {
                let (ln, ld) = to_pair(l)?;
                Ok(EdgeEntry::WithLen(u, v, ln, ld).to_row())
            }
            None => Ok(EdgeEntry::Plain(u, v).to_row()),
        })
        .collect::<Result<Vec<_>>>()?;
    let file = CertificateFile {
        schema: CERTIFICATE_SCHEMA.to_string(),
        reason: c.reason.to_string(),
        original_vertices: c.original_vertices.clone(),
        n: c.graph.n(),
        edges,
        weights: weights_to_file(&c.graph.weights)?,
        center: c.center,
        radius: c.radius,
        epsilon: c.epsilon.as_ref().map(|e| to_pair(e).map(|(n, d)| [n, d])).transpose()?,
        beta: c.beta,
        ell: c.ell,
        weighted: c.weighted,
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::InvalidInstance(e.to_string()))
}

pub fn certificate_from_json(text: &str) -> Result<Certificate> {
    let file: CertificateFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidInstance(e.to_string()))?;
    if file.schema != CERTIFICATE_SCHEMA {
        return Err(Error::InvalidInstance(format!("unknown schema {:?}", file.schema)));
    }
    let reason = CertReason::parse(&file.reason)
        .ok_or_else(|| Error::InvalidInstance(format!("unknown reason {:?}", file.reason)))?;
    let mut with_len = Vec::new();
    let mut plain = Vec::new();
    for row in &file.edges {
        match EdgeEntry::from_row(row)? {
            EdgeEntry::WithLen(u, v, ln, ld) => with_len.push((u, v, from_pair(ln, ld)?)),
            EdgeEntry::Plain(u, v) => plain.push(crate::graph::edge(u, v)),
        }
    }
    let mut graph = if plain.is_empty() {
        UdgGraph::from_edges_with_sqlen(file.n, &with_len)?
    } else if with_len.is_empty() {
        UdgGraph::from_edges(file.n, &plain)?
    } else {
        return Err(Error::InvalidInstance("certificate mixes edges with and without lengths".into()));
    };
    graph.weights = weights_from_file(&file.weights)?;
    Ok(Certificate {
        reason,
        original_vertices: file.original_vertices,
        graph,
        center: file.center,
        radius: file.radius,
        epsilon: file.epsilon.map(|[n, d]| from_pair(n, d)).transpose()?,
        beta: file.beta,
        ell: file.ell,
        weighted: file.weighted,
    })
}
