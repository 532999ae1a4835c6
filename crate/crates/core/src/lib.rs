//! Clique partition algorithms for unit disk graphs.
//!
//! The library provides exact desk-scale solvers, a geometric PTAS over
//! randomly shifted grids, an edge-length-only PTAS that emits non-UDG
//! certificates when its structural assumptions fail, a weighted
//! (2+epsilon)-approximation working from adjacency alone, and a
//! synchronous LOCAL-model simulator running the distributed variant.
//!
//! All decision predicates use exact rational arithmetic; floating point
//! appears only in tests and rendering.

pub mod bits;
pub mod cert;
pub mod cover;
pub mod error;
pub mod gen;
pub mod geo;
pub mod graph;
pub mod hull;
pub mod io;
pub mod localsim;
pub mod metric;
pub mod weighted;
pub mod oracle;
pub mod partition;
pub mod predicates;
pub mod rational;

pub use cert::{replay_certificate, CertReason, Certificate, ReplayReport, Solved};
pub use error::{Error, Result};
pub use graph::{build_udg, PointSet, UdgGraph};
pub use partition::{validate_partition, CliquePartition, ValidationReport};
pub use rational::Rational;
