//! Graph spanners built by repeated cluster sampling and contraction.
//!
//! The crate covers the full pipeline: a normalized [`WeightedGraph`],
//! rooted-tree [`Clustering`]s with quotient-graph contraction, four
//! spanner constructions sharing one epoch engine, brute-force oracles that
//! check stretch, connectivity and cluster radius, a spanner-based
//! approximate all-pairs shortest-path experiment and an analytic round-cost
//! model.
//!
//! Everything here is `no_std` with `alloc`; file formats, threads and the
//! command line live in the companion `spanforge` crate.
//!
//! ```
//! use spanforge_core::{generate, oracle, spanner};
//!
//! let g = generate::gnp(120, 0.1, generate::WeightDist::Unit, 5).unwrap();
//! let build = spanner::general_spanner(&g, 4, 1, 5).unwrap();
//! let audit = oracle::audit_stretch(&g, &build.spanner_mask(), spanner::general_stretch_bound(4, 1));
//! assert!(audit.passed());
//! ```

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod apsp;
pub mod clustering;
pub mod cost;
pub mod error;
pub mod generate;
pub mod graph;
pub mod oracle;
pub mod spanner;

pub use clustering::{Clustering, QuotientGraph, RadiusCertificate};
pub use cost::CostModel;
pub use error::{ClusterError, GraphError, SpannerError};
pub use graph::{EdgeId, EdgeMask, WeightedGraph};
pub use spanner::{Algorithm, Disposition, Rule, SpannerBuild};
