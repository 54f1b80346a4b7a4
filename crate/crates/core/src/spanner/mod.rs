//! Spanner constructions and their shared result type.
//!
//! All four algorithms share the sampling discipline of [`engine`]: one
//! ChaCha8 stream per build, one uniform draw per cluster in ascending
//! cluster id per iteration, and `(weight, EdgeId)` as the total order for
//! every minimum-edge choice. Identical `(graph, parameters, seed)` therefore
//! give identical [`SpannerBuild`]s.

mod engine;
mod merge;
mod two_phase;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::clustering::Clustering;
use crate::error::SpannerError;
use crate::graph::{EdgeId, EdgeMask, WeightedGraph};

pub use engine::{general_spanner, general_spanner_traced, EpochSnapshot};
pub use merge::cluster_merge_spanner;
pub use two_phase::{two_phase_iterations, two_phase_spanner};

/// Why an edge left the live set without entering the spanner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Group of a node that joined a sampled cluster, or a group no lighter
    /// than the edge it joined through.
    SampledNeighbor,
    /// Group of a node with no sampled neighbor cluster.
    NoSampledNeighbor,
    /// Both endpoints ended up in the same cluster.
    IntraCluster,
    /// Lost to a lighter edge between the same two clusters on contraction.
    Contraction,
    /// Not the lightest edge from its endpoint to a final cluster.
    Phase2,
}

impl Rule {
    pub const ALL: [Rule; 5] = [
        Rule::SampledNeighbor,
        Rule::NoSampledNeighbor,
        Rule::IntraCluster,
        Rule::Contraction,
        Rule::Phase2,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Rule::SampledNeighbor => "sampled_neighbor",
            Rule::NoSampledNeighbor => "no_sampled_neighbor",
            Rule::IntraCluster => "intra_cluster",
            Rule::Contraction => "contraction",
            Rule::Phase2 => "phase2",
        }
    }
}

/// Final state of one original edge. Iteration 0 marks contraction and
/// Phase 2 discards, which happen between iterations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Disposition {
    InSpanner,
    Discarded {
        epoch: u32,
        iteration: u32,
        rule: Rule,
    },
    Unprocessed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub epoch: u32,
    pub iteration: u32,
    pub clusters_before: usize,
    pub sampled: usize,
    pub probability: f64,
    pub edges_added: usize,
    pub edges_discarded: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: u32,
    pub probability: f64,
    pub iterations: u32,
    /// Nodes of the graph this epoch ran on.
    pub super_nodes: usize,
    /// Clusters alive when the epoch ended.
    pub clusters_after: usize,
    /// Live edges when the epoch ended, before contraction.
    pub live_edges: usize,
    pub contraction_dropped: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Phase2Record {
    pub epoch: u32,
    pub endpoints: usize,
    pub edges_added: usize,
    pub edges_discarded: usize,
}

/// Result of one spanner construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpannerBuild {
    pub k: u32,
    pub t: u32,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    /// Ascending.
    pub spanner_edges: Vec<EdgeId>,
    pub disposition: Vec<Disposition>,
    pub trace: Vec<IterationRecord>,
    pub epochs: Vec<EpochRecord>,
    pub phase2: Phase2Record,
    /// Final clustering on the original vertices.
    pub final_clustering: Clustering,
}

impl SpannerBuild {
    pub fn size(&self) -> usize {
        self.spanner_edges.len()
    }

    pub fn spanner_mask(&self) -> EdgeMask {
        EdgeMask::from_ids(self.m, &self.spanner_edges)
    }

    /// True when no edge is left unprocessed.
    pub fn is_complete(&self) -> bool {
        !self.disposition.contains(&Disposition::Unprocessed)
    }

    pub fn histogram(&self) -> DispositionHistogram {
        let mut h = DispositionHistogram::default();
        for d in &self.disposition {
            match d {
                Disposition::InSpanner => h.in_spanner += 1,
                Disposition::Unprocessed => h.unprocessed += 1,
                Disposition::Discarded { rule, .. } => *h.discarded.entry(*rule).or_insert(0) += 1,
            }
        }
        h
    }

    /// Cluster count at the end of each epoch.
    pub fn cluster_trajectory(&self) -> Vec<usize> {
        self.epochs.iter().map(|e| e.clusters_after).collect()
    }

    /// Checks that dispositions and the spanner edge list agree.
    pub fn check_consistency(&self) -> Result<(), SpannerError> {
        use crate::error::GraphError::Inconsistent;
        if self.disposition.len() != self.m {
            return Err(Inconsistent("disposition length differs from m").into());
        }
        let listed = self.spanner_mask();
        for (i, d) in self.disposition.iter().enumerate() {
            let in_spanner = matches!(d, Disposition::InSpanner);
            if in_spanner != listed.contains(EdgeId::from(i)) {
                return Err(Inconsistent("spanner list and dispositions disagree").into());
            }
        }
        if listed.len() != self.spanner_edges.len() {
            return Err(Inconsistent("duplicate spanner edges").into());
        }
        if self
            .final_clustering
            .tree_edges()
            .any(|e| !listed.contains(e))
        {
            return Err(Inconsistent("tree edge outside the spanner").into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DispositionHistogram {
    pub in_spanner: usize,
    pub unprocessed: usize,
    pub discarded: BTreeMap<Rule, usize>,
}

/// One epoch of the sampling schedule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochPlan {
    pub epoch: u32,
    /// `(t+1)^(epoch-1) / k`; the sampling probability is `n^-exponent`.
    pub exponent: f64,
    pub probability: f64,
    pub iterations: u32,
}

/// `s = ln(2t+1) / ln(t+1)`.
pub fn stretch_exponent(t: u32) -> f64 {
    let t = f64::from(t);
    libm::log(2.0 * t + 1.0) / libm::log(t + 1.0)
}

/// Smallest `l >= 1` with `(t+1)^l >= k`, i.e. `ceil(ln k / ln(t+1))`
/// computed without floating point.
pub fn epoch_count(k: u32, t: u32) -> u32 {
    let base = u128::from(t) + 1;
    let mut reach = base;
    let mut l = 1;
    while reach < u128::from(k) {
        reach *= base;
        l += 1;
    }
    l
}

fn pow_u64(base: u64, exp: u32) -> u64 {
    base.saturating_pow(exp)
}

/// Iterations actually run in the last epoch: just enough for the summed
/// sampling exponent to reach `(k-1)/k`, at most `t`.
fn final_epoch_iterations(k: u32, t: u32, l: u32) -> u32 {
    let step = pow_u64(u64::from(t) + 1, l - 1);
    let before = step - 1;
    let need = u64::from(k).saturating_sub(1).saturating_sub(before);
    let j = need.div_ceil(step);
    j.clamp(1, u64::from(t)) as u32
}

/// Sampling schedule of the general algorithm on `n` vertices.
///
/// Every epoch but the last runs `t` iterations. The last one stops as soon
/// as the expected number of surviving clusters reaches `n^(1/k)`, which for
/// `t = k` leaves the `k - 1` iterations of the classic construction.
pub fn epoch_schedule(k: u32, t: u32, n: usize) -> Result<Vec<EpochPlan>, SpannerError> {
    if k == 0 {
        return Err(SpannerError::InvalidK);
    }
    if t == 0 {
        return Err(SpannerError::InvalidT);
    }
    let l = epoch_count(k, t);
    let nf = n.max(1) as f64;
    let plans = (1..=l)
        .map(|epoch| {
            let exponent = libm::pow(f64::from(t) + 1.0, f64::from(epoch - 1)) / f64::from(k);
            let probability = libm::pow(nf, -exponent).clamp(0.0, 1.0);
            let iterations = if epoch == l {
                final_epoch_iterations(k, t, l)
            } else {
                t
            };
            EpochPlan {
                epoch,
                exponent,
                probability,
                iterations,
            }
        })
        .collect();
    Ok(plans)
}

/// Stretch guaranteed by the general algorithm: `2 k^s`.
pub fn general_stretch_bound(k: u32, t: u32) -> f64 {
    2.0 * libm::pow(f64::from(k), stretch_exponent(t))
}

/// Stretch of the classic construction: `2k - 1`.
pub fn baswana_sen_stretch_bound(k: u32) -> f64 {
    2.0 * f64::from(k) - 1.0
}

/// Cluster-merging stretch: the general bound at `t = 1`.
pub fn merge_stretch_bound(k: u32) -> f64 {
    general_stretch_bound(k, 1)
}

/// Hop bound of the two-phase construction, `2t + (2t+1)(2t'-1) + 2t` with
/// `t = t' = ceil(sqrt k)`.
pub fn two_phase_hop_bound(k: u32) -> f64 {
    let t = f64::from(two_phase_iterations(k));
    4.0 * t + (2.0 * t + 1.0) * (2.0 * t - 1.0)
}

/// Radius bound after `epochs` epochs: `((2t+1)^i - 1) / 2`.
pub fn radius_bound(t: u32, epochs: u32) -> u64 {
    (pow_u64(2 * u64::from(t) + 1, epochs) - 1) / 2
}

pub fn baswana_sen(g: &WeightedGraph, k: u32, seed: u64) -> Result<SpannerBuild, SpannerError> {
    general_spanner(g, k, k, seed)
}

/// The four constructions, for dispatch from experiments and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[serde(rename = "bs")]
    BaswanaSen,
    Merge,
    #[serde(rename = "twophase")]
    TwoPhase,
    General,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::BaswanaSen,
        Algorithm::Merge,
        Algorithm::TwoPhase,
        Algorithm::General,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::BaswanaSen => "bs",
            Algorithm::Merge => "merge",
            Algorithm::TwoPhase => "twophase",
            Algorithm::General => "general",
        }
    }

    /// Iterations per epoch actually used by this algorithm for `(k, t)`.
    pub fn effective_t(self, k: u32, t: u32) -> u32 {
        match self {
            Algorithm::BaswanaSen => k,
            Algorithm::Merge => 1,
            Algorithm::TwoPhase => two_phase_iterations(k),
            Algorithm::General => t,
        }
    }

    pub fn build(
        self,
        g: &WeightedGraph,
        k: u32,
        t: u32,
        seed: u64,
    ) -> Result<SpannerBuild, SpannerError> {
        match self {
            Algorithm::BaswanaSen => baswana_sen(g, k, seed),
            Algorithm::Merge => cluster_merge_spanner(g, k, seed),
            Algorithm::TwoPhase => two_phase_spanner(g, k, seed),
            Algorithm::General => general_spanner(g, k, t, seed),
        }
    }

    /// Per-edge stretch bound the algorithm guarantees; hop-based for the
    /// two-phase construction, which only accepts unit weights.
    pub fn stretch_bound(self, k: u32, t: u32) -> f64 {
        match self {
            Algorithm::BaswanaSen => baswana_sen_stretch_bound(k),
            Algorithm::Merge => merge_stretch_bound(k),
            Algorithm::TwoPhase => two_phase_hop_bound(k),
            Algorithm::General => general_stretch_bound(k, t),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = SpannerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bs" => Ok(Algorithm::BaswanaSen),
            "merge" => Ok(Algorithm::Merge),
            "twophase" => Ok(Algorithm::TwoPhase),
            "general" => Ok(Algorithm::General),
            other => Err(SpannerError::Graph(crate::error::GraphError::InvalidSpec(
                alloc::format!("unknown algorithm {other:?}"),
            ))),
        }
    }
}
