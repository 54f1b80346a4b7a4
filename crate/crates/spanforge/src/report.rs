//! JSON reports written by the command line tool.
//!
//! Every report carries `kind` and `version`; the shapes are described by
//! `report.schema.json` next to this crate's manifest. Non-finite numbers
//! (an unreachable endpoint gives an infinite ratio) are written as `null`.
//! Wall-clock timings appear only when requested, so reports are
//! byte-identical across reruns with the same flags.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use spanforge_core::apsp::ApspReport;
use spanforge_core::oracle::{SizeStats, StretchAudit};
use spanforge_core::spanner::{
    DispositionHistogram, EpochRecord, IterationRecord, Phase2Record, SpannerBuild,
};
use spanforge_core::{Algorithm, CostModel, EdgeId, WeightedGraph};

pub const REPORT_VERSION: u32 = 1;

/// Published JSON schema for every report kind.
pub const REPORT_SCHEMA: &str = include_str!("../report.schema.json");

pub type Timings = BTreeMap<String, f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphInfo {
    /// Input path or generator spec.
    pub source: String,
    pub graph_seed: Option<u64>,
    pub n: usize,
    pub m: usize,
    pub unit_weight: bool,
}

impl GraphInfo {
    pub fn new(source: impl Into<String>, graph_seed: Option<u64>, g: &WeightedGraph) -> Self {
        Self {
            source: source.into(),
            graph_seed,
            n: g.n(),
            m: g.m(),
            unit_weight: g.is_unit_weight(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailingEdge {
    pub edge: EdgeId,
    pub u: usize,
    pub v: usize,
    pub w: f64,
    /// `null` when the endpoints are disconnected in the spanner.
    pub spanner_distance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub bound: f64,
    pub passed: bool,
    pub edges_checked: usize,
    pub max_ratio: Option<f64>,
    pub failing: Vec<FailingEdge>,
}

impl AuditSummary {
    pub fn new(g: &WeightedGraph, audit: &StretchAudit) -> Self {
        let finite = |x: f64| x.is_finite().then_some(x);
        Self {
            bound: audit.bound,
            passed: audit.passed(),
            edges_checked: audit.ratios.len(),
            max_ratio: finite(audit.max_ratio),
            failing: audit
                .failing
                .iter()
                .map(|&id| {
                    let e = g.edge(id);
                    FailingEdge {
                        edge: id,
                        u: e.u,
                        v: e.v,
                        w: e.w,
                        spanner_distance: finite(audit.distances[id.index()]),
                    }
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepetitionInfo {
    pub repetitions: u32,
    pub selected: u32,
    pub fallback: bool,
    pub passed: Vec<bool>,
    pub sizes: Vec<usize>,
    pub c_clusters: f64,
    pub c_edges: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildReport {
    pub version: u32,
    pub algorithm: Algorithm,
    pub k: u32,
    /// Iterations per epoch the algorithm ran with.
    pub t: u32,
    pub seed: u64,
    pub graph: GraphInfo,
    pub spanner_size: usize,
    pub spanner_edges: Vec<EdgeId>,
    pub dispositions: DispositionHistogram,
    pub epochs: Vec<EpochRecord>,
    pub trace: Vec<IterationRecord>,
    pub phase2: Phase2Record,
    pub cluster_trajectory: Vec<usize>,
    pub final_clusters: usize,
    pub cost: CostModel,
    pub stretch: Option<AuditSummary>,
    pub repetition: Option<RepetitionInfo>,
    pub timings: Option<Timings>,
}

impl BuildReport {
    pub fn new(
        algorithm: Algorithm,
        graph: GraphInfo,
        build: &SpannerBuild,
        cost: CostModel,
    ) -> Self {
        Self {
            version: REPORT_VERSION,
            algorithm,
            k: build.k,
            t: build.t,
            seed: build.seed,
            graph,
            spanner_size: build.size(),
            spanner_edges: build.spanner_edges.clone(),
            dispositions: build.histogram(),
            epochs: build.epochs.clone(),
            trace: build.trace.clone(),
            phase2: build.phase2.clone(),
            cluster_trajectory: build.cluster_trajectory(),
            final_clusters: build.final_clustering.num_clusters(),
            cost,
            stretch: None,
            repetition: None,
            timings: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub version: u32,
    pub graph: GraphInfo,
    pub spanner_source: String,
    pub spanner_size: usize,
    /// `explicit` or the `--auto` rule the bound came from.
    pub bound_rule: String,
    #[serde(flatten)]
    pub audit: AuditSummary,
    pub timings: Option<Timings>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub version: u32,
    #[serde(flatten)]
    pub model: CostModel,
}

/// Binomial check of the epoch-1 cluster count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochOneCheck {
    pub mean: f64,
    pub expected: f64,
    pub sd_of_mean: f64,
    pub deviation_sigmas: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApspStudy {
    pub ratio_bound: f64,
    pub max_ratio: Option<f64>,
    pub mean_max_ratio: Option<f64>,
    pub mean_ratio: f64,
    pub dominance_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub version: u32,
    pub graph_spec: String,
    pub seed0: u64,
    #[serde(flatten)]
    pub stats: SizeStats,
    pub epoch_one: Option<EpochOneCheck>,
    pub apsp: Option<ApspStudy>,
    pub timings: Option<Timings>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApspRunReport {
    pub version: u32,
    pub graph: GraphInfo,
    #[serde(flatten)]
    pub report: ApspReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunReport {
    Build(BuildReport),
    Audit(AuditReport),
    Cost(CostReport),
    Study(StudyReport),
    Apsp(ApspRunReport),
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(self.to_json().as_bytes())?;
        out.flush()
    }
}
