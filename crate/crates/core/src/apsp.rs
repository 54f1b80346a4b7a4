//! Approximate all-pairs shortest paths answered from a spanner alone.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::SpannerError;
use crate::graph::{EdgeMask, WeightedGraph};
use crate::oracle::{dijkstra, STRETCH_SLACK};
use crate::spanner::{general_spanner, general_stretch_bound, SpannerBuild};

/// Largest graph accepted by [`apsp_experiment`].
pub const APSP_LIMIT: usize = 2000;

/// Row-major `n x n` distance matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        Self {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.data[u * self.n..(u + 1) * self.n]
    }
}

/// One Dijkstra per source over the spanner edges (all edges when `None`).
pub fn apsp_on_spanner(g: &WeightedGraph, spanner: Option<&EdgeMask>) -> DistanceMatrix {
    DistanceMatrix::from_rows((0..g.n()).map(|s| dijkstra(g, s, spanner)).collect())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ApspTimings {
    pub build_ms: f64,
    pub query_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApspReport {
    pub n: usize,
    pub m: usize,
    pub k: u32,
    pub t: u32,
    pub seed: u64,
    pub spanner_size: usize,
    /// Pairs connected in the input graph, counted once per unordered pair.
    pub pairs: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    /// Pairs whose spanner distance is below the exact one (must be 0).
    pub dominance_violations: usize,
    /// `2 k^s`.
    pub ratio_bound: f64,
    pub within_bound: bool,
    /// `n^(1+1/k) log2 k`.
    pub size_reference: f64,
    /// `c n log2 log2 n`, the coordinator's memory budget.
    pub memory_budget: f64,
    pub fits_budget: bool,
    pub timings: Option<ApspTimings>,
}

/// Compares spanner distances with exact ones over all connected pairs.
pub fn compare(exact: &DistanceMatrix, approx: &DistanceMatrix) -> (usize, f64, f64, usize) {
    let n = exact.n;
    let mut pairs = 0usize;
    let mut max_ratio: f64 = if n > 1 { 1.0 } else { 0.0 };
    let mut sum = 0.0;
    let mut violations = 0;
    for u in 0..n {
        for v in (u + 1)..n {
            let d = exact.get(u, v);
            if !d.is_finite() {
                continue;
            }
            let a = approx.get(u, v);
            pairs += 1;
            if a < d * (1.0 - STRETCH_SLACK) {
                violations += 1;
            }
            let ratio = if d > 0.0 {
                a / d
            } else if a == 0.0 {
                1.0
            } else {
                f64::INFINITY
            };
            max_ratio = max_ratio.max(ratio);
            sum += ratio;
        }
    }
    let mean = if pairs > 0 { sum / pairs as f64 } else { 1.0 };
    (pairs, max_ratio, mean, violations)
}

/// Report for an already built spanner.
pub fn apsp_report(
    g: &WeightedGraph,
    build: &SpannerBuild,
    budget_c: f64,
) -> Result<ApspReport, SpannerError> {
    if g.n() > APSP_LIMIT {
        return Err(SpannerError::TooLarge {
            n: g.n(),
            limit: APSP_LIMIT,
        });
    }
    let exact = apsp_on_spanner(g, None);
    let approx = apsp_on_spanner(g, Some(&build.spanner_mask()));
    let (pairs, max_ratio, mean_ratio, dominance_violations) = compare(&exact, &approx);
    let (k, t) = (build.k, build.t);
    let ratio_bound = general_stretch_bound(k, t);
    let nf = g.n() as f64;
    let memory_budget = budget_c * nf * libm::log2(libm::log2(nf.max(4.0)));
    Ok(ApspReport {
        n: g.n(),
        m: g.m(),
        k,
        t,
        seed: build.seed,
        spanner_size: build.size(),
        pairs,
        max_ratio,
        mean_ratio,
        dominance_violations,
        ratio_bound,
        within_bound: max_ratio <= ratio_bound * (1.0 + STRETCH_SLACK),
        size_reference: libm::pow(nf, 1.0 + 1.0 / f64::from(k)) * libm::log2(f64::from(k)),
        memory_budget,
        fits_budget: build.size() as f64 <= memory_budget,
        timings: None,
    })
}

/// Builds the general spanner and measures its all-pairs approximation.
pub fn apsp_experiment(
    g: &WeightedGraph,
    k: u32,
    t: u32,
    seed: u64,
    budget_c: f64,
) -> Result<ApspReport, SpannerError> {
    if g.n() > APSP_LIMIT {
        return Err(SpannerError::TooLarge {
            n: g.n(),
            limit: APSP_LIMIT,
        });
    }
    let build = general_spanner(g, k, t, seed)?;
    apsp_report(g, &build, budget_c)
}
