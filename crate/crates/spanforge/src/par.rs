//! Thread pool and parallel versions of the expensive oracles.
//!
//! Results are collected in input order, so they do not depend on how work
//! was scheduled.

use rayon::prelude::*;
use rayon::ThreadPool;

use spanforge_core::apsp::DistanceMatrix;
use spanforge_core::oracle::{self, StretchAudit};
use spanforge_core::spanner::{Algorithm, SpannerBuild};
use spanforge_core::{EdgeMask, SpannerError, WeightedGraph};

pub const THREADS_ENV: &str = "SPANFORGE_THREADS";

/// Worker count from `SPANFORGE_THREADS`; 0, unset or unparsable means
/// automatic.
pub fn configured_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

pub fn pool() -> ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(configured_threads())
        .build()
        .expect("failed to start worker threads")
}

pub fn audit_stretch(
    pool: &ThreadPool,
    g: &WeightedGraph,
    spanner: &EdgeMask,
    bound: f64,
) -> StretchAudit {
    let groups = oracle::audit_sources(g, spanner);
    let measured: Vec<Vec<_>> = pool.install(|| {
        groups
            .par_iter()
            .map(|(s, edges)| oracle::source_distances(g, spanner, *s, edges))
            .collect()
    });
    oracle::audit_from_distances(g, spanner, bound, measured.into_iter().flatten())
}

pub fn apsp(pool: &ThreadPool, g: &WeightedGraph, spanner: Option<&EdgeMask>) -> DistanceMatrix {
    let rows = pool.install(|| {
        (0..g.n())
            .into_par_iter()
            .map(|s| oracle::dijkstra(g, s, spanner))
            .collect()
    });
    DistanceMatrix::from_rows(rows)
}

/// All builds of a parallel-repetition batch, in repetition order.
pub fn repetition_builds(
    pool: &ThreadPool,
    g: &WeightedGraph,
    algorithm: Algorithm,
    k: u32,
    t: u32,
    seed: u64,
    repetitions: u32,
) -> Result<Vec<SpannerBuild>, SpannerError> {
    pool.install(|| {
        (0..repetitions)
            .into_par_iter()
            .map(|r| algorithm.build(g, k, t, oracle::repetition_seed(seed, r)))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use spanforge_core::generate::{gnp, WeightDist};
    use spanforge_core::spanner::general_spanner;

    #[test]
    fn parallel_audit_matches_sequential() {
        let g = gnp(120, 0.08, WeightDist::Uniform { lo: 1.0, hi: 9.0 }, 3).unwrap();
        let b = general_spanner(&g, 4, 2, 1).unwrap();
        let mask = b.spanner_mask();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        assert_eq!(
            audit_stretch(&pool, &g, &mask, 5.0),
            oracle::audit_stretch(&g, &mask, 5.0)
        );
        assert_eq!(
            apsp(&pool, &g, Some(&mask)),
            spanforge_core::apsp::apsp_on_spanner(&g, Some(&mask))
        );
    }
}
