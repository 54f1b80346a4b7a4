//! Brute-force checks: exact distances, per-edge stretch, connectivity,
//! size statistics and the parallel-repetition selector.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SpannerError;
use crate::generate::{self, GraphSpec, WeightDist};
use crate::graph::{EdgeId, EdgeMask, WeightedGraph};
use crate::spanner::{Algorithm, SpannerBuild};

/// Relative slack for floating-point path sums in stretch comparisons.
pub const STRETCH_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source distances using only the edges in `mask` (all edges when
/// `None`). Unreachable vertices get `+inf`.
pub fn dijkstra(g: &WeightedGraph, source: usize, mask: Option<&EdgeMask>) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.n()];
    run_dijkstra(g, source, mask, &mut dist, |_| false);
    dist
}

/// Dijkstra that stops once `done(settled_vertex)` returns true.
fn run_dijkstra<F: FnMut(usize) -> bool>(
    g: &WeightedGraph,
    source: usize,
    mask: Option<&EdgeMask>,
    dist: &mut [f64],
    mut done: F,
) {
    let mut settled = vec![false; g.n()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry {
        dist: 0.0,
        node: source,
    });
    while let Some(Entry { dist: d, node: v }) = heap.pop() {
        if settled[v] {
            continue;
        }
        settled[v] = true;
        if done(v) {
            return;
        }
        for &id in g.incident(v) {
            if mask.is_some_and(|m| !m.contains(id)) {
                continue;
            }
            let e = g.edge(id);
            let u = e.other(v);
            let nd = d + e.w;
            if nd < dist[u] {
                dist[u] = nd;
                heap.push(Entry { dist: nd, node: u });
            }
        }
    }
}

/// Result of checking every original edge against the spanner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StretchAudit {
    pub bound: f64,
    /// Spanner distance over weight, per original edge; 1 for spanner edges.
    pub ratios: Vec<f64>,
    /// Spanner distance between the endpoints, per original edge; the
    /// edge's own weight for spanner edges.
    pub distances: Vec<f64>,
    pub max_ratio: f64,
    pub failing: Vec<EdgeId>,
}

impl StretchAudit {
    pub fn passed(&self) -> bool {
        self.failing.is_empty()
    }
}

/// Non-spanner edges grouped by their smaller endpoint, ascending.
pub fn audit_sources(g: &WeightedGraph, spanner: &EdgeMask) -> Vec<(usize, Vec<EdgeId>)> {
    let mut groups: Vec<(usize, Vec<EdgeId>)> = Vec::new();
    for id in g.edge_ids() {
        if spanner.contains(id) {
            continue;
        }
        let u = g.edge(id).u;
        match groups.last_mut() {
            Some((s, list)) if *s == u => list.push(id),
            _ => groups.push((u, vec![id])),
        }
    }
    groups
}

/// Spanner distances from `source` to the far endpoint of each edge in
/// `edges`, stopping as soon as all of them are settled.
pub fn source_distances(
    g: &WeightedGraph,
    spanner: &EdgeMask,
    source: usize,
    edges: &[EdgeId],
) -> Vec<(EdgeId, f64)> {
    let mut pending = vec![false; g.n()];
    let mut remaining = 0usize;
    for &id in edges {
        let t = g.edge(id).other(source);
        if !pending[t] {
            pending[t] = true;
            remaining += 1;
        }
    }
    let mut dist = vec![f64::INFINITY; g.n()];
    run_dijkstra(g, source, Some(spanner), &mut dist, |v| {
        if pending[v] {
            pending[v] = false;
            remaining -= 1;
        }
        remaining == 0
    });
    edges
        .iter()
        .map(|&id| (id, dist[g.edge(id).other(source)]))
        .collect()
}

/// Whether spanner distance `d` meets `bound` for an edge of weight `w`.
pub fn within_bound(d: f64, w: f64, bound: f64) -> bool {
    d.is_finite() && d <= bound * w * (1.0 + STRETCH_SLACK)
}

pub fn stretch_ratio(d: f64, w: f64) -> f64 {
    if w > 0.0 {
        d / w
    } else if d == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

/// Assembles an audit from per-edge spanner distances of non-spanner edges.
pub fn audit_from_distances(
    g: &WeightedGraph,
    spanner: &EdgeMask,
    bound: f64,
    measured: impl IntoIterator<Item = (EdgeId, f64)>,
) -> StretchAudit {
    let mut ratios = vec![1.0; g.m()];
    let mut distances: Vec<f64> = g.edges().iter().map(|e| e.w).collect();
    let mut failing = Vec::new();
    for (id, d) in measured {
        debug_assert!(!spanner.contains(id));
        let w = g.edge(id).w;
        distances[id.index()] = d;
        ratios[id.index()] = stretch_ratio(d, w);
        if !within_bound(d, w, bound) {
            failing.push(id);
        }
    }
    failing.sort_unstable();
    let max_ratio = ratios
        .iter()
        .copied()
        .fold(if g.m() == 0 { 0.0 } else { 1.0 }, f64::max);
    StretchAudit {
        bound,
        ratios,
        distances,
        max_ratio,
        failing,
    }
}

/// Per-edge stretch of `spanner` against `bound`. Unreachable endpoints
/// count as failures.
pub fn audit_stretch(g: &WeightedGraph, spanner: &EdgeMask, bound: f64) -> StretchAudit {
    let measured: Vec<(EdgeId, f64)> = audit_sources(g, spanner)
        .into_iter()
        .flat_map(|(s, edges)| source_distances(g, spanner, s, &edges))
        .collect();
    audit_from_distances(g, spanner, bound, measured)
}

/// Component label per vertex (smallest vertex of its component).
pub fn components(g: &WeightedGraph, mask: Option<&EdgeMask>) -> Vec<usize> {
    let mut label = vec![usize::MAX; g.n()];
    let mut stack = Vec::new();
    for s in 0..g.n() {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = s;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &id in g.incident(v) {
                if mask.is_some_and(|m| !m.contains(id)) {
                    continue;
                }
                let u = g.edge(id).other(v);
                if label[u] == usize::MAX {
                    label[u] = s;
                    stack.push(u);
                }
            }
        }
    }
    label
}

pub fn preserves_components(g: &WeightedGraph, spanner: &EdgeMask) -> bool {
    components(g, None) == components(g, Some(spanner))
}

/// Sizes and cluster counts over repeated builds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeStats {
    pub algorithm: Algorithm,
    pub k: u32,
    pub t: u32,
    pub trials: usize,
    pub seeds: Vec<u64>,
    pub n: Vec<usize>,
    pub m: Vec<usize>,
    pub sizes: Vec<usize>,
    pub mean_size: f64,
    /// Clusters alive at the end of each epoch, per trial.
    pub epoch_clusters: Vec<Vec<usize>>,
    pub mean_epoch_clusters: Vec<f64>,
    /// `n^(1+1/k) (t + log2 k)`, from the mean vertex count.
    pub size_reference: f64,
    /// `n^(1 - ((t+1)^i - 1)/k)` for epoch `i`.
    pub cluster_reference: Vec<f64>,
    pub mean_size_ratio: f64,
}

pub fn size_reference(n: f64, k: u32, t: u32) -> f64 {
    libm::pow(n, 1.0 + 1.0 / f64::from(k)) * (f64::from(t) + libm::log2(f64::from(k)))
}

pub fn cluster_reference(n: f64, k: u32, t: u32, epoch: u32) -> f64 {
    let e = (libm::pow(f64::from(t) + 1.0, f64::from(epoch)) - 1.0) / f64::from(k);
    libm::pow(n, 1.0 - e)
}

/// Runs `algorithm` once per seed on a fresh graph from `spec` (generated
/// with the same seed).
pub fn size_study(
    spec: &GraphSpec,
    algorithm: Algorithm,
    k: u32,
    t: u32,
    seeds: &[u64],
) -> Result<SizeStats, SpannerError> {
    if seeds.is_empty() {
        return Err(SpannerError::NoRepetitions);
    }
    let mut builds = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let g = spec.generate(seed)?;
        builds.push((g.n(), g.m(), algorithm.build(&g, k, t, seed)?));
    }
    Ok(summarize(algorithm, k, t, seeds, &builds))
}

/// Aggregates builds into [`SizeStats`]; `builds` holds `(n, m, build)`.
pub fn summarize(
    algorithm: Algorithm,
    k: u32,
    t: u32,
    seeds: &[u64],
    builds: &[(usize, usize, SpannerBuild)],
) -> SizeStats {
    let trials = builds.len();
    let sizes: Vec<usize> = builds.iter().map(|b| b.2.size()).collect();
    let mean_size = sizes.iter().sum::<usize>() as f64 / trials as f64;
    let epoch_clusters: Vec<Vec<usize>> = builds.iter().map(|b| b.2.cluster_trajectory()).collect();
    let epochs = epoch_clusters.iter().map(Vec::len).max().unwrap_or(0);
    let mean_epoch_clusters = (0..epochs)
        .map(|i| {
            let vals: Vec<usize> = epoch_clusters
                .iter()
                .filter_map(|c| c.get(i).copied())
                .collect();
            vals.iter().sum::<usize>() as f64 / vals.len() as f64
        })
        .collect();
    let mean_n = builds.iter().map(|b| b.0 as f64).sum::<f64>() / trials as f64;
    let te = algorithm.effective_t(k, t);
    let size_ref = size_reference(mean_n, k, te);
    SizeStats {
        algorithm,
        k,
        t: te,
        trials,
        seeds: seeds.to_vec(),
        n: builds.iter().map(|b| b.0).collect(),
        m: builds.iter().map(|b| b.1).collect(),
        sizes,
        mean_size,
        epoch_clusters,
        mean_epoch_clusters,
        size_reference: size_ref,
        cluster_reference: (1..=epochs as u32)
            .map(|i| cluster_reference(mean_n, k, te, i))
            .collect(),
        mean_size_ratio: if size_ref > 0.0 {
            mean_size / size_ref
        } else {
            0.0
        },
    }
}

/// Seed of repetition `r` in a parallel-repetition batch.
pub fn repetition_seed(seed: u64, r: u32) -> u64 {
    // splitmix64 finalizer over seed and index
    let mut z = seed ^ (u64::from(r).wrapping_add(1)).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Whether every iteration of `build` stays within the slack thresholds:
/// sampled clusters at most `c_clusters |C| p` (skipped while `|C| p` is
/// below `log2 n`) and added edges at most `c_edges |C| / p`.
pub fn iterations_within_slack(build: &SpannerBuild, c_clusters: f64, c_edges: f64) -> bool {
    let log_n = libm::log2(build.n.max(2) as f64);
    build.trace.iter().all(|it| {
        let c = it.clusters_before as f64;
        let p = it.probability;
        let expected = c * p;
        let sampled_ok = expected < log_n || it.sampled as f64 <= c_clusters * expected;
        let added_ok = p <= 0.0 || it.edges_added as f64 <= c_edges * c / p;
        sampled_ok && added_ok
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepetitionOutcome {
    pub build: SpannerBuild,
    /// Index of the selected run.
    pub repetition: u32,
    /// True when no run passed and the smallest one was taken.
    pub fallback: bool,
    pub passed: Vec<bool>,
    pub sizes: Vec<usize>,
}

/// Runs `repetitions` independently seeded builds and keeps the first one
/// whose every iteration is within slack, else the smallest, flagged.
#[allow(clippy::too_many_arguments)]
pub fn parallel_repetition(
    g: &WeightedGraph,
    algorithm: Algorithm,
    k: u32,
    t: u32,
    seed: u64,
    repetitions: u32,
    c_clusters: f64,
    c_edges: f64,
) -> Result<RepetitionOutcome, SpannerError> {
    if repetitions == 0 {
        return Err(SpannerError::NoRepetitions);
    }
    if !(c_clusters >= 1.0 && c_edges >= 1.0) {
        return Err(SpannerError::InvalidSlack);
    }
    let mut builds = Vec::with_capacity(repetitions as usize);
    for r in 0..repetitions {
        builds.push(algorithm.build(g, k, t, repetition_seed(seed, r))?);
    }
    Ok(select_repetition(builds, c_clusters, c_edges))
}

/// Selection step of [`parallel_repetition`] over already built runs.
pub fn select_repetition(
    builds: Vec<SpannerBuild>,
    c_clusters: f64,
    c_edges: f64,
) -> RepetitionOutcome {
    let passed: Vec<bool> = builds
        .iter()
        .map(|b| iterations_within_slack(b, c_clusters, c_edges))
        .collect();
    let sizes: Vec<usize> = builds.iter().map(SpannerBuild::size).collect();
    let (repetition, fallback) = match passed.iter().position(|&p| p) {
        Some(r) => (r, false),
        None => {
            let r = (0..builds.len()).min_by_key(|&r| (sizes[r], r)).unwrap();
            (r, true)
        }
    };
    let build = builds.into_iter().nth(repetition).unwrap();
    RepetitionOutcome {
        build,
        repetition: repetition as u32,
        fallback,
        passed,
        sizes,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub graphs: usize,
    pub builds: usize,
    pub failures: Vec<String>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every algorithm over small structured graphs (paths, cycles,
/// cliques, stars up to `max_n` vertices) plus 100 random graphs and checks
/// completeness, stretch at the algorithm's bound and preserved components.
pub fn bruteforce_equivalence_suite(max_n: usize) -> EquivalenceReport {
    let max_n = max_n.clamp(2, 12);
    let mut graphs: Vec<(String, WeightedGraph)> = Vec::new();
    for n in 2..=max_n {
        graphs.push((format!("path:{n}"), generate::path(n).unwrap()));
        graphs.push((format!("complete:{n}"), generate::complete(n).unwrap()));
        graphs.push((format!("star:{}", n - 1), generate::star(n - 1).unwrap()));
        if n >= 3 {
            graphs.push((format!("cycle:{n}"), generate::cycle(n).unwrap()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for i in 0..100 {
        let n = rng.gen_range(2..=max_n);
        let p = rng.gen_range(0.2..=1.0);
        let dist = if i % 2 == 0 {
            WeightDist::Unit
        } else {
            WeightDist::Uniform { lo: 1.0, hi: 10.0 }
        };
        let seed = rng.gen();
        graphs.push((
            format!("gnp:{n}:{p}:{dist} seed {seed}"),
            generate::gnp(n, p, dist, seed).unwrap(),
        ));
    }

    let mut report = EquivalenceReport {
        graphs: graphs.len(),
        ..EquivalenceReport::default()
    };
    for (name, g) in &graphs {
        for k in 1..=4u32 {
            for seed in 0..2u64 {
                let mut runs = vec![(Algorithm::BaswanaSen, k), (Algorithm::Merge, 1)];
                runs.extend((1..=3).map(|t| (Algorithm::General, t)));
                if g.is_unit_weight() {
                    runs.push((Algorithm::TwoPhase, 1));
                }
                for (algo, t) in runs {
                    report.builds += 1;
                    let label = format!("{name} {algo} k={k} t={t} seed={seed}");
                    let build = match algo.build(g, k, t, seed) {
                        Ok(b) => b,
                        Err(e) => {
                            report.failures.push(format!("{label}: {e}"));
                            continue;
                        }
                    };
                    if !build.is_complete() {
                        report.failures.push(format!("{label}: unprocessed edges"));
                    }
                    let mask = build.spanner_mask();
                    let audit = audit_stretch(g, &mask, algo.stretch_bound(k, t));
                    if !audit.passed() {
                        report.failures.push(format!(
                            "{label}: stretch {} over bound {}",
                            audit.max_ratio, audit.bound
                        ));
                    }
                    if !preserves_components(g, &mask) {
                        report.failures.push(format!("{label}: components differ"));
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spanner::{general_spanner, general_stretch_bound};

    #[test]
    fn dijkstra_on_path() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        assert_eq!(dijkstra(&g, 0, None), vec![0.0, 1.0, 3.0]);
    }

    #[test]
    fn dijkstra_unreachable() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0)]).unwrap();
        assert_eq!(dijkstra(&g, 0, None)[2], f64::INFINITY);
    }

    #[test]
    fn full_spanner_has_ratio_one() {
        let g = generate::gnp(40, 0.2, WeightDist::Uniform { lo: 1.0, hi: 5.0 }, 2).unwrap();
        let audit = audit_stretch(&g, &EdgeMask::all(g.m()), 1.0);
        assert!(audit.passed());
        assert_eq!(audit.max_ratio, 1.0);
    }

    #[test]
    fn disconnection_fails_with_infinite_ratio() {
        let g = WeightedGraph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let mask = EdgeMask::from_ids(2, &[EdgeId(0)]);
        let audit = audit_stretch(&g, &mask, 100.0);
        assert_eq!(audit.failing, vec![EdgeId(1)]);
        assert_eq!(audit.max_ratio, f64::INFINITY);
        assert!(!preserves_components(&g, &mask));
    }

    #[test]
    fn zero_weight_edges() {
        assert_eq!(stretch_ratio(0.0, 0.0), 1.0);
        assert!(within_bound(0.0, 0.0, 3.0));
        assert!(!within_bound(1.0, 0.0, 3.0));
    }

    #[test]
    fn size_study_k1_is_m() {
        let spec: GraphSpec = "gnp:60:0.1:unit".parse().unwrap();
        let stats = size_study(&spec, Algorithm::General, 1, 1, &[1, 2, 3]).unwrap();
        assert_eq!(stats.sizes, stats.m);
        assert!(size_study(&spec, Algorithm::General, 1, 1, &[]).is_err());
    }

    #[test]
    fn size_study_empty_graph() {
        let spec: GraphSpec = "gnp:30:0:unit".parse().unwrap();
        let stats = size_study(&spec, Algorithm::General, 3, 1, &[7]).unwrap();
        assert_eq!(stats.sizes, vec![0]);
    }

    #[test]
    fn repetition_basics() {
        let g = generate::gnp(50, 0.2, WeightDist::Unit, 1).unwrap();
        assert_eq!(
            parallel_repetition(&g, Algorithm::General, 2, 1, 0, 0, 4.0, 4.0),
            Err(SpannerError::NoRepetitions)
        );
        assert_eq!(
            parallel_repetition(&g, Algorithm::General, 2, 1, 0, 2, 0.5, 4.0),
            Err(SpannerError::InvalidSlack)
        );
        let one = parallel_repetition(&g, Algorithm::General, 3, 1, 5, 1, 4.0, 4.0).unwrap();
        assert_eq!(one.repetition, 0);
        let k1 = parallel_repetition(&g, Algorithm::General, 1, 1, 5, 4, 4.0, 4.0).unwrap();
        assert_eq!(k1.repetition, 0);
        assert!(!k1.fallback);
    }

    #[test]
    fn repetition_never_weakens_stretch() {
        let g = generate::gnp(120, 0.08, WeightDist::Uniform { lo: 1.0, hi: 9.0 }, 4).unwrap();
        let out = parallel_repetition(&g, Algorithm::General, 4, 1, 9, 4, 4.0, 4.0).unwrap();
        let audit = audit_stretch(&g, &out.build.spanner_mask(), general_stretch_bound(4, 1));
        assert!(audit.passed());
    }

    #[test]
    fn selection_prefers_first_passing_run() {
        let g = generate::gnp(60, 0.1, WeightDist::Unit, 2).unwrap();
        let builds: Vec<SpannerBuild> = (0..3)
            .map(|s| general_spanner(&g, 3, 1, s).unwrap())
            .collect();
        let strict = select_repetition(builds.clone(), 1.0, 1.0);
        let loose = select_repetition(builds, 1e9, 1e9);
        assert_eq!(loose.repetition, 0);
        assert!(!loose.fallback);
        if strict.fallback {
            let min = *strict.sizes.iter().min().unwrap();
            assert_eq!(strict.build.size(), min);
        }
    }
}
