//! Epoch engine of the general algorithm.
//!
//! Each iteration works on the current level graph: sample clusters, let
//! every node of an unsampled cluster pick its edges from a snapshot taken
//! at the start of the iteration, then apply all additions before any
//! removal and grow the sampled clusters. An epoch ends by contracting the
//! clusters into the next level, except for the last epoch, which is
//! followed by Phase 2 on the base graph instead.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    epoch_schedule, radius_bound, Disposition, EpochPlan, EpochRecord, IterationRecord,
    Phase2Record, Rule, SpannerBuild,
};
use crate::clustering::{
    compose, contract, grow_clusters, sample_clusters, Attachment, Clustering, QuotientGraph,
};
use crate::error::SpannerError;
use crate::graph::{lighter, EdgeId, WeightedGraph};

/// Composed clustering and live edges at the end of one epoch, before
/// contraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochSnapshot {
    pub epoch: u32,
    pub clustering: Clustering,
    pub live_edges: Vec<EdgeId>,
    pub radius_bound: u64,
}

pub(crate) struct BuildState {
    pub disposition: Vec<Disposition>,
    pub trace: Vec<IterationRecord>,
    pub epochs: Vec<EpochRecord>,
}

impl BuildState {
    pub fn new(m: usize) -> Self {
        Self {
            disposition: vec![Disposition::Unprocessed; m],
            trace: Vec::new(),
            epochs: Vec::new(),
        }
    }

    #[inline]
    pub fn live(&self, id: EdgeId) -> bool {
        self.disposition[id.index()] == Disposition::Unprocessed
    }

    /// Adds a live edge to the spanner; false if it was already resolved.
    pub fn add(&mut self, id: EdgeId) -> bool {
        let slot = &mut self.disposition[id.index()];
        if *slot == Disposition::Unprocessed {
            *slot = Disposition::InSpanner;
            true
        } else {
            false
        }
    }

    /// Discards a live edge; false if it was already resolved.
    pub fn discard(&mut self, id: EdgeId, epoch: u32, iteration: u32, rule: Rule) -> bool {
        let slot = &mut self.disposition[id.index()];
        if *slot == Disposition::Unprocessed {
            *slot = Disposition::Discarded {
                epoch,
                iteration,
                rule,
            };
            true
        } else {
            false
        }
    }

    pub fn finish(
        self,
        g: &WeightedGraph,
        k: u32,
        t: u32,
        seed: u64,
        phase2: Phase2Record,
        final_clustering: Clustering,
    ) -> SpannerBuild {
        let spanner_edges = self
            .disposition
            .iter()
            .enumerate()
            .filter(|(_, d)| **d == Disposition::InSpanner)
            .map(|(i, _)| EdgeId::from(i))
            .collect();
        SpannerBuild {
            k,
            t,
            seed,
            n: g.n(),
            m: g.m(),
            spanner_edges,
            disposition: self.disposition,
            trace: self.trace,
            epochs: self.epochs,
            phase2,
            final_clustering,
        }
    }
}

/// Spanner equal to the whole graph, used for `k = 1`.
pub(crate) fn whole_graph(g: &WeightedGraph, k: u32, t: u32, seed: u64) -> SpannerBuild {
    let mut state = BuildState::new(g.m());
    for id in g.edge_ids() {
        state.add(id);
    }
    state.finish(
        g,
        k,
        t,
        seed,
        Phase2Record::default(),
        Clustering::singletons(g.n()),
    )
}

/// Composed clustering and live edges when an epoch ends, before contraction.
pub(crate) struct EpochEnd {
    pub composed: Clustering,
    pub live: Vec<EdgeId>,
}

/// One level of the epoch engine over a fixed base graph.
pub(crate) struct Level<'a> {
    base: &'a QuotientGraph,
    graph: QuotientGraph,
    clustering: Clustering,
    /// Composed clustering of the base whose clusters are `graph`'s nodes.
    below: Clustering,
    best: Vec<Option<(f64, EdgeId, usize)>>,
    drop_group: Vec<bool>,
}

impl<'a> Level<'a> {
    pub fn new(base: &'a QuotientGraph) -> Self {
        let n = base.super_count();
        Self {
            base,
            graph: base.clone(),
            clustering: Clustering::singletons(n),
            below: Clustering::singletons(n),
            best: Vec::new(),
            drop_group: Vec::new(),
        }
    }

    pub fn graph(&self) -> &QuotientGraph {
        &self.graph
    }

    pub fn live_edges(&self, state: &BuildState) -> Vec<EdgeId> {
        let mut out: Vec<EdgeId> = self
            .graph
            .super_edges()
            .iter()
            .map(|e| e.original)
            .filter(|&id| state.live(id))
            .collect();
        out.sort_unstable();
        out
    }

    /// One sampling-and-growth iteration.
    pub fn iterate<R: rand::Rng>(
        &mut self,
        state: &mut BuildState,
        epoch: u32,
        iteration: u32,
        p: f64,
        rng: &mut R,
    ) -> Result<(), SpannerError> {
        let clustering = &self.clustering;
        let graph = &self.graph;
        let clusters_before = clustering.num_clusters();
        let sampled = sample_clusters(clustering, p, rng);

        self.best.clear();
        self.best.resize(clusters_before, None);
        self.drop_group.clear();
        self.drop_group.resize(clusters_before, false);
        let best = &mut self.best;
        let drop_group = &mut self.drop_group;

        let mut adds: Vec<EdgeId> = Vec::new();
        let mut removes: Vec<(EdgeId, Rule)> = Vec::new();
        let mut attachments: Vec<Attachment> = Vec::new();
        let mut touched: Vec<usize> = Vec::new();

        for v in 0..graph.super_count() {
            let Some(cv) = clustering.cluster_of(v) else {
                continue;
            };
            if sampled.contains(cv) {
                continue;
            }
            touched.clear();
            for &idx in graph.incident(v) {
                let e = graph.edge(idx);
                if !state.live(e.original) {
                    continue;
                }
                let u = e.other(v);
                let cu = clustering
                    .cluster_of(u)
                    .expect("live edge with an inactive endpoint");
                debug_assert_ne!(cu, cv, "live edge inside a cluster");
                match best[cu] {
                    None => {
                        touched.push(cu);
                        best[cu] = Some((e.w, e.original, u));
                    }
                    Some((w, id, _)) => {
                        if lighter(e.key(), (w, id)) == Ordering::Less {
                            best[cu] = Some((e.w, e.original, u));
                        }
                    }
                }
            }

            let nearest = touched
                .iter()
                .copied()
                .filter(|&c| sampled.contains(c))
                .min_by(|&a, &b| {
                    let (wa, ia, _) = best[a].unwrap();
                    let (wb, ib, _) = best[b].unwrap();
                    lighter((wa, ia), (wb, ib))
                });

            let rule = match nearest {
                Some(host) => {
                    let (w_near, id_near, at) = best[host].unwrap();
                    adds.push(id_near);
                    attachments.push(Attachment {
                        node: v,
                        host,
                        at,
                        edge: id_near,
                    });
                    drop_group[host] = true;
                    for &c in &touched {
                        let (w, id, _) = best[c].unwrap();
                        if c != host && w < w_near {
                            adds.push(id);
                            drop_group[c] = true;
                        }
                    }
                    Rule::SampledNeighbor
                }
                None => {
                    for &c in &touched {
                        adds.push(best[c].unwrap().1);
                        drop_group[c] = true;
                    }
                    Rule::NoSampledNeighbor
                }
            };

            for &idx in graph.incident(v) {
                let e = graph.edge(idx);
                if !state.live(e.original) {
                    continue;
                }
                let cu = clustering.cluster_of(e.other(v)).unwrap();
                if drop_group[cu] {
                    removes.push((e.original, rule));
                }
            }
            for &c in &touched {
                best[c] = None;
                drop_group[c] = false;
            }
        }

        let mut edges_added = 0;
        for id in adds {
            edges_added += usize::from(state.add(id));
        }
        let mut edges_discarded = 0;
        for (id, rule) in removes {
            edges_discarded += usize::from(state.discard(id, epoch, iteration, rule));
        }

        let grown = grow_clusters(graph, clustering, &sampled, &attachments)?;
        for e in graph.super_edges() {
            if !state.live(e.original) {
                continue;
            }
            let (ca, cb) = (grown.cluster_of(e.a), grown.cluster_of(e.b));
            debug_assert!(ca.is_some() && cb.is_some(), "live edge lost an endpoint");
            if ca == cb {
                edges_discarded +=
                    usize::from(state.discard(e.original, epoch, iteration, Rule::IntraCluster));
            }
        }
        #[cfg(debug_assertions)]
        grown.validate_on(graph)?;
        self.clustering = grown;

        state.trace.push(IterationRecord {
            epoch,
            iteration,
            clusters_before,
            sampled: sampled.len(),
            probability: p,
            edges_added,
            edges_discarded,
        });
        Ok(())
    }

    /// Runs `plan`'s iterations and closes the epoch. With `contract_after`
    /// the clusters become the nodes of the next level.
    pub fn run_epoch<R: rand::Rng>(
        &mut self,
        state: &mut BuildState,
        plan: &EpochPlan,
        contract_after: bool,
        rng: &mut R,
    ) -> Result<EpochEnd, SpannerError> {
        let super_nodes = self.graph.super_count();
        for iteration in 1..=plan.iterations {
            self.iterate(state, plan.epoch, iteration, plan.probability, rng)?;
        }
        let composed = compose(&self.clustering, &self.below, self.base)?;
        let live = self.live_edges(state);
        let mut record = EpochRecord {
            epoch: plan.epoch,
            probability: plan.probability,
            iterations: plan.iterations,
            super_nodes,
            clusters_after: self.clustering.num_clusters(),
            live_edges: live.len(),
            contraction_dropped: 0,
        };
        if contract_after {
            let out = contract(&self.graph, &self.clustering, &live)?;
            for &id in &out.dropped {
                state.discard(id, plan.epoch, 0, Rule::Contraction);
            }
            record.contraction_dropped = out.dropped.len();
            self.clustering = Clustering::singletons(out.quotient.super_count());
            self.graph = out.quotient;
            self.below = composed.clone();
        }
        state.epochs.push(record);
        Ok(EpochEnd { composed, live })
    }
}

/// For every endpoint `x` of a live edge and every final cluster `c`, keeps
/// the lightest edge from `x` into `c` and discards the others.
pub(crate) fn phase2(
    base: &QuotientGraph,
    clustering: &Clustering,
    state: &mut BuildState,
    epoch: u32,
) -> Phase2Record {
    let mut entries: Vec<(usize, usize, f64, EdgeId)> = Vec::new();
    for e in base.super_edges() {
        if !state.live(e.original) {
            continue;
        }
        let ca = clustering
            .cluster_of(e.a)
            .expect("live edge with an inactive endpoint");
        let cb = clustering
            .cluster_of(e.b)
            .expect("live edge with an inactive endpoint");
        entries.push((e.a, cb, e.w, e.original));
        entries.push((e.b, ca, e.w, e.original));
    }
    entries.sort_by(|x, y| {
        (x.0, x.1)
            .cmp(&(y.0, y.1))
            .then(lighter((x.2, x.3), (y.2, y.3)))
    });

    let mut keep = Vec::new();
    let mut rest = Vec::new();
    let mut endpoints = 0;
    for (i, entry) in entries.iter().enumerate() {
        let first_of_node = i == 0 || entries[i - 1].0 != entry.0;
        let first_of_group = first_of_node || entries[i - 1].1 != entry.1;
        endpoints += usize::from(first_of_node);
        if first_of_group {
            keep.push(entry.3);
        } else {
            rest.push(entry.3);
        }
    }
    let mut record = Phase2Record {
        epoch,
        endpoints,
        ..Phase2Record::default()
    };
    for id in keep {
        record.edges_added += usize::from(state.add(id));
    }
    for id in rest {
        record.edges_discarded += usize::from(state.discard(id, epoch, 0, Rule::Phase2));
    }
    record
}

/// The general algorithm with `t` iterations per epoch.
pub fn general_spanner(
    g: &WeightedGraph,
    k: u32,
    t: u32,
    seed: u64,
) -> Result<SpannerBuild, SpannerError> {
    run_general(g, k, t, seed, None)
}

/// Like [`general_spanner`], also returning the composed clustering and
/// live edges at the end of every epoch.
pub fn general_spanner_traced(
    g: &WeightedGraph,
    k: u32,
    t: u32,
    seed: u64,
) -> Result<(SpannerBuild, Vec<EpochSnapshot>), SpannerError> {
    let mut snapshots = Vec::new();
    let build = run_general(g, k, t, seed, Some(&mut snapshots))?;
    Ok((build, snapshots))
}

fn run_general(
    g: &WeightedGraph,
    k: u32,
    t: u32,
    seed: u64,
    mut snapshots: Option<&mut Vec<EpochSnapshot>>,
) -> Result<SpannerBuild, SpannerError> {
    let plans = epoch_schedule(k, t, g.n())?;
    if k == 1 {
        return Ok(whole_graph(g, k, t, seed));
    }
    let base = QuotientGraph::identity(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = BuildState::new(g.m());
    let mut level = Level::new(&base);
    let mut composed = Clustering::singletons(g.n());
    for (i, plan) in plans.iter().enumerate() {
        let last = i + 1 == plans.len();
        let end = level.run_epoch(&mut state, plan, !last, &mut rng)?;
        if let Some(out) = snapshots.as_deref_mut() {
            out.push(EpochSnapshot {
                epoch: plan.epoch,
                clustering: end.composed.clone(),
                live_edges: end.live,
                radius_bound: radius_bound(t, plan.epoch),
            });
        }
        composed = end.composed;
    }
    let epoch = plans.len() as u32;
    let phase2 = phase2(&base, &composed, &mut state, epoch);
    Ok(state.finish(g, k, t, seed, phase2, composed))
}
