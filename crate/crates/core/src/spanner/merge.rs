//! Cluster-cluster merging, run directly on the original vertices.
//!
//! Every epoch is one iteration: sample clusters, let each unsampled
//! cluster merge into its lightest sampled neighbor cluster (adding that
//! edge and every strictly lighter per-cluster minimum) or, without a
//! sampled neighbor, add its per-cluster minimums and retire. Between
//! epochs only the lightest edge between two clusters stays live. The
//! output coincides with the general algorithm at `t = 1`, which works on
//! contracted graphs instead.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::engine::{whole_graph, BuildState};
use super::{epoch_schedule, EpochRecord, IterationRecord, Phase2Record, Rule, SpannerBuild};
use crate::clustering::{sample_clusters, Clustering, TreeLink};
use crate::error::SpannerError;
use crate::graph::{lighter, EdgeId, WeightedGraph};

/// Lightest live edge from the current cluster into one neighbor cluster.
#[derive(Clone, Copy)]
struct Crossing {
    w: f64,
    id: EdgeId,
    inside: usize,
    outside: usize,
}

pub fn cluster_merge_spanner(
    g: &WeightedGraph,
    k: u32,
    seed: u64,
) -> Result<SpannerBuild, SpannerError> {
    let plans = epoch_schedule(k, 1, g.n())?;
    if k == 1 {
        return Ok(whole_graph(g, k, 1, seed));
    }
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = BuildState::new(g.m());
    let mut clusters = Clustering::singletons(n);

    for (i, plan) in plans.iter().enumerate() {
        let epoch = plan.epoch;
        let clusters_at_start = clusters.num_clusters();
        let members = clusters.members();
        let sampled = sample_clusters(&clusters, plan.probability, &mut rng);

        let mut best: Vec<Option<Crossing>> = vec![None; clusters.num_clusters()];
        let mut resolved = vec![false; clusters.num_clusters()];
        let mut adds = Vec::new();
        let mut removes: Vec<(EdgeId, Rule)> = Vec::new();
        // (absorbed cluster, host, vertex inside absorbed, vertex in host, edge)
        let mut merges: Vec<(usize, usize, usize, usize, EdgeId)> = Vec::new();

        for (c, cluster_members) in members.iter().enumerate() {
            if sampled.contains(c) {
                continue;
            }
            let mut touched = Vec::new();
            for &x in cluster_members {
                for &id in g.incident(x) {
                    if !state.live(id) {
                        continue;
                    }
                    let e = g.edge(id);
                    let y = e.other(x);
                    let cy = clusters
                        .cluster_of(y)
                        .expect("live edge leaves the clustering");
                    let cand = Crossing {
                        w: e.w,
                        id,
                        inside: x,
                        outside: y,
                    };
                    match &mut best[cy] {
                        slot @ None => {
                            touched.push(cy);
                            *slot = Some(cand);
                        }
                        Some(cur) => {
                            if lighter((cand.w, cand.id), (cur.w, cur.id)) == Ordering::Less {
                                *cur = cand;
                            }
                        }
                    }
                }
            }
            touched.sort_unstable();

            let mut host: Option<(usize, Crossing)> = None;
            for &cy in &touched {
                if !sampled.contains(cy) {
                    continue;
                }
                let b = best[cy].unwrap();
                let better = match host {
                    None => true,
                    Some((_, h)) => lighter((b.w, b.id), (h.w, h.id)) == Ordering::Less,
                };
                if better {
                    host = Some((cy, b));
                }
            }

            let rule = if let Some((h, via)) = host {
                adds.push(via.id);
                merges.push((c, h, via.inside, via.outside, via.id));
                resolved[h] = true;
                for &cy in &touched {
                    let b = best[cy].unwrap();
                    if cy != h && b.w < via.w {
                        adds.push(b.id);
                        resolved[cy] = true;
                    }
                }
                Rule::SampledNeighbor
            } else {
                for &cy in &touched {
                    adds.push(best[cy].unwrap().id);
                    resolved[cy] = true;
                }
                Rule::NoSampledNeighbor
            };

            let mut own: Vec<(EdgeId, usize)> = Vec::new();
            for &x in &members[c] {
                for &id in g.incident(x) {
                    if state.live(id) {
                        own.push((id, clusters.cluster_of(g.edge(id).other(x)).unwrap()));
                    }
                }
            }
            own.sort_unstable_by_key(|&(id, _)| id);
            for (id, cy) in own {
                if resolved[cy] {
                    removes.push((id, rule));
                }
            }
            for cy in touched {
                best[cy] = None;
                resolved[cy] = false;
            }
        }

        let mut edges_added = 0;
        for id in adds {
            edges_added += usize::from(state.add(id));
        }
        let mut edges_discarded = 0;
        for (id, rule) in removes {
            edges_discarded += usize::from(state.discard(id, epoch, 1, rule));
        }

        clusters = merge_clusters(&clusters, &members, &sampled, &merges)?;
        for id in g.edge_ids() {
            if !state.live(id) {
                continue;
            }
            let e = g.edge(id);
            if clusters.cluster_of(e.u) == clusters.cluster_of(e.v) {
                edges_discarded += usize::from(state.discard(id, epoch, 1, Rule::IntraCluster));
            }
        }
        state.trace.push(IterationRecord {
            epoch,
            iteration: 1,
            clusters_before: clusters_at_start,
            sampled: sampled.len(),
            probability: plan.probability,
            edges_added,
            edges_discarded,
        });

        let live: Vec<EdgeId> = g.edge_ids().filter(|&id| state.live(id)).collect();
        let mut record = EpochRecord {
            epoch,
            probability: plan.probability,
            iterations: 1,
            super_nodes: clusters_at_start,
            clusters_after: clusters.num_clusters(),
            live_edges: live.len(),
            contraction_dropped: 0,
        };
        if i + 1 < plans.len() {
            record.contraction_dropped =
                keep_lightest_between_clusters(g, &clusters, &live, &mut state, epoch);
        }
        state.epochs.push(record);
    }

    let phase2 = final_phase(g, &clusters, &mut state, plans.len() as u32);
    Ok(state.finish(g, k, 1, seed, phase2, clusters))
}

/// Sampled clusters absorb whole unsampled clusters. An absorbed tree is
/// re-rooted at the vertex its merge edge leaves from.
fn merge_clusters(
    clusters: &Clustering,
    members: &[Vec<usize>],
    sampled: &crate::clustering::SampledSet,
    merges: &[(usize, usize, usize, usize, EdgeId)],
) -> Result<Clustering, SpannerError> {
    let n = clusters.node_count();
    let mut new_id = vec![usize::MAX; clusters.num_clusters()];
    let mut centers = Vec::new();
    for c in sampled.iter() {
        new_id[c] = centers.len();
        centers.push(clusters.center(c));
    }
    let mut cluster_of = vec![None; n];
    let mut parent: Vec<Option<TreeLink>> = vec![None; n];
    for c in sampled.iter() {
        for &v in &members[c] {
            cluster_of[v] = Some(new_id[c]);
            parent[v] = clusters.parent(v);
        }
    }
    for &(absorbed, host, inside, outside, edge) in merges {
        for &v in &members[absorbed] {
            cluster_of[v] = Some(new_id[host]);
            parent[v] = clusters.parent(v);
        }
        let mut link = TreeLink {
            parent: outside,
            edge,
        };
        let mut x = inside;
        loop {
            let up = clusters.parent(x);
            parent[x] = Some(link);
            let Some(up) = up else { break };
            link = TreeLink {
                parent: x,
                edge: up.edge,
            };
            x = up.parent;
        }
    }
    Ok(Clustering::from_parts(cluster_of, centers, parent)?)
}

fn keep_lightest_between_clusters(
    g: &WeightedGraph,
    clusters: &Clustering,
    live: &[EdgeId],
    state: &mut BuildState,
    epoch: u32,
) -> usize {
    let mut keyed: Vec<((usize, usize), f64, EdgeId)> = live
        .iter()
        .map(|&id| {
            let e = g.edge(id);
            let a = clusters.cluster_of(e.u).unwrap();
            let b = clusters.cluster_of(e.v).unwrap();
            ((a.min(b), a.max(b)), e.w, id)
        })
        .collect();
    keyed.sort_by(|x, y| x.0.cmp(&y.0).then(lighter((x.1, x.2), (y.1, y.2))));
    let mut dropped = 0;
    for i in 1..keyed.len() {
        if keyed[i].0 == keyed[i - 1].0 {
            dropped += usize::from(state.discard(keyed[i].2, epoch, 0, Rule::Contraction));
        }
    }
    dropped
}

/// Every vertex keeps its lightest live edge into each final cluster.
fn final_phase(
    g: &WeightedGraph,
    clusters: &Clustering,
    state: &mut BuildState,
    epoch: u32,
) -> Phase2Record {
    let n = g.n();
    let mut chosen: Vec<Option<(f64, EdgeId)>> = vec![None; clusters.num_clusters()];
    let mut keep = Vec::new();
    let mut endpoints = 0;
    for x in 0..n {
        let mut touched = Vec::new();
        for &id in g.incident(x) {
            if !state.live(id) {
                continue;
            }
            let c = clusters.cluster_of(g.edge(id).other(x)).unwrap();
            let w = g.edge(id).w;
            match chosen[c] {
                None => {
                    touched.push(c);
                    chosen[c] = Some((w, id));
                }
                Some(cur) => {
                    if lighter((w, id), cur) == Ordering::Less {
                        chosen[c] = Some((w, id));
                    }
                }
            }
        }
        if !touched.is_empty() {
            endpoints += 1;
        }
        for c in touched {
            keep.push(chosen[c].unwrap().1);
            chosen[c] = None;
        }
    }
    let mut kept = vec![false; g.m()];
    for id in &keep {
        kept[id.index()] = true;
    }
    let rest: Vec<EdgeId> = g
        .edge_ids()
        .filter(|&id| state.live(id) && !kept[id.index()])
        .collect();
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
