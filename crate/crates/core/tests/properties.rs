//! Randomized invariants of the clustering primitives and the spanner
//! constructions.

use std::collections::{BTreeMap, VecDeque};

use proptest::prelude::*;

use spanforge_core::clustering::{compose, contract, Clustering, QuotientGraph, TreeLink};
use spanforge_core::oracle::{audit_stretch, components, dijkstra};
use spanforge_core::spanner::{
    cluster_merge_spanner, general_spanner, general_spanner_traced, two_phase_hop_bound, Algorithm,
    Disposition,
};
use spanforge_core::{EdgeId, EdgeMask, WeightedGraph};

/// Small graphs with few distinct weights, so ties are common.
fn graphs(max_n: usize, unit: bool) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n).prop_flat_map(move |n| {
        let w = if unit {
            Just(1.0).boxed()
        } else {
            (1u8..=4).prop_map(f64::from).boxed()
        };
        prop::collection::vec((0..n, 0..n, w), 0..n * 3)
            .prop_map(move |edges| WeightedGraph::from_edges(n, edges).unwrap())
    })
}

/// Star clusters: each center absorbs a subset of its neighbors through the
/// edge to them, everything else stays inactive.
fn star_clustering(g: &QuotientGraph, is_center: &[bool], join: &[bool]) -> Clustering {
    let n = g.super_count();
    let mut centers = Vec::new();
    let mut cluster_of = vec![None; n];
    for v in 0..n {
        if is_center[v] {
            cluster_of[v] = Some(centers.len());
            centers.push(v);
        }
    }
    let mut parent = vec![None; n];
    for v in 0..n {
        if is_center[v] || !join[v] {
            continue;
        }
        let host = g
            .incident(v)
            .iter()
            .map(|&i| g.edge(i))
            .filter(|e| is_center[e.other(v)])
            .min_by(|a, b| a.key().partial_cmp(&b.key()).unwrap());
        if let Some(e) = host {
            let c = e.other(v);
            cluster_of[v] = cluster_of[c];
            parent[v] = Some(TreeLink {
                parent: c,
                edge: e.original,
            });
        }
    }
    Clustering::from_parts(cluster_of, centers, parent).unwrap()
}

fn crossing_edges(g: &QuotientGraph, c: &Clustering) -> Vec<EdgeId> {
    g.super_edges()
        .iter()
        .filter(|e| match (c.cluster_of(e.a), c.cluster_of(e.b)) {
            (Some(x), Some(y)) => x != y,
            _ => false,
        })
        .map(|e| e.original)
        .collect()
}

/// Depth of every clustered node by BFS over tree edges from its center.
fn bfs_depths(g: &WeightedGraph, c: &Clustering) -> Vec<Option<u32>> {
    let mut adj = vec![Vec::new(); g.n()];
    for id in c.tree_edges() {
        let e = g.edge(id);
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    let mut depth = vec![None; g.n()];
    let mut queue = VecDeque::new();
    for &s in c.centers() {
        depth[s] = Some(0);
        queue.push_back(s);
    }
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if depth[y].is_none() {
                depth[y] = Some(depth[x].unwrap() + 1);
                queue.push_back(y);
            }
        }
    }
    depth
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn contraction_keeps_lightest_edge_per_pair(
        g in graphs(14, false),
        flags in prop::collection::vec((any::<bool>(), any::<bool>()), 14),
    ) {
        let base = QuotientGraph::identity(&g);
        let is_center: Vec<bool> = flags.iter().take(g.n()).map(|f| f.0).collect();
        let join: Vec<bool> = flags.iter().take(g.n()).map(|f| f.1).collect();
        let c = star_clustering(&base, &is_center, &join);
        let surviving = crossing_edges(&base, &c);
        let out = contract(&base, &c, &surviving).unwrap();

        let mut best: BTreeMap<(usize, usize), (f64, EdgeId)> = BTreeMap::new();
        for &id in &surviving {
            let e = g.edge(id);
            let (x, y) = (c.cluster_of(e.u).unwrap(), c.cluster_of(e.v).unwrap());
            let pair = (x.min(y), x.max(y));
            let cand = (e.w, id);
            let cur = best.entry(pair).or_insert(cand);
            if cand < *cur {
                *cur = cand;
            }
        }
        let q = &out.quotient;
        prop_assert_eq!(q.super_count(), c.num_clusters());
        prop_assert_eq!(q.super_edges().len(), best.len());
        for e in q.super_edges() {
            prop_assert_eq!(best[&(e.a.min(e.b), e.a.max(e.b))], (e.w, e.original));
        }
        prop_assert_eq!(out.dropped.len() + best.len(), surviving.len());
    }

    #[test]
    fn compose_depths_match_tree_bfs(
        g in graphs(14, false),
        inner_flags in prop::collection::vec((any::<bool>(), any::<bool>()), 14),
        outer_flags in prop::collection::vec((any::<bool>(), any::<bool>()), 14),
    ) {
        let base = QuotientGraph::identity(&g);
        let n = g.n();
        let inner = star_clustering(
            &base,
            &inner_flags.iter().take(n).map(|f| f.0).collect::<Vec<_>>(),
            &inner_flags.iter().take(n).map(|f| f.1).collect::<Vec<_>>(),
        );
        let q = contract(&base, &inner, &crossing_edges(&base, &inner)).unwrap().quotient;
        let s = q.super_count();
        let outer = star_clustering(
            &q,
            &outer_flags.iter().cycle().take(s).map(|f| f.0).collect::<Vec<_>>(),
            &outer_flags.iter().cycle().take(s).map(|f| f.1).collect::<Vec<_>>(),
        );
        let composed = compose(&outer, &inner, &base).unwrap();
        prop_assert!(composed.validate().is_ok());

        let bfs = bfs_depths(&g, &composed);
        for (v, depth) in bfs.iter().enumerate() {
            let expected_cluster = inner.cluster_of(v).and_then(|x| outer.cluster_of(x));
            prop_assert_eq!(composed.cluster_of(v), expected_cluster);
            if composed.cluster_of(v).is_some() {
                prop_assert_eq!(*depth, Some(composed.depth(v)));
            }
        }
        let mut tree: Vec<EdgeId> = composed.tree_edges().collect();
        let mut want: Vec<EdgeId> = inner
            .tree_edges()
            .filter(|&id| {
                let e = g.edge(id);
                outer.cluster_of(inner.cluster_of(e.u).unwrap()).is_some()
            })
            .chain(outer.tree_edges())
            .collect();
        tree.sort_unstable();
        want.sort_unstable();
        prop_assert_eq!(tree, want);
    }

    #[test]
    fn general_spanner_invariants(g in graphs(14, false), k in 1u32..=6, t in 1u32..=3, seed in any::<u64>()) {
        let b = general_spanner(&g, k, t, seed).unwrap();
        prop_assert!(b.check_consistency().is_ok());
        prop_assert!(b.disposition.iter().all(|d| *d != Disposition::Unprocessed));
        prop_assert!(b.spanner_edges.windows(2).all(|w| w[0] < w[1]));
        for id in g.edge_ids() {
            prop_assert_eq!(b.disposition[id.index()] == Disposition::InSpanner, b.spanner_mask().contains(id));
        }
        let mask = b.spanner_mask();
        prop_assert_eq!(components(&g, Some(&mask)), components(&g, None));
        let audit = audit_stretch(&g, &mask, Algorithm::General.stretch_bound(k, t));
        prop_assert!(audit.passed(), "max ratio {}", audit.max_ratio);
        prop_assert_eq!(general_spanner(&g, k, t, seed).unwrap(), b);
    }

    #[test]
    fn extreme_t_reaches_odd_stretch(g in graphs(14, false), k in 1u32..=6, seed in any::<u64>()) {
        let b = general_spanner(&g, k, k, seed).unwrap();
        let bound = f64::from(2 * k - 1);
        prop_assert!(audit_stretch(&g, &b.spanner_mask(), bound).passed());
    }

    #[test]
    fn merge_equals_general_with_one_iteration(g in graphs(14, false), k in 1u32..=6, seed in any::<u64>()) {
        prop_assert_eq!(cluster_merge_spanner(&g, k, seed).unwrap(), general_spanner(&g, k, 1, seed).unwrap());
    }

    #[test]
    fn epoch_clusterings_have_bounded_radius(g in graphs(14, false), k in 2u32..=6, t in 1u32..=3, seed in any::<u64>()) {
        let (_, snaps) = general_spanner_traced(&g, k, t, seed).unwrap();
        let base = QuotientGraph::identity(&g);
        for s in &snaps {
            prop_assert_eq!(s.radius_bound, ((2 * u64::from(t) + 1).pow(s.epoch) - 1) / 2);
            let cert = spanforge_core::clustering::check_radius(&s.clustering, &base, &s.live_edges, s.radius_bound);
            prop_assert!(cert.passed(), "{:?}", cert.violation);
        }
    }

    #[test]
    fn two_phase_stays_within_hop_bound(g in graphs(14, true), k in 1u32..=16, seed in any::<u64>()) {
        let b = Algorithm::TwoPhase.build(&g, k, 1, seed).unwrap();
        prop_assert!(b.check_consistency().is_ok());
        let mask = b.spanner_mask();
        prop_assert!(audit_stretch(&g, &mask, two_phase_hop_bound(k)).passed());
    }

    #[test]
    fn full_mask_distances_equal_unmasked(g in graphs(14, false), s in 0usize..14) {
        let s = s % g.n();
        prop_assert_eq!(dijkstra(&g, s, Some(&EdgeMask::all(g.m()))), dijkstra(&g, s, None));
    }
}
