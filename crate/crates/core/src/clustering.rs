//! Rooted-tree clusterings, quotient graphs and clustering composition.
//!
//! Algorithms run on a [`QuotientGraph`]: a contracted graph whose nodes are
//! clusters of the previous level and whose edges each carry the original
//! [`EdgeId`] they stand for. The original graph itself is the identity
//! quotient. A [`Clustering`] partitions the *active* nodes of one level into
//! rooted trees; [`compose`] maps a clustering of a quotient back onto the
//! level below it, so every intermediate clustering can be inspected on the
//! original vertices.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ClusterError;
use crate::graph::{lighter, EdgeId, WeightedGraph};

/// One edge of a quotient graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperEdge {
    pub a: usize,
    pub b: usize,
    /// The original edge this super-edge represents.
    pub original: EdgeId,
    pub w: f64,
}

impl SuperEdge {
    #[inline]
    pub fn other(&self, x: usize) -> usize {
        if x == self.a {
            self.b
        } else {
            self.a
        }
    }

    #[inline]
    pub fn key(&self) -> (f64, EdgeId) {
        (self.w, self.original)
    }
}

/// Contracted super-graph. At most one edge per unordered super-node pair,
/// always the lightest surviving original edge between the two clusters.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientGraph {
    super_count: usize,
    /// Node of the contracted graph -> super-node, `None` for inactive nodes.
    super_of: Vec<Option<usize>>,
    super_edges: Vec<SuperEdge>,
    adjacency: Vec<Vec<usize>>,
    by_original: Vec<(EdgeId, usize)>,
}

impl QuotientGraph {
    /// The original graph viewed as a quotient of itself.
    pub fn identity(g: &WeightedGraph) -> Self {
        let edges = g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| SuperEdge {
                a: e.u,
                b: e.v,
                original: EdgeId::from(i),
                w: e.w,
            })
            .collect();
        Self::assemble(g.n(), (0..g.n()).map(Some).collect(), edges)
    }

    fn assemble(
        super_count: usize,
        super_of: Vec<Option<usize>>,
        super_edges: Vec<SuperEdge>,
    ) -> Self {
        let mut adjacency = vec![Vec::new(); super_count];
        for (i, e) in super_edges.iter().enumerate() {
            adjacency[e.a].push(i);
            adjacency[e.b].push(i);
        }
        let mut by_original: Vec<(EdgeId, usize)> = super_edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.original, i))
            .collect();
        by_original.sort_unstable();
        Self {
            super_count,
            super_of,
            super_edges,
            adjacency,
            by_original,
        }
    }

    #[inline]
    pub fn super_count(&self) -> usize {
        self.super_count
    }

    /// Super-node that node `v` of the contracted graph was merged into.
    #[inline]
    pub fn super_of(&self, v: usize) -> Option<usize> {
        self.super_of[v]
    }

    pub fn super_map(&self) -> &[Option<usize>] {
        &self.super_of
    }

    #[inline]
    pub fn super_edges(&self) -> &[SuperEdge] {
        &self.super_edges
    }

    #[inline]
    pub fn edge(&self, index: usize) -> &SuperEdge {
        &self.super_edges[index]
    }

    #[inline]
    pub fn incident(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    /// Position of the super-edge carrying original edge `id`.
    pub fn position(&self, id: EdgeId) -> Option<usize> {
        self.by_original
            .binary_search_by(|probe| probe.0.cmp(&id))
            .ok()
            .map(|i| self.by_original[i].1)
    }

    pub fn edge_by_original(&self, id: EdgeId) -> Option<&SuperEdge> {
        self.position(id).map(|i| &self.super_edges[i])
    }

    pub fn is_unit_weight(&self) -> bool {
        self.super_edges.iter().all(|e| e.w == 1.0)
    }
}

/// Parent pointer in a cluster tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeLink {
    pub parent: usize,
    pub edge: EdgeId,
}

/// Partition of the active nodes of one level into rooted trees.
///
/// Cluster ids are dense, `0..num_clusters()`, ordered by their position
/// in the previous clustering (ultimately by center id).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    cluster_of: Vec<Option<usize>>,
    centers: Vec<usize>,
    parent: Vec<Option<TreeLink>>,
    depth: Vec<u32>,
}

impl Clustering {
    /// Every node is its own depth-0 cluster.
    pub fn singletons(nodes: usize) -> Self {
        Self {
            cluster_of: (0..nodes).map(Some).collect(),
            centers: (0..nodes).collect(),
            parent: vec![None; nodes],
            depth: vec![0; nodes],
        }
    }

    /// Assembles a clustering from raw parts and validates tree structure.
    pub fn from_parts(
        cluster_of: Vec<Option<usize>>,
        centers: Vec<usize>,
        parent: Vec<Option<TreeLink>>,
    ) -> Result<Self, ClusterError> {
        let n = cluster_of.len();
        if parent.len() != n {
            return Err(ClusterError::Mismatch(
                "parent and cluster maps differ in length",
            ));
        }
        let depth = compute_depths(&cluster_of, &parent)?;
        let c = Self {
            cluster_of,
            centers,
            parent,
            depth,
        };
        c.validate()?;
        Ok(c)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.cluster_of.len()
    }

    #[inline]
    pub fn num_clusters(&self) -> usize {
        self.centers.len()
    }

    #[inline]
    pub fn cluster_of(&self, v: usize) -> Option<usize> {
        self.cluster_of[v]
    }

    #[inline]
    pub fn center(&self, cluster: usize) -> usize {
        self.centers[cluster]
    }

    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    #[inline]
    pub fn parent(&self, v: usize) -> Option<TreeLink> {
        self.parent[v]
    }

    #[inline]
    pub fn depth(&self, v: usize) -> u32 {
        self.depth[v]
    }

    pub fn is_active(&self, v: usize) -> bool {
        self.cluster_of[v].is_some()
    }

    pub fn active_count(&self) -> usize {
        self.cluster_of.iter().filter(|c| c.is_some()).count()
    }

    pub fn max_depth(&self) -> u32 {
        self.cluster_of
            .iter()
            .zip(&self.depth)
            .filter(|(c, _)| c.is_some())
            .map(|(_, &d)| d)
            .max()
            .unwrap_or(0)
    }

    /// Members of each cluster, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_clusters()];
        for (v, c) in self.cluster_of.iter().enumerate() {
            if let Some(c) = c {
                out[*c].push(v);
            }
        }
        out
    }

    /// Tree edges of the whole clustering.
    pub fn tree_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.parent
            .iter()
            .zip(&self.cluster_of)
            .filter(|(_, c)| c.is_some())
            .filter_map(|(p, _)| p.map(|l| l.edge))
    }

    /// Structural check: partition, parent chains reach the center in
    /// exactly `depth` steps with strictly decreasing depths.
    pub fn validate(&self) -> Result<(), ClusterError> {
        let n = self.node_count();
        if self.parent.len() != n || self.depth.len() != n {
            return Err(ClusterError::Mismatch("per-node arrays differ in length"));
        }
        let mut seen_center = vec![false; self.num_clusters()];
        for (c, &center) in self.centers.iter().enumerate() {
            if center >= n || self.cluster_of[center] != Some(c) {
                return Err(ClusterError::BrokenTree {
                    node: center,
                    reason: "center is not a member of its cluster",
                });
            }
            if self.parent[center].is_some() || self.depth[center] != 0 {
                return Err(ClusterError::BrokenTree {
                    node: center,
                    reason: "center has a parent",
                });
            }
            seen_center[c] = true;
        }
        for v in 0..n {
            let Some(c) = self.cluster_of[v] else {
                continue;
            };
            if c >= self.num_clusters() {
                return Err(ClusterError::BrokenTree {
                    node: v,
                    reason: "cluster id out of range",
                });
            }
            let mut x = v;
            let mut steps = 0u32;
            while let Some(link) = self.parent[x] {
                let p = link.parent;
                if p >= n || self.cluster_of[p] != Some(c) {
                    return Err(ClusterError::BrokenTree {
                        node: x,
                        reason: "parent outside the cluster",
                    });
                }
                if self.depth[p] + 1 != self.depth[x] {
                    return Err(ClusterError::BrokenTree {
                        node: x,
                        reason: "depth does not decrease by one towards the root",
                    });
                }
                x = p;
                steps += 1;
                if steps > n as u32 {
                    return Err(ClusterError::BrokenTree {
                        node: v,
                        reason: "parent cycle",
                    });
                }
            }
            if x != self.centers[c] || steps != self.depth[v] {
                return Err(ClusterError::BrokenTree {
                    node: v,
                    reason: "root path does not end at the center",
                });
            }
        }
        if seen_center.iter().any(|s| !s) {
            return Err(ClusterError::Mismatch("cluster without a center"));
        }
        Ok(())
    }

    /// Like [`validate`](Self::validate), and additionally checks that every
    /// tree edge joins the two nodes it links on `level`.
    pub fn validate_on(&self, level: &QuotientGraph) -> Result<(), ClusterError> {
        self.validate()?;
        for v in 0..self.node_count() {
            if self.cluster_of[v].is_none() {
                continue;
            }
            if let Some(link) = self.parent[v] {
                let e = level
                    .edge_by_original(link.edge)
                    .ok_or(ClusterError::UnknownEdge(link.edge))?;
                let joins = (e.a == v && e.b == link.parent) || (e.b == v && e.a == link.parent);
                if !joins {
                    return Err(ClusterError::BrokenTree {
                        node: v,
                        reason: "tree edge does not join node and parent",
                    });
                }
            }
        }
        Ok(())
    }

    /// Debug-friendly JSON shape: cluster id -> members + tree edges.
    pub fn snapshot(&self) -> ClusteringSnapshot {
        let members = self.members();
        let mut clusters: Vec<ClusterEntry> = members
            .into_iter()
            .enumerate()
            .map(|(id, members)| ClusterEntry {
                id,
                center: self.centers[id],
                depth: members.iter().map(|&v| self.depth[v]).max().unwrap_or(0),
                tree_edges: Vec::new(),
                members,
            })
            .collect();
        for v in 0..self.node_count() {
            if let (Some(c), Some(link)) = (self.cluster_of[v], self.parent[v]) {
                clusters[c].tree_edges.push(link.edge);
            }
        }
        for c in &mut clusters {
            c.tree_edges.sort_unstable();
        }
        ClusteringSnapshot {
            clusters,
            inactive: (0..self.node_count())
                .filter(|&v| self.cluster_of[v].is_none())
                .collect(),
        }
    }
}

fn compute_depths(
    cluster_of: &[Option<usize>],
    parent: &[Option<TreeLink>],
) -> Result<Vec<u32>, ClusterError> {
    const UNKNOWN: u32 = u32::MAX;
    let n = cluster_of.len();
    let mut depth = vec![UNKNOWN; n];
    let mut stack = Vec::new();
    for v in 0..n {
        if cluster_of[v].is_none() {
            depth[v] = 0;
            continue;
        }
        let mut x = v;
        while depth[x] == UNKNOWN {
            match parent[x] {
                None => depth[x] = 0,
                Some(link) => {
                    if link.parent >= n || stack.len() > n {
                        return Err(ClusterError::BrokenTree {
                            node: x,
                            reason: "parent chain does not terminate",
                        });
                    }
                    stack.push(x);
                    x = link.parent;
                }
            }
        }
        let mut d = depth[x];
        while let Some(y) = stack.pop() {
            d += 1;
            depth[y] = d;
        }
    }
    Ok(depth)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterEntry {
    pub id: usize,
    pub center: usize,
    pub depth: u32,
    pub members: Vec<usize>,
    pub tree_edges: Vec<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusteringSnapshot {
    pub clusters: Vec<ClusterEntry>,
    pub inactive: Vec<usize>,
}

/// Set of sampled cluster ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampledSet {
    flags: Vec<bool>,
    count: usize,
}

impl SampledSet {
    pub fn from_flags(flags: Vec<bool>) -> Self {
        let count = flags.iter().filter(|&&f| f).count();
        Self { flags, count }
    }

    #[inline]
    pub fn contains(&self, cluster: usize) -> bool {
        self.flags[cluster]
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(c, _)| c)
    }
}

/// Includes each cluster independently with probability `p`, drawing one
/// uniform variate per cluster in ascending cluster id.
pub fn sample_clusters<R: Rng + ?Sized>(
    clustering: &Clustering,
    p: f64,
    rng: &mut R,
) -> SampledSet {
    debug_assert!((0.0..=1.0).contains(&p), "sampling probability {p}");
    let flags = (0..clustering.num_clusters())
        .map(|_| rng.gen::<f64>() < p)
        .collect();
    SampledSet::from_flags(flags)
}

/// Node `node` joins sampled cluster `host` as a child of `at` via `edge`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attachment {
    pub node: usize,
    pub host: usize,
    pub at: usize,
    pub edge: EdgeId,
}

/// New clustering: the sampled clusters plus the nodes attached to them.
/// Nodes of unsampled clusters that are not attached become inactive.
pub fn grow_clusters(
    level: &QuotientGraph,
    clustering: &Clustering,
    sampled: &SampledSet,
    attachments: &[Attachment],
) -> Result<Clustering, ClusterError> {
    let n = clustering.node_count();
    let mut renumber = vec![usize::MAX; clustering.num_clusters()];
    let mut centers = Vec::with_capacity(sampled.len());
    for c in sampled.iter() {
        renumber[c] = centers.len();
        centers.push(clustering.center(c));
    }

    let mut cluster_of = vec![None; n];
    let mut parent = vec![None; n];
    let mut depth = vec![0u32; n];
    for v in 0..n {
        if let Some(c) = clustering.cluster_of(v) {
            if sampled.contains(c) {
                cluster_of[v] = Some(renumber[c]);
                parent[v] = clustering.parent(v);
                depth[v] = clustering.depth(v);
            }
        }
    }

    let mut absorbed = vec![false; n];
    for a in attachments {
        if a.node >= n || a.at >= n {
            return Err(ClusterError::InvalidAbsorb { node: a.node });
        }
        if absorbed[a.node] {
            return Err(ClusterError::DuplicateAbsorb(a.node));
        }
        match clustering.cluster_of(a.node) {
            Some(c) if !sampled.contains(c) => {}
            _ => return Err(ClusterError::InvalidAbsorb { node: a.node }),
        }
        if a.host >= clustering.num_clusters() || !sampled.contains(a.host) {
            return Err(ClusterError::HostNotSampled(a.host));
        }
        let bad = ClusterError::BadAttachEdge {
            edge: a.edge,
            node: a.node,
            host: a.host,
        };
        if clustering.cluster_of(a.at) != Some(a.host) {
            return Err(bad);
        }
        let e = level
            .edge_by_original(a.edge)
            .ok_or(ClusterError::UnknownEdge(a.edge))?;
        let joins = (e.a == a.node && e.b == a.at) || (e.b == a.node && e.a == a.at);
        if !joins {
            return Err(bad);
        }
        absorbed[a.node] = true;
        cluster_of[a.node] = Some(renumber[a.host]);
        parent[a.node] = Some(TreeLink {
            parent: a.at,
            edge: a.edge,
        });
        depth[a.node] = clustering.depth(a.at) + 1;
    }

    Ok(Clustering {
        cluster_of,
        centers,
        parent,
        depth,
    })
}

/// Result of contracting a clustering.
#[derive(Clone, Debug, PartialEq)]
pub struct Contraction {
    pub quotient: QuotientGraph,
    /// Surviving edges that lost to a lighter edge between the same pair.
    pub dropped: Vec<EdgeId>,
}

/// Contracts every cluster to a super-node (super id = cluster id) and keeps
/// the lightest surviving edge per super-node pair, ties by smaller id.
pub fn contract(
    level: &QuotientGraph,
    clustering: &Clustering,
    surviving: &[EdgeId],
) -> Result<Contraction, ClusterError> {
    let mut best: BTreeMap<(usize, usize), SuperEdge> = BTreeMap::new();
    let mut dropped = Vec::new();
    for &id in surviving {
        let e = level
            .edge_by_original(id)
            .ok_or(ClusterError::UnknownEdge(id))?;
        let (Some(ca), Some(cb)) = (clustering.cluster_of(e.a), clustering.cluster_of(e.b)) else {
            return Err(ClusterError::InternalEdge(id));
        };
        if ca == cb {
            return Err(ClusterError::InternalEdge(id));
        }
        let pair = if ca < cb { (ca, cb) } else { (cb, ca) };
        let candidate = SuperEdge {
            a: pair.0,
            b: pair.1,
            original: id,
            w: e.w,
        };
        match best.get_mut(&pair) {
            None => {
                best.insert(pair, candidate);
            }
            Some(cur) => {
                if lighter(candidate.key(), cur.key()) == Ordering::Less {
                    dropped.push(cur.original);
                    *cur = candidate;
                } else {
                    dropped.push(id);
                }
            }
        }
    }
    dropped.sort_unstable();
    let super_of = (0..clustering.node_count())
        .map(|v| clustering.cluster_of(v))
        .collect();
    let quotient = QuotientGraph::assemble(
        clustering.num_clusters(),
        super_of,
        best.into_values().collect(),
    );
    Ok(Contraction { quotient, dropped })
}

/// Maps a clustering of a quotient back onto the level below it.
///
/// `outer` clusters the quotient's nodes, `inner` is the clustering of
/// `base` whose clusters became those nodes (inner cluster id == quotient
/// node id). Each internal super-node is replaced by its inner tree,
/// re-rooted at the endpoint of the outer tree edge that attaches it; the
/// composed cluster keeps the id of its outer cluster and the inner center
/// of the outer root.
pub fn compose(
    outer: &Clustering,
    inner: &Clustering,
    base: &QuotientGraph,
) -> Result<Clustering, ClusterError> {
    if inner.num_clusters() != outer.node_count() {
        return Err(ClusterError::Mismatch(
            "inner cluster count differs from quotient size",
        ));
    }
    if inner.node_count() != base.super_count() {
        return Err(ClusterError::Mismatch(
            "inner clustering is not on the base graph",
        ));
    }
    let n = inner.node_count();
    let mut cluster_of = vec![None; n];
    let mut parent: Vec<Option<TreeLink>> = vec![None; n];

    for v in 0..n {
        if let Some(s) = inner.cluster_of(v) {
            if let Some(c) = outer.cluster_of(s) {
                cluster_of[v] = Some(c);
                parent[v] = inner.parent(v);
            }
        }
    }

    for s in 0..outer.node_count() {
        if outer.cluster_of(s).is_none() {
            continue;
        }
        let Some(link) = outer.parent(s) else {
            continue;
        };
        let e = base
            .edge_by_original(link.edge)
            .ok_or(ClusterError::UnknownEdge(link.edge))?;
        let (attach, across) = if inner.cluster_of(e.a) == Some(s) {
            (e.a, e.b)
        } else {
            (e.b, e.a)
        };
        if inner.cluster_of(attach) != Some(s) || inner.cluster_of(across) != Some(link.parent) {
            return Err(ClusterError::Mismatch(
                "outer tree edge does not join its super-nodes",
            ));
        }
        // Reverse the inner root path of `attach`, then hang it below `across`.
        let mut prev = TreeLink {
            parent: across,
            edge: link.edge,
        };
        let mut x = attach;
        loop {
            let up = inner.parent(x);
            parent[x] = Some(prev);
            match up {
                Some(l) => {
                    prev = TreeLink {
                        parent: x,
                        edge: l.edge,
                    };
                    x = l.parent;
                }
                None => break,
            }
        }
    }

    let centers = outer.centers().iter().map(|&s| inner.center(s)).collect();
    let depth = compute_depths(&cluster_of, &parent)?;
    Ok(Clustering {
        cluster_of,
        centers,
        parent,
        depth,
    })
}

/// What made a radius certificate fail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "property", rename_all = "snake_case")]
pub enum RadiusViolation {
    /// Property A: a tree is deeper than the bound.
    Depth {
        cluster: usize,
        depth: u32,
        bound: u64,
    },
    /// Property B: a root path uses an edge heavier than a boundary edge.
    Weight {
        edge: EdgeId,
        vertex: usize,
        path_max: f64,
        weight: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCheck {
    pub edge: EdgeId,
    pub vertex: usize,
    /// Heaviest edge on `vertex`'s root path (0 for a center).
    pub path_max: f64,
    pub weight: f64,
}

/// Outcome of checking the weighted-stretch radius of a clustering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusCertificate {
    pub bound: u64,
    pub cluster_depths: Vec<u32>,
    pub boundary: Vec<BoundaryCheck>,
    pub violation: Option<RadiusViolation>,
}

impl RadiusCertificate {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks that every tree has depth at most `r` (Property A) and that for
/// every boundary edge the root path of each clustered endpoint only uses
/// edges no heavier than it (Property B).
pub fn check_radius(
    clustering: &Clustering,
    base: &QuotientGraph,
    boundary: &[EdgeId],
    r: u64,
) -> RadiusCertificate {
    let members = clustering.members();
    let cluster_depths: Vec<u32> = members
        .iter()
        .map(|m| m.iter().map(|&v| clustering.depth(v)).max().unwrap_or(0))
        .collect();
    let mut violation = cluster_depths
        .iter()
        .enumerate()
        .find(|(_, &d)| u64::from(d) > r)
        .map(|(cluster, &depth)| RadiusViolation::Depth {
            cluster,
            depth,
            bound: r,
        });

    let path_max = root_path_max(clustering, base);
    let mut checks = Vec::new();
    for &id in boundary {
        let Some(e) = base.edge_by_original(id) else {
            continue;
        };
        for x in [e.a, e.b] {
            if clustering.cluster_of(x).is_none() {
                continue;
            }
            let check = BoundaryCheck {
                edge: id,
                vertex: x,
                path_max: path_max[x],
                weight: e.w,
            };
            if violation.is_none() && check.path_max > check.weight {
                violation = Some(RadiusViolation::Weight {
                    edge: id,
                    vertex: x,
                    path_max: check.path_max,
                    weight: check.weight,
                });
            }
            checks.push(check);
        }
    }
    RadiusCertificate {
        bound: r,
        cluster_depths,
        boundary: checks,
        violation,
    }
}

fn root_path_max(clustering: &Clustering, base: &QuotientGraph) -> Vec<f64> {
    let n = clustering.node_count();
    let mut order: Vec<usize> = (0..n).filter(|&v| clustering.is_active(v)).collect();
    order.sort_by_key(|&v| clustering.depth(v));
    let mut out = vec![0.0f64; n];
    for v in order {
        if let Some(link) = clustering.parent(v) {
            let w = base
                .edge_by_original(link.edge)
                .map_or(f64::INFINITY, |e| e.w);
            out[v] = w.max(out[link.parent]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn level(n: usize, edges: &[(usize, usize, f64)]) -> (WeightedGraph, QuotientGraph) {
        let g = WeightedGraph::from_edges(n, edges.iter().copied()).unwrap();
        let q = QuotientGraph::identity(&g);
        (g, q)
    }

    #[test]
    fn singletons_are_valid() {
        let c = Clustering::singletons(4);
        assert_eq!(c.num_clusters(), 4);
        assert_eq!(c.max_depth(), 0);
        c.validate().unwrap();
    }

    #[test]
    fn singleton_radius_zero_passes() {
        let (g, q) = level(3, &[(0, 1, 2.0), (1, 2, 5.0)]);
        let ids: Vec<EdgeId> = g.edge_ids().collect();
        let cert = check_radius(&Clustering::singletons(3), &q, &ids, 0);
        assert!(cert.passed());
    }

    #[test]
    fn sampling_extremes() {
        let c = Clustering::singletons(50);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_clusters(&c, 0.0, &mut rng).is_empty());
        assert_eq!(sample_clusters(&c, 1.0, &mut rng).len(), 50);
    }

    #[test]
    fn sampling_concentrates() {
        let c = Clustering::singletons(10_000);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let frac = sample_clusters(&c, 0.3, &mut rng).len() as f64 / 10_000.0;
        let sd = libm::sqrt(0.3 * 0.7 / 10_000.0);
        assert!((frac - 0.3).abs() <= 3.0 * sd, "fraction {frac}");
    }

    #[test]
    fn grow_identity_when_everything_sampled() {
        let (_, q) = level(3, &[(0, 1, 1.0)]);
        let c = Clustering::singletons(3);
        let all = SampledSet::from_flags(vec![true; 3]);
        assert_eq!(grow_clusters(&q, &c, &all, &[]).unwrap(), c);
    }

    #[test]
    fn grow_two_singletons() {
        let (_, q) = level(2, &[(0, 1, 1.0)]);
        let c = Clustering::singletons(2);
        let sampled = SampledSet::from_flags(vec![true, false]);
        let grown = grow_clusters(
            &q,
            &c,
            &sampled,
            &[Attachment {
                node: 1,
                host: 0,
                at: 0,
                edge: EdgeId(0),
            }],
        )
        .unwrap();
        assert_eq!(grown.num_clusters(), 1);
        assert_eq!(grown.center(0), 0);
        assert_eq!(grown.depth(1), 1);
        grown.validate_on(&q).unwrap();
    }

    #[test]
    fn grow_star() {
        let g = generate::star(5).unwrap();
        let q = QuotientGraph::identity(&g);
        let c = Clustering::singletons(6);
        let mut flags = vec![false; 6];
        flags[0] = true;
        let sampled = SampledSet::from_flags(flags);
        let attach: Vec<Attachment> = (1..=5)
            .map(|leaf| Attachment {
                node: leaf,
                host: 0,
                at: 0,
                edge: g.find_edge(0, leaf).unwrap(),
            })
            .collect();
        let grown = grow_clusters(&q, &c, &sampled, &attach).unwrap();
        assert_eq!(grown.num_clusters(), 1);
        assert_eq!(grown.max_depth(), 1);
        assert_eq!(grown.tree_edges().count(), 5);
        grown.validate_on(&q).unwrap();
    }

    #[test]
    fn grow_rejects_contract_violations() {
        let (_, q) = level(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        let c = Clustering::singletons(3);
        let sampled = SampledSet::from_flags(vec![true, false, false]);
        let a = Attachment {
            node: 1,
            host: 0,
            at: 0,
            edge: EdgeId(0),
        };
        assert_eq!(
            grow_clusters(&q, &c, &sampled, &[a, a]),
            Err(ClusterError::DuplicateAbsorb(1))
        );
        let wrong_edge = Attachment {
            node: 2,
            host: 0,
            at: 0,
            edge: EdgeId(1),
        };
        assert!(matches!(
            grow_clusters(&q, &c, &sampled, &[wrong_edge]),
            Err(ClusterError::BadAttachEdge { .. })
        ));
        let unsampled_host = Attachment {
            node: 1,
            host: 2,
            at: 2,
            edge: EdgeId(1),
        };
        assert_eq!(
            grow_clusters(&q, &c, &sampled, &[unsampled_host]),
            Err(ClusterError::HostNotSampled(2))
        );
    }

    #[test]
    fn contract_singletons_is_isomorphic() {
        let g = generate::cycle(5).unwrap();
        let q = QuotientGraph::identity(&g);
        let ids: Vec<EdgeId> = g.edge_ids().collect();
        let out = contract(&q, &Clustering::singletons(5), &ids).unwrap();
        assert_eq!(out.quotient.super_count(), 5);
        assert_eq!(out.quotient.super_edges().len(), 5);
        assert!(out.dropped.is_empty());
    }

    fn two_by_two_cycle() -> (WeightedGraph, QuotientGraph, Clustering) {
        // 4-cycle 0-1-2-3-0 with weights 1,2,3,4; clusters {0,1} and {2,3}.
        let (g, q) = level(4, &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 3.0), (3, 0, 4.0)]);
        let e01 = g.find_edge(0, 1).unwrap();
        let e23 = g.find_edge(2, 3).unwrap();
        let c = Clustering::from_parts(
            vec![Some(0), Some(0), Some(1), Some(1)],
            vec![0, 2],
            vec![
                None,
                Some(TreeLink {
                    parent: 0,
                    edge: e01,
                }),
                None,
                Some(TreeLink {
                    parent: 2,
                    edge: e23,
                }),
            ],
        )
        .unwrap();
        (g, q, c)
    }

    #[test]
    fn contract_keeps_lightest_crossing_edge() {
        let (g, q, c) = two_by_two_cycle();
        let crossing: Vec<EdgeId> = [(1, 2), (3, 0)]
            .iter()
            .map(|&(a, b)| g.find_edge(a, b).unwrap())
            .collect();
        let brute = crossing
            .iter()
            .map(|&id| g.edge(id).w)
            .fold(f64::INFINITY, f64::min);
        let out = contract(&q, &c, &crossing).unwrap();
        assert_eq!(out.quotient.super_count(), 2);
        assert_eq!(out.quotient.super_edges().len(), 1);
        assert_eq!(out.quotient.super_edges()[0].w, brute);
        assert_eq!(out.dropped, vec![g.find_edge(3, 0).unwrap()]);
    }

    #[test]
    fn contract_rejects_internal_edges() {
        let (g, q, c) = two_by_two_cycle();
        let internal = g.find_edge(0, 1).unwrap();
        assert_eq!(
            contract(&q, &c, &[internal]),
            Err(ClusterError::InternalEdge(internal))
        );
    }

    #[test]
    fn contract_triangle_to_one_node() {
        let g = generate::complete(3).unwrap();
        let q = QuotientGraph::identity(&g);
        let c = Clustering::from_parts(
            vec![Some(0); 3],
            vec![0],
            vec![
                None,
                Some(TreeLink {
                    parent: 0,
                    edge: g.find_edge(0, 1).unwrap(),
                }),
                Some(TreeLink {
                    parent: 0,
                    edge: g.find_edge(0, 2).unwrap(),
                }),
            ],
        )
        .unwrap();
        let out = contract(&q, &c, &[]).unwrap();
        assert_eq!(out.quotient.super_count(), 1);
        assert!(out.quotient.super_edges().is_empty());
    }

    #[test]
    fn compose_with_singletons() {
        let (_, q, c) = two_by_two_cycle();
        // outer singletons: compose = inner
        let outer = Clustering::singletons(2);
        assert_eq!(compose(&outer, &c, &q).unwrap(), c);
        // inner singletons: compose = outer
        let inner = Clustering::singletons(4);
        assert_eq!(compose(&c, &inner, &q).unwrap(), c);
    }

    #[test]
    fn compose_rejects_mismatch() {
        let (_, q, c) = two_by_two_cycle();
        assert!(matches!(
            compose(&Clustering::singletons(3), &c, &q),
            Err(ClusterError::Mismatch(_))
        ));
    }

    #[test]
    fn check_radius_depth_witness() {
        let g = generate::path(3).unwrap();
        let q = QuotientGraph::identity(&g);
        let c = Clustering::from_parts(
            vec![Some(0); 3],
            vec![0],
            vec![
                None,
                Some(TreeLink {
                    parent: 0,
                    edge: EdgeId(0),
                }),
                Some(TreeLink {
                    parent: 1,
                    edge: EdgeId(1),
                }),
            ],
        )
        .unwrap();
        let cert = check_radius(&c, &q, &[], 1);
        assert_eq!(
            cert.violation,
            Some(RadiusViolation::Depth {
                cluster: 0,
                depth: 2,
                bound: 1
            })
        );
        assert!(check_radius(&c, &q, &[], 2).passed());
    }

    #[test]
    fn check_radius_weight_witness() {
        // root 0 -(5)- 1 -(3)- 2, boundary edge 2-3 of weight 4.
        let (g, q) = level(4, &[(0, 1, 5.0), (1, 2, 3.0), (2, 3, 4.0)]);
        let c = Clustering::from_parts(
            vec![Some(0), Some(0), Some(0), Some(1)],
            vec![0, 3],
            vec![
                None,
                Some(TreeLink {
                    parent: 0,
                    edge: g.find_edge(0, 1).unwrap(),
                }),
                Some(TreeLink {
                    parent: 1,
                    edge: g.find_edge(1, 2).unwrap(),
                }),
                None,
            ],
        )
        .unwrap();
        let boundary = g.find_edge(2, 3).unwrap();
        let cert = check_radius(&c, &q, &[boundary], 2);
        assert_eq!(
            cert.violation,
            Some(RadiusViolation::Weight {
                edge: boundary,
                vertex: 2,
                path_max: 5.0,
                weight: 4.0
            })
        );
    }

    #[test]
    fn snapshot_lists_members() {
        let (_, _, c) = two_by_two_cycle();
        let snap = c.snapshot();
        assert_eq!(snap.clusters.len(), 2);
        assert_eq!(snap.clusters[1].members, vec![2, 3]);
        assert_eq!(snap.clusters[1].tree_edges.len(), 1);
        assert!(snap.inactive.is_empty());
    }
}
