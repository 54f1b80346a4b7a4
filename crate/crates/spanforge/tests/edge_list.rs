//! Edge-list files survive a write/read round trip.

use proptest::prelude::*;

use spanforge::io::{load_edge_list, write_edge_list, write_spanner};
use spanforge_core::generate::{gnp, WeightDist};
use spanforge_core::spanner::general_spanner;
use spanforge_core::WeightedGraph;

fn round_trip(g: &WeightedGraph) -> WeightedGraph {
    let mut buf = Vec::new();
    write_edge_list(g, &mut buf).unwrap();
    load_edge_list(buf.as_slice()).unwrap().graph
}

#[test]
fn weighted_gnp_round_trips() {
    let g = gnp(20, 0.3, WeightDist::Uniform { lo: 1.0, hi: 10.0 }, 7).unwrap();
    assert_eq!(round_trip(&g), g);
}

#[test]
fn spanner_file_loads_as_subgraph() {
    let g = gnp(60, 0.15, WeightDist::Uniform { lo: 0.5, hi: 3.0 }, 2).unwrap();
    let b = general_spanner(&g, 3, 2, 9).unwrap();
    let labels: Vec<i64> = (0..g.n() as i64).collect();
    let mut buf = Vec::new();
    write_spanner(&g, &labels, &b.spanner_edges, &mut buf).unwrap();
    let s = load_edge_list(buf.as_slice()).unwrap().graph;
    assert_eq!(s.n(), g.n());
    assert_eq!(s, g.subgraph(&b.spanner_edges));
}

proptest! {
    #[test]
    fn arbitrary_graphs_round_trip(
        n in 1usize..30,
        raw in prop::collection::vec((0usize..30, 0usize..30, 0.0f64..1e6), 0..80),
    ) {
        let edges = raw.into_iter().map(|(u, v, w)| (u % n, v % n, w));
        let g = WeightedGraph::from_edges(n, edges).unwrap();
        prop_assert_eq!(round_trip(&g), g);
    }
}
