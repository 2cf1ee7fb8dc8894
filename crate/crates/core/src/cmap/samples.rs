//! Small graph instances used by the demos and tests.

use super::graph::{GraphEdge, GraphKind};
use super::model::{CmapInstance, CmapType};
use crate::model::Amount;

fn edge(from: usize, to: usize, owner: usize, cost_micros: i64) -> GraphEdge {
    GraphEdge { from, to, owner, cost: Amount::from_micros(cost_micros) }
}

const U: i64 = 1_000_000;

/// Two parallel source-to-sink edges with distinct owners.
pub fn parallel_edges(first: Amount, second: Amount) -> (CmapInstance, CmapType) {
    let edges = [edge(0, 1, 0, first.micros()), edge(0, 1, 1, second.micros())];
    CmapInstance::from_graph(2, &edges, 0, vec![1], GraphKind::ShortestPath, None).expect("valid sample")
}

/// Three disjoint two-edge paths costing 2, 4 and 6 units, each owned by one
/// agent. Edges 4 and 5 form the third path.
pub fn three_paths() -> (CmapInstance, CmapType) {
    let edges = [
        edge(0, 1, 0, U),
        edge(1, 4, 0, U),
        edge(0, 2, 1, 2 * U),
        edge(2, 4, 1, 2 * U),
        edge(0, 3, 2, 3 * U),
        edge(3, 4, 2, 3 * U),
    ];
    CmapInstance::from_graph(5, &edges, 0, vec![4], GraphKind::ShortestPath, None).expect("valid sample")
}

/// Multicast to two terminals where the shortest-path tree (4 units) misses
/// the Steiner tree through the hub (2.4 units).
pub fn steiner_gap() -> (CmapInstance, CmapType) {
    let edges = [
        edge(0, 1, 0, 2 * U),
        edge(0, 2, 1, 2 * U),
        edge(0, 3, 2, 1_800_000),
        edge(3, 1, 3, 300_000),
        edge(3, 2, 4, 300_000),
    ];
    CmapInstance::from_graph(4, &edges, 0, vec![1, 2], GraphKind::Multicast, None).expect("valid sample")
}

/// Source 0, sink 3, with a cheap detour through the cross edge 1→2.
pub fn diamond() -> (CmapInstance, CmapType) {
    let edges = [
        edge(0, 1, 0, U),
        edge(0, 2, 1, 2 * U),
        edge(1, 3, 2, 3 * U),
        edge(2, 3, 3, U),
        edge(1, 2, 4, U / 2),
    ];
    CmapInstance::from_graph(4, &edges, 0, vec![3], GraphKind::ShortestPath, None).expect("valid sample")
}
