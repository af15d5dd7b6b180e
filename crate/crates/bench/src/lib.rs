//! Inputs shared by the benchmarks in `benches/`.

use turan_core::{extremal_graph, Graph};

/// `(n, k, r)` points for the extremal-family benchmarks, small to large.
pub const FAMILY: [(usize, usize, usize); 3] = [(20, 2, 2), (60, 3, 3), (200, 4, 4)];

/// The extremal graph with one intra-part edge added, so it contains a packing.
pub fn saturated_plus_one(n: usize, k: usize, r: usize) -> Graph {
    let d = extremal_graph(n, k, r).expect("valid parameters");
    let mut g = d.graph;
    let (u, v) = g.non_edges().next().expect("some part has two vertices");
    g.add_edge(u, v);
    g
}
