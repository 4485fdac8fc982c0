//! Complete distance graph, its minimum spanning tree, tree betweenness and
//! distance bands around the hub.

mod bands;
mod centrality;
mod mst;

pub use bands::{distance_bands, BandAssignment, BandScheme, METRIC_TOLERANCE};
pub use centrality::{betweenness, central_node, CentralityScores};
pub use mst::{minimum_spanning_tree, SpanningTree};

use crate::correlate::DistanceMatrix;
use crate::ingest::Ticker;

/// Undirected weighted edge between node indices `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

/// Complete graph over sorted tickers; edges listed in `(a, b)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    pub nodes: Vec<Ticker>,
    pub edges: Vec<Edge>,
}

pub fn build_graph(dist: &DistanceMatrix) -> WeightedGraph {
    let n = dist.len();
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            edges.push(Edge {
                a,
                b,
                weight: dist.get(a, b),
            });
        }
    }
    WeightedGraph {
        nodes: dist.tickers().to_vec(),
        edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_dist(n: usize) -> DistanceMatrix {
        let tickers = (0..n)
            .map(|i| Ticker::new(&format!("T{i:03}")).unwrap())
            .collect();
        let values = (0..n * n)
            .map(|k| if k / n == k % n { 0.0 } else { 1.0 })
            .collect();
        DistanceMatrix::from_parts(tickers, values).unwrap()
    }

    #[test]
    fn complete_edge_counts() {
        assert_eq!(build_graph(&zero_dist(2)).edges.len(), 1);
        assert_eq!(build_graph(&zero_dist(4)).edges.len(), 6);
        // 533 * 532 / 2
        assert_eq!(build_graph(&zero_dist(533)).edges.len(), 141_778);
    }
}
