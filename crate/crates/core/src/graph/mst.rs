use petgraph::unionfind::UnionFind;

use super::{Edge, WeightedGraph};
use crate::error::{Error, Result};
use crate::ingest::Ticker;

#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    nodes: Vec<Ticker>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

impl SpanningTree {
    /// Builds a tree from edges over `nodes`, checking that it has `n - 1`
    /// edges and reaches every node. Edges are normalised to `a < b` and
    /// sorted.
    pub fn from_edges(nodes: Vec<Ticker>, edges: Vec<Edge>) -> Result<Self> {
        let n = nodes.len();
        if !nodes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidTree("nodes must be unique and sorted".into()));
        }
        if n == 0 || edges.len() != n - 1 {
            return Err(Error::InvalidTree(format!(
                "{} edges for {n} nodes",
                edges.len()
            )));
        }
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| Edge {
                a: e.a.min(e.b),
                b: e.a.max(e.b),
                weight: e.weight,
            })
            .collect();
        edges.sort_by_key(|e| (e.a, e.b));

        let mut adjacency = vec![Vec::new(); n];
        let mut components = UnionFind::<usize>::new(n);
        for e in &edges {
            if e.b >= n || e.a == e.b {
                return Err(Error::InvalidTree(format!("bad edge ({}, {})", e.a, e.b)));
            }
            if !components.union(e.a, e.b) {
                return Err(Error::InvalidTree(format!(
                    "edge {}-{} closes a cycle",
                    nodes[e.a], nodes[e.b]
                )));
            }
            adjacency[e.a].push(e.b);
            adjacency[e.b].push(e.a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(SpanningTree {
            nodes,
            edges,
            adjacency,
        })
    }

    pub fn nodes(&self) -> &[Ticker] {
        &self.nodes
    }

    /// Edges with `a < b`, sorted by `(a, b)`; since nodes are sorted this is
    /// also ticker order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }
}

/// Kruskal's algorithm. Equal weights are resolved by the `(ticker_a,
/// ticker_b)` key, so the tree is unique for any input.
pub fn minimum_spanning_tree(g: &WeightedGraph) -> SpanningTree {
    let n = g.nodes.len();
    let mut order: Vec<&Edge> = g.edges.iter().collect();
    order.sort_by(|x, y| {
        x.weight
            .total_cmp(&y.weight)
            .then_with(|| (&g.nodes[x.a], &g.nodes[x.b]).cmp(&(&g.nodes[y.a], &g.nodes[y.b])))
    });

    let mut components = UnionFind::<usize>::new(n);
    let mut chosen = Vec::with_capacity(n.saturating_sub(1));
    for e in order {
        if components.union(e.a, e.b) {
            chosen.push(*e);
            if chosen.len() + 1 == n {
                break;
            }
        }
    }
    SpanningTree::from_edges(g.nodes.clone(), chosen)
        .expect("a complete graph always yields a spanning tree")
}
