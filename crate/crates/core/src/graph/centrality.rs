use std::collections::BTreeMap;

use super::SpanningTree;
use crate::ingest::Ticker;

/// Raw betweenness counts: for each node, the number of unordered node pairs
/// whose tree path passes through it, endpoints excluded.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CentralityScores {
    pub scores: BTreeMap<Ticker, u64>,
}

impl CentralityScores {
    pub fn get(&self, ticker: &str) -> Option<u64> {
        self.scores.get(ticker).copied()
    }
}

impl FromIterator<(Ticker, u64)> for CentralityScores {
    fn from_iter<I: IntoIterator<Item = (Ticker, u64)>>(iter: I) -> Self {
        CentralityScores {
            scores: iter.into_iter().collect(),
        }
    }
}

/// Betweenness on a tree via branch sizes.
///
/// Removing `v` splits the tree into branches of sizes `s_1..s_k` summing to
/// `n - 1`; every pair drawn from two different branches routes through `v`,
/// so the score is `((n-1)^2 - sum s_i^2) / 2`.
pub fn betweenness(tree: &SpanningTree) -> CentralityScores {
    let n = tree.len();
    if n == 0 {
        return CentralityScores::default();
    }

    // Iterative DFS from node 0 gives a parent array and a preorder.
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![0usize];
    parent[0] = 0;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &w in tree.neighbors(v) {
            if parent[w] == usize::MAX {
                parent[w] = v;
                stack.push(w);
            }
        }
    }

    let mut subtree = vec![1u64; n];
    for &v in order.iter().skip(1).rev() {
        subtree[parent[v]] += subtree[v];
    }

    let total = (n - 1) as u64;
    let scores = (0..n).map(|v| {
        let mut sum_sq = 0u64;
        let mut below = 0u64;
        for &w in tree.neighbors(v) {
            if parent[w] == v {
                sum_sq += subtree[w] * subtree[w];
                below += subtree[w];
            }
        }
        let above = total - below;
        sum_sq += above * above;
        (tree.nodes()[v].clone(), (total * total - sum_sq) / 2)
    });
    scores.collect()
}

/// Highest-scoring ticker; ties go to the lexicographically smallest.
pub fn central_node(scores: &CentralityScores) -> Option<&Ticker> {
    let mut best: Option<(&Ticker, u64)> = None;
    for (t, &s) in &scores.scores {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((t, s));
        }
    }
    best.map(|(t, _)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn tree(names: &[&str], edges: &[(usize, usize)]) -> SpanningTree {
        SpanningTree::from_edges(
            names.iter().map(|s| Ticker::new(s).unwrap()).collect(),
            edges
                .iter()
                .map(|&(a, b)| Edge { a, b, weight: 1.0 })
                .collect(),
        )
        .unwrap()
    }

    fn scores(pairs: &[(&str, u64)]) -> CentralityScores {
        pairs
            .iter()
            .map(|&(t, s)| (Ticker::new(t).unwrap(), s))
            .collect()
    }

    #[test]
    fn path_of_three() {
        let s = betweenness(&tree(&["A", "B", "C"], &[(0, 1), (1, 2)]));
        assert_eq!(s, scores(&[("A", 0), ("B", 1), ("C", 0)]));
    }

    #[test]
    fn star_with_four_leaves() {
        let s = betweenness(&tree(
            &["A", "B", "C", "D", "E"],
            &[(2, 0), (2, 1), (2, 3), (2, 4)],
        ));
        assert_eq!(s.get("C"), Some(6));
        for leaf in ["A", "B", "D", "E"] {
            assert_eq!(s.get(leaf), Some(0));
        }
    }

    #[test]
    fn root_in_the_middle_of_a_path() {
        // Node 0 has two branches so the DFS root itself is internal.
        let s = betweenness(&tree(&["A", "B", "C", "D"], &[(0, 1), (0, 2), (2, 3)]));
        assert_eq!(s, scores(&[("A", 2), ("B", 0), ("C", 2), ("D", 0)]));
    }

    #[test]
    fn central_node_examples() {
        assert_eq!(
            central_node(&scores(&[("A", 0), ("B", 1), ("C", 0)]))
                .unwrap()
                .as_str(),
            "B"
        );
        assert_eq!(
            central_node(&scores(&[("A", 3), ("B", 3)]))
                .unwrap()
                .as_str(),
            "A"
        );
        assert_eq!(central_node(&scores(&[("A", 0)])).unwrap().as_str(), "A");
        assert!(central_node(&CentralityScores::default()).is_none());
    }
}
