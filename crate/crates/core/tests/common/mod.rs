//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use corrnet::correlate::DistanceMatrix;
use corrnet::graph::{Edge, SpanningTree};
use corrnet::ingest::{ReturnsPanel, Ticker};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn tickers(n: usize) -> Vec<Ticker> {
    (0..n)
        .map(|i| Ticker::new(&format!("T{i:03}")).unwrap())
        .collect()
}

pub fn dates(n: usize) -> Vec<NaiveDate> {
    let start = NaiveDate::from_ymd_opt(2007, 8, 1).unwrap();
    (0..n)
        .map(|k| start + chrono::Days::new(k as u64))
        .collect()
}

pub fn returns_panel(series: Vec<Vec<f64>>) -> ReturnsPanel {
    let n = series.len();
    let m = series[0].len();
    ReturnsPanel::from_series(tickers(n), dates(m), series)
}

/// Textbook two-pass Pearson: means first, then
/// `sum(dx dy) / sqrt(sum(dx^2) sum(dy^2))`.
pub fn two_pass_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Connectivity by repeated flooding over an edge list.
pub fn connects_all(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for &(a, b) in edges {
            if seen[a] != seen[b] {
                seen[a] = true;
                seen[b] = true;
                changed = true;
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Minimum total weight over every spanning tree of the complete graph on
/// `n` nodes, and all edge sets attaining it (within `1e-12`).
pub fn exhaustive_mst(
    n: usize,
    weight: &dyn Fn(usize, usize) -> f64,
) -> (f64, Vec<BTreeSet<(usize, usize)>>) {
    let all: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let k = n - 1;
    let mut best = f64::INFINITY;
    let mut argmin: Vec<BTreeSet<(usize, usize)>> = Vec::new();

    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let chosen: Vec<(usize, usize)> = idx.iter().map(|&i| all[i]).collect();
        if connects_all(n, &chosen) {
            let w: f64 = chosen.iter().map(|&(a, b)| weight(a, b)).sum();
            if w < best - 1e-12 {
                best = w;
                argmin = vec![chosen.into_iter().collect()];
            } else if (w - best).abs() <= 1e-12 {
                argmin.push(chosen.into_iter().collect());
            }
        }
        // Next k-combination of all.len() indices.
        let m = all.len();
        let mut i = k;
        while i > 0 && idx[i - 1] == m - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    (best, argmin)
}

/// Random recursive tree over shuffled labels: node k attaches to a uniformly
/// chosen earlier node.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> SpanningTree {
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let edges = (1..n)
        .map(|k| {
            let parent = rng.random_range(0..k);
            Edge {
                a: labels[parent],
                b: labels[k],
                weight: rng.random::<f64>() * 2.0,
            }
        })
        .collect();
    SpanningTree::from_edges(tickers(n), edges).unwrap()
}

/// Internal nodes on the unique path between `s` and `t`, found by walking
/// parent pointers from a breadth-first search rooted at `s`.
fn path_interior(adj: &[Vec<usize>], s: usize, t: usize) -> Vec<usize> {
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    parent[s] = s;
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if parent[w] == usize::MAX {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut interior = Vec::new();
    let mut v = parent[t];
    while v != s {
        interior.push(v);
        v = parent[v];
    }
    interior
}

/// Betweenness by walking every pair's path.
pub fn path_walk_betweenness(tree: &SpanningTree) -> (BTreeMap<Ticker, u64>, u64) {
    let n = tree.len();
    let adj: Vec<Vec<usize>> = (0..n).map(|v| tree.neighbors(v).to_vec()).collect();
    let mut counts = vec![0u64; n];
    let mut incidences = 0u64;
    for s in 0..n {
        for t in s + 1..n {
            for v in path_interior(&adj, s, t) {
                counts[v] += 1;
                incidences += 1;
            }
        }
    }
    let map = tree.nodes().iter().cloned().zip(counts).collect();
    (map, incidences)
}

/// Parsed content of a DOT file in the emitted subset.
#[derive(Debug, Default, PartialEq)]
pub struct ParsedDot {
    pub nodes: BTreeMap<String, String>,
    pub edges: BTreeSet<(String, String)>,
}

fn unquote(s: &str) -> String {
    let s = s.trim();
    assert!(
        s.starts_with('"') && s.ends_with('"'),
        "expected quoted id: {s}"
    );
    s[1..s.len() - 1]
        .replace("\\\"", "\"")
        .replace("\\\\", "\\")
}

fn attribute<'a>(attrs: &'a str, key: &str) -> Option<&'a str> {
    attrs
        .split(", ")
        .filter_map(|kv| kv.split_once('='))
        .find(|(k, _)| k.trim() == key)
        .map(|(_, v)| v.trim())
}

/// Minimal parser for `graph name { ... }` with one statement per line.
pub fn parse_dot(text: &str) -> ParsedDot {
    let mut lines = text.lines();
    let header = lines.next().expect("header");
    assert!(
        header.starts_with("graph ") && header.ends_with('{'),
        "{header}"
    );
    let mut out = ParsedDot::default();
    let mut closed = false;
    for line in lines {
        let line = line.trim();
        if line == "}" {
            closed = true;
            continue;
        }
        assert!(!closed, "content after closing brace");
        let stmt = line.strip_suffix(';').expect("statement ends with ;");
        let (head, attrs) = match stmt.split_once(" [") {
            Some((h, a)) => (h, a.strip_suffix(']').expect("closing bracket")),
            None => (stmt, ""),
        };
        if let Some((a, b)) = head.split_once(" -- ") {
            out.edges.insert((unquote(a), unquote(b)));
        } else {
            let color = attribute(attrs, "fillcolor")
                .expect("fillcolor")
                .to_string();
            out.nodes.insert(unquote(head), color);
        }
    }
    assert!(closed, "missing closing brace");
    out
}

/// Distance matrix from an arbitrary symmetric weight function.
pub fn distance_from(n: usize, weight: &dyn Fn(usize, usize) -> f64) -> DistanceMatrix {
    let mut values = vec![0.0; n * n];
    for a in 0..n {
        for b in a + 1..n {
            let w = weight(a, b);
            values[a * n + b] = w;
            values[b * n + a] = w;
        }
    }
    DistanceMatrix::from_parts(tickers(n), values).unwrap()
}
