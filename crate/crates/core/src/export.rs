//! Graphviz DOT output for spanning trees, colored by sector or by drawdown
//! class.
//!
//! The emitted text has a fixed shape:
//!
//! ```text
//! graph corrnet {
//!   "AAA" [label="AAA", style=filled, fillcolor=green];
//!   "BBB" [label="BBB", style=filled, fillcolor=green];
//!   "AAA" -- "BBB" [weight=1];
//! }
//! ```
//!
//! Nodes appear in ticker order, edges in `(a, b)` order, lines end in LF and
//! weights carry 6 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::graph::SpanningTree;
use crate::ingest::{Sector, SectorMap, Ticker};
use crate::numfmt::format_sig;
use crate::snapshot::{ReturnClass, SnapshotClassification};

pub type ColorMap = BTreeMap<Ticker, &'static str>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorScheme {
    SectorColors,
    ReturnClassColors,
}

impl ColorScheme {
    /// `(category, color)` pairs of the scheme.
    pub fn mapping(self) -> Vec<(&'static str, &'static str)> {
        match self {
            ColorScheme::SectorColors => Sector::ALL
                .iter()
                .map(|&s| (s.name(), sector_color(s)))
                .collect(),
            ColorScheme::ReturnClassColors => {
                [ReturnClass::Green, ReturnClass::Yellow, ReturnClass::Red]
                    .iter()
                    .map(|&c| (c.as_str(), class_color(c)))
                    .collect()
            }
        }
    }
}

pub fn sector_color(sector: Sector) -> &'static str {
    match sector {
        Sector::Financial => "green",
        Sector::Services => "orange",
        Sector::Healthcare => "red",
        Sector::Utilities => "grey",
        Sector::Technology => "yellow",
        Sector::BasicMaterials => "black",
        Sector::Conglomerates => "purple",
        Sector::ConsumerGoods => "blue",
        Sector::IndustrialGoods => "brown",
    }
}

pub fn class_color(class: ReturnClass) -> &'static str {
    match class {
        ReturnClass::Green => "green",
        ReturnClass::Yellow => "yellow",
        ReturnClass::Red => "red",
    }
}

pub fn sector_colors(sectors: &SectorMap) -> ColorMap {
    sectors
        .iter()
        .map(|(t, s)| (t.clone(), sector_color(s)))
        .collect()
}

pub fn class_colors(snapshot: &SnapshotClassification) -> ColorMap {
    snapshot
        .entries
        .iter()
        .map(|(t, (_, class))| (t.clone(), class_color(*class)))
        .collect()
}

fn quoted(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Renders `tree` as an undirected DOT graph. Labels default to the ticker.
pub fn to_dot(
    tree: &SpanningTree,
    colors: &ColorMap,
    labels: &BTreeMap<Ticker, String>,
) -> Result<String> {
    let mut out = String::from("graph corrnet {\n");
    for ticker in tree.nodes() {
        let color = colors
            .get(ticker)
            .ok_or_else(|| Error::MissingColor(ticker.to_string()))?;
        let label = labels.get(ticker).map_or(ticker.as_str(), String::as_str);
        writeln!(
            out,
            "  {} [label={}, style=filled, fillcolor={}];",
            quoted(ticker.as_str()),
            quoted(label),
            color
        )
        .unwrap();
    }
    let nodes = tree.nodes();
    for e in tree.edges() {
        writeln!(
            out,
            "  {} -- {} [weight={}];",
            quoted(nodes[e.a].as_str()),
            quoted(nodes[e.b].as_str()),
            format_sig(e.weight, 6)
        )
        .unwrap();
    }
    out.push_str("}\n");
    Ok(out)
}
