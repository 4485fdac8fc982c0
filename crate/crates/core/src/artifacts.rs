//! CSV encodings of every pipeline artifact.
//!
//! Floating-point values are written with 17 significant digits so that
//! reading an artifact back reproduces the exact `f64` that was written.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::correlate::{CorrelationMatrix, DistanceMatrix, SectorCorrelationTable};
use crate::error::{Error, Result};
use crate::graph::{CentralityScores, Edge, SpanningTree};
use crate::ingest::{Sector, Ticker};
use crate::numfmt::format_sig;
use crate::snapshot::{BandSeries, ReturnClass, SnapshotClassification};

const TREE_HEADER: &str = "ticker_a,ticker_b,weight";
const CENTRALITY_HEADER: &str = "ticker,betweenness";
const SNAPSHOT_HEADER: &str = "ticker,return,class";

fn num(x: f64) -> String {
    format_sig(x, 17)
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("unparsable number {field:?}")))
}

fn parse_ticker(field: &str, line: usize) -> Result<Ticker> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid ticker {field:?}")))
}

/// Splits text into numbered lines, checking the header.
fn body<'a>(text: &'a str, header: &str) -> Result<impl Iterator<Item = (usize, Vec<&'a str>)>> {
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r')).enumerate();
    match lines.next() {
        Some((_, first)) if first == header => {}
        _ => return Err(Error::parse(1, format!("expected header {header:?}"))),
    }
    Ok(lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.split(',').collect())))
}

fn check_columns(fields: &[&str], expected: usize, line: usize) -> Result<()> {
    if fields.len() != expected {
        return Err(Error::parse(
            line,
            format!("expected {expected} columns, found {}", fields.len()),
        ));
    }
    Ok(())
}

fn write_matrix(tickers: &[Ticker], row: impl Fn(usize) -> Vec<f64>) -> String {
    let mut out = String::from("ticker");
    for t in tickers {
        out.push(',');
        out.push_str(t.as_str());
    }
    out.push('\n');
    for (i, t) in tickers.iter().enumerate() {
        out.push_str(t.as_str());
        for v in row(i) {
            out.push(',');
            out.push_str(&num(v));
        }
        out.push('\n');
    }
    out
}

fn read_matrix(text: &str) -> Result<(Vec<Ticker>, Vec<f64>)> {
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r')).enumerate();
    let header = match lines.next() {
        Some((_, h)) if h.starts_with("ticker") => h,
        _ => return Err(Error::parse(1, "expected header starting with \"ticker\"")),
    };
    let header: Vec<&str> = header.split(',').collect();
    if header[0] != "ticker" {
        return Err(Error::parse(1, "expected header starting with \"ticker\""));
    }
    let tickers = header[1..]
        .iter()
        .map(|f| parse_ticker(f, 1))
        .collect::<Result<Vec<_>>>()?;
    let n = tickers.len();
    let mut values = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (i, text) in lines.filter(|(_, l)| !l.trim().is_empty()) {
        let line = i + 1;
        let fields: Vec<&str> = text.split(',').collect();
        check_columns(&fields, n + 1, line)?;
        if rows >= n || fields[0] != tickers[rows].as_str() {
            return Err(Error::parse(
                line,
                format!("row label {:?} does not match header order", fields[0]),
            ));
        }
        for f in &fields[1..] {
            values.push(parse_f64(f, line)?);
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::InvalidMatrix(format!("{rows} rows for {n} columns")));
    }
    Ok((tickers, values))
}

pub fn write_correlation(m: &CorrelationMatrix) -> String {
    write_matrix(m.tickers(), |i| m.row(i).to_vec())
}

pub fn read_correlation(text: &str) -> Result<CorrelationMatrix> {
    let (tickers, values) = read_matrix(text)?;
    CorrelationMatrix::from_parts(tickers, values)
}

pub fn write_distance(m: &DistanceMatrix) -> String {
    write_matrix(m.tickers(), |i| m.row(i).to_vec())
}

pub fn read_distance(text: &str) -> Result<DistanceMatrix> {
    let (tickers, values) = read_matrix(text)?;
    DistanceMatrix::from_parts(tickers, values)
}

pub fn write_tree(tree: &SpanningTree) -> String {
    let mut out = format!("{TREE_HEADER}\n");
    let nodes = tree.nodes();
    for e in tree.edges() {
        writeln!(out, "{},{},{}", nodes[e.a], nodes[e.b], num(e.weight)).unwrap();
    }
    out
}

/// Reads a tree edge list; the node set is every ticker named by an edge.
pub fn read_tree(text: &str) -> Result<SpanningTree> {
    let mut raw = Vec::new();
    for (line, fields) in body(text, TREE_HEADER)? {
        check_columns(&fields, 3, line)?;
        raw.push((
            parse_ticker(fields[0], line)?,
            parse_ticker(fields[1], line)?,
            parse_f64(fields[2], line)?,
        ));
    }
    let mut nodes: Vec<Ticker> = raw
        .iter()
        .flat_map(|(a, b, _)| [a.clone(), b.clone()])
        .collect();
    nodes.sort();
    nodes.dedup();
    let index = |t: &Ticker| nodes.binary_search(t).expect("node collected above");
    let edges = raw
        .iter()
        .map(|(a, b, w)| Edge {
            a: index(a),
            b: index(b),
            weight: *w,
        })
        .collect();
    SpanningTree::from_edges(nodes.clone(), edges)
}

pub fn write_centrality(scores: &CentralityScores) -> String {
    let mut out = format!("{CENTRALITY_HEADER}\n");
    for (t, s) in &scores.scores {
        writeln!(out, "{t},{s}").unwrap();
    }
    out
}

pub fn read_centrality(text: &str) -> Result<CentralityScores> {
    let mut scores = BTreeMap::new();
    for (line, fields) in body(text, CENTRALITY_HEADER)? {
        check_columns(&fields, 2, line)?;
        let score: u64 = fields[1]
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, format!("unparsable score {:?}", fields[1])))?;
        scores.insert(parse_ticker(fields[0], line)?, score);
    }
    Ok(CentralityScores { scores })
}

fn sector_table_header() -> String {
    let mut h = String::from("sector,count");
    for s in Sector::ALL {
        h.push(',');
        h.push_str(s.name());
    }
    h
}

/// One row per sector: name, member count, then the nine averages. Cells
/// with no pairs are left empty.
pub fn write_sector_table(table: &SectorCorrelationTable) -> String {
    let mut out = sector_table_header();
    out.push('\n');
    for a in Sector::ALL {
        write!(out, "{},{}", a.name(), table.count(a)).unwrap();
        for b in Sector::ALL {
            out.push(',');
            out.push_str(&opt_num(table.get(a, b)));
        }
        out.push('\n');
    }
    out
}

pub fn read_sector_table(text: &str) -> Result<SectorCorrelationTable> {
    let header = sector_table_header();
    let mut counts = [0usize; 9];
    let mut values = [[None; 9]; 9];
    let mut seen = [false; 9];
    for (line, fields) in body(text, &header)? {
        check_columns(&fields, 11, line)?;
        let sector: Sector = fields[0].parse().map_err(|e| Error::parse(line, e))?;
        let a = sector.index();
        seen[a] = true;
        counts[a] = fields[1]
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, format!("unparsable count {:?}", fields[1])))?;
        for (b, f) in fields[2..].iter().enumerate() {
            values[a][b] = if f.trim().is_empty() {
                None
            } else {
                Some(parse_f64(f, line)?)
            };
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidMatrix(format!(
            "sector table has no row for {}",
            Sector::ALL[missing]
        )));
    }
    Ok(SectorCorrelationTable { counts, values })
}

pub fn write_band_series(series: &BandSeries) -> String {
    let mut out = String::from("date");
    for b in 1..=series.values.len() {
        write!(out, ",band{b}").unwrap();
    }
    out.push('\n');
    for (k, date) in series.dates.iter().enumerate() {
        write!(out, "{}", date.format("%Y-%m-%d")).unwrap();
        for band in &series.values {
            out.push(',');
            out.push_str(&opt_num(band[k]));
        }
        out.push('\n');
    }
    out
}

pub fn write_snapshot(snapshot: &SnapshotClassification) -> String {
    let mut out = format!("{SNAPSHOT_HEADER}\n");
    for (t, (r, class)) in &snapshot.entries {
        writeln!(out, "{t},{},{class}", num(*r)).unwrap();
    }
    out
}

/// Reads `ticker,return,class` rows. The class column is taken as written.
pub fn read_snapshot_classes(text: &str) -> Result<BTreeMap<Ticker, (f64, ReturnClass)>> {
    let mut entries = BTreeMap::new();
    for (line, fields) in body(text, SNAPSHOT_HEADER)? {
        check_columns(&fields, 3, line)?;
        let class: ReturnClass = fields[2]
            .trim()
            .parse()
            .map_err(|e| Error::parse(line, e))?;
        entries.insert(
            parse_ticker(fields[0], line)?,
            (parse_f64(fields[1], line)?, class),
        );
    }
    Ok(entries)
}
