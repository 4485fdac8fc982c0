//! Pipeline stages and the composed run.
//!
//! Every stage reads its inputs from files and writes CSV or DOT artifacts, so
//! stages can be run one at a time. [`run_pipeline`] chains the same
//! computations in memory and finishes with a manifest of content hashes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use crate::artifacts;
use crate::correlate::{distance_matrix, pearson_matrix, CorrelationMatrix, DistanceMatrix};
use crate::error::{Error, Result};
use crate::export::{class_colors, sector_colors, to_dot};
use crate::graph::{
    betweenness, build_graph, central_node, distance_bands, minimum_spanning_tree,
    CentralityScores, SpanningTree,
};
use crate::ingest::{
    align_panel, cumulative_return, log_returns, merge_sources, parse_prices, parse_sectors,
    Alignment, AlignmentPolicy, DroppedTicker, PricePanel, SectorMap,
};
use crate::numfmt::format_sig;
use crate::snapshot::{band_series, classify, BandSeries, SnapshotClassification};

pub const CORRELATION: &str = "correlation.csv";
pub const DISTANCE: &str = "distance.csv";
pub const DROPPED: &str = "dropped_tickers.csv";
pub const TREE: &str = "mst.csv";
pub const CENTRALITY: &str = "centrality.csv";
pub const SECTOR_TABLE: &str = "sector_table.csv";
pub const BAND_SERIES: &str = "band_series.csv";
pub const SECTOR_DOT: &str = "sectors.dot";
pub const MANIFEST: &str = "manifest.csv";

pub fn snapshot_csv_name(date: NaiveDate) -> String {
    format!("snapshot_{date}.csv")
}

pub fn snapshot_dot_name(date: NaiveDate) -> String {
    format!("snapshot_{date}.dot")
}

/// Reads an input file, reporting a missing file as [`Error::MissingInput`].
pub fn read_input(path: &Path) -> Result<String> {
    if !path.exists() {
        return Err(Error::MissingInput(path.to_path_buf()));
    }
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads and parses one input file, attaching the path to parse errors.
pub fn load<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T>) -> Result<T> {
    let text = read_input(path)?;
    parse(&text).map_err(|e| e.in_file(path))
}

/// Files written by one command. Unless committed, dropping removes them.
pub struct Outputs {
    written: Vec<(PathBuf, String)>,
    committed: bool,
}

impl Outputs {
    pub fn new() -> Self {
        Outputs {
            written: Vec::new(),
            committed: false,
        }
    }

    pub fn write(&mut self, path: &Path, contents: &str) -> Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|source| Error::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
        fs::write(path, contents).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.written.push((
            path.to_path_buf(),
            hex::encode(Sha256::digest(contents.as_bytes())),
        ));
        Ok(())
    }

    pub fn commit(mut self) -> Vec<(PathBuf, String)> {
        self.committed = true;
        std::mem::take(&mut self.written)
    }
}

impl Default for Outputs {
    fn default() -> Self {
        Self::new()
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.committed {
            for (path, _) in &self.written {
                let _ = fs::remove_file(path);
            }
        }
    }
}

/// Output file name and SHA-256 of its contents, in write order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("file,sha256\n");
        for (name, hash) in &self.entries {
            writeln!(out, "{name},{hash}").unwrap();
        }
        out
    }
}

/// Parses and aligns the configured price files over `[baseline, end]`.
pub fn load_panel(cfg: &RunConfig) -> Result<Alignment> {
    if cfg.prices.is_empty() {
        return Err(Error::Config("no price file given (--prices)".into()));
    }
    let sources = cfg
        .prices
        .iter()
        .map(|p| load(p, parse_prices))
        .collect::<Result<Vec<_>>>()?;
    let mut records = merge_sources(sources);
    records.retain(|r| r.date >= cfg.baseline && r.date <= cfg.end);
    align_panel(&records, AlignmentPolicy::default())
}

pub fn load_sectors(cfg: &RunConfig) -> Result<SectorMap> {
    let path = cfg
        .sectors
        .as_ref()
        .ok_or_else(|| Error::Config("no sector file given (--sectors)".into()))?;
    load(path, parse_sectors)
}

pub fn write_dropped(dropped: &[DroppedTicker]) -> String {
    let mut out = String::from("ticker,coverage\n");
    for d in dropped {
        writeln!(out, "{},{}", d.ticker, format_sig(d.coverage, 17)).unwrap();
    }
    out
}

pub fn correlations(panel: &PricePanel) -> Result<(CorrelationMatrix, DistanceMatrix)> {
    let corr = pearson_matrix(&log_returns(panel)?)?;
    let dist = distance_matrix(&corr);
    Ok((corr, dist))
}

pub fn tree_from_distances(dist: &DistanceMatrix) -> Result<SpanningTree> {
    if dist.len() < 2 {
        return Err(Error::InvalidMatrix("need at least 2 tickers".into()));
    }
    Ok(minimum_spanning_tree(&build_graph(dist)))
}

/// Band series around the highest-betweenness ticker, over every panel date.
pub fn bands_for(
    panel: &PricePanel,
    dist: &DistanceMatrix,
    scores: &CentralityScores,
    cfg: &RunConfig,
) -> Result<BandSeries> {
    let hub =
        central_node(scores).ok_or_else(|| Error::InvalidTree("no centrality scores".into()))?;
    let bands = distance_bands(dist, hub.as_str(), cfg.band_scheme()?)?;
    band_series(panel, &bands, cfg.baseline, panel.dates())
}

pub fn snapshot_at(
    panel: &PricePanel,
    date: NaiveDate,
    cfg: &RunConfig,
) -> Result<SnapshotClassification> {
    let at = panel.resolve_date(date, cfg.date_lookup)?;
    let returns = cumulative_return(panel, cfg.baseline, at)?;
    Ok(classify(at, cfg.baseline, &returns, cfg.thresholds))
}

fn no_labels() -> std::collections::BTreeMap<crate::ingest::Ticker, String> {
    Default::default()
}

/// Writes the snapshot CSV and DOT for each configured date.
fn write_snapshots(
    out: &mut Outputs,
    panel: &PricePanel,
    tree: &SpanningTree,
    cfg: &RunConfig,
    names: &mut Vec<String>,
) -> Result<()> {
    for &date in &cfg.snapshot_dates {
        let snap = snapshot_at(panel, date, cfg)?;
        let dot = to_dot(tree, &class_colors(&snap), &no_labels())?;
        for (name, contents) in [
            (snapshot_csv_name(date), artifacts::write_snapshot(&snap)),
            (snapshot_dot_name(date), dot),
        ] {
            out.write(&cfg.out_dir.join(&name), &contents)?;
            names.push(name);
        }
    }
    Ok(())
}

/// Runs every stage and writes the manifest. On failure nothing is left
/// behind in the output directory.
pub fn run_pipeline(cfg: &RunConfig) -> Result<Manifest> {
    cfg.validate()?;
    let alignment = load_panel(cfg)?;
    let sectors = load_sectors(cfg)?;
    let panel = &alignment.panel;

    let mut out = Outputs::new();
    let mut names: Vec<String> = Vec::new();
    let mut emit = |out: &mut Outputs, name: &str, contents: String| -> Result<()> {
        out.write(&cfg.out_dir.join(name), &contents)?;
        names.push(name.to_string());
        Ok(())
    };

    let (corr, dist) = correlations(panel)?;
    emit(&mut out, CORRELATION, artifacts::write_correlation(&corr))?;
    emit(&mut out, DISTANCE, artifacts::write_distance(&dist))?;
    emit(&mut out, DROPPED, write_dropped(&alignment.dropped))?;

    let tree = tree_from_distances(&dist)?;
    emit(&mut out, TREE, artifacts::write_tree(&tree))?;

    let scores = betweenness(&tree);
    emit(&mut out, CENTRALITY, artifacts::write_centrality(&scores))?;

    let table = crate::correlate::sector_table(&corr, &sectors)?;
    emit(
        &mut out,
        SECTOR_TABLE,
        artifacts::write_sector_table(&table),
    )?;

    let series = bands_for(panel, &dist, &scores, cfg)?;
    emit(&mut out, BAND_SERIES, artifacts::write_band_series(&series))?;

    let dot = to_dot(&tree, &sector_colors(&sectors), &no_labels())?;
    emit(&mut out, SECTOR_DOT, dot)?;

    write_snapshots(&mut out, panel, &tree, cfg, &mut names)?;

    let hashes: Vec<String> = out.written.iter().map(|(_, h)| h.clone()).collect();
    let manifest = Manifest {
        entries: names.into_iter().zip(hashes).collect(),
    };
    out.write(&cfg.out_dir.join(MANIFEST), &manifest.to_csv())?;
    out.commit();
    Ok(manifest)
}

/// The `snapshot` stage: per-date CSV and DOT from prices and a tree file.
pub fn snapshot_stage(cfg: &RunConfig, tree_path: &Path) -> Result<Vec<String>> {
    let alignment = load_panel(cfg)?;
    let tree = load(tree_path, artifacts::read_tree)?;
    let mut out = Outputs::new();
    let mut names = Vec::new();
    write_snapshots(&mut out, &alignment.panel, &tree, cfg, &mut names)?;
    out.commit();
    Ok(names)
}
