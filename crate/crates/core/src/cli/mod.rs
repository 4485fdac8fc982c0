//! Command-line front end.

pub mod config;
pub mod pipeline;

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use crate::artifacts;
use crate::correlate::{sector_table_with, DiagonalConvention};
use crate::error::Result;
use crate::export::{sector_colors, to_dot, ColorMap};
use crate::fixture;
use crate::graph::betweenness;
use crate::ingest::Sector;
use crate::numfmt::format_sig;
use config::{parse_config, resolve, Overrides, RunConfig, OUT_DIR_ENV};
use pipeline::{load, Outputs};

#[derive(Debug, Parser)]
#[command(
    name = "corrnet",
    version,
    about = "Stock correlation network analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every pipeline command; each mirrors a config-file key.
#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Price CSV (`ticker,date,close`). Repeat to merge several sources.
    #[arg(long)]
    prices: Vec<PathBuf>,
    /// Sector CSV (`ticker,sector`).
    #[arg(long)]
    sectors: Option<PathBuf>,
    /// First date of the analysis window and base of cumulative returns.
    #[arg(long)]
    baseline: Option<NaiveDate>,
    /// Last date of the analysis window.
    #[arg(long)]
    end: Option<NaiveDate>,
    /// Snapshot date; repeatable.
    #[arg(long = "snapshot-date", visible_alias = "date")]
    snapshot_dates: Vec<NaiveDate>,
    #[arg(long)]
    band_width: Option<f64>,
    /// Returns at or below this are at least yellow.
    #[arg(long, allow_hyphen_values = true)]
    yellow_threshold: Option<f64>,
    /// Returns below this are red.
    #[arg(long, allow_hyphen_values = true)]
    red_threshold: Option<f64>,
    /// Output directory [env: CORRNET_OUT_DIR]
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Use the latest earlier trading day for snapshot dates off the calendar.
    #[arg(long)]
    nearest_prior: bool,
}

impl CommonArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => {
                let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
                Some(load(path, |text| parse_config(text, &base))?)
            }
            None => None,
        };
        let flags = Overrides {
            prices: self.prices.clone(),
            sectors: self.sectors.clone(),
            baseline: self.baseline,
            end: self.end,
            snapshot_dates: self.snapshot_dates.clone(),
            band_width: self.band_width,
            yellow_threshold: self.yellow_threshold,
            red_threshold: self.red_threshold,
            out_dir: self.out_dir.clone(),
            nearest_prior: self.nearest_prior.then_some(true),
        };
        let env_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
        resolve(file.as_ref(), &flags, env_dir)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correlation and distance matrices from prices.
    Corr {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Minimum spanning tree from a distance matrix.
    Mst {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        dist: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Betweenness centrality of every tree node.
    Centrality {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean return per distance band around the hub, per date.
    Bands {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        dist: Option<PathBuf>,
        #[arg(long)]
        centrality: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average correlation within and across sectors.
    Sectors {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        corr: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Count self-pairs in within-sector averages.
        #[arg(long)]
        include_self: bool,
    },
    /// Green/yellow/red classification and DOT file per snapshot date.
    Snapshot {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        tree: Option<PathBuf>,
    },
    /// DOT file of the tree colored by sector or by a snapshot's classes.
    ExportDot {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        tree: Option<PathBuf>,
        /// Snapshot CSV to color by class instead of by sector.
        #[arg(long)]
        snapshot: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every stage plus a manifest of content hashes.
    Run {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compare a sector table against reference values under both diagonal conventions.
    CompareSectors {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        corr: Option<PathBuf>,
        /// Reference table in the `sector_table.csv` layout.
        #[arg(long)]
        reference: PathBuf,
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
    },
    /// Write the synthetic 533-ticker test market.
    Fixture {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = fixture::DEFAULT_SEED)]
        seed: u64,
    },
}

fn input(explicit: &Option<PathBuf>, cfg: &RunConfig, name: &str) -> PathBuf {
    explicit.clone().unwrap_or_else(|| cfg.out_dir.join(name))
}

fn write_one(path: &Path, contents: &str) -> Result<()> {
    let mut out = Outputs::new();
    out.write(path, contents)?;
    out.commit();
    Ok(())
}

pub fn execute(command: Command) -> Result<()> {
    use pipeline::*;
    match command {
        Command::Corr { common } => {
            let cfg = common.resolve()?;
            let alignment = load_panel(&cfg)?;
            let (corr, dist) = correlations(&alignment.panel)?;
            let mut out = Outputs::new();
            out.write(
                &cfg.out_dir.join(CORRELATION),
                &artifacts::write_correlation(&corr),
            )?;
            out.write(
                &cfg.out_dir.join(DISTANCE),
                &artifacts::write_distance(&dist),
            )?;
            out.write(
                &cfg.out_dir.join(DROPPED),
                &write_dropped(&alignment.dropped),
            )?;
            out.commit();
            for d in &alignment.dropped {
                eprintln!(
                    "dropped {} (coverage {})",
                    d.ticker,
                    format_sig(d.coverage, 4)
                );
            }
        }
        Command::Mst { common, dist, out } => {
            let cfg = common.resolve()?;
            let dist = load(&input(&dist, &cfg, DISTANCE), artifacts::read_distance)?;
            let tree = tree_from_distances(&dist)?;
            write_one(&input(&out, &cfg, TREE), &artifacts::write_tree(&tree))?;
        }
        Command::Centrality { common, tree, out } => {
            let cfg = common.resolve()?;
            let tree = load(&input(&tree, &cfg, TREE), artifacts::read_tree)?;
            let scores = betweenness(&tree);
            write_one(
                &input(&out, &cfg, CENTRALITY),
                &artifacts::write_centrality(&scores),
            )?;
        }
        Command::Bands {
            common,
            dist,
            centrality,
            out,
        } => {
            let cfg = common.resolve()?;
            let dist = load(&input(&dist, &cfg, DISTANCE), artifacts::read_distance)?;
            let scores = load(
                &input(&centrality, &cfg, CENTRALITY),
                artifacts::read_centrality,
            )?;
            let alignment = load_panel(&cfg)?;
            let series = bands_for(&alignment.panel, &dist, &scores, &cfg)?;
            write_one(
                &input(&out, &cfg, BAND_SERIES),
                &artifacts::write_band_series(&series),
            )?;
        }
        Command::Sectors {
            common,
            corr,
            out,
            include_self,
        } => {
            let cfg = common.resolve()?;
            let corr = load(
                &input(&corr, &cfg, CORRELATION),
                artifacts::read_correlation,
            )?;
            let sectors = load_sectors(&cfg)?;
            let convention = if include_self {
                DiagonalConvention::IncludeSelf
            } else {
                DiagonalConvention::ExcludeSelf
            };
            let table = sector_table_with(&corr, &sectors, convention)?;
            write_one(
                &input(&out, &cfg, SECTOR_TABLE),
                &artifacts::write_sector_table(&table),
            )?;
        }
        Command::Snapshot { common, tree } => {
            let cfg = common.resolve()?;
            snapshot_stage(&cfg, &input(&tree, &cfg, TREE))?;
        }
        Command::ExportDot {
            common,
            tree,
            snapshot,
            out,
        } => {
            let cfg = common.resolve()?;
            let tree = load(&input(&tree, &cfg, TREE), artifacts::read_tree)?;
            let colors: ColorMap = match &snapshot {
                Some(path) => load(path, artifacts::read_snapshot_classes)?
                    .into_iter()
                    .map(|(t, (_, class))| (t, crate::export::class_color(class)))
                    .collect(),
                None => sector_colors(&load_sectors(&cfg)?),
            };
            let dot = to_dot(&tree, &colors, &Default::default())?;
            write_one(&input(&out, &cfg, SECTOR_DOT), &dot)?;
        }
        Command::Run { common } => {
            let cfg = common.resolve()?;
            let manifest = run_pipeline(&cfg)?;
            println!(
                "wrote {} artifacts and {} to {}",
                manifest.entries.len(),
                MANIFEST,
                cfg.out_dir.display()
            );
        }
        Command::CompareSectors {
            common,
            corr,
            reference,
            tolerance,
        } => {
            let cfg = common.resolve()?;
            let corr = load(
                &input(&corr, &cfg, CORRELATION),
                artifacts::read_correlation,
            )?;
            let sectors = load_sectors(&cfg)?;
            let reference = load(&reference, artifacts::read_sector_table)?;
            for convention in [
                DiagonalConvention::ExcludeSelf,
                DiagonalConvention::IncludeSelf,
            ] {
                let table = sector_table_with(&corr, &sectors, convention)?;
                print!(
                    "{}",
                    compare_tables(&table, &reference, tolerance, convention)
                );
            }
        }
        Command::Fixture { out_dir, seed } => {
            let fx = fixture::generate(seed);
            let mut out = Outputs::new();
            out.write(&out_dir.join("prices.csv"), &fx.prices_csv)?;
            out.write(&out_dir.join("sectors.csv"), &fx.sectors_csv)?;
            out.write(
                &out_dir.join("run.cfg"),
                "prices = prices.csv\nsectors = sectors.csv\nout-dir = out\n",
            )?;
            out.commit();
        }
    }
    Ok(())
}

/// Per-cell comparison report of `table` against `reference`.
pub fn compare_tables(
    table: &crate::correlate::SectorCorrelationTable,
    reference: &crate::correlate::SectorCorrelationTable,
    tolerance: f64,
    convention: DiagonalConvention,
) -> String {
    use std::fmt::Write;
    let mut report = format!(
        "# diagonal convention: {convention:?}\nrow,column,reference,computed,delta,within\n"
    );
    let (mut compared, mut within) = (0, 0);
    for a in Sector::ALL {
        for b in Sector::ALL {
            let (Some(r), Some(c)) = (reference.get(a, b), table.get(a, b)) else {
                continue;
            };
            let delta = c - r;
            let ok = delta.abs() <= tolerance;
            compared += 1;
            within += ok as usize;
            writeln!(
                report,
                "{a},{b},{},{},{},{ok}",
                format_sig(r, 6),
                format_sig(c, 6),
                format_sig(delta, 6)
            )
            .unwrap();
        }
    }
    writeln!(report, "# {within}/{compared} cells within {tolerance}").unwrap();
    report
}
