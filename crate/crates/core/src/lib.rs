//! Correlation-network analysis of daily stock prices.
//!
//! The pipeline turns closing prices into log-returns, Pearson correlations
//! and the metric distance `d = sqrt(2(1 - rho))`, extracts the minimum
//! spanning tree of the complete distance graph, finds the tree's
//! highest-betweenness hub, and tracks how cumulative losses spread outward
//! from it by distance band and by green/yellow/red snapshot class.

pub mod artifacts;
pub mod cli;
pub mod correlate;
pub mod error;
pub mod export;
pub mod fixture;
pub mod graph;
pub mod ingest;
pub mod numfmt;
pub mod snapshot;

pub use error::{Error, Result};
