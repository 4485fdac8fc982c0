use std::collections::BTreeMap;

use crate::correlate::DistanceMatrix;
use crate::error::{Error, Result};
use crate::ingest::Ticker;

/// Slack allowed above the metric's upper bound of 2 before a distance is
/// treated as invalid.
pub const METRIC_TOLERANCE: f64 = 1e-9;

/// Right-closed bands `((k-1)w, kw]` partitioning `(0, 2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandScheme {
    width: f64,
}

impl BandScheme {
    pub fn new(width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0 && width <= 2.0) {
            return Err(Error::Config(format!(
                "band width {width} must be in (0, 2]"
            )));
        }
        Ok(BandScheme { width })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn count(&self) -> usize {
        (2.0 / self.width - 1e-9).ceil().max(1.0) as usize
    }

    /// 1-based band containing `d`. Zero falls into band 1 and the last band
    /// absorbs everything up to the metric bound.
    pub fn band_of(&self, d: f64) -> Option<usize> {
        if !(0.0..=2.0 + METRIC_TOLERANCE).contains(&d) {
            return None;
        }
        let count = self.count();
        (1..count)
            .find(|&k| d <= k as f64 * self.width)
            .or(Some(count))
    }
}

impl Default for BandScheme {
    fn default() -> Self {
        BandScheme { width: 0.4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandAssignment {
    pub center: Ticker,
    pub scheme: BandScheme,
    /// Band index per non-center ticker.
    pub bands: BTreeMap<Ticker, usize>,
}

impl BandAssignment {
    pub fn band_count(&self) -> usize {
        self.scheme.count()
    }

    pub fn members(&self, band: usize) -> impl Iterator<Item = &Ticker> {
        self.bands
            .iter()
            .filter(move |(_, &b)| b == band)
            .map(|(t, _)| t)
    }
}

/// Bands every ticker by its direct metric distance from `center`.
pub fn distance_bands(
    dist: &DistanceMatrix,
    center: &str,
    scheme: BandScheme,
) -> Result<BandAssignment> {
    let c = dist
        .index_of(center)
        .ok_or_else(|| Error::UnknownTicker(center.to_string()))?;
    let mut bands = BTreeMap::new();
    for (j, ticker) in dist.tickers().iter().enumerate() {
        if j == c {
            continue;
        }
        let d = dist.get(c, j);
        let band = scheme.band_of(d).ok_or_else(|| Error::MetricViolation {
            center: center.to_string(),
            ticker: ticker.to_string(),
            distance: d,
        })?;
        bands.insert(ticker.clone(), band);
    }
    Ok(BandAssignment {
        center: dist.tickers()[c].clone(),
        scheme,
        bands,
    })
}
