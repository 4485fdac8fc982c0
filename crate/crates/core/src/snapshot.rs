//! Drawdown snapshots and band-average return series.

use std::collections::BTreeMap;
use std::fmt;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::graph::BandAssignment;
use crate::ingest::{PricePanel, Ticker};

/// Severity class of a cumulative return.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReturnClass {
    Green,
    Yellow,
    Red,
}

impl ReturnClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ReturnClass::Green => "green",
            ReturnClass::Yellow => "yellow",
            ReturnClass::Red => "red",
        }
    }
}

impl fmt::Display for ReturnClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ReturnClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "green" => Ok(ReturnClass::Green),
            "yellow" => Ok(ReturnClass::Yellow),
            "red" => Ok(ReturnClass::Red),
            other => Err(format!("unknown class {other:?}")),
        }
    }
}

/// Cutoffs for [`classify`]: green above `yellow`, red below `red`, yellow in
/// between with both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub red: f64,
    pub yellow: f64,
}

impl Thresholds {
    pub fn new(red: f64, yellow: f64) -> Result<Self> {
        if !(red.is_finite() && yellow.is_finite() && red < yellow) {
            return Err(Error::Config(format!(
                "red threshold {red} must be below yellow threshold {yellow}"
            )));
        }
        Ok(Thresholds { red, yellow })
    }

    pub fn class_of(&self, r: f64) -> ReturnClass {
        if r > self.yellow {
            ReturnClass::Green
        } else if r < self.red {
            ReturnClass::Red
        } else {
            ReturnClass::Yellow
        }
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            red: -0.25,
            yellow: -0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotClassification {
    pub at: NaiveDate,
    pub baseline: NaiveDate,
    pub entries: BTreeMap<Ticker, (f64, ReturnClass)>,
}

pub fn classify(
    at: NaiveDate,
    baseline: NaiveDate,
    returns: &BTreeMap<Ticker, f64>,
    thresholds: Thresholds,
) -> SnapshotClassification {
    SnapshotClassification {
        at,
        baseline,
        entries: returns
            .iter()
            .map(|(t, &r)| (t.clone(), (r, thresholds.class_of(r))))
            .collect(),
    }
}

/// Mean cumulative return per band over a list of dates.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSeries {
    pub center: Ticker,
    pub dates: Vec<NaiveDate>,
    /// `values[band - 1][k]` for `dates[k]`; `None` for bands with no members.
    pub values: Vec<Vec<Option<f64>>>,
    pub counts: Vec<usize>,
}

pub fn band_series(
    panel: &PricePanel,
    bands: &BandAssignment,
    baseline: NaiveDate,
    dates: &[NaiveDate],
) -> Result<BandSeries> {
    let base = panel
        .date_index(baseline)
        .ok_or(Error::DateNotInCalendar(baseline))?;
    let columns: Vec<usize> = dates
        .iter()
        .map(|&d| {
            let k = panel.date_index(d).ok_or(Error::DateNotInCalendar(d))?;
            if k < base {
                return Err(Error::DateOrder { baseline, at: d });
            }
            Ok(k)
        })
        .collect::<Result<_>>()?;

    let count = bands.band_count();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (ticker, &band) in &bands.bands {
        let row = panel
            .ticker_index(ticker.as_str())
            .ok_or_else(|| Error::UnknownTicker(ticker.to_string()))?;
        members[band - 1].push(row);
    }

    let values = members
        .iter()
        .map(|rows| {
            columns
                .iter()
                .map(|&k| {
                    (!rows.is_empty()).then(|| {
                        let total: f64 = rows
                            .iter()
                            .map(|&i| panel.closes(i)[k] / panel.closes(i)[base] - 1.0)
                            .sum();
                        total / rows.len() as f64
                    })
                })
                .collect()
        })
        .collect();

    Ok(BandSeries {
        center: bands.center.clone(),
        dates: dates.to_vec(),
        values,
        counts: members.iter().map(Vec::len).collect(),
    })
}

impl BandSeries {
    /// First date at which `band`'s mean return is at or below `level`.
    pub fn first_crossing(&self, band: usize, level: f64) -> Option<NaiveDate> {
        self.values[band - 1]
            .iter()
            .zip(&self.dates)
            .find(|(v, _)| v.is_some_and(|v| v <= level))
            .map(|(_, d)| *d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::BandScheme;

    #[test]
    fn boundary_convention() {
        let t = Thresholds::default();
        assert_eq!(t.class_of(-0.09), ReturnClass::Green);
        assert_eq!(t.class_of(-0.10), ReturnClass::Yellow);
        assert_eq!(t.class_of(-0.25), ReturnClass::Yellow);
        assert_eq!(t.class_of(-0.26), ReturnClass::Red);
        assert_eq!(t.class_of(0.5), ReturnClass::Green);
    }

    #[test]
    fn thresholds_must_be_ordered() {
        assert!(Thresholds::new(-0.1, -0.25).is_err());
        assert!(Thresholds::new(-0.1, -0.1).is_err());
        assert!(Thresholds::new(-0.3, -0.05).is_ok());
    }

    #[test]
    fn classify_covers_every_ticker() {
        let d = NaiveDate::from_ymd_opt(2008, 9, 15).unwrap();
        let returns: BTreeMap<Ticker, f64> = [("AA", -0.5), ("BB", 0.0), ("CC", -0.2)]
            .iter()
            .map(|&(t, r)| (Ticker::new(t).unwrap(), r))
            .collect();
        let snap = classify(d, d, &returns, Thresholds::default());
        assert_eq!(snap.entries.len(), 3);
        assert_eq!(snap.entries["AA"].1, ReturnClass::Red);
        assert_eq!(snap.entries["BB"].1, ReturnClass::Green);
        assert_eq!(snap.entries["CC"].1, ReturnClass::Yellow);
    }

    fn days(n: usize) -> Vec<NaiveDate> {
        (0..n)
            .map(|k| NaiveDate::from_ymd_opt(2008, 1, 1).unwrap() + chrono::Days::new(k as u64))
            .collect()
    }

    fn assignment(pairs: &[(&str, usize)]) -> BandAssignment {
        BandAssignment {
            center: Ticker::new("HUB").unwrap(),
            scheme: BandScheme::default(),
            bands: pairs
                .iter()
                .map(|&(t, b)| (Ticker::new(t).unwrap(), b))
                .collect(),
        }
    }

    #[test]
    fn two_member_mean_and_absent_bands() {
        let dates = days(2);
        let panel = PricePanel::new(
            ["AA", "BB", "HUB"]
                .iter()
                .map(|s| Ticker::new(s).unwrap())
                .collect(),
            dates.clone(),
            vec![vec![100.0, 90.0], vec![100.0, 70.0], vec![50.0, 10.0]],
        )
        .unwrap();
        let series = band_series(
            &panel,
            &assignment(&[("AA", 2), ("BB", 2)]),
            dates[0],
            &dates,
        )
        .unwrap();
        assert_eq!(series.counts, vec![0, 2, 0, 0, 0]);
        assert_eq!(series.values[0], vec![None, None]);
        assert_eq!(series.values[1][0], Some(0.0));
        assert!((series.values[1][1].unwrap() + 0.2).abs() < 1e-15);
        assert_eq!(series.first_crossing(2, -0.10), Some(dates[1]));
        assert_eq!(series.first_crossing(1, -0.10), None);
    }

    #[test]
    fn flat_prices_give_zero() {
        let dates = days(4);
        let panel = PricePanel::new(
            ["AA", "BB", "HUB"]
                .iter()
                .map(|s| Ticker::new(s).unwrap())
                .collect(),
            dates.clone(),
            vec![vec![5.0; 4], vec![7.0; 4], vec![9.0; 4]],
        )
        .unwrap();
        let series = band_series(
            &panel,
            &assignment(&[("AA", 1), ("BB", 5)]),
            dates[0],
            &dates,
        )
        .unwrap();
        for band in [0, 4] {
            assert!(series.values[band].iter().all(|v| *v == Some(0.0)));
        }
    }

    #[test]
    fn unknown_dates_and_tickers() {
        let dates = days(3);
        let panel = PricePanel::new(
            vec![Ticker::new("AA").unwrap()],
            dates.clone(),
            vec![vec![1.0, 2.0, 3.0]],
        )
        .unwrap();
        let bands = assignment(&[("AA", 1)]);
        let stray = NaiveDate::from_ymd_opt(2009, 1, 1).unwrap();
        assert!(matches!(
            band_series(&panel, &bands, stray, &dates),
            Err(Error::DateNotInCalendar(_))
        ));
        assert!(matches!(
            band_series(&panel, &bands, dates[0], &[stray]),
            Err(Error::DateNotInCalendar(_))
        ));
        assert!(matches!(
            band_series(&panel, &bands, dates[1], &[dates[0]]),
            Err(Error::DateOrder { .. })
        ));
        assert!(matches!(
            band_series(&panel, &assignment(&[("ZZ", 1)]), dates[0], &dates),
            Err(Error::UnknownTicker(_))
        ));
    }
}
