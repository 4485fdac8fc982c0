//! Price and sector ingestion, calendar alignment and return series.
//!
//! Price files are `ticker,date,close` rows; sector files are `ticker,sector`.
//! Both accept an optional header line. Line numbers in errors count physical
//! lines of the source, header included.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;

use crate::correlate::SeriesStats;
use crate::error::{Error, Result};

const PRICE_HEADER: &str = "ticker,date,close";
const SECTOR_HEADER: &str = "ticker,sector";

/// An exchange ticker symbol: 1 to 6 characters, an uppercase ASCII letter
/// followed by uppercase letters, digits, `.` or `-`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ticker(String);

impl Ticker {
    pub fn new(symbol: &str) -> Result<Self> {
        symbol.parse()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for Ticker {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        let valid = (1..=6).contains(&s.len())
            && chars.next().is_some_and(|c| c.is_ascii_uppercase())
            && chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '.' || c == '-');
        if valid {
            Ok(Ticker(s.to_string()))
        } else {
            Err(Error::UnknownTicker(format!(
                "{s:?} is not a valid ticker symbol"
            )))
        }
    }
}

impl fmt::Display for Ticker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for Ticker {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// The nine industry categories, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sector {
    BasicMaterials,
    Conglomerates,
    ConsumerGoods,
    Financial,
    Healthcare,
    IndustrialGoods,
    Services,
    Technology,
    Utilities,
}

impl Sector {
    pub const ALL: [Sector; 9] = [
        Sector::BasicMaterials,
        Sector::Conglomerates,
        Sector::ConsumerGoods,
        Sector::Financial,
        Sector::Healthcare,
        Sector::IndustrialGoods,
        Sector::Services,
        Sector::Technology,
        Sector::Utilities,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Sector::BasicMaterials => "Basic Materials",
            Sector::Conglomerates => "Conglomerates",
            Sector::ConsumerGoods => "Consumer Goods",
            Sector::Financial => "Financial",
            Sector::Healthcare => "Healthcare",
            Sector::IndustrialGoods => "Industrial Goods",
            Sector::Services => "Services",
            Sector::Technology => "Technology",
            Sector::Utilities => "Utilities",
        }
    }

    /// Position in [`Sector::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Sector {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Sector::ALL
            .into_iter()
            .find(|sector| sector.name() == s)
            .ok_or_else(|| format!("unknown sector {s:?}"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SectorMap {
    assignments: BTreeMap<Ticker, Sector>,
}

impl SectorMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assigns `ticker` to `sector`, returning the previous assignment.
    pub fn insert(&mut self, ticker: Ticker, sector: Sector) -> Option<Sector> {
        self.assignments.insert(ticker, sector)
    }

    pub fn get(&self, ticker: &str) -> Option<Sector> {
        self.assignments.get(ticker).copied()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ticker, Sector)> {
        self.assignments.iter().map(|(t, s)| (t, *s))
    }
}

impl FromIterator<(Ticker, Sector)> for SectorMap {
    fn from_iter<I: IntoIterator<Item = (Ticker, Sector)>>(iter: I) -> Self {
        SectorMap {
            assignments: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceRecord {
    pub ticker: Ticker,
    pub date: NaiveDate,
    pub close: f64,
}

/// Data lines of a CSV source with their 1-based physical line numbers.
/// Blank lines and a leading header equal to `header` are skipped.
fn data_lines<'a>(source: &'a str, header: &'a str) -> impl Iterator<Item = (usize, &'a str)> + 'a {
    source
        .lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim_end_matches('\r')))
        .filter(move |(lineno, line)| {
            !(line.trim().is_empty() || (*lineno == 1 && *line == header))
        })
}

fn parse_date(field: &str, line: usize) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(field, "%Y-%m-%d")
        .map_err(|_| Error::parse(line, format!("unparsable date {field:?}")))
}

/// Parses a `ticker,date,close` price file.
pub fn parse_prices(source: &str) -> Result<Vec<PriceRecord>> {
    let mut records = Vec::new();
    let mut seen: HashMap<(Ticker, NaiveDate), usize> = HashMap::new();

    for (line, text) in data_lines(source, PRICE_HEADER) {
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                line,
                format!("expected 3 columns, found {}", fields.len()),
            ));
        }
        let ticker: Ticker = fields[0]
            .parse()
            .map_err(|_| Error::parse(line, format!("invalid ticker {:?}", fields[0])))?;
        let date = parse_date(fields[1], line)?;
        let close: f64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(line, format!("unparsable price {:?}", fields[2])))?;
        if !close.is_finite() || close <= 0.0 {
            return Err(Error::parse(line, "non-positive price"));
        }

        if let Some(&first_line) = seen.get(&(ticker.clone(), date)) {
            return Err(Error::DuplicateKey {
                ticker: ticker.to_string(),
                date,
                first_line,
                second_line: line,
            });
        }
        seen.insert((ticker.clone(), date), line);
        records.push(PriceRecord {
            ticker,
            date,
            close,
        });
    }
    Ok(records)
}

/// Parses a `ticker,sector` file. Sector names are matched case-sensitively.
pub fn parse_sectors(source: &str) -> Result<SectorMap> {
    let mut map = SectorMap::new();
    let mut lines_seen: HashMap<Ticker, usize> = HashMap::new();

    for (line, text) in data_lines(source, SECTOR_HEADER) {
        let Some((ticker, sector)) = text.split_once(',') else {
            return Err(Error::parse(line, "expected 2 columns, found 1"));
        };
        if sector.contains(',') {
            return Err(Error::parse(line, "expected 2 columns, found more"));
        }
        let ticker: Ticker = ticker
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, format!("invalid ticker {:?}", ticker.trim())))?;
        let sector: Sector = sector.trim().parse().map_err(|e| Error::parse(line, e))?;
        if let Some(first) = lines_seen.insert(ticker.clone(), line) {
            return Err(Error::parse(
                line,
                format!("ticker {ticker} already assigned on line {first}"),
            ));
        }
        map.insert(ticker, sector);
    }
    Ok(map)
}

/// Concatenates record sets from several sources, keeping each ticker's
/// records from the first source that lists it.
pub fn merge_sources(sources: Vec<Vec<PriceRecord>>) -> Vec<PriceRecord> {
    let mut claimed: HashSet<Ticker> = HashSet::new();
    let mut merged = Vec::new();
    for records in sources {
        let here: HashSet<Ticker> = records.iter().map(|r| r.ticker.clone()).collect();
        merged.extend(records.into_iter().filter(|r| !claimed.contains(&r.ticker)));
        claimed.extend(here);
    }
    merged
}

/// Aligned closing prices, one row per ticker.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    tickers: Vec<Ticker>,
    dates: Vec<NaiveDate>,
    closes: Vec<Vec<f64>>,
}

/// How [`PricePanel::resolve_date`] treats a date missing from the calendar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DateLookup {
    #[default]
    Exact,
    /// Fall back to the latest trading date before the requested one.
    NearestPrior,
}

impl PricePanel {
    pub fn new(tickers: Vec<Ticker>, dates: Vec<NaiveDate>, closes: Vec<Vec<f64>>) -> Result<Self> {
        if !tickers.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidMatrix(
                "panel tickers must be unique and sorted".into(),
            ));
        }
        if !dates.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidMatrix(
                "panel dates must be strictly increasing".into(),
            ));
        }
        if closes.len() != tickers.len() || closes.iter().any(|row| row.len() != dates.len()) {
            return Err(Error::InvalidMatrix("panel shape mismatch".into()));
        }
        if let Some((i, _)) = closes
            .iter()
            .enumerate()
            .find(|(_, row)| row.iter().any(|&c| !(c.is_finite() && c > 0.0)))
        {
            return Err(Error::InvalidMatrix(format!(
                "non-positive close for {}",
                tickers[i]
            )));
        }
        Ok(PricePanel {
            tickers,
            dates,
            closes,
        })
    }

    pub fn tickers(&self) -> &[Ticker] {
        &self.tickers
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    /// Closing prices of the ticker at row `i`, in date order.
    pub fn closes(&self, i: usize) -> &[f64] {
        &self.closes[i]
    }

    pub fn ticker_index(&self, ticker: &str) -> Option<usize> {
        self.tickers
            .binary_search_by(|t| t.as_str().cmp(ticker))
            .ok()
    }

    pub fn date_index(&self, date: NaiveDate) -> Option<usize> {
        self.dates.binary_search(&date).ok()
    }

    pub fn resolve_date(&self, date: NaiveDate, lookup: DateLookup) -> Result<NaiveDate> {
        match (self.dates.binary_search(&date), lookup) {
            (Ok(_), _) => Ok(date),
            (Err(pos), DateLookup::NearestPrior) if pos > 0 => Ok(self.dates[pos - 1]),
            _ => Err(Error::DateNotInCalendar(date)),
        }
    }

    /// Flattens the panel back into records, ticker-major.
    pub fn to_records(&self) -> Vec<PriceRecord> {
        self.tickers
            .iter()
            .zip(&self.closes)
            .flat_map(|(ticker, row)| {
                self.dates
                    .iter()
                    .zip(row)
                    .map(|(&date, &close)| PriceRecord {
                        ticker: ticker.clone(),
                        date,
                        close,
                    })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentPolicy {
    /// Minimum fraction of the reference calendar a ticker must cover to be kept.
    pub min_coverage: f64,
}

impl Default for AlignmentPolicy {
    fn default() -> Self {
        AlignmentPolicy { min_coverage: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DroppedTicker {
    pub ticker: Ticker,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub panel: PricePanel,
    pub dropped: Vec<DroppedTicker>,
}

/// Aligns records onto a shared trading calendar.
///
/// The reference calendar is the set of dates traded by a strict majority of
/// tickers. Tickers covering less than `policy.min_coverage` of it are
/// dropped; the panel spans the intersection of the survivors' dates.
pub fn align_panel(records: &[PriceRecord], policy: AlignmentPolicy) -> Result<Alignment> {
    let mut series: BTreeMap<&Ticker, BTreeMap<NaiveDate, (usize, f64)>> = BTreeMap::new();
    for (pos, record) in records.iter().enumerate() {
        let row = series.entry(&record.ticker).or_default();
        if let Some(&(first, _)) = row.get(&record.date) {
            return Err(Error::DuplicateKey {
                ticker: record.ticker.to_string(),
                date: record.date,
                first_line: first + 1,
                second_line: pos + 1,
            });
        }
        row.insert(record.date, (pos, record.close));
    }

    let mut date_counts: BTreeMap<NaiveDate, usize> = BTreeMap::new();
    for row in series.values() {
        for date in row.keys() {
            *date_counts.entry(*date).or_default() += 1;
        }
    }
    let n = series.len();
    let reference: Vec<NaiveDate> = date_counts
        .into_iter()
        .filter(|&(_, count)| 2 * count > n)
        .map(|(date, _)| date)
        .collect();

    let mut survivors = Vec::new();
    let mut dropped = Vec::new();
    for (ticker, row) in &series {
        let covered = reference.iter().filter(|d| row.contains_key(*d)).count();
        let coverage = if reference.is_empty() {
            0.0
        } else {
            covered as f64 / reference.len() as f64
        };
        if coverage >= policy.min_coverage && coverage > 0.0 {
            survivors.push((*ticker, row));
        } else {
            dropped.push(DroppedTicker {
                ticker: (*ticker).clone(),
                coverage,
            });
        }
    }

    let mut shared: BTreeSet<NaiveDate> = survivors
        .first()
        .map(|(_, row)| row.keys().copied().collect())
        .unwrap_or_default();
    for (_, row) in survivors.iter().skip(1) {
        shared.retain(|d| row.contains_key(d));
    }

    if survivors.len() < 2 || shared.len() < 3 {
        return Err(Error::InsufficientOverlap {
            tickers: survivors.len(),
            dates: shared.len(),
        });
    }

    let dates: Vec<NaiveDate> = shared.into_iter().collect();
    let tickers: Vec<Ticker> = survivors.iter().map(|(t, _)| (*t).clone()).collect();
    let closes = survivors
        .iter()
        .map(|(_, row)| dates.iter().map(|d| row[d].1).collect())
        .collect();

    Ok(Alignment {
        panel: PricePanel::new(tickers, dates, closes)?,
        dropped,
    })
}

/// Daily log-returns, one row per ticker, with per-series statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsPanel {
    pub tickers: Vec<Ticker>,
    /// Date each return ends on; the panel's first date has no return.
    pub dates: Vec<NaiveDate>,
    pub values: Vec<Vec<f64>>,
    pub stats: Vec<SeriesStats>,
}

impl ReturnsPanel {
    /// Builds a returns panel directly from return series.
    pub fn from_series(tickers: Vec<Ticker>, dates: Vec<NaiveDate>, values: Vec<Vec<f64>>) -> Self {
        let stats = values.iter().map(|row| SeriesStats::of(row)).collect();
        ReturnsPanel {
            tickers,
            dates,
            values,
            stats,
        }
    }

    pub fn observations(&self) -> usize {
        self.dates.len()
    }
}

pub fn log_returns(panel: &PricePanel) -> Result<ReturnsPanel> {
    if panel.dates.len() < 2 {
        return Err(Error::TooFewObservations {
            needed: 2,
            got: panel.dates.len(),
        });
    }
    let values = panel
        .closes
        .iter()
        .map(|row| row.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
        .collect();
    Ok(ReturnsPanel::from_series(
        panel.tickers.clone(),
        panel.dates[1..].to_vec(),
        values,
    ))
}

/// Arithmetic return `close(at) / close(baseline) - 1` for every ticker.
pub fn cumulative_return(
    panel: &PricePanel,
    baseline: NaiveDate,
    at: NaiveDate,
) -> Result<BTreeMap<Ticker, f64>> {
    let b = panel
        .date_index(baseline)
        .ok_or(Error::DateNotInCalendar(baseline))?;
    let a = panel.date_index(at).ok_or(Error::DateNotInCalendar(at))?;
    if b > a {
        return Err(Error::DateOrder { baseline, at });
    }
    Ok(panel
        .tickers
        .iter()
        .zip(&panel.closes)
        .map(|(t, row)| (t.clone(), row[a] / row[b] - 1.0))
        .collect())
}
