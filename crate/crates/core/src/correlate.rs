//! Pearson correlation of log-returns, the `sqrt(2(1 - rho))` distance, and
//! sector-level correlation averages.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::{ReturnsPanel, Sector, SectorMap, Ticker};

/// Mean and population standard deviation of one return series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesStats {
    pub mean: f64,
    pub stddev: f64,
}

impl SeriesStats {
    pub fn of(series: &[f64]) -> Self {
        if series.is_empty() {
            return SeriesStats {
                mean: f64::NAN,
                stddev: f64::NAN,
            };
        }
        let n = series.len() as f64;
        let mean = series.iter().sum::<f64>() / n;
        let var = series.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        SeriesStats {
            mean,
            stddev: var.sqrt(),
        }
    }
}

/// Square matrix with ticker labels on both axes, stored row-major.
#[derive(Debug, Clone, PartialEq)]
struct Labeled {
    tickers: Vec<Ticker>,
    values: Vec<f64>,
}

impl Labeled {
    fn new(tickers: Vec<Ticker>, values: Vec<f64>) -> Result<Self> {
        let n = tickers.len();
        if values.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "{} values for {n} tickers",
                values.len()
            )));
        }
        if !tickers.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidMatrix(
                "tickers must be unique and sorted".into(),
            ));
        }
        let m = Labeled { tickers, values };
        for i in 0..n {
            for j in 0..i {
                if m.get(i, j).to_bits() != m.get(j, i).to_bits() {
                    return Err(Error::InvalidMatrix(format!(
                        "asymmetric entry ({}, {})",
                        m.tickers[i], m.tickers[j]
                    )));
                }
            }
        }
        Ok(m)
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.tickers.len() + j]
    }

    fn index_of(&self, ticker: &str) -> Option<usize> {
        self.tickers
            .binary_search_by(|t| t.as_str().cmp(ticker))
            .ok()
    }

    fn row(&self, i: usize) -> &[f64] {
        let n = self.tickers.len();
        &self.values[i * n..(i + 1) * n]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix(Labeled);

impl CorrelationMatrix {
    /// Wraps externally supplied values, checking unit diagonal, exact
    /// symmetry and the `[-1, 1]` range.
    pub fn from_parts(tickers: Vec<Ticker>, values: Vec<f64>) -> Result<Self> {
        let m = Labeled::new(tickers, values)?;
        for i in 0..m.tickers.len() {
            if m.get(i, i) != 1.0 {
                return Err(Error::InvalidMatrix(format!(
                    "diagonal entry for {} is not 1",
                    m.tickers[i]
                )));
            }
        }
        if let Some(v) = m.values.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
            return Err(Error::InvalidMatrix(format!(
                "correlation {v} outside [-1, 1]"
            )));
        }
        Ok(CorrelationMatrix(m))
    }

    pub fn tickers(&self) -> &[Ticker] {
        &self.0.tickers
    }

    pub fn len(&self) -> usize {
        self.0.tickers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.tickers.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.0.row(i)
    }

    pub fn index_of(&self, ticker: &str) -> Option<usize> {
        self.0.index_of(ticker)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix(Labeled);

impl DistanceMatrix {
    /// Wraps externally supplied distances, checking zero diagonal, exact
    /// symmetry and non-negativity. The upper metric bound is enforced where
    /// it matters, in [`crate::graph::distance_bands`].
    pub fn from_parts(tickers: Vec<Ticker>, values: Vec<f64>) -> Result<Self> {
        let m = Labeled::new(tickers, values)?;
        for i in 0..m.tickers.len() {
            if m.get(i, i) != 0.0 {
                return Err(Error::InvalidMatrix(format!(
                    "diagonal entry for {} is not 0",
                    m.tickers[i]
                )));
            }
        }
        if let Some(v) = m.values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidMatrix(format!("invalid distance {v}")));
        }
        Ok(DistanceMatrix(m))
    }

    pub fn tickers(&self) -> &[Ticker] {
        &self.0.tickers
    }

    pub fn len(&self) -> usize {
        self.0.tickers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.tickers.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.0.row(i)
    }

    pub fn index_of(&self, ticker: &str) -> Option<usize> {
        self.0.index_of(ticker)
    }
}

/// `sqrt(2 (1 - rho))`, mapping `[-1, 1]` onto `[0, 2]`.
pub fn metric_distance(rho: f64) -> f64 {
    (2.0 * (1.0 - rho)).sqrt()
}

/// Inverse of [`metric_distance`].
pub fn correlation_from_distance(d: f64) -> f64 {
    1.0 - d * d / 2.0
}

fn centered(series: &[f64], mean: f64) -> Vec<f64> {
    series.iter().map(|x| x - mean).collect()
}

/// Correlation of two centred series; each sum runs in ascending time order.
fn pair_correlation(a: &[f64], b: &[f64], sd_a: f64, sd_b: f64) -> f64 {
    let n = a.len() as f64;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (cov / (n * sd_a * sd_b)).clamp(-1.0, 1.0)
}

/// Pearson correlation of every pair of return series.
///
/// Rows are computed in parallel; each entry depends only on its own pair so
/// the result is identical to a serial evaluation.
pub fn pearson_matrix(returns: &ReturnsPanel) -> Result<CorrelationMatrix> {
    let n_obs = returns.observations();
    if n_obs < 3 {
        return Err(Error::TooFewObservations {
            needed: 3,
            got: n_obs,
        });
    }
    for (ticker, series) in returns.tickers.iter().zip(&returns.values) {
        if series.len() != n_obs {
            return Err(Error::InvalidMatrix(format!(
                "series {ticker} has {} observations, expected {n_obs}",
                series.len()
            )));
        }
    }

    let stats: Vec<SeriesStats> = returns.values.iter().map(|s| SeriesStats::of(s)).collect();
    for ((ticker, series), st) in returns.tickers.iter().zip(&returns.values).zip(&stats) {
        if st.stddev == 0.0 || series.iter().all(|&x| x == series[0]) {
            return Err(Error::ZeroVariance(ticker.to_string()));
        }
    }
    let devs: Vec<Vec<f64>> = returns
        .values
        .iter()
        .zip(&stats)
        .map(|(s, st)| centered(s, st.mean))
        .collect();

    let n = returns.tickers.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| pair_correlation(&devs[i], &devs[j], stats[i].stddev, stats[j].stddev))
                .collect()
        })
        .collect();

    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for (k, &rho) in upper[i].iter().enumerate() {
            let j = i + 1 + k;
            values[i * n + j] = rho;
            values[j * n + i] = rho;
        }
    }
    CorrelationMatrix::from_parts(returns.tickers.clone(), values)
}

pub fn distance_matrix(corr: &CorrelationMatrix) -> DistanceMatrix {
    let n = corr.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                values[i * n + j] = metric_distance(corr.get(i, j));
            }
        }
    }
    DistanceMatrix(Labeled {
        tickers: corr.tickers().to_vec(),
        values,
    })
}

/// Whether within-sector averages count each ticker paired with itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiagonalConvention {
    /// Average over distinct pairs only.
    #[default]
    ExcludeSelf,
    /// Average over the full block, self-pairs (rho = 1) included.
    IncludeSelf,
}

/// Mean correlation within and across the nine sectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorCorrelationTable {
    pub counts: [usize; 9],
    /// Indexed by [`Sector::index`]; `None` where no pairs exist.
    pub values: [[Option<f64>; 9]; 9],
}

impl SectorCorrelationTable {
    pub fn get(&self, a: Sector, b: Sector) -> Option<f64> {
        self.values[a.index()][b.index()]
    }

    pub fn count(&self, sector: Sector) -> usize {
        self.counts[sector.index()]
    }
}

pub fn sector_table(
    corr: &CorrelationMatrix,
    sectors: &SectorMap,
) -> Result<SectorCorrelationTable> {
    sector_table_with(corr, sectors, DiagonalConvention::ExcludeSelf)
}

pub fn sector_table_with(
    corr: &CorrelationMatrix,
    sectors: &SectorMap,
    convention: DiagonalConvention,
) -> Result<SectorCorrelationTable> {
    let membership: Vec<usize> = corr
        .tickers()
        .iter()
        .map(|t| {
            sectors
                .get(t.as_str())
                .map(Sector::index)
                .ok_or_else(|| Error::MissingSector(t.to_string()))
        })
        .collect::<Result<_>>()?;

    let mut counts = [0usize; 9];
    for &s in &membership {
        counts[s] += 1;
    }

    let mut sums = [[0.0f64; 9]; 9];
    let mut pairs = [[0usize; 9]; 9];
    let n = corr.len();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (membership[i], membership[j]);
            let rho = corr.get(i, j);
            sums[a][b] += rho;
            pairs[a][b] += 1;
            if a != b {
                sums[b][a] += rho;
                pairs[b][a] += 1;
            }
        }
    }

    let mut values = [[None; 9]; 9];
    for a in 0..9 {
        for b in 0..9 {
            values[a][b] = if a != b {
                (pairs[a][b] > 0).then(|| sums[a][b] / pairs[a][b] as f64)
            } else {
                match convention {
                    DiagonalConvention::ExcludeSelf => {
                        (pairs[a][a] > 0).then(|| sums[a][a] / pairs[a][a] as f64)
                    }
                    DiagonalConvention::IncludeSelf => (counts[a] > 0).then(|| {
                        let k = counts[a] as f64;
                        (k + 2.0 * sums[a][a]) / (k * k)
                    }),
                }
            };
        }
    }
    Ok(SectorCorrelationTable { counts, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tickers(names: &[&str]) -> Vec<Ticker> {
        names.iter().map(|n| Ticker::new(n).unwrap()).collect()
    }

    fn panel(rows: Vec<Vec<f64>>) -> ReturnsPanel {
        let names: Vec<String> = (0..rows.len()).map(|i| format!("T{i}")).collect();
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let dates = (0..rows[0].len())
            .map(|k| {
                chrono::NaiveDate::from_ymd_opt(2008, 1, 1).unwrap() + chrono::Days::new(k as u64)
            })
            .collect();
        ReturnsPanel::from_series(tickers(&names), dates, rows)
    }

    #[test]
    fn perfect_correlation_and_anticorrelation() {
        let x = vec![0.01, -0.02, 0.03, 0.005, -0.01];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let m = pearson_matrix(&panel(vec![x.clone(), x, neg])).unwrap();
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(0, 2), -1.0);
        assert_eq!(m.get(2, 2), 1.0);
    }

    #[test]
    fn orthogonal_patterns() {
        let m = pearson_matrix(&panel(vec![
            vec![1.0, -1.0, 1.0, -1.0],
            vec![1.0, 1.0, -1.0, -1.0],
        ]))
        .unwrap();
        assert_eq!(m.get(0, 1), 0.0);
    }

    #[test]
    fn zero_variance_names_ticker() {
        let err =
            pearson_matrix(&panel(vec![vec![0.1, 0.2, 0.3], vec![0.1, 0.1, 0.1]])).unwrap_err();
        assert!(
            matches!(err, Error::ZeroVariance(ref t) if t == "T1"),
            "{err}"
        );
    }

    #[test]
    fn too_few_observations() {
        let err = pearson_matrix(&panel(vec![vec![0.1, 0.2], vec![0.3, 0.1]])).unwrap_err();
        assert!(matches!(
            err,
            Error::TooFewObservations { needed: 3, got: 2 }
        ));
    }

    #[test]
    fn distance_examples() {
        assert_eq!(metric_distance(1.0), 0.0);
        assert_eq!(metric_distance(-1.0), 2.0);
        assert!((metric_distance(0.0) - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert_eq!(metric_distance(0.5), 1.0);
    }

    #[test]
    fn distance_matrix_has_zero_diagonal() {
        let corr =
            CorrelationMatrix::from_parts(tickers(&["A", "B"]), vec![1.0, 0.5, 0.5, 1.0]).unwrap();
        let d = distance_matrix(&corr);
        assert_eq!(d.get(0, 0), 0.0);
        assert_eq!(d.get(0, 1), 1.0);
        assert_eq!(d.get(1, 0), 1.0);
    }

    #[test]
    fn from_parts_rejects_bad_matrices() {
        let t = tickers(&["A", "B"]);
        assert!(CorrelationMatrix::from_parts(t.clone(), vec![1.0, 0.5, 0.4, 1.0]).is_err());
        assert!(CorrelationMatrix::from_parts(t.clone(), vec![0.9, 0.5, 0.5, 1.0]).is_err());
        assert!(CorrelationMatrix::from_parts(t.clone(), vec![1.0, 1.5, 1.5, 1.0]).is_err());
        assert!(
            CorrelationMatrix::from_parts(tickers(&["B", "A"]), vec![1.0, 0.5, 0.5, 1.0]).is_err()
        );
        assert!(DistanceMatrix::from_parts(t, vec![0.0, -0.1, -0.1, 0.0]).is_err());
    }

    #[test]
    fn single_pair_sector_table() {
        let corr =
            CorrelationMatrix::from_parts(tickers(&["A", "B"]), vec![1.0, 0.6, 0.6, 1.0]).unwrap();
        let sectors: SectorMap = [
            (Ticker::new("A").unwrap(), Sector::Financial),
            (Ticker::new("B").unwrap(), Sector::Utilities),
        ]
        .into_iter()
        .collect();
        let table = sector_table(&corr, &sectors).unwrap();
        assert_eq!(table.get(Sector::Financial, Sector::Utilities), Some(0.6));
        assert_eq!(table.get(Sector::Utilities, Sector::Financial), Some(0.6));
        assert_eq!(table.get(Sector::Financial, Sector::Financial), None);
        assert_eq!(table.get(Sector::Utilities, Sector::Utilities), None);
        assert_eq!(table.get(Sector::Healthcare, Sector::Financial), None);
        assert_eq!(table.counts.iter().sum::<usize>(), 2);

        let incl = sector_table_with(&corr, &sectors, DiagonalConvention::IncludeSelf).unwrap();
        assert_eq!(incl.get(Sector::Financial, Sector::Financial), Some(1.0));
    }

    #[test]
    fn three_member_sector_mean() {
        #[rustfmt::skip]
        let values = vec![
            1.0, 0.2, 0.4,
            0.2, 1.0, 0.6,
            0.4, 0.6, 1.0,
        ];
        let corr = CorrelationMatrix::from_parts(tickers(&["A", "B", "C"]), values).unwrap();
        let sectors: SectorMap = ["A", "B", "C"]
            .iter()
            .map(|t| (Ticker::new(t).unwrap(), Sector::Technology))
            .collect();
        let table = sector_table(&corr, &sectors).unwrap();
        let v = table.get(Sector::Technology, Sector::Technology).unwrap();
        assert!((v - 0.4).abs() < 1e-15);
        let incl = sector_table_with(&corr, &sectors, DiagonalConvention::IncludeSelf).unwrap();
        let v = incl.get(Sector::Technology, Sector::Technology).unwrap();
        assert!((v - 0.6).abs() < 1e-15);
    }

    #[test]
    fn missing_sector_is_an_error() {
        let corr =
            CorrelationMatrix::from_parts(tickers(&["A", "B"]), vec![1.0, 0.6, 0.6, 1.0]).unwrap();
        let sectors: SectorMap = [(Ticker::new("A").unwrap(), Sector::Financial)]
            .into_iter()
            .collect();
        assert!(matches!(sector_table(&corr, &sectors), Err(Error::MissingSector(t)) if t == "B"));
    }
}
