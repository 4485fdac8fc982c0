//! Deterministic synthetic market used for end-to-end testing.
//!
//! 533 tickers in nine sectors follow a factor model: a financial factor
//! loads heavily on Financial and progressively less on the other sectors
//! (negatively on Utilities), each sector has its own factor, and every
//! ticker has idiosyncratic noise. On top of the noise each sector goes
//! through a 40-day decline whose onset is later the weaker its exposure to
//! the financial factor, Financial first and Utilities last.

use std::fmt::Write;

use chrono::{Datelike, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::ingest::Sector;

pub const DEFAULT_SEED: u64 = 20_081_010;

/// Daily volatility scale of the factor model.
const DAILY_VOL: f64 = 0.01;
const DECLINE_DAYS: usize = 40;

/// Per-sector shape of the synthetic returns.
#[derive(Debug, Clone, Copy)]
pub struct SectorProfile {
    pub sector: Sector,
    pub prefix: &'static str,
    pub count: usize,
    pub financial_loading: f64,
    pub sector_loading: f64,
    pub idiosyncratic: f64,
    /// Trading-day index at which the sector's decline starts.
    pub decline_onset: usize,
    /// Total log-price drop over the decline.
    pub decline: f64,
}

const fn profile(
    sector: Sector,
    prefix: &'static str,
    count: usize,
    loadings: (f64, f64, f64),
    decline_onset: usize,
    decline: f64,
) -> SectorProfile {
    SectorProfile {
        sector,
        prefix,
        count,
        financial_loading: loadings.0,
        sector_loading: loadings.1,
        idiosyncratic: loadings.2,
        decline_onset,
        decline,
    }
}

pub const PROFILES: [SectorProfile; 9] = [
    profile(
        Sector::BasicMaterials,
        "BMT",
        61,
        (0.55, 0.75, 0.35),
        120,
        -0.35,
    ),
    profile(
        Sector::Conglomerates,
        "CGL",
        7,
        (0.80, 0.50, 0.30),
        60,
        -0.35,
    ),
    profile(
        Sector::ConsumerGoods,
        "CNG",
        61,
        (0.00, 0.90, 0.40),
        170,
        -0.35,
    ),
    profile(Sector::Financial, "FIN", 85, (1.00, 0.00, 0.20), 10, -0.40),
    profile(
        Sector::Healthcare,
        "HLT",
        49,
        (0.10, 0.90, 0.40),
        170,
        -0.35,
    ),
    profile(
        Sector::IndustrialGoods,
        "IND",
        42,
        (0.60, 0.70, 0.35),
        120,
        -0.35,
    ),
    profile(Sector::Services, "SVC", 98, (0.85, 0.45, 0.25), 60, -0.35),
    profile(
        Sector::Technology,
        "TEC",
        100,
        (0.50, 0.75, 0.40),
        120,
        -0.35,
    ),
    profile(
        Sector::Utilities,
        "UTL",
        30,
        (-0.55, 0.75, 0.35),
        220,
        -0.40,
    ),
];

/// Sectors whose financial-factor loading makes them strongly correlated
/// with the rest of the market.
pub fn core_sectors() -> Vec<Sector> {
    PROFILES
        .iter()
        .filter(|p| p.financial_loading >= 0.8)
        .map(|p| p.sector)
        .collect()
}

pub fn ticker_count() -> usize {
    PROFILES.iter().map(|p| p.count).sum()
}

/// Weekdays from 2007-08-01 through 2008-10-10.
pub fn calendar() -> Vec<NaiveDate> {
    let start = NaiveDate::from_ymd_opt(2007, 8, 1).unwrap();
    let end = NaiveDate::from_ymd_opt(2008, 10, 10).unwrap();
    start
        .iter_days()
        .take_while(|d| *d <= end)
        .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
        .collect()
}

/// Price and sector files of the synthetic market.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub prices_csv: String,
    pub sectors_csv: String,
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn generate(seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dates = calendar();
    let steps = dates.len() - 1;

    let financial: Vec<f64> = (0..steps).map(|_| normal(&mut rng)).collect();
    let sector_factors: Vec<Vec<f64>> = PROFILES
        .iter()
        .map(|_| (0..steps).map(|_| normal(&mut rng)).collect())
        .collect();

    let mut prices_csv = String::from("ticker,date,close\n");
    let mut sectors_csv = String::from("ticker,sector\n");
    for (profile, own) in PROFILES.iter().zip(&sector_factors) {
        let drift_per_day = profile.decline / DECLINE_DAYS as f64;
        for k in 1..=profile.count {
            let ticker = format!("{}{k:03}", profile.prefix);
            writeln!(sectors_csv, "{ticker},{}", profile.sector).unwrap();

            let mut log_price = (20.0 + 180.0 * rng.random::<f64>()).ln();
            writeln!(prices_csv, "{ticker},{},{:.4}", dates[0], log_price.exp()).unwrap();
            for t in 0..steps {
                let noise = profile.financial_loading * financial[t]
                    + profile.sector_loading * own[t]
                    + profile.idiosyncratic * normal(&mut rng);
                let declining =
                    (profile.decline_onset..profile.decline_onset + DECLINE_DAYS).contains(&t);
                log_price += DAILY_VOL * noise + if declining { drift_per_day } else { 0.0 };
                writeln!(
                    prices_csv,
                    "{ticker},{},{:.4}",
                    dates[t + 1],
                    log_price.exp()
                )
                .unwrap();
            }
        }
    }
    Fixture {
        prices_csv,
        sectors_csv,
    }
}
