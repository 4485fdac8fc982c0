//! Run configuration: `key = value` files overlaid by command-line flags.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::graph::BandScheme;
use crate::ingest::DateLookup;
use crate::snapshot::Thresholds;

/// Event dates plotted by default when no snapshot date is configured.
pub const DEFAULT_SNAPSHOT_DATES: [&str; 6] = [
    "2007-08-10",
    "2007-09-14",
    "2008-01-17",
    "2008-03-17",
    "2008-09-15",
    "2008-10-10",
];

pub const OUT_DIR_ENV: &str = "CORRNET_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "corrnet-out";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub prices: Vec<PathBuf>,
    pub sectors: Option<PathBuf>,
    pub baseline: NaiveDate,
    pub end: NaiveDate,
    pub snapshot_dates: Vec<NaiveDate>,
    pub band_width: f64,
    pub thresholds: Thresholds,
    pub out_dir: PathBuf,
    pub date_lookup: DateLookup,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            prices: Vec::new(),
            sectors: None,
            baseline: NaiveDate::from_ymd_opt(2007, 8, 1).unwrap(),
            end: NaiveDate::from_ymd_opt(2008, 10, 10).unwrap(),
            snapshot_dates: DEFAULT_SNAPSHOT_DATES
                .iter()
                .map(|d| d.parse().unwrap())
                .collect(),
            band_width: 0.4,
            thresholds: Thresholds::default(),
            out_dir: PathBuf::from(DEFAULT_OUT_DIR),
            date_lookup: DateLookup::Exact,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.baseline >= self.end {
            return Err(Error::Config(format!(
                "baseline {} must be before end {}",
                self.baseline, self.end
            )));
        }
        BandScheme::new(self.band_width)?;
        Thresholds::new(self.thresholds.red, self.thresholds.yellow)?;
        Ok(())
    }

    pub fn band_scheme(&self) -> Result<BandScheme> {
        BandScheme::new(self.band_width)
    }
}

/// Optional values, either from a config file or from flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub prices: Vec<PathBuf>,
    pub sectors: Option<PathBuf>,
    pub baseline: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
    pub snapshot_dates: Vec<NaiveDate>,
    pub band_width: Option<f64>,
    pub yellow_threshold: Option<f64>,
    pub red_threshold: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub nearest_prior: Option<bool>,
}

impl Overrides {
    /// Later values win; list values replace rather than append.
    fn apply(&self, cfg: &mut RunConfig) {
        if !self.prices.is_empty() {
            cfg.prices = self.prices.clone();
        }
        if let Some(p) = &self.sectors {
            cfg.sectors = Some(p.clone());
        }
        if let Some(d) = self.baseline {
            cfg.baseline = d;
        }
        if let Some(d) = self.end {
            cfg.end = d;
        }
        if !self.snapshot_dates.is_empty() {
            cfg.snapshot_dates = self.snapshot_dates.clone();
        }
        if let Some(w) = self.band_width {
            cfg.band_width = w;
        }
        if let Some(y) = self.yellow_threshold {
            cfg.thresholds.yellow = y;
        }
        if let Some(r) = self.red_threshold {
            cfg.thresholds.red = r;
        }
        if let Some(o) = &self.out_dir {
            cfg.out_dir = o.clone();
        }
        if let Some(n) = self.nearest_prior {
            cfg.date_lookup = if n {
                DateLookup::NearestPrior
            } else {
                DateLookup::Exact
            };
        }
    }
}

fn parse_date(value: &str, line: usize) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(value, "%Y-%m-%d")
        .map_err(|_| Error::parse(line, format!("unparsable date {value:?}")))
}

fn parse_number(value: &str, line: usize) -> Result<f64> {
    value
        .parse()
        .map_err(|_| Error::parse(line, format!("unparsable number {value:?}")))
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// Parses `key = value` lines. `#` starts a comment. Keys are the long flag
/// names (`band-width`, `snapshot-date`, ...); underscores are accepted in
/// place of hyphens. Relative paths resolve against `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<Overrides> {
    let mut o = Overrides::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::parse(line, "expected key = value"))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        let path = |v: &str| base_dir.join(v);
        match key.as_str() {
            "prices" => o.prices.extend(list(value).map(path)),
            "sectors" => o.sectors = Some(path(value)),
            "baseline" => o.baseline = Some(parse_date(value, line)?),
            "end" => o.end = Some(parse_date(value, line)?),
            "snapshot-date" | "snapshot-dates" => {
                for d in list(value) {
                    o.snapshot_dates.push(parse_date(d, line)?);
                }
            }
            "band-width" => o.band_width = Some(parse_number(value, line)?),
            "yellow-threshold" => o.yellow_threshold = Some(parse_number(value, line)?),
            "red-threshold" => o.red_threshold = Some(parse_number(value, line)?),
            "out-dir" => o.out_dir = Some(path(value)),
            "nearest-prior" => {
                o.nearest_prior = Some(match value {
                    "true" | "yes" | "1" => true,
                    "false" | "no" | "0" => false,
                    other => {
                        return Err(Error::parse(
                            line,
                            format!("expected a boolean, got {other:?}"),
                        ))
                    }
                })
            }
            other => return Err(Error::parse(line, format!("unknown key {other:?}"))),
        }
    }
    Ok(o)
}

/// Resolves the effective configuration: defaults, then `CORRNET_OUT_DIR`,
/// then the config file, then flags.
pub fn resolve(
    file: Option<&Overrides>,
    flags: &Overrides,
    env_out_dir: Option<PathBuf>,
) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(dir) = env_out_dir {
        cfg.out_dir = dir;
    }
    if let Some(file) = file {
        file.apply(&mut cfg);
    }
    flags.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let text = "\
# comment
prices = a.csv, b.csv
sectors = s.csv
baseline = 2007-08-01
end = 2008-10-10   # trailing comment
snapshot_date = 2008-09-15
snapshot-date = 2008-10-10
band-width = 0.5
yellow-threshold = -0.05
red-threshold = -0.3
out-dir = out
nearest-prior = true
";
        let o = parse_config(text, Path::new("/cfg")).unwrap();
        assert_eq!(
            o.prices,
            vec![PathBuf::from("/cfg/a.csv"), PathBuf::from("/cfg/b.csv")]
        );
        assert_eq!(o.sectors, Some(PathBuf::from("/cfg/s.csv")));
        assert_eq!(o.snapshot_dates.len(), 2);
        assert_eq!(o.band_width, Some(0.5));
        assert_eq!(o.nearest_prior, Some(true));
        assert_eq!(o.out_dir, Some(PathBuf::from("/cfg/out")));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(matches!(
            parse_config("colour = red", Path::new(".")),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("\nbaseline = yesterday", Path::new(".")),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_config("just words", Path::new(".")).is_err());
    }

    #[test]
    fn flags_override_file_and_env() {
        let file = Overrides {
            band_width: Some(0.5),
            out_dir: Some("from-file".into()),
            ..Default::default()
        };
        let flags = Overrides {
            band_width: Some(0.2),
            ..Default::default()
        };
        let cfg = resolve(Some(&file), &flags, Some("from-env".into())).unwrap();
        assert_eq!(cfg.band_width, 0.2);
        assert_eq!(cfg.out_dir, PathBuf::from("from-file"));

        let cfg = resolve(None, &Overrides::default(), Some("from-env".into())).unwrap();
        assert_eq!(cfg.out_dir, PathBuf::from("from-env"));
        assert_eq!(cfg.snapshot_dates.len(), 6);
    }

    #[test]
    fn validation() {
        let bad_dates = Overrides {
            baseline: Some("2008-10-10".parse().unwrap()),
            ..Default::default()
        };
        assert!(matches!(
            resolve(None, &bad_dates, None),
            Err(Error::Config(_))
        ));
        let bad_thresholds = Overrides {
            red_threshold: Some(-0.05),
            ..Default::default()
        };
        assert!(resolve(None, &bad_thresholds, None).is_err());
        let bad_width = Overrides {
            band_width: Some(0.0),
            ..Default::default()
        };
        assert!(resolve(None, &bad_width, None).is_err());
    }
}
