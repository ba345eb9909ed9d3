//! Price ingestion: per-series CSV loading, calendar alignment and log-returns.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// ISO-8601 calendar date, the format of Yahoo Finance exports.
pub const DEFAULT_DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}:{line}: {reason}")]
    UnparsableRow {
        path: PathBuf,
        line: u64,
        reason: String,
    },
    #[error("{path}: duplicate date {date}")]
    DuplicateDate { path: PathBuf, date: NaiveDate },
    #[error("{path}:{line}: close price must be strictly positive and finite, got {value}")]
    NonPositivePrice {
        path: PathBuf,
        line: u64,
        value: f64,
    },
    #[error("series `{0}` has no observations")]
    EmptySeries(String),
    #[error("no series to align")]
    NoSeries,
    #[error("series share no common trading dates")]
    EmptyIntersection,
    #[error("need at least 2 aligned prices to form a return, got {0}")]
    TooShort(usize),
    #[error("invalid manifest {path}: {reason}")]
    Manifest { path: PathBuf, reason: String },
}

pub type Result<T, E = IngestError> = std::result::Result<T, E>;

/// A single named closing-price series, sorted by date.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub name: String,
    pub dates: Vec<NaiveDate>,
    pub closes: Vec<f64>,
}

impl PriceSeries {
    /// Builds a series from unsorted `(date, close)` observations.
    ///
    /// Rows are sorted ascending; duplicate dates and non-positive closes are rejected.
    pub fn from_observations(
        name: impl Into<String>,
        mut rows: Vec<(NaiveDate, f64)>,
    ) -> Result<Self> {
        let name = name.into();
        let origin = PathBuf::from(&name);
        for (i, &(_, close)) in rows.iter().enumerate() {
            if !(close.is_finite() && close > 0.0) {
                return Err(IngestError::NonPositivePrice {
                    path: origin,
                    line: i as u64 + 1,
                    value: close,
                });
            }
        }
        rows.sort_by_key(|&(d, _)| d);
        if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(IngestError::DuplicateDate {
                path: origin,
                date: w[0].0,
            });
        }
        let (dates, closes) = rows.into_iter().unzip();
        Ok(Self {
            name,
            dates,
            closes,
        })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

/// Column selection and date parsing for one CSV file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvSchema {
    pub date_column: String,
    pub close_column: String,
    #[serde(default = "default_date_format")]
    pub date_format: String,
}

fn default_date_format() -> String {
    DEFAULT_DATE_FORMAT.to_string()
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            date_column: "Date".into(),
            close_column: "Close".into(),
            date_format: default_date_format(),
        }
    }
}

/// Loads one closing-price series from a headed CSV file.
pub fn load_csv(path: impl AsRef<Path>, name: &str, schema: &CsvSchema) -> Result<PriceSeries> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    parse_csv(&bytes, path, name, schema)
}

/// Parses CSV bytes; `origin` is only used for error messages.
pub fn parse_csv(
    bytes: &[u8],
    origin: &Path,
    name: &str,
    schema: &CsvSchema,
) -> Result<PriceSeries> {
    let unparsable = |line: u64, reason: String| IngestError::UnparsableRow {
        path: origin.to_path_buf(),
        line,
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let headers = reader
        .headers()
        .map_err(|e| unparsable(1, e.to_string()))?
        .clone();
    let column = |want: &str| {
        headers
            .iter()
            .position(|h| h == want)
            .ok_or_else(|| IngestError::MissingColumn {
                path: origin.to_path_buf(),
                column: want.to_string(),
            })
    };
    let date_idx = column(&schema.date_column)?;
    let close_idx = column(&schema.close_column)?;

    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            unparsable(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let raw_date = record.get(date_idx).unwrap_or_default();
        let raw_close = record.get(close_idx).unwrap_or_default();
        let date = NaiveDate::parse_from_str(raw_date, &schema.date_format)
            .map_err(|e| unparsable(line, format!("date `{raw_date}`: {e}")))?;
        let close: f64 = raw_close
            .parse()
            .map_err(|e| unparsable(line, format!("close `{raw_close}`: {e}")))?;
        if !(close.is_finite() && close > 0.0) {
            return Err(IngestError::NonPositivePrice {
                path: origin.to_path_buf(),
                line,
                value: close,
            });
        }
        if !seen.insert(date) {
            return Err(IngestError::DuplicateDate {
                path: origin.to_path_buf(),
                date,
            });
        }
        rows.push((date, close));
    }
    rows.sort_by_key(|&(d, _)| d);
    let (dates, closes) = rows.into_iter().unzip();
    Ok(PriceSeries {
        name: name.to_string(),
        dates,
        closes,
    })
}

/// How series with different trading calendars are put on one date axis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignPolicy {
    /// Keep only dates present in every series.
    #[default]
    Intersection,
    /// Union of dates from the latest series start onward, missing closes carried forward.
    ForwardFill,
}

/// Aligned closing prices over a shared, strictly increasing date axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceTable {
    dates: Vec<NaiveDate>,
    names: Vec<String>,
    closes: Vec<Vec<f64>>,
}

impl PriceTable {
    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Closing prices of series `i`, one per date.
    pub fn closes(&self, i: usize) -> &[f64] {
        &self.closes[i]
    }

    pub fn n_series(&self) -> usize {
        self.names.len()
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    /// Splits the table back into per-series lists.
    pub fn to_series(&self) -> Vec<PriceSeries> {
        self.names
            .iter()
            .zip(&self.closes)
            .map(|(name, closes)| PriceSeries {
                name: name.clone(),
                dates: self.dates.clone(),
                closes: closes.clone(),
            })
            .collect()
    }
}

/// Aligns series onto a common date axis.
pub fn align(series: &[PriceSeries], policy: AlignPolicy) -> Result<PriceTable> {
    if series.is_empty() {
        return Err(IngestError::NoSeries);
    }
    if let Some(s) = series.iter().find(|s| s.is_empty()) {
        return Err(IngestError::EmptySeries(s.name.clone()));
    }
    let lookups: Vec<BTreeMap<NaiveDate, f64>> = series
        .iter()
        .map(|s| {
            s.dates
                .iter()
                .copied()
                .zip(s.closes.iter().copied())
                .collect()
        })
        .collect();

    let (dates, closes) = match policy {
        AlignPolicy::Intersection => {
            let dates: Vec<NaiveDate> = lookups[0]
                .keys()
                .copied()
                .filter(|d| lookups[1..].iter().all(|m| m.contains_key(d)))
                .collect();
            let closes = lookups
                .iter()
                .map(|m| dates.iter().map(|d| m[d]).collect())
                .collect();
            (dates, closes)
        }
        AlignPolicy::ForwardFill => {
            let start = series.iter().map(|s| s.dates[0]).max().unwrap();
            let dates: Vec<NaiveDate> = series
                .iter()
                .flat_map(|s| s.dates.iter().copied())
                .filter(|&d| d >= start)
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let closes = lookups
                .iter()
                .map(|m| {
                    dates
                        .iter()
                        .map(|d| *m.range(..=d).next_back().unwrap().1)
                        .collect()
                })
                .collect();
            (dates, closes)
        }
    };
    if dates.is_empty() {
        return Err(IngestError::EmptyIntersection);
    }
    Ok(PriceTable {
        dates,
        names: series.iter().map(|s| s.name.clone()).collect(),
        closes,
    })
}

/// Log-returns of every series: `n` rows by `l - 1` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnMatrix {
    dates: Vec<NaiveDate>,
    names: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl ReturnMatrix {
    /// Builds a matrix directly from return rows (one row per series).
    ///
    /// Panics if the rows differ in length from `dates` or contain non-finite values.
    pub fn from_rows(dates: Vec<NaiveDate>, names: Vec<String>, rows: Vec<Vec<f64>>) -> Self {
        assert_eq!(names.len(), rows.len(), "one name per return row");
        for row in &rows {
            assert_eq!(row.len(), dates.len(), "return row length must match dates");
            assert!(row.iter().all(|r| r.is_finite()), "returns must be finite");
        }
        assert!(
            dates.windows(2).all(|w| w[0] < w[1]),
            "dates must be strictly increasing"
        );
        Self { dates, names, rows }
    }

    /// Date of each return (the later of the two prices).
    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn n_series(&self) -> usize {
        self.rows.len()
    }

    /// Number of return columns (`l - 1`).
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

/// `values[i][j] = ln(P[i][j + 1] / P[i][j])`.
pub fn log_returns(table: &PriceTable) -> Result<ReturnMatrix> {
    if table.len() < 2 {
        return Err(IngestError::TooShort(table.len()));
    }
    let rows = table
        .closes
        .iter()
        .map(|c| c.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
        .collect();
    Ok(ReturnMatrix {
        dates: table.dates[1..].to_vec(),
        names: table.names.clone(),
        rows,
    })
}

/// Basket definition: series name to CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub series: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub path: PathBuf,
    #[serde(default = "default_date_column")]
    pub date_column: String,
    #[serde(default = "default_close_column")]
    pub close_column: String,
    #[serde(default)]
    pub date_format: Option<String>,
}

fn default_date_column() -> String {
    "Date".into()
}

fn default_close_column() -> String {
    "Close".into()
}

impl ManifestEntry {
    pub fn schema(&self) -> CsvSchema {
        CsvSchema {
            date_column: self.date_column.clone(),
            close_column: self.close_column.clone(),
            date_format: self.date_format.clone().unwrap_or_else(default_date_format),
        }
    }
}

impl Manifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let manifest: Manifest =
            serde_json::from_str(&text).map_err(|e| IngestError::Manifest {
                path: path.to_path_buf(),
                reason: e.to_string(),
            })?;
        if manifest.series.is_empty() {
            return Err(IngestError::Manifest {
                path: path.to_path_buf(),
                reason: "`series` is empty".into(),
            });
        }
        Ok(manifest)
    }

    /// Resolves each entry's path against `base` (normally the manifest's directory).
    pub fn resolve_path(&self, base: &Path, entry: &ManifestEntry) -> PathBuf {
        if entry.path.is_absolute() {
            entry.path.clone()
        } else {
            base.join(&entry.path)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, DEFAULT_DATE_FORMAT).unwrap()
    }

    fn parse(text: &str) -> Result<PriceSeries> {
        parse_csv(
            text.as_bytes(),
            Path::new("t.csv"),
            "t",
            &CsvSchema::default(),
        )
    }

    fn series(name: &str, rows: &[(&str, f64)]) -> PriceSeries {
        PriceSeries::from_observations(name, rows.iter().map(|&(s, c)| (d(s), c)).collect())
            .unwrap()
    }

    #[test]
    fn parses_in_order() {
        let s = parse("Date,Close\n2020-01-02,100.0\n2020-01-03,101.0\n").unwrap();
        assert_eq!(s.dates, vec![d("2020-01-02"), d("2020-01-03")]);
        assert_eq!(s.closes, vec![100.0, 101.0]);
    }

    #[test]
    fn sorts_out_of_order_rows() {
        let s = parse("Date,Open,Close\n2020-01-03,1,101.0\n2020-01-02,1,100.0\n").unwrap();
        assert_eq!(s.dates, vec![d("2020-01-02"), d("2020-01-03")]);
        assert_eq!(s.closes, vec![100.0, 101.0]);
    }

    #[test]
    fn rejects_zero_close() {
        let err = parse("Date,Close\n2020-01-02,100.0\n2020-01-03,0.0\n").unwrap_err();
        assert!(
            matches!(err, IngestError::NonPositivePrice { line: 3, .. }),
            "{err}"
        );
    }

    #[test]
    fn rejects_duplicates_and_reports_lines() {
        let err = parse("Date,Close\n2020-01-02,1\n2020-01-02,2\n").unwrap_err();
        assert!(matches!(err, IngestError::DuplicateDate { .. }));
        let err = parse("Date,Close\n2020-01-02,1\n2020-01-03,abc\n").unwrap_err();
        assert!(
            matches!(err, IngestError::UnparsableRow { line: 3, .. }),
            "{err}"
        );
        let err = parse("Day,Close\n2020-01-02,1\n").unwrap_err();
        assert!(matches!(err, IngestError::MissingColumn { ref column, .. } if column == "Date"));
    }

    #[test]
    fn custom_date_format() {
        let schema = CsvSchema {
            date_column: "d".into(),
            close_column: "adj".into(),
            date_format: "%d/%m/%Y".into(),
        };
        let s = parse_csv(b"d,adj\n03/01/2020,5\n", Path::new("x"), "x", &schema).unwrap();
        assert_eq!(s.dates, vec![d("2020-01-03")]);
    }

    #[test]
    fn align_identity_and_intersection() {
        let a = series(
            "a",
            &[
                ("2020-01-01", 1.0),
                ("2020-01-02", 2.0),
                ("2020-01-03", 3.0),
            ],
        );
        let b = series(
            "b",
            &[
                ("2020-01-02", 5.0),
                ("2020-01-03", 6.0),
                ("2020-01-04", 7.0),
            ],
        );
        let t = align(&[a.clone(), a.clone()], AlignPolicy::Intersection).unwrap();
        assert_eq!(t.dates(), &a.dates[..]);

        let t = align(&[a, b], AlignPolicy::Intersection).unwrap();
        assert_eq!(t.dates(), &[d("2020-01-02"), d("2020-01-03")]);
        assert_eq!(t.closes(0), &[2.0, 3.0]);
        assert_eq!(t.closes(1), &[5.0, 6.0]);
    }

    #[test]
    fn align_disjoint_is_error() {
        let a = series("a", &[("2020-01-01", 1.0)]);
        let b = series("b", &[("2020-01-02", 1.0)]);
        assert!(matches!(
            align(&[a, b], AlignPolicy::Intersection),
            Err(IngestError::EmptyIntersection)
        ));
        assert!(matches!(
            align(&[], AlignPolicy::Intersection),
            Err(IngestError::NoSeries)
        ));
    }

    #[test]
    fn forward_fill_carries_last_close() {
        let a = series(
            "a",
            &[
                ("2020-01-01", 1.0),
                ("2020-01-02", 2.0),
                ("2020-01-04", 4.0),
            ],
        );
        let b = series("b", &[("2020-01-02", 5.0), ("2020-01-03", 6.0)]);
        let t = align(&[a, b], AlignPolicy::ForwardFill).unwrap();
        assert_eq!(
            t.dates(),
            &[d("2020-01-02"), d("2020-01-03"), d("2020-01-04")]
        );
        assert_eq!(t.closes(0), &[2.0, 2.0, 4.0]);
        assert_eq!(t.closes(1), &[5.0, 6.0, 6.0]);
    }

    #[test]
    fn log_return_examples() {
        let e = std::f64::consts::E;
        let table = |closes: &[f64]| {
            let days = ["2020-01-01", "2020-01-02", "2020-01-03"];
            let rows = days
                .iter()
                .zip(closes)
                .map(|(s, &c)| (*s, c))
                .collect::<Vec<_>>();
            align(&[series("s", &rows)], AlignPolicy::Intersection).unwrap()
        };
        assert_eq!(log_returns(&table(&[100.0, 100.0])).unwrap().row(0), &[0.0]);
        assert!((log_returns(&table(&[100.0, 100.0 * e])).unwrap().row(0)[0] - 1.0).abs() < 1e-15);
        let r = log_returns(&table(&[2.0, 4.0, 2.0])).unwrap();
        let ln2 = 2f64.ln();
        assert!((r.row(0)[0] - ln2).abs() < 1e-15);
        assert!((r.row(0)[1] + ln2).abs() < 1e-15);
        assert_eq!(r.dates(), &[d("2020-01-02"), d("2020-01-03")]);
        assert!(matches!(
            log_returns(&table(&[2.0])),
            Err(IngestError::TooShort(1))
        ));
    }
}
