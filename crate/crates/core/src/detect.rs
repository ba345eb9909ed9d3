//! Mean-plus-k-sigma thresholds, extreme-event labelling and post-event stress periods.

use std::collections::BTreeSet;
use std::io::{self, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fmt::sig17;

/// Sigma multiplier for extreme events.
pub const EXTREME_K_SIGMA: f64 = 4.0;
/// Sigma multiplier for post-event stress.
pub const ELEVATED_K_SIGMA: f64 = 2.0;
pub const DEFAULT_MIN_RUN: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum DetectError {
    #[error("signal series needs at least {needed} values, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("sigma multiplier must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("signal series invalid: {0}")]
    InvalidSeries(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SignalKind {
    L1,
    L2,
    #[serde(rename = "WD")]
    Wd,
}

impl SignalKind {
    pub fn label(self) -> &'static str {
        match self {
            SignalKind::L1 => "L1",
            SignalKind::L2 => "L2",
            SignalKind::Wd => "WD",
        }
    }
}

/// Pipeline settings a signal was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalParams {
    pub window: usize,
    /// Wasserstein degree, or the landscape norm's p.
    pub p: f64,
    pub homology_dim: usize,
}

/// Dated scalar summary of each window (or each consecutive window pair).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSeries {
    pub kind: SignalKind,
    times: Vec<NaiveDate>,
    values: Vec<f64>,
    pub params: SignalParams,
}

impl SignalSeries {
    pub fn new(
        kind: SignalKind,
        times: Vec<NaiveDate>,
        values: Vec<f64>,
        params: SignalParams,
    ) -> Result<Self, DetectError> {
        if times.len() != values.len() {
            return Err(DetectError::InvalidSeries(
                "times and values differ in length",
            ));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(DetectError::InvalidSeries(
                "times must be strictly increasing",
            ));
        }
        if !values.iter().all(|v| v.is_finite() && *v >= 0.0) {
            return Err(DetectError::InvalidSeries(
                "values must be finite and non-negative",
            ));
        }
        Ok(Self {
            kind,
            times,
            values,
            params,
        })
    }

    pub fn times(&self) -> &[NaiveDate] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Population mean and standard deviation.
    pub fn mean_std(&self) -> (f64, f64) {
        let n = self.values.len() as f64;
        let mean = self.values.iter().sum::<f64>() / n;
        let var = self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    }

    /// Writes `date,value,mean,threshold,crossing` rows against `report`.
    pub fn write_csv<W: Write>(&self, mut out: W, report: &ThresholdReport) -> io::Result<()> {
        writeln!(out, "date,value,mean,threshold,crossing")?;
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(
                out,
                "{},{},{},{},{}",
                t,
                sig17(*v),
                sig17(report.mean),
                sig17(report.threshold),
                u8::from(*v > report.threshold)
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub index: usize,
    pub date: NaiveDate,
    pub value: f64,
}

/// Maximal run of consecutive series entries above a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub start_index: usize,
    pub end_index: usize,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub peak: f64,
}

impl Episode {
    pub fn len(&self) -> usize {
        self.end_index - self.start_index + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub kind: SignalKind,
    pub mean: f64,
    pub std_dev: f64,
    pub k_sigma: f64,
    pub threshold: f64,
    pub crossings: Vec<Crossing>,
    pub episodes: Vec<Episode>,
}

fn runs_above(series: &SignalSeries, level: f64, from: usize) -> Vec<Episode> {
    let mut episodes: Vec<Episode> = Vec::new();
    for (i, &v) in series.values.iter().enumerate().skip(from) {
        if v <= level {
            continue;
        }
        match episodes.last_mut() {
            Some(e) if e.end_index + 1 == i => {
                e.end_index = i;
                e.end = series.times[i];
                e.peak = e.peak.max(v);
            }
            _ => episodes.push(Episode {
                start_index: i,
                end_index: i,
                start: series.times[i],
                end: series.times[i],
                peak: v,
            }),
        }
    }
    episodes
}

/// Flags values strictly above `μ + k·σ` of the whole series.
pub fn threshold(series: &SignalSeries, k_sigma: f64) -> Result<ThresholdReport, DetectError> {
    if series.len() < 2 {
        return Err(DetectError::SeriesTooShort {
            needed: 2,
            got: series.len(),
        });
    }
    if !(k_sigma.is_finite() && k_sigma > 0.0) {
        return Err(DetectError::InvalidSigma(k_sigma));
    }
    let (mean, std_dev) = series.mean_std();
    let level = mean + k_sigma * std_dev;
    let crossings = series
        .values
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v > level)
        .map(|(index, &value)| Crossing {
            index,
            date: series.times[index],
            value,
        })
        .collect();
    Ok(ThresholdReport {
        kind: series.kind,
        mean,
        std_dev,
        k_sigma,
        threshold: level,
        crossings,
        episodes: runs_above(series, level, 0),
    })
}

/// How many signal kinds must agree before an episode is labelled an extreme event.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quorum {
    #[default]
    Any,
    Majority,
    All,
}

impl Quorum {
    fn satisfied(self, supporting: usize, total: usize) -> bool {
        match self {
            Quorum::Any => supporting >= 1,
            Quorum::Majority => 2 * supporting > total,
            Quorum::All => supporting == total && total > 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventRules {
    pub quorum: Quorum,
    /// Episodes from different signals separated by at most this many calendar days are merged.
    pub merge_gap_days: i64,
}

impl Default for EventRules {
    fn default() -> Self {
        Self {
            quorum: Quorum::Any,
            merge_gap_days: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub kind: SignalKind,
    pub dates: Vec<NaiveDate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremeEvent {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub supports: Vec<Support>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EventSummary {
    pub events: Vec<ExtremeEvent>,
}

/// Merges threshold episodes of all signals into dated events and applies the quorum.
pub fn classify_events(reports: &[ThresholdReport], rules: &EventRules) -> EventSummary {
    let mut spans: Vec<(NaiveDate, NaiveDate, usize, &Episode)> = reports
        .iter()
        .enumerate()
        .flat_map(|(r, rep)| rep.episodes.iter().map(move |e| (e.start, e.end, r, e)))
        .collect();
    spans.sort_by_key(|s| (s.0, s.1, s.2));

    let mut groups: Vec<(NaiveDate, NaiveDate, Vec<(usize, &Episode)>)> = Vec::new();
    for (start, end, r, e) in spans {
        match groups.last_mut() {
            Some(g) if (start - g.1).num_days() <= rules.merge_gap_days => {
                g.1 = g.1.max(end);
                g.2.push((r, e));
            }
            _ => groups.push((start, end, vec![(r, e)])),
        }
    }

    let distinct_kinds = reports
        .iter()
        .map(|r| r.kind)
        .collect::<BTreeSet<_>>()
        .len();
    let events = groups
        .into_iter()
        .filter_map(|(start, end, members)| {
            let mut supports: Vec<Support> = Vec::new();
            for (r, e) in members {
                let rep = &reports[r];
                let dates = rep
                    .crossings
                    .iter()
                    .filter(|c| c.index >= e.start_index && c.index <= e.end_index)
                    .map(|c| c.date);
                match supports.iter_mut().find(|s| s.kind == rep.kind) {
                    Some(s) => s.dates.extend(dates),
                    None => supports.push(Support {
                        kind: rep.kind,
                        dates: dates.collect(),
                    }),
                }
            }
            for s in &mut supports {
                s.dates.sort();
                s.dates.dedup();
            }
            supports.sort_by_key(|s| s.kind);
            rules
                .quorum
                .satisfied(supports.len(), distinct_kinds)
                .then_some(ExtremeEvent {
                    start,
                    end,
                    supports,
                })
        })
        .collect();
    EventSummary { events }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElevatedRules {
    pub k_sigma: f64,
    /// Multiplier defining the extreme event that opens the search.
    pub event_k_sigma: f64,
    pub min_run: usize,
}

impl Default for ElevatedRules {
    fn default() -> Self {
        Self {
            k_sigma: ELEVATED_K_SIGMA,
            event_k_sigma: EXTREME_K_SIGMA,
            min_run: DEFAULT_MIN_RUN,
        }
    }
}

/// Runs of at least `min_run` values above `μ + k·σ` located after the last extreme episode.
///
/// Empty when the series has no extreme episode.
pub fn elevated_periods(
    series: &SignalSeries,
    rules: &ElevatedRules,
) -> Result<Vec<Episode>, DetectError> {
    let min_run = rules.min_run.max(1);
    if series.len() < min_run.max(2) {
        return Err(DetectError::SeriesTooShort {
            needed: min_run.max(2),
            got: series.len(),
        });
    }
    let extreme = threshold(series, rules.event_k_sigma)?;
    let Some(last) = extreme.episodes.last() else {
        return Ok(Vec::new());
    };
    let elevated = threshold(series, rules.k_sigma)?;
    Ok(runs_above(series, elevated.threshold, last.end_index + 1)
        .into_iter()
        .filter(|e| e.len() >= min_run)
        .collect())
}
