//! End-to-end analysis: returns → windows → diagrams → signals → detection,
//! plus the file-based `run` used by the command-line tool.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cloud::{build_cloud, windows, CloudError, PointCloud, WindowSpec, DEFAULT_WINDOW};
use crate::detect::{
    classify_events, elevated_periods, threshold, DetectError, ElevatedRules, Episode, EventRules,
    EventSummary, Quorum, SignalKind, SignalParams, SignalSeries, ThresholdReport, DEFAULT_MIN_RUN,
    ELEVATED_K_SIGMA, EXTREME_K_SIGMA,
};
use crate::fmt::sig17;
use crate::ingest::{
    align, load_csv, log_returns, AlignPolicy, IngestError, Manifest, ReturnMatrix,
};
use crate::landscape::{build_landscape, lp_norm, LpNorm};
use crate::persistence::{cloud_diagrams, CloudDiagrams, HomologyOptions, Reduction};
use crate::rips::{RipsError, DEFAULT_MAXDIM, MAX_SIMPLEX_DIM};
use crate::wasserstein::{consecutive_distances, WassersteinError, DEFAULT_DEGREE};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("input error: {0}")]
    Input(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl RunError {
    /// Process exit status: 1 input, 2 config, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Input(_) => 1,
            RunError::Config(_) => 2,
            RunError::Internal(_) => 3,
        }
    }
}

impl From<IngestError> for RunError {
    fn from(e: IngestError) -> Self {
        RunError::Input(e.to_string())
    }
}

impl From<CloudError> for RunError {
    fn from(e: CloudError) -> Self {
        RunError::Config(e.to_string())
    }
}

impl From<RipsError> for RunError {
    fn from(e: RipsError) -> Self {
        RunError::Config(e.to_string())
    }
}

impl From<WassersteinError> for RunError {
    fn from(e: WassersteinError) -> Self {
        RunError::Internal(e.to_string())
    }
}

impl From<DetectError> for RunError {
    fn from(e: DetectError) -> Self {
        RunError::Internal(e.to_string())
    }
}

/// Every knob of one analysis. Serialized as a single JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub manifest: PathBuf,
    pub out: PathBuf,
    pub window: usize,
    pub step: usize,
    pub maxdim: usize,
    /// Homology dimension the signals are computed on.
    pub homology_dim: usize,
    pub wasserstein_p: f64,
    pub norms: Vec<LpNorm>,
    pub k_sigma: f64,
    pub elevated_k_sigma: f64,
    pub min_run: usize,
    pub quorum: Quorum,
    pub merge_gap_days: i64,
    pub align: AlignPolicy,
    /// Z-score each coordinate over the full cloud before windowing.
    pub standardize: bool,
    pub reduction: Reduction,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            manifest: PathBuf::from("manifest.json"),
            out: PathBuf::from("out"),
            window: DEFAULT_WINDOW,
            step: 1,
            maxdim: DEFAULT_MAXDIM,
            homology_dim: 1,
            wasserstein_p: DEFAULT_DEGREE,
            norms: vec![LpNorm::L1, LpNorm::L2],
            k_sigma: EXTREME_K_SIGMA,
            elevated_k_sigma: ELEVATED_K_SIGMA,
            min_run: DEFAULT_MIN_RUN,
            quorum: Quorum::Any,
            merge_gap_days: EventRules::default().merge_gap_days,
            align: AlignPolicy::Intersection,
            standardize: false,
            reduction: Reduction::Cohomology,
            threads: 1,
        }
    }
}

impl RunConfig {
    /// Reads a JSON config. Relative `manifest` and `out` paths are taken
    /// relative to the config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, RunError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
        let mut config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
        if let Some(base) = path.parent() {
            config.manifest = base.join(&config.manifest);
            config.out = base.join(&config.out);
        }
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |msg: String| Err(RunError::Config(msg));
        if self.window < 2 {
            return bad(format!("window must be at least 2, got {}", self.window));
        }
        if self.step == 0 {
            return bad("step must be positive".into());
        }
        if !(1..=MAX_SIMPLEX_DIM).contains(&self.maxdim) {
            return bad(format!(
                "maxdim must be in 1..={MAX_SIMPLEX_DIM}, got {}",
                self.maxdim
            ));
        }
        if self.homology_dim > 1 {
            return bad(format!(
                "homology_dim must be 0 or 1, got {}",
                self.homology_dim
            ));
        }
        if self.homology_dim + 1 > self.maxdim {
            return bad(format!(
                "homology_dim {} needs maxdim >= {}",
                self.homology_dim,
                self.homology_dim + 1
            ));
        }
        if !(self.wasserstein_p.is_finite() && self.wasserstein_p >= 1.0) {
            return bad(format!(
                "wasserstein_p must be >= 1, got {}",
                self.wasserstein_p
            ));
        }
        for (name, k) in [
            ("k_sigma", self.k_sigma),
            ("elevated_k_sigma", self.elevated_k_sigma),
        ] {
            if !(k.is_finite() && k > 0.0) {
                return bad(format!("{name} must be positive, got {k}"));
            }
        }
        if self.min_run == 0 {
            return bad("min_run must be positive".into());
        }
        if self.merge_gap_days < 0 {
            return bad("merge_gap_days must be non-negative".into());
        }
        if self.threads == 0 {
            return bad("threads must be positive".into());
        }
        Ok(())
    }

    pub fn window_spec(&self) -> WindowSpec {
        WindowSpec::new(self.window, self.step)
    }

    pub fn homology(&self) -> HomologyOptions {
        HomologyOptions {
            maxdim: self.maxdim,
            threshold: None,
            reduction: self.reduction,
        }
    }

    pub fn event_rules(&self) -> EventRules {
        EventRules {
            quorum: self.quorum,
            merge_gap_days: self.merge_gap_days,
        }
    }

    pub fn elevated_rules(&self) -> ElevatedRules {
        ElevatedRules {
            k_sigma: self.elevated_k_sigma,
            event_k_sigma: self.k_sigma,
            min_run: self.min_run,
        }
    }
}

/// Diagrams and norms of one window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSummary {
    pub start: usize,
    pub end_date: chrono::NaiveDate,
    pub diagrams: CloudDiagrams,
    pub norms: Vec<(LpNorm, f64)>,
}

/// Threshold report and post-event stress periods of one signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalDetection {
    pub kind: SignalKind,
    pub params: SignalParams,
    pub report: ThresholdReport,
    pub elevated_threshold: f64,
    pub elevated_periods: Vec<Episode>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub windows: Vec<WindowSummary>,
    pub signals: Vec<SignalSeries>,
    pub detections: Vec<SignalDetection>,
    pub events: EventSummary,
}

impl Analysis {
    pub fn signal(&self, kind: SignalKind) -> Option<&SignalSeries> {
        self.signals.iter().find(|s| s.kind == kind)
    }

    pub fn detection(&self, kind: SignalKind) -> Option<&SignalDetection> {
        self.detections.iter().find(|d| d.kind == kind)
    }
}

fn in_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| RunError::Internal(e.to_string()))?;
    Ok(pool.install(job))
}

/// Runs windows, homology, signals and detection over an in-memory return matrix.
pub fn analyze(returns: &ReturnMatrix, config: &RunConfig) -> Result<Analysis, RunError> {
    config.validate()?;
    let mut cloud: PointCloud = build_cloud(returns);
    if config.standardize {
        cloud = cloud.standardized();
    }
    let spec = config.window_spec();
    let slices = windows(&cloud, spec)?;
    let homology = config.homology();
    let dim = config.homology_dim;

    let summaries: Vec<WindowSummary> = in_pool(config.threads, || {
        slices
            .par_iter()
            .map(|w| {
                let diagrams = cloud_diagrams(&w.cloud, &homology)?;
                let landscape = build_landscape(&diagrams.finite(dim));
                let norms = config
                    .norms
                    .iter()
                    .map(|&n| (n, lp_norm(&landscape, n).value))
                    .collect();
                Ok(WindowSummary {
                    start: w.start,
                    end_date: returns.dates()[w.end()],
                    diagrams,
                    norms,
                })
            })
            .collect::<Result<Vec<_>, RipsError>>()
    })??;

    let times: Vec<_> = summaries.iter().map(|w| w.end_date).collect();
    let mut signals = Vec::new();
    for (i, &norm) in config.norms.iter().enumerate() {
        let kind = match norm {
            LpNorm::L1 => SignalKind::L1,
            LpNorm::L2 => SignalKind::L2,
        };
        let values = summaries.iter().map(|w| w.norms[i].1).collect();
        let params = SignalParams {
            window: spec.size,
            p: f64::from(norm.p()),
            homology_dim: dim,
        };
        signals.push(SignalSeries::new(kind, times.clone(), values, params)?);
    }
    if summaries.len() >= 2 {
        let finite: Vec<_> = summaries.iter().map(|w| w.diagrams.finite(dim)).collect();
        let values = in_pool(config.threads, || {
            consecutive_distances(&finite, config.wasserstein_p)
        })??;
        let params = SignalParams {
            window: spec.size,
            p: config.wasserstein_p,
            homology_dim: dim,
        };
        signals.push(SignalSeries::new(
            SignalKind::Wd,
            times[1..].to_vec(),
            values,
            params,
        )?);
    }

    let mut detections = Vec::new();
    for s in signals.iter().filter(|s| s.len() >= 2) {
        let report = threshold(s, config.k_sigma)?;
        let elevated = config.elevated_rules();
        let elevated_threshold = threshold(s, elevated.k_sigma)?.threshold;
        let periods = if s.len() >= elevated.min_run {
            elevated_periods(s, &elevated)?
        } else {
            Vec::new()
        };
        detections.push(SignalDetection {
            kind: s.kind,
            params: s.params,
            report,
            elevated_threshold,
            elevated_periods: periods,
        });
    }
    let reports: Vec<ThresholdReport> = detections.iter().map(|d| d.report.clone()).collect();
    let events = classify_events(&reports, &config.event_rules());
    Ok(Analysis {
        windows: summaries,
        signals,
        detections,
        events,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub name: String,
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub version: String,
    pub config: RunConfig,
    pub inputs: Vec<InputRecord>,
    pub aligned_days: usize,
    pub points: usize,
    pub windows: usize,
}

#[derive(Serialize)]
struct DetectionDocument<'a> {
    signals: &'a [SignalDetection],
    events: &'a EventSummary,
}

/// What a finished `run` produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub metadata: RunMetadata,
    pub artifacts: Vec<PathBuf>,
    pub analysis: Analysis,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Loads the manifest's series, aligns them and computes log-returns.
pub fn load_returns(
    config: &RunConfig,
) -> Result<(ReturnMatrix, Vec<InputRecord>, usize), RunError> {
    let manifest = Manifest::load(&config.manifest)?;
    let base = config
        .manifest
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_default();
    let mut series = Vec::new();
    let mut inputs = Vec::new();
    for entry in &manifest.series {
        let path = manifest.resolve_path(&base, entry);
        let bytes = fs::read(&path).map_err(|source| IngestError::Io {
            path: path.clone(),
            source,
        })?;
        inputs.push(InputRecord {
            name: entry.name.clone(),
            path: entry.path.clone(),
            sha256: sha256_hex(&bytes),
        });
        series.push(load_csv(&path, &entry.name, &entry.schema())?);
    }
    let table = align(&series, config.align)?;
    Ok((log_returns(&table)?, inputs, table.len()))
}

/// Full file-based run: reads the manifest and writes every artifact into `config.out`.
pub fn run(config: &RunConfig) -> Result<RunOutcome, RunError> {
    config.validate()?;
    let (returns, inputs, aligned_days) = load_returns(config)?;
    let analysis = analyze(&returns, config)?;
    let metadata = RunMetadata {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        inputs,
        aligned_days,
        points: returns.len(),
        windows: analysis.windows.len(),
    };
    let artifacts = write_artifacts(&config.out, config, &analysis, &metadata)
        .map_err(|e| RunError::Input(format!("{}: {e}", config.out.display())))?;
    Ok(RunOutcome {
        metadata,
        artifacts,
        analysis,
    })
}

fn write_artifacts(
    out: &Path,
    config: &RunConfig,
    analysis: &Analysis,
    metadata: &RunMetadata,
) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    let mut written = Vec::new();
    let mut create = |name: &str| -> std::io::Result<BufWriter<fs::File>> {
        let path = out.join(name);
        written.push(path.clone());
        Ok(BufWriter::new(fs::File::create(path)?))
    };

    let mut f = create("diagrams.csv")?;
    writeln!(f, "window_start,dim,birth,death,essential")?;
    for w in &analysis.windows {
        for dim in 0..w.diagrams.diagrams.len() {
            w.diagrams.finite(dim).write_csv_rows(&mut f, w.start)?;
        }
    }
    f.flush()?;

    let mut f = create("norms.csv")?;
    let header: Vec<&str> = config
        .norms
        .iter()
        .map(|n| match n {
            LpNorm::L1 => "L1",
            LpNorm::L2 => "L2",
        })
        .collect();
    writeln!(f, "date,window_start,{}", header.join(","))?;
    for w in &analysis.windows {
        let values: Vec<String> = w.norms.iter().map(|(_, v)| sig17(*v)).collect();
        writeln!(f, "{},{},{}", w.end_date, w.start, values.join(","))?;
    }
    f.flush()?;

    let mut f = create("wasserstein.csv")?;
    writeln!(f, "date,value")?;
    if let Some(wd) = analysis.signal(SignalKind::Wd) {
        for (t, v) in wd.times().iter().zip(wd.values()) {
            writeln!(f, "{},{}", t, sig17(*v))?;
        }
    }
    f.flush()?;

    for d in &analysis.detections {
        let series = analysis.signal(d.kind).expect("detection has a signal");
        let mut f = create(&format!("signal_{}.csv", d.kind.label()))?;
        series.write_csv(&mut f, &d.report)?;
        f.flush()?;
    }

    let mut f = create("detection.json")?;
    let doc = DetectionDocument {
        signals: &analysis.detections,
        events: &analysis.events,
    };
    serde_json::to_writer_pretty(&mut f, &doc)?;
    writeln!(f)?;
    f.flush()?;

    let mut f = create("run_metadata.json")?;
    serde_json::to_writer_pretty(&mut f, metadata)?;
    writeln!(f)?;
    f.flush()?;
    Ok(written)
}

/// Diagrams of the four-point square `{(2,2), (2,6), (6,2), (6,6)}` scaled by `scale`, one bar per line.
pub fn square_demo(scale: f64) -> Result<String, RunError> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(RunError::Config(format!(
            "scale must be positive, got {scale}"
        )));
    }
    let square =
        PointCloud::from_points(&[[2.0, 2.0], [2.0, 6.0], [6.0, 2.0], [6.0, 6.0]]).scaled(scale);
    let dgms = cloud_diagrams(&square, &HomologyOptions::default())?;
    let mut text = String::new();
    for d in &dgms.diagrams {
        for p in d.points() {
            text.push_str(&format!("H{} ({}, {})\n", d.dim, p.birth, p.death));
        }
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::MarketScenario;

    #[test]
    fn config_round_trips_and_defaults() {
        let c = RunConfig::default();
        let back: RunConfig = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
        let partial: RunConfig =
            serde_json::from_str(r#"{"window": 30, "norms": ["L2"]}"#).unwrap();
        assert_eq!(partial.window, 30);
        assert_eq!(partial.norms, vec![LpNorm::L2]);
        assert_eq!(partial.k_sigma, 4.0);
        assert!(serde_json::from_str::<RunConfig>(r#"{"windw": 30}"#).is_err());
    }

    #[test]
    fn validation() {
        let bad = RunConfig {
            homology_dim: 1,
            maxdim: 1,
            ..RunConfig::default()
        };
        assert_eq!(bad.validate().unwrap_err().exit_code(), 2);
        let bad = RunConfig {
            wasserstein_p: 0.5,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(RunConfig::default().validate().is_ok());
    }

    #[test]
    fn analysis_lengths() {
        let returns = MarketScenario {
            len: 90,
            ..MarketScenario::default()
        }
        .returns();
        let config = RunConfig {
            window: 20,
            ..RunConfig::default()
        };
        let a = analyze(&returns, &config).unwrap();
        assert_eq!(a.windows.len(), 90 - 20 + 1);
        assert_eq!(a.signal(SignalKind::L1).unwrap().len(), 71);
        assert_eq!(a.signal(SignalKind::Wd).unwrap().len(), 70);
        assert_eq!(
            a.signal(SignalKind::Wd).unwrap().times()[0],
            a.windows[1].end_date
        );
        assert_eq!(a.windows[0].end_date, returns.dates()[19]);
    }

    #[test]
    fn window_too_large_is_config_error() {
        let returns = MarketScenario {
            len: 30,
            ..MarketScenario::default()
        }
        .returns();
        let err = analyze(&returns, &RunConfig::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("exceeds"));
    }

    #[test]
    fn threads_do_not_change_results() {
        let returns = MarketScenario {
            len: 80,
            ..MarketScenario::crash(2)
        }
        .returns();
        let one = analyze(
            &returns,
            &RunConfig {
                window: 25,
                ..RunConfig::default()
            },
        )
        .unwrap();
        let four = analyze(
            &returns,
            &RunConfig {
                window: 25,
                threads: 4,
                ..RunConfig::default()
            },
        )
        .unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn demo_output() {
        let text = square_demo(1.0).unwrap();
        assert_eq!(
            text,
            "H0 (0, 4)\nH0 (0, 4)\nH0 (0, 4)\nH0 (0, inf)\nH1 (4, 5.656854249492381)\n"
        );
        let half = square_demo(0.5).unwrap();
        assert!(half.ends_with("H1 (2, 2.8284271247461903)\n"), "{half}");
        assert_eq!(square_demo(1.0).unwrap(), text);
        assert!(square_demo(0.0).is_err());
    }
}
