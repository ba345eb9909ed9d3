//! File-based run: synthetic CSVs and a manifest in, CSV and JSON artifacts out.
//!
//!     cargo run --release --example full_pipeline -- /tmp/tda-out

use std::path::PathBuf;

use tda_core::pipeline::{run, RunConfig};
use tda_core::synth::MarketScenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("tda-example"));
    let manifest = MarketScenario::crash(1).write_basket(root.join("data"))?;

    let config = RunConfig {
        manifest,
        out: root.join("out"),
        threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        ..RunConfig::default()
    };
    std::fs::write(root.join("config.json"), config.to_json())?;

    let outcome = run(&config)?;
    println!(
        "{} aligned days, {} windows, {} extreme events",
        outcome.metadata.aligned_days,
        outcome.metadata.windows,
        outcome.analysis.events.events.len()
    );
    for p in &outcome.artifacts {
        println!("  {} ({} bytes)", p.display(), std::fs::metadata(p)?.len());
    }
    println!(
        "rerun with: tda run --config {}",
        root.join("config.json").display()
    );
    Ok(())
}
