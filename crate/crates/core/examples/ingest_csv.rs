//! Writes a small basket of price CSVs, reads it back through a manifest,
//! aligns the calendars and prints the first log-returns.

use tda_core::ingest::{align, load_csv, log_returns, AlignPolicy, Manifest};
use tda_core::synth::MarketScenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let manifest_path = MarketScenario {
        len: 30,
        ..MarketScenario::default()
    }
    .write_basket(dir.path())?;
    println!("manifest at {}", manifest_path.display());

    let manifest = Manifest::load(&manifest_path)?;
    let mut series = Vec::new();
    for entry in &manifest.series {
        let path = manifest.resolve_path(dir.path(), entry);
        series.push(load_csv(&path, &entry.name, &entry.schema())?);
    }
    // drop a day from one series to show the two alignment policies
    series[1].dates.remove(5);
    series[1].closes.remove(5);

    for policy in [AlignPolicy::Intersection, AlignPolicy::ForwardFill] {
        let table = align(&series, policy)?;
        println!("{policy:?}: {} aligned days", table.len());
    }

    let returns = log_returns(&align(&series, AlignPolicy::Intersection)?)?;
    println!("date        {}", returns.names().join("      "));
    for t in 0..5 {
        let row: Vec<String> = (0..returns.n_series())
            .map(|i| format!("{:+.5}", returns.row(i)[t]))
            .collect();
        println!("{}  {}", returns.dates()[t], row.join("  "));
    }
    Ok(())
}
