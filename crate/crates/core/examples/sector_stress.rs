//! Elevated-stress periods after a crash, with and without a high-volatility aftermath.
//!
//!     cargo run --release --example sector_stress -- [seed]

use tda_core::detect::SignalKind;
use tda_core::pipeline::{analyze, RunConfig};
use tda_core::synth::MarketScenario;

fn main() {
    let seed: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().unwrap())
        .unwrap_or(0);
    let config = RunConfig::default();

    for scenario in [
        MarketScenario::crash(seed),
        MarketScenario::crash_with_aftershock(seed),
    ] {
        let label = if scenario.aftershock.is_some() {
            "with aftermath"
        } else {
            "crash only"
        };
        let a = analyze(&scenario.returns(), &config).unwrap();
        println!("{label}:");
        for kind in [SignalKind::L1, SignalKind::L2, SignalKind::Wd] {
            let d = a.detection(kind).unwrap();
            let periods: Vec<String> = d
                .elevated_periods
                .iter()
                .map(|e| format!("{}..{} ({} windows)", e.start, e.end, e.len()))
                .collect();
            println!(
                "  {:>2} above {:.3e}: {}",
                kind.label(),
                d.elevated_threshold,
                if periods.is_empty() {
                    "none".to_string()
                } else {
                    periods.join(", ")
                }
            );
        }
    }
}
