//! Sliding-window signals on a synthetic four-index market with a ten-day crash.
//!
//!     cargo run --release --example synthetic_crash -- [seed] [homology dim]

use tda_core::detect::SignalKind;
use tda_core::pipeline::{analyze, RunConfig};
use tda_core::synth::MarketScenario;

fn main() {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map(|s| s.parse().unwrap()).unwrap_or(0);
    let dim: usize = args.next().map(|s| s.parse().unwrap()).unwrap_or(1);

    let scenario = MarketScenario::crash(seed);
    let returns = scenario.returns();
    let shock = scenario.shock_days().unwrap();
    println!(
        "crash on {} .. {}",
        returns.dates()[shock.start],
        returns.dates()[shock.end - 1]
    );

    let config = RunConfig {
        homology_dim: dim,
        ..RunConfig::default()
    };
    let a = analyze(&returns, &config).unwrap();
    println!(
        "{} windows of {} days, H{dim} signals",
        a.windows.len(),
        config.window
    );

    for kind in [SignalKind::L1, SignalKind::L2, SignalKind::Wd] {
        let s = a.signal(kind).unwrap();
        let r = &a.detection(kind).unwrap().report;
        let (argmax, max) = s
            .values()
            .iter()
            .enumerate()
            .fold(
                (0, f64::MIN),
                |best, (i, &v)| if v > best.1 { (i, v) } else { best },
            );
        println!(
            "{:>2}: mean {:.3e}  threshold {:.3e}  max {:.3e} on {}  crossings {}",
            kind.label(),
            r.mean,
            r.threshold,
            max,
            s.times()[argmax],
            r.crossings.len()
        );
        for e in &r.episodes {
            println!("      episode {} .. {} peak {:.3e}", e.start, e.end, e.peak);
        }
    }
    for e in &a.events.events {
        let kinds: Vec<&str> = e.supports.iter().map(|s| s.kind.label()).collect();
        println!(
            "extreme event {} .. {} ({})",
            e.start,
            e.end,
            kinds.join(", ")
        );
    }
}
