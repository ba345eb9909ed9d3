use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tda_core::pipeline::{run, square_demo, RunConfig, RunError};

/// Sliding-window persistent homology of multi-series price data.
#[derive(Parser)]
#[command(name = "tda", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze the series listed in a config's manifest and write CSV/JSON artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Window length in days.
        #[arg(long)]
        window: Option<usize>,
        /// Wasserstein degree.
        #[arg(long, allow_negative_numbers = true)]
        p: Option<f64>,
        /// Homology dimension used for the signals.
        #[arg(long)]
        dim: Option<usize>,
        /// Extreme-event threshold in standard deviations.
        #[arg(long, allow_negative_numbers = true)]
        sigma: Option<f64>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the diagrams of the four-point square.
    DemoSquare {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        scale: f64,
    },
    /// Print the version.
    Version,
}

fn execute(command: Command) -> Result<(), RunError> {
    match command {
        Command::Run {
            config,
            window,
            p,
            dim,
            sigma,
            threads,
            out,
        } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(w) = window {
                cfg.window = w;
            }
            if let Some(p) = p {
                cfg.wasserstein_p = p;
            }
            if let Some(k) = dim {
                cfg.homology_dim = k;
            }
            if let Some(k) = sigma {
                cfg.k_sigma = k;
            }
            if let Some(t) = threads {
                cfg.threads = t;
            }
            if let Some(o) = out {
                cfg.out = o;
            }
            let outcome = run(&cfg)?;
            println!(
                "{} windows, {} extreme events",
                outcome.metadata.windows,
                outcome.analysis.events.events.len()
            );
            for path in &outcome.artifacts {
                println!("wrote {}", path.display());
            }
        }
        Command::DemoSquare { scale } => print!("{}", square_demo(scale)?),
        Command::Version => println!("tda {}", env!("CARGO_PKG_VERSION")),
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
