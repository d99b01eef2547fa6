use clap::Parser;
use obf::{emit_csv, parse_config, run_sweep};
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

/// Outage sweeps for one-bit opportunistic beamforming with
/// wireless-powered feedback.
#[derive(Parser)]
#[command(version)]
struct Cli {
    /// TOML sweep configuration
    #[arg(long)]
    config: PathBuf,

    /// CSV destination (standard output when absent)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Override trials per point
    #[arg(long)]
    trials: Option<u64>,

    /// Override the base seed
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads (default: config value, else all cores)
    #[arg(long)]
    workers: Option<usize>,
}

fn fail(stage: &str, err: impl std::fmt::Display) -> ExitCode {
    eprintln!("obf: {stage} stage failed: {err}");
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let text = match fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => return fail("config", format!("{}: {e}", cli.config.display())),
    };
    let mut params = match parse_config(&text) {
        Ok(p) => p,
        Err(e) => return fail("config", format!("{}: {e}", cli.config.display())),
    };
    if let Some(t) = cli.trials {
        params.trials = t;
    }
    if let Some(s) = cli.seed {
        params.seed = s;
    }
    if let Some(w) = cli.workers {
        params.workers = Some(w);
    }
    if let Err(e) = params.validate() {
        return fail("config", e);
    }
    let workers = params
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));

    let rows = match run_sweep(&params, workers) {
        Ok(r) => r,
        Err(e) => return fail("sweep", e),
    };

    let result = match &cli.out {
        Some(path) => match File::create(path) {
            Ok(f) => {
                let mut w = BufWriter::new(f);
                emit_csv(&rows, &mut w)
                    .map_err(|e| e.to_string())
                    .and_then(|_| w.flush().map_err(|e| e.to_string()))
            }
            Err(e) => Err(format!("{}: {e}", path.display())),
        },
        None => emit_csv(&rows, io::stdout().lock()).map_err(|e| e.to_string()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail("output", e),
    }
}
