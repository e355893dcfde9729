use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qinfer_cli::{run_choi_roundtrip, run_discrimination, run_mle_experiment, run_qfi_sweep, RunOptions};

#[derive(Parser)]
#[command(name = "qinfer", version, about = "Quantum statistical inference scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classical vs. quantum Fisher information over a parameter grid.
    QfiSweep(Common),
    /// Posterior-optimal success of a measurement vs. the best projective one.
    Discriminate(Common),
    /// Monte Carlo maximum-likelihood variance against the Cramér–Rao bounds.
    Mle(Common),
    /// Channel → Choi state → channel round trip.
    Choi(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (runner, common): (fn(&RunOptions) -> _, Common) = match cli.command {
        Command::QfiSweep(c) => (run_qfi_sweep, c),
        Command::Discriminate(c) => (run_discrimination, c),
        Command::Mle(c) => (run_mle_experiment, c),
        Command::Choi(c) => (run_choi_roundtrip, c),
    };
    if let Some(n) = common.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let opts = RunOptions {
        config: common.config,
        out_dir: common.out,
        seed: common.seed,
    };
    match runner(&opts) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
