//! `recon` — compressed-sensing MRI reconstruction experiments.
//!
//! Subcommands:
//! - `reconstruct <cfg>`: one solver run with images, logs, and summary.
//! - `isotropy <cfg>`: upright vs rotated acquisition and the
//!   rotation-invariance deficit, plus a TV/RITV value table.
//! - `benchmark <cfg>`: solver variants and GADMM penalties on identical
//!   data with a comparison CSV and summary table.
//! - `mask <spec> --size <n> -o <file>`: emit a sampling mask.
//! - `metrics <img> <ref>`: SNR/SSIM/HFEN of one grid image vs another.
//!
//! Exit codes: 0 success, 2 invalid configuration or arguments, 3 solver
//! or IO failure during a run.

mod commands;
mod config;
mod io;
mod manifest;
mod pipeline;

use clap::{Parser, Subcommand};
use config::Overrides;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "recon", version, about = "Compressed-sensing MRI reconstruction toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Override the noise seed from the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the solver iteration count from the config file.
    #[arg(long, global = true)]
    iters: Option<usize>,

    /// Override the output directory from the config file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one reconstruction from a config file.
    Reconstruct { config: PathBuf },
    /// Run the upright-vs-rotated acquisition comparison.
    Isotropy { config: PathBuf },
    /// Compare solver variants and GADMM penalties on identical data.
    Benchmark { config: PathBuf },
    /// Emit a sampling mask (spec: radial:<spokes>, cartesian:<rate>[:<seed>], spiral:<rate>).
    Mask {
        spec: String,
        /// Grid size n (mask is n x n).
        #[arg(long, default_value_t = 128)]
        size: usize,
        /// Close the mask under the frequency-grid quarter turn.
        #[arg(long)]
        symmetrize: bool,
        /// Output file (.pgm or .grid).
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print SNR/SSIM/HFEN of an image against a reference (grid files).
    Metrics { image: PathBuf, reference: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        seed: cli.seed,
        iters: cli.iters,
        out: cli.out,
    };
    let result = match &cli.command {
        Command::Reconstruct { config } => commands::cmd_reconstruct(config, &overrides),
        Command::Isotropy { config } => commands::cmd_isotropy(config, &overrides),
        Command::Benchmark { config } => commands::cmd_benchmark(config, &overrides),
        Command::Mask {
            spec,
            size,
            symmetrize,
            output,
        } => commands::cmd_mask(spec, *size, *symmetrize, output),
        Command::Metrics { image, reference } => commands::cmd_metrics(image, reference),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e) as u8)
        }
    }
}
