//! `levymix <command> --config run.json [--set a.b=value ...] [--out DIR] [--workers N]`
//!
//! Exit status: 0 on success, 2 for a violated assumption or a bad configuration
//! (including unknown family or measure kinds), 3 for a numerical failure, 1 for
//! I/O errors.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use levymix::Error;

use crate::commands::Command;
use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "levymix", version, about = "Distributed-order subordinators by Lévy mixing")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration (schema in the README).
    #[arg(short, long)]
    config: PathBuf,
    /// Override a leaf by dotted path; the value is parsed as JSON, else kept as a string.
    #[arg(long = "set", value_name = "PATH=VALUE")]
    overrides: Vec<String>,
    /// Output directory (default: config `output_dir`, then $LEVYMIX_OUT_DIR, then ./levymix-out).
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        e if e.is_numeric() => 3,
        Error::Io(_) | Error::Csv(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("levymix: --workers must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool is configured once");
    }
    let outcome = RunConfig::load(&cli.config, &cli.overrides).and_then(|cfg| {
        let out = cfg.output_dir(cli.out.as_deref());
        commands::run(cli.command, cfg, out)
    });
    match outcome {
        Ok(out) => {
            println!("{}: artifacts in {}", cli.command.name(), out.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("levymix {}: {err}", cli.command.name());
            ExitCode::from(exit_code(&err))
        }
    }
}
