mod check;
mod compress;
mod fc;
mod inspect;
mod sample;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use locomp::ErrorClass;

#[derive(Parser)]
#[command(
    name = "locomp",
    version,
    about = "Block-wise localized compression of image datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a directory of images into a dataset of tensors.
    Compress(compress::Args),
    /// Print the header of a .lcim/.lcmx file or a dataset manifest.
    Inspect(inspect::Args),
    /// Check a first-layer (region, stride) against the block size n.
    Check(check::Args),
    /// Draw runtime samples from a prepared dataset.
    Sample(sample::Args),
    /// Sketch a fully-connected layer input vector.
    Fc(fc::Args),
}

/// Validation failure that is not a library error, e.g. a failed check.
#[derive(Debug)]
pub struct Rejected(pub String);

impl std::fmt::Display for Rejected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Rejected {}

const EXIT_VALIDATION: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_FORMAT: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<locomp::Error>() {
            return match e.class() {
                ErrorClass::Validation => EXIT_VALIDATION,
                ErrorClass::Io => EXIT_IO,
                ErrorClass::Format => EXIT_FORMAT,
            };
        }
        if cause.is::<std::io::Error>() {
            return EXIT_IO;
        }
        if cause.is::<serde_json::Error>() {
            return EXIT_FORMAT;
        }
    }
    EXIT_VALIDATION
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Compress(a) => compress::run(a),
        Command::Inspect(a) => inspect::run(a),
        Command::Check(a) => check::run(a),
        Command::Sample(a) => sample::run(a),
        Command::Fc(a) => fc::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !e.is::<Rejected>() {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
