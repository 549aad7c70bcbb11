use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use nozzlebench::cli::{parse_config, run_pipeline, Command, VERSION};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Mesh,
    Run,
    Validate,
    Report,
    All,
}

/// Axisymmetric Navier-Stokes runs and validation for the benchmark nozzle.
#[derive(Debug, Parser)]
#[command(name = "nozzlebench", version = VERSION)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Run directory, overriding `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Taylor-Hood order N, overriding `order`.
    #[arg(long)]
    order: Option<usize>,
    /// Throat Reynolds number, overriding `re_throat`.
    #[arg(long)]
    re: Option<f64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut config = match parse_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(out) = args.out {
        config.out_dir = std::path::absolute(&out).unwrap_or(out);
    }
    if let Some(n) = args.order {
        config.order = n;
    }
    if let Some(re) = args.re {
        config.re_throat = re;
    }
    if let Err(e) = config.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let command = match args.command {
        Cmd::Mesh => Command::Mesh,
        Cmd::Run => Command::Run,
        Cmd::Validate => Command::Validate,
        Cmd::Report => Command::Report,
        Cmd::All => Command::All,
    };
    match run_pipeline(&config, command) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
