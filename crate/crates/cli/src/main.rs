use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qtc_cli::commands::{self, CommandError, Output};
use qtc_cli::config::{self, load_config, ConfigError};

/// Compact electro-thermal model generator for thermal quadratic transfer
/// elements (heater + cantilever + thermopile).
#[derive(Debug, Parser)]
#[command(name = "qtcmodel", version)]
struct Cli {
    /// Project configuration file.
    #[arg(short, long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Write results to FILE instead of standard output.
    #[arg(short, long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Effective thermal parameters and derived model constants.
    Params,
    /// Poles and time constants of the distributed line.
    Poles {
        /// Number of poles.
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Foster stages of the distributed line.
    Foster {
        /// Number of stages.
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Cauer ladder used for simulation.
    Cauer,
    /// DC transfer characteristic.
    #[command(allow_negative_numbers = true)]
    DcSweep {
        /// First input voltage (V).
        #[arg(long)]
        from: f64,
        /// Last input voltage (V).
        #[arg(long)]
        to: f64,
        /// Number of points, endpoints included.
        #[arg(long)]
        steps: usize,
    },
    /// Time-domain simulation with the [sim] drive.
    Transient,
    /// Harmonic levels of the periodic steady state, relative to DC.
    Spectrum {
        /// Comma-separated harmonic indices; defaults to [sim] harmonics.
        #[arg(long, value_name = "LIST", value_parser = parse_harmonics)]
        harmonics: Option<HarmonicList>,
    },
    /// Conversion constant against ambient temperature offset.
    #[command(allow_negative_numbers = true)]
    TempSweep {
        /// First offset from T0 (K).
        #[arg(long)]
        from: f64,
        /// Last offset from T0 (K).
        #[arg(long)]
        to: f64,
        /// Number of points, endpoints included.
        #[arg(long)]
        steps: usize,
        /// DC input voltage (V); defaults to [sim] amplitude_v.
        #[arg(long)]
        u_in: Option<f64>,
    },
    /// SPICE subcircuit of the device model.
    EmitNetlist {
        /// Subcircuit name.
        #[arg(long, default_value = "QTC")]
        name: String,
    },
}

#[derive(Debug, Clone)]
struct HarmonicList(Vec<usize>);

fn parse_harmonics(raw: &str) -> Result<HarmonicList, String> {
    config::parse_harmonics(raw).map(HarmonicList)
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("no configuration given (use --config FILE)")]
    NoConfig,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Command(#[from] CommandError),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli.config.as_deref().ok_or(CliError::NoConfig)?;
    let cfg = load_config(path)?;
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    let output = match &cli.command {
        Command::Params => Output::Table(commands::params(&cfg)),
        Command::Poles { n } => Output::Table(commands::poles(&cfg, *n)?),
        Command::Foster { n } => Output::Table(commands::foster(&cfg, *n)?),
        Command::Cauer => Output::Table(commands::cauer(&cfg)),
        Command::DcSweep { from, to, steps } => Output::Table(commands::dc_sweep_table(&cfg, *from, *to, *steps)?),
        Command::Transient => Output::Table(commands::transient(&cfg)?),
        Command::Spectrum { harmonics } => Output::Table(commands::spectrum(&cfg, harmonics.as_ref().map(|h| h.0.as_slice()))?),
        Command::TempSweep { from, to, steps, u_in } => {
            Output::Table(commands::temp_sweep(&cfg, *from, *to, *steps, *u_in)?)
        }
        Command::EmitNetlist { name } => Output::Netlist(commands::netlist(&cfg, name)?),
    };
    write_output(cli.out.as_deref(), &output.render())
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Write {
            path: p.display().to_string(),
            source,
        }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|source| CliError::Write {
                    path: "standard output".to_string(),
                    source,
                })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::NoConfig) => {
            eprintln!("error: {}", CliError::NoConfig);
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
