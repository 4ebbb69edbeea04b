//! Command-line front end: config parsing, sweeps, figure datasets and CSV output.

pub mod config;
pub mod figures;
pub mod sweep;
pub mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::detection::ErrorModel;
use config::{parse_config, serialize, ConfigError, Output, SweepSpec};
use sweep::{run_sweep, Summary};
use table::Table;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_PHYSICS: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "qi-opa", version, about = "Electro-optomechanical quantum illumination with an intracavity OPA")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Parameter file in `key = value` format.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output CSV path; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Overrides `error_model` from the config.
    #[arg(long, global = true, value_parser = parse_error_model)]
    pub error_model: Option<ErrorModel>,

    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Drift-matrix stability.
    Stability,
    /// Logarithmic negativity and conversion photon numbers.
    Entanglement,
    /// Receiver SNR and error probability, with the coherent-radar benchmark.
    Detect,
    /// The observables listed under `outputs` in the config.
    Sweep,
    /// Dataset for one figure (fig2, fig3a-d, fig4a-d, fig5a-b, fig6a-b).
    Figure { name: String },
}

fn parse_error_model(s: &str) -> Result<ErrorModel, String> {
    s.parse()
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
}

fn load_spec(cli: &Cli) -> Result<SweepSpec, CliError> {
    let mut spec = match &cli.config {
        None => SweepSpec::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text).map_err(|e: ConfigError| CliError::Config(format!("{}: {e}", path.display())))?
        }
    };
    if let Some(model) = cli.error_model {
        spec.error_model = model;
    }
    Ok(spec)
}

/// Runs a parsed command, returning the table and the exit status it implies.
pub fn execute(cli: &Cli) -> Result<(Table, u8), CliError> {
    let mut spec = load_spec(cli)?;
    let (name, outputs): (&str, Option<Vec<Output>>) = match &cli.command {
        Command::Stability => ("stability", Some(vec![Output::Stability])),
        Command::Entanglement => (
            "entanglement",
            Some(vec![Output::LogNegativity, Output::OpticalGivenMicrowave, Output::MicrowaveGivenOptical]),
        ),
        Command::Detect => (
            "detect",
            Some(vec![
                Output::Snr,
                Output::ErrorProbability,
                Output::CoherentSnr,
                Output::CoherentErrorProbability,
            ]),
        ),
        Command::Sweep => ("sweep", None),
        Command::Figure { name } => {
            let data = figures::figure_table(name, &spec, cli.jobs).ok_or_else(|| {
                CliError::Config(format!("unknown figure `{name}` (expected one of {})", figures::FIGURES.join(", ")))
            })?;
            return Ok((data.table, exit_status(&data.summary, false)));
        }
    };
    if let Some(outputs) = outputs {
        spec.outputs = outputs;
    }
    let only_stability = spec.outputs.iter().all(|o| *o == Output::Stability);
    let provenance = vec![
        format!("qi-opa {} {name}", env!("CARGO_PKG_VERSION")),
        serialize(&spec).trim_end().to_string(),
    ];
    let result = run_sweep(&spec, cli.jobs, provenance);
    Ok((result.table, exit_status(&result.summary, only_stability)))
}

/// 3 if any point hit a numerical failure, 2 if no point produced its
/// requested observables, 0 otherwise.
pub fn exit_status(summary: &Summary, only_stability: bool) -> u8 {
    let useful = summary.stable + if only_stability { summary.unstable } else { 0 };
    if summary.numeric_failures > 0 {
        EXIT_NUMERIC
    } else if useful == 0 {
        EXIT_PHYSICS
    } else {
        EXIT_OK
    }
}

fn write_output(cli: &Cli, csv: &str) -> std::io::Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, csv),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(csv.as_bytes())?;
            stdout.flush()
        }
    }
}

/// Entry point shared by the binary: parse, run, write, map to exit codes.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK });
        }
    };
    let (table, status) = match execute(&cli) {
        Ok(x) => x,
        Err(CliError::Config(msg)) | Err(CliError::Io(msg)) => {
            eprintln!("qi-opa: {msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Err(e) = write_output(&cli, &table.to_csv()) {
        eprintln!("qi-opa: cannot write output: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    match status {
        EXIT_PHYSICS => eprintln!("qi-opa: no grid point produced the requested observables"),
        EXIT_NUMERIC => eprintln!("qi-opa: numerical failure at one or more grid points (see the error column)"),
        _ => {}
    }
    ExitCode::from(status)
}
