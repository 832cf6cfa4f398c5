//! coexist-sim: scenario-driven planning and noise simulation for shared
//! classical/quantum fiber infrastructure.
//!
//! One JSON scenario document drives every subcommand; reports embed the
//! tool version, the scenario content digest, and the fully resolved
//! effective configuration, so runs are self-describing and byte-
//! reproducible. Exit codes: 0 success, 1 plan violations, 2 usage or
//! parse errors.

mod commands;
mod report;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable naming a directory with `raman_gain.csv` and/or
/// `attenuation.csv` overrides for the shipped default tables.
pub const PROFILE_DIR_ENV: &str = "COEXIST_SIM_PROFILE_DIR";

#[derive(Parser)]
#[command(
    name = "coexist-sim",
    version,
    about = "Planner and noise simulator for fiber infrastructure shared by classical, time/frequency, and quantum channels"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Directory for report files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Machine-readable output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Override the seed of the subcommand being run.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sweep one scenario value: KEY=START:STOP:STEPS, where KEY is a
    /// dot-separated path into the scenario document
    /// (e.g. detector.dark_rate_cps or plan.channels.0.launch_power_dbm).
    #[arg(long, global = true)]
    sweep: Option<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Channel-plan validation and grid capacity.
    #[command(subcommand)]
    Plan(PlanCmd),
    /// Raman and total noise into the quantum channel.
    #[command(subcommand)]
    Noise(NoiseCmd),
    /// Two-way time-transfer simulation.
    #[command(subcommand)]
    Timesync(TimesyncCmd),
    /// Vibration-sensing trace synthesis and event detection.
    #[command(subcommand)]
    Sense(SenseCmd),
    /// Inspect the effective default profile tables.
    #[command(subcommand)]
    Profile(ProfileCmd),
}

#[derive(Subcommand)]
enum PlanCmd {
    /// Check every plan rule; exit 1 if violations are found.
    Validate { scenario: PathBuf },
    /// Count channels placeable in a band at a given spacing.
    Capacity {
        #[arg(long)]
        lambda_min_nm: f64,
        #[arg(long)]
        lambda_max_nm: f64,
        #[arg(long)]
        spacing_ghz: f64,
        #[arg(long, default_value_t = 0.0)]
        width_ghz: f64,
        #[arg(long, value_enum, default_value_t = AnchorArg::BandEdge)]
        anchor: AnchorArg,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum AnchorArg {
    /// Anchor the first channel at the band's low-frequency edge.
    BandEdge,
    /// Count members of the 193.1 THz ITU grid inside the band.
    Itu,
}

#[derive(Subcommand)]
enum NoiseCmd {
    /// Per-channel, per-span spontaneous Raman rates into the quantum
    /// detection window.
    Raman { scenario: PathBuf },
    /// Full noise budget and QBER estimate.
    Budget { scenario: PathBuf },
}

#[derive(Subcommand)]
enum TimesyncCmd {
    /// Run the two-way exchange session from the scenario's timesync
    /// section; always writes the per-round CSV.
    Simulate {
        scenario: PathBuf,
        /// Override the scenario's round count.
        #[arg(long)]
        rounds: Option<u32>,
    },
}

#[derive(Subcommand)]
enum SenseCmd {
    /// Synthesize the phase trace from the scenario's sensing section.
    Synth {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = TraceFormat::Csv)]
        trace_format: TraceFormat,
    },
    /// Detect disturbance events in a stored trace (CSV or binary,
    /// auto-detected).
    Detect {
        #[arg(long)]
        trace: PathBuf,
        /// Sliding-window length in samples.
        #[arg(long, default_value_t = 40)]
        window: usize,
        /// Detection threshold as a multiple of the baseline sigma.
        #[arg(long, default_value_t = 5.0)]
        threshold: f64,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TraceFormat {
    Csv,
    Bin,
}

#[derive(Subcommand)]
enum ProfileCmd {
    /// Write the effective default table as CSV and echo it to stdout.
    Dump {
        #[arg(long, value_enum, default_value_t = ProfileKind::Raman)]
        kind: ProfileKind,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ProfileKind {
    Raman,
    Attenuation,
}

/// Classified failure: carries the exit code.
#[derive(Debug)]
pub enum CliError {
    /// Plan violations were found (exit 1). The report has been written.
    Violations,
    /// Usage, parse, schema, or I/O problem (exit 2).
    Usage(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("I/O error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan(PlanCmd::Validate { scenario }) => {
            commands::plan_validate(&cli.common, &scenario)
        }
        Command::Plan(PlanCmd::Capacity {
            lambda_min_nm,
            lambda_max_nm,
            spacing_ghz,
            width_ghz,
            anchor,
        }) => commands::plan_capacity(
            &cli.common,
            lambda_min_nm,
            lambda_max_nm,
            spacing_ghz,
            width_ghz,
            anchor,
        ),
        Command::Noise(NoiseCmd::Raman { scenario }) => {
            commands::noise_raman(&cli.common, &scenario)
        }
        Command::Noise(NoiseCmd::Budget { scenario }) => {
            commands::noise_budget(&cli.common, &scenario)
        }
        Command::Timesync(TimesyncCmd::Simulate { scenario, rounds }) => {
            commands::timesync_simulate(&cli.common, &scenario, rounds)
        }
        Command::Sense(SenseCmd::Synth {
            scenario,
            trace_format,
        }) => commands::sense_synth(&cli.common, &scenario, trace_format),
        Command::Sense(SenseCmd::Detect {
            trace,
            window,
            threshold,
        }) => commands::sense_detect(&cli.common, &trace, window, threshold),
        Command::Profile(ProfileCmd::Dump { kind }) => commands::profile_dump(&cli.common, kind),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Violations) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
