use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nfsim_core::codebook::{build_codebook, CodebookKind};
use nfsim_core::config::parse_config;
use nfsim_core::experiments::{run_gain_sweep, run_pdp, run_phase_profile, run_rate_sweep, SweepKind, SweepResult, SweepSpec};
use nfsim_core::io;
use nfsim_core::stochastic::sample_drop;
use nfsim_core::NfError;

#[derive(Parser)]
#[command(name = "nfsim", version, about = "Near-field XL-MIMO channel and beam-training sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// key = value scenario/sweep file; defaults apply when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    /// Override master_seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Aggregate {
    Mean,
}

#[derive(Clone, Copy, ValueEnum)]
enum BookArg {
    Ff,
    Nf,
}

#[derive(Subcommand)]
enum Command {
    /// Beam gain versus BS–UT distance
    SweepGain {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        aggregate: Option<Aggregate>,
    },
    /// Achievable rate versus transmit SNR
    SweepRate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        aggregate: Option<Aggregate>,
    },
    /// Unwrapped LoS phase across the array, planar vs spherical
    PhaseProfile {
        #[command(flatten)]
        common: Common,
    },
    /// Element × delay power maps for the SnS and stationary channels
    Pdp {
        #[command(flatten)]
        common: Common,
    },
    /// Dump a codebook
    Codebook {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "nf")]
        kind: BookArg,
    },
    /// Write one drop's channel factors (manifold + paths.csv + meta.csv)
    GenChannel {
        #[command(flatten)]
        common: Common,
        /// Drop index (defaults to probe_drop from the config)
        #[arg(long)]
        drop: Option<u64>,
        /// Fixed BS–UT distance in meters; random in [r_min, r_max] otherwise
        #[arg(long)]
        distance: Option<f64>,
    },
}

fn load(common: &Common, kind: SweepKind) -> Result<SweepSpec, NfError> {
    let text = match &common.config {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| NfError::Config(format!("cannot read {}: {e}", path.display())))?,
        None => String::new(),
    };
    let mut spec = parse_config(&text)?;
    spec.kind = kind;
    if let Some(seed) = common.seed {
        spec.scenario.master_seed = seed;
    }
    spec.validate()?;
    Ok(spec)
}

fn create(path: &Path) -> Result<BufWriter<File>, NfError> {
    Ok(BufWriter::new(File::create(path)?))
}

fn emit(result: &SweepResult, out: &Path, aggregate: Option<Aggregate>) -> Result<(), NfError> {
    match aggregate {
        Some(Aggregate::Mean) => io::write_mean_csv(&result.aggregate_mean(), create(out)?),
        None => io::write_sweep_csv(result, create(out)?),
    }
}

fn run(cli: Cli) -> Result<(), NfError> {
    match cli.command {
        Command::SweepGain { common, aggregate } => {
            let spec = load(&common, SweepKind::GainVsDistance)?;
            emit(&run_gain_sweep(&spec)?, &common.out, aggregate)
        }
        Command::SweepRate { common, aggregate } => {
            let spec = load(&common, SweepKind::RateVsSnr)?;
            emit(&run_rate_sweep(&spec)?, &common.out, aggregate)
        }
        Command::PhaseProfile { common } => {
            let spec = load(&common, SweepKind::PhaseProfile)?;
            io::write_phase_profile_csv(&run_phase_profile(&spec)?, create(&common.out)?)
        }
        Command::Pdp { common } => {
            let spec = load(&common, SweepKind::Pdp)?;
            io::write_pdp_csv(&run_pdp(&spec)?, create(&common.out)?)
        }
        Command::Codebook { common, kind } => {
            let spec = load(&common, SweepKind::GainVsDistance)?;
            let kind = match kind {
                BookArg::Ff => CodebookKind::FarField,
                BookArg::Nf => CodebookKind::NearField,
            };
            let book = build_codebook(&spec.scenario.geometry, kind, spec.beta, spec.r_floor)?;
            io::write_codebook_csv(&book, create(&common.out)?)
        }
        Command::GenChannel { common, drop, distance } => {
            let spec = load(&common, SweepKind::Pdp)?;
            let index = drop.unwrap_or(spec.probe_drop);
            let d = sample_drop(&spec.scenario, index, distance)?;
            let real = d.realization(&spec.scenario.geometry, spec.channel_model)?;
            io::save_realization(&real, 0, &common.out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nfsim: {e}");
            match e {
                NfError::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
