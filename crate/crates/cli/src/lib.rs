//! Command-line front end for the KI-TWPA toolkit.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 model or
//! analysis error.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use kitwpa_core::spectrum::SpectrumKind;

use crate::commands::{FitSource, Report};
use crate::config::FieldAxis;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl From<kitwpa_core::Error> for CliError {
    fn from(e: kitwpa_core::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Domain(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "error: {m}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "kitwpa",
    version,
    about = "Kinetic inductance TWPA simulation and analysis"
)]
struct Cli {
    /// TOML configuration file merged over the built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override one config value, e.g. `--set strip.alpha_ki=2.0`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output CSV path. Defaults to `<command>.csv`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Dataset {
    Nbtin,
    Nb,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[allow(clippy::enum_variant_names)]
enum KindArg {
    S21Db,
    GainDb,
    DsnrDb,
    NoiseDb,
}

impl From<KindArg> for SpectrumKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::S21Db => SpectrumKind::S21Db,
            KindArg::GainDb => SpectrumKind::GainDb,
            KindArg::DsnrDb => SpectrumKind::DsnrDb,
            KindArg::NoiseDb => SpectrumKind::NoiseDb,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// S21 over `sweep.frequency` at the configured environment.
    Spectrum {
        /// Write |S21| in dB instead of the complex value.
        #[arg(long)]
        db: bool,
    },
    /// Mean |S21| over the frequency grid versus temperature.
    SweepTemp,
    /// Mean |S21| over the frequency grid versus one field component.
    SweepField {
        /// Overrides `sweep.field.axis`.
        #[arg(long, value_enum)]
        axis: Option<FieldAxis>,
    },
    /// Stopband location on the wide `sweep.bandgap` grid.
    Bandgap,
    /// SNR improvement versus temperature, crossover and cascade loss.
    DsnrModel {
        /// Average over `sweep.dsnr.band` instead of a single frequency.
        #[arg(long)]
        band: bool,
    },
    /// Vortex entry field of the configured strip.
    VortexField,
    /// Fit the zero-Tc field to Tc(B) data.
    FitBc {
        /// CSV with header `b_tesla,tc_kelvin`.
        #[arg(long, conflicts_with = "dataset")]
        data: Option<PathBuf>,
        /// Packaged example dataset.
        #[arg(long, value_enum)]
        dataset: Option<Dataset>,
        /// Zero-field Tc [K]; overrides `fit.tc0`.
        #[arg(long)]
        tc0: Option<f64>,
    },
    /// Figures of merit of a measured SNR-improvement spectrum.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        /// Gain spectrum for the in-band mean gain.
        #[arg(long)]
        gain: Option<PathBuf>,
        /// Treat the input as this kind regardless of its header.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::SweepTemp => "sweep-temp",
            Command::SweepField { .. } => "sweep-field",
            Command::Bandgap => "bandgap",
            Command::DsnrModel { .. } => "dsnr-model",
            Command::VortexField => "vortex-field",
            Command::FitBc { .. } => "fit-bc",
            Command::Analyze { .. } => "analyze",
        }
    }
}

fn execute(cli: Cli) -> Result<(String, PathBuf, PathBuf, Report), CliError> {
    let cfg = config::resolve(cli.config.as_deref(), &cli.set).map_err(CliError::Usage)?;
    let name = cli.command.name();
    let out = cli
        .out
        .unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));
    let report = match cli.command {
        Command::Spectrum { db } => commands::spectrum(&cfg, &out, db)?,
        Command::SweepTemp => commands::sweep_temp(&cfg, &out)?,
        Command::SweepField { axis } => {
            commands::sweep_field(&cfg, &out, axis.unwrap_or(cfg.sweep.field.axis))?
        }
        Command::Bandgap => commands::bandgap(&cfg, &out)?,
        Command::DsnrModel { band } => commands::dsnr_model(&cfg, &out, band)?,
        Command::VortexField => commands::vortex_field(&cfg, &out)?,
        Command::FitBc { data, dataset, tc0 } => {
            let source = match (&data, dataset) {
                (Some(p), _) => FitSource::File(p),
                (None, Some(Dataset::Nbtin)) => FitSource::Packaged {
                    name: "nbtin",
                    text: commands::NBTIN_DATA,
                },
                (None, Some(Dataset::Nb)) => FitSource::Packaged {
                    name: "nb",
                    text: commands::NB_DATA,
                },
                (None, None) => {
                    return Err(CliError::Usage("fit-bc needs --data or --dataset".into()))
                }
            };
            commands::fit_bc(&cfg, &out, source, tc0)?
        }
        Command::Analyze { input, gain, kind } => {
            commands::analyze(&cfg, &out, &input, gain.as_deref(), kind.map(Into::into))?
        }
    };
    let manifest = output::write_manifest(&out, name, &cfg, &report.notes, &report.results)?;
    Ok((name.to_string(), out, manifest, report))
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok((name, out, manifest, report)) => {
            println!("kitwpa {name}");
            for n in &report.notes {
                println!("note: {n}");
            }
            for line in report.lines() {
                println!("{line}");
            }
            println!("wrote {}", out.display());
            println!("wrote {}", manifest.display());
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
