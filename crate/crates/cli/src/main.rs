//! `qgeom`: command-line front end for the position-algebra, noise,
//! interferometer and Planck-bound computations in `qgeom-core`.
//!
//! Exit status is 0 on success, 1 for domain errors and 2 for usage errors.

mod commands;
mod manifest;
mod report;

use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qgeom_core::PlanckScale;

use crate::manifest::{Params, RunManifest};
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(
    name = "qgeom",
    version,
    about = "Quantum-geometry position algebra, holographic noise and Planck bounds"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Print a JSON document instead of CSV.
    #[arg(long, global = true)]
    pub json: bool,

    /// Where to write the run manifest (default: `<first output>.manifest.json`).
    #[arg(long, global = true, value_name = "PATH")]
    pub manifest: Option<PathBuf>,

    /// Reduced Planck constant, J·s (default CODATA 2018).
    #[arg(long, global = true)]
    pub hbar: Option<f64>,

    /// Newtonian constant of gravitation, m³ kg⁻¹ s⁻² (default CODATA 2018).
    #[arg(long = "newton-g", global = true)]
    pub newton_g: Option<f64>,

    /// Speed of light, m/s.
    #[arg(long = "light-speed", global = true)]
    pub light_speed: Option<f64>,
}

impl CommonArgs {
    fn scale(&self) -> Result<PlanckScale> {
        use qgeom_core::planck::{CODATA_C, CODATA_G, CODATA_HBAR};
        Ok(PlanckScale::derive(
            self.hbar.unwrap_or(CODATA_HBAR),
            self.newton_g.unwrap_or(CODATA_G),
            self.light_speed.unwrap_or(CODATA_C),
        )?)
    }

    fn record(&self, params: &mut Params) {
        params.flag("json", self.json);
        if let Some(h) = self.hbar {
            params.num("hbar", h);
        }
        if let Some(g) = self.newton_g {
            params.num("newton-g", g);
        }
        if let Some(c) = self.light_speed {
            params.num("light-speed", c);
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a spin-j representation of the position algebra and report its observables.
    Algebra(commands::AlgebraArgs),
    /// Synthesize a transverse-jitter time series.
    Noise(commands::NoiseArgs),
    /// Welch power spectrum of a generated or stored series.
    Spectrum(commands::SpectrumArgs),
    /// Interferometer RMS, output/cross spectra and detectability.
    Interferometer(commands::InterferometerArgs),
    /// Compton and Schwarzschild boundary lines and regime classification.
    Bounds(commands::BoundsArgs),
    /// Re-run a command from its manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub source: PathBuf,

    /// Write outputs (and the new manifest) here instead of the recorded paths.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Convention {
    Reduced,
    Full,
}

/// Result of one command before anything is printed.
pub struct Outcome {
    pub report: Report,
    pub params: Params,
    pub seed: Option<u64>,
    pub outputs: Vec<PathBuf>,
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Algebra(_) => "algebra",
        Command::Noise(_) => "noise",
        Command::Spectrum(_) => "spectrum",
        Command::Interferometer(_) => "interferometer",
        Command::Bounds(_) => "bounds",
        Command::Replay(_) => "replay",
    }
}

fn execute(cli: Cli) -> Result<()> {
    let scale = cli.common.scale()?;
    let name = command_name(&cli.command);
    let outcome = match &cli.command {
        Command::Algebra(a) => commands::algebra(a, &scale)?,
        Command::Noise(a) => commands::noise(a, &scale)?,
        Command::Spectrum(a) => commands::spectrum(a, &scale)?,
        Command::Interferometer(a) => commands::interferometer(a, &scale)?,
        Command::Bounds(a) => commands::bounds(a, &scale)?,
        Command::Replay(a) => return replay(a),
    };

    let mut params = outcome.params;
    cli.common.record(&mut params);
    let manifest_path = cli.common.manifest.clone().or_else(|| {
        outcome
            .outputs
            .first()
            .map(|p| PathBuf::from(format!("{}.manifest.json", p.display())))
    });
    if let Some(path) = manifest_path {
        let manifest = RunManifest {
            command: name.to_string(),
            parameters: params.into_map(),
            seed: outcome.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            output_paths: outcome
                .outputs
                .iter()
                .map(|p| p.display().to_string())
                .collect(),
        };
        manifest.write(&path)?;
    }
    outcome.report.write(cli.common.json, io::stdout().lock())?;
    Ok(())
}

fn replay(args: &ReplayArgs) -> Result<()> {
    let manifest = RunManifest::read(&args.source)?;
    if manifest.command == "replay" {
        bail!("manifest {} records a replay", args.source.display());
    }
    let mut argv = manifest.to_args(args.out_dir.as_deref());
    let target = manifest::relocate(&args.source.display().to_string(), args.out_dir.as_deref());
    argv.push("--manifest".into());
    argv.push(target.display().to_string());
    let cli = Cli::try_parse_from(&argv)?;
    execute(cli)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if let Some(clap_err) = err.downcast_ref::<clap::Error>() {
                let _ = clap_err.print();
                return ExitCode::from(2);
            }
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

/// Writes through a buffered file handle.
pub fn create_file(path: &Path) -> Result<io::BufWriter<std::fs::File>> {
    use anyhow::Context;
    let file =
        std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(io::BufWriter::new(file))
}
