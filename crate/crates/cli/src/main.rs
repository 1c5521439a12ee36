//! `landau`: hyperbolicity constants, verification suites and curve profiles.

mod render;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use landau_core::bounds::{BoundsError, DEFAULT_PRECISION_BITS, MIN_PRECISION_BITS};
use landau_core::lab::suite::{default_manifest, DEFAULT_SEED};
use landau_core::lab::LabError;
use landau_core::{hyperbolicity_report, load_configuration, run_manifest, ConfigError, CurveSpec, Manifest, SpectrumError};

#[derive(Debug, Parser)]
#[command(name = "landau", version, about = "Effective hyperbolicity constants for hyperplane complements")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Working precision of K and the area bound, in bits.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION_BITS, value_parser = parse_precision)]
    precision_bits: usize,

    /// Seed for every Monte Carlo draw.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Constants B, G, G#, the area bound and K for a configuration.
    Report { config: PathBuf },
    /// Run a suite manifest; the built-in suite when no path is given.
    Verify { manifest: Option<PathBuf> },
    /// Radial profile (radius, max f#, σ) of a curve.
    Curve {
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.9,0.99")]
        radii: Vec<f64>,
    },
    /// Fubini–Study area σ of a curve on a disc.
    Area {
        spec: PathBuf,
        /// Disc radius; the curve's evaluation radius when absent.
        #[arg(long, conflicts_with = "extrapolate")]
        radius: Option<f64>,
        /// Richardson-extrapolate σ(1) from radii 1 − 2^-k.
        #[arg(long)]
        extrapolate: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

fn parse_precision(s: &str) -> Result<usize, String> {
    let bits: usize = s.parse().map_err(|e| format!("{e}"))?;
    if bits < MIN_PRECISION_BITS {
        return Err(format!("at least {MIN_PRECISION_BITS} bits are required"));
    }
    Ok(bits)
}

/// Failures, by exit code.
#[derive(Debug)]
enum Failure {
    /// 1: some check has a negative margin.
    Verification,
    /// 2: a configuration is not in general position.
    Degenerate(String),
    /// 3: unreadable input, malformed document or failed precondition.
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification => 1,
            Failure::Degenerate(_) => 2,
            Failure::Input(_) => 3,
        }
    }
}

fn config_failure(e: ConfigError) -> Failure {
    if e.is_degenerate() {
        Failure::Degenerate(e.to_string())
    } else {
        Failure::Input(e.to_string())
    }
}

fn bounds_failure(e: BoundsError) -> Failure {
    match e {
        BoundsError::Spectrum(SpectrumError::Degenerate { .. }) => Failure::Degenerate(e.to_string()),
        other => Failure::Input(other.to_string()),
    }
}

fn lab_is_degenerate(e: &LabError) -> bool {
    match e {
        LabError::Config(c) => c.is_degenerate(),
        LabError::Spectrum(SpectrumError::Degenerate { .. }) => true,
        LabError::Bounds(BoundsError::Spectrum(SpectrumError::Degenerate { .. })) => true,
        _ => false,
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_curve(path: &Path) -> Result<landau_core::Curve, Failure> {
    let spec: CurveSpec =
        serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    spec.build().map_err(|e| Failure::Input(e.to_string()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    let written = match out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    written.map_err(|e| Failure::Input(format!("writing output: {e}")))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Report { config } => {
            let c = load_configuration(&read(config)?).map_err(config_failure)?;
            let report = hyperbolicity_report(&c, cli.precision_bits).map_err(bounds_failure)?;
            emit(out, &render::report(&report, cli.format)?)
        }
        Command::Verify { manifest } => {
            let manifest = match manifest {
                Some(path) => Manifest::from_json(&read(path)?)
                    .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
                None => default_manifest(),
            };
            let results = run_manifest(&manifest, cli.seed, cli.precision_bits).map_err(|e| {
                if lab_is_degenerate(&e.source) {
                    Failure::Degenerate(e.to_string())
                } else {
                    Failure::Input(e.to_string())
                }
            })?;
            emit(out, &render::results(&results, cli.format)?)?;
            if results.iter().all(|r| r.passed()) {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Curve { spec, radii } => {
            let f = load_curve(spec)?;
            let rows = landau_core::curves::profile(&f, radii).map_err(|e| Failure::Input(e.to_string()))?;
            emit(out, &render::profile(&rows, cli.format)?)
        }
        Command::Area { spec, radius, extrapolate } => {
            let f = load_curve(spec)?;
            let (radius, estimate) = if *extrapolate {
                (1.0, f.fs_area_extrapolated())
            } else {
                let r = radius.unwrap_or(f.eval_radius());
                (r, f.fs_area(r))
            };
            let estimate = estimate.map_err(|e| Failure::Input(e.to_string()))?;
            emit(out, &render::area(radius, *extrapolate, &estimate, cli.format)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors share the input-error code; help and version succeed
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Verification => eprintln!("landau: verification failed"),
                Failure::Degenerate(msg) => eprintln!("landau: degenerate configuration: {msg}"),
                Failure::Input(msg) => eprintln!("landau: {msg}"),
            }
            ExitCode::from(failure.code())
        }
    }
}
