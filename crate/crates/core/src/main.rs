use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use harper_phase::config::{parse_list, Settings};
use harper_phase::scaling::{scaling_report, write_report, ScalingOptions, Transition};
use harper_phase::scan::{boundary_locate, run_scan, write_records, Fixed, Quantity};
use harper_phase::verify::run_all_checks;
use harper_phase::output::format_float;
use harper_phase::{Error, Result};

/// Fidelity, entropy and finite-size scaling for the extended Harper model.
#[derive(Parser)]
#[command(name = "harper-phase", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Fibonacci index m of the approximant (N = F_m).
    #[arg(long)]
    m: Option<u32>,
    /// Grid size as LxM (λ points by μ points).
    #[arg(long)]
    grid: Option<String>,
    /// λlo,λhi,μlo,μhi
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    ky: Option<f64>,
    /// open or periodic
    #[arg(long)]
    boundary: Option<String>,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// key = value file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Ground-state fidelity against a reference point.
    FidelityMap {
        /// λ0,μ0
        #[arg(long = "ref")]
        reference: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Fidelity susceptibility along a direction.
    FsMap {
        /// nλ,nμ (normalized automatically)
        #[arg(long, allow_hyphen_values = true)]
        dir: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Ground-state gap E_1 - E_0.
    GapMap {
        #[command(flatten)]
        common: Common,
    },
    /// Ground-state and spectrum-averaged entropy with phase labels.
    EntropyMap {
        #[command(flatten)]
        common: Common,
    },
    /// Locate a phase boundary from the steepest entropy change.
    Boundary {
        /// lambda=<v> or mu=<v>
        #[arg(long)]
        fix: Option<String>,
        /// lo,hi of the swept parameter
        #[arg(long)]
        window: Option<String>,
        /// Sweep step (default 0.01).
        #[arg(long)]
        step: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Susceptibility peak scaling across system sizes.
    FsScaling {
        /// mmt, mit-i-ii or mit-iii-ii
        #[arg(long)]
        transition: Option<String>,
        /// Comma-separated Fibonacci indices.
        #[arg(long)]
        sizes: Option<String>,
        /// Golden-section resolution of the peak position.
        #[arg(long)]
        resolution: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the built-in consistency checks.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
}

fn settings(common: &Common, extra: &[(&str, Option<String>)]) -> Result<Settings> {
    let mut s = match &common.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    s.overlay("m", common.m.map(|v| v.to_string()));
    s.overlay("grid", common.grid.clone());
    s.overlay("range", common.range.clone());
    s.overlay("ky", common.ky.map(|v| v.to_string()));
    s.overlay("boundary", common.boundary.clone());
    s.overlay("out", common.out.as_ref().map(|p| p.display().to_string()));
    s.overlay("threads", common.threads.map(|v| v.to_string()));
    for (key, value) in extra {
        s.overlay(key, value.clone());
    }
    if let Some(n) = s.parsed::<usize>("threads")? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    }
    Ok(s)
}

fn output(s: &Settings) -> Result<Box<dyn Write>> {
    Ok(match s.get("out") {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn map(s: &Settings, quantities: &[Quantity]) -> Result<()> {
    let spec = s.grid_spec()?;
    let records = run_scan(&spec, quantities)?;
    let failed = records.iter().filter(|r| r.error.is_some()).count();
    let mut out = output(s)?;
    write_records(&mut out, &records, quantities)?;
    out.flush()?;
    if failed > 0 {
        eprintln!("{failed} of {} grid points failed; see the error column", records.len());
    }
    Ok(())
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::FidelityMap { reference, common } => {
            map(&settings(&common, &[("ref", reference)])?, &[Quantity::Fidelity])?
        }
        Command::FsMap { dir, common } => map(&settings(&common, &[("dir", dir)])?, &[Quantity::Fs])?,
        Command::GapMap { common } => map(&settings(&common, &[])?, &[Quantity::Gap])?,
        Command::EntropyMap { common } => map(&settings(&common, &[])?, &[Quantity::Entropy])?,
        Command::Boundary { fix, window, step, common } => {
            let s = settings(
                &common,
                &[("fix", fix), ("window", window), ("step", step.map(|v| v.to_string()))],
            )?;
            let fix: Fixed = s
                .parsed("fix")?
                .ok_or_else(|| Error::InvalidArgument("--fix is required".into()))?;
            let w = s
                .floats("window", 2)?
                .ok_or_else(|| Error::InvalidArgument("--window is required".into()))?;
            let step = s.parsed("step")?.unwrap_or(0.01);
            let m = s.parsed("m")?.unwrap_or(15);
            let ky = s.parsed("ky")?.unwrap_or(0.0);
            let result = boundary_locate(fix, (w[0], w[1]), step, m, ky, s.boundary()?)?;
            let mut out = output(&s)?;
            writeln!(out, "q,spectrum_entropy")?;
            for (q, e) in &result.curve {
                writeln!(out, "{},{}", format_float(*q), format_float(*e))?;
            }
            out.flush()?;
            eprintln!(
                "boundary at {} (slope {})",
                format_float(result.location),
                format_float(result.derivative)
            );
        }
        Command::FsScaling { transition, sizes, resolution, common } => {
            let s = settings(
                &common,
                &[
                    ("transition", transition),
                    ("sizes", sizes),
                    ("resolution", resolution.map(|v| v.to_string())),
                ],
            )?;
            let t: Transition = s.parsed("transition")?.unwrap_or(Transition::MetalMetal);
            let sizes: Vec<u32> = match s.get("sizes") {
                Some(v) => parse_list(v)?,
                None => vec![9, 10, 12, 13, 15, 16],
            };
            let mut options = ScalingOptions {
                k_y: s.parsed("ky")?.unwrap_or(0.0),
                boundary: s.boundary()?,
                ..ScalingOptions::default()
            };
            if let Some(r) = s.parsed("resolution")? {
                options.resolution = r;
            }
            let results = scaling_report(t, &sizes, &options)?;
            let mut out = output(&s)?;
            write_report(&mut out, &results)?;
            out.flush()?;
            for r in &results {
                if r.ratio_flagged() {
                    eprintln!(
                        "warning: {} group {}: alpha/nu = {} is far from 2",
                        t,
                        r.group.name(),
                        format_float(r.alpha_over_nu())
                    );
                }
            }
        }
        Command::Verify { seed, common } => {
            let s = settings(&common, &[("seed", seed.map(|v| v.to_string()))])?;
            let reports = run_all_checks(s.parsed("seed")?.unwrap_or(0));
            let mut out = output(&s)?;
            for r in &reports {
                writeln!(out, "{r}")?;
            }
            out.flush()?;
            return Ok(reports.iter().all(|r| r.passed()));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
