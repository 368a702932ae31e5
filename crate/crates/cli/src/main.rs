mod commands;
mod input;
mod output;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BuildArgs, DynamicsArgs, Globals, NonorthoArgs, SpectrumArgs, SweepArgs, VerifyArgs};
use presets::Preset;

const WORKERS_ENV: &str = "PC_SPECTRA_WORKERS";

#[derive(Parser, Debug)]
#[command(
    name = "pc-spectra",
    version,
    about = "Pairwise coalescence in non-Hermitian tight-binding chains"
)]
struct Cli {
    /// Output file (directory for preset-run); `-` or absent means stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores); PC_SPECTRA_WORKERS takes precedence.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, default_value_t = 1e-5)]
    tol_distinct: f64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_certify: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a chain and print its spec as JSON.
    Build(BuildArgs),
    /// Eigenvalues with cluster labels as CSV.
    Spectrum(SpectrumArgs),
    /// Coalescence certificate as JSON.
    Verify(VerifyArgs),
    /// Eigenvector non-orthogonality over a gamma grid, or the overlap heatmap.
    Nonortho(NonorthoArgs),
    /// Norm decay under evolution and the minimizing gamma.
    Dynamics(DynamicsArgs),
    /// Distinct counts and certificates over a parameter grid.
    Sweep(SweepArgs),
    /// Regenerate the data behind a figure.
    PresetRun {
        #[arg(value_enum)]
        name: Preset,
        /// Reduced sizes for quick runs (fig8 only).
        #[arg(long)]
        small: bool,
    },
}

fn globals(cli: &Cli) -> anyhow::Result<Globals> {
    let workers = match std::env::var(WORKERS_ENV) {
        Ok(v) if !v.trim().is_empty() => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|e| anyhow::anyhow!("{WORKERS_ENV}=`{v}`: {e}"))?,
        ),
        _ => cli.workers,
    };
    if [cli.tol_distinct, cli.tol_certify]
        .iter()
        .any(|t| t.is_nan() || *t <= 0.0)
    {
        anyhow::bail!("tolerances must be positive");
    }
    Ok(Globals {
        out: cli.out.clone(),
        seed: cli.seed,
        workers,
        tol_distinct: cli.tol_distinct,
        tol_certify: cli.tol_certify,
    })
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let g = globals(cli)?;
    match &cli.command {
        Command::Build(a) => commands::build(a, &g),
        Command::Spectrum(a) => commands::spectrum(a, &g),
        Command::Verify(a) => commands::verify(a, &g),
        Command::Nonortho(a) => commands::nonortho(a, &g),
        Command::Dynamics(a) => commands::dynamics(a, &g),
        Command::Sweep(a) => commands::sweep(a, &g),
        Command::PresetRun { name, small } => presets::run(*name, *small, &g),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let numerical = e.chain().any(|c| {
                c.downcast_ref::<pc_spectra::Error>()
                    .is_some_and(pc_spectra::Error::is_numerical)
            });
            ExitCode::from(if numerical { 2 } else { 1 })
        }
    }
}
