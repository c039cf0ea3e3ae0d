//! Experiment runner: forward solves, probe sweeps and verification
//! suites over a JSON experiment configuration.
//!
//! Exit codes: 0 success, 1 check failure, 2 usage/configuration error.

mod config;
mod manifest;
mod runner;
mod verify;

use clap::{Parser, Subcommand};
use config::ExperimentConfig;
use lsprobe_core::error::Error;
use manifest::ManifestWriter;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lsprobe", version, about = "Volume-integral scattering solvers and the singular-source boundary probe")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (1 reproduces runs bit-exactly by default).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Reserved for future randomized features; recorded in the manifest.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the forward scattering problem and write the far field.
    Forward {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// March point sources toward candidate boundary points and fit the
    /// logarithmic blow-up of the indicator.
    Probe {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a verification suite and append its oracle report.
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(2);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .ok();

    let outcome = match &cli.command {
        Command::Forward { config, out } => run_experiment(config, out, &cli, runner::run_forward),
        Command::Probe { config, out } => run_experiment(config, out, &cli, runner::run_probe),
        Command::Verify { suite, out } => run_verify(*suite, out),
    };

    match outcome {
        Ok(code) => code,
        Err(Error::Config(msg)) | Err(Error::Precondition(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn run_experiment(
    config_path: &PathBuf,
    out: &PathBuf,
    cli: &Cli,
    task: fn(&config::Experiment, &mut ManifestWriter, &std::path::Path) -> lsprobe_core::Result<()>,
) -> lsprobe_core::Result<ExitCode> {
    let bytes = std::fs::read(config_path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", config_path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Error::Config("config is not valid UTF-8".into()))?;
    let experiment = ExperimentConfig::parse(&text)?.build()?;
    println!(
        "{} run on a {}^3 grid (h = {:.5})",
        runner::describe(&experiment),
        experiment.grid.dims[0],
        experiment.grid.spacing
    );

    let mut manifest = ManifestWriter::begin(out, &bytes, cli.seed, cli.threads)?;
    task(&experiment, &mut manifest, out)?;
    manifest.finish()?;
    Ok(ExitCode::SUCCESS)
}

fn run_verify(suite: verify::Suite, out: &PathBuf) -> lsprobe_core::Result<ExitCode> {
    let rows = verify::run_suite(suite)?;
    std::fs::create_dir_all(out)?;
    let path = out.join("oracle_report.csv");
    let fresh = !path.exists();
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)?;
    let mut w = BufWriter::new(file);
    let reports: Vec<_> = rows.iter().map(|r| r.report.clone()).collect();
    lsprobe_core::io::append_oracle_reports(&mut w, fresh, &reports)?;
    drop(w);

    let mut failed = 0usize;
    for row in &rows {
        let status = if row.passes() { "pass" } else { "FAIL" };
        if !row.passes() {
            failed += 1;
        }
        println!(
            "{status}  {:<32} rel_err {:.3e} (tol {:.1e})",
            row.report.name, row.report.rel_error, row.tolerance
        );
    }
    println!(
        "{} rows, {} failed; report appended to {}",
        rows.len(),
        failed,
        path.display()
    );
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
