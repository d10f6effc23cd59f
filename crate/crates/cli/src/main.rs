use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use divform::pipeline::{
    matrix_dumps, run_spectrum, run_sweep, run_verify, spectrum_csv, sweep_summary_csv, Overrides, Report, RunConfig,
};
use divform::Exec;

#[derive(Parser, Debug)]
#[command(name = "divform", version, about = "Spectra of (η,T)-divergence-form operators and universal eigenvalue inequality checks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Override the grid resolution (cells per axis).
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// Override the number of eigenvalues.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Override the relative residual tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Override the solver seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write the spectrum as CSV (the summary table for `sweep`).
    #[arg(long, global = true, value_name = "FILE")]
    csv: Option<PathBuf>,
    /// Write K and M as coordinate triplets into this directory.
    #[arg(long, global = true, value_name = "DIR")]
    dump_matrices: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Smallest eigenpairs and operator constants.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Spectrum plus every applicable inequality check.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// One verification per value of a numeric config field.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Dotted path of the field, e.g. `problem.alpha`.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        values: Vec<f64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn load(path: &Path, g: &Global) -> Result<RunConfig> {
    let overrides = Overrides {
        resolution: g.resolution,
        k: g.k,
        tol: g.tol,
        seed: g.seed,
    };
    Ok(RunConfig::from_path(path)?.with_overrides(&overrides)?)
}

fn dump(config: &RunConfig, dir: &Path) -> Result<()> {
    let (k, m) = matrix_dumps(config)?;
    write_atomic(&dir.join("K.txt"), &k)?;
    write_atomic(&dir.join("M.txt"), &m)?;
    Ok(())
}

fn summarize(report: &Report) {
    let failures = report.failures();
    eprintln!(
        "{}: {} eigenvalues, {} checks, {} bounds, {} failing, {:.2} s",
        report.command,
        report.spectrum.len(),
        report.checks.len(),
        report.bounds.len(),
        failures.len(),
        report.wall_time_seconds
    );
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for f in failures {
        eprintln!("failed: {f}");
    }
}

fn single(config: &Path, out: &Path, g: &Global, verify: bool) -> Result<bool> {
    let cfg = load(config, g)?;
    if let Some(dir) = &g.dump_matrices {
        dump(&cfg, dir)?;
    }
    let report = if verify { run_verify(&cfg)? } else { run_spectrum(&cfg)? };
    write_atomic(out, &report.to_json()?)?;
    if let Some(csv) = &g.csv {
        write_atomic(csv, &spectrum_csv(&report))?;
    }
    summarize(&report);
    Ok(report.all_passed)
}

fn sweep(config: &Path, param: &str, values: &[f64], out_dir: &Path, g: &Global) -> Result<bool> {
    if values.is_empty() {
        bail!("--values needs at least one value");
    }
    let cfg = load(config, g)?;
    let reports = run_sweep(&cfg, param, values, Exec::Parallel)?;
    for (i, (v, r)) in values.iter().zip(&reports).enumerate() {
        write_atomic(&out_dir.join(format!("report_{i:03}.json")), &r.to_json()?)?;
        if let Some(dir) = &g.dump_matrices {
            dump(&cfg.with_param(param, *v)?, &dir.join(format!("point_{i:03}")))?;
        }
        eprint!("{param} = {v}: ");
        summarize(r);
    }
    let summary = sweep_summary_csv(values, &reports);
    write_atomic(&out_dir.join("summary.csv"), &summary)?;
    if let Some(csv) = &g.csv {
        write_atomic(csv, &summary)?;
    }
    Ok(reports.iter().all(|r| r.all_passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Spectrum { config, out } => single(config, out, &cli.global, false),
        Command::Verify { config, out } => single(config, out, &cli.global, true),
        Command::Sweep {
            config,
            param,
            values,
            out_dir,
        } => sweep(config, param, values, out_dir, &cli.global),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
