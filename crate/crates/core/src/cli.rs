//! Command-line front end: `analyze`, `solve`, `sweep` and `flatzone`.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 solver
//! non-convergence, 3 invalid coefficient sequence.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::analysis::{diagnose, lambda_sweep};
use crate::config::ExperimentConfig;
use crate::elliptic::fmt_num;
use crate::error::{Error, Result};
use crate::pipeline::{converge_scheme, flat_zone, flat_zone_entry, Scheme, ZoneStatus};

pub const TOOL: &str = concat!("gpme ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Parser)]
#[command(
    name = "gpme",
    version,
    about = "Existence diagnostics and approximating solutions for power-series porous medium problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Diagnose the configured problem and write the report as JSON.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Report path; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute u_n on the configured grid.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify evenly spaced load factors.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        lambda_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        lambda_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Flat-zone mask of u_{n_max} plus a summary JSON next to it.
    Flatzone {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Maps an error to the process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidSequence(_) => 3,
        Error::NoConvergence { .. } | Error::Domain { .. } => 2,
        _ => 1,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("gpme: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Analyze { config, out } => cmd_analyze(config, out.as_deref()),
        Command::Solve { config, n, out } => cmd_solve(config, *n, out),
        Command::Sweep {
            config,
            lambda_min,
            lambda_max,
            steps,
            out,
        } => cmd_sweep(config, *lambda_min, *lambda_max, *steps, out),
        Command::Flatzone { config, n_max, out } => cmd_flatzone(config, *n_max, out),
    }
}

fn provenance(cfg: &ExperimentConfig) -> String {
    format!("{TOOL} config={}", cfg.short_hash())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn with_provenance(cfg: &ExperimentConfig, mut m: Map<String, Value>) -> Value {
    m.insert("tool".into(), json!(TOOL));
    m.insert("config_hash".into(), json!(cfg.hash));
    Value::Object(m)
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, v).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e.into(),
    })?;
    writeln!(w).and_then(|_| w.flush()).map_err(io_err(path))
}

pub fn cmd_analyze(config: &Path, out: Option<&Path>) -> Result<()> {
    let cfg = ExperimentConfig::load(config)?;
    let seq = cfg.sequence()?;
    let problem = cfg.problem()?;
    let report = diagnose(&seq, &problem, &cfg.tolerances())?;
    let doc = with_provenance(&cfg, report.to_json());
    match out {
        Some(p) => {
            write_json(p, &doc)?;
            println!(
                "verdict {} at lambda = {}; bracket [{}, {}]",
                report.verdict, report.lambda, report.lambda_exist, report.lambda_nonexist
            );
        }
        None => println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("report serializes")
        ),
    }
    Ok(())
}

/// Writes `u_n` and, next to it, the history over the configured schedule
/// entries below `n` (`<out>.history.csv`).
pub fn cmd_solve(config: &Path, n: usize, out: &Path) -> Result<()> {
    if n == 0 {
        return Err(Error::Config("--n must be at least 1".into()));
    }
    let cfg = ExperimentConfig::load(config)?;
    let seq = cfg.sequence()?;
    let problem = cfg.problem()?;
    let scheme = Scheme::new(&seq, &problem, &cfg.tolerances())?;
    let mut schedule: Vec<usize> = cfg
        .run
        .n_schedule
        .iter()
        .copied()
        .filter(|&k| k < n)
        .collect();
    schedule.push(n);
    // stop_tol < 0 never triggers, so the run always reaches n.
    let run = converge_scheme(&scheme, &schedule, -1.0)?;
    let tag = provenance(&cfg);
    let mut w = create(out)?;
    run.converged_u
        .write_csv(&mut w, Some(&tag))
        .and_then(|_| w.flush())
        .map_err(io_err(out))?;
    let hist_path = sibling(out, "history.csv");
    let mut h = create(&hist_path)?;
    run.write_history_csv(&mut h, Some(&tag), cfg.run.tail_level)
        .and_then(|_| h.flush())
        .map_err(io_err(&hist_path))?;
    println!("u_{n}: sup = {}", fmt_num(run.converged_u.sup_norm()));
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

/// Evenly spaced load factors from `min` to `max` inclusive.
pub fn sweep_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && min.is_finite() && max.is_finite()) {
        return Err(Error::Config(format!(
            "--lambda-min must be positive, got {min}"
        )));
    }
    if min > max {
        return Err(Error::Config(format!(
            "empty range: --lambda-min {min} exceeds --lambda-max {max}"
        )));
    }
    if steps == 0 {
        return Err(Error::Config("--steps must be at least 1".into()));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let d = (max - min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| {
            if k + 1 == steps {
                max
            } else {
                min + d * k as f64
            }
        })
        .collect())
}

pub fn cmd_sweep(
    config: &Path,
    lambda_min: f64,
    lambda_max: f64,
    steps: usize,
    out: &Path,
) -> Result<()> {
    let lambdas = sweep_grid(lambda_min, lambda_max, steps)?;
    let cfg = ExperimentConfig::load(config)?;
    let seq = cfg.sequence()?;
    let problem = cfg.problem()?;
    let sweep = lambda_sweep(&seq, &problem, &lambdas, &cfg.tolerances())?;
    let mut w = create(out)?;
    let mut body = format!("# {}\nlambda,verdict\n", provenance(&cfg));
    for (l, v) in &sweep.entries {
        body.push_str(&format!("{},{v}\n", fmt_num(*l)));
    }
    w.write_all(body.as_bytes())
        .and_then(|_| w.flush())
        .map_err(io_err(out))?;
    println!("bracket [{}, {}]", sweep.bracket.0, sweep.bracket.1);
    Ok(())
}

/// Writes the zone mask CSV and `<out stem>.json` with the summary.
pub fn cmd_flatzone(config: &Path, n_max: usize, out: &Path) -> Result<()> {
    if n_max == 0 {
        return Err(Error::Config("--n-max must be at least 1".into()));
    }
    let cfg = ExperimentConfig::load(config)?;
    let seq = cfg.sequence()?;
    let problem = cfg.problem()?;
    let tols = cfg.tolerances();
    let zone = flat_zone(&seq, &problem, n_max, &tols)?;
    let mut summary = Map::new();
    summary.insert("status".into(), json!(zone.status.as_str()));
    summary.insert("n".into(), json!(zone.n));
    summary.insert("sigma".into(), json!(zone.sigma));
    summary.insert("level".into(), json!(zone.level));
    summary.insert("measure".into(), json!(zone.measure));
    summary.insert("mean_gap".into(), json!(zone.mean_gap));
    if zone.status == ZoneStatus::Applicable && zone.sigma > 0.0 {
        // Entry into the zone shrunk by 0.1 along the configured schedule.
        let mut schedule: Vec<usize> = cfg
            .run
            .n_schedule
            .iter()
            .copied()
            .filter(|&k| k < n_max)
            .collect();
        schedule.push(n_max);
        let scheme = Scheme::new(&seq, &problem, &tols)?;
        let entry = flat_zone_entry(&scheme, &schedule, zone.level + 0.1, zone.sigma, 0.01)?;
        summary.insert("entry_level".into(), json!(zone.level + 0.1));
        summary.insert("entry_n".into(), json!(entry.map(|e| e.0)));
        summary.insert("entry_gap".into(), json!(entry.map(|e| e.1)));
    }
    let tag = provenance(&cfg);
    let mut w = create(out)?;
    zone.mask
        .write_csv(&mut w, Some(&tag))
        .and_then(|_| w.flush())
        .map_err(io_err(out))?;
    write_json(&out.with_extension("json"), &with_provenance(&cfg, summary))?;
    println!(
        "flat zone {}: measure {}",
        zone.status.as_str(),
        fmt_num(zone.measure)
    );
    Ok(())
}
