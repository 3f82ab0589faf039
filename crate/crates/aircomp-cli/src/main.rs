//! Command-line benchmark harness for AirComp receive beamforming.
//!
//! Subcommands: `solve` (one instance, printed summary), `sweep-antennas`,
//! `sweep-devices` (paired sweeps with CSV/JSON emission), and `validate`
//! (analytic vs. empirical MSE). Exit code 0 on success; any failure prints
//! a single `error: ...` line on stderr and exits nonzero.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, Subcommand};

use aircomp::algorithms::Algorithm;
use aircomp::experiments::{
    aggregate, emit_aggregates, emit_records, parse_config_file, run_sweep, solve_single,
    validate_mode, ExperimentRecord, OutputFormat, ParsedConfig, ProgressSink, SweepAxis,
};
use aircomp::{Error, Result};

#[derive(Parser)]
#[command(
    name = "aircomp",
    version,
    about = "AirComp receive-beamforming solvers and experiment sweeps"
)]
struct Cli {
    /// Flat key = value config file; paper defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed override.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Where to write records (or aggregates with --aggregate).
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Output format: csv or json.
    #[arg(long, global = true, default_value = "csv", value_name = "FMT")]
    format: String,

    /// Comma-separated subset of direct-sdr, direct-sca, sdr-opt, sca-opt.
    #[arg(long, global = true, value_name = "LIST")]
    algorithms: Option<String>,

    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Emit per-(algorithm, sweep value) aggregates instead of raw records.
    #[arg(long, global = true)]
    aggregate: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single instance at the configured N and K and print a summary.
    Solve,
    /// Sweep the number of AP antennas over `antenna_sweep`.
    SweepAntennas,
    /// Sweep the number of devices over `device_sweep`.
    SweepDevices,
    /// Check analytic MSE against simulated transmissions per realization.
    Validate,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn load_config(cli: &Cli) -> Result<ParsedConfig> {
    let mut parsed = match &cli.config {
        Some(path) => parse_config_file(path)?,
        None => ParsedConfig::default(),
    };
    if let Some(seed) = cli.seed {
        parsed.master_seed = seed;
    }
    if let Some(jobs) = cli.jobs {
        parsed.jobs = jobs;
    }
    if let Some(list) = &cli.algorithms {
        parsed.algorithms = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse::<Algorithm>)
            .collect::<Result<Vec<_>>>()?;
        if parsed.algorithms.is_empty() {
            return Err(Error::InvalidArgument("--algorithms list is empty".into()));
        }
    }
    Ok(parsed)
}

fn run(cli: Cli) -> Result<()> {
    let format: OutputFormat = cli.format.parse()?;
    let parsed = load_config(&cli)?;
    match cli.command {
        Command::Solve => cmd_solve(&cli, &parsed, format),
        Command::SweepAntennas => cmd_sweep(&cli, &parsed, SweepAxis::Antennas, format),
        Command::SweepDevices => cmd_sweep(&cli, &parsed, SweepAxis::Devices, format),
        Command::Validate => cmd_validate(&parsed),
    }
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map_or_else(|| "-".to_string(), |v| format!("{v:.3e}"))
}

fn cmd_solve(cli: &Cli, parsed: &ParsedConfig, format: OutputFormat) -> Result<()> {
    let solutions = solve_single(&parsed.system, &parsed.algorithms, parsed.master_seed)?;
    println!(
        "N = {}, K = {}, seed = {}",
        parsed.system.num_antennas, parsed.system.num_devices, parsed.master_seed
    );
    println!(
        "{:<12} {:>12} {:>6} {:>10} {:>10} {:>10}",
        "algorithm", "mse", "iters", "solve_s", "init_s", "sdp_gap"
    );
    for (algorithm, solution) in &solutions {
        let d = &solution.diagnostics;
        println!(
            "{:<12} {:>12.5e} {:>6} {:>10.4} {:>10} {:>10}",
            algorithm.name(),
            solution.mse,
            d.iterations,
            d.solve_seconds,
            d.init_seconds.map_or_else(|| "-".to_string(), |v| format!("{v:.4}")),
            fmt_opt(d.sdp_gap),
        );
        for w in &d.warnings {
            eprintln!("note: {}: {w}", algorithm.name());
        }
    }

    if let Some(path) = &cli.output {
        let records: Vec<ExperimentRecord> = solutions
            .iter()
            .map(|(algorithm, solution)| ExperimentRecord {
                realization: 0,
                seed: parsed.master_seed,
                algorithm: algorithm.name().to_string(),
                antennas: parsed.system.num_antennas,
                devices: parsed.system.num_devices,
                mse: Some(solution.mse),
                solve_seconds: solution.diagnostics.solve_seconds,
                init_seconds: solution.diagnostics.init_seconds,
                iterations: solution.diagnostics.iterations,
                sdp_gap: solution.diagnostics.sdp_gap,
                status: "ok".to_string(),
                channel_digest: None,
            })
            .collect();
        emit_records(&records, format, path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Streams progress to stderr and, when an output path is set, appends every
/// finished record to `<output>.partial` so a crash never loses completed
/// work. The final ordered file replaces the partial one at the end.
struct CliSink {
    total: usize,
    done: AtomicUsize,
    partial: Option<Mutex<csv::Writer<std::fs::File>>>,
}

impl CliSink {
    fn new(total: usize, partial_path: Option<&Path>) -> Result<Self> {
        let partial = match partial_path {
            Some(path) => {
                let file = std::fs::File::create(path).map_err(|e| Error::Io {
                    path: path.to_path_buf(),
                    source: e,
                })?;
                Some(Mutex::new(csv::Writer::from_writer(file)))
            }
            None => None,
        };
        Ok(Self { total, done: AtomicUsize::new(0), partial })
    }
}

impl ProgressSink for CliSink {
    fn on_record(&self, record: &ExperimentRecord) {
        let done = self.done.fetch_add(1, Ordering::Relaxed) + 1;
        eprintln!(
            "[{done}/{}] {} N={} K={} r={} mse={} solve={:.3}s status={}",
            self.total,
            record.algorithm,
            record.antennas,
            record.devices,
            record.realization,
            fmt_opt(record.mse),
            record.solve_seconds,
            record.status
        );
        if let Some(writer) = &self.partial {
            if let Ok(mut w) = writer.lock() {
                let _ = w.serialize(record);
                let _ = w.flush();
            }
        }
    }
}

fn cmd_sweep(cli: &Cli, parsed: &ParsedConfig, axis: SweepAxis, format: OutputFormat) -> Result<()> {
    let config = parsed.experiment(axis)?;
    let total = config.values.len() * config.system.realizations * config.algorithms.len();
    let partial_path = cli.output.as_ref().map(|p| PathBuf::from(format!("{}.partial", p.display())));
    let sink = CliSink::new(total, partial_path.as_deref())?;

    let records = run_sweep(&config, &sink)?;
    let rows = aggregate(&records);

    if let Some(path) = &cli.output {
        if cli.aggregate {
            emit_aggregates(&rows, format, path)?;
        } else {
            emit_records(&records, format, path)?;
        }
        if let Some(partial) = &partial_path {
            let _ = std::fs::remove_file(partial);
        }
        println!("wrote {}", path.display());
    }

    println!(
        "{:<12} {:>9} {:>9} {:>12} {:>12} {:>12} {:>8}",
        "algorithm", "antennas", "devices", "mean_mse", "stderr_mse", "mean_solve", "failed"
    );
    for row in &rows {
        println!(
            "{:<12} {:>9} {:>9} {:>12} {:>12} {:>12} {:>8}",
            row.algorithm,
            row.antennas,
            row.devices,
            fmt_opt(row.mean_mse),
            fmt_opt(row.stderr_mse),
            fmt_opt(row.mean_solve_seconds),
            row.failed_count
        );
    }
    Ok(())
}

fn cmd_validate(parsed: &ParsedConfig) -> Result<()> {
    let report = validate_mode(parsed)?;
    println!(
        "validating {} over {} realizations, {} samples each",
        report.algorithm,
        report.rows.len(),
        report.samples_per_realization
    );
    println!("{:<12} {:>14} {:>14} {:>10}", "realization", "analytic", "empirical", "rel_gap");
    for row in &report.rows {
        println!(
            "{:<12} {:>14.6e} {:>14.6e} {:>10.4}",
            row.realization, row.analytic_mse, row.empirical_mse, row.relative_gap
        );
    }
    println!("mean relative gap: {:.4}", report.mean_relative_gap);
    if report.pass {
        println!("validation: PASS");
        Ok(())
    } else {
        Err(Error::SolverFailure(format!(
            "validation failed: mean relative gap {:.4} exceeds threshold",
            report.mean_relative_gap
        )))
    }
}
