//! Experiment orchestration: flat config files, paired sweeps over antennas
//! or devices, aggregation, CSV/JSON emission, and Monte Carlo validation.
//!
//! Sweeps derive one child seed per (sweep value, realization); every
//! selected algorithm at that point consumes the same channel realization, so
//! comparisons are paired. Realizations may run on a thread pool; records are
//! merged back in task order, making the output identical for any
//! parallelism degree (wall-clock fields aside).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write as _};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algorithms::{self, Algorithm};
use crate::channel::sample_channel;
use crate::config::{dbm_to_watts, db_to_linear, SystemConfig};
use crate::error::{Error, Result};
use crate::signal::simulate_transmission;
use crate::stream::{derive_seed, derive_stream};

/// Stream tags partitioning the per-point seed space.
const CHANNEL_STREAM: u64 = 0;
const ALGO_STREAM_BASE: u64 = 16;
const SIM_STREAM: u64 = 32;
/// Axis tags keep antenna and device sweeps statistically independent.
const TAG_ANTENNAS: u64 = 1;
const TAG_DEVICES: u64 = 2;
const TAG_VALIDATE: u64 = 3;
const TAG_SOLVE: u64 = 4;
const WARMUP_REALIZATION: u64 = u64::MAX;

/// Mean relative analytic-vs-empirical gap accepted by validation mode.
pub const VALIDATION_GAP_THRESHOLD: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Antennas,
    Devices,
}

impl SweepAxis {
    fn tag(&self) -> u64 {
        match self {
            SweepAxis::Antennas => TAG_ANTENNAS,
            SweepAxis::Devices => TAG_DEVICES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidArgument(format!("unknown format '{other}' (csv|json)"))),
        }
    }
}

/// Everything a config file can express, with paper defaults for every key.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub system: SystemConfig,
    pub antenna_sweep: Vec<usize>,
    pub device_sweep: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub master_seed: u64,
    /// Worker threads for sweeps; 0 picks the runtime default.
    pub jobs: usize,
    /// Monte Carlo samples per realization in validation mode.
    pub validation_samples: usize,
}

impl Default for ParsedConfig {
    fn default() -> Self {
        Self {
            system: SystemConfig::default(),
            antenna_sweep: vec![8, 16, 32, 64],
            device_sweep: vec![2, 4, 6, 8, 10, 12],
            algorithms: Algorithm::ALL.to_vec(),
            master_seed: 1,
            jobs: 0,
            validation_samples: 100_000,
        }
    }
}

impl ParsedConfig {
    /// Materializes the sweep along one axis.
    pub fn experiment(&self, axis: SweepAxis) -> Result<ExperimentConfig> {
        let values = match axis {
            SweepAxis::Antennas => self.antenna_sweep.clone(),
            SweepAxis::Devices => self.device_sweep.clone(),
        };
        let config = ExperimentConfig {
            system: self.system.clone(),
            axis,
            values,
            algorithms: self.algorithms.clone(),
            master_seed: self.master_seed,
            jobs: self.jobs,
        };
        config.validate()?;
        Ok(config)
    }
}

/// One sweep: a base system, the axis and its values, and the algorithm set.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    pub axis: SweepAxis,
    pub values: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub master_seed: u64,
    pub jobs: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        validate_sweep_values(&self.values, "sweep values")?;
        if self.algorithms.is_empty() {
            return Err(Error::InvalidArgument("algorithm set must be non-empty".into()));
        }
        Ok(())
    }
}

fn validate_sweep_values(values: &[usize], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidArgument(format!("{what} must be a non-empty list")));
    }
    for pair in values.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::InvalidArgument(format!(
                "{what} must be strictly increasing, got {:?}",
                values
            )));
        }
    }
    if values[0] == 0 {
        return Err(Error::InvalidArgument(format!("{what} must be positive integers")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Flat key-value config parsing
// ---------------------------------------------------------------------------

const KNOWN_KEYS: &[&str] = &[
    "num_antennas",
    "num_devices",
    "power_dbm",
    "noise_power_dbm",
    "path_loss_ref_db",
    "path_loss_ref_distance_m",
    "path_loss_exponent",
    "rician_factor",
    "ap_position_m",
    "region_center_m",
    "region_radius_m",
    "antenna_spacing_wavelengths",
    "sca_tolerance",
    "sca_max_iterations",
    "sdp_tolerance",
    "sdp_max_iterations",
    "randomization_candidates",
    "realizations",
    "antenna_sweep",
    "device_sweep",
    "algorithms",
    "master_seed",
    "jobs",
    "validation_samples",
];

/// Common shorthand -> canonical key, consulted before edit distance.
const KEY_ALIASES: &[(&str, &str)] = &[
    ("sigma", "noise_power_dbm"),
    ("sigma2", "noise_power_dbm"),
    ("noise", "noise_power_dbm"),
    ("noise_power", "noise_power_dbm"),
    ("noise_dbm", "noise_power_dbm"),
    ("power", "power_dbm"),
    ("transmit_power", "power_dbm"),
    ("power_limit", "power_dbm"),
    ("alpha", "path_loss_exponent"),
    ("beta", "rician_factor"),
    ("rician_beta", "rician_factor"),
    ("t0", "path_loss_ref_db"),
    ("d0", "path_loss_ref_distance_m"),
    ("epsilon", "sca_tolerance"),
    ("tolerance", "sca_tolerance"),
    ("antennas", "num_antennas"),
    ("devices", "num_devices"),
    ("seed", "master_seed"),
    ("samples", "validation_samples"),
    ("threads", "jobs"),
];

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=b.len() {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn suggest_key(unknown: &str) -> &'static str {
    let lower = unknown.to_ascii_lowercase();
    for (alias, canonical) in KEY_ALIASES {
        if *alias == lower {
            return canonical;
        }
    }
    KNOWN_KEYS
        .iter()
        .min_by_key(|k| levenshtein(&lower, k))
        .copied()
        .unwrap_or("num_antennas")
}

fn parse_f64(value: &str, key: &str, line: usize) -> Result<f64> {
    value.trim().parse::<f64>().map_err(|_| {
        Error::config(Some(line), format!("key '{key}': expected a number, got '{value}'"))
    })
}

fn parse_usize(value: &str, key: &str, line: usize) -> Result<usize> {
    value.trim().parse::<usize>().map_err(|_| {
        Error::config(Some(line), format!("key '{key}': expected a non-negative integer, got '{value}'"))
    })
}

fn parse_u64(value: &str, key: &str, line: usize) -> Result<u64> {
    value.trim().parse::<u64>().map_err(|_| {
        Error::config(Some(line), format!("key '{key}': expected an unsigned integer, got '{value}'"))
    })
}

fn parse_vec3(value: &str, key: &str, line: usize) -> Result<nalgebra::Vector3<f64>> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(Error::config(
            Some(line),
            format!("key '{key}': expected three numbers, got '{value}'"),
        ));
    }
    Ok(nalgebra::Vector3::new(
        parse_f64(parts[0], key, line)?,
        parse_f64(parts[1], key, line)?,
        parse_f64(parts[2], key, line)?,
    ))
}

fn parse_usize_list(value: &str, key: &str, line: usize) -> Result<Vec<usize>> {
    let items: Vec<&str> =
        value.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(Error::config(Some(line), format!("key '{key}': list must be non-empty")));
    }
    items.iter().map(|s| parse_usize(s, key, line)).collect()
}

fn parse_algorithms(value: &str, line: usize) -> Result<Vec<Algorithm>> {
    let items: Vec<&str> = value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(Error::config(Some(line), "key 'algorithms': list must be non-empty"));
    }
    items
        .iter()
        .map(|s| s.parse::<Algorithm>().map_err(|e| Error::config(Some(line), e.to_string())))
        .collect()
}

/// Parses the flat `key = value` configuration format. Unknown keys are
/// rejected with the nearest known key as a suggestion; omitted keys keep
/// their paper defaults; dB-valued keys are converted to linear units here.
pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let mut cfg = ParsedConfig::default();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(Some(line_no), format!("expected 'key = value', got '{line}'"))
        })?;
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::config(
                Some(line_no),
                format!("unknown key '{key}' (did you mean '{}'?)", suggest_key(key)),
            ));
        }
        if let Some(first) = seen.insert(key.to_string(), line_no) {
            return Err(Error::config(
                Some(line_no),
                format!("duplicate key '{key}' (first set on line {first})"),
            ));
        }

        match key {
            "num_antennas" => cfg.system.num_antennas = parse_usize(value, key, line_no)?,
            "num_devices" => cfg.system.num_devices = parse_usize(value, key, line_no)?,
            "power_dbm" => cfg.system.power_limit = dbm_to_watts(parse_f64(value, key, line_no)?),
            "noise_power_dbm" => {
                cfg.system.noise_power = dbm_to_watts(parse_f64(value, key, line_no)?)
            }
            "path_loss_ref_db" => {
                cfg.system.fading.ref_gain = db_to_linear(parse_f64(value, key, line_no)?)
            }
            "path_loss_ref_distance_m" => {
                cfg.system.fading.ref_distance = parse_f64(value, key, line_no)?
            }
            "path_loss_exponent" => cfg.system.fading.exponent = parse_f64(value, key, line_no)?,
            // linear LOS/scatter power ratio, not dB
            "rician_factor" => cfg.system.fading.rician_factor = parse_f64(value, key, line_no)?,
            "ap_position_m" => cfg.system.geometry.ap_position = parse_vec3(value, key, line_no)?,
            "region_center_m" => {
                cfg.system.geometry.region_center = parse_vec3(value, key, line_no)?
            }
            "region_radius_m" => {
                cfg.system.geometry.region_radius = parse_f64(value, key, line_no)?
            }
            "antenna_spacing_wavelengths" => {
                cfg.system.geometry.antenna_spacing = parse_f64(value, key, line_no)?
            }
            "sca_tolerance" => cfg.system.solver.sca_tolerance = parse_f64(value, key, line_no)?,
            "sca_max_iterations" => {
                cfg.system.solver.sca_max_iterations = parse_usize(value, key, line_no)?
            }
            "sdp_tolerance" => cfg.system.solver.sdp.tolerance = parse_f64(value, key, line_no)?,
            "sdp_max_iterations" => {
                cfg.system.solver.sdp.max_iterations = parse_usize(value, key, line_no)?
            }
            "randomization_candidates" => {
                cfg.system.solver.randomization_candidates = parse_usize(value, key, line_no)?
            }
            "realizations" => cfg.system.realizations = parse_usize(value, key, line_no)?,
            "antenna_sweep" => cfg.antenna_sweep = parse_usize_list(value, key, line_no)?,
            "device_sweep" => cfg.device_sweep = parse_usize_list(value, key, line_no)?,
            "algorithms" => cfg.algorithms = parse_algorithms(value, line_no)?,
            "master_seed" => cfg.master_seed = parse_u64(value, key, line_no)?,
            "jobs" => cfg.jobs = parse_usize(value, key, line_no)?,
            "validation_samples" => cfg.validation_samples = parse_usize(value, key, line_no)?,
            _ => unreachable!("key membership checked above"),
        }
    }

    cfg.system.validate().map_err(|e| Error::config(None, e.to_string()))?;
    validate_sweep_values(&cfg.antenna_sweep, "antenna_sweep")
        .map_err(|e| Error::config(None, e.to_string()))?;
    validate_sweep_values(&cfg.device_sweep, "device_sweep")
        .map_err(|e| Error::config(None, e.to_string()))?;
    if cfg.validation_samples == 0 {
        return Err(Error::config(None, "validation_samples must be >= 1"));
    }
    Ok(cfg)
}

pub fn parse_config_file(path: &Path) -> Result<ParsedConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

// ---------------------------------------------------------------------------
// Sweep execution
// ---------------------------------------------------------------------------

/// One (realization, algorithm, sweep point) result row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub realization: usize,
    /// Child seed shared by all algorithms at this sweep point.
    pub seed: u64,
    pub algorithm: String,
    pub antennas: usize,
    pub devices: usize,
    /// Analytic MSE; absent when the run failed.
    pub mse: Option<f64>,
    pub solve_seconds: f64,
    /// SDR initialization time, present for the SCA variants.
    pub init_seconds: Option<f64>,
    pub iterations: usize,
    pub sdp_gap: Option<f64>,
    /// "ok" or a short failure tag; failures never abort a sweep.
    pub status: String,
    /// In-memory pairing check; not part of the emitted schema.
    #[serde(skip)]
    pub channel_digest: Option<u64>,
}

impl ExperimentRecord {
    /// Copy with wall-clock fields zeroed, for determinism comparisons.
    pub fn with_zeroed_times(mut self) -> Self {
        self.solve_seconds = 0.0;
        self.init_seconds = self.init_seconds.map(|_| 0.0);
        self
    }
}

/// Receives records as they complete (in nondeterministic order under
/// parallel execution); useful for progress display and incremental flushing.
pub trait ProgressSink: Sync {
    fn on_record(&self, record: &ExperimentRecord);
}

/// Sink that drops everything.
pub struct NullSink;

impl ProgressSink for NullSink {
    fn on_record(&self, _record: &ExperimentRecord) {}
}

fn apply_axis(system: &SystemConfig, axis: SweepAxis, value: usize) -> SystemConfig {
    let mut sys = system.clone();
    match axis {
        SweepAxis::Antennas => sys.num_antennas = value,
        SweepAxis::Devices => sys.num_devices = value,
    }
    sys
}

fn run_point(
    config: &ExperimentConfig,
    value: usize,
    realization: u64,
    sink: Option<&dyn ProgressSink>,
) -> Result<Vec<ExperimentRecord>> {
    let system = apply_axis(&config.system, config.axis, value);
    let child_seed = derive_seed(config.master_seed, &[config.axis.tag(), value as u64, realization]);
    let mut channel_rng = derive_stream(child_seed, &[CHANNEL_STREAM]);
    let channels = sample_channel(
        &system.geometry,
        &system.fading,
        system.num_antennas,
        system.num_devices,
        &mut channel_rng,
    )?;
    let digest = channels.digest();

    let mut records = Vec::with_capacity(config.algorithms.len());
    for &algorithm in &config.algorithms {
        let mut algo_rng =
            derive_stream(child_seed, &[ALGO_STREAM_BASE + algorithm.randomization_stream_id()]);
        let outcome = catch_unwind(AssertUnwindSafe(|| {
            algorithms::run(algorithm, &channels, &system, &mut algo_rng)
        }));
        let mut record = ExperimentRecord {
            realization: realization as usize,
            seed: child_seed,
            algorithm: algorithm.name().to_string(),
            antennas: system.num_antennas,
            devices: system.num_devices,
            mse: None,
            solve_seconds: 0.0,
            init_seconds: None,
            iterations: 0,
            sdp_gap: None,
            status: "ok".to_string(),
            channel_digest: Some(digest),
        };
        match outcome {
            Ok(Ok(solution)) => {
                record.mse = Some(solution.mse);
                record.solve_seconds = solution.diagnostics.solve_seconds;
                record.init_seconds = solution.diagnostics.init_seconds;
                record.iterations = solution.diagnostics.iterations;
                record.sdp_gap = solution.diagnostics.sdp_gap;
            }
            Ok(Err(err)) => record.status = err.status_tag().to_string(),
            Err(_) => record.status = "panic".to_string(),
        }
        if let Some(sink) = sink {
            sink.on_record(&record);
        }
        records.push(record);
    }
    Ok(records)
}

/// Runs the full sweep. Each (value, realization) pair derives its own child
/// seed; one warm-up point runs first and is discarded so first-touch costs
/// do not pollute the timing columns. Algorithm failures become status rows.
pub fn run_sweep(
    config: &ExperimentConfig,
    sink: &dyn ProgressSink,
) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;

    // warm-up: first sweep value, reserved realization tag, results dropped
    let _ = run_point(config, config.values[0], WARMUP_REALIZATION, None);

    let tasks: Vec<(usize, u64)> = config
        .values
        .iter()
        .flat_map(|&v| (0..config.system.realizations as u64).map(move |r| (v, r)))
        .collect();

    let execute = |&(value, realization): &(usize, u64)| -> Result<Vec<ExperimentRecord>> {
        run_point(config, value, realization, Some(sink))
    };

    let nested: Vec<Vec<ExperimentRecord>> = run_tasks(&tasks, config.jobs, execute)?;
    Ok(nested.into_iter().flatten().collect())
}

#[cfg(feature = "parallel")]
fn run_tasks<T: Sync, R: Send>(
    tasks: &[T],
    jobs: usize,
    execute: impl Fn(&T) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    use rayon::prelude::*;
    if jobs == 1 {
        return tasks.iter().map(&execute).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs) // 0 = rayon default
        .build()
        .map_err(|e| Error::SolverFailure(format!("failed to build thread pool: {e}")))?;
    pool.install(|| tasks.par_iter().map(&execute).collect())
}

#[cfg(not(feature = "parallel"))]
fn run_tasks<T: Sync, R: Send>(
    tasks: &[T],
    _jobs: usize,
    execute: impl Fn(&T) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    tasks.iter().map(&execute).collect()
}

/// Runs the selected algorithms once on a single derived channel; the
/// `solve` subcommand's backend.
pub fn solve_single(
    system: &SystemConfig,
    selected: &[Algorithm],
    master_seed: u64,
) -> Result<Vec<(Algorithm, crate::signal::BeamformingSolution)>> {
    system.validate()?;
    if selected.is_empty() {
        return Err(Error::InvalidArgument("algorithm set must be non-empty".into()));
    }
    let child_seed = derive_seed(master_seed, &[TAG_SOLVE, 0]);
    let mut channel_rng = derive_stream(child_seed, &[CHANNEL_STREAM]);
    let channels = sample_channel(
        &system.geometry,
        &system.fading,
        system.num_antennas,
        system.num_devices,
        &mut channel_rng,
    )?;
    let mut out = Vec::new();
    for &algorithm in selected {
        let mut algo_rng =
            derive_stream(child_seed, &[ALGO_STREAM_BASE + algorithm.randomization_stream_id()]);
        let solution = algorithms::run(algorithm, &channels, system, &mut algo_rng)?;
        out.push((algorithm, solution));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

/// Per-(algorithm, sweep point) means and standard errors over ok rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub algorithm: String,
    pub antennas: usize,
    pub devices: usize,
    pub ok_count: usize,
    /// Non-ok rows in this cell; a cell with ok_count = 0 is all-failed.
    pub failed_count: usize,
    pub mean_mse: Option<f64>,
    pub stderr_mse: Option<f64>,
    pub mean_solve_seconds: Option<f64>,
    pub stderr_solve_seconds: Option<f64>,
    pub mean_init_seconds: Option<f64>,
}

/// Mean and standard error of the mean (n−1 variance), input order free.
fn mean_stderr(values: &mut Vec<f64>) -> (f64, f64) {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Groups records by (antennas, devices, algorithm) and reduces each cell.
/// Cells where every row failed are kept (and flagged by ok_count = 0)
/// rather than dropped.
pub fn aggregate(records: &[ExperimentRecord]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(usize, usize, String), Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.antennas, r.devices, r.algorithm.clone())).or_default().push(r);
    }

    groups
        .into_iter()
        .map(|((antennas, devices, algorithm), rows)| {
            let ok: Vec<&&ExperimentRecord> = rows.iter().filter(|r| r.status == "ok").collect();
            let failed_count = rows.len() - ok.len();
            let mut mses: Vec<f64> = ok.iter().filter_map(|r| r.mse).collect();
            let mut solves: Vec<f64> = ok.iter().map(|r| r.solve_seconds).collect();
            let mut inits: Vec<f64> = ok.iter().filter_map(|r| r.init_seconds).collect();
            let (mean_mse, stderr_mse) = if mses.is_empty() {
                (None, None)
            } else {
                let (m, s) = mean_stderr(&mut mses);
                (Some(m), Some(s))
            };
            let (mean_solve, stderr_solve) = if solves.is_empty() {
                (None, None)
            } else {
                let (m, s) = mean_stderr(&mut solves);
                (Some(m), Some(s))
            };
            let mean_init = if inits.is_empty() { None } else { Some(mean_stderr(&mut inits).0) };
            AggregateRow {
                algorithm,
                antennas,
                devices,
                ok_count: ok.len(),
                failed_count,
                mean_mse,
                stderr_mse,
                mean_solve_seconds: mean_solve,
                stderr_solve_seconds: stderr_solve,
                mean_init_seconds: mean_init,
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

const RECORD_HEADER: [&str; 11] = [
    "realization",
    "seed",
    "algorithm",
    "antennas",
    "devices",
    "mse",
    "solve_seconds",
    "init_seconds",
    "iterations",
    "sdp_gap",
    "status",
];

const AGGREGATE_HEADER: [&str; 10] = [
    "algorithm",
    "antennas",
    "devices",
    "ok_count",
    "failed_count",
    "mean_mse",
    "stderr_mse",
    "mean_solve_seconds",
    "stderr_solve_seconds",
    "mean_init_seconds",
];

fn write_csv<T: Serialize>(rows: &[T], header: &[&str], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(BufWriter::new(file));
    writer.write_record(header).map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    for row in rows {
        writer.serialize(row).map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn write_json<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, rows)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    writer.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Writes records with the fixed column schema. Floats are emitted in
/// shortest round-trip form by both backends, so emit → read is lossless.
pub fn emit_records(records: &[ExperimentRecord], format: OutputFormat, path: &Path) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(records, &RECORD_HEADER, path),
        OutputFormat::Json => write_json(records, path),
    }
}

pub fn emit_aggregates(rows: &[AggregateRow], format: OutputFormat, path: &Path) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(rows, &AGGREGATE_HEADER, path),
        OutputFormat::Json => write_json(rows, path),
    }
}

/// Reads records back from either format.
pub fn read_records(path: &Path, format: OutputFormat) -> Result<Vec<ExperimentRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    match format {
        OutputFormat::Csv => {
            let mut reader = csv::Reader::from_reader(BufReader::new(file));
            reader
                .deserialize()
                .collect::<std::result::Result<Vec<ExperimentRecord>, _>>()
                .map_err(|e| Error::io(path, std::io::Error::other(e)))
        }
        OutputFormat::Json => serde_json::from_reader(BufReader::new(file))
            .map_err(|e| Error::io(path, std::io::Error::other(e))),
    }
}

// ---------------------------------------------------------------------------
// Validation mode
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ValidationRow {
    pub realization: usize,
    pub analytic_mse: f64,
    pub empirical_mse: f64,
    pub relative_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub algorithm: String,
    pub samples_per_realization: usize,
    pub rows: Vec<ValidationRow>,
    pub mean_relative_gap: f64,
    pub pass: bool,
}

/// Compares the analytic MSE against the empirical MSE of simulated
/// transmissions, one row per realization, using the first selected
/// algorithm. Passes when the mean relative gap stays within
/// [`VALIDATION_GAP_THRESHOLD`].
pub fn validate_mode(parsed: &ParsedConfig) -> Result<ValidationReport> {
    parsed.system.validate()?;
    let algorithm = *parsed
        .algorithms
        .first()
        .ok_or_else(|| Error::InvalidArgument("algorithm set must be non-empty".into()))?;
    let system = &parsed.system;

    let mut rows = Vec::with_capacity(system.realizations);
    for realization in 0..system.realizations as u64 {
        let child_seed = derive_seed(parsed.master_seed, &[TAG_VALIDATE, realization]);
        let mut channel_rng = derive_stream(child_seed, &[CHANNEL_STREAM]);
        let channels = sample_channel(
            &system.geometry,
            &system.fading,
            system.num_antennas,
            system.num_devices,
            &mut channel_rng,
        )?;
        let mut algo_rng =
            derive_stream(child_seed, &[ALGO_STREAM_BASE + algorithm.randomization_stream_id()]);
        let solution = algorithms::run(algorithm, &channels, system, &mut algo_rng)?;
        let mut sim_rng = derive_stream(child_seed, &[SIM_STREAM]);
        let empirical = simulate_transmission(
            &solution,
            &channels,
            system.noise_power,
            parsed.validation_samples,
            &mut sim_rng,
        )?;
        let relative_gap = (empirical - solution.mse).abs() / solution.mse;
        rows.push(ValidationRow {
            realization: realization as usize,
            analytic_mse: solution.mse,
            empirical_mse: empirical,
            relative_gap,
        });
    }
    let mean_relative_gap = rows.iter().map(|r| r.relative_gap).sum::<f64>() / rows.len() as f64;
    Ok(ValidationReport {
        algorithm: algorithm.name().to_string(),
        samples_per_realization: parsed.validation_samples,
        rows,
        mean_relative_gap,
        pass: mean_relative_gap <= VALIDATION_GAP_THRESHOLD,
    })
}
