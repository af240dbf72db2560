//! Experiment sweeps: every schedule on every pinning, repeated, summarized
//! as CSV rows, with optional Gantt charts of simulated runs.

mod config;
mod gantt;
mod report;
mod stats;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::exec::{allowed_cpus, parallel_for, ExecError, ExecOptions, QueueMode};
use crate::schedule::{ScheduleError, ScheduleKind, ScheduleName};
use crate::sim::{
    imbalance_pct, simulate_sequence, OverheadModel, PinningPreset, SimError, SimResult,
    PINNING_NAMES,
};
use crate::workload::{
    read_trace, spin_body, workload_preset, Calibration, Workload, WorkloadError,
};

pub use config::{apply_config, parse_config};
pub use gantt::{emit_gantt, render_gantt};
pub use report::{emit_csv, read_csv, write_csv, ReportRow, CSV_HEADER};
pub use stats::{stats, Stats};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Capability(String),
    #[error("sample is empty")]
    EmptySample,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Exec(#[from] ExecError),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2 usage, 3 I/O, 4 capability.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. } | Self::Csv(_) => 3,
            Self::Workload(WorkloadError::Io(_)) => 3,
            Self::Capability(_) => 4,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Simulate,
    Execute,
}

impl FromStr for Mode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "simulate" => Ok(Self::Simulate),
            "execute" => Ok(Self::Execute),
            _ => Err(HarnessError::Usage(format!(
                "unknown mode `{s}` (valid: simulate, execute)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WorkloadSource {
    Preset(String),
    TraceFile(PathBuf),
}

impl WorkloadSource {
    /// Benchmark column of the report.
    pub fn label(&self) -> String {
        match self {
            Self::Preset(name) => name.to_ascii_lowercase(),
            Self::TraceFile(path) => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
        }
    }

    pub fn load(&self, seed: u64) -> Result<Workload, HarnessError> {
        match self {
            Self::Preset(name) => {
                let preset =
                    workload_preset(name).map_err(|e| HarnessError::Usage(e.to_string()))?;
                Ok(preset.generate(seed)?)
            }
            Self::TraceFile(path) => match read_trace(path) {
                Ok(t) => Ok(Workload::Single(t)),
                Err(WorkloadError::Io(e)) => Err(HarnessError::io(path, e)),
                Err(e) => Err(HarnessError::Usage(format!("{}: {e}", path.display()))),
            },
        }
    }
}

/// Per-chunk overhead, absolute or relative to the mean iteration cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Overhead {
    Units(f64),
    MeanMultiple(f64),
}

impl Overhead {
    pub fn resolve(self, workload: &Workload) -> Result<OverheadModel, HarnessError> {
        let h = match self {
            Self::Units(h) => h,
            Self::MeanMultiple(k) => {
                let n = workload.total_iterations();
                let total: f64 = workload.loops().iter().map(|t| t.total()).sum();
                if n == 0 {
                    0.0
                } else {
                    k * total / n as f64
                }
            }
        };
        Ok(OverheadModel::from_units(h)?)
    }
}

impl FromStr for Overhead {
    type Err = HarnessError;

    /// `2.5` is 2.5 cost units; `5mean`, `5 mean` or `5*mean` is five times the mean cost.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || {
            HarnessError::Usage(format!(
                "invalid overhead `{s}` (expected <units> or <k>*mean)"
            ))
        };
        let t = s.trim();
        let (num, relative) = match t.strip_suffix("mean") {
            Some(head) => (head.trim().trim_end_matches('*').trim(), true),
            None => (t, false),
        };
        let v: f64 = num.parse().map_err(|_| bad())?;
        if !v.is_finite() || v < 0.0 {
            return Err(bad());
        }
        Ok(if relative {
            Self::MeanMultiple(v)
        } else {
            Self::Units(v)
        })
    }
}

impl fmt::Display for Overhead {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Units(h) => write!(f, "{h}"),
            Self::MeanMultiple(k) => write!(f, "{k}*mean"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub workload: WorkloadSource,
    pub schedules: Vec<ScheduleName>,
    pub pinnings: Vec<String>,
    pub overhead: Overhead,
    pub reps: usize,
    pub seed: u64,
    /// Execute mode: wall time of one cost unit.
    pub cost_unit: Duration,
    pub queue: QueueMode,
    pub out: Option<PathBuf>,
    pub gantt: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_REPS: usize = 20;

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Simulate,
            workload: WorkloadSource::Preset("ac".into()),
            schedules: ScheduleKind::standard_names().to_vec(),
            pinnings: vec!["PIN1".into()],
            overhead: Overhead::Units(0.0),
            reps: DEFAULT_REPS,
            seed: DEFAULT_SEED,
            cost_unit: Duration::from_micros(1),
            queue: QueueMode::Locked,
            out: None,
            gantt: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.reps == 0 {
            return Err(HarnessError::Usage("repetitions must be at least 1".into()));
        }
        if self.schedules.is_empty() {
            return Err(HarnessError::Usage(format!(
                "no schedules given (valid: {})",
                ScheduleName::VALID
            )));
        }
        if self.pinnings.is_empty() {
            return Err(HarnessError::Usage(format!(
                "no pinnings given (valid: {PINNING_NAMES})"
            )));
        }
        for name in &self.pinnings {
            PinningPreset::by_name(name).map_err(|e| HarnessError::Usage(e.to_string()))?;
        }
        Ok(())
    }
}

/// Machine facts for execute-mode runs, kept out of the CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct HostInfo {
    pub os: &'static str,
    pub arch: &'static str,
    pub available_parallelism: usize,
    pub allowed_cpus: Vec<usize>,
    pub calibration: Calibration,
    pub pin_warnings: usize,
}

impl fmt::Display for HostInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cpus: Vec<String> = self.allowed_cpus.iter().map(usize::to_string).collect();
        writeln!(f, "os={}", self.os)?;
        writeln!(f, "arch={}", self.arch)?;
        writeln!(f, "available_parallelism={}", self.available_parallelism)?;
        writeln!(f, "allowed_cpus={}", cpus.join(" "))?;
        writeln!(f, "cost_unit_ns={}", self.calibration.unit.as_nanos())?;
        writeln!(f, "spins_per_unit={}", self.calibration.spins_per_unit)?;
        writeln!(f, "pin_warnings={}", self.pin_warnings)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GanttRun {
    pub schedule: String,
    pub pinning: String,
    pub result: SimResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub rows: Vec<ReportRow>,
    /// Repetition 0 of every simulated cell, when a Gantt path is configured.
    pub gantt: Vec<GanttRun>,
    pub host: Option<HostInfo>,
}

/// Runs the full schedule × pinning sweep.
///
/// The workload is generated once from `seed`; repetition `k` reseeds `RAND`
/// with `seed ^ k`. `n_chunks` is taken from repetition 0 and
/// `imbalance_pct` is the median over repetitions.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Experiment, HarnessError> {
    config.validate()?;
    let workload = config.workload.load(config.seed)?;
    let overhead = config.overhead.resolve(&workload)?;
    let benchmark = config.workload.label();

    let calibration = match config.mode {
        Mode::Simulate => None,
        Mode::Execute => {
            check_realizable(&config.pinnings)?;
            Some(Calibration::measure(config.cost_unit))
        }
    };
    let mut pin_warnings = 0;
    let mut rows = Vec::new();
    let mut gantt = Vec::new();

    for &name in &config.schedules {
        for pin_name in &config.pinnings {
            let pinning = PinningPreset::by_name(pin_name)?;
            let speeds = pinning.speeds_f64();
            let mut samples = Vec::with_capacity(config.reps);
            let mut imbalance = Vec::with_capacity(config.reps);
            let mut n_chunks = 0;
            for k in 0..config.reps {
                let kind = name.resolve(pinning.len(), Some(&speeds), config.seed ^ k as u64)?;
                if k > 0 && !kind.is_random() && config.mode == Mode::Simulate {
                    samples.push(samples[0]);
                    imbalance.push(imbalance[0]);
                    continue;
                }
                let cell = match &calibration {
                    None => {
                        let keep_log = k == 0 && config.gantt.is_some();
                        let loops: Vec<_> = workload
                            .loops()
                            .iter()
                            .map(|t| (t.clone(), kind.clone()))
                            .collect();
                        let r = simulate_sequence(&loops, &pinning, overhead, keep_log)?;
                        let cell = Cell {
                            time: r.makespan.as_units(),
                            imbalance: imbalance_pct(&r.finish),
                            chunks: r.n_chunks,
                        };
                        if keep_log {
                            gantt.push(GanttRun {
                                schedule: name.to_string(),
                                pinning: pinning.name.clone(),
                                result: r,
                            });
                        }
                        cell
                    }
                    Some(cal) => {
                        let (cell, warned) =
                            execute_cell(&workload, &kind, &pinning, cal, config.queue)?;
                        pin_warnings += warned as usize;
                        cell
                    }
                };
                if k == 0 {
                    n_chunks = cell.chunks;
                }
                samples.push(cell.time);
                imbalance.push(cell.imbalance);
            }
            let s = stats(&samples)?;
            rows.push(ReportRow {
                benchmark: benchmark.clone(),
                schedule: name.to_string(),
                pinning: pinning.name.clone(),
                median: s.median,
                stddev: s.stddev,
                n_chunks,
                imbalance_pct: stats(&imbalance)?.median,
                repetitions: config.reps,
            });
        }
    }
    rows.sort_by(|a, b| {
        (&a.benchmark, &a.schedule, &a.pinning).cmp(&(&b.benchmark, &b.schedule, &b.pinning))
    });
    gantt.sort_by(|a, b| (&a.schedule, &a.pinning).cmp(&(&b.schedule, &b.pinning)));

    let host = calibration.map(|calibration| HostInfo {
        os: std::env::consts::OS,
        arch: std::env::consts::ARCH,
        available_parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
        allowed_cpus: allowed_cpus(),
        calibration,
        pin_warnings,
    });
    Ok(Experiment { rows, gantt, host })
}

struct Cell {
    time: f64,
    imbalance: f64,
    chunks: u64,
}

/// Every cpu named by a pinning's core map must be available to this process.
fn check_realizable(pinnings: &[String]) -> Result<(), HarnessError> {
    let allowed = allowed_cpus();
    for name in pinnings {
        let pinning = PinningPreset::by_name(name)?;
        if let Some(cores) = pinning.cores() {
            if let Some(missing) = cores.iter().find(|c| !allowed.contains(c)) {
                return Err(HarnessError::Capability(format!(
                    "pinning {} needs cpu {missing}, but this process may only use {:?}",
                    pinning.name, allowed
                )));
            }
        }
    }
    Ok(())
}

fn execute_cell(
    workload: &Workload,
    kind: &ScheduleKind,
    pinning: &PinningPreset,
    cal: &Calibration,
    queue: QueueMode,
) -> Result<(Cell, bool), HarnessError> {
    let p = pinning.len();
    let mut opts = ExecOptions::new(p, kind.clone()).queue(queue);
    opts.pin_map = pinning.cores().map(<[usize]>::to_vec);
    let mut busy = vec![Duration::ZERO; p];
    let mut time = 0.0;
    let mut chunks = 0;
    let mut warned = false;
    for trace in workload.loops() {
        let report = parallel_for(trace.len() as u64, spin_body(trace, cal), &opts)?;
        time += report.wall_time.as_secs_f64();
        chunks += report.chunks();
        warned |= report.pin_warning;
        for (b, w) in busy.iter_mut().zip(&report.per_worker) {
            *b += w.busy;
        }
    }
    let max = busy.iter().max().copied().unwrap_or_default().as_secs_f64();
    let mean = busy.iter().map(Duration::as_secs_f64).sum::<f64>() / p as f64;
    let imbalance = if max > 0.0 {
        (max - mean) / max * 100.0
    } else {
        0.0
    };
    Ok((
        Cell {
            time,
            imbalance,
            chunks,
        },
        warned,
    ))
}

/// Writes the CSV, Gantt charts and host sidecar that `config` asks for.
///
/// With several simulated cells each chart goes to
/// `<stem>_<schedule>_<pinning>.svg` next to the configured path. The host
/// sidecar is written to `<csv path>.host`.
pub fn write_outputs(
    config: &ExperimentConfig,
    exp: &Experiment,
) -> Result<Vec<PathBuf>, HarnessError> {
    let mut written = Vec::new();
    if let Some(out) = &config.out {
        emit_csv(&exp.rows, out)?;
        written.push(out.clone());
        if let Some(host) = &exp.host {
            let mut side = out.clone().into_os_string();
            side.push(".host");
            let side = PathBuf::from(side);
            std::fs::write(&side, host.to_string()).map_err(|e| HarnessError::io(&side, e))?;
            written.push(side);
        }
    }
    if let Some(path) = &config.gantt {
        for run in &exp.gantt {
            let target = if exp.gantt.len() == 1 {
                path.clone()
            } else {
                let stem = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                let file = format!("{stem}_{}_{}.svg", safe(&run.schedule), safe(&run.pinning));
                path.with_file_name(file)
            };
            emit_gantt(&run.result, &target)?;
            written.push(target);
        }
    }
    Ok(written)
}

fn safe(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
        .collect()
}
