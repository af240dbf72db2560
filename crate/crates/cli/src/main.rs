use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use chunkwise::exec::QueueMode;
use chunkwise::harness::{
    apply_config, run_experiment, write_csv, write_outputs, ExperimentConfig, HarnessError, Mode,
    Overhead, WorkloadSource,
};
use chunkwise::schedule::{chunk_trace, LoopSpec, RequestOrder, ScheduleName};
use chunkwise::sim::{builtin_pinnings, PinningPreset};
use chunkwise::workload::builtin_workloads;

const SEED_VAR: &str = "CHUNKWISE_SEED";

#[derive(Parser)]
#[command(
    name = "chunkwise",
    version,
    about = "Loop self-scheduling experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep schedules and pinnings through the discrete-event simulator.
    Simulate(SweepArgs),
    /// Sweep schedules on real threads, busy-spinning each iteration's cost.
    Execute(ExecuteArgs),
    /// Print the chunks a schedule hands out, one per line.
    Trace(TraceArgs),
    /// List built-in workloads and pinnings.
    Presets,
}

#[derive(Args)]
struct SweepArgs {
    /// Experiment file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in workload name.
    #[arg(long, conflicts_with = "trace")]
    workload: Option<String>,
    /// File with one iteration cost per line.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Comma-separated schedules.
    #[arg(long, value_delimiter = ',')]
    schedule: Vec<ScheduleName>,
    /// Comma-separated pinnings (PIN1..PIN5, UNIFORM:<p>).
    #[arg(long, value_delimiter = ',')]
    pinning: Vec<String>,
    /// Per-chunk overhead in cost units, or `<k>*mean`.
    #[arg(long)]
    overhead: Option<Overhead>,
    #[arg(long)]
    reps: Option<usize>,
    /// Defaults to $CHUNKWISE_SEED, then 1.
    #[arg(long)]
    seed: Option<u64>,
    /// CSV path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG Gantt chart path.
    #[arg(long)]
    gantt: Option<PathBuf>,
}

#[derive(Args)]
struct ExecuteArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    #[arg(long, value_parser = ["locked", "atomic"])]
    queue: Option<String>,
    /// Wall time of one cost unit, in microseconds.
    #[arg(long)]
    cost_unit_us: Option<f64>,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 4)]
    workers: usize,
    #[arg(long, default_value = "FAC2")]
    schedule: ScheduleName,
    /// Take WF2 weights from this pinning's speeds; its size sets the worker count.
    #[arg(long)]
    pinning: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => sweep(Mode::Simulate, &args, None),
        Command::Execute(args) => sweep(Mode::Execute, &args.sweep, Some(&args)),
        Command::Trace(args) => trace(&args),
        Command::Presets => presets(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chunkwise: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn env_seed() -> Result<Option<u64>, HarnessError> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            HarnessError::Usage(format!("{SEED_VAR}=`{v}` is not an unsigned integer"))
        }),
        Err(_) => Ok(None),
    }
}

fn build_config(
    mode: Mode,
    args: &SweepArgs,
    exec: Option<&ExecuteArgs>,
) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = ExperimentConfig::default();
    if let Some(seed) = env_seed()? {
        cfg.seed = seed;
    }
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
            path: path.clone(),
            source: e,
        })?;
        apply_config(&mut cfg, &text)?;
    }
    cfg.mode = mode;
    if let Some(name) = &args.workload {
        cfg.workload = WorkloadSource::Preset(name.clone());
    }
    if let Some(path) = &args.trace {
        cfg.workload = WorkloadSource::TraceFile(path.clone());
    }
    if !args.schedule.is_empty() {
        cfg.schedules = args.schedule.clone();
    }
    if !args.pinning.is_empty() {
        cfg.pinnings = args.pinning.clone();
    }
    if let Some(h) = args.overhead {
        cfg.overhead = h;
    }
    if let Some(r) = args.reps {
        cfg.reps = r;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.out.is_some() {
        cfg.out = args.out.clone();
    }
    if args.gantt.is_some() {
        cfg.gantt = args.gantt.clone();
    }
    if let Some(exec) = exec {
        if let Some(q) = &exec.queue {
            cfg.queue = if q == "atomic" {
                QueueMode::Atomic
            } else {
                QueueMode::Locked
            };
        }
        if let Some(us) = exec.cost_unit_us {
            cfg.cost_unit = Duration::try_from_secs_f64(us * 1e-6)
                .map_err(|_| HarnessError::Usage(format!("invalid cost unit `{us}`")))?;
        }
    }
    Ok(cfg)
}

fn sweep(mode: Mode, args: &SweepArgs, exec: Option<&ExecuteArgs>) -> Result<(), HarnessError> {
    let cfg = build_config(mode, args, exec)?;
    let exp = run_experiment(&cfg)?;
    write_outputs(&cfg, &exp)?;
    if cfg.out.is_none() {
        write_csv(&exp.rows, io::stdout().lock())?;
        if let Some(host) = &exp.host {
            eprint!("{host}");
        }
    }
    Ok(())
}

fn trace(args: &TraceArgs) -> Result<(), HarnessError> {
    let seed = match args.seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(chunkwise::harness::DEFAULT_SEED),
    };
    let (workers, speeds) = match &args.pinning {
        Some(name) => {
            let pin =
                PinningPreset::by_name(name).map_err(|e| HarnessError::Usage(e.to_string()))?;
            (pin.len(), Some(pin.speeds_f64()))
        }
        None => (args.workers, None),
    };
    let kind = args.schedule.resolve(workers, speeds.as_deref(), seed)?;
    let chunks = chunk_trace(
        kind,
        LoopSpec::new(args.n, workers)?,
        &RequestOrder::RoundRobin,
    )?;
    let mut out = io::BufWriter::new(io::stdout().lock());
    let stdout_err = |e: io::Error| HarnessError::Io {
        path: "<stdout>".into(),
        source: e,
    };
    writeln!(out, "seq,worker,start,size").map_err(stdout_err)?;
    for c in &chunks {
        writeln!(out, "{},{},{},{}", c.seq, c.worker, c.start, c.size).map_err(stdout_err)?;
    }
    out.flush().map_err(stdout_err)
}

fn presets() -> Result<(), HarnessError> {
    println!("workloads:");
    for w in builtin_workloads() {
        println!("  {:<8} {}", w.name, w.description);
    }
    println!("pinnings:");
    for (name, pin) in builtin_pinnings() {
        let speeds: Vec<String> = pin.speeds().iter().map(|s| s.to_string()).collect();
        println!("  {name:<8} {}", speeds.join(" "));
    }
    println!("  UNIFORM:<p> p workers at full speed");
    println!("schedules:\n  {}", ScheduleName::VALID);
    Ok(())
}
