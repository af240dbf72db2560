//! Shared-memory parallel loops driven by the schedule kernels.
//!
//! Every worker repeatedly claims a chunk from one central queue and runs the
//! loop body over it. By default the queue is a [`Scheduler`] behind a mutex.
//! `Dynamic` and `SS` can instead use a single atomic counter; the chunks it
//! hands out are the same as the locked scheduler would produce.

mod pin;

use std::any::Any;
use std::panic::{self, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::schedule::{Chunk, LoopSpec, ScheduleError, ScheduleKind, Scheduler};

pub use pin::{allowed_cpus, pin_current_thread, PinStatus, Unsupported};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("pin map has {got} entries for {workers} workers")]
    PinMapLength { workers: usize, got: usize },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// How chunk claims are serialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QueueMode {
    #[default]
    Locked,
    /// Atomic fetch-and-add for `Dynamic` and `SS`. Other kinds fall back to `Locked`.
    Atomic,
}

#[derive(Debug, Clone)]
pub struct ExecOptions {
    pub workers: usize,
    pub kind: ScheduleKind,
    /// Logical cpu for each worker.
    pub pin_map: Option<Vec<usize>>,
    pub queue: QueueMode,
    pub log_chunks: bool,
}

impl ExecOptions {
    pub fn new(workers: usize, kind: ScheduleKind) -> Self {
        Self {
            workers,
            kind,
            pin_map: None,
            queue: QueueMode::Locked,
            log_chunks: false,
        }
    }

    pub fn pinned(mut self, map: Vec<usize>) -> Self {
        self.pin_map = Some(map);
        self
    }

    pub fn queue(mut self, queue: QueueMode) -> Self {
        self.queue = queue;
        self
    }

    pub fn with_log(mut self) -> Self {
        self.log_chunks = true;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorkerStats {
    pub chunks: u64,
    pub iterations: u64,
    /// Time spent inside the loop body.
    pub busy: Duration,
    pub pin: PinStatus,
}

/// One executed chunk; times are offsets from the start of the loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecChunk {
    pub worker: usize,
    pub seq: u64,
    pub start: u64,
    pub size: u64,
    pub t_begin: Duration,
    pub t_end: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecReport {
    pub wall_time: Duration,
    pub per_worker: Vec<WorkerStats>,
    /// Sorted by claim order.
    pub chunk_log: Option<Vec<ExecChunk>>,
    /// Set when some worker could not be pinned as requested.
    pub pin_warning: bool,
}

impl ExecReport {
    pub fn chunks(&self) -> u64 {
        self.per_worker.iter().map(|w| w.chunks).sum()
    }

    pub fn iterations(&self) -> u64 {
        self.per_worker.iter().map(|w| w.iterations).sum()
    }
}

enum Queue {
    Locked(Mutex<Scheduler>),
    Atomic(Counter),
}

#[repr(align(128))]
struct Counter {
    next: AtomicU64,
    chunk: u64,
    n: u64,
}

impl Queue {
    fn new(kind: &ScheduleKind, spec: LoopSpec, mode: QueueMode) -> Result<Self, ScheduleError> {
        let sched = Scheduler::new(kind.clone(), spec)?;
        let fixed = match kind {
            ScheduleKind::SelfScheduling => Some(1),
            ScheduleKind::Dynamic { chunk } => Some(*chunk),
            _ => None,
        };
        Ok(match (mode, fixed) {
            (QueueMode::Atomic, Some(chunk)) => Queue::Atomic(Counter {
                next: AtomicU64::new(0),
                chunk,
                n: spec.n,
            }),
            _ => Queue::Locked(Mutex::new(sched)),
        })
    }

    fn claim(&self, worker: usize) -> Option<Chunk> {
        match self {
            Queue::Locked(m) => {
                let mut s = m.lock().unwrap_or_else(|e| e.into_inner());
                s.next_chunk(worker).expect("worker ids are in range")
            }
            Queue::Atomic(c) => {
                if c.next.load(Ordering::Relaxed) >= c.n {
                    return None;
                }
                let start = c.next.fetch_add(c.chunk, Ordering::Relaxed);
                if start >= c.n {
                    return None;
                }
                Some(Chunk {
                    start,
                    size: c.chunk.min(c.n - start),
                    worker,
                    seq: start / c.chunk,
                })
            }
        }
    }
}

struct Outcome<S> {
    state: S,
    stats: WorkerStats,
    log: Vec<ExecChunk>,
}

/// Runs `body(state, i)` once for every `i` in `0..n`, with one `state` per
/// worker built by `init`. A body panic stops further bodies from running;
/// the remaining chunks are still claimed, and the panic is re-raised once
/// every worker has finished.
fn drive<S, I, B>(
    n: u64,
    opts: &ExecOptions,
    init: I,
    body: B,
) -> Result<(ExecReport, Vec<S>), ExecError>
where
    S: Send,
    I: Fn(usize) -> S + Sync,
    B: Fn(&mut S, u64) + Sync,
{
    let spec = LoopSpec::new(n, opts.workers)?;
    if let Some(map) = &opts.pin_map {
        if map.len() != opts.workers {
            return Err(ExecError::PinMapLength {
                workers: opts.workers,
                got: map.len(),
            });
        }
    }
    let queue = Queue::new(&opts.kind, spec, opts.queue)?;
    let failed = AtomicBool::new(false);
    let panic_payload: Mutex<Option<Box<dyn Any + Send>>> = Mutex::new(None);

    let t0 = Instant::now();
    let worker = |w: usize| -> Outcome<S> {
        let pin = match &opts.pin_map {
            None => PinStatus::Unpinned,
            Some(map) => match pin_current_thread(map[w]) {
                Ok(()) => PinStatus::Pinned(map[w]),
                Err(_) => PinStatus::Failed(map[w]),
            },
        };
        let mut state = init(w);
        let mut stats = WorkerStats {
            chunks: 0,
            iterations: 0,
            busy: Duration::ZERO,
            pin,
        };
        let mut log = Vec::new();
        while let Some(chunk) = queue.claim(w) {
            stats.chunks += 1;
            if failed.load(Ordering::Relaxed) {
                continue;
            }
            let begin = Instant::now();
            let ran = panic::catch_unwind(AssertUnwindSafe(|| {
                for i in chunk.range() {
                    body(&mut state, i);
                }
            }));
            let end = Instant::now();
            match ran {
                Ok(()) => {
                    stats.iterations += chunk.size;
                    stats.busy += end - begin;
                }
                Err(payload) => {
                    failed.store(true, Ordering::Relaxed);
                    let mut slot = panic_payload.lock().unwrap_or_else(|e| e.into_inner());
                    slot.get_or_insert(payload);
                }
            }
            if opts.log_chunks {
                log.push(ExecChunk {
                    worker: w,
                    seq: chunk.seq,
                    start: chunk.start,
                    size: chunk.size,
                    t_begin: begin - t0,
                    t_end: end - t0,
                });
            }
        }
        Outcome { state, stats, log }
    };

    let outcomes: Vec<Outcome<S>> = if opts.workers == 1 {
        vec![worker(0)]
    } else {
        thread::scope(|s| {
            let handles: Vec<_> = (0..opts.workers)
                .map(|w| s.spawn(move || worker(w)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|e| panic::resume_unwind(e)))
                .collect()
        })
    };
    let wall_time = t0.elapsed();

    if let Some(payload) = panic_payload
        .into_inner()
        .unwrap_or_else(|e| e.into_inner())
    {
        panic::resume_unwind(payload);
    }

    let mut states = Vec::with_capacity(outcomes.len());
    let mut per_worker = Vec::with_capacity(outcomes.len());
    let mut log = Vec::new();
    for o in outcomes {
        states.push(o.state);
        per_worker.push(o.stats);
        log.extend(o.log);
    }
    log.sort_by_key(|c| c.seq);
    let report = ExecReport {
        wall_time,
        pin_warning: per_worker
            .iter()
            .any(|w| matches!(w.pin, PinStatus::Failed(_))),
        per_worker,
        chunk_log: opts.log_chunks.then_some(log),
    };
    Ok((report, states))
}

/// Calls `body(i)` exactly once for every `i` in `0..n`.
///
/// # Panics
///
/// Re-raises the first panic from `body` after all workers have stopped.
pub fn parallel_for<B>(n: u64, body: B, opts: &ExecOptions) -> Result<ExecReport, ExecError>
where
    B: Fn(u64) + Sync,
{
    drive(n, opts, |_| (), |_, i| body(i)).map(|(r, _)| r)
}

/// Folds `map(i)` over `0..n` with `combine`. Each worker keeps its own
/// accumulator; they are combined in worker order at the end.
pub fn parallel_reduce<T, M, C>(
    n: u64,
    map: M,
    combine: C,
    identity: T,
    opts: &ExecOptions,
) -> Result<(T, ExecReport), ExecError>
where
    T: Clone + Send + Sync,
    M: Fn(u64) -> T + Sync,
    C: Fn(T, T) -> T + Sync,
{
    let (report, parts) = drive(
        n,
        opts,
        |_| Some(identity.clone()),
        |acc: &mut Option<T>, i| {
            let a = acc
                .take()
                .expect("accumulator is restored after every step");
            *acc = Some(combine(a, map(i)));
        },
    )?;
    let total = parts.into_iter().flatten().fold(identity, &combine);
    Ok((total, report))
}

#[cfg(test)]
mod tests;
