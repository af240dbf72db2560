//! Discrete-event simulation of self-scheduled loops.
//!
//! Workers start idle at time zero. An idle worker requests a chunk; requests
//! pass one at a time through the central queue, each holding it for the
//! per-chunk overhead `h`. A granted chunk then runs for the sum of its
//! iteration costs divided by the worker's speed. Equal ready times are served
//! lowest worker id first. All times are integer ticks, so runs are exact and
//! reproducible.

mod metrics;
mod pinning;
mod time;

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schedule::{LoopSpec, ScheduleError, ScheduleKind, Scheduler};
use crate::workload::WorkloadTrace;

pub use metrics::{imbalance_pct, metrics, LoadMetrics};
pub use pinning::{builtin_pinnings, PinningPreset, PINNING_NAMES};
pub use time::{Time, TICKS_PER_UNIT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("pinning has no workers")]
    EmptyPinning,
    #[error("worker speeds must lie in (0, 1]")]
    InvalidSpeed,
    #[error("unknown pinning `{0}` (valid: {names})", names = PINNING_NAMES)]
    UnknownPinning(String),
    #[error("cost at index {0} is negative or not representable")]
    InvalidCost(usize),
    #[error("overhead must be finite and non-negative")]
    InvalidOverhead,
    #[error("loop sequence is empty")]
    EmptySequence,
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Time every chunk request holds the central queue.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverheadModel {
    pub per_chunk: Time,
}

impl OverheadModel {
    pub const NONE: OverheadModel = OverheadModel {
        per_chunk: Time::ZERO,
    };

    pub fn from_units(h: f64) -> Result<Self, SimError> {
        Ok(Self {
            per_chunk: Time::from_units(h).ok_or(SimError::InvalidOverhead)?,
        })
    }
}

/// One executed chunk. The queue is held over `[t_grant, t_begin)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimChunk {
    pub worker: usize,
    pub seq: u64,
    pub start: u64,
    pub size: u64,
    pub t_request: Time,
    pub t_grant: Time,
    pub t_begin: Time,
    pub t_end: Time,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimResult {
    pub makespan: Time,
    /// End of each worker's last chunk; zero for a worker that never ran.
    pub finish: Vec<Time>,
    pub chunk_log: Vec<SimChunk>,
    pub n_chunks: u64,
}

impl SimResult {
    pub fn workers(&self) -> usize {
        self.finish.len()
    }
}

/// Per-iteration costs in ticks, prefix-summed for O(1) chunk sums.
struct CostIndex {
    prefix: Vec<u64>,
}

impl CostIndex {
    fn new(trace: &WorkloadTrace) -> Result<Self, SimError> {
        let mut prefix = Vec::with_capacity(trace.len() + 1);
        let mut acc: u64 = 0;
        prefix.push(0);
        for (i, &c) in trace.costs().iter().enumerate() {
            let t = Time::from_units(c).ok_or(SimError::InvalidCost(i))?;
            acc = acc.checked_add(t.0).ok_or(SimError::InvalidCost(i))?;
            prefix.push(acc);
        }
        Ok(Self { prefix })
    }

    fn sum(&self, start: u64, size: u64) -> u64 {
        self.prefix[(start + size) as usize] - self.prefix[start as usize]
    }
}

/// Execution time of `work` ticks at speed `num/den`, rounded up to a tick.
fn scaled(work: u64, speed: &num_rational::Ratio<u64>) -> Time {
    let t = (work as u128 * *speed.denom() as u128).div_ceil(*speed.numer() as u128);
    Time(t as u64)
}

/// Runs one loop to completion.
pub fn simulate(
    trace: &WorkloadTrace,
    kind: &ScheduleKind,
    pinning: &PinningPreset,
    overhead: OverheadModel,
) -> Result<SimResult, SimError> {
    run(trace, kind, pinning, overhead, true)
}

fn run(
    trace: &WorkloadTrace,
    kind: &ScheduleKind,
    pinning: &PinningPreset,
    overhead: OverheadModel,
    keep_log: bool,
) -> Result<SimResult, SimError> {
    let p = pinning.len();
    if p == 0 {
        return Err(SimError::EmptyPinning);
    }
    let costs = CostIndex::new(trace)?;
    let spec = LoopSpec::new(trace.len() as u64, p)?;
    let mut sched = Scheduler::new(kind.clone(), spec)?;
    let h = overhead.per_chunk;

    let mut ready: BinaryHeap<Reverse<(Time, usize)>> =
        (0..p).map(|w| Reverse((Time::ZERO, w))).collect();
    let mut queue_free = Time::ZERO;
    let mut finish = vec![Time::ZERO; p];
    let mut log = Vec::new();

    while let Some(Reverse((t_request, w))) = ready.pop() {
        if sched.remaining() == 0 {
            break;
        }
        let Some(chunk) = sched.next_chunk(w)? else {
            continue;
        };
        let t_grant = t_request.max(queue_free);
        let t_begin = t_grant + h;
        queue_free = t_begin;
        let t_end = t_begin + scaled(costs.sum(chunk.start, chunk.size), &pinning.speeds()[w]);
        finish[w] = t_end;
        if keep_log {
            log.push(SimChunk {
                worker: w,
                seq: chunk.seq,
                start: chunk.start,
                size: chunk.size,
                t_request,
                t_grant,
                t_begin,
                t_end,
            });
        }
        ready.push(Reverse((t_end, w)));
    }

    Ok(SimResult {
        makespan: finish.iter().copied().max().unwrap_or_default(),
        finish,
        chunk_log: log,
        n_chunks: sched.issued(),
    })
}

/// Runs loops back to back with a barrier after each one.
///
/// The aggregate makespan is the sum of the per-loop makespans; chunk times
/// are shifted onto the common timeline. Set `keep_log` to false for long
/// sequences where only the totals matter.
pub fn simulate_sequence(
    loops: &[(WorkloadTrace, ScheduleKind)],
    pinning: &PinningPreset,
    overhead: OverheadModel,
    keep_log: bool,
) -> Result<SimResult, SimError> {
    if loops.is_empty() {
        return Err(SimError::EmptySequence);
    }
    let mut total = SimResult {
        makespan: Time::ZERO,
        finish: vec![Time::ZERO; pinning.len()],
        chunk_log: Vec::new(),
        n_chunks: 0,
    };
    for (trace, kind) in loops {
        let r = run(trace, kind, pinning, overhead, keep_log)?;
        let offset = total.makespan;
        for (agg, f) in total.finish.iter_mut().zip(&r.finish) {
            if *f > Time::ZERO {
                *agg = offset + *f;
            }
        }
        total.chunk_log.extend(r.chunk_log.into_iter().map(|mut c| {
            c.t_request += offset;
            c.t_grant += offset;
            c.t_begin += offset;
            c.t_end += offset;
            c
        }));
        total.n_chunks += r.n_chunks;
        total.makespan += r.makespan;
    }
    Ok(total)
}
