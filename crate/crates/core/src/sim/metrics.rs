use serde::{Deserialize, Serialize};

use super::{OverheadModel, PinningPreset, SimResult, Time};
use crate::workload::WorkloadTrace;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LoadMetrics {
    /// `(max - mean) / max * 100` over worker finish times.
    pub imbalance_pct: f64,
    /// Standard deviation over mean of worker finish times.
    pub cov_finish: f64,
    /// `n_chunks * h`, in cost units.
    pub total_overhead: f64,
    /// Useful work over `makespan * sum(speeds)`.
    pub efficiency: f64,
}

/// `(max - mean) / max * 100` over `finish`; zero when every worker finished at time zero.
pub fn imbalance_pct(finish: &[Time]) -> f64 {
    let max = finish.iter().copied().max().unwrap_or_default().as_units();
    if max == 0.0 {
        return 0.0;
    }
    let mean = finish.iter().map(|t| t.as_units()).sum::<f64>() / finish.len() as f64;
    (max - mean) / max * 100.0
}

/// Load-balance figures for a finished run. An empty run yields all zeros.
pub fn metrics(
    result: &SimResult,
    trace: &WorkloadTrace,
    pinning: &PinningPreset,
    overhead: OverheadModel,
) -> LoadMetrics {
    let finish: Vec<f64> = result.finish.iter().map(|t| t.as_units()).collect();
    let makespan = result.makespan.as_units();
    if finish.is_empty() || makespan == 0.0 {
        return LoadMetrics {
            total_overhead: result.n_chunks as f64 * overhead.per_chunk.as_units(),
            ..LoadMetrics::default()
        };
    }
    let n = finish.len() as f64;
    let mean = finish.iter().sum::<f64>() / n;
    let var = finish.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / n;
    LoadMetrics {
        imbalance_pct: imbalance_pct(&result.finish),
        cov_finish: var.sqrt() / mean,
        total_overhead: result.n_chunks as f64 * overhead.per_chunk.as_units(),
        efficiency: trace.total() / (makespan * pinning.total_speed()),
    }
}
