use num_rational::Ratio;

use super::ScheduleError;

/// Fixed-point scale applied to floating-point weights before normalization.
const WEIGHT_SCALE: f64 = 1e9;

/// Relative worker capabilities for weighted factoring.
///
/// Stored as integer units; the normalized weight of worker `j` is
/// `p * units[j] / sum(units)`, so the normalized weights sum to `p` exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkerWeights {
    units: Vec<u64>,
    total: u128,
}

impl WorkerWeights {
    /// Exact weights from positive integers.
    pub fn from_units(units: &[u64]) -> Result<Self, ScheduleError> {
        if units.is_empty() {
            return Err(ScheduleError::InvalidWorkerCount);
        }
        if units.contains(&0) {
            return Err(ScheduleError::InvalidParameter("weights must be positive"));
        }
        let total = units.iter().map(|&u| u as u128).sum();
        Ok(Self {
            units: units.to_vec(),
            total,
        })
    }

    /// Weights from positive reals, quantized to `1e-9`.
    pub fn from_f64(weights: &[f64]) -> Result<Self, ScheduleError> {
        let mut units = Vec::with_capacity(weights.len());
        for &w in weights {
            if !w.is_finite() || w <= 0.0 || w * WEIGHT_SCALE >= u64::MAX as f64 {
                return Err(ScheduleError::InvalidParameter(
                    "weights must be positive and finite",
                ));
            }
            units.push(((w * WEIGHT_SCALE).round() as u64).max(1));
        }
        Self::from_units(&units)
    }

    pub fn uniform(workers: usize) -> Result<Self, ScheduleError> {
        Self::from_units(&vec![1; workers])
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Normalized weight of one worker as an exact fraction.
    pub fn weight(&self, worker: usize) -> Ratio<u128> {
        Ratio::new(self.len() as u128 * self.units[worker] as u128, self.total)
    }

    pub fn normalized(&self) -> Vec<Ratio<u128>> {
        (0..self.len()).map(|j| self.weight(j)).collect()
    }

    /// `ceil(w_j * base_remaining / (2p))` computed without rounding error.
    pub(crate) fn factored_chunk(&self, worker: usize, base_remaining: u64) -> u64 {
        // w_j * R / 2p = units_j * R / (2 * total)
        let num = self.units[worker] as u128 * base_remaining as u128;
        let den = 2 * self.total;
        num.div_ceil(den).min(u64::MAX as u128) as u64
    }
}
