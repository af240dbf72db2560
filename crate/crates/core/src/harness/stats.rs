use super::HarnessError;

/// Summary of a repetition sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    /// Middle element of the sorted sample, or the mean of the two middle ones.
    pub median: f64,
    /// Population standard deviation.
    pub stddev: f64,
    pub min: f64,
    pub max: f64,
}

pub fn stats(samples: &[f64]) -> Result<Stats, HarnessError> {
    if samples.is_empty() {
        return Err(HarnessError::EmptySample);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let (min, max) = (sorted[0], sorted[n - 1]);
    let stddev = if min == max {
        0.0
    } else {
        let mean = sorted.iter().sum::<f64>() / n as f64;
        (sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64).sqrt()
    };
    Ok(Stats {
        median,
        stddev,
        min,
        max,
    })
}
