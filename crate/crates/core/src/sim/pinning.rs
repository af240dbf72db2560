//! Heterogeneous worker speeds derived from thread-to-core binding.
//!
//! A worker sharing its core with `k - 1` others runs at speed `1/k`. The
//! built-in maps assume 20 threads on a two-socket machine with ten physical
//! cores per socket (cores 0-9 on socket 0, 10-19 on socket 1):
//!
//! | preset | absent cores         | shared cores (threads)                                     |
//! |--------|----------------------|------------------------------------------------------------|
//! | PIN1   | none                 | none                                                        |
//! | PIN2   | 9, 18                | 1 (T1, T18), 11 (T10, T19)                                  |
//! | PIN3   | 7, 8, 16, 17, 18     | 1 (T1,T2), 2 (T3,T4), 6 (T8,T9), 9 (T10,T13), 12 (T14,T15), 13 (T16,T18) |
//! | PIN4   | 12-19                | 1 (T1,T12,T13,T14), 2 (T2,T15,T16), 5 (T5,T17), 7 (T7,T18), 10 (T10,T19) |
//! | PIN5   | 10-19 (socket 1)     | every core 0-9 carries threads `j` and `j + 10`             |

use std::collections::BTreeMap;

use num_rational::Ratio;

use super::SimError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinningPreset {
    pub name: String,
    speeds: Vec<Ratio<u64>>,
    /// Logical CPU for each worker, when the preset comes from a binding map.
    cores: Option<Vec<usize>>,
}

impl PinningPreset {
    /// Explicit speed fractions, each in `(0, 1]`.
    pub fn new(name: impl Into<String>, speeds: Vec<Ratio<u64>>) -> Result<Self, SimError> {
        if speeds.is_empty() {
            return Err(SimError::EmptyPinning);
        }
        let one = Ratio::from_integer(1);
        if speeds.iter().any(|s| *s.numer() == 0 || *s > one) {
            return Err(SimError::InvalidSpeed);
        }
        Ok(Self {
            name: name.into(),
            speeds,
            cores: None,
        })
    }

    /// Speeds from floats; each is converted to the nearest small fraction.
    pub fn from_f64(name: impl Into<String>, speeds: &[f64]) -> Result<Self, SimError> {
        let exact = speeds
            .iter()
            .map(|&s| {
                if !(s > 0.0 && s <= 1.0) {
                    return Err(SimError::InvalidSpeed);
                }
                let r = Ratio::<i64>::approximate_float(s).ok_or(SimError::InvalidSpeed)?;
                Ok(Ratio::new(*r.numer() as u64, *r.denom() as u64))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(name, exact)
    }

    /// Speeds implied by binding worker `j` to `cores[j]`.
    pub fn from_core_map(name: impl Into<String>, cores: Vec<usize>) -> Result<Self, SimError> {
        let mut load: BTreeMap<usize, u64> = BTreeMap::new();
        for &c in &cores {
            *load.entry(c).or_default() += 1;
        }
        let speeds = cores.iter().map(|c| Ratio::new(1, load[c])).collect();
        let mut preset = Self::new(name, speeds)?;
        preset.cores = Some(cores);
        Ok(preset)
    }

    /// `p` workers at full speed.
    pub fn uniform(p: usize) -> Result<Self, SimError> {
        Self::new(format!("UNIFORM:{p}"), vec![Ratio::from_integer(1); p])
    }

    /// Resolves `PIN1`..`PIN5` or `UNIFORM:<p>`.
    pub fn by_name(name: &str) -> Result<Self, SimError> {
        let upper = name.trim().to_ascii_uppercase();
        if let Some(p) = upper.strip_prefix("UNIFORM:") {
            let p: usize = p.parse().map_err(|_| unknown(name))?;
            return Self::uniform(p);
        }
        builtin_pinnings()
            .remove(upper.as_str())
            .ok_or_else(|| unknown(name))
    }

    pub fn len(&self) -> usize {
        self.speeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speeds.is_empty()
    }

    pub fn speeds(&self) -> &[Ratio<u64>] {
        &self.speeds
    }

    pub fn speeds_f64(&self) -> Vec<f64> {
        self.speeds
            .iter()
            .map(|s| *s.numer() as f64 / *s.denom() as f64)
            .collect()
    }

    pub fn total_speed(&self) -> f64 {
        self.speeds_f64().iter().sum()
    }

    pub fn cores(&self) -> Option<&[usize]> {
        self.cores.as_deref()
    }
}

fn unknown(name: &str) -> SimError {
    SimError::UnknownPinning(name.trim().to_string())
}

pub const PINNING_NAMES: &str = "PIN1, PIN2, PIN3, PIN4, PIN5, UNIFORM:<p>";

/// The five binding schemes, keyed by name.
pub fn builtin_pinnings() -> BTreeMap<&'static str, PinningPreset> {
    let pin1: Vec<usize> = (0..20).collect();
    let pin2 = vec![
        0, 1, 2, 3, 4, 5, 6, 7, 8, 10, 11, 12, 13, 14, 15, 16, 17, 19, 1, 11,
    ];
    let pin3 = vec![
        0, 1, 1, 2, 2, 3, 4, 5, 6, 6, 9, 10, 11, 9, 12, 12, 13, 14, 13, 15,
    ];
    let pin4 = vec![
        0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 1, 1, 1, 2, 2, 5, 7, 10,
    ];
    let pin5: Vec<usize> = (0..20).map(|j| j % 10).collect();
    [
        ("PIN1", pin1),
        ("PIN2", pin2),
        ("PIN3", pin3),
        ("PIN4", pin4),
        ("PIN5", pin5),
    ]
    .into_iter()
    .map(|(name, map)| {
        (
            name,
            PinningPreset::from_core_map(name, map).expect("valid map"),
        )
    })
    .collect()
}
