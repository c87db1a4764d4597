//! Run configuration shared by the simulator and the batch harness.

use std::path::PathBuf;

use thiserror::Error;

/// Which target profile a run adapts to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetChoice {
    /// Single spatial frequency (8 periods across the system).
    A,
    /// Two superposed spatial frequencies (4 and 8 periods).
    B,
    /// Custom profile loaded from a one-integer-per-line file.
    File(PathBuf),
}

impl std::fmt::Display for TargetChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TargetChoice::A => write!(f, "A"),
            TargetChoice::B => write!(f, "B"),
            TargetChoice::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// All parameters of a simulation run or batch.
///
/// `n_exp` fixes the system width `N = 2^n_exp`. The adaptation scans scales
/// `s_min..=s_max` (block widths `2^s`), so `0 < s_min <= s_max < n_exp`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_exp: u32,
    pub amplitude: i64,
    pub s_min: u32,
    pub s_max: u32,
    pub cycles: u32,
    pub runs: u32,
    pub target: TargetChoice,
    pub seed: u64,
    /// Allow edge blocks to win the fitness argmax (on by default).
    pub edge_argmax: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_exp: 10,
            // 48 particle units reproduces the reference adaptation arc
            // (scale crossovers and final-roughness ordering) within the
            // 1500-cycle budget; see README on vertical quantization.
            amplitude: 48,
            s_min: 2,
            s_max: 7,
            cycles: 1500,
            runs: 100,
            target: TargetChoice::A,
            seed: 0,
            edge_argmax: true,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("s_min must be at least 1, got {0}")]
    SMinTooSmall(u32),
    #[error("s_min ({s_min}) exceeds s_max ({s_max})")]
    ScaleOrder { s_min: u32, s_max: u32 },
    #[error("s_max ({s_max}) must be below n_exp ({n_exp})")]
    SMaxTooCoarse { s_max: u32, n_exp: u32 },
    #[error("n_exp {0} out of supported range 1..=24")]
    BadExponent(u32),
    #[error("amplitude must be positive, got {0}")]
    AmplitudeNotPositive(i64),
    #[error("runs must be at least 1, got {0}")]
    NoRuns(u32),
}

impl SimConfig {
    /// System width `N = 2^n_exp`.
    pub fn n(&self) -> usize {
        1usize << self.n_exp
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_exp == 0 || self.n_exp > 24 {
            return Err(ConfigError::BadExponent(self.n_exp));
        }
        if self.amplitude < 1 {
            return Err(ConfigError::AmplitudeNotPositive(self.amplitude));
        }
        if self.s_min == 0 {
            return Err(ConfigError::SMinTooSmall(self.s_min));
        }
        if self.s_min > self.s_max {
            return Err(ConfigError::ScaleOrder {
                s_min: self.s_min,
                s_max: self.s_max,
            });
        }
        if self.s_max >= self.n_exp {
            return Err(ConfigError::SMaxTooCoarse {
                s_max: self.s_max,
                n_exp: self.n_exp,
            });
        }
        if self.runs == 0 {
            return Err(ConfigError::NoRuns(self.runs));
        }
        Ok(())
    }
}
