use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How equal distances are ordered. Only one policy exists today: compare
/// the smallest member set ids lexicographically.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieBreak {
    #[default]
    Lexicographic,
}

/// Every free parameter of the pipeline.
///
/// `beta` is the verification threshold in cosine-distance space and `gamma`
/// the margin of uncertainty; salient clustering stops at `beta - gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub beta: f64,
    pub gamma: f64,
    pub k: usize,
    pub seed: u64,
    pub tie_break: TieBreak,
}

pub const DEFAULT_BETA: f64 = 0.4;
pub const DEFAULT_GAMMA: f64 = 0.1;
pub const DEFAULT_K: usize = 5;

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            beta: DEFAULT_BETA,
            gamma: DEFAULT_GAMMA,
            k: DEFAULT_K,
            seed: 0,
            tie_break: TieBreak::Lexicographic,
        }
    }
}

impl PipelineConfig {
    pub fn new(beta: f64, gamma: f64, k: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            beta,
            gamma,
            k,
            seed,
            tie_break: TieBreak::Lexicographic,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=2.0).contains(&self.beta) {
            return Err(Error::InvalidConfig(format!(
                "beta must lie in [0, 2], got {}",
                self.beta
            )));
        }
        if !(self.gamma >= 0.0 && self.gamma < self.beta) {
            return Err(Error::InvalidConfig(format!(
                "gamma must lie in [0, beta), got gamma={} beta={}",
                self.gamma, self.beta
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        Ok(())
    }

    /// The salient-clustering termination distance, `beta - gamma`.
    pub fn termination_distance(&self) -> f64 {
        self.beta - self.gamma
    }
}
