//! k-nearest-neighbor information estimators and the time-averaged
//! (ersatz) quantities built on them. All values are in nats and the
//! metric is the max-norm throughout, so the entropy and mutual
//! information estimators share one neighbor index.

pub mod ersatz;
pub mod estimators;
pub mod index;

pub use ersatz::{
    ersatz_ami, ersatz_entropy, ersatz_entropy_rate, ersatz_entropy_rate_diff,
    normalized_entropy_rate, WindowMode,
};
pub use estimators::{entropy_knn, mutual_information_ksg};
pub use index::MaxNormIndex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which information quantity an estimate carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Entropy,
    Ami,
    EntropyRate,
    NormalizedEntropyRate,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::Entropy => "entropy",
            Quantity::Ami => "ami",
            Quantity::EntropyRate => "rate",
            Quantity::NormalizedEntropyRate => "rate_normalized",
        }
    }
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Estimator parameters. The neighbor count `k` is the only statistical
/// parameter; the jitter fields control deterministic tie-breaking when
/// the input contains exactly coincident points.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub k: usize,
    /// Jitter amplitude relative to the per-coordinate sample std,
    /// applied only when exact ties occur.
    pub jitter_rel: f64,
    /// Seed of the jitter stream.
    pub jitter_seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            k: 5,
            jitter_rel: 1e-10,
            jitter_seed: 0,
        }
    }
}

impl EstimatorConfig {
    pub fn with_k(k: usize) -> Self {
        Self {
            k,
            ..Self::default()
        }
    }

    pub fn validate(&self, n_points: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("k", "neighbor count must be >= 1"));
        }
        if self.k >= n_points {
            return Err(Error::invalid(
                "k",
                format!("k = {} must be below the point count {n_points}", self.k),
            ));
        }
        Ok(())
    }
}

/// A scalar information estimate with its provenance.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InfoEstimate {
    pub quantity: Quantity,
    /// Value in nats.
    pub value: f64,
    pub m: usize,
    /// Second embedding dimension for mutual information; 0 otherwise.
    pub n: usize,
    pub tau: usize,
    /// Window length (sample count) the estimate was pooled over.
    pub window: usize,
    pub k: usize,
    pub seed: u64,
}
