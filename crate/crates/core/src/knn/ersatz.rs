//! Time-averaged ("ersatz") information quantities of a single window.
//!
//! All samples of a length-T window are pooled and treated as draws from
//! one stationary distribution. The entropy of the pooled delay embedding,
//! the auto-mutual information between two consecutive embedded chunks and
//! the entropy rate assembled from them then depend on T by construction;
//! for a motion with stationary increments only the entropy rate stays
//! (nearly) independent of T.
//!
//! At scale tau the window is decimated to one sample every tau before
//! embedding, so the point count is T / tau. Without decimation the
//! temporal neighbors of each embedded point sit within a single unit
//! increment of it and capture the local path density instead of the
//! pooled distribution, which wrecks the scale dependence of every
//! estimate.

use crate::embedding::{increment_std, takens_embed, EmbeddedPointSet, EmbeddingSpec};
use crate::error::{Error, Result};
use crate::trajectory::Trajectory;

use super::estimators::{kl_entropy_multi, ksg_multi};
use super::{EstimatorConfig, InfoEstimate, Quantity};

fn cfg_for(traj: &Trajectory, cfg: &EstimatorConfig) -> EstimatorConfig {
    EstimatorConfig {
        jitter_seed: traj.spec.seed,
        ..*cfg
    }
}

/// One sample every `tau`, so delay-`tau` vectors of the input become
/// delay-1 vectors of the output.
fn decimate(traj: &Trajectory, tau: usize) -> Trajectory {
    if tau <= 1 {
        return traj.clone();
    }
    Trajectory {
        samples: traj.samples.iter().step_by(tau).copied().collect(),
        role: traj.role,
        spec: traj.spec.clone(),
    }
}

/// Entropy of the pooled `(m, tau)` delay embedding of the window.
pub fn ersatz_entropy(
    traj: &Trajectory,
    m: usize,
    tau: usize,
    cfg: &EstimatorConfig,
) -> Result<InfoEstimate> {
    let window = traj.len();
    let dec = decimate(traj, tau);
    let pts = takens_embed(&dec, EmbeddingSpec::new(m, 1))?;
    let value = kl_entropy_multi(&pts, &[cfg.k], &cfg_for(traj, cfg))?[0];
    Ok(InfoEstimate {
        quantity: Quantity::Entropy,
        value,
        m,
        n: 0,
        tau,
        window,
        k: cfg.k,
        seed: traj.spec.seed,
    })
}

/// Auto-mutual information between the embedded chunk `x_t^(n,tau)` and
/// its predecessor `x_{t-n tau}^(m,tau)`, pooled over the window.
pub fn ersatz_ami(
    traj: &Trajectory,
    m: usize,
    n: usize,
    tau: usize,
    cfg: &EstimatorConfig,
) -> Result<InfoEstimate> {
    if n == 0 {
        return Err(Error::invalid("n", "chunk dimension must be >= 1"));
    }
    // The pair of consecutive chunks is exactly one (m + n)-dimensional
    // delay vector: the first n coordinates are the recent chunk.
    let window = traj.len();
    let dec = decimate(traj, tau);
    let joint = takens_embed(&dec, EmbeddingSpec::new(m + n, 1))?;
    let value = ksg_multi(&joint, n, &[cfg.k], &cfg_for(traj, cfg))?[0];
    Ok(InfoEstimate {
        quantity: Quantity::Ami,
        value,
        m,
        n,
        tau,
        window,
        k: cfg.k,
        seed: traj.spec.seed,
    })
}

/// Entropy rate assembled as `H_T - I_T^(m,1,tau)`. Both terms are
/// estimated on the same tau-decimated sample so their biases cancel the
/// way they do at tau = 1.
pub fn ersatz_entropy_rate(
    traj: &Trajectory,
    m: usize,
    tau: usize,
    cfg: &EstimatorConfig,
) -> Result<InfoEstimate> {
    let h1 = ersatz_entropy(traj, 1, tau, cfg)?;
    let ami = ersatz_ami(traj, m, 1, tau, cfg)?;
    Ok(InfoEstimate {
        quantity: Quantity::EntropyRate,
        value: h1.value - ami.value,
        m,
        n: 1,
        tau,
        window: traj.len(),
        k: cfg.k,
        seed: traj.spec.seed,
    })
}

/// Alternative assembly of the entropy rate as the entropy increase from
/// embedding dimension `m` to `m + 1`; cross-checks [`ersatz_entropy_rate`].
pub fn ersatz_entropy_rate_diff(
    traj: &Trajectory,
    m: usize,
    tau: usize,
    cfg: &EstimatorConfig,
) -> Result<InfoEstimate> {
    let hi = ersatz_entropy(traj, m + 1, tau, cfg)?;
    let lo = ersatz_entropy(traj, m, tau, cfg)?;
    Ok(InfoEstimate {
        quantity: Quantity::EntropyRate,
        value: hi.value - lo.value,
        m,
        n: 0,
        tau,
        window: traj.len(),
        k: cfg.k,
        seed: traj.spec.seed,
    })
}

/// Entropy rate for every neighbor count in `ks`, sharing one neighbor
/// pass per term; used by the bias grid where k varies over a wide range.
pub fn ersatz_entropy_rate_multi_k(
    traj: &Trajectory,
    m: usize,
    tau: usize,
    ks: &[usize],
) -> Result<Vec<f64>> {
    let dec = decimate(traj, tau);
    let cfg = EstimatorConfig {
        jitter_seed: traj.spec.seed,
        ..EstimatorConfig::default()
    };
    let raw = EmbeddedPointSet::from_rows(dec.samples.clone(), 1);
    let h = kl_entropy_multi(&raw, ks, &cfg)?;
    let joint = takens_embed(&dec, EmbeddingSpec::new(m + 1, 1))?;
    let ami = ksg_multi(&joint, 1, ks, &cfg)?;
    Ok(h.iter().zip(&ami).map(|(h, a)| h - a).collect())
}

/// Entropy rate minus `ln sigma_tau`; flat in `tau` for an exactly
/// self-similar process, so its residual drift probes deviations from
/// self-similarity.
pub fn normalized_entropy_rate(
    traj: &Trajectory,
    m: usize,
    tau: usize,
    cfg: &EstimatorConfig,
) -> Result<InfoEstimate> {
    let rate = ersatz_entropy_rate(traj, m, tau, cfg)?;
    let sigma_tau = increment_std(traj, tau)?;
    Ok(InfoEstimate {
        quantity: Quantity::NormalizedEntropyRate,
        value: rate.value - sigma_tau.ln(),
        ..rate
    })
}

/// How to combine the disjoint windows of a long record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowMode {
    /// Estimate each window separately and average the estimates.
    Average,
    /// Pool the embedded points of all windows into one estimate.
    Pool,
}

fn windows(traj: &Trajectory, window: usize) -> Result<Vec<Trajectory>> {
    if window == 0 || window > traj.len() {
        return Err(Error::Length(format!(
            "window {window} out of range for {} samples",
            traj.len()
        )));
    }
    Ok(traj
        .samples
        .chunks_exact(window)
        .map(|chunk| Trajectory {
            samples: chunk.to_vec(),
            role: traj.role,
            spec: traj.spec.clone(),
        })
        .collect())
}

/// Windowed ersatz entropy over a record longer than one window.
pub fn ersatz_entropy_windowed(
    traj: &Trajectory,
    window: usize,
    mode: WindowMode,
    m: usize,
    tau: usize,
    cfg: &EstimatorConfig,
) -> Result<InfoEstimate> {
    let parts = windows(traj, window)?;
    let value = match mode {
        WindowMode::Average => {
            let mut acc = 0.0;
            for part in &parts {
                acc += ersatz_entropy(part, m, tau, cfg)?.value;
            }
            acc / parts.len() as f64
        }
        WindowMode::Pool => {
            let mut data = Vec::new();
            for part in &parts {
                let pts = takens_embed(&decimate(part, tau), EmbeddingSpec::new(m, 1))?;
                data.extend_from_slice(pts.as_flat());
            }
            let pooled = EmbeddedPointSet::from_rows(data, m);
            kl_entropy_multi(&pooled, &[cfg.k], &cfg_for(traj, cfg))?[0]
        }
    };
    Ok(InfoEstimate {
        quantity: Quantity::Entropy,
        value,
        m,
        n: 0,
        tau,
        window,
        k: cfg.k,
        seed: traj.spec.seed,
    })
}

/// Windowed ersatz entropy rate (`H - I` assembly per window).
pub fn ersatz_entropy_rate_windowed(
    traj: &Trajectory,
    window: usize,
    mode: WindowMode,
    m: usize,
    tau: usize,
    cfg: &EstimatorConfig,
) -> Result<InfoEstimate> {
    let parts = windows(traj, window)?;
    let value = match mode {
        WindowMode::Average => {
            let mut acc = 0.0;
            for part in &parts {
                acc += ersatz_entropy_rate(part, m, tau, cfg)?.value;
            }
            acc / parts.len() as f64
        }
        WindowMode::Pool => {
            let mut raw = Vec::new();
            let mut joint_data = Vec::new();
            for part in &parts {
                let dec = decimate(part, tau);
                raw.extend_from_slice(&dec.samples);
                let joint = takens_embed(&dec, EmbeddingSpec::new(m + 1, 1))?;
                joint_data.extend_from_slice(joint.as_flat());
            }
            let cfg_j = cfg_for(traj, cfg);
            let h1 = kl_entropy_multi(&EmbeddedPointSet::from_rows(raw, 1), &[cfg.k], &cfg_j)?[0];
            let joint = EmbeddedPointSet::from_rows(joint_data, m + 1);
            let ami = ksg_multi(&joint, 1, &[cfg.k], &cfg_j)?[0];
            h1 - ami
        }
    };
    Ok(InfoEstimate {
        quantity: Quantity::EntropyRate,
        value,
        m,
        n: 1,
        tau,
        window,
        k: cfg.k,
        seed: traj.spec.seed,
    })
}
