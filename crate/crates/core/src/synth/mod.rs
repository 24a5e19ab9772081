//! Reproducible synthesis of the four noise classes and their motions.
//!
//! Every synthesizer is a pure function of its [`NoiseSpec`]: identical
//! specs (seed included) give identical trajectories regardless of thread
//! count. All noises leave the pipeline with sample mean exactly zero and
//! sample std exactly `sigma1`, so the integrated motions are drift-free
//! and directly comparable across process classes.

pub mod circulant;
pub mod fgn;
pub mod lognormal;
pub mod mrw;

pub use fgn::{fgn_autocovariance, synth_fgn};
pub use lognormal::{synth_lognormal_noise, LognormalMarginal, TransformRank};
pub use mrw::{mrw_target_correlation, omega_covariance, synth_mrw};

use crate::error::{Error, Result};
use crate::stats;
use crate::trajectory::{NoiseSpec, ProcessKind, Role, Trajectory};

/// Center to zero mean and rescale to sample std `sigma1`.
pub(crate) fn finalize_noise(mut samples: Vec<f64>, sigma1: f64) -> Vec<f64> {
    let m = stats::mean(&samples);
    for v in samples.iter_mut() {
        *v -= m;
    }
    let sd = stats::std_dev(&samples);
    if sd > 0.0 {
        let scale = sigma1 / sd;
        for v in samples.iter_mut() {
            *v *= scale;
        }
    }
    samples
}

/// Synthesize the noise described by `spec`, dispatching on its kind.
pub fn synth_noise(spec: &NoiseSpec) -> Result<Trajectory> {
    match spec.kind {
        ProcessKind::Fgn => synth_fgn(spec),
        ProcessKind::LognormalH1 => synth_lognormal_noise(spec, TransformRank::Hermitian1),
        ProcessKind::LognormalH2 => synth_lognormal_noise(spec, TransformRank::EvenHermitian2),
        ProcessKind::Mrw => synth_mrw(spec),
    }
}

/// Cumulative sum of a noise: `m_t = sum_{k<=t} w_k` with `m_0 = 0`
/// implicit (the output keeps the input length).
pub fn integrate_to_motion(noise: &Trajectory) -> Result<Trajectory> {
    if noise.role != Role::Noise {
        return Err(Error::invalid("role", "can only integrate a noise"));
    }
    let mut acc = 0.0;
    let samples = noise
        .samples
        .iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect();
    Ok(Trajectory {
        samples,
        role: Role::Motion,
        spec: noise.spec.clone(),
    })
}

/// Noise synthesis followed by integration.
pub fn synth_motion(spec: &NoiseSpec) -> Result<Trajectory> {
    integrate_to_motion(&synth_noise(spec)?)
}

/// Analytic autocorrelation coefficients (lags `0..=max_lag`) targeted by
/// the synthesizer for this spec.
pub fn target_correlation(spec: &NoiseSpec, max_lag: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    match spec.kind {
        ProcessKind::Fgn | ProcessKind::LognormalH1 | ProcessKind::LognormalH2 => (0..=max_lag
            as u64)
            .map(|tau| fgn_autocovariance(tau, spec.hurst, 1.0))
            .collect(),
        ProcessKind::Mrw => Ok(mrw_target_correlation(spec, max_lag)),
    }
}
