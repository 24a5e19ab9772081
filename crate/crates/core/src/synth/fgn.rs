//! Fractional Gaussian noise.

use crate::error::{Error, Result};
use crate::rng::{substream, STREAM_PRIMARY};
use crate::trajectory::{NoiseSpec, ProcessKind, Role, Trajectory};

use super::circulant::CirculantGaussian;
use super::finalize_noise;

/// Autocovariance of fractional Gaussian noise at integer lag `tau`,
/// `c(tau) = (sigma1^2 / 2) (|tau-1|^2H - 2 tau^2H + (tau+1)^2H)`.
///
/// The absolute value makes the first term real for non-integer `2H`;
/// at `tau = 0` it evaluates to `sigma1^2`.
pub fn fgn_autocovariance(tau: u64, hurst: f64, sigma1: f64) -> Result<f64> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::invalid("hurst", format!("{hurst} not in (0, 1)")));
    }
    if !(sigma1 > 0.0) {
        return Err(Error::invalid("sigma1", "must be positive"));
    }
    let h2 = 2.0 * hurst;
    let t = tau as f64;
    Ok(0.5 * sigma1 * sigma1 * ((t - 1.0).abs().powf(h2) - 2.0 * t.powf(h2) + (t + 1.0).powf(h2)))
}

/// Unit-variance fGn covariance sequence for lags `0..=n`.
pub(crate) fn fgn_covariance_sequence(n: usize, hurst: f64) -> Vec<f64> {
    (0..=n as u64)
        .map(|tau| fgn_autocovariance(tau, hurst, 1.0).expect("validated parameters"))
        .collect()
}

/// Synthesize one fGn realization: circulant embedding of the target
/// covariance, then centering and rescaling to sample std `sigma1`.
pub fn synth_fgn(spec: &NoiseSpec) -> Result<Trajectory> {
    spec.validate()?;
    if spec.kind != ProcessKind::Fgn {
        return Err(Error::invalid("kind", "synth_fgn requires kind = fgn"));
    }
    let raw = sample_fgn_raw(spec.length, spec.hurst, spec.seed)?;
    Ok(Trajectory {
        samples: finalize_noise(raw, spec.sigma1),
        role: Role::Noise,
        spec: spec.clone(),
    })
}

/// Raw (uncentered, unscaled) fGn draw shared with the MRW synthesizer.
pub(crate) fn sample_fgn_raw(length: usize, hurst: f64, seed: u64) -> Result<Vec<f64>> {
    let cov = fgn_covariance_sequence(length, hurst);
    let gen = CirculantGaussian::new(&cov)?;
    Ok(gen.sample(&mut substream(seed, STREAM_PRIMARY)))
}
