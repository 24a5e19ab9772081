//! Multifractal random walk noise: an fGn factor modulated by the
//! exponential of an independent, logarithmically correlated Gaussian
//! field. The fGn factor uses the exponent `hurst + c2` so the integrated
//! motion scales like an fBm of exponent `hurst`.

use crate::error::{Error, Result};
use crate::rng::{substream, STREAM_CASCADE};
use crate::trajectory::{NoiseSpec, ProcessKind, Role, Trajectory};

use super::circulant::CirculantGaussian;
use super::fgn::{fgn_covariance_sequence, sample_fgn_raw};
use super::finalize_noise;

/// Covariance of the log-amplitude field,
/// `c_omega(tau) = c2 ln(L / (|tau| + 1))` inside the integral scale `L`
/// and zero beyond, so the variance at `tau = 0` is `c2 ln L`.
pub fn omega_covariance(tau: u64, c2: f64, integral_scale: usize) -> f64 {
    let l = integral_scale as f64;
    if (tau as f64) < l {
        c2 * (l / (tau as f64 + 1.0)).ln()
    } else {
        0.0
    }
}

/// Analytic autocorrelation coefficients of the MRW noise at lags
/// `0..=max_lag`: the fGn covariance of exponent `hurst + c2` modulated by
/// `exp(c_omega)`, normalized to one at lag zero.
pub fn mrw_target_correlation(spec: &NoiseSpec, max_lag: usize) -> Vec<f64> {
    let h_fgn = spec.hurst + spec.c2;
    let cov = fgn_covariance_sequence(max_lag, h_fgn);
    let at =
        |lag: usize| cov[lag] * omega_covariance(lag as u64, spec.c2, spec.integral_scale).exp();
    let c0 = at(0);
    (0..=max_lag).map(|lag| at(lag) / c0).collect()
}

pub fn synth_mrw(spec: &NoiseSpec) -> Result<Trajectory> {
    spec.validate()?;
    if spec.kind != ProcessKind::Mrw {
        return Err(Error::invalid("kind", "synth_mrw requires kind = mrw"));
    }
    let h_fgn = spec.hurst + spec.c2;
    let raw = sample_fgn_raw(spec.length, h_fgn, spec.seed)?;
    // With c2 = 0 the cascade factor is constant, so the output must be
    // bitwise identical to a plain fGn of the same spec.
    let samples = if spec.c2 > 0.0 {
        let factor = finalize_noise(raw, 1.0);
        let cov: Vec<f64> = (0..=spec.length as u64)
            .map(|tau| omega_covariance(tau, spec.c2, spec.integral_scale))
            .collect();
        let omega = CirculantGaussian::new(&cov)?.sample(&mut substream(spec.seed, STREAM_CASCADE));
        factor
            .iter()
            .zip(&omega)
            .map(|(w, o)| w * o.exp())
            .collect()
    } else {
        raw
    };
    Ok(Trajectory {
        samples: finalize_noise(samples, spec.sigma1),
        role: Role::Noise,
        spec: spec.clone(),
    })
}
