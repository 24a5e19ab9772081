//! Closed-form reference values for the fractional Brownian motion and the
//! log-normal marginals, used to calibrate the estimators and as oracles in
//! the acceptance suite.
//!
//! For an fBm of exponent H and unit-scale std sigma1, with window T and
//! scale tau (tau << T):
//!
//!   H1        = 1/2 ln(2 pi e sigma1^2)
//!   entropy   = H1 + H ln T
//!   ami       = -H ln(tau / T) + C(tau / T)
//!   rate      = H1 + H ln tau - C(tau / T)
//!
//! where C is a negative correction vanishing as tau / T -> 0.

use crate::error::{Error, Result};

const LN_2PI_E: f64 = 2.837877066409345;

/// `1/2 ln(2 pi e sigma1^2)`: entropy of the motion at unit time.
pub fn fbm_unit_entropy(sigma1: f64) -> f64 {
    0.5 * LN_2PI_E + sigma1.ln()
}

/// Covariance `E{B_t B_{t-tau}}` of the fBm,
/// `(sigma1^2 / 2)(t^2H + (t-tau)^2H - tau^2H)` for `0 <= tau < t`.
pub fn fbm_covariance(t: u64, tau: u64, hurst: f64, sigma1: f64) -> Result<f64> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::invalid("hurst", format!("{hurst} not in (0, 1)")));
    }
    if !(sigma1 > 0.0) {
        return Err(Error::invalid("sigma1", "must be positive"));
    }
    if t == 0 || tau >= t {
        return Err(Error::invalid(
            "tau",
            format!("need 0 <= tau < t, got tau = {tau}, t = {t}"),
        ));
    }
    let h2 = 2.0 * hurst;
    let (t, tau) = (t as f64, tau as f64);
    Ok(0.5 * sigma1 * sigma1 * (t.powf(h2) + (t - tau).powf(h2) - tau.powf(h2)))
}

/// Shannon entropy of a centered Gaussian with covariance `cov`
/// (row-major, `d x d`): `1/2 ln((2 pi e)^d det cov)`.
pub fn gaussian_entropy(cov: &[f64], d: usize) -> Result<f64> {
    assert_eq!(cov.len(), d * d, "covariance must be d x d");
    let log_det = cholesky_log_det(cov, d)?;
    Ok(0.5 * (d as f64 * LN_2PI_E + log_det))
}

/// Log-determinant via Cholesky; errors when not positive definite.
fn cholesky_log_det(cov: &[f64], d: usize) -> Result<f64> {
    let mut l = vec![0.0f64; d * d];
    let mut log_det = 0.0;
    for i in 0..d {
        for j in 0..=i {
            let mut sum = cov[i * d + j];
            for k in 0..j {
                sum -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::NotPositiveDefinite);
                }
                l[i * d + i] = sum.sqrt();
                log_det += sum.ln();
            } else {
                l[i * d + j] = sum / l[j * d + j];
            }
        }
    }
    Ok(log_det)
}

/// Predicted ersatz entropy of the fBm over a window of length `t_window`.
pub fn fbm_ersatz_entropy_pred(t_window: f64, hurst: f64, sigma1: f64) -> f64 {
    fbm_unit_entropy(sigma1) + hurst * t_window.ln()
}

/// Finite-window correction of the fBm auto-mutual information,
/// `C(x) = 1/2 ln[(x/2 + a) / (x + a)]` with `a = 1/(2H + 1)`.
/// Non-positive on (0, 1); first order `-(2H + 1)/4 x`.
pub fn correction_term(tau_over_t: f64, hurst: f64) -> f64 {
    let a = 1.0 / (2.0 * hurst + 1.0);
    0.5 * ((0.5 * tau_over_t + a) / (tau_over_t + a)).ln()
}

/// Predicted ersatz auto-mutual information of the fBm.
pub fn fbm_ersatz_ami_pred(tau: f64, t_window: f64, hurst: f64) -> f64 {
    -hurst * (tau / t_window).ln() + correction_term(tau / t_window, hurst)
}

/// Predicted ersatz entropy rate of the fBm.
pub fn fbm_ersatz_rate_pred(tau: f64, t_window: f64, hurst: f64, sigma1: f64) -> f64 {
    fbm_unit_entropy(sigma1) + hurst * tau.ln() - correction_term(tau / t_window, hurst)
}

/// Which closed form evaluates the log-normal unit-time entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LognormalEntropyMode {
    /// `1/2 ln(2 pi e sigma') + mu'` with `sigma' = 2 ln(1 + sigma^2/mu^2)`.
    Footnote,
    /// Standard parametrization `1/2 ln(2 pi e s2) + mu'` with
    /// `s2 = ln(1 + sigma^2/mu^2)`, the differential entropy of a
    /// log-normal with mean `mu` and std `sigma`.
    Textbook,
}

/// Unit-time entropy of a log-normal marginal with mean `mu`, std `sigma`.
/// Both parametrizations are evaluated verbatim so data can arbitrate
/// between them; estimators agree with the textbook form.
pub fn lognormal_unit_entropy(mu: f64, sigma: f64, mode: LognormalEntropyMode) -> Result<f64> {
    if !(mu > 0.0) || !(sigma > 0.0) {
        return Err(Error::invalid("mu", "mean and std must be positive"));
    }
    let ratio2 = (sigma / mu).powi(2);
    let mu_log = (mu * mu / (mu * mu + sigma * sigma).sqrt()).ln();
    let value = match mode {
        LognormalEntropyMode::Footnote => {
            0.5 * (LN_2PI_E + (2.0 * (1.0 + ratio2).ln()).ln()) + mu_log
        }
        LognormalEntropyMode::Textbook => 0.5 * (LN_2PI_E + (1.0 + ratio2).ln().ln()) + mu_log,
    };
    Ok(value)
}

/// Unit-time entropy of the noise actually synthesized for a log-normal
/// spec: the textbook marginal entropy shifted by the std normalization
/// to `sigma1`.
pub fn lognormal_noise_entropy(mu: f64, sigma: f64, sigma1: f64) -> Result<f64> {
    Ok(lognormal_unit_entropy(mu, sigma, LognormalEntropyMode::Textbook)? + (sigma1 / sigma).ln())
}

/// Dominant entropy offset of a self-similar process at time `t` and
/// scale `tau`, relative to its unit-time value: `H ln t + (m-1) H ln tau`.
pub fn selfsimilar_entropy_offset(t: f64, tau: f64, m: usize, hurst: f64) -> f64 {
    hurst * t.ln() + (m as f64 - 1.0) * hurst * tau.ln()
}

/// Entropy-rate offset of a self-similar process: `H ln tau`.
pub fn selfsimilar_rate_offset(tau: f64, hurst: f64) -> f64 {
    hurst * tau.ln()
}
