//! Exact synthesis of a stationary Gaussian sequence with a prescribed
//! autocovariance by circulant embedding.
//!
//! The target covariance `c(0..=n)` is embedded in the first row of a
//! 2n-circulant, whose eigenvalues are the FFT of that row. Drawing complex
//! normals scaled by the eigenvalue square roots and transforming back
//! yields a Gaussian vector with exactly the requested covariance.

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{num_complex::Complex, Fft, FftPlanner};

use crate::error::{Error, Result};

/// Negative eigenvalues with magnitude below `EIG_CLIP_REL * max` are
/// treated as round-off and clipped to zero; anything larger aborts.
pub const EIG_CLIP_REL: f64 = 1e-10;

pub struct CirculantGaussian {
    n: usize,
    /// sqrt(eigenvalue / (2 * M)) factors, M = 2n.
    scale: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

/// FFT of a real vector, in place of the returned complex buffer.
fn fft_forward(row: &[f64]) -> Vec<Complex<f64>> {
    let mut buf: Vec<Complex<f64>> = row.iter().map(|&x| Complex::new(x, 0.0)).collect();
    FftPlanner::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    buf
}

/// Eigenvalues of the 2n-circulant embedding the covariance `cov[0..=n]`.
pub fn embedding_eigenvalues(cov: &[f64]) -> Vec<f64> {
    let n = cov.len() - 1;
    let m = 2 * n;
    let mut row = vec![0.0; m];
    for (lag, &c) in cov.iter().enumerate() {
        row[lag] = c;
        if lag > 0 && lag < n {
            row[m - lag] = c;
        }
    }
    fft_forward(&row).iter().map(|z| z.re).collect()
}

/// Clip tiny negative eigenvalues to zero; error out on material ones.
pub fn clip_eigenvalues(mut eig: Vec<f64>) -> Result<Vec<f64>> {
    let max = eig.iter().cloned().fold(f64::MIN, f64::max);
    if !(max > 0.0) {
        return Err(Error::Synthesis(
            "circulant spectrum has no positive eigenvalue".into(),
        ));
    }
    let tol = EIG_CLIP_REL * max;
    for v in eig.iter_mut() {
        if *v < 0.0 {
            if -*v > tol {
                return Err(Error::Synthesis(format!(
                    "circulant eigenvalue {v:.3e} below -{tol:.3e}; \
                     target covariance has no valid embedding"
                )));
            }
            *v = 0.0;
        }
    }
    Ok(eig)
}

impl CirculantGaussian {
    /// Prepare a sampler for `cov[0..=n]`; `n` must be a power of two.
    pub fn new(cov: &[f64]) -> Result<Self> {
        let n = cov.len() - 1;
        assert!(n.is_power_of_two(), "output length must be a power of two");
        let eig = clip_eigenvalues(embedding_eigenvalues(cov))?;
        let m = 2 * n;
        let scale = eig.iter().map(|&l| (l / (2.0 * m as f64)).sqrt()).collect();
        let fft = FftPlanner::new().plan_fft_forward(m);
        Ok(Self { n, scale, fft })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Draw one realization of length `n`.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let n = self.n;
        let m = 2 * n;
        let mut v = vec![Complex::new(0.0, 0.0); m];
        let mut normal = || -> f64 { StandardNormal.sample(rng) };
        // Hermitian-symmetric complex normals: real at 0 and n, conjugate
        // pairs elsewhere, each scaled so the FFT has the target covariance.
        v[0] = Complex::new(std::f64::consts::SQRT_2 * self.scale[0] * normal(), 0.0);
        for k in 1..n {
            let re = self.scale[k] * normal();
            let im = self.scale[k] * normal();
            v[k] = Complex::new(re, im);
            v[m - k] = Complex::new(re, -im);
        }
        v[n] = Complex::new(std::f64::consts::SQRT_2 * self.scale[n] * normal(), 0.0);
        self.fft.process(&mut v);
        v.truncate(n);
        v.into_iter().map(|z| z.re).collect()
    }
}
