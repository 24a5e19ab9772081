//! Log-normal noises with a prescribed correlation function.
//!
//! A stationary Gaussian series `Z` is mapped pointwise through a
//! transform `f` that imposes a log-normal marginal: the rank-1 Hermitian
//! transform `f(z) = F^-1(Phi(z))` (monotone) or the rank-2 even-Hermitian
//! transform `f(z) = F^-1(2 Phi(|z|) - 1)` (even in `z`). The correlation
//! of `f(Z)` is a function of the correlation of `Z` through the Hermite
//! expansion of `f`; inverting that link per lag gives the Gaussian
//! correlation to synthesize so the output hits the target. When the
//! implied Gaussian covariance has no valid circulant embedding, its
//! spectrum is clipped and the mapping re-checked, iterating until the
//! realized correlation is within tolerance.

use statrs::function::erf::{erf, erf_inv};

use crate::error::{Error, Result};
use crate::rng::{substream, STREAM_PRIMARY};
use crate::trajectory::{NoiseSpec, ProcessKind, Role, Trajectory};

use super::circulant::{embedding_eigenvalues, CirculantGaussian, EIG_CLIP_REL};
use super::fgn::fgn_covariance_sequence;
use super::finalize_noise;

/// Which pointwise transform builds the log-normal marginal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformRank {
    /// Monotone `F^-1(Phi(z))`; Hermite rank 1.
    Hermitian1,
    /// Even `F^-1(2 Phi(|z|) - 1)`; Hermite rank 2.
    EvenHermitian2,
}

/// Log-normal marginal specified by its target mean and standard deviation.
#[derive(Debug, Clone, Copy)]
pub struct LognormalMarginal {
    pub mean: f64,
    pub std: f64,
    /// Mean of the underlying Gaussian `log X`.
    pub mu_log: f64,
    /// Standard deviation of the underlying Gaussian `log X`.
    pub sigma_log: f64,
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

fn normal_quantile(p: f64) -> f64 {
    std::f64::consts::SQRT_2 * erf_inv(2.0 * p - 1.0)
}

impl LognormalMarginal {
    pub fn new(mean: f64, std: f64) -> Result<Self> {
        if !(mean > 0.0) || !(std > 0.0) {
            return Err(Error::invalid(
                "lognormal_mu",
                "log-normal mean and std must be positive",
            ));
        }
        let sigma2_log = (1.0 + (std / mean).powi(2)).ln();
        Ok(Self {
            mean,
            std,
            mu_log: mean.ln() - 0.5 * sigma2_log,
            sigma_log: sigma2_log.sqrt(),
        })
    }

    pub fn from_spec(spec: &NoiseSpec) -> Result<Self> {
        Self::new(spec.lognormal_mu, spec.lognormal_sigma)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            normal_cdf((x.ln() - self.mu_log) / self.sigma_log)
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        // erf saturates to 1 within f64 for arguments beyond ~8 sigma;
        // cap just below 1 so the quantile stays finite.
        let p = p.min(1.0 - 1e-16);
        (self.mu_log + self.sigma_log * normal_quantile(p)).exp()
    }

    /// Pointwise transform of a standard normal value.
    pub fn transform(&self, z: f64, rank: TransformRank) -> f64 {
        match rank {
            // F^-1(Phi(z)) collapses to a closed form for the log-normal.
            TransformRank::Hermitian1 => (self.mu_log + self.sigma_log * z).exp(),
            TransformRank::EvenHermitian2 => self.quantile(2.0 * normal_cdf(z.abs()) - 1.0),
        }
    }
}

/// Truncation order of the Hermite expansion of the transform.
const HERMITE_TERMS: usize = 128;
/// Simpson quadrature grid for the Hermite coefficients.
const QUAD_HALF_RANGE: f64 = 13.0;
const QUAD_INTERVALS: usize = 4096;
/// Resolution of the tabulated link function used for inversion.
const LINK_GRID: usize = 8192;
/// Accepted deviation between realized and target correlation after
/// spectrum clipping.
const CORR_TOL: f64 = 2e-3;
const MAX_MAPPING_ITERS: usize = 8;

/// Tabulated normalized link `rho_X = g(rho_Z)` for one transform.
pub(crate) struct HermiteLink {
    /// `beta[k]` is the squared orthonormal Hermite coefficient of order
    /// `k + 1`, normalized so the weights sum to one.
    beta: Vec<f64>,
    /// Smallest representable Gaussian correlation (-1 for rank 1, 0 for
    /// the even rank-2 transform, whose link is even in rho).
    rho_lo: f64,
    /// g evaluated on a uniform grid over [rho_lo, 1].
    grid: Vec<f64>,
    /// Relative Hermite-mass truncation error (diagnostic).
    #[cfg_attr(not(test), allow(dead_code))]
    pub(crate) truncation: f64,
}

impl HermiteLink {
    pub(crate) fn new(marginal: &LognormalMarginal, rank: TransformRank) -> Result<Self> {
        let (beta, truncation) = hermite_weights(marginal, rank)?;
        let rho_lo = match rank {
            TransformRank::Hermitian1 => -1.0,
            TransformRank::EvenHermitian2 => 0.0,
        };
        let eval = |rho: f64| -> f64 {
            // Horner on sum_k beta_k rho^k with k starting at 1.
            let mut acc = 0.0;
            for &b in beta.iter().rev() {
                acc = (acc + b) * rho;
            }
            acc
        };
        let grid: Vec<f64> = (0..=LINK_GRID)
            .map(|i| eval(rho_lo + (1.0 - rho_lo) * i as f64 / LINK_GRID as f64))
            .collect();
        for w in grid.windows(2) {
            if w[1] < w[0] - 1e-12 {
                return Err(Error::CorrelationMapping(
                    "link function is not monotone".into(),
                ));
            }
        }
        Ok(Self {
            beta,
            rho_lo,
            grid,
            truncation,
        })
    }

    pub(crate) fn forward(&self, rho: f64) -> f64 {
        let mut acc = 0.0;
        for &b in self.beta.iter().rev() {
            acc = (acc + b) * rho;
        }
        acc
    }

    /// Invert the link: the Gaussian correlation whose image is `target`.
    pub(crate) fn invert(&self, target: f64) -> Result<f64> {
        let lo_val = self.grid[0];
        let hi_val = *self.grid.last().unwrap();
        // Absorb round-off at the achievable boundary.
        let slack = 1e-9;
        if target < lo_val - slack || target > hi_val + slack {
            return Err(Error::CorrelationMapping(format!(
                "target correlation {target:.6} outside achievable range \
                 [{lo_val:.6}, {hi_val:.6}]"
            )));
        }
        let t = target.clamp(lo_val, hi_val);
        // Binary search over the monotone grid, then linear interpolation.
        let (mut lo, mut hi) = (0usize, self.grid.len() - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.grid[mid] <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let step = (1.0 - self.rho_lo) / LINK_GRID as f64;
        let (g0, g1) = (self.grid[lo], self.grid[hi]);
        let frac = if g1 > g0 { (t - g0) / (g1 - g0) } else { 0.0 };
        Ok(self.rho_lo + (lo as f64 + frac) * step)
    }
}

/// Squared orthonormal-Hermite coefficients of the transform, normalized
/// to unit sum, plus the relative mass lost to truncation.
fn hermite_weights(marginal: &LognormalMarginal, rank: TransformRank) -> Result<(Vec<f64>, f64)> {
    let n = QUAD_INTERVALS;
    let h = 2.0 * QUAD_HALF_RANGE / n as f64;
    // Simpson weights h/3 * (1, 4, 2, ..., 4, 1).
    let mut coeff = vec![0.0f64; HERMITE_TERMS + 1];
    let mut raw_m1 = 0.0;
    let mut raw_m2 = 0.0;
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    for i in 0..=n {
        let z = -QUAD_HALF_RANGE + i as f64 * h;
        let simpson = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let weight = simpson * (h / 3.0) * norm * (-0.5 * z * z).exp();
        let f = marginal.transform(z, rank);
        raw_m1 += weight * f;
        raw_m2 += weight * f * f;
        // Orthonormal probabilists' Hermite recurrence:
        // h_0 = 1, h_1 = z, h_{k+1} = (z h_k - sqrt(k) h_{k-1}) / sqrt(k+1).
        let mut h_prev = 1.0;
        let mut h_cur = z;
        coeff[0] += weight * f;
        if HERMITE_TERMS >= 1 {
            coeff[1] += weight * f * z;
        }
        for k in 1..HERMITE_TERMS {
            let h_next = (z * h_cur - (k as f64).sqrt() * h_prev) / ((k + 1) as f64).sqrt();
            coeff[k + 1] += weight * f * h_next;
            h_prev = h_cur;
            h_cur = h_next;
        }
    }
    let variance = raw_m2 - raw_m1 * raw_m1;
    if !(variance > 0.0) {
        return Err(Error::CorrelationMapping(
            "transform has non-positive variance".into(),
        ));
    }
    let beta: Vec<f64> = coeff[1..].iter().map(|a| a * a).collect();
    let total: f64 = beta.iter().sum();
    let truncation = (variance - total).abs() / variance;
    Ok((beta.iter().map(|b| b / total).collect(), truncation))
}

/// Gaussian correlation sequence realizing `target` through `link`,
/// with spectrum clipping and re-mapping when the direct inversion has
/// no valid embedding.
fn gaussian_correlation_for(target: &[f64], link: &HermiteLink) -> Result<Vec<f64>> {
    let n = target.len() - 1;
    let invert_all = |goal: &[f64]| -> Result<Vec<f64>> {
        let mut rho = Vec::with_capacity(goal.len());
        rho.push(1.0);
        for &t in &goal[1..] {
            rho.push(link.invert(t)?);
        }
        Ok(rho)
    };
    let mut rho_z = invert_all(target)?;
    let mut goal = target.to_vec();
    for _ in 0..MAX_MAPPING_ITERS {
        let eig = embedding_eigenvalues(&rho_z);
        let max_eig = eig.iter().cloned().fold(f64::MIN, f64::max);
        let min_eig = eig.iter().cloned().fold(f64::MAX, f64::min);
        if min_eig >= -EIG_CLIP_REL * max_eig {
            return Ok(rho_z);
        }
        // Project onto valid covariances: zero the negative part of the
        // spectrum and take the implied correlation back.
        let clipped = clip_spectrum(eig);
        let mut projected = inverse_eigentransform(&clipped, n);
        let scale = projected[0];
        if !(scale > 0.0) {
            return Err(Error::CorrelationMapping(
                "clipped spectrum lost all variance".into(),
            ));
        }
        for v in projected.iter_mut() {
            *v /= scale;
        }
        let worst = projected[1..]
            .iter()
            .zip(&target[1..])
            .map(|(&r, &t)| (link.forward(r) - t).abs())
            .fold(0.0f64, f64::max);
        if worst <= CORR_TOL {
            return Ok(projected);
        }
        // Over-relax the goal to compensate what clipping removed.
        for lag in 1..=n {
            let implied = link.forward(projected[lag]);
            goal[lag] += target[lag] - implied;
        }
        let lo = link.grid[0];
        let hi = *link.grid.last().unwrap();
        for g in goal[1..].iter_mut() {
            *g = g.clamp(lo, hi);
        }
        rho_z = invert_all(&goal)?;
    }
    Err(Error::CorrelationMapping(format!(
        "no valid embedding within {CORR_TOL} after {MAX_MAPPING_ITERS} iterations"
    )))
}

fn clip_spectrum(mut eig: Vec<f64>) -> Vec<f64> {
    for v in eig.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    eig
}

/// First `n + 1` autocovariances implied by a circulant spectrum.
fn inverse_eigentransform(eig: &[f64], n: usize) -> Vec<f64> {
    use rustfft::{num_complex::Complex, FftPlanner};
    let m = eig.len();
    let mut buf: Vec<Complex<f64>> = eig.iter().map(|&x| Complex::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    buf.iter().take(n + 1).map(|z| z.re / m as f64).collect()
}

/// Synthesize a log-normal noise whose correlation matches the fGn target
/// for the spec's Hurst exponent. Output is centered and rescaled to
/// sample std `sigma1`; the marginal keeps its log-normal shape.
pub fn synth_lognormal_noise(spec: &NoiseSpec, rank: TransformRank) -> Result<Trajectory> {
    spec.validate()?;
    let kind_ok = matches!(
        (spec.kind, rank),
        (ProcessKind::LognormalH1, TransformRank::Hermitian1)
            | (ProcessKind::LognormalH2, TransformRank::EvenHermitian2)
    );
    if !kind_ok {
        return Err(Error::invalid(
            "kind",
            format!("kind {} does not match transform {rank:?}", spec.kind),
        ));
    }
    let marginal = LognormalMarginal::from_spec(spec)?;
    let link = HermiteLink::new(&marginal, rank)?;
    let target = fgn_covariance_sequence(spec.length, spec.hurst);
    let rho_z = gaussian_correlation_for(&target, &link)?;
    let gen = CirculantGaussian::new(&rho_z)?;
    let z = gen.sample(&mut substream(spec.seed, STREAM_PRIMARY));
    let samples: Vec<f64> = z.iter().map(|&z| marginal.transform(z, rank)).collect();
    Ok(Trajectory {
        samples: finalize_noise(samples, spec.sigma1),
        role: Role::Noise,
        spec: spec.clone(),
    })
}
