//! Small statistical helpers shared by the synthesizers, the experiment
//! drivers and the test suites: moments, sample autocovariance, ordinary
//! and weighted least squares, Kolmogorov-Smirnov distances and
//! Freedman-Diaconis histograms.

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (ddof = 1).
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

/// Biased sample autocovariance at non-negative `lag`,
/// `(1/n) sum_t (x_t - mean)(x_{t+lag} - mean)`.
pub fn autocovariance(xs: &[f64], lag: usize) -> f64 {
    let n = xs.len();
    assert!(lag < n, "lag {lag} out of range for {n} samples");
    let m = mean(xs);
    let mut acc = 0.0;
    for t in 0..n - lag {
        acc += (xs[t] - m) * (xs[t + lag] - m);
    }
    acc / n as f64
}

/// Sample autocorrelation coefficient at `lag`.
pub fn autocorrelation(xs: &[f64], lag: usize) -> f64 {
    autocovariance(xs, lag) / autocovariance(xs, 0)
}

/// Fourth-moment ratio `E[x^4] / (E[x^2])^2` about the mean.
/// Equals 3 for a Gaussian.
pub fn flatness(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let n = xs.len() as f64;
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    m4 / (m2 * m2)
}

/// Result of a straight-line fit `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub slope_se: f64,
}

/// Ordinary least squares on `(x, y)` pairs.
pub fn ols(x: &[f64], y: &[f64]) -> LineFit {
    wls(x, y, None)
}

/// Least squares with optional per-point weights (typically `1/std^2`).
/// Zero or non-finite weights fall back to the unweighted fit.
pub fn wls(x: &[f64], y: &[f64], weights: Option<&[f64]>) -> LineFit {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need at least two points to fit a line");
    let uniform = vec![1.0; x.len()];
    let w: &[f64] = match weights {
        Some(w) if w.iter().all(|v| v.is_finite() && *v > 0.0) => w,
        _ => &uniform,
    };
    let sw: f64 = w.iter().sum();
    let xb = x.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let yb = y.iter().zip(w).map(|(y, w)| y * w).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..x.len() {
        sxx += w[i] * (x[i] - xb) * (x[i] - xb);
        sxy += w[i] * (x[i] - xb) * (y[i] - yb);
    }
    let slope = sxy / sxx;
    let intercept = yb - slope * xb;
    // Residual-based standard error, with weights treated as relative.
    let dof = (x.len() - 2).max(1) as f64;
    let mut rss = 0.0;
    for i in 0..x.len() {
        let r = y[i] - intercept - slope * x[i];
        rss += w[i] * r * r;
    }
    let s2 = rss / dof;
    LineFit {
        slope,
        intercept,
        slope_se: (s2 / sxx).sqrt(),
    }
}

/// One-sample Kolmogorov-Smirnov statistic of `samples` against the CDF `f`.
pub fn ks_statistic_cdf(samples: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let c = f(*x);
        d = d.max((c - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - c).abs());
    }
    d
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|u, v| u.partial_cmp(v).unwrap());
    ys.sort_by(|u, v| u.partial_cmp(v).unwrap());
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        // Consume tie blocks together so equal values never contribute.
        if xs[i] < ys[j] {
            i += 1;
        } else if ys[j] < xs[i] {
            j += 1;
        } else {
            let v = xs[i];
            while i < xs.len() && xs[i] == v {
                i += 1;
            }
            while j < ys.len() && ys[j] == v {
                j += 1;
            }
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic one-sample KS critical value at significance `alpha`.
pub fn ks_critical_one_sample(n: usize, alpha: f64) -> f64 {
    kolmogorov_coefficient(alpha) / (n as f64).sqrt()
}

/// Asymptotic two-sample KS critical value at significance `alpha`.
pub fn ks_critical_two_sample(n: usize, m: usize, alpha: f64) -> f64 {
    kolmogorov_coefficient(alpha) * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

fn kolmogorov_coefficient(alpha: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt()
}

/// Linear-interpolated quantile of a sorted slice, `q` in [0, 1].
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Histogram with shared, precomputed bin edges.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub edges: Vec<f64>,
    /// Normalized so the densities integrate to one.
    pub density: Vec<f64>,
}

/// Freedman-Diaconis bin edges for `xs` (used with a shared range so
/// histograms of different series stay comparable).
pub fn freedman_diaconis_edges(xs: &[f64]) -> Result<Vec<f64>> {
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    if iqr <= 0.0 {
        return Err(Error::Degenerate("zero interquartile range".into()));
    }
    let width = 2.0 * iqr / (xs.len() as f64).cbrt();
    let lo = sorted[0];
    let hi = sorted[sorted.len() - 1];
    let bins = (((hi - lo) / width).ceil() as usize).clamp(4, 4096);
    Ok((0..=bins)
        .map(|i| lo + (hi - lo) * i as f64 / bins as f64)
        .collect())
}

pub fn histogram(xs: &[f64], edges: &[f64]) -> Histogram {
    let bins = edges.len() - 1;
    let mut counts = vec![0usize; bins];
    let lo = edges[0];
    let hi = edges[bins];
    for &x in xs {
        if x < lo || x > hi {
            continue;
        }
        let frac = (x - lo) / (hi - lo);
        let idx = ((frac * bins as f64) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let total: usize = counts.iter().sum();
    let density = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| c as f64 / total.max(1) as f64 / (edges[i + 1] - edges[i]))
        .collect();
    Histogram {
        edges: edges.to_vec(),
        density,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ols_recovers_exact_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|x| 2.5 * x - 1.0).collect();
        let fit = ols(&x, &y);
        assert_relative_eq!(fit.slope, 2.5, epsilon = 1e-12);
        assert_relative_eq!(fit.intercept, -1.0, epsilon = 1e-12);
        assert!(fit.slope_se < 1e-10);
    }

    #[test]
    fn ks_of_uniform_samples_is_small() {
        // Deterministic stratified "samples" from U(0,1) have vanishing KS.
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic_cdf(&xs, |x| x.clamp(0.0, 1.0));
        assert!(d <= 0.5 / n as f64 + 1e-12, "d = {d}");
    }

    #[test]
    fn two_sample_ks_detects_shift() {
        let a: Vec<f64> = (0..500).map(|i| i as f64 / 500.0).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 0.5).collect();
        let d = ks_statistic_two_sample(&a, &b);
        assert!(d > 0.45, "d = {d}");
        assert!(ks_statistic_two_sample(&a, &a) < 1e-12);
    }

    #[test]
    fn critical_values_match_tabulated_asymptotics() {
        // 1% coefficient is 1.628 and 5% is 1.358.
        assert_relative_eq!(
            ks_critical_one_sample(10_000, 0.01) * 100.0,
            1.6276,
            epsilon = 1e-3
        );
        assert_relative_eq!(
            ks_critical_one_sample(10_000, 0.05) * 100.0,
            1.3581,
            epsilon = 1e-3
        );
    }

    #[test]
    fn flatness_of_gaussian_is_three() {
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = crate::rng::substream(11, 0);
        let xs: Vec<f64> = (0..200_000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let f = flatness(&xs);
        assert!((f - 3.0).abs() < 0.1, "flatness = {f}");
    }
}
