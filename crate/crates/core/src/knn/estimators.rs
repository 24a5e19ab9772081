//! Kozachenko-Leonenko entropy and Kraskov-Stogbauer-Grassberger mutual
//! information (algorithm 1), both under the max-norm.
//!
//! Entropy:  H = psi(N) - psi(k) + d <ln(2 eps_i)>
//! MI:       I = psi(k) + psi(N) - <psi(n_x + 1) + psi(n_y + 1)>
//!
//! where `eps_i` is the distance to the k-th neighbor (joint space for the
//! MI) and `n_x`, `n_y` count marginal neighbors strictly inside `eps_i`.

use rand::Rng;
use rayon::prelude::*;
use statrs::function::gamma::digamma;

use crate::embedding::EmbeddedPointSet;
use crate::error::{Error, Result};
use crate::rng::{substream, STREAM_JITTER};

use super::index::MaxNormIndex;
use super::{EstimatorConfig, InfoEstimate, Quantity};

/// Fraction of zero k-th-neighbor distances tolerated after jitter.
const DEGENERACY_FRACTION: f64 = 0.01;

/// Returns a jittered copy when the set contains exactly coincident
/// points, otherwise borrows the input unchanged.
fn resolve_ties<'a>(
    pts: &'a EmbeddedPointSet,
    cfg: &EstimatorConfig,
) -> std::borrow::Cow<'a, EmbeddedPointSet> {
    if !has_duplicate_points(pts) {
        return std::borrow::Cow::Borrowed(pts);
    }
    let dim = pts.dim();
    let n = pts.len();
    // Per-coordinate amplitude proportional to the coordinate spread.
    let mut amp = vec![0.0f64; dim];
    for (d, a) in amp.iter_mut().enumerate() {
        let col: Vec<f64> = (0..n).map(|i| pts.point(i)[d]).collect();
        *a = cfg.jitter_rel * crate::stats::std_dev(&col);
    }
    let mut rng = substream(cfg.jitter_seed, STREAM_JITTER);
    let mut data = pts.as_flat().to_vec();
    for (idx, v) in data.iter_mut().enumerate() {
        let a = amp[idx % dim];
        if a > 0.0 {
            *v += rng.random_range(-a..=a);
        }
    }
    std::borrow::Cow::Owned(EmbeddedPointSet::from_rows(data, dim))
}

fn has_duplicate_points(pts: &EmbeddedPointSet) -> bool {
    let n = pts.len();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        pts.point(a as usize)
            .partial_cmp(pts.point(b as usize))
            .unwrap()
    });
    order
        .windows(2)
        .any(|w| pts.point(w[0] as usize) == pts.point(w[1] as usize))
}

/// Entropy for each neighbor count in `ks` from one shared index.
pub(crate) fn kl_entropy_multi(
    pts: &EmbeddedPointSet,
    ks: &[usize],
    cfg: &EstimatorConfig,
) -> Result<Vec<f64>> {
    let n = pts.len();
    let kmax = *ks.iter().max().expect("non-empty k list");
    EstimatorConfig { k: kmax, ..*cfg }.validate(n)?;
    let pts = resolve_ties(pts, cfg);
    let index = MaxNormIndex::build(&pts);
    let dist: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| index.knn_distances(i, kmax))
        .collect();
    let d = pts.dim() as f64;
    let mut out = Vec::with_capacity(ks.len());
    for &k in ks {
        let mut log_sum = 0.0;
        let mut valid = 0usize;
        for row in &dist {
            let eps = row[k - 1];
            if eps > 0.0 {
                log_sum += (2.0 * eps).ln();
                valid += 1;
            }
        }
        let zero_frac = (n - valid) as f64 / n as f64;
        if zero_frac > DEGENERACY_FRACTION {
            return Err(Error::Degenerate(format!(
                "{:.1}% of points have a zero k-th neighbor distance",
                100.0 * zero_frac
            )));
        }
        out.push(digamma(n as f64) - digamma(k as f64) + d * log_sum / valid as f64);
    }
    Ok(out)
}

/// KSG algorithm-1 mutual information for each `k` in `ks`, between the
/// first `nx` coordinates of `joint` and the rest.
pub(crate) fn ksg_multi(
    joint: &EmbeddedPointSet,
    nx: usize,
    ks: &[usize],
    cfg: &EstimatorConfig,
) -> Result<Vec<f64>> {
    assert!(nx > 0 && nx < joint.dim());
    let n = joint.len();
    let kmax = *ks.iter().max().expect("non-empty k list");
    EstimatorConfig { k: kmax, ..*cfg }.validate(n)?;
    let joint = resolve_ties(joint, cfg);
    let x = joint.project(0..nx);
    let y = joint.project(nx..joint.dim());
    let joint_index = MaxNormIndex::build(&joint);
    let x_index = MaxNormIndex::build(&x);
    let y_index = MaxNormIndex::build(&y);

    // Per point: k-th joint distances for all k, then marginal neighbor
    // counts inside each radius, batched through one sorted collection.
    let per_point: Vec<(Vec<f64>, Vec<usize>, Vec<usize>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let eps = joint_index.knn_distances(i, kmax);
            let eps_max = *eps.last().unwrap();
            let count_for = |index: &MaxNormIndex| -> Vec<usize> {
                if eps_max <= 0.0 {
                    return vec![0; ks.len()];
                }
                let within = index.distances_within(i, eps_max);
                ks.iter()
                    .map(|&k| within.partition_point(|&d| d < eps[k - 1]))
                    .collect()
            };
            let cx = count_for(&x_index);
            let cy = count_for(&y_index);
            (eps, cx, cy)
        })
        .collect();

    let mut out = Vec::with_capacity(ks.len());
    for (ki, &k) in ks.iter().enumerate() {
        let mut psi_sum = 0.0;
        let mut valid = 0usize;
        for (eps, cx, cy) in &per_point {
            if eps[k - 1] > 0.0 {
                psi_sum += digamma((cx[ki] + 1) as f64) + digamma((cy[ki] + 1) as f64);
                valid += 1;
            }
        }
        let zero_frac = (n - valid) as f64 / n as f64;
        if zero_frac > DEGENERACY_FRACTION {
            return Err(Error::Degenerate(format!(
                "{:.1}% of points have a zero k-th joint neighbor distance",
                100.0 * zero_frac
            )));
        }
        out.push(digamma(k as f64) + digamma(n as f64) - psi_sum / valid as f64);
    }
    Ok(out)
}

/// Kozachenko-Leonenko entropy of a point set, in nats.
pub fn entropy_knn(pts: &EmbeddedPointSet, cfg: &EstimatorConfig) -> Result<InfoEstimate> {
    let value = kl_entropy_multi(pts, &[cfg.k], cfg)?[0];
    Ok(InfoEstimate {
        quantity: Quantity::Entropy,
        value,
        m: pts.dim(),
        n: 0,
        tau: 0,
        window: pts.len(),
        k: cfg.k,
        seed: cfg.jitter_seed,
    })
}

/// KSG mutual information between two equally long point sets, in nats.
pub fn mutual_information_ksg(
    x_pts: &EmbeddedPointSet,
    y_pts: &EmbeddedPointSet,
    cfg: &EstimatorConfig,
) -> Result<InfoEstimate> {
    if x_pts.len() != y_pts.len() {
        return Err(Error::Length(format!(
            "point counts differ: {} vs {}",
            x_pts.len(),
            y_pts.len()
        )));
    }
    let (nx, ny) = (x_pts.dim(), y_pts.dim());
    let mut data = Vec::with_capacity(x_pts.len() * (nx + ny));
    for i in 0..x_pts.len() {
        data.extend_from_slice(x_pts.point(i));
        data.extend_from_slice(y_pts.point(i));
    }
    let joint = EmbeddedPointSet::from_rows(data, nx + ny);
    let value = ksg_multi(&joint, nx, &[cfg.k], cfg)?[0];
    Ok(InfoEstimate {
        quantity: Quantity::Ami,
        value,
        m: ny,
        n: nx,
        tau: 0,
        window: x_pts.len(),
        k: cfg.k,
        seed: cfg.jitter_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{standard_normal_vec, substream};

    fn gaussian_points(n: usize, dim: usize, seed: u64) -> EmbeddedPointSet {
        EmbeddedPointSet::from_rows(standard_normal_vec(&mut substream(seed, 0), n * dim), dim)
    }

    const HALF_LN_2PI_E: f64 = 1.4189385332046727;

    #[test]
    fn uniform_entropy_is_zero() {
        let n = 100_000;
        let mut rng = substream(1, 0);
        let data: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let pts = EmbeddedPointSet::from_rows(data, 1);
        let h = entropy_knn(&pts, &EstimatorConfig::default()).unwrap();
        assert!(h.value.abs() < 0.01, "H = {}", h.value);
    }

    #[test]
    fn gaussian_entropy_matches_closed_form() {
        let pts = gaussian_points(100_000, 1, 2);
        let h = entropy_knn(&pts, &EstimatorConfig::default()).unwrap();
        assert!((h.value - HALF_LN_2PI_E).abs() < 0.01, "H = {}", h.value);
    }

    #[test]
    fn bivariate_gaussian_entropy_is_additive() {
        let pts = gaussian_points(100_000, 2, 3);
        let h = entropy_knn(&pts, &EstimatorConfig::default()).unwrap();
        assert!(
            (h.value - 2.0 * HALF_LN_2PI_E).abs() < 0.02,
            "H = {}",
            h.value
        );
    }

    #[test]
    fn independent_gaussians_share_no_information() {
        let x = gaussian_points(100_000, 1, 4);
        let y = gaussian_points(100_000, 1, 5);
        let mi = mutual_information_ksg(&x, &y, &EstimatorConfig::default()).unwrap();
        assert!(mi.value.abs() < 0.01, "MI = {}", mi.value);
    }

    #[test]
    fn correlated_gaussians_match_closed_form() {
        // MI = -0.5 ln(1 - rho^2) for a bivariate Gaussian.
        let rho: f64 = 0.9;
        let n = 100_000;
        let z1 = standard_normal_vec(&mut substream(6, 0), n);
        let z2 = standard_normal_vec(&mut substream(6, 1), n);
        let x = EmbeddedPointSet::from_rows(z1.clone(), 1);
        let y_data: Vec<f64> = z1
            .iter()
            .zip(&z2)
            .map(|(a, b)| rho * a + (1.0 - rho * rho).sqrt() * b)
            .collect();
        let y = EmbeddedPointSet::from_rows(y_data, 1);
        let mi = mutual_information_ksg(&x, &y, &EstimatorConfig::default()).unwrap();
        let expect = -0.5 * (1.0 - rho * rho).ln();
        assert!((mi.value - expect).abs() < 0.02, "MI = {}", mi.value);
    }

    #[test]
    fn deterministic_copy_diverges() {
        let x = gaussian_points(5_000, 1, 7);
        let mi = mutual_information_ksg(&x, &x, &EstimatorConfig::default());
        // A continuous deterministic copy either trips the degeneracy
        // guard or reports an estimate near the psi(N) - psi(k) ceiling.
        match mi {
            Err(Error::Degenerate(_)) => {}
            Ok(est) => {
                let n = 5_000f64;
                assert!(
                    est.value > 0.8 * n.ln(),
                    "MI = {} not near ln N = {}",
                    est.value,
                    n.ln()
                );
            }
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn ties_are_jittered_and_constant_data_is_degenerate() {
        // Coarsely quantized data has many exact ties.
        let n = 4_000;
        let data: Vec<f64> = standard_normal_vec(&mut substream(8, 0), n)
            .iter()
            .map(|z| (z * 3.0).round() / 3.0)
            .collect();
        let pts = EmbeddedPointSet::from_rows(data, 1);
        let h = entropy_knn(&pts, &EstimatorConfig::default()).unwrap();
        assert!(h.value.is_finite());

        let constant = EmbeddedPointSet::from_rows(vec![1.0; 512], 1);
        assert!(matches!(
            entropy_knn(&constant, &EstimatorConfig::default()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn entropy_shifts_exactly_under_scaling_and_translation() {
        let pts = gaussian_points(20_000, 2, 9);
        let cfg = EstimatorConfig::default();
        let base = entropy_knn(&pts, &cfg).unwrap().value;

        let a = 3.5f64;
        let scaled = EmbeddedPointSet::from_rows(pts.as_flat().iter().map(|v| a * v).collect(), 2);
        let hs = entropy_knn(&scaled, &cfg).unwrap().value;
        assert!(
            (hs - base - 2.0 * a.ln()).abs() < 1e-9,
            "shift = {}",
            hs - base
        );

        let shifted =
            EmbeddedPointSet::from_rows(pts.as_flat().iter().map(|v| v + 42.0).collect(), 2);
        let ht = entropy_knn(&shifted, &cfg).unwrap().value;
        assert!((ht - base).abs() < 1e-9, "shift = {}", ht - base);
    }

    #[test]
    fn ksg_is_invariant_under_common_scaling() {
        let x = gaussian_points(20_000, 1, 10);
        let y_data: Vec<f64> = x
            .as_flat()
            .iter()
            .zip(standard_normal_vec(&mut substream(10, 1), 20_000))
            .map(|(a, b)| 0.8 * a + 0.6 * b)
            .collect();
        let y = EmbeddedPointSet::from_rows(y_data, 1);
        let cfg = EstimatorConfig::default();
        let base = mutual_information_ksg(&x, &y, &cfg).unwrap().value;
        // Scaling both marginals by the same factor rescales every distance
        // and leaves all neighbor counts unchanged.
        let a = 100.0;
        let x_scaled = EmbeddedPointSet::from_rows(x.as_flat().iter().map(|v| a * v).collect(), 1);
        let y_scaled = EmbeddedPointSet::from_rows(y.as_flat().iter().map(|v| a * v).collect(), 1);
        let scaled = mutual_information_ksg(&x_scaled, &y_scaled, &cfg)
            .unwrap()
            .value;
        assert!((base - scaled).abs() < 1e-9, "diff = {}", base - scaled);
    }

    #[test]
    fn multi_k_matches_single_k() {
        let pts = gaussian_points(5_000, 2, 11);
        let cfg = EstimatorConfig::default();
        let multi = kl_entropy_multi(&pts, &[3, 5, 9], &cfg).unwrap();
        for (i, k) in [3usize, 5, 9].into_iter().enumerate() {
            let single = kl_entropy_multi(&pts, &[k], &cfg).unwrap()[0];
            assert_eq!(multi[i], single);
        }
    }
}
