//! Window- and scale-behavior of the pooled estimates on the synthetic
//! processes, beyond what the per-module unit tests cover.

use ersatz_info::experiments::{
    ensemble_fixed_time, fit_log_slope, increment_pdf, run_sweep, std_vs_window, SweepAxis,
    SweepPlan,
};
use ersatz_info::knn::Quantity;
use ersatz_info::trajectory::NoiseSpec;

fn entropy_plan(m: usize, axis: SweepAxis, grid: Vec<u64>, seed: u64) -> SweepPlan {
    let mut plan = SweepPlan::new(NoiseSpec::fgn(0.7, 1 << 16, seed), axis, grid);
    plan.realizations = 8;
    plan.quantities = vec![Quantity::Entropy];
    plan.m = m;
    plan
}

/// Entropy growth in ln T is carried by the first coordinate alone, so the
/// slope does not change with the embedding dimension; meanwhile the rate
/// barely moves where the entropy climbs by several nats.
#[test]
fn entropy_window_growth_is_embedding_independent() {
    let grid: Vec<u64> = (10..=16).map(|p| 1u64 << p).collect();
    let mut slopes = Vec::new();
    for m in [1usize, 2] {
        let result = run_sweep(&entropy_plan(m, SweepAxis::WindowT, grid.clone(), 501)).unwrap();
        let fit = fit_log_slope(&result, Quantity::Entropy).unwrap();
        assert!(
            (fit.slope - 0.7).abs() < 0.05,
            "m = {m}: slope {:.4}",
            fit.slope
        );
        slopes.push(fit.slope);

        if m == 1 {
            let means: Vec<f64> = result.rows.iter().map(|r| r.mean).collect();
            let growth = means.last().unwrap() - means.first().unwrap();
            assert!(growth > 2.5, "entropy growth {growth:.2} over 2^10..2^16");
        }
    }
    assert!((slopes[0] - slopes[1]).abs() < 0.05);
}

/// At fixed T the entropy scales as (m - 1) H ln tau.
#[test]
fn entropy_scale_slope_matches_embedding() {
    let grid: Vec<u64> = (0..=6).map(|p| 1u64 << p).collect();
    let result = run_sweep(&entropy_plan(2, SweepAxis::ScaleTau, grid, 502)).unwrap();
    let fit = fit_log_slope(&result, Quantity::Entropy).unwrap();
    assert!((fit.slope - 0.7).abs() < 0.05, "slope {:.4}", fit.slope);
}

/// Degenerate but valid ensembles: R = 2 produces finite stds everywhere.
#[test]
fn two_member_ensembles_have_finite_stds() {
    let grid: Vec<u64> = vec![1 << 9, 1 << 10];
    let result =
        std_vs_window(&NoiseSpec::lognormal(false, 0.7, 1 << 10, 503), &grid, 2, 5).unwrap();
    assert_eq!(result.rows.len(), grid.len() * 3);
    for row in &result.rows {
        assert!(row.std.is_finite() && row.std >= 0.0);
        assert_eq!(row.realizations, 2);
    }
}

/// Fixed-time ensemble at t = 1: the motion value is a single noise sample
/// of unit std, so the entropy is the Gaussian closed form.
#[test]
fn ensemble_entropy_at_unit_time_is_gaussian() {
    let template = NoiseSpec::fgn(0.7, 1 << 12, 504);
    let result = ensemble_fixed_time(&template, &[1, 64], 1, 1, 4_000, 5).unwrap();
    let at_unit = result.rows[0].mean;
    assert!(
        (at_unit - 1.4189).abs() < 0.05,
        "entropy at t=1: {at_unit:.4}"
    );
    assert!(result.rows[1].mean > at_unit + 1.0, "growth by t=64");
}

/// Increment-PDF shape comparisons across scales. The fBm increments keep
/// one shape at every scale; the rank-1 log-normal motion deforms strongly
/// toward Gaussian; the even-rank-2 motion deforms only mildly (its KS
/// distance stays several times below the rank-1 one at equal seeds).
#[test]
fn increment_pdfs_discriminate_the_processes() {
    let taus: Vec<u64> = (0..=6).map(|p| 1u64 << p).collect();
    let fbm = increment_pdf(&NoiseSpec::fgn(0.7, 1 << 16, 30_000), &taus, 12).unwrap();
    for &(a, b, d, crit) in &fbm.ks_pairs {
        assert!(
            d < crit,
            "fBm PDFs differ at ({a},{b}): {d:.4} >= {crit:.4}"
        );
    }

    let ends = [1u64, 64];
    let h1 = increment_pdf(
        &NoiseSpec::lognormal(false, 0.7, 1 << 16, 30_000),
        &ends,
        12,
    )
    .unwrap();
    let (_, _, d1, crit) = h1.ks_pairs[0];
    assert!(d1 > 5.0 * crit, "rank-1 KS {d1:.4} not above {crit:.4}");

    let h2 = increment_pdf(&NoiseSpec::lognormal(true, 0.7, 1 << 16, 30_000), &ends, 12).unwrap();
    let (_, _, d2, _) = h2.ks_pairs[0];
    assert!(
        d2 < 0.35 * d1 && d2 < 4.0 * crit,
        "even-rank-2 KS {d2:.4} vs rank-1 {d1:.4}"
    );
}

/// MRW intermittency: the increment flatness decays with the scale, within
/// per-step noise, toward (but above) the Gaussian value.
#[test]
fn mrw_flatness_decays_across_scales() {
    let taus: Vec<u64> = (0..=6).map(|p| 1u64 << p).collect();
    let pdf = increment_pdf(&NoiseSpec::mrw(0.7, 0.025, 1 << 16, 30_000), &taus, 12).unwrap();
    let flat: Vec<f64> = pdf.rows.iter().map(|r| r.flatness).collect();
    assert!(
        *flat.first().unwrap() > flat.last().unwrap() + 1.0,
        "{flat:?}"
    );
    for w in flat.windows(2) {
        assert!(w[1] <= w[0] + 0.3, "non-monotone beyond noise: {flat:?}");
    }
    assert!(*flat.last().unwrap() > 3.0);
}
