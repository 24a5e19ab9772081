//! The figure registry produces plot-ready CSVs whose contents carry the
//! documented physics.

use ersatz_info::experiments::figures::{reproduce, Scale};
use ersatz_info::stats;

/// Parse `(tau, mean, std)` for one embedding dimension out of a sweep CSV.
fn scale_rows(path: &std::path::Path, m: usize, quantity: &str) -> Vec<(u64, f64, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (c_axis, c_q, c_mean, c_std, c_m) = (
        col("axis_value"),
        col("quantity"),
        col("mean"),
        col("std"),
        col("m"),
    );
    let mut rows: Vec<(u64, f64, f64)> = lines
        .filter_map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            (f[c_q] == quantity && f[c_m] == m.to_string()).then(|| {
                (
                    f[c_axis].parse().unwrap(),
                    f[c_mean].parse().unwrap(),
                    f[c_std].parse().unwrap(),
                )
            })
        })
        .collect();
    rows.sort_by_key(|r| r.0);
    rows
}

/// The entropy-rate scale figure carries the Hurst exponent as its slope.
#[test]
fn fig4b_rate_slope_recovers_hurst() {
    let dir = tempfile::tempdir().unwrap();
    let files = reproduce("fig4b", Scale::Desk, Some(8), dir.path()).unwrap();
    let csv = files
        .iter()
        .find(|f| f.to_string_lossy().ends_with("fig4b_fgn_scale.csv"))
        .unwrap();
    let rows = scale_rows(csv, 1, "rate");
    assert_eq!(rows.len(), 7);
    // Same fit policy as the sweep driver: drop the two largest scales.
    let keep = &rows[..rows.len() - 2];
    let x: Vec<f64> = keep.iter().map(|r| (r.0 as f64).ln()).collect();
    let y: Vec<f64> = keep.iter().map(|r| r.1).collect();
    let w: Vec<f64> = keep.iter().map(|r| 1.0 / (r.2 * r.2)).collect();
    let fit = stats::wls(&x, &y, Some(&w));
    assert!(
        (fit.slope - 0.70).abs() <= 0.03,
        "slope {:.4} (se {:.4})",
        fit.slope,
        fit.slope_se
    );
}

/// PDF figures emit the histogram, flatness and KS tables plus a manifest.
#[test]
fn fig8a_writes_pdf_tables() {
    let dir = tempfile::tempdir().unwrap();
    let files = reproduce("fig8a", Scale::Desk, Some(2), dir.path()).unwrap();
    for suffix in ["_hist.csv", "_flatness.csv", "_ks.csv", "manifest.json"] {
        assert!(
            files.iter().any(|f| f.to_string_lossy().ends_with(suffix)),
            "missing {suffix}"
        );
    }
    let hist = files
        .iter()
        .find(|f| f.to_string_lossy().ends_with("_hist.csv"))
        .unwrap();
    let text = std::fs::read_to_string(hist).unwrap();
    assert!(text.starts_with("tau,bin_lo,bin_hi,density,kind"));
    assert!(text.lines().count() > 7 * 4);
}
