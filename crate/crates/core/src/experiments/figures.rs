//! Figure reproduction jobs: each id maps to the sweeps that generate the
//! corresponding data files. Desk-scale defaults keep a full run in
//! minutes; `Scale::Full` restores the publication-size ensembles.

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::knn::Quantity;
use crate::trajectory::{NoiseSpec, ProcessKind};

use super::io::{write_bias_csv, write_pdf_csvs, write_sweep_csv, RunManifest};
use super::{bias_grid, increment_pdf, run_sweep, SweepAxis, SweepPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// CI-friendly ensembles (R = 20, tau up to 2^6, m up to 3).
    Desk,
    /// Publication-size ensembles (R = 100, tau up to 2^7, m up to 4).
    Full,
}

/// Parameters shared by every figure job.
#[derive(Debug, Clone)]
pub struct FigureParams {
    pub hurst: f64,
    pub c2: f64,
    pub window: usize,
    pub realizations: usize,
    pub base_seed: u64,
    pub k: usize,
    pub max_m: usize,
    pub max_tau_log2: u32,
}

impl FigureParams {
    pub fn new(scale: Scale) -> Self {
        match scale {
            Scale::Desk => Self {
                hurst: 0.7,
                c2: 0.025,
                window: 1 << 16,
                realizations: 20,
                base_seed: 20_000,
                k: 5,
                max_m: 3,
                max_tau_log2: 6,
            },
            Scale::Full => Self {
                hurst: 0.7,
                c2: 0.025,
                window: 1 << 16,
                realizations: 100,
                base_seed: 20_000,
                k: 5,
                max_m: 4,
                max_tau_log2: 7,
            },
        }
    }

    fn spec(&self, kind: ProcessKind) -> NoiseSpec {
        match kind {
            ProcessKind::Fgn => NoiseSpec::fgn(self.hurst, self.window, self.base_seed),
            ProcessKind::LognormalH1 => {
                NoiseSpec::lognormal(false, self.hurst, self.window, self.base_seed)
            }
            ProcessKind::LognormalH2 => {
                NoiseSpec::lognormal(true, self.hurst, self.window, self.base_seed)
            }
            ProcessKind::Mrw => NoiseSpec::mrw(self.hurst, self.c2, self.window, self.base_seed),
        }
    }

    fn tau_grid(&self) -> Vec<u64> {
        (0..=self.max_tau_log2).map(|p| 1u64 << p).collect()
    }

    fn window_grid(&self) -> Vec<u64> {
        (10..=16).map(|p| 1u64 << p).collect()
    }
}

pub const FIGURE_IDS: &[&str] = &[
    "fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig3d",
    "fig4a", "fig4b", "fig5", "fig6a", "fig6b", "fig7", "fig8a", "fig8b", "fig9a", "fig9b",
    "fig10a", "fig10b", "fig11",
];

/// Run one figure job, writing its CSVs and a manifest into `out_dir`.
/// Returns the paths written.
pub fn reproduce(
    figure_id: &str,
    scale: Scale,
    realizations_override: Option<usize>,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    let mut params = FigureParams::new(scale);
    if let Some(r) = realizations_override {
        if r == 0 {
            return Err(Error::invalid("realizations", "must be >= 1"));
        }
        params.realizations = r;
    }
    let start = Instant::now();
    let mut manifest = RunManifest::new(format!("reproduce {figure_id}"), params.base_seed);
    let mut files = Vec::new();

    let sweep_file = |plans: Vec<SweepPlan>,
                      kind: ProcessKind,
                      axis: SweepAxis,
                      manifest: &mut RunManifest|
     -> Result<PathBuf> {
        let mut rows = Vec::new();
        for plan in plans {
            manifest.add_plan(&plan);
            rows.extend(run_sweep(&plan)?.rows);
        }
        let path = out_dir.join(format!("{figure_id}_{kind}_{axis}.csv"));
        write_sweep_csv(&super::SweepResult { rows }, &path)?;
        Ok(path)
    };

    let quantity_sweeps = |params: &FigureParams,
                           kind: ProcessKind,
                           axis: SweepAxis,
                           quantity: Quantity,
                           ms: &[usize]|
     -> Vec<SweepPlan> {
        let grid = match axis {
            SweepAxis::WindowT => params.window_grid(),
            SweepAxis::ScaleTau => params.tau_grid(),
            _ => unreachable!("figures sweep window or scale"),
        };
        ms.iter()
            .map(|&m| {
                let mut plan = SweepPlan::new(params.spec(kind), axis, grid.clone());
                plan.realizations = params.realizations;
                plan.quantities = vec![quantity];
                plan.m = m;
                plan.k = params.k;
                plan
            })
            .collect()
    };

    let all_m: Vec<usize> = (1..=params.max_m).collect();
    let m1 = [1usize];

    match figure_id {
        // Entropy-rate bias against k / sqrt(T), one panel per process.
        "fig1a" | "fig1b" | "fig1c" => {
            let kind = match figure_id {
                "fig1a" => ProcessKind::Fgn,
                "fig1b" => ProcessKind::LognormalH1,
                _ => ProcessKind::LognormalH2,
            };
            let k_grid: Vec<usize> = (4..=18).collect();
            let t_max = if scale == Scale::Full { 17 } else { 15 };
            let t_grid: Vec<u64> = (9..=t_max).map(|p| 1u64 << p).collect();
            let template = params.spec(kind);
            let grid = bias_grid(&template, &k_grid, &t_grid, 1, 1, params.realizations)?;
            let path = out_dir.join(format!("{figure_id}_{kind}_bias.csv"));
            write_bias_csv(&grid, &path)?;
            files.push(path);
        }
        // Ensemble std of H, I, h against the window size.
        "fig2a" | "fig2b" | "fig2c" => {
            let kind = match figure_id {
                "fig2a" => ProcessKind::Fgn,
                "fig2b" => ProcessKind::LognormalH1,
                _ => ProcessKind::LognormalH2,
            };
            let mut plan =
                SweepPlan::new(params.spec(kind), SweepAxis::WindowT, params.window_grid());
            plan.realizations = params.realizations;
            plan.quantities = vec![Quantity::Entropy, Quantity::Ami, Quantity::EntropyRate];
            plan.k = params.k;
            files.push(sweep_file(
                vec![plan],
                kind,
                SweepAxis::WindowT,
                &mut manifest,
            )?);
        }
        "fig3a" => files.push(sweep_file(
            quantity_sweeps(
                &params,
                ProcessKind::Fgn,
                SweepAxis::WindowT,
                Quantity::Entropy,
                &all_m,
            ),
            ProcessKind::Fgn,
            SweepAxis::WindowT,
            &mut manifest,
        )?),
        "fig3b" => files.push(sweep_file(
            quantity_sweeps(
                &params,
                ProcessKind::Fgn,
                SweepAxis::ScaleTau,
                Quantity::Entropy,
                &all_m,
            ),
            ProcessKind::Fgn,
            SweepAxis::ScaleTau,
            &mut manifest,
        )?),
        "fig3c" => files.push(sweep_file(
            quantity_sweeps(
                &params,
                ProcessKind::Fgn,
                SweepAxis::WindowT,
                Quantity::Ami,
                &all_m,
            ),
            ProcessKind::Fgn,
            SweepAxis::WindowT,
            &mut manifest,
        )?),
        "fig3d" => files.push(sweep_file(
            quantity_sweeps(
                &params,
                ProcessKind::Fgn,
                SweepAxis::ScaleTau,
                Quantity::Ami,
                &all_m,
            ),
            ProcessKind::Fgn,
            SweepAxis::ScaleTau,
            &mut manifest,
        )?),
        "fig4a" => files.push(sweep_file(
            quantity_sweeps(
                &params,
                ProcessKind::Fgn,
                SweepAxis::WindowT,
                Quantity::EntropyRate,
                &all_m,
            ),
            ProcessKind::Fgn,
            SweepAxis::WindowT,
            &mut manifest,
        )?),
        "fig4b" => files.push(sweep_file(
            quantity_sweeps(
                &params,
                ProcessKind::Fgn,
                SweepAxis::ScaleTau,
                Quantity::EntropyRate,
                &all_m,
            ),
            ProcessKind::Fgn,
            SweepAxis::ScaleTau,
            &mut manifest,
        )?),
        "fig5" => files.push(sweep_file(
            quantity_sweeps(
                &params,
                ProcessKind::Fgn,
                SweepAxis::ScaleTau,
                Quantity::NormalizedEntropyRate,
                &all_m,
            ),
            ProcessKind::Fgn,
            SweepAxis::ScaleTau,
            &mut manifest,
        )?),
        // Log-normal entropy rates, fBm included for reference.
        "fig6a" | "fig6b" | "fig7" => {
            let (axis, quantity) = match figure_id {
                "fig6a" => (SweepAxis::WindowT, Quantity::EntropyRate),
                "fig6b" => (SweepAxis::ScaleTau, Quantity::EntropyRate),
                _ => (SweepAxis::ScaleTau, Quantity::NormalizedEntropyRate),
            };
            for kind in [
                ProcessKind::LognormalH1,
                ProcessKind::LognormalH2,
                ProcessKind::Fgn,
            ] {
                files.push(sweep_file(
                    quantity_sweeps(&params, kind, axis, quantity, &m1),
                    kind,
                    axis,
                    &mut manifest,
                )?);
            }
        }
        "fig8a" | "fig8b" | "fig9a" | "fig9b" => {
            let kind = match figure_id {
                "fig8a" => ProcessKind::LognormalH1,
                "fig8b" => ProcessKind::LognormalH2,
                "fig9a" => ProcessKind::Fgn,
                _ => ProcessKind::Mrw,
            };
            let template = params.spec(kind);
            let pdf = increment_pdf(&template, &params.tau_grid(), params.realizations)?;
            files.extend(write_pdf_csvs(
                &pdf,
                out_dir,
                &format!("{figure_id}_{kind}_pdf"),
            )?);
        }
        "fig10a" => files.push(sweep_file(
            quantity_sweeps(
                &params,
                ProcessKind::Mrw,
                SweepAxis::WindowT,
                Quantity::EntropyRate,
                &m1,
            ),
            ProcessKind::Mrw,
            SweepAxis::WindowT,
            &mut manifest,
        )?),
        "fig10b" => files.push(sweep_file(
            quantity_sweeps(
                &params,
                ProcessKind::Mrw,
                SweepAxis::ScaleTau,
                Quantity::EntropyRate,
                &m1,
            ),
            ProcessKind::Mrw,
            SweepAxis::ScaleTau,
            &mut manifest,
        )?),
        "fig11" => files.push(sweep_file(
            quantity_sweeps(
                &params,
                ProcessKind::Mrw,
                SweepAxis::ScaleTau,
                Quantity::NormalizedEntropyRate,
                &m1,
            ),
            ProcessKind::Mrw,
            SweepAxis::ScaleTau,
            &mut manifest,
        )?),
        other => {
            return Err(Error::invalid(
                "figure",
                format!(
                    "unknown figure id `{other}`; known ids: {}",
                    FIGURE_IDS.join(", ")
                ),
            ))
        }
    }

    manifest.files = files
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    let manifest_path = manifest.finish(
        start.elapsed(),
        out_dir,
        &format!("{figure_id}_manifest.json"),
    )?;
    files.push(manifest_path);
    Ok(files)
}
