//! Ensemble experiment drivers: parameter sweeps with substream-seeded
//! realizations, the neighbor-count/window bias grid, increment-PDF
//! tables and fixed-time ensemble estimates. Grid points and realizations
//! run in parallel; reductions use a fixed order so a plan always produces
//! byte-identical outputs.

pub mod figures;
pub mod io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::embedding::increment_series;
use crate::error::{Error, Result};
use crate::knn::ersatz::{
    ersatz_ami, ersatz_entropy, ersatz_entropy_rate, ersatz_entropy_rate_multi_k,
    normalized_entropy_rate,
};
use crate::knn::{EstimatorConfig, Quantity};
use crate::stats;
use crate::synth::{synth_motion, synth_noise};
use crate::trajectory::{NoiseSpec, ProcessKind, Trajectory};

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    WindowT,
    ScaleTau,
    NeighborsK,
    EmbeddingM,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::WindowT => "window",
            SweepAxis::ScaleTau => "scale",
            SweepAxis::NeighborsK => "neighbors",
            SweepAxis::EmbeddingM => "embedding",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "window" | "window_t" => Ok(SweepAxis::WindowT),
            "scale" | "scale_tau" => Ok(SweepAxis::ScaleTau),
            "neighbors" | "neighbors_k" => Ok(SweepAxis::NeighborsK),
            "embedding" | "embedding_m" => Ok(SweepAxis::EmbeddingM),
            other => Err(Error::invalid("axis", format!("unknown axis `{other}`"))),
        }
    }
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An ensemble sweep: synthesize `realizations` independent trajectories
/// per grid point and reduce the requested quantities to mean/std.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPlan {
    /// Process template; its `length` is the window for non-window axes
    /// and its `seed` is the ensemble base seed.
    pub template: NoiseSpec,
    /// Estimate on the integrated motion (the usual case) or the noise.
    pub on_motion: bool,
    pub axis: SweepAxis,
    pub grid: Vec<u64>,
    pub realizations: usize,
    pub quantities: Vec<Quantity>,
    pub m: usize,
    pub n: usize,
    pub tau: usize,
    pub k: usize,
}

impl SweepPlan {
    pub fn new(template: NoiseSpec, axis: SweepAxis, grid: Vec<u64>) -> Self {
        Self {
            template,
            on_motion: true,
            axis,
            grid,
            realizations: 20,
            quantities: vec![Quantity::EntropyRate],
            m: 1,
            n: 1,
            tau: 1,
            k: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.template.validate()?;
        if self.grid.is_empty() {
            return Err(Error::invalid("grid", "must not be empty"));
        }
        if self.realizations == 0 {
            return Err(Error::invalid("realizations", "must be >= 1"));
        }
        if self.quantities.is_empty() {
            return Err(Error::invalid("quantities", "must not be empty"));
        }
        if self.m == 0 || self.n == 0 || self.tau == 0 || self.k == 0 {
            return Err(Error::invalid("m", "m, n, tau, k must all be >= 1"));
        }
        if self.axis == SweepAxis::WindowT {
            for &g in &self.grid {
                if g < 2 || !(g as usize).is_power_of_two() {
                    return Err(Error::invalid(
                        "grid",
                        format!("window {g} is not a power of two >= 2"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// One reduced row of a sweep, echoing every parameter needed to
/// reproduce it in isolation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub axis_value: u64,
    pub quantity: Quantity,
    pub mean: f64,
    pub std: f64,
    pub realizations: usize,
    pub kind: ProcessKind,
    pub hurst: f64,
    pub sigma1: f64,
    pub window: u64,
    pub base_seed: u64,
    pub c2: f64,
    pub integral_scale: u64,
    pub lognormal_mu: f64,
    pub lognormal_sigma: f64,
    pub m: usize,
    pub n: usize,
    pub tau: usize,
    pub k: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

fn annotate(e: Error, ctx: &str) -> Error {
    match e {
        Error::Synthesis(s) => Error::Synthesis(format!("{ctx}: {s}")),
        Error::CorrelationMapping(s) => Error::CorrelationMapping(format!("{ctx}: {s}")),
        Error::Degenerate(s) => Error::Degenerate(format!("{ctx}: {s}")),
        Error::Length(s) => Error::Length(format!("{ctx}: {s}")),
        Error::InvalidParameter { name, reason } => Error::InvalidParameter {
            name,
            reason: format!("{ctx}: {reason}"),
        },
        other => other,
    }
}

fn synth_for(plan: &SweepPlan, spec: &NoiseSpec) -> Result<Trajectory> {
    if plan.on_motion {
        synth_motion(spec)
    } else {
        synth_noise(spec)
    }
}

fn estimate_one(
    plan: &SweepPlan,
    traj: &Trajectory,
    quantity: Quantity,
    m: usize,
    tau: usize,
    k: usize,
) -> Result<f64> {
    let cfg = EstimatorConfig::with_k(k);
    let est = match quantity {
        Quantity::Entropy => ersatz_entropy(traj, m, tau, &cfg)?,
        Quantity::Ami => ersatz_ami(traj, m, plan.n, tau, &cfg)?,
        Quantity::EntropyRate => ersatz_entropy_rate(traj, m, tau, &cfg)?,
        Quantity::NormalizedEntropyRate => normalized_entropy_rate(traj, m, tau, &cfg)?,
    };
    Ok(est.value)
}

/// Run a sweep; deterministic for a given plan.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepResult> {
    plan.validate()?;
    let nq = plan.quantities.len();
    let r_count = plan.realizations;
    // values[gi * nq + qi][r]
    let per_realization: Vec<Vec<f64>> = match plan.axis {
        SweepAxis::WindowT => {
            // Fresh trajectories per window length.
            let jobs: Vec<(usize, usize)> = (0..plan.grid.len())
                .flat_map(|gi| (0..r_count).map(move |r| (gi, r)))
                .collect();
            let flat: Vec<Result<Vec<f64>>> = jobs
                .par_iter()
                .map(|&(gi, r)| {
                    let window = plan.grid[gi] as usize;
                    let spec = plan
                        .template
                        .clone()
                        .with_length(window)
                        .with_seed(plan.template.seed + (gi * r_count + r) as u64);
                    let ctx = format!("window={window}, r={r}");
                    let traj = synth_for(plan, &spec).map_err(|e| annotate(e, &ctx))?;
                    plan.quantities
                        .iter()
                        .map(|&q| {
                            estimate_one(plan, &traj, q, plan.m, plan.tau, plan.k)
                                .map_err(|e| annotate(e, &ctx))
                        })
                        .collect()
                })
                .collect();
            let mut values = vec![vec![0.0; r_count]; plan.grid.len() * nq];
            for (&(gi, r), res) in jobs.iter().zip(flat) {
                for (qi, v) in res?.into_iter().enumerate() {
                    values[gi * nq + qi][r] = v;
                }
            }
            values
        }
        _ => {
            // One trajectory per realization, reused across the grid.
            let flat: Vec<Result<Vec<f64>>> = (0..r_count)
                .into_par_iter()
                .map(|r| {
                    let spec = plan
                        .template
                        .clone()
                        .with_seed(plan.template.seed + r as u64);
                    let traj =
                        synth_for(plan, &spec).map_err(|e| annotate(e, &format!("r={r}")))?;
                    let mut out = Vec::with_capacity(plan.grid.len() * nq);
                    for &g in &plan.grid {
                        let (m, tau, k) = match plan.axis {
                            SweepAxis::ScaleTau => (plan.m, g as usize, plan.k),
                            SweepAxis::NeighborsK => (plan.m, plan.tau, g as usize),
                            SweepAxis::EmbeddingM => (g as usize, plan.tau, plan.k),
                            SweepAxis::WindowT => unreachable!(),
                        };
                        let ctx = format!("{}={g}, r={r}", plan.axis);
                        for &q in &plan.quantities {
                            out.push(
                                estimate_one(plan, &traj, q, m, tau, k)
                                    .map_err(|e| annotate(e, &ctx))?,
                            );
                        }
                    }
                    Ok(out)
                })
                .collect();
            let mut values = vec![vec![0.0; r_count]; plan.grid.len() * nq];
            for (r, res) in flat.into_iter().enumerate() {
                for (i, v) in res?.into_iter().enumerate() {
                    values[i][r] = v;
                }
            }
            values
        }
    };

    let mut rows = Vec::with_capacity(plan.grid.len() * nq);
    for (gi, &g) in plan.grid.iter().enumerate() {
        for (qi, &q) in plan.quantities.iter().enumerate() {
            let vals = &per_realization[gi * nq + qi];
            let mean = stats::mean(vals);
            let std = if vals.len() > 1 {
                stats::std_dev(vals)
            } else {
                0.0
            };
            let (m, tau, k, window) = match plan.axis {
                SweepAxis::WindowT => (plan.m, plan.tau, plan.k, g),
                SweepAxis::ScaleTau => (plan.m, g as usize, plan.k, plan.template.length as u64),
                SweepAxis::NeighborsK => {
                    (plan.m, plan.tau, g as usize, plan.template.length as u64)
                }
                SweepAxis::EmbeddingM => {
                    (g as usize, plan.tau, plan.k, plan.template.length as u64)
                }
            };
            rows.push(SweepRow {
                axis: plan.axis,
                axis_value: g,
                quantity: q,
                mean,
                std,
                realizations: r_count,
                kind: plan.template.kind,
                hurst: plan.template.hurst,
                sigma1: plan.template.sigma1,
                window,
                base_seed: plan.template.seed,
                c2: plan.template.c2,
                integral_scale: plan.template.integral_scale as u64,
                lognormal_mu: plan.template.lognormal_mu,
                lognormal_sigma: plan.template.lognormal_sigma,
                m,
                n: plan.n,
                tau,
                k,
            });
        }
    }
    Ok(SweepResult { rows })
}

/// Ensemble std of entropy, auto-mutual information and entropy rate as a
/// function of the window length.
pub fn std_vs_window(
    template: &NoiseSpec,
    t_grid: &[u64],
    realizations: usize,
    k: usize,
) -> Result<SweepResult> {
    let mut plan = SweepPlan::new(template.clone(), SweepAxis::WindowT, t_grid.to_vec());
    plan.realizations = realizations;
    plan.quantities = vec![Quantity::Entropy, Quantity::Ami, Quantity::EntropyRate];
    plan.k = k;
    run_sweep(&plan)
}

/// One row of the bias grid over `(k, T)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BiasRow {
    pub k: usize,
    pub window: u64,
    /// Collapse coordinate `k / T^(1/(m+1))`.
    pub ratio: f64,
    pub mean: f64,
    pub std: f64,
    pub realizations: usize,
    /// Large-T asymptote of the entropy rate, when a closed form exists.
    pub prediction: Option<f64>,
    /// `mean - prediction`.
    pub bias: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BiasGrid {
    pub kind: ProcessKind,
    pub m: usize,
    pub tau: usize,
    pub rows: Vec<BiasRow>,
}

/// Large-T entropy-rate asymptote for a process spec, when known.
pub fn rate_asymptote(spec: &NoiseSpec, tau: usize, window: f64) -> Option<f64> {
    match spec.kind {
        ProcessKind::Fgn => Some(analytic::fbm_ersatz_rate_pred(
            tau as f64,
            window,
            spec.hurst,
            spec.sigma1,
        )),
        ProcessKind::LognormalH1 | ProcessKind::LognormalH2 => Some(
            analytic::lognormal_noise_entropy(spec.lognormal_mu, spec.lognormal_sigma, spec.sigma1)
                .ok()?
                + analytic::selfsimilar_rate_offset(tau as f64, spec.hurst),
        ),
        ProcessKind::Mrw => None,
    }
}

/// Entropy rate tabulated over a `(k, T)` grid, with the collapse
/// coordinate `k / T^(1/(m+1))` and the bias against the closed-form
/// asymptote where one exists. All `k` values share one neighbor pass per
/// trajectory.
pub fn bias_grid(
    template: &NoiseSpec,
    k_grid: &[usize],
    t_grid: &[u64],
    m: usize,
    tau: usize,
    realizations: usize,
) -> Result<BiasGrid> {
    template.validate()?;
    if k_grid.is_empty() || t_grid.is_empty() || realizations == 0 {
        return Err(Error::invalid("grid", "empty bias grid"));
    }
    let jobs: Vec<(usize, usize)> = (0..t_grid.len())
        .flat_map(|ti| (0..realizations).map(move |r| (ti, r)))
        .collect();
    let flat: Vec<Result<Vec<f64>>> = jobs
        .par_iter()
        .map(|&(ti, r)| {
            let window = t_grid[ti] as usize;
            let spec = template
                .clone()
                .with_length(window)
                .with_seed(template.seed + (ti * realizations + r) as u64);
            let ctx = format!("window={window}, r={r}");
            let motion = synth_motion(&spec).map_err(|e| annotate(e, &ctx))?;
            ersatz_entropy_rate_multi_k(&motion, m, tau, k_grid).map_err(|e| annotate(e, &ctx))
        })
        .collect();
    let mut values = vec![vec![0.0; realizations]; t_grid.len() * k_grid.len()];
    for (&(ti, r), res) in jobs.iter().zip(flat) {
        for (ki, v) in res?.into_iter().enumerate() {
            values[ti * k_grid.len() + ki][r] = v;
        }
    }
    let mut rows = Vec::new();
    for (ti, &t) in t_grid.iter().enumerate() {
        for (ki, &k) in k_grid.iter().enumerate() {
            let vals = &values[ti * k_grid.len() + ki];
            let mean = stats::mean(vals);
            let std = if vals.len() > 1 {
                stats::std_dev(vals)
            } else {
                0.0
            };
            let prediction = rate_asymptote(template, tau, t as f64);
            rows.push(BiasRow {
                k,
                window: t,
                ratio: k as f64 / (t as f64).powf(1.0 / (m as f64 + 1.0)),
                mean,
                std,
                realizations,
                prediction,
                bias: prediction.map(|p| mean - p),
            });
        }
    }
    Ok(BiasGrid {
        kind: template.kind,
        m,
        tau,
        rows,
    })
}

/// Unit-std-normalized increment histograms over a scale grid, with
/// pairwise KS distances and flatness per scale.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IncrementPdf {
    pub kind: ProcessKind,
    /// Shared Freedman-Diaconis bin edges.
    pub edges: Vec<f64>,
    pub rows: Vec<IncrementPdfRow>,
    /// `(tau_a, tau_b, ks_distance, iid_critical_1pct)`.
    pub ks_pairs: Vec<(u64, u64, f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IncrementPdfRow {
    pub tau: u64,
    pub density: Vec<f64>,
    pub flatness: f64,
    pub samples: usize,
}

/// Largest pooled sample kept per scale for the histogram and KS columns.
const PDF_SAMPLE_CAP: usize = 1 << 17;

pub fn increment_pdf(
    template: &NoiseSpec,
    tau_grid: &[u64],
    realizations: usize,
) -> Result<IncrementPdf> {
    template.validate()?;
    if tau_grid.is_empty() || realizations == 0 {
        return Err(Error::invalid("grid", "empty pdf grid"));
    }
    // Pool normalized increments per scale across realizations, with a
    // deterministic stride keeping the pool bounded.
    let pools: Vec<Result<Vec<Vec<f64>>>> = (0..realizations)
        .into_par_iter()
        .map(|r| {
            let spec = template.clone().with_seed(template.seed + r as u64);
            let motion = synth_motion(&spec).map_err(|e| annotate(e, &format!("r={r}")))?;
            tau_grid
                .iter()
                .map(|&tau| {
                    let inc = increment_series(&motion, tau as usize)
                        .map_err(|e| annotate(e, &format!("tau={tau}, r={r}")))?;
                    let sd = stats::std_dev(&inc.samples);
                    let stride = (inc.samples.len() * realizations / PDF_SAMPLE_CAP).max(1);
                    Ok(inc.samples.iter().step_by(stride).map(|x| x / sd).collect())
                })
                .collect()
        })
        .collect();
    let mut per_tau: Vec<Vec<f64>> = vec![Vec::new(); tau_grid.len()];
    for res in pools {
        for (ti, chunk) in res?.into_iter().enumerate() {
            per_tau[ti].extend(chunk);
        }
    }
    let pooled_all: Vec<f64> = per_tau.iter().flatten().copied().collect();
    let edges = stats::freedman_diaconis_edges(&pooled_all)?;
    let rows: Vec<IncrementPdfRow> = tau_grid
        .iter()
        .zip(&per_tau)
        .map(|(&tau, samples)| IncrementPdfRow {
            tau,
            density: stats::histogram(samples, &edges).density,
            flatness: stats::flatness(samples),
            samples: samples.len(),
        })
        .collect();
    let mut ks_pairs = Vec::new();
    for i in 0..tau_grid.len() {
        for j in i + 1..tau_grid.len() {
            let d = stats::ks_statistic_two_sample(&per_tau[i], &per_tau[j]);
            let crit = stats::ks_critical_two_sample(per_tau[i].len(), per_tau[j].len(), 0.01);
            ks_pairs.push((tau_grid[i], tau_grid[j], d, crit));
        }
    }
    Ok(IncrementPdf {
        kind: template.kind,
        edges,
        rows,
        ks_pairs,
    })
}

/// Fixed-time ensemble estimate: the k-NN entropy of the embedded vector
/// at time `t` across `realizations` independent motions, per `t`.
pub fn ensemble_fixed_time(
    template: &NoiseSpec,
    t_list: &[u64],
    m: usize,
    tau: usize,
    realizations: usize,
    k: usize,
) -> Result<SweepResult> {
    template.validate()?;
    if t_list.is_empty() || realizations == 0 {
        return Err(Error::invalid("grid", "empty time list"));
    }
    // Physical time t means m_t with m_0 = 0, stored at samples[t - 1].
    let t_min = *t_list.iter().min().unwrap() as usize;
    let t_max = *t_list.iter().max().unwrap() as usize;
    if t_max > template.length || t_min < 1 + (m - 1) * tau {
        return Err(Error::Length(format!(
            "time list [{t_min}..{t_max}] incompatible with length {} and embedding ({m},{tau})",
            template.length
        )));
    }
    // Extract only the embedded coordinates; motions are dropped eagerly.
    let coords: Vec<Result<Vec<f64>>> = (0..realizations)
        .into_par_iter()
        .map(|r| {
            let spec = template.clone().with_seed(template.seed + r as u64);
            let motion = synth_motion(&spec).map_err(|e| annotate(e, &format!("r={r}")))?;
            let mut out = Vec::with_capacity(t_list.len() * m);
            for &t in t_list {
                for j in 0..m {
                    out.push(motion.samples[t as usize - 1 - j * tau]);
                }
            }
            Ok(out)
        })
        .collect();
    let mut per_t: Vec<Vec<f64>> = vec![Vec::with_capacity(realizations * m); t_list.len()];
    for res in coords {
        let flat = res?;
        for (ti, chunk) in flat.chunks(m).enumerate() {
            per_t[ti].extend_from_slice(chunk);
        }
    }
    let cfg = EstimatorConfig {
        k,
        jitter_seed: template.seed,
        ..EstimatorConfig::default()
    };
    let mut rows = Vec::with_capacity(t_list.len());
    for (ti, &t) in t_list.iter().enumerate() {
        let pts = crate::embedding::EmbeddedPointSet::from_rows(per_t[ti].clone(), m);
        let est = crate::knn::estimators::entropy_knn(&pts, &cfg)
            .map_err(|e| annotate(e, &format!("t={t}")))?;
        rows.push(SweepRow {
            axis: SweepAxis::WindowT,
            axis_value: t,
            quantity: Quantity::Entropy,
            mean: est.value,
            std: 0.0,
            realizations,
            kind: template.kind,
            hurst: template.hurst,
            sigma1: template.sigma1,
            window: template.length as u64,
            base_seed: template.seed,
            c2: template.c2,
            integral_scale: template.integral_scale as u64,
            lognormal_mu: template.lognormal_mu,
            lognormal_sigma: template.lognormal_sigma,
            m,
            n: 0,
            tau,
            k,
        });
    }
    Ok(SweepResult { rows })
}

/// Weighted slope of the mean column against the log of the axis value.
/// For scale sweeps the two largest grid points are excluded, where the
/// shrinking point count T/tau inflates the estimator bias.
pub fn fit_log_slope(result: &SweepResult, quantity: Quantity) -> Option<stats::LineFit> {
    let rows: Vec<&SweepRow> = result
        .rows
        .iter()
        .filter(|r| r.quantity == quantity)
        .collect();
    if rows.len() < 3 {
        return None;
    }
    let axis = rows[0].axis;
    let mut idx: Vec<usize> = (0..rows.len()).collect();
    idx.sort_by_key(|&i| rows[i].axis_value);
    let keep = if axis == SweepAxis::ScaleTau && idx.len() > 4 {
        idx.len() - 2
    } else {
        idx.len()
    };
    let x: Vec<f64> = idx[..keep]
        .iter()
        .map(|&i| (rows[i].axis_value as f64).ln())
        .collect();
    let y: Vec<f64> = idx[..keep].iter().map(|&i| rows[i].mean).collect();
    let w: Vec<f64> = idx[..keep]
        .iter()
        .map(|&i| {
            let s = rows[i].std;
            if s > 0.0 {
                rows[i].realizations as f64 / (s * s)
            } else {
                0.0
            }
        })
        .collect();
    let use_weights = w.iter().all(|&v| v > 0.0 && v.is_finite());
    Some(stats::wls(&x, &y, use_weights.then_some(&w[..])))
}
