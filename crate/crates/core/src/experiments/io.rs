//! CSV and manifest output for experiment results.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::SCHEMA_VERSION;

use super::{BiasGrid, IncrementPdf, SweepResult};

/// Per-run provenance written next to the data files.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: String,
    /// The command or figure id that produced the run.
    pub command: String,
    /// Serialized plans, one per sweep in the run.
    pub plans: Vec<serde_json::Value>,
    pub base_seed: u64,
    pub wall_ms: u128,
    pub files: Vec<String>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, base_seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.into(),
            plans: Vec::new(),
            base_seed,
            wall_ms: 0,
            files: Vec::new(),
        }
    }

    pub fn add_plan<T: Serialize>(&mut self, plan: &T) {
        if let Ok(v) = serde_json::to_value(plan) {
            self.plans.push(v);
        }
    }

    pub fn finish(mut self, wall: Duration, dir: &Path, name: &str) -> Result<PathBuf> {
        self.wall_ms = wall.as_millis();
        let path = dir.join(name);
        let json = serde_json::to_string_pretty(&self)
            .map_err(|e| Error::Parse(format!("manifest: {e}")))?;
        std::fs::write(&path, json)?;
        Ok(path)
    }
}

pub fn write_sweep_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        f,
        "axis,axis_value,quantity,mean,std,realizations,kind,hurst,sigma1,window,\
         base_seed,c2,integral_scale,lognormal_mu,lognormal_sigma,m,n,tau,k"
    )?;
    for r in &result.rows {
        writeln!(
            f,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.axis,
            r.axis_value,
            r.quantity,
            r.mean,
            r.std,
            r.realizations,
            r.kind,
            r.hurst,
            r.sigma1,
            r.window,
            r.base_seed,
            r.c2,
            r.integral_scale,
            r.lognormal_mu,
            r.lognormal_sigma,
            r.m,
            r.n,
            r.tau,
            r.k
        )?;
    }
    f.flush()?;
    Ok(())
}

pub fn write_bias_csv(grid: &BiasGrid, path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        f,
        "k,window,ratio,mean,std,realizations,prediction,bias,kind,m,tau"
    )?;
    let fmt_opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in &grid.rows {
        writeln!(
            f,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.k,
            r.window,
            r.ratio,
            r.mean,
            r.std,
            r.realizations,
            fmt_opt(r.prediction),
            fmt_opt(r.bias),
            grid.kind,
            grid.m,
            grid.tau
        )?;
    }
    f.flush()?;
    Ok(())
}

/// Histogram, flatness and pairwise-KS tables for one increment-PDF run.
pub fn write_pdf_csvs(pdf: &IncrementPdf, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    let hist_path = dir.join(format!("{stem}_hist.csv"));
    let mut f = std::io::BufWriter::new(std::fs::File::create(&hist_path)?);
    writeln!(f, "tau,bin_lo,bin_hi,density,kind")?;
    for row in &pdf.rows {
        for (b, d) in row.density.iter().enumerate() {
            writeln!(
                f,
                "{},{},{},{},{}",
                row.tau,
                pdf.edges[b],
                pdf.edges[b + 1],
                d,
                pdf.kind
            )?;
        }
    }
    f.flush()?;

    let flat_path = dir.join(format!("{stem}_flatness.csv"));
    let mut f = std::io::BufWriter::new(std::fs::File::create(&flat_path)?);
    writeln!(f, "tau,flatness,samples,kind")?;
    for row in &pdf.rows {
        writeln!(
            f,
            "{},{},{},{}",
            row.tau, row.flatness, row.samples, pdf.kind
        )?;
    }
    f.flush()?;

    let ks_path = dir.join(format!("{stem}_ks.csv"));
    let mut f = std::io::BufWriter::new(std::fs::File::create(&ks_path)?);
    writeln!(f, "tau_a,tau_b,ks_distance,critical_1pct,kind")?;
    for (a, b, d, crit) in &pdf.ks_pairs {
        writeln!(f, "{a},{b},{d},{crit},{}", pdf.kind)?;
    }
    f.flush()?;
    Ok(vec![hist_path, flat_path, ks_path])
}
