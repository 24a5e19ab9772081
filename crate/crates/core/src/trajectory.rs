//! Process specifications and sampled trajectories.
//!
//! A [`NoiseSpec`] fully determines a synthetic realization (including its
//! seed); a [`Trajectory`] carries the samples together with the spec that
//! produced them. Trajectories serialize to a two-column `index,value` CSV
//! plus a JSON sidecar holding the spec for provenance.

use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Version tag written into trajectory sidecars and run manifests.
pub const SCHEMA_VERSION: u32 = 1;

/// The four process classes the synthesizers can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    /// Fractional Gaussian noise.
    Fgn,
    /// Log-normal noise from the Hermitian (rank 1) transform.
    LognormalH1,
    /// Log-normal noise from the even-Hermitian (rank 2) transform.
    LognormalH2,
    /// Multifractal random walk noise (log-normal cascade).
    Mrw,
}

impl ProcessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProcessKind::Fgn => "fgn",
            ProcessKind::LognormalH1 => "lognormal_h1",
            ProcessKind::LognormalH2 => "lognormal_h2",
            ProcessKind::Mrw => "mrw",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fgn" => Ok(ProcessKind::Fgn),
            "lognormal_h1" => Ok(ProcessKind::LognormalH1),
            "lognormal_h2" => Ok(ProcessKind::LognormalH2),
            "mrw" => Ok(ProcessKind::Mrw),
            other => Err(Error::invalid(
                "kind",
                format!("unknown process kind `{other}`"),
            )),
        }
    }
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Log-width (std of `log X`) of the default log-normal marginal. At this
/// width the rank-1 motion Gaussianizes visibly over scales up to 2^6
/// while the even-rank-2 motion keeps its increment shape; much wider
/// marginals drag the even-transform increments toward their own
/// non-Gaussian large-scale limit as well.
pub const DEFAULT_LOGNORMAL_LOG_WIDTH: f64 = 0.55;

/// Default log-normal marginal mean (unit scale; the synthesizer rescales
/// every noise to `sigma1` anyway, so only the shape matters).
pub fn default_lognormal_mean() -> f64 {
    1.0
}

pub fn default_lognormal_std() -> f64 {
    let w2 = DEFAULT_LOGNORMAL_LOG_WIDTH * DEFAULT_LOGNORMAL_LOG_WIDTH;
    default_lognormal_mean() * (w2.exp() - 1.0).sqrt()
}

/// Full parameter set of a synthetic noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: ProcessKind,
    /// Hurst exponent of the integrated motion, in (0, 1).
    pub hurst: f64,
    /// Standard deviation of the noise at unit scale; every synthesized
    /// noise is centered and rescaled to this sample std.
    pub sigma1: f64,
    /// Number of samples at dt = 1; must be a power of two.
    pub length: usize,
    pub seed: u64,
    /// Intermittency coefficient (MRW only).
    pub c2: f64,
    /// Integral scale of the MRW cascade, in samples.
    pub integral_scale: usize,
    /// Target mean of the log-normal marginal.
    pub lognormal_mu: f64,
    /// Target standard deviation of the log-normal marginal.
    pub lognormal_sigma: f64,
}

impl NoiseSpec {
    pub fn fgn(hurst: f64, length: usize, seed: u64) -> Self {
        Self {
            kind: ProcessKind::Fgn,
            hurst,
            sigma1: 1.0,
            length,
            seed,
            c2: 0.0,
            integral_scale: length,
            lognormal_mu: default_lognormal_mean(),
            lognormal_sigma: default_lognormal_std(),
        }
    }

    pub fn lognormal(rank2: bool, hurst: f64, length: usize, seed: u64) -> Self {
        Self {
            kind: if rank2 {
                ProcessKind::LognormalH2
            } else {
                ProcessKind::LognormalH1
            },
            ..Self::fgn(hurst, length, seed)
        }
    }

    /// MRW spec; `hurst` is the target exponent of the integrated motion,
    /// the internal fGn factor uses `hurst + c2`.
    pub fn mrw(hurst: f64, c2: f64, length: usize, seed: u64) -> Self {
        Self {
            kind: ProcessKind::Mrw,
            c2,
            ..Self::fgn(hurst, length, seed)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_length(mut self, length: usize) -> Self {
        self.length = length;
        self.integral_scale = self.integral_scale.min(length);
        self
    }

    pub fn with_sigma1(mut self, sigma1: f64) -> Self {
        self.sigma1 = sigma1;
        self
    }

    pub fn with_marginal(mut self, mean: f64, std: f64) -> Self {
        self.lognormal_mu = mean;
        self.lognormal_sigma = std;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hurst > 0.0 && self.hurst < 1.0) {
            return Err(Error::invalid(
                "hurst",
                format!("{} is outside the open interval (0, 1)", self.hurst),
            ));
        }
        if !(self.sigma1 > 0.0) {
            return Err(Error::invalid("sigma1", "must be positive"));
        }
        if self.length < 2 || !self.length.is_power_of_two() {
            return Err(Error::invalid(
                "length",
                format!("{} is not a power of two >= 2", self.length),
            ));
        }
        if self.c2 < 0.0 {
            return Err(Error::invalid("c2", "must be non-negative"));
        }
        match self.kind {
            ProcessKind::Mrw => {
                if self.integral_scale == 0 || self.integral_scale > self.length {
                    return Err(Error::invalid(
                        "integral_scale",
                        format!(
                            "{} must lie in [1, length = {}]",
                            self.integral_scale, self.length
                        ),
                    ));
                }
                let h_fgn = self.hurst + self.c2;
                if !(h_fgn > 0.0 && h_fgn < 1.0) {
                    return Err(Error::invalid(
                        "c2",
                        format!("effective fGn exponent hurst + c2 = {h_fgn} leaves (0, 1)"),
                    ));
                }
            }
            ProcessKind::LognormalH1 | ProcessKind::LognormalH2 => {
                if !(self.lognormal_mu > 0.0) || !(self.lognormal_sigma > 0.0) {
                    return Err(Error::invalid(
                        "lognormal_mu",
                        "marginal mean and std must be positive",
                    ));
                }
            }
            ProcessKind::Fgn => {}
        }
        Ok(())
    }
}

/// Whether a trajectory is a stationary noise or its integrated motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Noise,
    Motion,
}

/// An equi-sampled real-valued series (dt = 1) with synthesis metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<f64>,
    pub role: Role,
    pub spec: NoiseSpec,
}

#[derive(Serialize, Deserialize)]
struct TrajectoryHeader {
    schema_version: u32,
    role: Role,
    spec: NoiseSpec,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Path of the JSON sidecar that accompanies a trajectory CSV.
    pub fn sidecar_path(csv: &Path) -> PathBuf {
        csv.with_extension("json")
    }

    /// Write `index,value` CSV plus the spec sidecar.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(file, "index,value")?;
        for (i, v) in self.samples.iter().enumerate() {
            writeln!(file, "{i},{v}")?;
        }
        file.flush()?;
        let header = TrajectoryHeader {
            schema_version: SCHEMA_VERSION,
            role: self.role,
            spec: self.spec.clone(),
        };
        let json = serde_json::to_string_pretty(&header)
            .map_err(|e| Error::Parse(format!("sidecar serialization: {e}")))?;
        std::fs::write(Self::sidecar_path(path), json)?;
        Ok(())
    }

    /// Read a trajectory written by [`Trajectory::write_csv`]. The sidecar
    /// is required; synthesized data always carries one.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let sidecar = Self::sidecar_path(path);
        let json = std::fs::read_to_string(&sidecar)
            .map_err(|e| Error::Parse(format!("missing or unreadable sidecar {sidecar:?}: {e}")))?;
        let header: TrajectoryHeader = serde_json::from_str(&json)
            .map_err(|e| Error::Parse(format!("sidecar {sidecar:?}: {e}")))?;
        let file = BufReader::new(std::fs::File::open(path)?);
        let mut samples = Vec::new();
        for (lineno, line) in file.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("index")) {
                continue;
            }
            let value = line
                .rsplit(',')
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: `{line}`", lineno + 1)))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            samples.push(v);
        }
        if samples.is_empty() {
            return Err(Error::Parse(format!("{path:?}: no samples")));
        }
        Ok(Trajectory {
            samples,
            role: header.role,
            spec: header.spec,
        })
    }
}
