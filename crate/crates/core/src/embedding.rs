//! Takens delay embedding, increment series and the unit-determinant
//! increment rewrite of embedded vectors.

use crate::error::{Error, Result};
use crate::stats;
use crate::trajectory::{Role, Trajectory};

/// Delay-embedding parameters: dimension `m` and delay `tau` (samples).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddingSpec {
    pub m: usize,
    pub tau: usize,
}

impl EmbeddingSpec {
    pub fn new(m: usize, tau: usize) -> Self {
        Self { m, tau }
    }

    pub fn validate_for(&self, series_len: usize) -> Result<()> {
        if self.m == 0 || self.tau == 0 {
            return Err(Error::invalid("embedding", "m and tau must be >= 1"));
        }
        if (self.m - 1) * self.tau >= series_len {
            return Err(Error::Length(format!(
                "(m - 1) tau = {} >= series length {}",
                (self.m - 1) * self.tau,
                series_len
            )));
        }
        Ok(())
    }
}

/// A materialized set of m-dimensional delay vectors, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedPointSet {
    data: Vec<f64>,
    dim: usize,
    count: usize,
}

impl EmbeddedPointSet {
    pub fn from_rows(data: Vec<f64>, dim: usize) -> Self {
        assert!(dim > 0 && data.len().is_multiple_of(dim));
        let count = data.len() / dim;
        Self { data, dim, count }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Copy of the coordinate columns `range` as a lower-dimensional set.
    pub fn project(&self, range: std::ops::Range<usize>) -> EmbeddedPointSet {
        assert!(range.end <= self.dim);
        let dim = range.len();
        let mut data = Vec::with_capacity(dim * self.count);
        for i in 0..self.count {
            data.extend_from_slice(&self.point(i)[range.clone()]);
        }
        EmbeddedPointSet::from_rows(data, dim)
    }
}

/// Delay-embed a series: point at time `t` is
/// `(x_t, x_{t-tau}, ..., x_{t-(m-1)tau})`, giving `T - (m-1) tau` points
/// ordered by `t`.
pub fn takens_embed_series(samples: &[f64], spec: EmbeddingSpec) -> Result<EmbeddedPointSet> {
    spec.validate_for(samples.len())?;
    let (m, tau) = (spec.m, spec.tau);
    let count = samples.len() - (m - 1) * tau;
    let mut data = Vec::with_capacity(count * m);
    for i in 0..count {
        let t = i + (m - 1) * tau;
        for j in 0..m {
            data.push(samples[t - j * tau]);
        }
    }
    Ok(EmbeddedPointSet::from_rows(data, m))
}

pub fn takens_embed(traj: &Trajectory, spec: EmbeddingSpec) -> Result<EmbeddedPointSet> {
    takens_embed_series(&traj.samples, spec)
}

/// Increment series `x_t - x_{t-tau}` of length `T - tau`; the result is a
/// noise regardless of the input role.
pub fn increment_series(traj: &Trajectory, tau: usize) -> Result<Trajectory> {
    if tau == 0 || tau >= traj.len() {
        return Err(Error::Length(format!(
            "increment delay {tau} out of range for {} samples",
            traj.len()
        )));
    }
    let samples = (tau..traj.len())
        .map(|t| traj.samples[t] - traj.samples[t - tau])
        .collect();
    Ok(Trajectory {
        samples,
        role: Role::Noise,
        spec: traj.spec.clone(),
    })
}

/// Rewrite each embedded point `(x_t, x_{t-tau}, ...)` as
/// `(x_t, d_tau x_t, d_tau x_{t-tau}, ..., d_tau x_{t-(m-2)tau})`.
/// The transform is the band matrix with unit diagonal determinant, so it
/// is invertible and leaves differential entropy unchanged.
pub fn increment_transform(pts: &EmbeddedPointSet) -> EmbeddedPointSet {
    let (m, n) = (pts.dim(), pts.len());
    let mut data = Vec::with_capacity(m * n);
    for i in 0..n {
        let p = pts.point(i);
        data.push(p[0]);
        for w in p.windows(2) {
            data.push(w[0] - w[1]);
        }
    }
    EmbeddedPointSet::from_rows(data, m)
}

/// Inverse of [`increment_transform`].
pub fn increment_transform_inverse(pts: &EmbeddedPointSet) -> EmbeddedPointSet {
    let (m, n) = (pts.dim(), pts.len());
    let mut data = Vec::with_capacity(m * n);
    for i in 0..n {
        let p = pts.point(i);
        let mut prev = p[0];
        data.push(prev);
        for delta in &p[1..] {
            prev -= delta;
            data.push(prev);
        }
    }
    EmbeddedPointSet::from_rows(data, m)
}

/// The increment-rewrite matrix of dimension `m`, row-major.
pub fn increment_matrix(m: usize) -> Vec<Vec<f64>> {
    let mut q = vec![vec![0.0; m]; m];
    q[0][0] = 1.0;
    for r in 1..m {
        q[r][r - 1] = 1.0;
        q[r][r] = -1.0;
    }
    q
}

/// Sample standard deviation of the tau-increments of a series.
pub fn increment_std(traj: &Trajectory, tau: usize) -> Result<f64> {
    let inc = increment_series(traj, tau)?;
    let sd = stats::std_dev(&inc.samples);
    if !(sd > 0.0) {
        return Err(Error::Degenerate(
            "increment series has zero variance".into(),
        ));
    }
    Ok(sd)
}
