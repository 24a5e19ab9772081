//! Synthesis of non-stationary processes with stationary increments and
//! k-nearest-neighbor estimation of their time-averaged information
//! quantities.
//!
//! The crate has five parts:
//!
//! - [`synth`]: reproducible fGn/fBm, Hermitian and even-Hermitian
//!   log-normal noises and the multifractal random walk, all via circulant
//!   embedding;
//! - [`embedding`]: Takens delay vectors, increments and the
//!   unit-determinant increment rewrite;
//! - [`knn`]: Kozachenko-Leonenko entropy, KSG mutual information and the
//!   pooled-window (ersatz) entropy, auto-mutual information and entropy
//!   rate built from them;
//! - [`analytic`]: closed-form fBm and log-normal reference values;
//! - [`experiments`]: ensemble sweeps over window size, scale, neighbor
//!   count and embedding dimension, with CSV/JSON outputs.

// Parameter guards use `!(x > 0.0)` so NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod embedding;
pub mod error;
pub mod experiments;
pub mod knn;
pub mod rng;
pub mod stats;
pub mod synth;
pub mod trajectory;

pub use error::{Error, Result};
pub use knn::{EstimatorConfig, InfoEstimate, Quantity};
pub use trajectory::{NoiseSpec, ProcessKind, Role, Trajectory};
