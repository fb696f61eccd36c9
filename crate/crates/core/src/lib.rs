//! Cartoon + texture decomposition of degraded images.
//!
//! The model splits an observation `b₀ = Φ(u + v) + ε` into a piecewise
//! smooth cartoon `u` (total-variation prior) and a low-rank texture `v`
//! (nuclear-norm prior), with a Huber data term that tolerates heavy-tailed
//! noise. Setting the Huber threshold to `+∞` recovers the quadratic-loss
//! baseline through the same code paths.
//!
//! Two solvers are provided: a partially parallel splitting scheme with a
//! correction step ([`pps::pps_solve`], identity degradation only) and a
//! primal-dual hybrid gradient scheme ([`pdhg::pdhg_solve`], arbitrary
//! degradation operators).
//!
//! Everything is generic over the scalar type; [`Image32`] / [`Image64`]
//! and friends pin the two supported precisions.

pub mod config;
pub mod error;
pub mod fft;
pub mod image;
pub mod io;
pub mod metrics;
pub mod noise;
pub mod num;
pub mod ops;
pub mod pdhg;
pub mod pps;
pub mod prox;
pub mod scenario;
pub mod svd;
pub mod synth;

pub use config::{validate_config, Algo, SolverConfig};
pub use error::{Error, Result};
pub use image::{GradientField, Image};
pub use metrics::{objective, snr, ssim, tol, tv_norm, DecompResult, MetricReport, TraceRecord};
pub use noise::{corrupt, sample_noise, NoiseFamily, NoiseSpec};
pub use num::Scalar;
pub use ops::{BlurKernel, DegradationOp, StackedOperator};
pub use pdhg::{pdhg_solve, PdhgSolver};
pub use pps::{pps_diagnostics, pps_solve};
pub use scenario::{run_benchmark, BenchmarkScenario, Method, PhiSpec};
pub use synth::{compose, default_ground_truth, make_cartoon, make_texture, GroundTruth};

pub type Image32 = Image<f32>;
pub type Image64 = Image<f64>;
pub type SolverConfig32 = SolverConfig<f32>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type DecompResult32 = DecompResult<f32>;
pub type DecompResult64 = DecompResult<f64>;
