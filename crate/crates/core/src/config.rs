//! Solver configuration and validation.

use crate::error::{Error, Result};
use crate::num::Scalar;

/// Which solver a configuration targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    /// Partially parallel splitting with correction (identity degradation only).
    Pps,
    /// Primal-dual hybrid gradient (any degradation operator).
    Pdhg,
}

/// All scalar knobs of the decomposition model and both solvers.
///
/// `huber_c = +∞` selects the pure-quadratic data term, i.e. the ℓ₂ baseline;
/// no separate code path exists for it.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    /// TV weight τ.
    pub tau: T,
    /// Nuclear-norm weight μ.
    pub mu: T,
    /// Huber threshold c; `+∞` means quadratic loss.
    pub huber_c: T,
    /// Penalty β (splitting solver only).
    pub beta: T,
    /// Relaxation γ ∈ (0,2) (splitting solver only).
    pub gamma: T,
    /// Proximal scalings r, s with r·s > 2 (splitting solver only).
    pub r: T,
    pub s: T,
    /// Dual / primal step sizes (primal-dual solver only).
    pub sigma: T,
    pub eta: T,
    /// Stopping tolerance ε on the relative-change criterion.
    pub epsilon: T,
    pub max_iter: usize,
    /// Use elementwise (anisotropic) TV maps instead of the per-pixel
    /// 2-vector (isotropic) ones. Isotropic is the default.
    pub anisotropic_tv: bool,
    /// Shrink σ and η jointly when the estimated operator norm violates
    /// σ·η·‖K‖² < 1; when false the violation is a hard config error.
    pub auto_scale_steps: bool,
    /// Record the extra per-iteration diagnostic (Q-residual / gap); costs
    /// additional operator applications.
    pub record_diagnostics: bool,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        // Natural-image denoising defaults.
        Self {
            tau: T::from_f64_lossy(0.015),
            mu: T::from_f64_lossy(0.2),
            huber_c: T::from_f64_lossy(0.01),
            beta: T::from_f64_lossy(0.2),
            gamma: T::from_f64_lossy(1.6),
            r: T::one(),
            s: T::from_f64_lossy(2.01),
            sigma: T::from_f64_lossy(0.35),
            eta: T::from_f64_lossy(0.35),
            epsilon: T::from_f64_lossy(1e-2),
            max_iter: 200,
            anisotropic_tv: false,
            auto_scale_steps: true,
            record_diagnostics: false,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    /// Defaults tuned for the synthetic cartoon+texture test image.
    pub fn synthetic() -> Self {
        Self {
            tau: T::from_f64_lossy(0.1),
            mu: T::from_f64_lossy(2.0),
            huber_c: T::from_f64_lossy(0.1),
            beta: T::from_f64_lossy(2.0),
            gamma: T::from_f64_lossy(1.3),
            ..Self::default()
        }
    }

    pub fn quadratic_baseline(mut self) -> Self {
        self.huber_c = T::infinity();
        self
    }
}

/// Checks every invariant the selected algorithm requires; returns the
/// config unchanged on success. The primal-dual step condition
/// σ·η·‖K‖² < 1 depends on the operator and is enforced at solve time.
pub fn validate_config<T: Scalar>(cfg: &SolverConfig<T>, algo: Algo) -> Result<()> {
    let pos = |v: T, name: &str| -> Result<()> {
        if v > T::zero() {
            Ok(())
        } else {
            Err(Error::Config(format!("{name} must be positive, got {v}")))
        }
    };
    pos(cfg.tau, "tau")?;
    pos(cfg.mu, "mu")?;
    pos(cfg.epsilon, "epsilon")?;
    if !(cfg.huber_c > T::zero()) {
        return Err(Error::Config(format!("huber_c must be positive, got {}", cfg.huber_c)));
    }
    if cfg.max_iter == 0 {
        return Err(Error::Config("max_iter must be positive".into()));
    }
    match algo {
        Algo::Pps => {
            pos(cfg.beta, "beta")?;
            pos(cfg.r, "r")?;
            pos(cfg.s, "s")?;
            if !(cfg.r * cfg.s > T::from_f64_lossy(2.0)) {
                return Err(Error::Config(format!(
                    "rs>2 violated: r={} s={}",
                    cfg.r, cfg.s
                )));
            }
            if !(cfg.gamma > T::zero() && cfg.gamma < T::from_f64_lossy(2.0)) {
                return Err(Error::Config(format!(
                    "gamma must be in (0,2), got {}",
                    cfg.gamma
                )));
            }
        }
        Algo::Pdhg => {
            pos(cfg.sigma, "sigma")?;
            pos(cfg.eta, "eta")?;
        }
    }
    Ok(())
}
