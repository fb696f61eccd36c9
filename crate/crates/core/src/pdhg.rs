//! Primal-dual hybrid gradient solver for arbitrary degradation operators.
//!
//! Dual ascent on (λ₁, λ₂) by projection/clipped prox, gradient descent on u,
//! singular-value thresholding on v, then over-relaxation by extrapolation.

use crate::config::{validate_config, Algo, SolverConfig};
use crate::error::{Error, Result};
use crate::image::{GradientField, Image};
use crate::metrics::{objective, tol, tv_norm, DecompResult, TraceRecord};
use crate::num::{dot, Scalar};
use crate::ops::{grad, grad_adjoint, DegradationOp, StackedOperator};
use crate::prox::{
    clip_field, clip_isotropic, huber_conj_prox, huber_value, svt_image,
};

const NORM_EST_ITERS: usize = 50;
const NORM_EST_SEED: u64 = 0x5eed;
const NORM_SAFETY: f64 = 1.05;

/// Driveable solver state; [`pdhg_solve`] is the usual entry point, the
/// struct exists so diagnostics can be sampled mid-run.
pub struct PdhgSolver<T> {
    cfg: SolverConfig<T>,
    b0: Image<T>,
    k: StackedOperator<T>,
    u: Image<T>,
    v: Image<T>,
    u_bar: Image<T>,
    v_bar: Image<T>,
    lambda1: GradientField<T>,
    lambda2: Image<T>,
    // running sums for ergodic averages
    sum_u: Image<T>,
    sum_v: Image<T>,
    sum_l1: GradientField<T>,
    sum_l2: Image<T>,
    steps: usize,
}

impl<T: Scalar> PdhgSolver<T> {
    /// Validates the config (including the step-size condition against the
    /// estimated ‖K‖²) and sets up the initial state `u⁰ = ū⁰ = b₀`,
    /// everything else zero.
    pub fn new(b0: &Image<T>, phi: &DegradationOp<T>, cfg: &SolverConfig<T>) -> Result<Self> {
        validate_config(cfg, Algo::Pdhg)?;
        let (h, w, ch) = b0.shape();
        let phi = phi.materialize(h, w, ch)?;
        let k = StackedOperator::new(phi);

        let mut cfg = cfg.clone();
        let norm_sq = crate::ops::estimate_norm_sq(&k, h, w, ch, NORM_EST_ITERS, NORM_EST_SEED)?;
        let bound = cfg.sigma * cfg.eta * T::from_f64_lossy(NORM_SAFETY) * norm_sq;
        if bound >= T::one() {
            if cfg.auto_scale_steps {
                // shrink both steps by the same factor, preserving their ratio
                let f = (T::from_f64_lossy(0.999) / bound).sqrt();
                cfg.sigma = cfg.sigma * f;
                cfg.eta = cfg.eta * f;
            } else {
                return Err(Error::Config(format!(
                    "sigma*eta*|K|^2 < 1 violated: sigma={} eta={} |K|^2~{}",
                    cfg.sigma, cfg.eta, norm_sq
                )));
            }
        }

        Ok(Self {
            cfg,
            b0: b0.clone(),
            k,
            u: b0.clone(),
            v: Image::zeros(h, w, ch),
            u_bar: b0.clone(),
            v_bar: Image::zeros(h, w, ch),
            lambda1: GradientField::zeros(h, w, ch),
            lambda2: Image::zeros(h, w, ch),
            sum_u: Image::zeros(h, w, ch),
            sum_v: Image::zeros(h, w, ch),
            sum_l1: GradientField::zeros(h, w, ch),
            sum_l2: Image::zeros(h, w, ch),
            steps: 0,
        })
    }

    pub fn config(&self) -> &SolverConfig<T> {
        &self.cfg
    }

    pub fn u(&self) -> &Image<T> {
        &self.u
    }

    pub fn v(&self) -> &Image<T> {
        &self.v
    }

    pub fn lambda1(&self) -> &GradientField<T> {
        &self.lambda1
    }

    pub fn lambda2(&self) -> &Image<T> {
        &self.lambda2
    }

    /// One full iteration; returns (tol, dual-stationarity residual).
    pub fn step(&mut self) -> Result<(T, T)> {
        let cfg = &self.cfg;
        let phi = self.k.phi();

        // dual updates
        let l1_arg = self.lambda1.axpy(cfg.sigma, &grad(&self.u_bar));
        self.lambda1 = if cfg.anisotropic_tv {
            clip_field(&l1_arg, cfg.tau)
        } else {
            clip_isotropic(&l1_arg, cfg.tau)
        };
        let l2_arg = self
            .lambda2
            .axpy(cfg.sigma, &phi.apply(&self.u_bar.add(&self.v_bar))?.sub(&self.b0));
        self.lambda2 = Image::new(
            self.b0.height(),
            self.b0.width(),
            self.b0.channels(),
            huber_conj_prox(l2_arg.data(), cfg.sigma, cfg.huber_c),
        )?;

        // primal updates
        let phi_t_l2 = phi.apply_adjoint(&self.lambda2)?;
        let u_next = self
            .u
            .axpy(-cfg.eta, &grad_adjoint(&self.lambda1).add(&phi_t_l2));
        let v_next = svt_image(&self.v.axpy(-cfg.eta, &phi_t_l2), cfg.eta * cfg.mu)?;

        // extrapolation
        self.u_bar = u_next.scale(T::from_f64_lossy(2.0)).sub(&self.u);
        self.v_bar = v_next.scale(T::from_f64_lossy(2.0)).sub(&self.v);

        let t = tol(&self.u, &self.v, &u_next, &v_next)?;
        self.u = u_next;
        self.v = v_next;

        if self.u.has_nan() || self.v.has_nan() {
            return Err(Error::Numerical("NaN in iterates".into()));
        }

        self.sum_u = self.sum_u.add(&self.u);
        self.sum_v = self.sum_v.add(&self.v);
        self.sum_l1 = self.sum_l1.add(&self.lambda1);
        self.sum_l2 = self.sum_l2.add(&self.lambda2);
        self.steps += 1;

        let dual_res = grad_adjoint(&self.lambda1).add(&phi_t_l2).norm();
        Ok((t, dual_res))
    }

    /// Restricted-gap surrogate at an arbitrary point: sum of the
    /// Fenchel-Young gaps of the three terms plus the dual stationarity
    /// residual, floored at zero.
    pub fn gap_at(
        &self,
        u: &Image<T>,
        v: &Image<T>,
        l1: &GradientField<T>,
        l2: &Image<T>,
    ) -> Result<T> {
        let cfg = &self.cfg;
        let phi = self.k.phi();
        let gu = grad(u);
        let term_tv = cfg.tau * tv_norm(u, cfg.anisotropic_tv) - gu.dot(l1);

        let w = phi.apply(&u.add(v))?.sub(&self.b0);
        let conj: T = l2
            .data()
            .iter()
            .map(|&x| T::from_f64_lossy(0.5) * x * x)
            .sum();
        let term_data = huber_value(w.data(), cfg.huber_c) + conj - dot(w.data(), l2.data());

        let term_nuc = cfg.mu * crate::prox::nuclear_norm_image(v)?
            + dot(v.data(), phi.apply_adjoint(l2)?.data());

        let dual_res = grad_adjoint(l1).add(&phi.apply_adjoint(l2)?).norm();
        Ok((term_tv + term_data + term_nuc + dual_res).max(T::zero()))
    }

    /// Gap surrogate at the current iterate.
    pub fn gap(&self) -> Result<T> {
        self.gap_at(&self.u, &self.v, &self.lambda1, &self.lambda2)
    }

    /// Gap surrogate at the running ergodic averages.
    pub fn ergodic_gap(&self) -> Result<T> {
        if self.steps == 0 {
            return self.gap();
        }
        let n = T::from_f64_lossy(self.steps as f64);
        self.gap_at(
            &self.sum_u.scale(T::one() / n),
            &self.sum_v.scale(T::one() / n),
            &self.sum_l1.scale(T::one() / n),
            &self.sum_l2.scale(T::one() / n),
        )
    }

    pub fn into_result(self, trace: Vec<TraceRecord<T>>) -> DecompResult<T> {
        DecompResult { iterations: trace.len(), u: self.u, v: self.v, trace }
    }
}

/// Solves the decomposition model for any degradation operator.
pub fn pdhg_solve<T: Scalar>(
    b0: &Image<T>,
    phi: &DegradationOp<T>,
    cfg: &SolverConfig<T>,
) -> Result<DecompResult<T>> {
    let mut solver = PdhgSolver::new(b0, phi, cfg)?;
    let mut trace = Vec::new();
    for _ in 0..cfg.max_iter {
        let (t, dual_res) = solver.step()?;
        let diagnostic = if cfg.record_diagnostics { Some(solver.gap()?) } else { None };
        let obj = objective(&solver.u, &solver.v, b0, solver.k.phi(), &solver.cfg)?;
        trace.push(TraceRecord { objective: obj, tol: t, constraint_residual: dual_res, diagnostic });
        if t < cfg.epsilon {
            break;
        }
    }
    Ok(solver.into_result(trace))
}
