//! Partially parallel splitting solver with a relaxed correction step, for
//! the identity degradation operator.
//!
//! Iteration order: exact u-solve (spectral), multiplier prediction, three
//! independent proximal predictions (nuclear, TV, data term), then a relaxed
//! correction of everything but u.

use crate::config::{validate_config, Algo, SolverConfig};
use crate::error::{Error, Result};
use crate::fft::SpectralSolver;
use crate::image::{GradientField, Image};
use crate::metrics::{objective, tol, DecompResult, TraceRecord};
use crate::num::Scalar;
use crate::ops::{grad, grad_adjoint, DegradationOp};
use crate::prox::{huber_prox, shrink_field, shrink_isotropic, svt_image};

/// Solves the decomposition model with Φ = I.
pub fn pps_solve<T: Scalar>(b0: &Image<T>, cfg: &SolverConfig<T>) -> Result<DecompResult<T>> {
    validate_config(cfg, Algo::Pps)?;
    let (h, w, ch) = b0.shape();

    if b0.norm() == T::zero() {
        return Ok(DecompResult {
            u: Image::zeros(h, w, ch),
            v: Image::zeros(h, w, ch),
            iterations: 0,
            trace: Vec::new(),
        });
    }

    let spectral = SpectralSolver::new(h, w);
    let s_over_beta = cfg.s / cfg.beta;
    let beta_over_s = cfg.beta / cfg.s;
    let rb = cfg.r * cfg.beta;
    let inv_rb = T::one() / rb;
    let two = T::from_f64_lossy(2.0);

    let mut v = Image::zeros(h, w, ch);
    let mut z = Image::zeros(h, w, ch);
    let mut y = GradientField::zeros(h, w, ch);
    let mut lambda1 = GradientField::zeros(h, w, ch);
    let mut lambda2 = Image::zeros(h, w, ch);

    let mut prev_u = b0.clone();
    let mut prev_v = v.clone();
    let mut trace = Vec::new();
    let mut u = prev_u.clone();

    for _k in 0..cfg.max_iter {
        // (1) exact u-solve: (grad gram + I) u = gradT(y + (s/b) l1) + (z - v + (s/b) l2)
        let rhs = grad_adjoint(&y.axpy(s_over_beta, &lambda1))
            .add(&z.sub(&v).axpy(s_over_beta, &lambda2));
        u = spectral.solve(&rhs);

        // (2) multiplier predictions from the pre-update block values
        let gu = grad(&u);
        let lt1 = lambda1.axpy(-beta_over_s, &gu.sub(&y));
        let lt2 = lambda2.axpy(-beta_over_s, &u.add(&v).sub(&z));

        // (3) three independent proximal predictions
        let av = v.axpy(inv_rb, &lt2.scale(two).sub(&lambda2));
        let vt = svt_image(&av, cfg.mu / rb)?;

        let ay = y.scale(-T::one()).axpy(inv_rb, &lt1.scale(two).sub(&lambda1));
        let neg_ay = ay.scale(-T::one());
        let yt = if cfg.anisotropic_tv {
            shrink_field(&neg_ay, cfg.tau / rb)
        } else {
            shrink_isotropic(&neg_ay, cfg.tau / rb)
        };

        let az = z.scale(-T::one()).axpy(inv_rb, &lt2.scale(two).sub(&lambda2));
        let prox_arg = b0.scale(-T::one()).sub(&az);
        let zt = Image::new(
            h,
            w,
            ch,
            huber_prox(prox_arg.data(), inv_rb, cfg.huber_c),
        )?
        .add(b0);

        // opt-in Q-norm residual of the prediction step
        let diagnostic = if cfg.record_diagnostics {
            let dv = v.sub(&vt);
            let dy = y.sub(&yt);
            let dz = z.sub(&zt);
            let dl1 = lambda1.sub(&lt1);
            let dl2 = lambda2.sub(&lt2);
            let q = rb * dv.norm().powi(2)
                + rb * (dy.norm().powi(2) + dz.norm().powi(2))
                + s_over_beta * (dl1.norm().powi(2) + dl2.norm().powi(2))
                - two * crate::num::dot(dv.data(), dl2.data())
                + two * dy.dot(&dl1)
                + two * crate::num::dot(dz.data(), dl2.data());
            Some(q)
        } else {
            None
        };

        // (4) relaxed correction
        let g = cfg.gamma;
        v = v.axpy(-g, &v.sub(&vt));
        y = y.axpy(-g, &y.sub(&yt));
        z = z.axpy(-g, &z.sub(&zt));
        lambda1 = lambda1.axpy(-g, &lambda1.sub(&lt1));
        lambda2 = lambda2.axpy(-g, &lambda2.sub(&lt2));

        if u.has_nan() || v.has_nan() {
            return Err(Error::Numerical("NaN in iterates".into()));
        }

        let t = tol(&prev_u, &prev_v, &u, &v)?;
        let res = grad(&u).sub(&y).norm() + u.add(&v).sub(&z).norm();
        let obj = objective(&u, &v, b0, &DegradationOp::Identity, cfg)?;
        trace.push(TraceRecord { objective: obj, tol: t, constraint_residual: res, diagnostic });

        prev_u = u.clone();
        prev_v = v.clone();

        if t < cfg.epsilon {
            break;
        }
    }

    let iterations = trace.len();
    Ok(DecompResult { u, v, iterations, trace })
}

/// Q-norm prediction residuals from a trace recorded with
/// `record_diagnostics = true`.
pub fn pps_diagnostics<T: Scalar>(result: &DecompResult<T>) -> Vec<T> {
    result.trace.iter().filter_map(|r| r.diagnostic).collect()
}
