//! Quality metrics (SNR, SSIM), the stopping tolerance, the model objective,
//! and the per-solve result containers.

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::image::Image;
use crate::num::Scalar;
use crate::ops::{grad, DegradationOp};
use crate::prox::{huber_value, nuclear_norm_image};

/// One per-iteration diagnostic record.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord<T> {
    pub objective: T,
    pub tol: T,
    /// Combined constraint residual ‖∇u − y‖ + ‖u + v − z‖ (splitting solver)
    /// or the dual-stationarity residual (primal-dual solver).
    pub constraint_residual: T,
    /// Opt-in extra diagnostic: Q-residual or restricted-gap surrogate.
    pub diagnostic: Option<T>,
}

/// Final decomposition plus the full iteration trace.
#[derive(Debug, Clone)]
pub struct DecompResult<T> {
    pub u: Image<T>,
    pub v: Image<T>,
    pub iterations: usize,
    pub trace: Vec<TraceRecord<T>>,
}

/// One CSV row of a benchmark run.
#[derive(Debug, Clone)]
pub struct MetricReport {
    pub image: String,
    pub method: String,
    pub phi: String,
    pub noise: String,
    pub seed: u64,
    pub snr_db: f64,
    pub ssim: f64,
    pub iterations: usize,
    pub time_s: f64,
}

impl MetricReport {
    pub const CSV_HEADER: &'static str =
        "image,method,phi,noise,seed,snr_db,ssim,iterations,time_s";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{:.4}",
            self.image,
            self.method,
            self.phi,
            self.noise,
            self.seed,
            fmt_metric(self.snr_db),
            fmt_metric(self.ssim),
            self.iterations,
            self.time_s
        )
    }

    /// The same row with the wall-time column blanked, for determinism checks.
    pub fn csv_row_without_time(&self) -> String {
        let row = self.csv_row();
        match row.rfind(',') {
            Some(pos) => row[..pos].to_string(),
            None => row,
        }
    }
}

fn fmt_metric(v: f64) -> String {
    if v.is_nan() {
        // flags a failed solve without aborting the whole benchmark
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.6}")
    }
}

/// `20 log10(‖ref‖ / ‖est − ref‖)` in dB; +∞ for a bitwise-equal estimate.
pub fn snr<T: Scalar>(reference: &Image<T>, estimate: &Image<T>) -> Result<T> {
    reference.check_same_shape(estimate, "snr")?;
    let refnorm = reference.norm();
    if refnorm == T::zero() {
        return Err(Error::ZeroReference);
    }
    let err = estimate.sub(reference).norm();
    if err == T::zero() {
        return Ok(T::infinity());
    }
    Ok(T::from_f64_lossy(20.0) * (refnorm / err).log10())
}

const SSIM_WINDOW: usize = 11;

fn gaussian_window<T: Scalar>() -> Vec<T> {
    let sigma = 1.5f64;
    let half = (SSIM_WINDOW / 2) as isize;
    let mut w = Vec::with_capacity(SSIM_WINDOW * SSIM_WINDOW);
    let mut sum = 0.0;
    for i in -half..=half {
        for j in -half..=half {
            let v = (-((i * i + j * j) as f64) / (2.0 * sigma * sigma)).exp();
            w.push(v);
            sum += v;
        }
    }
    w.into_iter().map(|v| T::from_f64_lossy(v / sum)).collect()
}

/// Windowed structural similarity: 11×11 Gaussian window (σ = 1.5),
/// K₁ = 0.01, K₂ = 0.03, dynamic range 1. Mean over all fully interior
/// window positions, then averaged over channels.
pub fn ssim<T: Scalar>(reference: &Image<T>, estimate: &Image<T>) -> Result<T> {
    reference.check_same_shape(estimate, "ssim")?;
    let (h, w, ch) = reference.shape();
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(Error::TooSmall(format!("ssim needs min dimension {SSIM_WINDOW}")));
    }
    let win = gaussian_window::<T>();
    let c1 = T::from_f64_lossy(0.01f64.powi(2));
    let c2 = T::from_f64_lossy(0.03f64.powi(2));
    let half = SSIM_WINDOW / 2;
    let two = T::from_f64_lossy(2.0);

    let mut channel_sum = T::zero();
    for c in 0..ch {
        let a = reference.plane(c);
        let b = estimate.plane(c);
        let mut acc = T::zero();
        let mut count = 0usize;
        for i in half..h - half {
            for j in half..w - half {
                let (mut ma, mut mb) = (T::zero(), T::zero());
                let (mut va, mut vb, mut cov) = (T::zero(), T::zero(), T::zero());
                let mut k = 0;
                for di in 0..SSIM_WINDOW {
                    for dj in 0..SSIM_WINDOW {
                        let idx = (i + di - half) * w + (j + dj - half);
                        let wt = win[k];
                        k += 1;
                        ma = ma + wt * a[idx];
                        mb = mb + wt * b[idx];
                    }
                }
                k = 0;
                for di in 0..SSIM_WINDOW {
                    for dj in 0..SSIM_WINDOW {
                        let idx = (i + di - half) * w + (j + dj - half);
                        let wt = win[k];
                        k += 1;
                        let da = a[idx] - ma;
                        let db = b[idx] - mb;
                        va = va + wt * da * da;
                        vb = vb + wt * db * db;
                        cov = cov + wt * da * db;
                    }
                }
                let num = (two * ma * mb + c1) * (two * cov + c2);
                let den = (ma * ma + mb * mb + c1) * (va + vb + c2);
                acc = acc + num / den;
                count += 1;
            }
        }
        channel_sum = channel_sum + acc / T::from_f64_lossy(count as f64);
    }
    Ok(channel_sum / T::from_f64_lossy(ch as f64))
}

/// The relative-change stopping quantity
/// `max(‖uₖ₊₁ − uₖ‖/(‖uₖ‖+1), ‖vₖ₊₁ − vₖ‖/(‖vₖ‖+1))`.
pub fn tol<T: Scalar>(
    prev_u: &Image<T>,
    prev_v: &Image<T>,
    cur_u: &Image<T>,
    cur_v: &Image<T>,
) -> Result<T> {
    prev_u.check_same_shape(cur_u, "tol u")?;
    prev_v.check_same_shape(cur_v, "tol v")?;
    let ru = cur_u.sub(prev_u).norm() / (prev_u.norm() + T::one());
    let rv = cur_v.sub(prev_v).norm() / (prev_v.norm() + T::one());
    Ok(ru.max(rv))
}

/// Isotropic (or anisotropic) TV of an image.
pub fn tv_norm<T: Scalar>(u: &Image<T>, anisotropic: bool) -> T {
    let g = grad(u);
    if anisotropic {
        g.dx().iter().chain(g.dy()).map(|v| v.abs()).sum()
    } else {
        g.dx()
            .iter()
            .zip(g.dy())
            .map(|(&x, &y)| (x * x + y * y).sqrt())
            .sum()
    }
}

/// Full model objective `τ·TV(u) + μ·Σ‖v_c‖_* + ρ_c(Φ(u+v) − b₀)`.
pub fn objective<T: Scalar>(
    u: &Image<T>,
    v: &Image<T>,
    b0: &Image<T>,
    phi: &DegradationOp<T>,
    cfg: &SolverConfig<T>,
) -> Result<T> {
    u.check_same_shape(v, "objective u/v")?;
    u.check_same_shape(b0, "objective u/b0")?;
    let residual = phi.apply(&u.add(v))?.sub(b0);
    Ok(cfg.tau * tv_norm(u, cfg.anisotropic_tv)
        + cfg.mu * nuclear_norm_image(v)?
        + huber_value(residual.data(), cfg.huber_c))
}
