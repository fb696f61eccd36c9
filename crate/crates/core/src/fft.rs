//! Spectral solve for (∇ᵀ∇ + I) u = rhs under periodic boundary.
//!
//! The periodic difference Gram diagonalizes under the 2-D DFT with symbol
//! |λ∇|²(p,q) = 4 sin²(πp/H) + 4 sin²(πq/W), so the solve is one forward
//! transform, a pointwise division by 1 + |λ∇|², and one inverse transform.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::image::Image;
use crate::num::Scalar;

/// Cached plans and denominator for a fixed grid size.
pub struct SpectralSolver<T> {
    h: usize,
    w: usize,
    row_fwd: Arc<dyn Fft<T>>,
    row_inv: Arc<dyn Fft<T>>,
    col_fwd: Arc<dyn Fft<T>>,
    col_inv: Arc<dyn Fft<T>>,
    denom: Vec<T>,
}

impl<T: Scalar> SpectralSolver<T> {
    pub fn new(h: usize, w: usize) -> Self {
        let mut planner = FftPlanner::new();
        let row_fwd = planner.plan_fft_forward(w);
        let row_inv = planner.plan_fft_inverse(w);
        let col_fwd = planner.plan_fft_forward(h);
        let col_inv = planner.plan_fft_inverse(h);
        let pi = T::from_f64_lossy(std::f64::consts::PI);
        let four = T::from_f64_lossy(4.0);
        let mut denom = vec![T::zero(); h * w];
        for p in 0..h {
            let sp = (pi * T::from_f64_lossy(p as f64) / T::from_f64_lossy(h as f64)).sin();
            for q in 0..w {
                let sq = (pi * T::from_f64_lossy(q as f64) / T::from_f64_lossy(w as f64)).sin();
                denom[p * w + q] = T::one() + four * (sp * sp + sq * sq);
            }
        }
        Self { h, w, row_fwd, row_inv, col_fwd, col_inv, denom }
    }

    fn fft2(&self, buf: &mut [Complex<T>], inverse: bool) {
        let (h, w) = (self.h, self.w);
        let (row, col) = if inverse {
            (&self.row_inv, &self.col_inv)
        } else {
            (&self.row_fwd, &self.col_fwd)
        };
        for i in 0..h {
            row.process(&mut buf[i * w..(i + 1) * w]);
        }
        let mut column = vec![Complex::new(T::zero(), T::zero()); h];
        for j in 0..w {
            for i in 0..h {
                column[i] = buf[i * w + j];
            }
            col.process(&mut column);
            for i in 0..h {
                buf[i * w + j] = column[i];
            }
        }
    }

    /// Solves (∇ᵀ∇ + I) u = rhs per channel.
    pub fn solve(&self, rhs: &Image<T>) -> Image<T> {
        let (h, w, ch) = rhs.shape();
        debug_assert_eq!((h, w), (self.h, self.w));
        let mut out = Image::zeros(h, w, ch);
        let scale = T::one() / T::from_f64_lossy((h * w) as f64);
        let mut buf = vec![Complex::new(T::zero(), T::zero()); h * w];
        for c in 0..ch {
            let plane = rhs.plane(c);
            for (b, &v) in buf.iter_mut().zip(plane) {
                *b = Complex::new(v, T::zero());
            }
            self.fft2(&mut buf, false);
            for (b, &d) in buf.iter_mut().zip(&self.denom) {
                *b = *b / d;
            }
            self.fft2(&mut buf, true);
            for (o, b) in out.plane_mut(c).iter_mut().zip(&buf) {
                *o = b.re * scale;
            }
        }
        out
    }
}

/// One-shot convenience wrapper around [`SpectralSolver`].
pub fn solve_grad_gram_plus_identity<T: Scalar>(rhs: &Image<T>) -> Image<T> {
    SpectralSolver::new(rhs.height(), rhs.width()).solve(rhs)
}
