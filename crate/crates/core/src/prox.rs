//! Proximal and thresholding maps: shrinkage, clipping, singular-value
//! thresholding, and the Huber family.
//!
//! The Huber prox is the closed form obtained from first-order optimality:
//! the branch switches at |a| = c(1+β), which keeps the map continuous and
//! nonexpansive. The `c = +∞` sentinel turns every Huber map into its pure
//! quadratic counterpart with no separate code path.

use crate::error::Result;
use crate::image::{GradientField, Image};
use crate::num::Scalar;
use crate::svd::{svd, SvdFactors};

/// Elementwise soft threshold `sign(a) * max(|a| - t, 0)`.
pub fn shrink<T: Scalar>(a: &[T], t: T) -> Vec<T> {
    a.iter().map(|&x| x.signum() * (x.abs() - t).max(T::zero())).collect()
}

/// Elementwise projection onto the ∞-ball: `sign(a) * min(|a|, t)`.
pub fn clip<T: Scalar>(a: &[T], t: T) -> Vec<T> {
    a.iter().map(|&x| x.signum() * x.abs().min(t)).collect()
}

/// Soft threshold on per-pixel (dx, dy) magnitudes, direction preserved.
pub fn shrink_isotropic<T: Scalar>(f: &GradientField<T>, t: T) -> GradientField<T> {
    let mut out = f.clone();
    for i in 0..f.dx().len() {
        let mag = (f.dx()[i] * f.dx()[i] + f.dy()[i] * f.dy()[i]).sqrt();
        let factor = if mag > t { (mag - t) / mag } else { T::zero() };
        out.dx_mut()[i] = f.dx()[i] * factor;
        out.dy_mut()[i] = f.dy()[i] * factor;
    }
    out
}

/// Projection of per-pixel (dx, dy) 2-vectors onto Euclidean balls of radius `t`.
pub fn clip_isotropic<T: Scalar>(f: &GradientField<T>, t: T) -> GradientField<T> {
    let mut out = f.clone();
    for i in 0..f.dx().len() {
        let mag = (f.dx()[i] * f.dx()[i] + f.dy()[i] * f.dy()[i]).sqrt();
        let factor = t / mag.max(t);
        out.dx_mut()[i] = f.dx()[i] * factor;
        out.dy_mut()[i] = f.dy()[i] * factor;
    }
    out
}

/// Elementwise soft threshold applied to a gradient field (anisotropic TV).
pub fn shrink_field<T: Scalar>(f: &GradientField<T>, t: T) -> GradientField<T> {
    let mut out = f.clone();
    out.dx_mut().copy_from_slice(&shrink(f.dx(), t));
    out.dy_mut().copy_from_slice(&shrink(f.dy(), t));
    out
}

/// Elementwise ∞-ball projection of a gradient field (anisotropic TV).
pub fn clip_field<T: Scalar>(f: &GradientField<T>, t: T) -> GradientField<T> {
    let mut out = f.clone();
    out.dx_mut().copy_from_slice(&clip(f.dx(), t));
    out.dy_mut().copy_from_slice(&clip(f.dy(), t));
    out
}

/// Singular-value soft thresholding of a row-major m×n matrix.
pub fn svt_matrix<T: Scalar>(a: &[T], m: usize, n: usize, t: T) -> Result<Vec<T>> {
    let f = svd(a, m, n)?;
    let thresholded = SvdFactors { s: shrink(&f.s, t), ..f };
    Ok(thresholded.reconstruct())
}

/// Singular-value soft thresholding applied to each channel plane.
pub fn svt_image<T: Scalar>(img: &Image<T>, t: T) -> Result<Image<T>> {
    let (h, w, ch) = img.shape();
    let mut out = Image::zeros(h, w, ch);
    for c in 0..ch {
        let plane = svt_matrix(img.plane(c), h, w, t)?;
        out.plane_mut(c).copy_from_slice(&plane);
    }
    Ok(out)
}

/// Sum of singular values of a row-major m×n matrix.
pub fn nuclear_norm<T: Scalar>(a: &[T], m: usize, n: usize) -> Result<T> {
    Ok(svd(a, m, n)?.s.iter().copied().sum())
}

/// Per-channel nuclear norms, summed.
pub fn nuclear_norm_image<T: Scalar>(img: &Image<T>) -> Result<T> {
    let (h, w, ch) = img.shape();
    let mut total = T::zero();
    for c in 0..ch {
        total = total + nuclear_norm(img.plane(c), h, w)?;
    }
    Ok(total)
}

fn huber_scalar<T: Scalar>(x: T, c: T) -> T {
    let half = T::from_f64_lossy(0.5);
    if x.abs() <= c {
        half * x * x
    } else {
        c * x.abs() - half * c * c
    }
}

/// Summed elementwise Huber value; `c = +∞` gives ½‖x‖².
pub fn huber_value<T: Scalar>(x: &[T], c: T) -> T {
    x.iter().map(|&v| huber_scalar(v, c)).sum()
}

fn huber_prox_scalar<T: Scalar>(a: T, beta: T, c: T) -> T {
    if a.abs() <= c * (T::one() + beta) {
        a / (T::one() + beta)
    } else {
        a - c * beta * a.signum()
    }
}

/// Elementwise minimizer of `ρ_c(z) + (1/(2β)) (z - a)²`.
pub fn huber_prox<T: Scalar>(a: &[T], beta: T, c: T) -> Vec<T> {
    a.iter().map(|&x| huber_prox_scalar(x, beta, c)).collect()
}

fn huber_conj_prox_scalar<T: Scalar>(a: T, sigma: T, c: T) -> T {
    if a.abs() <= (sigma + T::one()) * c {
        a / (T::one() + sigma)
    } else {
        c * a.signum()
    }
}

/// Prox of σ times the Huber conjugate; the result always lies in [-c, c].
pub fn huber_conj_prox<T: Scalar>(a: &[T], sigma: T, c: T) -> Vec<T> {
    a.iter().map(|&x| huber_conj_prox_scalar(x, sigma, c)).collect()
}
