//! Discrete gradient/divergence, degradation operators with adjoints, and
//! operator-norm estimation.
//!
//! Boundary rule is periodic everywhere, so ∇ᵀ∇ and the blur diagonalize
//! under the 2-D DFT.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::image::{GradientField, Image};
use crate::num::Scalar;

/// Forward differences with periodic wrap, per channel:
/// `dx[i,j] = img[i, j+1 mod W] - img[i,j]`, `dy[i,j] = img[i+1 mod H, j] - img[i,j]`.
pub fn grad<T: Scalar>(img: &Image<T>) -> GradientField<T> {
    let (h, w, ch) = img.shape();
    let mut out = GradientField::zeros(h, w, ch);
    for c in 0..ch {
        let plane = img.plane(c);
        let base = c * h * w;
        for i in 0..h {
            let inext = if i + 1 == h { 0 } else { i + 1 };
            for j in 0..w {
                let jnext = if j + 1 == w { 0 } else { j + 1 };
                let idx = i * w + j;
                out.dx_mut()[base + idx] = plane[i * w + jnext] - plane[idx];
                out.dy_mut()[base + idx] = plane[inext * w + j] - plane[idx];
            }
        }
    }
    out
}

/// Adjoint of [`grad`] (negative discrete divergence under periodic wrap).
pub fn grad_adjoint<T: Scalar>(f: &GradientField<T>) -> Image<T> {
    let (h, w, ch) = f.shape();
    let mut out = Image::zeros(h, w, ch);
    for c in 0..ch {
        let base = c * h * w;
        for i in 0..h {
            let iprev = if i == 0 { h - 1 } else { i - 1 };
            for j in 0..w {
                let jprev = if j == 0 { w - 1 } else { j - 1 };
                let idx = i * w + j;
                let dx = f.dx()[base + i * w + jprev] - f.dx()[base + idx];
                let dy = f.dy()[base + iprev * w + j] - f.dy()[base + idx];
                out.data_mut()[base + idx] = dx + dy;
            }
        }
    }
    out
}

/// Small convolution kernel, normalized to sum 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BlurKernel<T> {
    rows: usize,
    cols: usize,
    weights: Vec<T>,
}

impl<T: Scalar> BlurKernel<T> {
    pub fn new(rows: usize, cols: usize, weights: Vec<T>) -> Result<Self> {
        if weights.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch("kernel dimensions".into()));
        }
        let sum: T = weights.iter().copied().sum();
        if (sum - T::one()).abs() > T::from_f64_lossy(1e-12) {
            return Err(Error::Config(format!("blur kernel must sum to 1, got {sum}")));
        }
        Ok(Self { rows, cols, weights })
    }

    /// Uniform k×k averaging kernel.
    pub fn average(k: usize) -> Self {
        let v = T::one() / T::from_f64_lossy((k * k) as f64);
        Self { rows: k, cols: k, weights: vec![v; k * k] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

/// The degradation operator Φ of the observation model.
#[derive(Debug, Clone, PartialEq)]
pub enum DegradationOp<T> {
    Identity,
    /// Pointwise multiplication by a 0/1 image of the operand's shape.
    Mask(Image<T>),
    /// Random sampling; materialized into a fixed [`DegradationOp::Mask`]
    /// before solving so the operator is deterministic across iterations.
    Downsample { keep_probability: f64, seed: u64 },
    /// Circular convolution with a normalized kernel.
    Blur(BlurKernel<T>),
}

impl<T: Scalar> DegradationOp<T> {
    /// Resolves `Downsample` into a concrete binary mask for the given shape;
    /// every other variant is returned unchanged. The same spatial pattern is
    /// used across channels.
    pub fn materialize(&self, h: usize, w: usize, ch: usize) -> Result<Self> {
        match self {
            DegradationOp::Downsample { keep_probability, seed } => {
                if !(*keep_probability > 0.0 && *keep_probability <= 1.0) {
                    return Err(Error::Config(format!(
                        "keep_probability must be in (0,1], got {keep_probability}"
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let spatial: Vec<T> = (0..h * w)
                    .map(|_| {
                        if rng.gen::<f64>() < *keep_probability {
                            T::one()
                        } else {
                            T::zero()
                        }
                    })
                    .collect();
                let mut data = Vec::with_capacity(h * w * ch);
                for _ in 0..ch {
                    data.extend_from_slice(&spatial);
                }
                Ok(DegradationOp::Mask(Image::new(h, w, ch, data)?))
            }
            other => {
                if let DegradationOp::Mask(m) = other {
                    if m.shape() != (h, w, ch) {
                        return Err(Error::ShapeMismatch("mask shape vs operand".into()));
                    }
                    if m.data().iter().any(|&v| v != T::zero() && v != T::one()) {
                        return Err(Error::Config("mask entries must be 0 or 1".into()));
                    }
                }
                Ok(other.clone())
            }
        }
    }

    pub fn apply(&self, img: &Image<T>) -> Result<Image<T>> {
        match self {
            DegradationOp::Identity => Ok(img.clone()),
            DegradationOp::Mask(m) => {
                img.check_same_shape(m, "mask apply")?;
                Ok(img.zip(m, |a, b| a * b))
            }
            DegradationOp::Downsample { .. } => {
                let (h, w, c) = img.shape();
                self.materialize(h, w, c)?.apply(img)
            }
            DegradationOp::Blur(k) => Ok(convolve_circular(img, k, false)),
        }
    }

    pub fn apply_adjoint(&self, img: &Image<T>) -> Result<Image<T>> {
        match self {
            // Masks are self-adjoint; blur's adjoint is correlation with the
            // 180-degree rotated kernel.
            DegradationOp::Identity | DegradationOp::Mask(_) | DegradationOp::Downsample { .. } => {
                self.apply(img)
            }
            DegradationOp::Blur(k) => Ok(convolve_circular(img, k, true)),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            DegradationOp::Identity => "identity",
            DegradationOp::Mask(_) => "mask",
            DegradationOp::Downsample { .. } => "downsample",
            DegradationOp::Blur(_) => "blur",
        }
    }
}

fn convolve_circular<T: Scalar>(img: &Image<T>, k: &BlurKernel<T>, adjoint: bool) -> Image<T> {
    let (h, w, ch) = img.shape();
    let (kh, kw) = (k.rows as isize, k.cols as isize);
    let (oh, ow) = (kh / 2, kw / 2);
    let mut out = Image::zeros(h, w, ch);
    for c in 0..ch {
        let plane = img.plane(c);
        for i in 0..h as isize {
            for j in 0..w as isize {
                let mut acc = T::zero();
                for a in 0..kh {
                    for b in 0..kw {
                        let (si, sj) = if adjoint {
                            (i - a + oh, j - b + ow)
                        } else {
                            (i + a - oh, j + b - ow)
                        };
                        let si = si.rem_euclid(h as isize) as usize;
                        let sj = sj.rem_euclid(w as isize) as usize;
                        acc = acc + k.weights[(a * kw + b) as usize] * plane[si * w + sj];
                    }
                }
                out.plane_mut(c)[(i * w as isize + j) as usize] = acc;
            }
        }
    }
    out
}

/// The stacked operator `K (u,v) = (∇u, Φ(u+v))` of the saddle-point form.
#[derive(Debug, Clone)]
pub struct StackedOperator<T> {
    phi: DegradationOp<T>,
}

impl<T: Scalar> StackedOperator<T> {
    pub fn new(phi: DegradationOp<T>) -> Self {
        Self { phi }
    }

    pub fn phi(&self) -> &DegradationOp<T> {
        &self.phi
    }

    pub fn apply(&self, u: &Image<T>, v: &Image<T>) -> Result<(GradientField<T>, Image<T>)> {
        u.check_same_shape(v, "stacked operator")?;
        Ok((grad(u), self.phi.apply(&u.add(v))?))
    }

    pub fn apply_adjoint(
        &self,
        g: &GradientField<T>,
        im: &Image<T>,
    ) -> Result<(Image<T>, Image<T>)> {
        let phi_t = self.phi.apply_adjoint(im)?;
        let u_part = grad_adjoint(g).add(&phi_t);
        Ok((u_part, phi_t))
    }
}

/// Power iteration on KᵀK; approaches ‖K‖² from below. Callers multiply by a
/// safety factor before checking the strict step-size condition.
pub fn estimate_norm_sq<T: Scalar>(
    k: &StackedOperator<T>,
    h: usize,
    w: usize,
    ch: usize,
    iters: usize,
    seed: u64,
) -> Result<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = h * w * ch;
    let mut u = Image::new(h, w, ch, (0..n).map(|_| T::from_f64_lossy(rng.gen::<f64>() - 0.5)).collect())?;
    let mut v = Image::new(h, w, ch, (0..n).map(|_| T::from_f64_lossy(rng.gen::<f64>() - 0.5)).collect())?;
    let mut estimate = T::zero();
    for _ in 0..iters.max(1) {
        let nrm = (u.norm().powi(2) + v.norm().powi(2)).sqrt();
        if nrm == T::zero() {
            break;
        }
        u = u.scale(T::one() / nrm);
        v = v.scale(T::one() / nrm);
        let (g, im) = k.apply(&u, &v)?;
        estimate = g.norm().powi(2) + im.norm().powi(2);
        let (nu, nv) = k.apply_adjoint(&g, &im)?;
        u = nu;
        v = nv;
    }
    Ok(estimate)
}
