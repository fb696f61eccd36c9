//! Synthetic ground-truth images with a known cartoon/texture split.
//!
//! Cartoons are piecewise constant (random rectangles and discs on a flat
//! background); textures are sums of sinusoidal outer products, so each
//! channel plane has small exact rank. Composites are exact weighted sums.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::num::Scalar;

/// Known decomposition `composite = w_cartoon * cartoon + w_texture * texture`.
#[derive(Debug, Clone)]
pub struct GroundTruth<T> {
    pub cartoon: Image<T>,
    pub texture: Image<T>,
    pub composite: Image<T>,
    pub w_cartoon: T,
    pub w_texture: T,
}

/// Piecewise-constant image: `regions` random axis-aligned rectangles or
/// discs with constant gray levels on a constant background. At most
/// `regions + 1` distinct pixel values.
pub fn make_cartoon<T: Scalar>(h: usize, w: usize, regions: usize, seed: u64) -> Image<T> {
    assert!(regions >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let background = 0.15 + 0.2 * rng.gen::<f64>();
    let mut plane = vec![background; h * w];
    // regions counts the background as one region
    let shapes = regions - 1;
    for _ in 0..shapes {
        let gray = 0.1 + 0.85 * rng.gen::<f64>();
        if rng.gen::<bool>() {
            // rectangle
            let i0 = rng.gen_range(0..h);
            let j0 = rng.gen_range(0..w);
            let hh = rng.gen_range(h / 8 + 1..h / 2 + 2).min(h - i0);
            let ww = rng.gen_range(w / 8 + 1..w / 2 + 2).min(w - j0);
            for i in i0..i0 + hh {
                for j in j0..j0 + ww {
                    plane[i * w + j] = gray;
                }
            }
        } else {
            // disc
            let ci = rng.gen_range(0..h) as f64;
            let cj = rng.gen_range(0..w) as f64;
            let radius = rng.gen_range(h.min(w) as f64 / 8.0..h.min(w) as f64 / 3.0);
            for i in 0..h {
                for j in 0..w {
                    let d = ((i as f64 - ci).powi(2) + (j as f64 - cj).powi(2)).sqrt();
                    if d <= radius {
                        plane[i * w + j] = gray;
                    }
                }
            }
        }
    }
    Image::new(h, w, 1, plane.into_iter().map(T::from_f64_lossy).collect()).unwrap()
}

/// Sum of `rank` sinusoidal outer products, affinely rescaled into [0,1]
/// (the rescale can add one to the matrix rank).
pub fn make_texture<T: Scalar>(h: usize, w: usize, rank: usize, seed: u64) -> Image<T> {
    assert!(rank >= 1 && rank <= h.min(w));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = 2.0 * std::f64::consts::PI;
    let mut plane = vec![0.0f64; h * w];
    for _ in 0..rank {
        let fi = rng.gen_range(1..=(h / 4).max(1)) as f64;
        let fj = rng.gen_range(1..=(w / 4).max(1)) as f64;
        let (pi_, pj) = (tau * rng.gen::<f64>(), tau * rng.gen::<f64>());
        let amp = 0.5 + 0.5 * rng.gen::<f64>();
        let row: Vec<f64> =
            (0..h).map(|i| (tau * fi * i as f64 / h as f64 + pi_).sin()).collect();
        let col: Vec<f64> =
            (0..w).map(|j| (tau * fj * j as f64 / w as f64 + pj).sin()).collect();
        for i in 0..h {
            for j in 0..w {
                plane[i * w + j] += amp * row[i] * col[j];
            }
        }
    }
    let min = plane.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = plane.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if max > min { max - min } else { 1.0 };
    let data = plane.into_iter().map(|v| T::from_f64_lossy((v - min) / span)).collect();
    Image::new(h, w, 1, data).unwrap()
}

/// Exact weighted composition; weights must be strictly interior.
pub fn compose<T: Scalar>(
    cartoon: &Image<T>,
    texture: &Image<T>,
    w_cartoon: T,
) -> Result<GroundTruth<T>> {
    cartoon.check_same_shape(texture, "compose")?;
    if !(w_cartoon > T::zero() && w_cartoon < T::one()) {
        return Err(Error::Config(format!(
            "cartoon weight must be in (0,1), got {w_cartoon}"
        )));
    }
    let w_texture = T::one() - w_cartoon;
    let composite = cartoon.scale(w_cartoon).add(&texture.scale(w_texture));
    Ok(GroundTruth {
        cartoon: cartoon.clone(),
        texture: texture.clone(),
        composite,
        w_cartoon,
        w_texture,
    })
}

/// The default 64×64 benchmark ground truth: 3-region cartoon plus rank-2
/// texture, combined 0.7 / 0.3.
pub fn default_ground_truth<T: Scalar>(size: usize, seed: u64) -> GroundTruth<T> {
    let cartoon = make_cartoon(size, size, 3, seed);
    let texture = make_texture(size, size, 2, seed.wrapping_add(0x7e37));
    compose(&cartoon, &texture, T::from_f64_lossy(0.7)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svd::svd;
    use std::collections::BTreeSet;

    fn distinct_values(img: &Image<f64>) -> usize {
        img.data().iter().map(|v| v.to_bits()).collect::<BTreeSet<_>>().len()
    }

    #[test]
    fn single_region_is_constant() {
        let c = make_cartoon::<f64>(16, 16, 1, 5);
        assert_eq!(distinct_values(&c), 1);
        assert!(crate::ops::grad(&c).norm() == 0.0);
    }

    #[test]
    fn region_count_bounds_distinct_values() {
        for seed in 0..5 {
            let c = make_cartoon::<f64>(64, 64, 3, seed);
            assert!(distinct_values(&c) <= 4, "seed {seed}");
            assert!(c.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(make_cartoon::<f64>(32, 32, 3, 7), make_cartoon::<f64>(32, 32, 3, 7));
        assert_eq!(make_texture::<f64>(32, 32, 2, 7), make_texture::<f64>(32, 32, 2, 7));
    }

    #[test]
    fn texture_rank_bound() {
        for seed in 0..5 {
            let t = make_texture::<f64>(32, 32, 2, seed);
            let f = svd(t.plane(0), 32, 32).unwrap();
            // rank <= 2 sinusoid pairs... each outer product contributes one,
            // plus one from the affine rescale
            assert!(f.rank() <= 3, "seed {seed}: rank {}", f.rank());
            let cutoff = 1e-10 * f.s[0];
            assert!(f.s.iter().skip(3).all(|&v| v < cutoff));
        }
    }

    #[test]
    fn composition_is_exact() {
        let c = make_cartoon::<f64>(16, 16, 3, 1);
        let t = make_texture::<f64>(16, 16, 2, 2);
        let gt = compose(&c, &t, 0.7).unwrap();
        for i in 0..gt.composite.data().len() {
            let want = gt.w_cartoon * c.data()[i] + gt.w_texture * t.data()[i];
            assert_eq!(gt.composite.data()[i], want);
        }
        assert_eq!(gt.w_cartoon + gt.w_texture, 1.0);
        assert!(compose(&c, &t, 1.0).is_err());
        assert!(compose(&c, &t, 0.0).is_err());
    }

    #[test]
    fn constant_profiles_compose_to_scaled_constant() {
        let c = make_cartoon::<f64>(16, 16, 1, 3);
        let zero = Image::zeros(16, 16, 1);
        // zero texture is outside [0,1)-weight generation, compose directly
        let gt = compose(&c, &zero, 0.7).unwrap();
        assert_eq!(distinct_values(&gt.composite), 1);
    }
}
