//! Seeded heavy-tailed noise generation and image corruption.
//!
//! "Intensity" is a raw multiplicative scale on standard draws. It is not a
//! standard deviation: Student-t with 2 degrees of freedom and the Cauchy
//! distribution have no finite variance to calibrate against.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution, Gamma, StudentT};

use crate::error::Result;
use crate::image::Image;
use crate::num::Scalar;
use crate::ops::DegradationOp;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseFamily {
    StudentT { df: f64 },
    Cauchy,
    /// Generalized error distribution; `shape = 1` is Laplace-like,
    /// `shape = 2` Gaussian. Draws are scaled to unit variance.
    Ged { shape: f64 },
}

impl NoiseFamily {
    pub fn label(&self) -> String {
        match self {
            NoiseFamily::StudentT { df } => format!("student-t(df={df})"),
            NoiseFamily::Cauchy => "cauchy".to_string(),
            NoiseFamily::Ged { shape } => format!("ged(shape={shape})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub family: NoiseFamily,
    pub intensity: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn label(&self) -> String {
        format!("{}x{}", self.family.label(), self.intensity)
    }
}

// Lanczos approximation (g = 7, n = 9); plenty for the GED variance scale.
fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// An image-shaped field of i.i.d. draws times the intensity; deterministic
/// in (spec, shape).
pub fn sample_noise<T: Scalar>(spec: &NoiseSpec, h: usize, w: usize, ch: usize) -> Image<T> {
    let n = h * w * ch;
    if spec.intensity == 0.0 {
        return Image::zeros(h, w, ch);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let data: Vec<T> = match spec.family {
        NoiseFamily::StudentT { df } => {
            let d = StudentT::new(df).expect("df > 0");
            (0..n)
                .map(|_| T::from_f64_lossy(spec.intensity * d.sample(&mut rng)))
                .collect()
        }
        NoiseFamily::Cauchy => {
            let d = Cauchy::new(0.0f64, 1.0).unwrap();
            (0..n)
                .map(|_| T::from_f64_lossy(spec.intensity * d.sample(&mut rng)))
                .collect()
        }
        NoiseFamily::Ged { shape } => {
            // |X|^shape ~ Gamma(1/shape, 1); rescale so Var = 1
            let d = Gamma::new(1.0 / shape, 1.0).expect("shape > 0");
            let scale = (0.5 * (ln_gamma(1.0 / shape) - ln_gamma(3.0 / shape))).exp();
            (0..n)
                .map(|_| {
                    let mag = d.sample(&mut rng).powf(1.0 / shape) * scale;
                    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                    T::from_f64_lossy(spec.intensity * sign * mag)
                })
                .collect()
        }
    };
    Image::new(h, w, ch, data).expect("noise field shape")
}

/// The observation model: `b₀ = Φ(b) + ε`. The result is deliberately not
/// clamped to [0,1]; clamping would change the noise law.
pub fn corrupt<T: Scalar>(
    b: &Image<T>,
    phi: &DegradationOp<T>,
    spec: &NoiseSpec,
) -> Result<Image<T>> {
    let (h, w, ch) = b.shape();
    let degraded = phi.materialize(h, w, ch)?.apply(b)?;
    Ok(degraded.add(&sample_noise(spec, h, w, ch)))
}
