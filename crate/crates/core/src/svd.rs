//! Thin singular value decomposition via one-sided Jacobi rotations.
//!
//! Small dense matrices only (image channel planes); accuracy matters more
//! than asymptotic speed here, and Jacobi delivers high relative accuracy
//! with no external dependency.

use crate::error::{Error, Result};
use crate::num::Scalar;

/// Thin SVD `X = U diag(s) Vᵀ` with `r = min(m, n)`.
///
/// `u` is m×r and `v` is n×r, both column-major; singular values are sorted
/// nonincreasing.
#[derive(Debug, Clone)]
pub struct SvdFactors<T> {
    pub m: usize,
    pub n: usize,
    pub u: Vec<T>,
    pub s: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Scalar> SvdFactors<T> {
    /// Reconstructs the row-major m×n matrix `U diag(s) Vᵀ`.
    pub fn reconstruct(&self) -> Vec<T> {
        let r = self.s.len();
        let mut out = vec![T::zero(); self.m * self.n];
        for k in 0..r {
            let sk = self.s[k];
            if sk == T::zero() {
                continue;
            }
            for i in 0..self.m {
                let uik = self.u[k * self.m + i] * sk;
                for j in 0..self.n {
                    out[i * self.n + j] = out[i * self.n + j] + uik * self.v[k * self.n + j];
                }
            }
        }
        out
    }

    /// Numeric rank: singular values at or below `1e-12 * s_max` count as zero.
    pub fn rank(&self) -> usize {
        let cutoff = self.s.first().copied().unwrap_or(T::zero()) * T::from_f64_lossy(1e-12);
        self.s.iter().filter(|&&v| v > cutoff).count()
    }
}

/// One-sided Jacobi SVD of a row-major m×n matrix.
pub fn svd<T: Scalar>(a: &[T], m: usize, n: usize) -> Result<SvdFactors<T>> {
    assert_eq!(a.len(), m * n);
    if m < n {
        // Work on the transpose and swap factors.
        let mut at = vec![T::zero(); m * n];
        for i in 0..m {
            for j in 0..n {
                at[j * m + i] = a[i * n + j];
            }
        }
        let f = svd(&at, n, m)?;
        return Ok(SvdFactors { m, n, u: f.v, s: f.s, v: f.u });
    }

    // Column-major working copy of A (m >= n) and accumulator V.
    let mut cols = vec![T::zero(); m * n];
    for i in 0..m {
        for j in 0..n {
            cols[j * m + i] = a[i * n + j];
        }
    }
    let mut v = vec![T::zero(); n * n];
    for j in 0..n {
        v[j * n + j] = T::one();
    }

    let eps = T::epsilon() * T::from_f64_lossy(8.0);
    // Columns whose norm falls below machine precision times the matrix
    // scale are numerically zero; rotating against them never converges
    // because the leftover junk stays perfectly correlated.
    let scale_sq = (0..n)
        .map(|j| (0..m).map(|i| cols[j * m + i] * cols[j * m + i]).sum::<T>())
        .fold(T::zero(), T::max);
    let dead = scale_sq * T::epsilon() * T::epsilon();
    let max_sweeps = 100;
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut app, mut aqq, mut apq) = (T::zero(), T::zero(), T::zero());
                for i in 0..m {
                    let x = cols[p * m + i];
                    let y = cols[q * m + i];
                    app = app + x * x;
                    aqq = aqq + y * y;
                    apq = apq + x * y;
                }
                if apq.abs() <= eps * (app * aqq).sqrt()
                    || apq == T::zero()
                    || app <= dead
                    || aqq <= dead
                {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (T::from_f64_lossy(2.0) * apq);
                let t = {
                    let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                    sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let x = cols[p * m + i];
                    let y = cols[q * m + i];
                    cols[p * m + i] = c * x - s * y;
                    cols[q * m + i] = s * x + c * y;
                }
                for i in 0..n {
                    let x = v[p * n + i];
                    let y = v[q * n + i];
                    v[p * n + i] = c * x - s * y;
                    v[q * n + i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdFailure);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<T> = (0..n)
        .map(|j| {
            (0..m)
                .map(|i| cols[j * m + i] * cols[j * m + i])
                .sum::<T>()
                .sqrt()
        })
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let mut u = vec![T::zero(); m * n];
    let mut s = vec![T::zero(); n];
    let mut vout = vec![T::zero(); n * n];
    for (k, &j) in order.iter().enumerate() {
        s[k] = norms[j];
        if norms[j] > T::zero() {
            for i in 0..m {
                u[k * m + i] = cols[j * m + i] / norms[j];
            }
        }
        for i in 0..n {
            vout[k * n + i] = v[j * n + i];
        }
    }
    Ok(SvdFactors { m, n, u, s, v: vout })
}
