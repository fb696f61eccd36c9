//! Raster image and gradient-field containers.
//!
//! Pixel storage is planar: `data[c * h * w + i * w + j]` holds channel `c`,
//! row `i`, column `j`. All arithmetic helpers operate on the flat buffer.

use crate::error::{Error, Result};
use crate::num::{norm2, Scalar};

/// H×W×C raster, planar storage, row-major within each channel plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Image<T> {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<T>,
}

impl<T: Scalar> Image<T> {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<T>) -> Result<Self> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(Error::ShapeMismatch("zero image dimension".into()));
        }
        if data.len() != height * width * channels {
            return Err(Error::ShapeMismatch(format!(
                "data length {} != {}x{}x{}",
                data.len(),
                height,
                width,
                channels
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite pixel value".into()));
        }
        Ok(Self { height, width, channels, data })
    }

    pub fn zeros(height: usize, width: usize, channels: usize) -> Self {
        Self { height, width, channels, data: vec![T::zero(); height * width * channels] }
    }

    pub fn constant(height: usize, width: usize, channels: usize, value: T) -> Self {
        Self { height, width, channels, data: vec![value; height * width * channels] }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.height, self.width, self.channels)
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    /// One channel plane as a slice of length `h*w`.
    pub fn plane(&self, c: usize) -> &[T] {
        let hw = self.height * self.width;
        &self.data[c * hw..(c + 1) * hw]
    }

    pub fn plane_mut(&mut self, c: usize) -> &mut [T] {
        let hw = self.height * self.width;
        &mut self.data[c * hw..(c + 1) * hw]
    }

    pub fn get(&self, i: usize, j: usize, c: usize) -> T {
        self.data[c * self.height * self.width + i * self.width + j]
    }

    pub fn set(&mut self, i: usize, j: usize, c: usize, v: T) {
        self.data[c * self.height * self.width + i * self.width + j] = v;
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.shape() == other.shape()
    }

    pub fn check_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "{what}: {:?} vs {:?}",
                self.shape(),
                other.shape()
            )))
        }
    }

    pub fn norm(&self) -> T {
        norm2(&self.data)
    }

    pub fn map<F: Fn(T) -> T>(&self, f: F) -> Self {
        Self {
            height: self.height,
            width: self.width,
            channels: self.channels,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip<F: Fn(T, T) -> T>(&self, other: &Self, f: F) -> Self {
        debug_assert!(self.same_shape(other));
        Self {
            height: self.height,
            width: self.width,
            channels: self.channels,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    /// `self + s * other`, the workhorse of the iterative solvers.
    pub fn axpy(&self, s: T, other: &Self) -> Self {
        self.zip(other, |a, b| a + s * b)
    }

    pub fn has_nan(&self) -> bool {
        self.data.iter().any(|v| !v.is_finite())
    }
}

/// Two directional difference planes per channel, same planar layout as
/// [`Image`].
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField<T> {
    height: usize,
    width: usize,
    channels: usize,
    dx: Vec<T>,
    dy: Vec<T>,
}

impl<T: Scalar> GradientField<T> {
    pub fn zeros(height: usize, width: usize, channels: usize) -> Self {
        let n = height * width * channels;
        Self { height, width, channels, dx: vec![T::zero(); n], dy: vec![T::zero(); n] }
    }

    pub fn from_parts(
        height: usize,
        width: usize,
        channels: usize,
        dx: Vec<T>,
        dy: Vec<T>,
    ) -> Result<Self> {
        let n = height * width * channels;
        if dx.len() != n || dy.len() != n {
            return Err(Error::ShapeMismatch("gradient plane length".into()));
        }
        Ok(Self { height, width, channels, dx, dy })
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.height, self.width, self.channels)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn dx(&self) -> &[T] {
        &self.dx
    }

    pub fn dy(&self) -> &[T] {
        &self.dy
    }

    pub fn dx_mut(&mut self) -> &mut [T] {
        &mut self.dx
    }

    pub fn dy_mut(&mut self) -> &mut [T] {
        &mut self.dy
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.shape() == other.shape()
    }

    pub fn norm(&self) -> T {
        let sx: T = self.dx.iter().map(|&v| v * v).sum();
        let sy: T = self.dy.iter().map(|&v| v * v).sum();
        (sx + sy).sqrt()
    }

    pub fn zip<F: Fn(T, T) -> T + Copy>(&self, other: &Self, f: F) -> Self {
        debug_assert!(self.same_shape(other));
        Self {
            height: self.height,
            width: self.width,
            channels: self.channels,
            dx: self.dx.iter().zip(&other.dx).map(|(&a, &b)| f(a, b)).collect(),
            dy: self.dy.iter().zip(&other.dy).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            height: self.height,
            width: self.width,
            channels: self.channels,
            dx: self.dx.iter().map(|&v| v * s).collect(),
            dy: self.dy.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn axpy(&self, s: T, other: &Self) -> Self {
        self.zip(other, |a, b| a + s * b)
    }

    pub fn dot(&self, other: &Self) -> T {
        crate::num::dot(&self.dx, &other.dx) + crate::num::dot(&self.dy, &other.dy)
    }

    pub fn has_nan(&self) -> bool {
        self.dx.iter().chain(&self.dy).any(|v| !v.is_finite())
    }
}
