use std::f64::consts::PI;

use crate::{Error, Result};

/// Smallest supported number of grid points.
pub const MIN_POINTS: usize = 16;

/// Uniform periodic grid on `[-L/2, L/2)` with `n` points.
///
/// Sample `j` sits at `x_j = -L/2 + j h` with `h = L / n`. Angular
/// frequencies are `xi_k = 2 pi k / L` for `k` in `[-n/2, n/2)`, stored in
/// FFT order (non-negative modes first).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n_points: usize,
    box_length: f64,
}

impl GridSpec {
    pub fn new(n_points: usize, box_length: f64) -> Result<Self> {
        if n_points < MIN_POINTS || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points = {n_points} must be a power of two >= {MIN_POINTS}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box_length = {box_length} must be positive and finite"
            )));
        }
        Ok(Self {
            n_points,
            box_length,
        })
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.box_length / self.n_points as f64
    }

    /// Left end of the box, `-L/2`.
    #[inline]
    pub fn x_min(&self) -> f64 {
        -0.5 * self.box_length
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        self.x_min() + j as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Signed integer mode number of FFT slot `k`.
    #[inline]
    pub fn mode(&self, k: usize) -> i64 {
        let n = self.n_points as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Index of the unpaired Nyquist mode `k = -n/2`.
    #[inline]
    pub fn nyquist_index(&self) -> usize {
        self.n_points / 2
    }

    #[inline]
    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Angular frequencies in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let k0 = self.fundamental();
        (0..self.n_points)
            .map(|k| k0 * self.mode(k) as f64)
            .collect()
    }

    /// Largest resolved frequency magnitude, `pi / h`.
    #[inline]
    pub fn xi_max(&self) -> f64 {
        PI / self.spacing()
    }
}
