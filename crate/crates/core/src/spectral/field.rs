use rustfft::num_complex::Complex64;

use super::{fourier, GridSpec};
use crate::{Error, Result};

/// Edge magnitude below which a field counts as decayed on the box.
pub const EDGE_DECAY_LIMIT: f64 = 1e-12;

/// Complex samples of a function on a periodic grid (physical space).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::InvalidGrid(format!(
                "field has {} samples, grid has {}",
                values.len(),
                grid.n_points()
            )));
        }
        if values
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFinite("field samples"));
        }
        Ok(Self { grid, values })
    }

    /// Build from values already known to be finite and of the right length.
    pub(crate) fn from_parts(grid: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_points());
        Self { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::from_parts(grid, vec![Complex64::new(0.0, 0.0); grid.n_points()])
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.points().into_iter().map(f).collect();
        Self::new(grid, values)
    }

    pub fn from_real_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Inverse transform of an FFT-ordered spectrum.
    pub fn from_spectrum(grid: GridSpec, mut spectrum: Vec<Complex64>) -> Result<Self> {
        fourier::inverse_in_place(&mut spectrum);
        Self::new(grid, spectrum)
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Unnormalised DFT in FFT order.
    pub fn spectrum(&self) -> Vec<Complex64> {
        fourier::forward(&self.values)
    }

    /// `(sum_j |f_j|^2 h)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.spacing();
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * h).sqrt()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs();
        }
        let h = self.grid.spacing();
        (self.values.iter().map(|v| v.norm().powf(p)).sum::<f64>() * h).powf(1.0 / p)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus at the two ends of the box.
    pub fn edge_magnitude(&self) -> f64 {
        let n = self.values.len();
        self.values[0].norm().max(self.values[n - 1].norm())
    }

    pub fn is_edge_decayed(&self) -> bool {
        self.edge_magnitude() < EDGE_DECAY_LIMIT
    }

    pub fn require_edge_decay(&self) -> Result<()> {
        let magnitude = self.edge_magnitude();
        if magnitude < EDGE_DECAY_LIMIT {
            Ok(())
        } else {
            Err(Error::Unresolved {
                magnitude,
                limit: EDGE_DECAY_LIMIT,
            })
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::from_parts(self.grid, self.values.iter().map(|v| v * factor).collect())
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| f(self.grid.x(j), v))
            .collect();
        Self::new(self.grid, values)
    }

    pub fn sub(&self, other: &ComplexField) -> Self {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        Self::from_parts(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn add(&self, other: &ComplexField) -> Self {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        Self::from_parts(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// L2 distance between two fields on the same grid.
    pub fn l2_distance(&self, other: &ComplexField) -> f64 {
        self.sub(other).l2_norm()
    }
}
