//! Gauge map for `sigma = 1`:
//! `v = u exp(-(i/2) int_{-inf}^x |u|^2)` takes solutions of
//! `i u_t + u_xx + i |u|^2 u_x = 0` to solutions of `i v_t + v_xx + i (|v|^2 v)_x = 0`.

use rustfft::num_complex::Complex64;

use crate::spectral::{spectral_antiderivative, ComplexField, EDGE_DECAY_LIMIT};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeDirection {
    /// gDNLS frame to DNLS frame.
    Forward,
    Inverse,
}

/// Multiply by `exp(-+ (i/2) int_{x_0}^x |u|^2)`; the integral starts at the
/// left box edge, where `|u|` must be below 1e-12.
pub fn gauge_transform(u: &ComplexField, dir: GaugeDirection) -> Result<ComplexField> {
    let left = u.values()[0].norm();
    if !(left < EDGE_DECAY_LIMIT) {
        return Err(Error::Unresolved {
            magnitude: left,
            limit: EDGE_DECAY_LIMIT,
        });
    }
    let density: Vec<f64> = u.values().iter().map(|v| v.norm_sqr()).collect();
    let phase = spectral_antiderivative(u.grid(), &density);
    let sign = match dir {
        GaugeDirection::Forward => -0.5,
        GaugeDirection::Inverse => 0.5,
    };
    let values = u
        .values()
        .iter()
        .zip(&phase)
        .map(|(v, p)| v * Complex64::from_polar(1.0, sign * p))
        .collect();
    ComplexField::new(*u.grid(), values)
}
