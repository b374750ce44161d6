//! Fourier-multiplier operators on periodic fields.

use std::f64::consts::PI;

use log::warn;
use rustfft::num_complex::Complex64;

use super::{fourier, ComplexField, GridSpec};
use crate::integration::riemann_zeta;
use crate::{Error, Result};

/// Supported range of Sobolev exponents.
pub const SOBOLEV_RANGE: (f64, f64) = (-2.0, 4.0);

/// Supported range of rescaling factors.
pub const RESCALE_RANGE: (f64, f64) = (0.25, 4.0);

/// Symbol of `D^order` (homogeneous) or `<xi>^order`, optionally followed by `d/dx`.
///
/// The derivative factor `i xi` vanishes on the Nyquist mode so that real
/// fields have real derivatives.
pub(crate) fn symbol(
    xi: f64,
    order: f64,
    homogeneous: bool,
    gradient: bool,
    nyquist: bool,
) -> Complex64 {
    let weight = if order == 0.0 {
        1.0
    } else if homogeneous {
        if xi == 0.0 {
            0.0
        } else {
            xi.abs().powf(order)
        }
    } else {
        (1.0 + xi * xi).powf(0.5 * order)
    };
    if gradient {
        if nyquist {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, xi * weight)
        }
    } else {
        Complex64::new(weight, 0.0)
    }
}

/// Multiply the spectrum of `f` by `m(k, xi_k)` and transform back.
pub fn apply_multiplier(
    f: &ComplexField,
    m: impl Fn(usize, f64) -> Complex64,
) -> Result<ComplexField> {
    let grid = *f.grid();
    let xi = grid.wavenumbers();
    let mut spec = f.spectrum();
    for (k, v) in spec.iter_mut().enumerate() {
        *v *= m(k, xi[k]);
    }
    ComplexField::from_spectrum(grid, spec)
}

/// `D^order` or `<D>^order`, optionally composed with `d/dx`.
pub(crate) fn weighted(
    f: &ComplexField,
    order: f64,
    homogeneous: bool,
    gradient: bool,
) -> Result<ComplexField> {
    if order == 0.0 && !gradient {
        return Ok(f.clone());
    }
    let nyq = f.grid().nyquist_index();
    apply_multiplier(f, |k, xi| {
        symbol(xi, order, homogeneous, gradient, k == nyq)
    })
}

/// `D^alpha f` with `D = (-d^2/dx^2)^{1/2}`, i.e. multiplier `|xi|^alpha`.
pub fn fractional_derivative(f: &ComplexField, alpha: f64) -> Result<ComplexField> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::param("alpha", format!("{alpha} must be >= 0")));
    }
    weighted(f, alpha, true, false)
}

/// Spectral `d/dx`.
pub fn derivative(f: &ComplexField) -> Result<ComplexField> {
    weighted(f, 0.0, true, true)
}

/// Sobolev norm with weight `|xi|^{2s}` (homogeneous) or `(1 + xi^2)^s`.
///
/// Normalised so that `s = 0` reproduces the physical L2 norm. The zero
/// mode carries no weight in the homogeneous norm when `s != 0`.
pub fn sobolev_norm(f: &ComplexField, s: f64, homogeneous: bool) -> Result<f64> {
    if !(s.is_finite() && s >= SOBOLEV_RANGE.0 && s <= SOBOLEV_RANGE.1) {
        return Err(Error::param(
            "s",
            format!(
                "{s} outside supported range [{}, {}]",
                SOBOLEV_RANGE.0, SOBOLEV_RANGE.1
            ),
        ));
    }
    let grid = f.grid();
    let xi = grid.wavenumbers();
    let spec = f.spectrum();
    Ok(spectral_sobolev_sum(grid, &xi, &spec, s, homogeneous).sqrt())
}

pub(crate) fn spectral_sobolev_sum(
    grid: &GridSpec,
    xi: &[f64],
    spec: &[Complex64],
    s: f64,
    homogeneous: bool,
) -> f64 {
    let n = grid.n_points() as f64;
    let sum: f64 = spec
        .iter()
        .zip(xi)
        .map(|(v, &x)| symbol(x, 2.0 * s, homogeneous, false, false).re * v.norm_sqr())
        .sum();
    grid.box_length() / (n * n) * sum
}

/// Sobolev norm of the function on the line sampled by `f` (decayed at the
/// box edge).
///
/// The inhomogeneous weight is smooth, so the periodic sum already converges
/// spectrally. The homogeneous weight `|xi|^{2s}` has a cusp at `xi = 0` and
/// the sum over `xi_k = 2 pi k / L` carries the singular error terms
/// `2 zeta(-2s-2j) g^{(2j)}(0) dxi^{2s+2j+1} / (2j)!`, `g = |f^|^2`; those
/// with `j <= 2` are subtracted, with `g^{(2j)}(0)` from the moments of `f`.
pub fn line_sobolev_norm(f: &ComplexField, s: f64, homogeneous: bool) -> Result<f64> {
    let periodic = sobolev_norm(f, s, homogeneous)?;
    if !homogeneous || s <= 0.0 {
        return Ok(periodic);
    }
    let grid = f.grid();
    let h = grid.spacing();
    let dxi = grid.fundamental();
    // moments about the centroid of |f|^2 (g is translation invariant)
    let weight: f64 = f.values().iter().map(|v| v.norm_sqr()).sum();
    if weight == 0.0 {
        return Ok(0.0);
    }
    let centre = f
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| grid.x(j) * v.norm_sqr())
        .sum::<f64>()
        / weight;
    let mut moments = [Complex64::new(0.0, 0.0); 5];
    for (j, v) in f.values().iter().enumerate() {
        let x = grid.x(j) - centre;
        let mut xp = h;
        for m in moments.iter_mut() {
            *m += v * xp;
            xp *= x;
        }
    }
    // derivatives of f^ at 0: (-i)^k M_k
    let minus_i = Complex64::new(0.0, -1.0);
    let dhat: Vec<Complex64> = moments
        .iter()
        .enumerate()
        .map(|(k, m)| minus_i.powu(k as u32) * m)
        .collect();
    const BINOMIAL: [[f64; 5]; 3] = [
        [1.0, 0.0, 0.0, 0.0, 0.0],
        [1.0, 2.0, 1.0, 0.0, 0.0],
        [1.0, 4.0, 6.0, 4.0, 1.0],
    ];
    const FACT: [f64; 3] = [1.0, 2.0, 24.0];
    let mut correction = 0.0;
    for j in 0..3 {
        let order = 2 * j;
        let g: f64 = (0..=order)
            .map(|k| (BINOMIAL[j][k] * dhat[k] * dhat[order - k].conj()).re)
            .sum();
        let beta = 2.0 * s + order as f64;
        if beta > 8.0 {
            break;
        }
        correction += 2.0 * riemann_zeta(-beta)? * g * dxi.powf(beta + 1.0) / FACT[j];
    }
    let continuum = periodic * periodic - correction / (2.0 * PI);
    Ok(continuum.max(0.0).sqrt())
}

/// Free Schrödinger group `e^{it d^2/dx^2}`: multiplier `e^{-i xi^2 t}`.
pub fn free_propagate(f: &ComplexField, t: f64) -> Result<ComplexField> {
    if !t.is_finite() {
        return Err(Error::NonFinite("propagation time"));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    apply_multiplier(f, |_, xi| Complex64::from_polar(1.0, -xi * xi * t))
}

/// Zero every mode with `|k| >= n/3` (two-thirds rule).
pub fn dealias_in_place(spec: &mut [Complex64], grid: &GridSpec) {
    let cutoff = grid.n_points() as i64 / 3;
    for (k, v) in spec.iter_mut().enumerate() {
        if grid.mode(k).abs() >= cutoff {
            *v = Complex64::new(0.0, 0.0);
        }
    }
}

/// Running integral `m_j = int_{x_0}^{x_j} g` of periodic samples `g`,
/// computed spectrally (mean part integrated exactly, zero-mean part by
/// the multiplier `1/(i xi)`).
pub fn spectral_antiderivative(grid: &GridSpec, samples: &[f64]) -> Vec<f64> {
    let n = grid.n_points();
    debug_assert_eq!(samples.len(), n);
    let mut spec: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fourier::forward_in_place(&mut spec);
    let mean = spec[0].re / n as f64;
    let xi = grid.wavenumbers();
    let nyq = grid.nyquist_index();
    for k in 0..n {
        if k == 0 || k == nyq {
            spec[k] = Complex64::new(0.0, 0.0);
        } else {
            spec[k] /= Complex64::new(0.0, xi[k]);
        }
    }
    fourier::inverse_in_place(&mut spec);
    let h = grid.spacing();
    let base = spec[0].re;
    spec.iter()
        .enumerate()
        .map(|(j, v)| v.re - base + mean * h * j as f64)
        .collect()
}

/// Scaling map `f -> lambda^{1/(2 sigma)} f(lambda x)`.
///
/// Samples of `f(lambda x)` come from the band-limited trigonometric
/// interpolant of `f`; points mapped outside the box are set to zero, which
/// requires `f` to have decayed at the box edge.
pub fn rescale(f: &ComplexField, lambda: f64, sigma: f64) -> Result<ComplexField> {
    if !(lambda.is_finite() && lambda >= RESCALE_RANGE.0 && lambda <= RESCALE_RANGE.1) {
        return Err(Error::param(
            "lambda",
            format!(
                "{lambda} outside [{}, {}]",
                RESCALE_RANGE.0, RESCALE_RANGE.1
            ),
        ));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::param("sigma", format!("{sigma} must be > 0")));
    }
    if !f.is_edge_decayed() {
        warn!(
            "rescale: edge magnitude {:e} above decay limit; result is affected by periodic wrap",
            f.edge_magnitude()
        );
    }
    if lambda == 1.0 {
        return Ok(f.clone());
    }
    let grid = *f.grid();
    let n = grid.n_points();
    let half = grid.box_length() / 2.0;
    let spec = f.spectrum();
    let amp = lambda.powf(1.0 / (2.0 * sigma));
    let values = grid
        .points()
        .into_iter()
        .map(|x| {
            let y = lambda * x;
            if y.abs() > half {
                Complex64::new(0.0, 0.0)
            } else {
                amp * interpolate(&grid, &spec, y)
            }
        })
        .collect::<Vec<_>>();
    debug_assert_eq!(values.len(), n);
    ComplexField::new(grid, values)
}

/// Evaluate the trigonometric interpolant defined by `spec` at `y`.
///
/// The Nyquist coefficient is split symmetrically (cosine) so real data
/// interpolates to real values.
fn interpolate(grid: &GridSpec, spec: &[Complex64], y: f64) -> Complex64 {
    const RESYNC: usize = 64;
    let n = grid.n_points();
    let theta = 2.0 * PI * (y - grid.x_min()) / grid.box_length();
    let step = Complex64::from_polar(1.0, theta);
    let mut acc = spec[0];
    let mut z = Complex64::new(1.0, 0.0);
    for k in 1..n / 2 {
        z = if k % RESYNC == 0 {
            Complex64::from_polar(1.0, theta * k as f64)
        } else {
            z * step
        };
        acc += spec[k] * z + spec[n - k] * z.conj();
    }
    let nyq = n / 2;
    acc += spec[nyq] * (theta * nyq as f64).cos();
    acc / n as f64
}
