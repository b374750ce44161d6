//! The explicit solitary waves `e^{i omega t} phi_{omega,c}(x - ct)`,
//!
//! ```text
//! phi(x) = A(x) exp{ i c x / 2 - i/(2 sigma + 2) int_{-inf}^x A^{2 sigma} }
//! A(x)   = { (sigma+1)(4 omega - c^2) / (2 sqrt(omega) cosh(sigma alpha x) - c) }^{1/(2 sigma)}
//! ```
//!
//! with `alpha = sqrt(4 omega - c^2)`, together with their closed-form
//! masses, the virial identity, the rescaled profiles `h_z`, `g_z` used near
//! the endpoint `c -> -2 sqrt(omega)`, and the endpoint-rate regressions.

use rustfft::num_complex::Complex64;

use crate::integration::{cumulative_integral, integrate_halfline, DEFAULT_TOL};
use crate::spectral::{self, ComplexField, GridSpec, EDGE_DECAY_LIMIT};
use crate::{Error, Result};

/// Largest `c / (2 sqrt(omega))` accepted by the closed-form mass integrals.
pub const MAX_Z_RATIO: f64 = 1.0 - 1e-6;

/// Default soliton box and resolution.
pub const DEFAULT_POINTS: usize = 4096;
pub const DEFAULT_BOX: f64 = 80.0;

/// Default cutoff for the Case-2 split, `c < -2 z0 sqrt(omega)`.
pub const DEFAULT_Z0: f64 = 0.99;

/// Number of points in the default endpoint sequence `alpha_j = 2^{-j} sqrt(omega)`.
pub const ENDPOINT_STEPS: usize = 11;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonParams {
    omega: f64,
    c: f64,
    sigma: f64,
    alpha: f64,
}

impl SolitonParams {
    pub fn new(omega: f64, c: f64, sigma: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::param("omega", format!("{omega} must be > 0")));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::param("sigma", format!("{sigma} must be > 0")));
        }
        let edge = 2.0 * omega.sqrt();
        if !(c.is_finite() && c > -edge && c < edge) {
            return Err(Error::param(
                "c",
                format!("c = {c} violates c^2 < 4 omega (|c| < {edge})"),
            ));
        }
        let alpha = ((edge - c) * (edge + c)).sqrt();
        Ok(Self {
            omega,
            c,
            sigma,
            alpha,
        })
    }

    /// Parameters with `alpha = sqrt(4 omega - c^2)` prescribed and `c <= 0`.
    pub fn from_alpha(omega: f64, alpha: f64, sigma: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && alpha <= 2.0 * omega.sqrt()) {
            return Err(Error::param(
                "alpha",
                format!("{alpha} not in (0, 2 sqrt(omega)]"),
            ));
        }
        // c = -sqrt(4 omega - alpha^2), factored for accuracy near the endpoint
        let root = 2.0 * omega.sqrt();
        let c = -((root - alpha) * (root + alpha)).sqrt();
        // keep the prescribed alpha: recomputing it from c loses digits near the endpoint
        Self::new(omega, c, sigma).map(|p| Self { alpha, ..p })
    }

    #[inline]
    pub fn omega(&self) -> f64 {
        self.omega
    }
    #[inline]
    pub fn c(&self) -> f64 {
        self.c
    }
    #[inline]
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `alpha = sqrt(4 omega - c^2)`, evaluated as `sqrt((2 sqrt w - c)(2 sqrt w + c))`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `z = c / (2 sqrt(omega))` in `(-1, 1)`.
    pub fn z_ratio(&self) -> f64 {
        self.c / (2.0 * self.omega.sqrt())
    }

    /// `1 - z`, computed without cancellation.
    fn one_minus_z(&self) -> f64 {
        let root = 2.0 * self.omega.sqrt();
        (root - self.c) / root
    }

    /// `s_c = 1/2 - 1/(2 sigma)`.
    pub fn critical_regularity(&self) -> f64 {
        0.5 - 0.5 / self.sigma
    }

    /// `p_c = 2 sigma`.
    pub fn critical_exponent(&self) -> f64 {
        2.0 * self.sigma
    }

    /// `A(x)^{2 sigma} = (sigma+1) alpha^2 / (2 sqrt(omega) (cosh(sigma alpha x) - z))`.
    pub fn amplitude_power(&self, x: f64) -> f64 {
        let alpha = self.alpha();
        let arg = self.sigma * alpha * x;
        let sh = (0.5 * arg).sinh();
        let denom = 2.0 * self.omega.sqrt() * (2.0 * sh * sh + self.one_minus_z());
        (self.sigma + 1.0) * alpha * alpha / denom
    }
}

/// Modulus `A(x)` of the solitary wave.
pub fn amplitude(p: &SolitonParams, x: f64) -> f64 {
    p.amplitude_power(x).powf(0.5 / p.sigma)
}

fn check_resolved(p: &SolitonParams, grid: &GridSpec) -> Result<()> {
    let edge = amplitude(p, grid.x_min()).max(amplitude(p, grid.x(grid.n_points() - 1)));
    if edge < EDGE_DECAY_LIMIT {
        Ok(())
    } else {
        Err(Error::Unresolved {
            magnitude: edge,
            limit: EDGE_DECAY_LIMIT,
        })
    }
}

/// `Phi(x_j) = int_{-inf}^{x_j} A^{2 sigma}` on the grid points.
pub fn phase_integral(p: &SolitonParams, grid: &GridSpec) -> Result<Vec<f64>> {
    cumulative_integral(|y| p.amplitude_power(y), &grid.points())
}

/// Samples of `phi_{omega,c}` on the grid.
pub fn full_wave(p: &SolitonParams, grid: &GridSpec) -> Result<ComplexField> {
    check_resolved(p, grid)?;
    let phase = phase_integral(p, grid)?;
    let k = 1.0 / (2.0 * p.sigma + 2.0);
    let values = grid
        .points()
        .iter()
        .zip(&phase)
        .map(|(&x, &big_phi)| Complex64::from_polar(amplitude(p, x), 0.5 * p.c * x - k * big_phi))
        .collect();
    ComplexField::new(*grid, values)
}

/// The travelling solution `e^{i omega t} phi(x - ct)` (translation applied
/// spectrally on the periodic box).
pub fn traveling_wave(p: &SolitonParams, grid: &GridSpec, t: f64) -> Result<ComplexField> {
    let phi = full_wave(p, grid)?;
    let rot = Complex64::from_polar(1.0, p.omega * t);
    let shift = p.c * t;
    spectral::apply_multiplier(&phi, |_, xi| rot * Complex64::from_polar(1.0, -xi * shift))
}

/// Grid that resolves `phi_{omega,c}`: box doubled from 80 until the edge
/// amplitude is below 1e-13, and spacing chosen so the spectrum (carrier
/// `c/2`, decay set by the analytic strip of the profile) is resolved with
/// room for two-thirds dealiasing. Never coarser than 4096 points on 80.
pub fn resolved_grid(p: &SolitonParams) -> GridSpec {
    let mut length = DEFAULT_BOX;
    while amplitude(p, 0.5 * length) >= 0.1 * EDGE_DECAY_LIMIT {
        length *= 2.0;
    }
    let z = p.z_ratio().clamp(-1.0, 1.0);
    let strip = z.acos() / (p.sigma * p.alpha());
    let needed = 0.5 * p.c.abs() + 36.0 / strip;
    let xi_max = (1.5 * needed).max(needed + 2.0);
    let h = std::f64::consts::PI / xi_max;
    let n = ((length / h).ceil() as usize)
        .next_power_of_two()
        .max(DEFAULT_POINTS);
    GridSpec::new(n, length).expect("power-of-two grid with positive box")
}

/// `I = int_0^inf (cosh x - z)^{-1/sigma} dx` for `z in [-1, 1 - 1e-6]`.
pub fn i_integral(sigma: f64, z: f64) -> Result<f64> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::param("sigma", format!("{sigma} must be > 0")));
    }
    if !(z >= -1.0 && z <= MAX_Z_RATIO) {
        return Err(Error::param(
            "c",
            format!("c/(2 sqrt(omega)) = {z} outside [-1, 1 - 1e-6]"),
        ));
    }
    let one_minus_z = 1.0 - z;
    integrate_halfline(
        |x| {
            let sh = (0.5 * x).sinh();
            (2.0 * sh * sh + one_minus_z).powf(-1.0 / sigma)
        },
        DEFAULT_TOL,
    )
    .map(|r| r.value)
}

/// `c_sigma = I(-2 sqrt(omega)) = int_0^inf (cosh x + 1)^{-1/sigma} dx`.
pub fn c_sigma(sigma: f64) -> Result<f64> {
    i_integral(sigma, -1.0)
}

/// `int_0^inf dx / (cosh x - 1 + beta)`.
pub fn beta_integral(beta: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::param("beta", format!("{beta} must be > 0")));
    }
    integrate_halfline(
        |x| {
            let sh = (0.5 * x).sinh();
            1.0 / (2.0 * sh * sh + beta)
        },
        DEFAULT_TOL,
    )
    .map(|r| r.value)
}

fn check_mass_range(p: &SolitonParams) -> Result<()> {
    if p.z_ratio() > MAX_Z_RATIO {
        return Err(Error::param(
            "c",
            format!(
                "c/(2 sqrt(omega)) = {} exceeds 1 - 1e-6; the mass integral is not evaluated there",
                p.z_ratio()
            ),
        ));
    }
    Ok(())
}

/// `||phi||_{L^2}^2 = (2/sigma) ((sigma+1)/(2 sqrt omega))^{1/sigma} alpha^{2/sigma - 1} I(c)`.
pub fn l2_mass_closed(p: &SolitonParams) -> Result<f64> {
    check_mass_range(p)?;
    let s = p.sigma;
    let prefactor = (2.0 / s) * ((s + 1.0) / (2.0 * p.omega.sqrt())).powf(1.0 / s);
    Ok(prefactor * p.alpha().powf(2.0 / s - 1.0) * i_integral(s, p.z_ratio())?)
}

/// `||phi||_{L^{p_c}}^{p_c} = (2(sigma+1)/sigma) (alpha / (2 sqrt omega)) int_0^inf dx/(cosh x - z)`.
pub fn pc_mass_closed(p: &SolitonParams) -> Result<f64> {
    check_mass_range(p)?;
    let s = p.sigma;
    let integral = beta_integral(p.one_minus_z())?;
    Ok(2.0 * (s + 1.0) / s * p.alpha() / (2.0 * p.omega.sqrt()) * integral)
}

/// `||phi'||^2 / ||phi||^2` on the grid; equals `omega` for every solitary wave.
pub fn virial_ratio(p: &SolitonParams, grid: &GridSpec) -> Result<f64> {
    let phi = full_wave(p, grid)?;
    let dphi = spectral::derivative(&phi)?;
    Ok(dphi.l2_norm().powi(2) / phi.l2_norm().powi(2))
}

/// `||phi||_{\dot H^{s_c}}` on the grid.
pub fn critical_norm(p: &SolitonParams, grid: &GridSpec) -> Result<f64> {
    let phi = full_wave(p, grid)?;
    spectral::line_sobolev_norm(&phi, p.critical_regularity(), true)
}

/// Case-2 parameters: `c = -2 z sqrt(omega)` with `z0 < z < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseTwoParams {
    pub z: f64,
    pub z0: f64,
    pub a0: f64,
}

impl CaseTwoParams {
    pub fn new(z: f64, z0: f64, a0: f64) -> Result<Self> {
        if !(z0 > 0.0 && z0 < 1.0) {
            return Err(Error::param("z0", format!("{z0} not in (0, 1)")));
        }
        if !(z > z0 && z < 1.0) {
            return Err(Error::param("z", format!("{z} not in ({z0}, 1)")));
        }
        if !(a0.is_finite() && a0 > 0.0) {
            return Err(Error::param("a0", format!("{a0} must be > 0")));
        }
        Ok(Self { z, z0, a0 })
    }
}

/// `h_z(x) = (cosh(2 sigma x) + z)^{-1/(2 sigma)}`.
pub fn hz_profile(sigma: f64, z: f64, x: f64) -> f64 {
    ((2.0 * sigma * x).cosh() + z).powf(-0.5 / sigma)
}

fn hz_derivative(sigma: f64, z: f64, x: f64) -> f64 {
    let a = 2.0 * sigma * x;
    -a.sinh() * (a.cosh() + z).powf(-0.5 / sigma - 1.0)
}

/// Norms of `h_z` that enter the endpoint lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HzNorms {
    pub l2: f64,
    /// `||h_z||_{L^{4 sigma + 2}}`
    pub l_high: f64,
    pub grad_l2: f64,
}

pub fn hz_norms(sigma: f64, z: f64) -> Result<HzNorms> {
    if !(sigma > 0.0 && z > 0.0 && z < 1.0) {
        return Err(Error::param(
            "z",
            format!("need sigma > 0 and z in (0,1), got ({sigma}, {z})"),
        ));
    }
    let p = 4.0 * sigma + 2.0;
    // h_z is even: twice the half-line integral
    let l2 = 2.0 * integrate_halfline(|x| hz_profile(sigma, z, x).powi(2), DEFAULT_TOL)?.value;
    let lp = 2.0 * integrate_halfline(|x| hz_profile(sigma, z, x).powf(p), DEFAULT_TOL)?.value;
    let g2 = 2.0 * integrate_halfline(|x| hz_derivative(sigma, z, x).powi(2), DEFAULT_TOL)?.value;
    Ok(HzNorms {
        l2: l2.sqrt(),
        l_high: lp.powf(1.0 / p),
        grad_l2: g2.sqrt(),
    })
}

/// Samples of
/// `g_z(x) = (1-z^2)^{1/(2 sigma)} h_z(r x) exp{-i r int_{-inf}^{r x} h_z^{2 sigma}}`,
/// `r = sqrt(1 - z^2)`.
pub fn gz_field(sigma: f64, z: f64, grid: &GridSpec) -> Result<ComplexField> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::param("sigma", format!("{sigma} must be > 0")));
    }
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::param("z", format!("{z} not in (0, 1)")));
    }
    let r = (1.0 - z * z).sqrt();
    let scale = (1.0 - z * z).powf(0.5 / sigma);
    let modulus = |x: f64| scale * hz_profile(sigma, z, r * x);
    let edge = modulus(grid.x_min()).max(modulus(grid.x(grid.n_points() - 1)));
    if edge >= EDGE_DECAY_LIMIT {
        return Err(Error::Unresolved {
            magnitude: edge,
            limit: EDGE_DECAY_LIMIT,
        });
    }
    let scaled: Vec<f64> = grid.points().iter().map(|x| r * x).collect();
    let phase = cumulative_integral(|y| hz_profile(sigma, z, y).powf(2.0 * sigma), &scaled)?;
    let values = grid
        .points()
        .iter()
        .zip(&phase)
        .map(|(&x, &ph)| Complex64::from_polar(modulus(x), -r * ph))
        .collect();
    ComplexField::new(*grid, values)
}

/// Grid resolving `g_z`: the profile decays like `e^{-sqrt(1-z^2) |x|}`.
pub fn gz_grid(sigma: f64, z: f64) -> GridSpec {
    let r = (1.0 - z * z).sqrt();
    let mut length = DEFAULT_BOX;
    while (1.0 - z * z).powf(0.5 / sigma) * hz_profile(sigma, z, 0.5 * r * length)
        >= 0.1 * EDGE_DECAY_LIMIT
    {
        length *= 2.0;
    }
    // profile scale 1/(2 sigma r); keep ~40 points across it
    let h = (1.0 / (2.0 * sigma * r) / 40.0)
        .min(0.05 / r.max(1e-3))
        .min(0.5);
    let n = ((length / h).ceil() as usize)
        .next_power_of_two()
        .max(DEFAULT_POINTS);
    GridSpec::new(n, length).expect("valid grid")
}

/// `e^{-izx} g_z` on the grid, whose `\dot H^{s_c}` norm times
/// `(2(sigma+1))^{1/(2 sigma)}` reproduces `||phi_{1, -2z}||_{\dot H^{s_c}}`.
pub fn modulated_gz(sigma: f64, z: f64, grid: &GridSpec) -> Result<ComplexField> {
    gz_field(sigma, z, grid)?.map(|x, v| v * Complex64::from_polar(1.0, -z * x))
}

/// `A0 = sqrt(2) C4 / c1` with the measured stand-ins
/// `C4 = ||g_z'|| (1-z^2)^{-1/(2 sigma) - 1/4}` and `c1 = min_z ||h_z||`.
pub fn select_a0(sigma: f64, z: f64, grid: &GridSpec, c1: f64) -> Result<f64> {
    let g = gz_field(sigma, z, grid)?;
    let dg = spectral::derivative(&g)?.l2_norm();
    let c4 = dg * (1.0 - z * z).powf(-0.5 / sigma - 0.25);
    Ok(std::f64::consts::SQRT_2 * c4 / c1)
}

/// Fraction of the spectral mass of `f` at `|xi| > cutoff`.
pub fn high_frequency_fraction(f: &ComplexField, cutoff: f64) -> f64 {
    let xi = f.grid().wavenumbers();
    let spec = f.spectrum();
    let total: f64 = spec.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let high: f64 = spec
        .iter()
        .zip(&xi)
        .filter(|(_, x)| x.abs() > cutoff)
        .map(|(v, _)| v.norm_sqr())
        .sum();
    high / total
}

/// One entry of a `\dot H^{s_c}` scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanEntry {
    pub c: f64,
    /// `None` when the profile is not resolved on the grid.
    pub value: Option<f64>,
    pub edge_magnitude: f64,
}

fn check_scan_c(omega: f64, c: f64) -> Result<()> {
    let bound = 2.0 * omega.sqrt() * (1.0 - 1e-4);
    if !(c >= -bound && c <= bound) {
        return Err(Error::param(
            "c_grid",
            format!("{c} outside [-{bound}, {bound}]"),
        ));
    }
    Ok(())
}

/// `||phi_{omega,c}||_{\dot H^{s_c}}` for each `c` on a fixed grid.
/// Entries whose profile does not decay at the box edge are flagged.
pub fn hsc_lower_bound_scan(
    sigma: f64,
    c_grid: &[f64],
    omega: f64,
    grid: &GridSpec,
) -> Result<Vec<ScanEntry>> {
    c_grid
        .iter()
        .map(|&c| {
            check_scan_c(omega, c)?;
            let p = SolitonParams::new(omega, c, sigma)?;
            let edge = amplitude(&p, grid.x_min()).max(amplitude(&p, grid.x(grid.n_points() - 1)));
            let value = match critical_norm(&p, grid) {
                Ok(v) => Some(v),
                Err(Error::Unresolved { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(ScanEntry {
                c,
                value,
                edge_magnitude: edge,
            })
        })
        .collect()
}

/// As [`hsc_lower_bound_scan`] with a [`resolved_grid`] per entry.
pub fn hsc_scan_resolved(sigma: f64, c_grid: &[f64], omega: f64) -> Result<Vec<ScanEntry>> {
    c_grid
        .iter()
        .map(|&c| {
            check_scan_c(omega, c)?;
            let p = SolitonParams::new(omega, c, sigma)?;
            let grid = resolved_grid(&p);
            hsc_lower_bound_scan(sigma, &[c], omega, &grid).map(|v| v[0])
        })
        .collect()
}

/// Norm tracked along the endpoint sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointNorm {
    /// `||phi||_{L^2}` from the closed form.
    L2,
    /// `||phi||_{H^1}` on a resolved grid.
    H1,
    /// `||phi||_{L^{p_c}}^{p_c}` from the closed form.
    PcMass,
    /// `||phi||_{\dot H^{s_c}}` on a resolved grid.
    CriticalHomogeneous,
}

impl EndpointNorm {
    pub fn evaluate(&self, p: &SolitonParams) -> Result<f64> {
        match self {
            EndpointNorm::L2 => l2_mass_closed(p).map(f64::sqrt),
            EndpointNorm::PcMass => pc_mass_closed(p),
            EndpointNorm::H1 => {
                let grid = resolved_grid(p);
                spectral::sobolev_norm(&full_wave(p, &grid)?, 1.0, false)
            }
            EndpointNorm::CriticalHomogeneous => critical_norm(p, &resolved_grid(p)),
        }
    }
}

/// `alpha_j = 2^{-j} sqrt(omega)`, `j = 0..count`.
pub fn endpoint_alphas(omega: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| omega.sqrt() * 0.5f64.powi(j as i32))
        .collect()
}

/// Least-squares fit of `log(norm)` against `log(alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub alphas: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::TooFewPoints {
            needed: 4,
            got: pts.len(),
        });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Slope of `log(norm)` versus `log(alpha)` as `c -> -2 sqrt(omega)`, over the
/// given `alpha` values.
pub fn endpoint_rate_with(
    sigma: f64,
    omega: f64,
    norm: EndpointNorm,
    alphas: &[f64],
) -> Result<RateFit> {
    let values = alphas
        .iter()
        .map(|&a| {
            let p = SolitonParams::from_alpha(omega, a, sigma)?;
            norm.evaluate(&p)
        })
        .collect::<Result<Vec<_>>>()?;
    let (slope, intercept) = loglog_fit(alphas, &values)?;
    Ok(RateFit {
        slope,
        intercept,
        alphas: alphas.to_vec(),
        values,
    })
}

/// [`endpoint_rate_with`] over the default sequence `alpha_j = 2^{-j} sqrt(omega)`, `j = 0..=10`.
pub fn endpoint_rate(sigma: f64, omega: f64, norm: EndpointNorm) -> Result<RateFit> {
    endpoint_rate_with(sigma, omega, norm, &endpoint_alphas(omega, ENDPOINT_STEPS))
}
