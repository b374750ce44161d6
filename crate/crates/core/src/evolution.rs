//! Integrating-factor RK4 pseudo-spectral solver for
//!
//! ```text
//! u_t = i u_xx - N(u),   N(u) = |u|^{2 sigma} u_x   (gDNLS)
//!                        N(u) = (|u|^2 u)_x         (DNLS)
//! ```
//!
//! The linear part is integrated exactly in Fourier space; RK4 acts on the
//! interaction-picture variable. Products are dealiased with the 2/3 rule.

use std::sync::Arc;

use log::warn;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::spectral::{dealias_in_place, ComplexField, GridSpec, Trajectory};
use crate::{Error, Result};

/// Growth of `max|u|` over its initial value beyond which a run is flagged.
pub const LINF_GROWTH_FLAG: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EquationKind {
    Gdnls {
        sigma: f64,
    },
    Dnls,
    /// Nonlinearity switched off: the free Schrödinger flow.
    Linear,
}

impl EquationKind {
    fn validate(&self) -> Result<()> {
        if let EquationKind::Gdnls { sigma } = *self {
            if !(sigma.is_finite() && sigma >= 0.5) {
                return Err(Error::param("sigma", format!("{sigma} must be >= 1/2")));
            }
        }
        Ok(())
    }

    /// Power `p` in the guard `dt * max|u|^p * xi_max <= 1`.
    fn guard_power(&self) -> f64 {
        match *self {
            EquationKind::Gdnls { sigma } => 2.0 * sigma,
            EquationKind::Dnls => 2.0,
            EquationKind::Linear => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub equation: EquationKind,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    pub snapshot_stride: usize,
    pub grid: GridSpec,
}

impl EvolutionConfig {
    /// Dealiased, snapshot after every step.
    pub fn new(equation: EquationKind, grid: GridSpec, dt: f64, t_end: f64) -> Result<Self> {
        let cfg = Self {
            equation,
            dt,
            t_end,
            dealias: true,
            snapshot_stride: 1,
            grid,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_stride(mut self, stride: usize) -> Result<Self> {
        self.snapshot_stride = stride;
        self.validate()?;
        Ok(self)
    }

    pub fn with_dealias(mut self, dealias: bool) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.equation.validate()?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param("dt", format!("{} must be > 0", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::param("t_end", format!("{} must be > 0", self.t_end)));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::param(
                "snapshot_stride",
                "must be a positive integer",
            ));
        }
        Ok(())
    }

    /// Number of steps and the step actually used: `dt` is shrunk when
    /// needed so that an integer number of steps lands exactly on `t_end`.
    pub fn step_count(&self) -> (usize, f64) {
        let ratio = self.t_end / self.dt;
        let rounded = ratio.round();
        let steps = if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
            rounded
        } else {
            ratio.ceil()
        }
        .max(1.0) as usize;
        (steps, self.t_end / steps as f64)
    }
}

/// Mass and candidate energy sampled at the snapshot times.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservedReport {
    pub times: Vec<f64>,
    /// `||u||_{L^2}^2`
    pub mass: Vec<f64>,
    /// `1/2 ||u_x||^2 - Im int |u|^{2 sigma} conj(u) u_x / (2 sigma + 2)`; the
    /// free energy `1/2 ||u_x||^2` for the linear flow; absent for DNLS.
    pub energy: Option<Vec<f64>>,
    pub linf: Vec<f64>,
    /// `max|u|` exceeded [`LINF_GROWTH_FLAG`] times its initial value.
    pub linf_growth_flagged: bool,
    pub steps: usize,
    pub dt: f64,
}

impl ConservedReport {
    /// `max_t |M(t) - M(0)| / M(0)`, zero for the zero datum.
    pub fn mass_drift(&self) -> f64 {
        relative_drift(&self.mass, self.mass[0])
    }

    /// `max_t |E(t) - E(0)|` relative to the kinetic part of `E(0)`.
    pub fn energy_drift(&self, reference: f64) -> Option<f64> {
        self.energy.as_ref().map(|e| relative_drift(e, reference))
    }
}

fn relative_drift(values: &[f64], reference: f64) -> f64 {
    let base = values[0];
    let worst = values.iter().map(|v| (v - base).abs()).fold(0.0, f64::max);
    if reference.abs() == 0.0 {
        worst
    } else {
        worst / reference.abs()
    }
}

/// `||u||_{L^2}^2` by the rectangle rule (exact for trigonometric polynomials).
pub fn mass(u: &ComplexField) -> f64 {
    u.l2_norm().powi(2)
}

/// Candidate energy `1/2 ||u_x||^2 - (1/(2 sigma + 2)) Im int |u|^{2 sigma} conj(u) u_x`.
pub fn energy(u: &ComplexField, sigma: f64) -> Result<f64> {
    let ux = crate::spectral::derivative(u)?;
    let h = u.grid().spacing();
    let kinetic = 0.5 * ux.l2_norm().powi(2);
    let coupling: f64 = u
        .values()
        .iter()
        .zip(ux.values())
        .map(|(v, d)| v.norm_sqr().powf(sigma) * (v.conj() * d).im)
        .sum::<f64>()
        * h;
    Ok(kinetic - coupling / (2.0 * sigma + 2.0))
}

fn check_finite(u: &ComplexField) -> Result<()> {
    if u.values()
        .iter()
        .all(|v| v.re.is_finite() && v.im.is_finite())
    {
        Ok(())
    } else {
        Err(Error::NonFinite("field samples"))
    }
}

/// `N(u) = |u|^{2 sigma} u_x`, spectral derivative, product dealiased by the 2/3 rule.
pub fn nonlinearity(u: &ComplexField, sigma: f64) -> Result<ComplexField> {
    nonlinearity_with(u, sigma, true)
}

pub fn nonlinearity_with(u: &ComplexField, sigma: f64, dealias: bool) -> Result<ComplexField> {
    EquationKind::Gdnls { sigma }.validate()?;
    check_finite(u)?;
    let mut kernel = Kernel::new(*u.grid(), EquationKind::Gdnls { sigma }, dealias);
    let mut out = u.spectrum();
    kernel.rhs_spectrum(&mut out);
    for v in out.iter_mut() {
        *v = -*v;
    }
    ComplexField::from_spectrum(*u.grid(), out)
}

/// `(|u|^2 u)_x`, dealiased cubic product then spectral derivative.
pub fn dnls_nonlinearity(u: &ComplexField) -> Result<ComplexField> {
    check_finite(u)?;
    let mut kernel = Kernel::new(*u.grid(), EquationKind::Dnls, true);
    let mut out = u.spectrum();
    kernel.rhs_spectrum(&mut out);
    for v in out.iter_mut() {
        *v = -*v;
    }
    ComplexField::from_spectrum(*u.grid(), out)
}

/// Evaluates `-N^` from `u^` with cached FFT plans and buffers.
struct Kernel {
    grid: GridSpec,
    equation: EquationKind,
    dealias: bool,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    /// `i xi` with the Nyquist mode zeroed
    grad: Vec<Complex64>,
    phys: Vec<Complex64>,
    deriv: Vec<Complex64>,
    /// `max|u|` seen by the last evaluation
    last_max: f64,
}

impl Kernel {
    fn new(grid: GridSpec, equation: EquationKind, dealias: bool) -> Self {
        let n = grid.n_points();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        let nyq = grid.nyquist_index();
        let grad = grid
            .wavenumbers()
            .iter()
            .enumerate()
            .map(|(k, &xi)| {
                if k == nyq {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, xi)
                }
            })
            .collect();
        let zero = Complex64::new(0.0, 0.0);
        Self {
            grid,
            equation,
            dealias,
            fwd,
            inv,
            scratch: vec![zero; len],
            grad,
            phys: vec![zero; n],
            deriv: vec![zero; n],
            last_max: 0.0,
        }
    }

    fn inverse(&mut self, buf: &mut [Complex64]) {
        self.inv.process_with_scratch(buf, &mut self.scratch);
        let scale = 1.0 / buf.len() as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    /// Replace `spec` (holding `u^`) with `-N^(u)`.
    fn rhs_spectrum(&mut self, spec: &mut [Complex64]) {
        let zero = Complex64::new(0.0, 0.0);
        match self.equation {
            EquationKind::Linear => {
                self.last_max = 0.0;
                spec.iter_mut().for_each(|v| *v = zero);
            }
            EquationKind::Gdnls { sigma } => {
                let mut phys = std::mem::take(&mut self.phys);
                let mut deriv = std::mem::take(&mut self.deriv);
                phys.copy_from_slice(spec);
                for ((d, s), g) in deriv.iter_mut().zip(spec.iter()).zip(&self.grad) {
                    *d = s * g;
                }
                self.inverse(&mut phys);
                self.inverse(&mut deriv);
                let mut peak = 0.0f64;
                for (s, (u, ux)) in spec.iter_mut().zip(phys.iter().zip(&deriv)) {
                    let m2 = u.norm_sqr();
                    peak = peak.max(m2);
                    let w = if sigma == 1.0 { m2 } else { m2.powf(sigma) };
                    *s = -(ux * w);
                }
                self.last_max = peak.sqrt();
                self.fwd.process_with_scratch(spec, &mut self.scratch);
                if self.dealias {
                    dealias_in_place(spec, &self.grid);
                }
                self.phys = phys;
                self.deriv = deriv;
            }
            EquationKind::Dnls => {
                let mut phys = std::mem::take(&mut self.phys);
                phys.copy_from_slice(spec);
                self.inverse(&mut phys);
                let mut peak = 0.0f64;
                for (s, u) in spec.iter_mut().zip(&phys) {
                    let m2 = u.norm_sqr();
                    peak = peak.max(m2);
                    *s = u * m2;
                }
                self.last_max = peak.sqrt();
                self.fwd.process_with_scratch(spec, &mut self.scratch);
                if self.dealias {
                    dealias_in_place(spec, &self.grid);
                }
                for (s, g) in spec.iter_mut().zip(&self.grad) {
                    *s = -(*s * g);
                }
                self.phys = phys;
            }
        }
    }
}

/// Reusable IFRK4 stepper for a fixed grid, equation and (signed) step.
pub struct Stepper {
    kernel: Kernel,
    dt: f64,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl Stepper {
    /// `dt` may be negative to integrate backward in time.
    pub fn new(grid: GridSpec, equation: EquationKind, dealias: bool, dt: f64) -> Result<Self> {
        equation.validate()?;
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::param(
                "dt",
                format!("{dt} must be finite and non-zero"),
            ));
        }
        let xi = grid.wavenumbers();
        let half = xi
            .iter()
            .map(|x| Complex64::from_polar(1.0, -x * x * 0.5 * dt))
            .collect();
        let full = xi
            .iter()
            .map(|x| Complex64::from_polar(1.0, -x * x * dt))
            .collect();
        let n = grid.n_points();
        let zero = vec![Complex64::new(0.0, 0.0); n];
        Ok(Self {
            kernel: Kernel::new(grid, equation, dealias),
            dt,
            half,
            full,
            k: [zero.clone(), zero.clone(), zero.clone(), zero.clone()],
            tmp: zero,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advance the spectrum `u^` by one step. `time` is used for diagnostics only.
    pub fn step_spectrum(&mut self, spec: &mut [Complex64], time: f64) -> Result<()> {
        let h = self.dt;
        let [k1, k2, k3, k4] = &mut self.k;

        k1.copy_from_slice(spec);
        self.kernel.rhs_spectrum(k1);
        // the guard uses max|u| at the start of the step
        let p = self.kernel.equation.guard_power();
        if p > 0.0 {
            let value = h.abs() * self.kernel.last_max.powf(p) * self.kernel.grid.xi_max();
            if value > 1.0 {
                return Err(Error::Cfl { time, value });
            }
        }

        for i in 0..spec.len() {
            k2[i] = self.half[i] * (spec[i] + 0.5 * h * k1[i]);
        }
        self.kernel.rhs_spectrum(k2);

        for i in 0..spec.len() {
            k3[i] = self.half[i] * spec[i] + 0.5 * h * k2[i];
        }
        self.kernel.rhs_spectrum(k3);

        for i in 0..spec.len() {
            k4[i] = self.full[i] * spec[i] + h * self.half[i] * k3[i];
        }
        self.kernel.rhs_spectrum(k4);

        let tmp = &mut self.tmp;
        for i in 0..spec.len() {
            tmp[i] = self.full[i] * spec[i]
                + h / 6.0 * (self.full[i] * k1[i] + 2.0 * self.half[i] * (k2[i] + k3[i]) + k4[i]);
        }
        if tmp.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("time step"));
        }
        spec.copy_from_slice(tmp);
        Ok(())
    }

    /// One step on a physical-space field.
    pub fn step(&mut self, u: &ComplexField) -> Result<ComplexField> {
        let mut spec = u.spectrum();
        self.step_spectrum(&mut spec, 0.0)?;
        ComplexField::from_spectrum(*u.grid(), spec)
    }
}

fn check_grid(u: &ComplexField, cfg: &EvolutionConfig) -> Result<()> {
    if *u.grid() != cfg.grid {
        return Err(Error::InvalidGrid(
            "datum grid differs from the configured grid".into(),
        ));
    }
    Ok(())
}

/// One IFRK4 step of size `cfg.dt`.
pub fn step(u: &ComplexField, cfg: &EvolutionConfig) -> Result<ComplexField> {
    cfg.validate()?;
    check_grid(u, cfg)?;
    Stepper::new(cfg.grid, cfg.equation, cfg.dealias, cfg.dt)?.step(u)
}

/// Integrate to `cfg.t_end`, keeping every `snapshot_stride`-th state and the final one.
pub fn evolve(u0: &ComplexField, cfg: &EvolutionConfig) -> Result<(Trajectory, ConservedReport)> {
    run(u0, cfg, 1.0)
}

/// Integrate backward from `u0` over `[0, cfg.t_end]`; returned times are
/// elapsed (positive) times, the state at index `j` approximating `u(-t_j)`.
pub fn evolve_backward(
    u0: &ComplexField,
    cfg: &EvolutionConfig,
) -> Result<(Trajectory, ConservedReport)> {
    run(u0, cfg, -1.0)
}

fn run(
    u0: &ComplexField,
    cfg: &EvolutionConfig,
    direction: f64,
) -> Result<(Trajectory, ConservedReport)> {
    cfg.validate()?;
    check_grid(u0, cfg)?;
    check_finite(u0)?;
    let (steps, dt) = cfg.step_count();
    let mut stepper = Stepper::new(cfg.grid, cfg.equation, cfg.dealias, direction * dt)?;
    let energy_sigma = match cfg.equation {
        EquationKind::Gdnls { sigma } => Some(sigma),
        EquationKind::Linear => Some(0.0),
        EquationKind::Dnls => None,
    };

    let mut times = vec![0.0];
    let mut snaps = vec![u0.clone()];
    let mut masses = vec![mass(u0)];
    let mut energies = Vec::new();
    let eval_energy = |u: &ComplexField| -> Result<f64> {
        match energy_sigma {
            // free energy: the coupling term is dropped
            Some(s) if s == 0.0 => Ok(0.5 * crate::spectral::derivative(u)?.l2_norm().powi(2)),
            Some(s) => energy(u, s),
            None => Ok(0.0),
        }
    };
    if energy_sigma.is_some() {
        energies.push(eval_energy(u0)?);
    }
    let linf0 = u0.max_abs();
    let mut linf = vec![linf0];
    let mut flagged = false;

    let mut spec = u0.spectrum();
    for i in 1..=steps {
        let t_prev = (i - 1) as f64 * dt;
        if let Err(e) = stepper.step_spectrum(&mut spec, direction * t_prev) {
            return Err(match e {
                Error::NonFinite(_) => Error::NonFiniteState {
                    time: t_prev,
                    last_good: Box::new(
                        ComplexField::from_spectrum(cfg.grid, spec.clone())
                            .unwrap_or_else(|_| snaps.last().cloned().expect("initial snapshot")),
                    ),
                },
                other => other,
            });
        }
        if i % cfg.snapshot_stride == 0 || i == steps {
            let u = ComplexField::from_spectrum(cfg.grid, spec.clone())?;
            let t = i as f64 * dt;
            masses.push(mass(&u));
            if energy_sigma.is_some() {
                energies.push(eval_energy(&u)?);
            }
            let m = u.max_abs();
            if linf0 > 0.0 && m > LINF_GROWTH_FLAG * linf0 && !flagged {
                warn!("max|u| grew from {linf0:e} to {m:e} by t = {t}");
                flagged = true;
            }
            linf.push(m);
            times.push(t);
            snaps.push(u);
        }
    }
    let report = ConservedReport {
        times: times.clone(),
        mass: masses,
        energy: energy_sigma.map(|_| energies),
        linf,
        linf_growth_flagged: flagged,
        steps,
        dt,
    };
    Ok((Trajectory::new(times, snaps)?, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::free_propagate;

    fn grid() -> GridSpec {
        GridSpec::new(256, 40.0).unwrap()
    }

    fn gaussian(g: GridSpec, amp: f64) -> ComplexField {
        ComplexField::from_fn(g, |x| Complex64::from_polar(amp * (-x * x).exp(), 0.3 * x)).unwrap()
    }

    #[test]
    fn zero_nonlinearity() {
        let z = ComplexField::zeros(grid());
        assert_eq!(nonlinearity(&z, 2.0).unwrap().max_abs(), 0.0);
        assert_eq!(dnls_nonlinearity(&z).unwrap().max_abs(), 0.0);
        let c = ComplexField::from_fn(grid(), |_| Complex64::new(0.7, 0.0)).unwrap();
        assert!(nonlinearity(&c, 1.5).unwrap().max_abs() < 1e-15);
        assert!(nonlinearity(&c, 0.4).is_err());
    }

    #[test]
    fn dnls_single_mode() {
        let g = grid();
        let k = 3.0 * g.fundamental();
        let eps = 0.2;
        let u = ComplexField::from_fn(g, |x| Complex64::from_polar(eps, k * x)).unwrap();
        let n = dnls_nonlinearity(&u).unwrap();
        for (j, v) in n.values().iter().enumerate() {
            let expect = Complex64::new(0.0, k) * Complex64::from_polar(eps.powi(3), k * g.x(j));
            assert!((v - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn linear_step_is_free_flow() {
        let g = grid();
        let u = gaussian(g, 1.0);
        let cfg = EvolutionConfig::new(EquationKind::Linear, g, 0.01, 0.01).unwrap();
        let stepped = step(&u, &cfg).unwrap();
        let exact = free_propagate(&u, 0.01).unwrap();
        assert!(stepped.l2_distance(&exact) < 1e-13);
    }

    #[test]
    fn zero_datum_stays_zero() {
        let g = grid();
        let cfg = EvolutionConfig::new(EquationKind::Gdnls { sigma: 2.0 }, g, 0.01, 0.1).unwrap();
        let (traj, rep) = evolve(&ComplexField::zeros(g), &cfg).unwrap();
        assert_eq!(traj.len(), 11);
        assert!(traj.snapshots().iter().all(|s| s.max_abs() == 0.0));
        assert_eq!(rep.mass_drift(), 0.0);
    }

    #[test]
    fn config_validation() {
        let g = grid();
        assert!(EvolutionConfig::new(EquationKind::Dnls, g, 0.0, 1.0).is_err());
        assert!(EvolutionConfig::new(EquationKind::Dnls, g, 0.1, -1.0).is_err());
        assert!(EvolutionConfig::new(EquationKind::Gdnls { sigma: 0.3 }, g, 0.1, 1.0).is_err());
        let cfg = EvolutionConfig::new(EquationKind::Dnls, g, 0.1, 1.0).unwrap();
        assert!(cfg.with_stride(0).is_err());
        assert_eq!(cfg.step_count().0, 10);
        let odd = EvolutionConfig::new(EquationKind::Dnls, g, 0.3, 1.0).unwrap();
        let (n, dt) = odd.step_count();
        assert_eq!(n, 4);
        assert!((dt - 0.25).abs() < 1e-15);
    }

    #[test]
    fn cfl_guard_trips() {
        let g = grid();
        let u = gaussian(g, 3.0);
        let cfg = EvolutionConfig::new(EquationKind::Gdnls { sigma: 2.0 }, g, 0.1, 1.0).unwrap();
        assert!(matches!(evolve(&u, &cfg), Err(Error::Cfl { .. })));
    }

    #[test]
    fn snapshots_follow_stride() {
        let g = grid();
        let u = gaussian(g, 0.1);
        let cfg = EvolutionConfig::new(EquationKind::Dnls, g, 0.01, 0.25)
            .unwrap()
            .with_stride(10)
            .unwrap();
        let (traj, rep) = evolve(&u, &cfg).unwrap();
        let t = traj.times();
        assert_eq!(t.len(), 4);
        assert!((t[1] - 0.1).abs() < 1e-14 && (t[3] - 0.25).abs() < 1e-14);
        assert_eq!(rep.mass.len(), 4);
        assert!(rep.energy.is_none());
    }
}
