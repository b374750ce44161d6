//! The seven-term working-space norm `||u||_{X_T}` used to track
//! small-data global solutions:
//!
//! ```text
//!   ||u||_{L^inf_t H^s_x} + ||u_x||_{L^inf_x L^2_t} + sup_q ||u||_{L^q_x L^inf_t}
//! + ||u||_{L^4_t L^inf_x} + ||D^{s-1/2} u||_{L^4_x L^inf_t}
//! + ||D^{s-1/2} u_x||_{L^inf_x L^2_t} + ||D^{s-1/2} u||_{L^4_t L^inf_x}
//! ```
//!
//! The supremum over `q in [4, N0]` is taken over a finite grid of exponents.

use rustfft::num_complex::Complex64;

use super::mixed::{mixed_norm, MixedNormSpec};
use super::ops::{spectral_sobolev_sum, symbol};
use super::{fourier, GridSpec, Trajectory};
use crate::{ComplexField, Error, Result};

pub const DEFAULT_Q_GRID: [f64; 5] = [4.0, 6.0, 8.0, 12.0, 16.0];
pub const DEFAULT_N0: f64 = 16.0;

/// Individual terms of the working-space norm, in the order listed above.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct XtTerms {
    pub sup_sobolev: f64,
    pub gradient_smoothing: f64,
    pub maximal: f64,
    pub strichartz: f64,
    pub fractional_maximal: f64,
    pub fractional_gradient_smoothing: f64,
    pub fractional_strichartz: f64,
}

impl XtTerms {
    pub fn as_array(&self) -> [f64; 7] {
        [
            self.sup_sobolev,
            self.gradient_smoothing,
            self.maximal,
            self.strichartz,
            self.fractional_maximal,
            self.fractional_gradient_smoothing,
            self.fractional_strichartz,
        ]
    }

    pub fn total(&self) -> f64 {
        self.as_array().iter().sum()
    }
}

fn validate(s: f64, q_grid: &[f64], n0: f64) -> Result<()> {
    if !(0.5..=1.0).contains(&s) {
        return Err(Error::param("s", format!("{s} not in [1/2, 1]")));
    }
    if !(n0.is_finite() && n0 >= 4.0) {
        return Err(Error::param("n0", format!("{n0} must be finite and >= 4")));
    }
    if q_grid.is_empty() {
        return Err(Error::param("q_grid", "empty"));
    }
    if let Some(q) = q_grid.iter().find(|q| !(**q >= 4.0 && **q <= n0)) {
        return Err(Error::param("q_grid", format!("{q} not in [4, {n0}]")));
    }
    Ok(())
}

/// The seven terms, each evaluated through [`mixed_norm`].
pub fn xt_terms(traj: &Trajectory, s: f64, q_grid: &[f64], n0: f64) -> Result<XtTerms> {
    validate(s, q_grid, n0)?;
    let inf = f64::INFINITY;
    let frac = s - 0.5;
    let maximal = q_grid
        .iter()
        .map(|&q| mixed_norm(traj, &MixedNormSpec::space_time(q, inf)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(XtTerms {
        sup_sobolev: mixed_norm(
            traj,
            &MixedNormSpec::time_space(inf, 2.0).with_derivative(s, false),
        )?,
        gradient_smoothing: mixed_norm(traj, &MixedNormSpec::space_time(inf, 2.0).with_gradient())?,
        maximal,
        strichartz: mixed_norm(traj, &MixedNormSpec::time_space(4.0, inf))?,
        fractional_maximal: mixed_norm(
            traj,
            &MixedNormSpec::space_time(4.0, inf).with_derivative(frac, true),
        )?,
        fractional_gradient_smoothing: mixed_norm(
            traj,
            &MixedNormSpec::space_time(inf, 2.0)
                .with_derivative(frac, true)
                .with_gradient(),
        )?,
        fractional_strichartz: mixed_norm(
            traj,
            &MixedNormSpec::time_space(4.0, inf).with_derivative(frac, true),
        )?,
    })
}

/// `||u||_{X_T}` with `T` the final time of `traj`.
pub fn xt_norm(traj: &Trajectory, s: f64, q_grid: &[f64], n0: f64) -> Result<f64> {
    xt_terms(traj, s, q_grid, n0).map(|t| t.total())
}

/// Streaming evaluation of the working-space terms on growing time prefixes.
///
/// Every term is a running maximum or a running sum of non-negative
/// increments, so the reported values are nondecreasing in `T` exactly.
#[derive(Debug, Clone)]
pub struct XtAccumulator {
    grid: GridSpec,
    xi: Vec<f64>,
    s: f64,
    q_grid: Vec<f64>,
    last_time: Option<f64>,
    sup_sobolev: f64,
    // per-point running quantities
    grad_l2t: Vec<f64>,
    frac_grad_l2t: Vec<f64>,
    u_max_t: Vec<f64>,
    frac_max_t: Vec<f64>,
    // previous snapshot integrands for the trapezoid rule
    prev_grad_sq: Vec<f64>,
    prev_frac_grad_sq: Vec<f64>,
    prev_u_inf4: f64,
    prev_frac_inf4: f64,
    strichartz4: f64,
    frac_strichartz4: f64,
}

impl XtAccumulator {
    pub fn new(grid: GridSpec, s: f64, q_grid: &[f64], n0: f64) -> Result<Self> {
        validate(s, q_grid, n0)?;
        let n = grid.n_points();
        Ok(Self {
            grid,
            xi: grid.wavenumbers(),
            s,
            q_grid: q_grid.to_vec(),
            last_time: None,
            sup_sobolev: 0.0,
            grad_l2t: vec![0.0; n],
            frac_grad_l2t: vec![0.0; n],
            u_max_t: vec![0.0; n],
            frac_max_t: vec![0.0; n],
            prev_grad_sq: vec![0.0; n],
            prev_frac_grad_sq: vec![0.0; n],
            prev_u_inf4: 0.0,
            prev_frac_inf4: 0.0,
            strichartz4: 0.0,
            frac_strichartz4: 0.0,
        })
    }

    fn transformed_moduli(&self, spec: &[Complex64], order: f64, gradient: bool) -> Vec<f64> {
        let nyq = self.grid.nyquist_index();
        let mut data: Vec<Complex64> = spec
            .iter()
            .enumerate()
            .map(|(k, v)| v * symbol(self.xi[k], order, true, gradient, k == nyq))
            .collect();
        fourier::inverse_in_place(&mut data);
        data.iter().map(|v| v.norm()).collect()
    }

    /// Add the snapshot at time `t` (times must increase).
    pub fn push(&mut self, t: f64, field: &ComplexField) -> Result<()> {
        if *field.grid() != self.grid {
            return Err(Error::param("field", "grid mismatch"));
        }
        if let Some(prev) = self.last_time {
            if !(t > prev) {
                return Err(Error::param("t", format!("{t} does not follow {prev}")));
            }
        }
        let spec = field.spectrum();
        let frac = self.s - 0.5;
        let hs = spectral_sobolev_sum(&self.grid, &self.xi, &spec, self.s, false).sqrt();
        self.sup_sobolev = self.sup_sobolev.max(hs);

        let u_abs: Vec<f64> = field.values().iter().map(|v| v.norm()).collect();
        let grad = self.transformed_moduli(&spec, 0.0, true);
        let (frac_abs, frac_grad) = if frac == 0.0 {
            (u_abs.clone(), grad.clone())
        } else {
            (
                self.transformed_moduli(&spec, frac, false),
                self.transformed_moduli(&spec, frac, true),
            )
        };

        let u_inf4 = u_abs.iter().fold(0.0f64, |m, &v| m.max(v)).powi(4);
        let frac_inf4 = frac_abs.iter().fold(0.0f64, |m, &v| m.max(v)).powi(4);
        let grad_sq: Vec<f64> = grad.iter().map(|v| v * v).collect();
        let frac_grad_sq: Vec<f64> = frac_grad.iter().map(|v| v * v).collect();

        if let Some(prev) = self.last_time {
            let half = 0.5 * (t - prev);
            for j in 0..grad_sq.len() {
                self.grad_l2t[j] += half * (self.prev_grad_sq[j] + grad_sq[j]);
                self.frac_grad_l2t[j] += half * (self.prev_frac_grad_sq[j] + frac_grad_sq[j]);
            }
            self.strichartz4 += half * (self.prev_u_inf4 + u_inf4);
            self.frac_strichartz4 += half * (self.prev_frac_inf4 + frac_inf4);
        }
        for j in 0..u_abs.len() {
            self.u_max_t[j] = self.u_max_t[j].max(u_abs[j]);
            self.frac_max_t[j] = self.frac_max_t[j].max(frac_abs[j]);
        }
        self.prev_grad_sq = grad_sq;
        self.prev_frac_grad_sq = frac_grad_sq;
        self.prev_u_inf4 = u_inf4;
        self.prev_frac_inf4 = frac_inf4;
        self.last_time = Some(t);
        Ok(())
    }

    pub fn terms(&self) -> XtTerms {
        let h = self.grid.spacing();
        let lq = |v: &[f64], q: f64| (h * v.iter().map(|x| x.powf(q)).sum::<f64>()).powf(1.0 / q);
        let max_sqrt = |v: &[f64]| v.iter().fold(0.0f64, |m, &x| m.max(x)).sqrt();
        XtTerms {
            sup_sobolev: self.sup_sobolev,
            gradient_smoothing: max_sqrt(&self.grad_l2t),
            maximal: self
                .q_grid
                .iter()
                .map(|&q| lq(&self.u_max_t, q))
                .fold(0.0, f64::max),
            strichartz: self.strichartz4.powf(0.25),
            fractional_maximal: lq(&self.frac_max_t, 4.0),
            fractional_gradient_smoothing: max_sqrt(&self.frac_grad_l2t),
            fractional_strichartz: self.frac_strichartz4.powf(0.25),
        }
    }
}

/// `(T_j, ||u||_{X_{T_j}})` for every snapshot after the first.
pub fn xt_prefix_curve(
    traj: &Trajectory,
    s: f64,
    q_grid: &[f64],
    n0: f64,
) -> Result<Vec<(f64, f64)>> {
    let mut acc = XtAccumulator::new(*traj.grid(), s, q_grid, n0)?;
    let mut out = Vec::with_capacity(traj.len().saturating_sub(1));
    for (i, (&t, f)) in traj.times().iter().zip(traj.snapshots()).enumerate() {
        acc.push(t, f)?;
        if i > 0 {
            out.push((t, acc.terms().total()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::free_propagate;

    fn free_traj(delta: f64, t_end: f64, steps: usize) -> Trajectory {
        let g = GridSpec::new(512, 80.0).unwrap();
        let f = ComplexField::from_real_fn(g, |x| delta * (-x * x).exp()).unwrap();
        Trajectory::sample(Trajectory::uniform_times(t_end, steps), |t| {
            free_propagate(&f, t)
        })
        .unwrap()
    }

    #[test]
    fn zero_trajectory_has_zero_norm() {
        let g = GridSpec::new(64, 10.0).unwrap();
        let traj = Trajectory::sample(Trajectory::uniform_times(1.0, 4), |_| {
            Ok(ComplexField::zeros(g))
        })
        .unwrap();
        assert_eq!(
            xt_norm(&traj, 0.5, &DEFAULT_Q_GRID, DEFAULT_N0).unwrap(),
            0.0
        );
    }

    #[test]
    fn validation() {
        let traj = free_traj(0.1, 0.5, 5);
        assert!(xt_norm(&traj, 0.4, &DEFAULT_Q_GRID, 16.0).is_err());
        assert!(xt_norm(&traj, 1.1, &DEFAULT_Q_GRID, 16.0).is_err());
        assert!(xt_norm(&traj, 0.5, &[2.0], 16.0).is_err());
        assert!(xt_norm(&traj, 0.5, &[20.0], 16.0).is_err());
        assert!(xt_norm(&traj, 0.5, &[], 16.0).is_err());
    }

    #[test]
    fn half_regularity_collapses_fractional_terms() {
        let traj = free_traj(0.1, 1.0, 20);
        let t = xt_terms(&traj, 0.5, &DEFAULT_Q_GRID, DEFAULT_N0).unwrap();
        assert_eq!(t.fractional_gradient_smoothing, t.gradient_smoothing);
        assert_eq!(t.fractional_strichartz, t.strichartz);
        let l4 = mixed_norm(&traj, &MixedNormSpec::space_time(4.0, f64::INFINITY)).unwrap();
        assert_eq!(t.fractional_maximal, l4);
        assert!(t.maximal >= l4);
    }

    #[test]
    fn accumulator_agrees_with_mixed_norm_route() {
        let traj = free_traj(0.1, 1.0, 20);
        for s in [0.5, 0.75, 1.0] {
            let direct = xt_terms(&traj, s, &DEFAULT_Q_GRID, DEFAULT_N0).unwrap();
            let mut acc = XtAccumulator::new(*traj.grid(), s, &DEFAULT_Q_GRID, DEFAULT_N0).unwrap();
            for (&t, f) in traj.times().iter().zip(traj.snapshots()) {
                acc.push(t, f).unwrap();
            }
            let streamed = acc.terms();
            for (a, b) in direct.as_array().iter().zip(streamed.as_array()) {
                assert!((a - b).abs() <= 1e-12 * a.max(1e-300), "s={s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn prefix_curve_monotone() {
        let traj = free_traj(0.1, 2.0, 40);
        let curve = xt_prefix_curve(&traj, 0.5, &DEFAULT_Q_GRID, DEFAULT_N0).unwrap();
        assert_eq!(curve.len(), 40);
        assert!(curve.windows(2).all(|w| w[1].1 >= w[0].1));
    }
}
