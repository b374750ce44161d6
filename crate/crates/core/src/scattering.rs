//! Scattering diagnostics on computed trajectories: the pull-back
//! `w(t) = e^{-it d_xx} u(t)`, the truncated Duhamel profile `u_+`,
//! `L^inf` decay and the working-space norm on growing time prefixes.

use rustfft::num_complex::Complex64;

use crate::evolution::{dnls_nonlinearity, nonlinearity, EquationKind};
use crate::soliton::loglog_fit;
use crate::spectral::{
    free_propagate, sobolev_norm, trapezoid_weights, xt_prefix_curve, ComplexField, Trajectory,
    DEFAULT_N0, DEFAULT_Q_GRID,
};
use crate::{Error, Result};

/// Largest snapshot spacing accepted by [`uplus_truncated`].
pub const MAX_DUHAMEL_SPACING: f64 = 0.02;

/// Default `s'` used for pull-back differences when `s = 1/2`.
pub const DEFAULT_S_PRIME: f64 = 0.4;

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterReport {
    /// `(t1, t2, ||w(t2) - w(t1)||_{H^{s'}})`
    pub pullback_cauchy: Vec<(f64, f64, f64)>,
    /// `(t, ||u(t)||_{L^inf})`
    pub decay_curve: Vec<(f64, f64)>,
    /// `(T, ||u||_{X_T})`
    pub xt_norm_curve: Vec<(f64, f64)>,
    /// `||u(t_end) - e^{i t_end d_xx} u_+||_{L^2}`
    pub uplus_residual: f64,
    /// Log-log slope of the decay curve over `[t_end/4, t_end]`, when it has enough points.
    pub decay_exponent: Option<f64>,
}

/// `w(t) = e^{-it d_xx} u(t)` for every snapshot.
pub fn pullback(traj: &Trajectory) -> Result<Trajectory> {
    traj.map(|t, u| free_propagate(u, -t))
}

/// `[(t0, 2 t0), (2 t0, 4 t0), ...]` up to `t_end`.
pub fn dyadic_windows(t0: f64, t_end: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut a = t0;
    while 2.0 * a <= t_end * (1.0 + 1e-12) {
        out.push((a, 2.0 * a));
        a *= 2.0;
    }
    out
}

fn snapshot_at(traj: &Trajectory, t: f64) -> Result<usize> {
    let i = traj.nearest_index(t);
    let tol = 1e-9 * traj.final_time().max(1.0);
    if (traj.times()[i] - t).abs() > tol {
        return Err(Error::param(
            "window",
            format!("no snapshot at t = {t} (nearest {})", traj.times()[i]),
        ));
    }
    Ok(i)
}

/// `||w(t2) - w(t1)||_{H^{s'}}` for each window; window ends must be snapshot times.
pub fn pullback_cauchy(
    traj: &Trajectory,
    windows: &[(f64, f64)],
    s_prime: f64,
) -> Result<Vec<(f64, f64, f64)>> {
    windows
        .iter()
        .map(|&(t1, t2)| {
            let u1 = &traj.snapshots()[snapshot_at(traj, t1)?];
            let u2 = &traj.snapshots()[snapshot_at(traj, t2)?];
            let w1 = free_propagate(u1, -t1)?;
            let w2 = free_propagate(u2, -t2)?;
            Ok((t1, t2, sobolev_norm(&w2.sub(&w1), s_prime, false)?))
        })
        .collect()
}

fn equation_nonlinearity(u: &ComplexField, equation: EquationKind) -> Result<Option<ComplexField>> {
    match equation {
        EquationKind::Linear => Ok(None),
        EquationKind::Gdnls { sigma } => nonlinearity(u, sigma).map(Some),
        EquationKind::Dnls => dnls_nonlinearity(u).map(Some),
    }
}

/// `u_+ = u(0) - int_0^{t_end} e^{-it' d_xx} N(u(t')) dt'` by the trapezoid rule
/// over the snapshots.
pub fn uplus_truncated(traj: &Trajectory, equation: EquationKind) -> Result<ComplexField> {
    let spacing = traj.max_spacing();
    if spacing > MAX_DUHAMEL_SPACING * (1.0 + 1e-9) {
        return Err(Error::TooSparse {
            spacing,
            limit: MAX_DUHAMEL_SPACING,
        });
    }
    if equation == EquationKind::Linear {
        return Ok(traj.snapshots()[0].clone());
    }
    let fields = traj
        .snapshots()
        .iter()
        .map(|u| equation_nonlinearity(u, equation).map(|n| n.expect("nonlinear equation")))
        .collect::<Result<Vec<_>>>()?;
    let integral = duhamel_integral(traj.times(), &fields)?;
    Ok(traj.snapshots()[0].sub(&integral))
}

/// `int_0^{t_m} e^{-it' d_xx} F(t') dt'` by the trapezoid rule over samples `F(t_j)`.
pub fn duhamel_integral(times: &[f64], fields: &[ComplexField]) -> Result<ComplexField> {
    if times.is_empty() || times.len() != fields.len() {
        return Err(Error::param(
            "fields",
            format!("{} samples for {} times", fields.len(), times.len()),
        ));
    }
    let grid = *fields[0].grid();
    let xi = grid.wavenumbers();
    let weights = trapezoid_weights(times);
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.n_points()];
    for ((&t, w), f) in times.iter().zip(weights).zip(fields) {
        if *f.grid() != grid {
            return Err(Error::InvalidGrid(
                "Duhamel samples on different grids".into(),
            ));
        }
        for ((a, v), x) in acc.iter_mut().zip(f.spectrum()).zip(&xi) {
            *a += w * v * Complex64::from_polar(1.0, x * x * t);
        }
    }
    ComplexField::from_spectrum(grid, acc)
}

/// `||u(t) - e^{it d_xx} u_+||_{L^2}` at the snapshot nearest `t`.
pub fn uplus_residual(traj: &Trajectory, uplus: &ComplexField, t: f64) -> Result<f64> {
    let i = traj.nearest_index(t);
    let ti = traj.times()[i];
    Ok(traj.snapshots()[i].l2_distance(&free_propagate(uplus, ti)?))
}

/// `(t, max|u(t)|)` per snapshot.
pub fn decay_tracker(traj: &Trajectory) -> Vec<(f64, f64)> {
    traj.times()
        .iter()
        .zip(traj.snapshots())
        .map(|(&t, u)| (t, u.max_abs()))
        .collect()
}

/// Log-log slope of `max|u|` against `t` over `[t_min, t_max]`.
pub fn decay_exponent(curve: &[(f64, f64)], t_min: f64, t_max: f64) -> Result<f64> {
    let (ts, vs): (Vec<f64>, Vec<f64>) = curve
        .iter()
        .filter(|(t, _)| *t >= t_min && *t <= t_max)
        .copied()
        .unzip();
    loglog_fit(&ts, &vs).map(|(slope, _)| slope)
}

/// Working-space norm on each prefix `[0, T_j]`, `s in [1/2, 1]`.
pub fn xt_accumulate(traj: &Trajectory, s: f64) -> Result<Vec<(f64, f64)>> {
    if !(0.5..=1.0).contains(&s) {
        return Err(Error::param("s", format!("{s} not in [1/2, 1]")));
    }
    xt_prefix_curve(traj, s, &DEFAULT_Q_GRID, DEFAULT_N0)
}

/// All diagnostics for one run: dyadic pull-back windows from `t = 1`,
/// decay fit over `[t_end/4, t_end]`, working-space curve and `u_+` residual.
pub fn scatter_report(
    traj: &Trajectory,
    equation: EquationKind,
    s: f64,
    s_prime: f64,
) -> Result<ScatterReport> {
    let t_end = traj.final_time();
    let windows = dyadic_windows(1.0, t_end);
    let pullback_cauchy = pullback_cauchy(traj, &windows, s_prime)?;
    let decay_curve = decay_tracker(traj);
    let decay_exponent = decay_exponent(&decay_curve, 0.25 * t_end, t_end).ok();
    let xt_norm_curve = xt_accumulate(traj, s)?;
    let uplus = uplus_truncated(traj, equation)?;
    let uplus_residual = uplus_residual(traj, &uplus, t_end)?;
    Ok(ScatterReport {
        pullback_cauchy,
        decay_curve,
        xt_norm_curve,
        uplus_residual,
        decay_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GridSpec;

    fn free_traj() -> Trajectory {
        let g = GridSpec::new(512, 80.0).unwrap();
        let f = ComplexField::from_real_fn(g, |x| (-x * x).exp()).unwrap();
        Trajectory::sample(Trajectory::uniform_times(2.0, 100), |t| {
            free_propagate(&f, t)
        })
        .unwrap()
    }

    #[test]
    fn free_pullback_is_constant() {
        let traj = free_traj();
        let w = pullback(&traj).unwrap();
        let w0 = &w.snapshots()[0];
        for s in w.snapshots() {
            assert!(s.l2_distance(w0) < 1e-12);
        }
        let diffs = pullback_cauchy(&traj, &[(0.5, 1.0), (1.0, 2.0)], 0.4).unwrap();
        assert!(diffs.iter().all(|d| d.2 < 1e-12));
        assert!(pullback_cauchy(&traj, &[(0.51, 1.0)], 0.4).is_err());
    }

    #[test]
    fn linear_uplus_is_datum() {
        let traj = free_traj();
        let up = uplus_truncated(&traj, EquationKind::Linear).unwrap();
        assert_eq!(up.values(), traj.snapshots()[0].values());
    }

    #[test]
    fn sparse_trajectory_rejected() {
        let traj = free_traj();
        let sparse = Trajectory::sample(vec![0.0, 0.5, 1.0], |t| {
            Ok(traj.snapshots()[traj.nearest_index(t)].clone())
        })
        .unwrap();
        assert!(matches!(
            uplus_truncated(&sparse, EquationKind::Gdnls { sigma: 2.0 }),
            Err(Error::TooSparse { .. })
        ));
    }

    #[test]
    fn zero_field_decay() {
        let g = GridSpec::new(64, 10.0).unwrap();
        let traj = Trajectory::sample(vec![0.0, 1.0], |_| Ok(ComplexField::zeros(g))).unwrap();
        assert!(decay_tracker(&traj).iter().all(|p| p.1 == 0.0));
        let xt = xt_accumulate(&traj, 0.5).unwrap();
        assert!(xt.iter().all(|p| p.1 == 0.0));
        assert!(xt_accumulate(&traj, 0.4).is_err());
    }

    #[test]
    fn windows() {
        assert_eq!(
            dyadic_windows(1.0, 8.0),
            vec![(1.0, 2.0), (2.0, 4.0), (4.0, 8.0)]
        );
        assert!(dyadic_windows(1.0, 1.5).is_empty());
    }
}
