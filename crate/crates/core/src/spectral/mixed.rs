//! Space-time Lebesgue norms over stored trajectories.

use super::ops::weighted;
use super::{ComplexField, GridSpec};
use crate::{Error, Result};

/// Which variable is integrated last.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterVariable {
    /// `L^q_t L^r_x`: space norm at each time, then a time norm.
    Time,
    /// `L^r_x L^q_t`: time norm at each point, then a space norm.
    Space,
}

/// Description of a mixed norm `L^a_{outer} L^b_{inner}` of `W u`, where
/// `W` is `D^s` (or `<D>^s`), optionally followed by `d/dx`.
///
/// Exponents are in `[1, inf]`; `f64::INFINITY` means an exact maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedNormSpec {
    pub outer_variable: OuterVariable,
    pub outer_exponent: f64,
    pub inner_exponent: f64,
    pub derivative_order: f64,
    pub homogeneous: bool,
    /// Apply `d/dx` (multiplier `i xi`) after the fractional weight.
    pub gradient: bool,
}

impl MixedNormSpec {
    /// `L^q_t L^r_x` of `u`.
    pub fn time_space(q: f64, r: f64) -> Self {
        Self {
            outer_variable: OuterVariable::Time,
            outer_exponent: q,
            inner_exponent: r,
            derivative_order: 0.0,
            homogeneous: true,
            gradient: false,
        }
    }

    /// `L^r_x L^q_t` of `u`.
    pub fn space_time(r: f64, q: f64) -> Self {
        Self {
            outer_variable: OuterVariable::Space,
            outer_exponent: r,
            inner_exponent: q,
            derivative_order: 0.0,
            homogeneous: true,
            gradient: false,
        }
    }

    pub fn with_derivative(mut self, order: f64, homogeneous: bool) -> Self {
        self.derivative_order = order;
        self.homogeneous = homogeneous;
        self
    }

    pub fn with_gradient(mut self) -> Self {
        self.gradient = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("outer_exponent", self.outer_exponent),
            ("inner_exponent", self.inner_exponent),
        ] {
            if p.is_nan() || p < 1.0 {
                return Err(Error::param(name, format!("{p} not in [1, inf]")));
            }
        }
        if !(self.derivative_order.is_finite() && self.derivative_order >= 0.0) {
            return Err(Error::param(
                "derivative_order",
                format!("{} must be >= 0", self.derivative_order),
            ));
        }
        Ok(())
    }

    /// Apply the derivative weight of this spec to a field.
    pub fn weight(&self, f: &ComplexField) -> Result<ComplexField> {
        weighted(f, self.derivative_order, self.homogeneous, self.gradient)
    }
}

/// Time-ordered snapshots of a field on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: GridSpec,
    times: Vec<f64>,
    snapshots: Vec<ComplexField>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, snapshots: Vec<ComplexField>) -> Result<Self> {
        let Some(first) = snapshots.first() else {
            return Err(Error::param("trajectory", "no snapshots"));
        };
        let grid = *first.grid();
        if times.len() != snapshots.len() {
            return Err(Error::param(
                "trajectory",
                format!("{} times for {} snapshots", times.len(), snapshots.len()),
            ));
        }
        if times[0] != 0.0 {
            return Err(Error::param("trajectory", "first time must be 0"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param(
                "trajectory",
                "times must be strictly increasing",
            ));
        }
        if snapshots.iter().any(|s| *s.grid() != grid) {
            return Err(Error::param("trajectory", "snapshots on different grids"));
        }
        Ok(Self {
            grid,
            times,
            snapshots,
        })
    }

    /// Sample `f(t)` at the given times.
    pub fn sample(times: Vec<f64>, f: impl Fn(f64) -> Result<ComplexField>) -> Result<Self> {
        let snapshots = times.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
        Self::new(times, snapshots)
    }

    /// Uniform sampling of `[0, t_end]` with `intervals` steps.
    pub fn uniform_times(t_end: f64, intervals: usize) -> Vec<f64> {
        (0..=intervals)
            .map(|i| t_end * i as f64 / intervals as f64)
            .collect()
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    #[inline]
    pub fn snapshots(&self) -> &[ComplexField] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("non-empty trajectory")
    }

    /// First `count` snapshots.
    pub fn prefix(&self, count: usize) -> Result<Self> {
        if count == 0 || count > self.len() {
            return Err(Error::param(
                "count",
                format!("{count} not in 1..={}", self.len()),
            ));
        }
        Ok(Self {
            grid: self.grid,
            times: self.times[..count].to_vec(),
            snapshots: self.snapshots[..count].to_vec(),
        })
    }

    /// Index of the snapshot whose time is closest to `t`.
    pub fn nearest_index(&self, t: f64) -> usize {
        self.times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// Largest gap between consecutive snapshot times.
    pub fn max_spacing(&self) -> f64 {
        self.times
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64, &ComplexField) -> Result<ComplexField>) -> Result<Self> {
        let snapshots = self
            .times
            .iter()
            .zip(&self.snapshots)
            .map(|(&t, s)| f(t, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.times.clone(), snapshots)
    }
}

/// `(sum w_i |v_i|^p)^{1/p}` or the maximum for `p = inf`.
pub(crate) fn weighted_lp(values: impl Iterator<Item = (f64, f64)>, p: f64) -> f64 {
    if p.is_infinite() {
        values.map(|(_, v)| v).fold(0.0, f64::max)
    } else {
        values
            .map(|(w, v)| w * v.powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

/// Trapezoid weights for the given abscissae.
pub(crate) fn trapezoid_weights(times: &[f64]) -> Vec<f64> {
    let m = times.len();
    let mut w = vec![0.0; m];
    for i in 0..m.saturating_sub(1) {
        let half = 0.5 * (times[i + 1] - times[i]);
        w[i] += half;
        w[i + 1] += half;
    }
    w
}

/// Mixed space-time norm of a trajectory.
///
/// Time integrals use the trapezoid rule over stored snapshots, space
/// integrals the periodic Riemann sum, and infinite exponents the exact
/// maximum over samples.
pub fn mixed_norm(traj: &Trajectory, spec: &MixedNormSpec) -> Result<f64> {
    spec.validate()?;
    if traj.len() < 2 {
        return Err(Error::param("trajectory", "need at least 2 snapshots"));
    }
    let moduli: Vec<Vec<f64>> = traj
        .snapshots()
        .iter()
        .map(|s| {
            spec.weight(s)
                .map(|w| w.values().iter().map(|v| v.norm()).collect())
        })
        .collect::<Result<_>>()?;
    let h = traj.grid().spacing();
    let tw = trapezoid_weights(traj.times());
    let n = traj.grid().n_points();
    Ok(match spec.outer_variable {
        OuterVariable::Time => {
            let per_time: Vec<f64> = moduli
                .iter()
                .map(|row| weighted_lp(row.iter().map(|&v| (h, v)), spec.inner_exponent))
                .collect();
            weighted_lp(tw.iter().copied().zip(per_time), spec.outer_exponent)
        }
        OuterVariable::Space => {
            let per_point: Vec<f64> = (0..n)
                .map(|j| {
                    weighted_lp(
                        tw.iter().zip(&moduli).map(|(&w, row)| (w, row[j])),
                        spec.inner_exponent,
                    )
                })
                .collect();
            weighted_lp(per_point.into_iter().map(|v| (h, v)), spec.outer_exponent)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::free_propagate;
    use rustfft::num_complex::Complex64;

    fn gaussian(g: GridSpec) -> ComplexField {
        ComplexField::from_real_fn(g, |x| (-x * x).exp()).unwrap()
    }

    #[test]
    fn trajectory_invariants() {
        let g = GridSpec::new(32, 4.0).unwrap();
        let z = ComplexField::zeros(g);
        assert!(Trajectory::new(vec![], vec![]).is_err());
        assert!(Trajectory::new(vec![0.1, 0.2], vec![z.clone(), z.clone()]).is_err());
        assert!(Trajectory::new(vec![0.0, 0.0], vec![z.clone(), z.clone()]).is_err());
        let other = ComplexField::zeros(GridSpec::new(64, 4.0).unwrap());
        assert!(Trajectory::new(vec![0.0, 1.0], vec![z.clone(), other]).is_err());
        assert!(Trajectory::new(vec![0.0, 1.0], vec![z.clone(), z]).is_ok());
    }

    #[test]
    fn rejects_bad_exponents_and_single_snapshot() {
        let g = GridSpec::new(32, 4.0).unwrap();
        let t = Trajectory::new(vec![0.0], vec![ComplexField::zeros(g)]).unwrap();
        assert!(mixed_norm(&t, &MixedNormSpec::time_space(2.0, 2.0)).is_err());
        let t2 = Trajectory::uniform_times(1.0, 2);
        let t2 = Trajectory::sample(t2, |_| Ok(ComplexField::zeros(g))).unwrap();
        assert!(mixed_norm(&t2, &MixedNormSpec::time_space(0.5, 2.0)).is_err());
        assert!(mixed_norm(
            &t2,
            &MixedNormSpec::time_space(2.0, 2.0).with_derivative(-1.0, true)
        )
        .is_err());
    }

    #[test]
    fn constant_trajectory_sup_l2() {
        let g = GridSpec::new(256, 30.0).unwrap();
        let f = gaussian(g);
        let traj =
            Trajectory::sample(Trajectory::uniform_times(2.0, 10), |_| Ok(f.clone())).unwrap();
        let v = mixed_norm(&traj, &MixedNormSpec::time_space(f64::INFINITY, 2.0)).unwrap();
        assert!((v - f.l2_norm()).abs() < 1e-14);
    }

    #[test]
    fn free_evolution_preserves_sup_l2() {
        let g = GridSpec::new(512, 60.0).unwrap();
        let f = gaussian(g);
        let traj = Trajectory::sample(Trajectory::uniform_times(3.0, 30), |t| {
            free_propagate(&f, t)
        })
        .unwrap();
        let v = mixed_norm(&traj, &MixedNormSpec::time_space(f64::INFINITY, 2.0)).unwrap();
        assert!((v - f.l2_norm()).abs() < 1e-10);
    }

    #[test]
    fn l2_spacetime_independent_of_order() {
        let g = GridSpec::new(256, 40.0).unwrap();
        let f = ComplexField::from_fn(g, |x| {
            Complex64::new((-x * x).exp(), (-(x - 1.0).powi(2)).exp())
        })
        .unwrap();
        let traj = Trajectory::sample(Trajectory::uniform_times(1.5, 15), |t| {
            free_propagate(&f, t)
        })
        .unwrap();
        let a = mixed_norm(&traj, &MixedNormSpec::time_space(2.0, 2.0)).unwrap();
        let b = mixed_norm(&traj, &MixedNormSpec::space_time(2.0, 2.0)).unwrap();
        assert!((a - b).abs() < 1e-10 * a);
    }

    #[test]
    fn trapezoid_weights_sum_to_length() {
        let w = trapezoid_weights(&[0.0, 0.5, 1.5, 2.0]);
        assert_eq!(w, vec![0.25, 0.75, 0.75, 0.25]);
    }
}
