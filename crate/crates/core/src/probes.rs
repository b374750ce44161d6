//! Empirical LHS/RHS ratios for the linear estimates of the free group
//! `e^{it d_xx}` over a test ensemble:
//!
//! ```text
//! Strichartz:  ||e^{it d_xx} f||_{L^q_t L^r_x}          <= C ||f||_{L^2},   2/q = 1/2 - 1/r
//! smoothing:   ||D^{1/2} e^{it d_xx} f||_{L^inf_x L^2_t} <= C ||f||_{L^2}
//! maximal:     ||e^{it d_xx} f||_{L^p_x L^inf_t}        <= C ||f||_{H^s},   p >= 4, s >= 1/2 - 1/p
//! Leibniz:     ||D^s(fg)||_p <= C (||D^s f||_{p1} ||g||_{p2} + ||D^s g||_{p3} ||f||_{p4})
//! ```
//!
//! Time integrals run over `[0, T]` on a uniform grid with the trapezoid rule,
//! the supremum in time is the maximum over that grid. Ratios are evaluated in
//! parallel over members; the report keeps the largest (first index on ties).

use std::sync::Arc;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::spectral::{
    fractional_derivative, sobolev_norm, symbol, trapezoid_weights, ComplexField, GridSpec,
    EDGE_DECAY_LIMIT,
};
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 20_240_101;
pub const DEFAULT_TIME_STEP: f64 = 0.01;
pub const DEFAULT_RANDOM_MEMBERS: usize = 20;

pub const GAUSSIAN_WIDTHS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
pub const GAUSSIAN_VELOCITIES: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];
pub const GAUSSIAN_CENTERS: [f64; 4] = [-15.0, -5.0, 5.0, 15.0];

/// Default probe grid: 4096 points on a box of length 400.
pub fn default_grid() -> GridSpec {
    GridSpec::new(4096, 400.0).expect("valid grid")
}

/// `e^{-a (x - x0)^2} e^{i v x}`
pub fn gaussian_member(grid: GridSpec, a: f64, v: f64, x0: f64) -> Result<ComplexField> {
    ComplexField::from_fn(grid, |x| {
        Complex64::from_polar((-a * (x - x0) * (x - x0)).exp(), v * x)
    })
}

/// Gaussian window of width 4 times a random trigonometric polynomial with
/// eight frequencies in `[-4, 4]`.
fn random_member(grid: GridSpec, rng: &mut ChaCha8Rng) -> Result<ComplexField> {
    let center: f64 = rng.gen_range(-10.0..10.0);
    let terms: Vec<(Complex64, f64)> = (0..8)
        .map(|_| {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (c, rng.gen_range(-4.0..4.0))
        })
        .collect();
    ComplexField::from_fn(grid, |x| {
        let window = (-(x - center) * (x - center) / 32.0).exp();
        terms
            .iter()
            .map(|(c, k)| c * Complex64::from_polar(window, k * x))
            .sum()
    })
}

#[derive(Debug, Clone)]
pub struct ProbeEnsemble {
    pub members: Vec<ComplexField>,
    pub seed: u64,
    /// Spacing of the uniform time grid used by the probes.
    pub time_step: f64,
}

impl ProbeEnsemble {
    /// Members must share one grid and decay at the box edge.
    pub fn new(members: Vec<ComplexField>, seed: u64) -> Result<Self> {
        if let Some(first) = members.first() {
            for m in &members {
                if m.grid() != first.grid() {
                    return Err(Error::InvalidGrid(
                        "ensemble members on different grids".into(),
                    ));
                }
                m.require_edge_decay()?;
            }
        }
        Ok(Self {
            members,
            seed,
            time_step: DEFAULT_TIME_STEP,
        })
    }

    pub fn with_time_step(mut self, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::param("time_step", format!("{dt} must be > 0")));
        }
        self.time_step = dt;
        Ok(self)
    }

    /// The 5 x 5 x 4 Gaussian lattice.
    pub fn gaussians(grid: GridSpec) -> Result<Self> {
        let mut members = Vec::new();
        for &a in &GAUSSIAN_WIDTHS {
            for &v in &GAUSSIAN_VELOCITIES {
                for &x0 in &GAUSSIAN_CENTERS {
                    members.push(gaussian_member(grid, a, v, x0)?);
                }
            }
        }
        Self::new(members, 0)
    }

    /// Band-limited random fields from a ChaCha8 stream.
    pub fn random(grid: GridSpec, seed: u64, count: usize) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let members = (0..count)
            .map(|_| random_member(grid, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        Self::new(members, seed)
    }

    /// Gaussian lattice plus 20 random fields on the default grid.
    pub fn standard(seed: u64) -> Result<Self> {
        Self::standard_on(default_grid(), seed)
    }

    pub fn standard_on(grid: GridSpec, seed: u64) -> Result<Self> {
        let mut ens = Self::gaussians(grid)?;
        ens.members
            .extend(Self::random(grid, seed, DEFAULT_RANDOM_MEMBERS)?.members);
        ens.seed = seed;
        Ok(ens)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Exponents and regularity a report refers to.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ProbeParams {
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub s: Option<f64>,
    pub p: Option<f64>,
    pub alpha: Option<f64>,
    pub horizon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub inequality_id: &'static str,
    pub worst_ratio: f64,
    pub worst_member: usize,
    pub params: ProbeParams,
    /// Per-member ratios, in ensemble order.
    pub ratios: Vec<f64>,
    /// False when the exponents lie outside the range where the estimate holds.
    pub admissible: bool,
}

fn report(
    id: &'static str,
    ratios: Vec<f64>,
    params: ProbeParams,
    admissible: bool,
) -> Result<ProbeReport> {
    if ratios.iter().any(|r| !r.is_finite()) {
        return Err(Error::NonFinite("probe ratio"));
    }
    let (worst_member, worst_ratio) = ratios.iter().copied().enumerate().fold(
        (0, 0.0),
        |best, (i, r)| if r > best.1 { (i, r) } else { best },
    );
    Ok(ProbeReport {
        inequality_id: id,
        worst_ratio,
        worst_member,
        params,
        ratios,
        admissible,
    })
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

fn check_horizon(t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::param("T", format!("{t} must be > 0")));
    }
    Ok(())
}

/// Walks `e^{it d_xx} (m(D) f)` over a uniform time grid on `[0, T]`.
struct FreeStream {
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    times: Vec<f64>,
    weights: Vec<f64>,
}

impl FreeStream {
    fn new(n: usize, horizon: f64, dt: f64) -> Self {
        let steps = (horizon / dt).ceil().max(1.0) as usize;
        let times: Vec<f64> = (0..=steps)
            .map(|i| horizon * i as f64 / steps as f64)
            .collect();
        let weights = trapezoid_weights(&times);
        let inv = FftPlanner::new().plan_fft_inverse(n);
        let scratch = vec![Complex64::new(0.0, 0.0); inv.get_inplace_scratch_len()];
        Self {
            inv,
            scratch,
            times,
            weights,
        }
    }

    /// Calls `visit(weight, |u(t_i, x_j)|)` for each time.
    fn run(&mut self, spec: &[Complex64], xi: &[f64], mut visit: impl FnMut(f64, &[f64])) {
        // uniform times: advance the phase by a fixed factor, re-evaluated every 64 steps
        const RESYNC: usize = 64;
        let n = spec.len();
        let dt = if self.times.len() > 1 {
            self.times[1]
        } else {
            0.0
        };
        let step: Vec<Complex64> = xi
            .iter()
            .map(|x| Complex64::from_polar(1.0, -x * x * dt))
            .collect();
        let mut phase = vec![Complex64::new(1.0, 0.0); n];
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        let mut modulus = vec![0.0; n];
        for (i, (&t, &w)) in self.times.iter().zip(&self.weights).enumerate() {
            if i > 0 {
                if i % RESYNC == 0 {
                    for (p, x) in phase.iter_mut().zip(xi) {
                        *p = Complex64::from_polar(1.0, -x * x * t);
                    }
                } else {
                    for (p, s) in phase.iter_mut().zip(&step) {
                        *p *= s;
                    }
                }
            }
            for ((b, s), p) in buf.iter_mut().zip(spec).zip(&phase) {
                *b = s * p;
            }
            self.inv.process_with_scratch(&mut buf, &mut self.scratch);
            for (m, b) in modulus.iter_mut().zip(&buf) {
                *m = b.norm_sqr().sqrt() / n as f64;
            }
            visit(w, &modulus);
        }
    }
}

fn weighted_spectrum(f: &ComplexField, order: f64) -> Vec<Complex64> {
    let nyq = f.grid().nyquist_index();
    f.spectrum()
        .into_iter()
        .zip(f.grid().wavenumbers())
        .enumerate()
        .map(|(k, (v, xi))| v * symbol(xi, order, true, false, k == nyq))
        .collect()
}

/// `v^p`, with integer powers taken by multiplication.
#[inline]
fn pow(v: f64, p: f64) -> f64 {
    if p == p.trunc() && p <= 16.0 {
        v.powi(p as i32)
    } else {
        v.powf(p)
    }
}

fn lp_of(values: &[f64], p: f64, h: f64) -> f64 {
    if p.is_infinite() {
        values.iter().copied().fold(0.0, f64::max)
    } else {
        (values.iter().map(|&v| pow(v, p)).sum::<f64>() * h).powf(1.0 / p)
    }
}

/// `||e^{it d_xx} f||_{L^q_t([0,T]) L^r_x}`.
pub fn strichartz_lhs(f: &ComplexField, q: f64, r: f64, horizon: f64, dt: f64) -> f64 {
    let grid = f.grid();
    let h = grid.spacing();
    let mut stream = FreeStream::new(grid.n_points(), horizon, dt);
    let mut acc = 0.0f64;
    stream.run(&f.spectrum(), &grid.wavenumbers(), |w, m| {
        let inner = lp_of(m, r, h);
        if q.is_infinite() {
            acc = acc.max(inner);
        } else {
            acc += w * pow(inner, q);
        }
    });
    if q.is_infinite() {
        acc
    } else {
        acc.powf(1.0 / q)
    }
}

/// `||D^{1/2} e^{it d_xx} f||_{L^inf_x L^2_t([0,T])}`.
pub fn smoothing_lhs(f: &ComplexField, horizon: f64, dt: f64) -> f64 {
    let grid = f.grid();
    let mut stream = FreeStream::new(grid.n_points(), horizon, dt);
    let mut acc = vec![0.0; grid.n_points()];
    stream.run(&weighted_spectrum(f, 0.5), &grid.wavenumbers(), |w, m| {
        for (a, v) in acc.iter_mut().zip(m) {
            *a += w * v * v;
        }
    });
    acc.iter().copied().fold(0.0, f64::max).sqrt()
}

/// `||e^{it d_xx} f||_{L^p_x L^inf_t([0,T])}`.
pub fn maximal_lhs(f: &ComplexField, p: f64, horizon: f64, dt: f64) -> f64 {
    let grid = f.grid();
    let mut stream = FreeStream::new(grid.n_points(), horizon, dt);
    let mut acc = vec![0.0f64; grid.n_points()];
    stream.run(&f.spectrum(), &grid.wavenumbers(), |_, m| {
        for (a, v) in acc.iter_mut().zip(m) {
            *a = a.max(*v);
        }
    });
    lp_of(&acc, p, grid.spacing())
}

/// `2/q = 1/2 - 1/r` with `q in [4, inf]`.
pub fn is_admissible(q: f64, r: f64) -> bool {
    if !(q >= 4.0 && r >= 2.0) {
        return false;
    }
    (2.0 / q - (0.5 - 1.0 / r)).abs() < 1e-12
}

fn par_ratios(
    ens: &ProbeEnsemble,
    f: impl Fn(&ComplexField) -> Result<f64> + Sync + Send,
) -> Result<Vec<f64>> {
    ens.members.par_iter().map(f).collect()
}

pub fn strichartz_probe(ens: &ProbeEnsemble, q: f64, r: f64, horizon: f64) -> Result<ProbeReport> {
    if !is_admissible(q, r) {
        return Err(Error::param(
            "q, r",
            format!("({q}, {r}) is not admissible: need 2/q = 1/2 - 1/r, q >= 4"),
        ));
    }
    check_horizon(horizon)?;
    let dt = ens.time_step;
    let ratios = par_ratios(ens, |f| {
        Ok(ratio(strichartz_lhs(f, q, r, horizon, dt), f.l2_norm()))
    })?;
    let params = ProbeParams {
        q: Some(q),
        r: Some(r),
        horizon: Some(horizon),
        ..Default::default()
    };
    report("strichartz", ratios, params, true)
}

pub fn smoothing_probe(ens: &ProbeEnsemble, horizon: f64) -> Result<ProbeReport> {
    check_horizon(horizon)?;
    let dt = ens.time_step;
    let ratios = par_ratios(ens, |f| {
        Ok(ratio(smoothing_lhs(f, horizon, dt), f.l2_norm()))
    })?;
    let params = ProbeParams {
        alpha: Some(0.5),
        horizon: Some(horizon),
        ..Default::default()
    };
    report("smoothing", ratios, params, true)
}

/// `p in [4, 16]`. Regularity below `1/2 - 1/p` is evaluated anyway and the
/// report is marked inadmissible.
pub fn maximal_probe(ens: &ProbeEnsemble, p: f64, s: f64, horizon: f64) -> Result<ProbeReport> {
    if !(4.0..=16.0).contains(&p) {
        return Err(Error::param("p", format!("{p} not in [4, 16]")));
    }
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::param("s", format!("{s} must be >= 0")));
    }
    check_horizon(horizon)?;
    let threshold = 0.5 - 1.0 / p;
    let admissible = s >= threshold - 1e-12;
    if !admissible {
        warn!("maximal probe with s = {s} below 1/2 - 1/p = {threshold}");
    }
    let dt = ens.time_step;
    let ratios = par_ratios(ens, |f| {
        Ok(ratio(
            maximal_lhs(f, p, horizon, dt),
            sobolev_norm(f, s, false)?,
        ))
    })?;
    let params = ProbeParams {
        p: Some(p),
        s: Some(s),
        horizon: Some(horizon),
        ..Default::default()
    };
    report("maximal", ratios, params, admissible)
}

/// Lebesgue exponents `(p, p1, p2, p3, p4)` of the Leibniz rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeibnizExponents {
    pub p: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
}

impl LeibnizExponents {
    pub fn validate(&self) -> Result<()> {
        let all = [self.p, self.p1, self.p2, self.p3, self.p4];
        if all.iter().any(|&e| !(e >= 1.0)) {
            return Err(Error::param("exponents", "every exponent must be >= 1"));
        }
        let inv = |e: f64| if e.is_infinite() { 0.0 } else { 1.0 / e };
        let target = inv(self.p);
        if (inv(self.p1) + inv(self.p2) - target).abs() > 1e-12
            || (inv(self.p3) + inv(self.p4) - target).abs() > 1e-12
        {
            return Err(Error::param(
                "exponents",
                format!("not Hoelder-compatible: {self:?}"),
            ));
        }
        Ok(())
    }
}

fn leibniz_ratio(f: &ComplexField, g: &ComplexField, s: f64, e: &LeibnizExponents) -> Result<f64> {
    let h = f.grid().spacing();
    let modulus = |u: &ComplexField| u.values().iter().map(|v| v.norm()).collect::<Vec<_>>();
    let product = ComplexField::new(
        *f.grid(),
        f.values()
            .iter()
            .zip(g.values())
            .map(|(a, b)| a * b)
            .collect(),
    )?;
    let lhs = lp_of(&modulus(&fractional_derivative(&product, s)?), e.p, h);
    let dsf = lp_of(&modulus(&fractional_derivative(f, s)?), e.p1, h);
    let dsg = lp_of(&modulus(&fractional_derivative(g, s)?), e.p3, h);
    let rhs = dsf * lp_of(&modulus(g), e.p2, h) + dsg * lp_of(&modulus(f), e.p4, h);
    Ok(ratio(lhs, rhs))
}

pub fn leibniz_probe(
    pairs: &[(ComplexField, ComplexField)],
    s: f64,
    exponents: LeibnizExponents,
) -> Result<ProbeReport> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::param("s", format!("{s} not in (0, 1)")));
    }
    exponents.validate()?;
    for (f, g) in pairs {
        if f.grid() != g.grid() {
            return Err(Error::InvalidGrid("pair members on different grids".into()));
        }
    }
    let ratios = pairs
        .par_iter()
        .map(|(f, g)| leibniz_ratio(f, g, s, &exponents))
        .collect::<Result<Vec<_>>>()?;
    let params = ProbeParams {
        s: Some(s),
        p: Some(exponents.p),
        ..Default::default()
    };
    report("leibniz", ratios, params, true)
}

/// Random Gaussian pairs `e^{-a(x-x0)^2} e^{ivx}` with `a in [0.25, 4]`,
/// `v in [-2, 2]`, `x0 in [-10, 10]`.
pub fn gaussian_pairs(
    grid: GridSpec,
    seed: u64,
    count: usize,
) -> Result<Vec<(ComplexField, ComplexField)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let a = 2f64.powf(rng.gen_range(-2.0..2.0));
        gaussian_member(
            grid,
            a,
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-10.0..10.0),
        )
    };
    (0..count)
        .map(|_| Ok((draw(&mut rng)?, draw(&mut rng)?)))
        .collect()
}

/// Smooth plateau equal to 1 (up to 1e-15) on `[-half_width + 40, half_width - 40]`,
/// decaying with `tanh` edges of width 2.
pub fn plateau(grid: GridSpec, half_width: f64) -> Result<ComplexField> {
    let g = ComplexField::from_real_fn(grid, |x| {
        0.5 * (((x + half_width) / 2.0).tanh() - ((x - half_width) / 2.0).tanh())
    })?;
    if g.edge_magnitude() >= EDGE_DECAY_LIMIT {
        warn!(
            "plateau does not decay at the box edge ({:e})",
            g.edge_magnitude()
        );
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> GridSpec {
        GridSpec::new(512, 100.0).unwrap()
    }

    #[test]
    fn admissibility() {
        assert!(is_admissible(f64::INFINITY, 2.0));
        assert!(is_admissible(4.0, f64::INFINITY));
        assert!(is_admissible(8.0, 4.0));
        assert!(!is_admissible(2.0, f64::INFINITY));
        assert!(!is_admissible(4.0, 4.0));
    }

    #[test]
    fn zero_member_gives_zero() {
        let ens = ProbeEnsemble::new(vec![ComplexField::zeros(small_grid())], 0).unwrap();
        assert_eq!(smoothing_probe(&ens, 1.0).unwrap().worst_ratio, 0.0);
        assert_eq!(
            maximal_probe(&ens, 4.0, 0.25, 1.0).unwrap().worst_ratio,
            0.0
        );
        assert_eq!(
            strichartz_probe(&ens, 4.0, f64::INFINITY, 1.0)
                .unwrap()
                .worst_ratio,
            0.0
        );
    }

    #[test]
    fn rejects_bad_inputs() {
        let ens = ProbeEnsemble::gaussians(default_grid()).unwrap();
        assert!(strichartz_probe(&ens, 4.0, 4.0, 1.0).is_err());
        assert!(maximal_probe(&ens, 3.0, 0.5, 1.0).is_err());
        assert!(smoothing_probe(&ens, 0.0).is_err());
        let e = LeibnizExponents {
            p: 2.0,
            p1: 4.0,
            p2: 4.0,
            p3: 4.0,
            p4: 3.0,
        };
        assert!(e.validate().is_err());
        assert!(leibniz_probe(
            &[],
            1.0,
            LeibnizExponents {
                p: 2.0,
                p1: 4.0,
                p2: 4.0,
                p3: 4.0,
                p4: 4.0
            }
        )
        .is_err());
    }

    #[test]
    fn undecayed_member_rejected() {
        let wide = ComplexField::from_real_fn(small_grid(), |x| (-x * x / 100.0).exp()).unwrap();
        assert!(ProbeEnsemble::new(vec![wide], 0).is_err());
    }

    #[test]
    fn ensemble_is_seeded() {
        let a = ProbeEnsemble::random(small_grid(), 7, 3).unwrap();
        let b = ProbeEnsemble::random(small_grid(), 7, 3).unwrap();
        let c = ProbeEnsemble::random(small_grid(), 8, 3).unwrap();
        assert_eq!(a.members, b.members);
        assert_ne!(a.members, c.members);
        assert_eq!(ProbeEnsemble::standard(1).unwrap().len(), 120);
    }

    #[test]
    fn sub_threshold_maximal_flagged() {
        let ens = ProbeEnsemble::new(
            vec![gaussian_member(small_grid(), 1.0, 0.0, 0.0).unwrap()],
            0,
        )
        .unwrap();
        assert!(!maximal_probe(&ens, 4.0, 0.1, 1.0).unwrap().admissible);
        assert!(maximal_probe(&ens, 4.0, 0.25, 1.0).unwrap().admissible);
    }
}
