//! Adaptive Gauss–Kronrod quadrature for the improper integrals of the
//! solitary-wave family, plus running integrals from `-inf`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Left cutoff threshold for [`cumulative_integral`].
pub const CUTOFF_THRESHOLD: f64 = 1e-14;

const MAX_INTERVALS: usize = 4000;
const HALFLINE_CUT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

fn gauss_kronrod(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..3 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let (f1, f2) = (f(centre - dx), f(centre + dx));
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let (f1, f2) = (f(centre - dx), f(centre + dx));
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let value = res_k * half;
    res_abs *= scale;
    res_asc *= scale;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel {
        a,
        b,
        value,
        error,
        abs_value: res_abs,
    }
}

struct ByError {
    panel: Panel,
    source: usize,
}

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.panel.error == other.panel.error
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.panel.error.total_cmp(&other.panel.error)
    }
}

/// Globally adaptive bisection over one or more (integrand, interval) pieces.
fn adaptive(
    pieces: &[(&dyn Fn(f64) -> f64, f64, f64)],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for (source, &(f, a, b)) in pieces.iter().enumerate() {
        heap.push(ByError {
            panel: gauss_kronrod(f, a, b),
            source,
        });
        evaluations += 15;
    }
    loop {
        let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), p| {
            (v + p.panel.value, e + p.panel.error)
        });
        if !value.is_finite() {
            return Err(Error::NonFinite("quadrature integrand"));
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadratureResult {
                value,
                error_estimate: error,
                evaluations,
            });
        }
        // Stop when the worst panel can no longer be split in floating point
        // or its error is at the roundoff floor.
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.panel.a + worst.panel.b);
        let floor = 50.0 * f64::EPSILON * worst.panel.abs_value;
        if heap.len() + 2 > MAX_INTERVALS
            || !(mid > worst.panel.a.min(worst.panel.b) && mid < worst.panel.a.max(worst.panel.b))
            || worst.panel.error <= floor && worst.panel.error > 0.0 && heap.is_empty()
        {
            let error = error.max(worst.panel.error);
            return Err(Error::QuadratureNonConvergence {
                partial: value,
                error_estimate: error,
                evaluations,
            });
        }
        let f = pieces[worst.source].0;
        for (a, b) in [(worst.panel.a, mid), (mid, worst.panel.b)] {
            heap.push(ByError {
                panel: gauss_kronrod(f, a, b),
                source: worst.source,
            });
            evaluations += 15;
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::param("tol", format!("{tol} must be positive")))
    }
}

/// `int_a^b f` by adaptive Gauss–Kronrod (7/15) with absolute tolerance `tol`.
pub fn integrate_interval(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    check_tol(tol)?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::param("interval", "endpoints must be finite"));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 1,
        });
    }
    adaptive(&[(&f, a, b)], tol, 0.0)
}

/// `int_0^inf f` for integrands decaying at least exponentially.
///
/// `[0, 1]` is integrated directly; the tail uses `x = 1 - ln s`,
/// `s in (0, 1]`, so exponential decay becomes algebraic behaviour at
/// `s = 0` that the adaptive rule resolves by bisection.
pub fn integrate_halfline(f: impl Fn(f64) -> f64, tol: f64) -> Result<QuadratureResult> {
    check_tol(tol)?;
    let tail = |s: f64| {
        if s <= 0.0 {
            0.0
        } else {
            f(HALFLINE_CUT - s.ln()) / s
        }
    };
    adaptive(&[(&f, 0.0, HALFLINE_CUT), (&tail, 0.0, 1.0)], tol, 0.0)
}

/// `F(x_i) = int_{-inf}^{x_i} f` on an increasing grid.
///
/// The lower limit is replaced by the first point left of `x_0` (searched
/// at doubling distances) where `|f| < 1e-14`; each grid panel is then
/// integrated with the adaptive Gauss–Kronrod rule and the panels are
/// summed with compensation.
pub fn cumulative_integral(f: impl Fn(f64) -> f64, x_grid: &[f64]) -> Result<Vec<f64>> {
    let Some(&x0) = x_grid.first() else {
        return Ok(Vec::new());
    };
    if x_grid.windows(2).any(|w| !(w[1] > w[0])) || !x_grid.iter().all(|x| x.is_finite()) {
        return Err(Error::param(
            "x_grid",
            "must be finite and strictly increasing",
        ));
    }
    let span = (x_grid[x_grid.len() - 1] - x0).max(1.0);
    let mut cutoff = None;
    for k in 0..64 {
        let x = if k == 0 {
            x0
        } else {
            x0 - span * 2f64.powi(k - 1)
        };
        if f(x).abs() < CUTOFF_THRESHOLD {
            cutoff = Some(x);
            break;
        }
    }
    let Some(cutoff) = cutoff else {
        return Err(Error::CutoffNotFound {
            threshold: CUTOFF_THRESHOLD,
            searched_to: x0 - span * 2f64.powi(62),
        });
    };

    let panel = |a: f64, b: f64| -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        adaptive(&[(&f, a, b)], 1e-300, 1e-13).map(|r| r.value)
    };
    let mut out = Vec::with_capacity(x_grid.len());
    let mut sum = panel(cutoff, x0)?;
    let mut comp = 0.0;
    out.push(sum);
    for w in x_grid.windows(2) {
        let v = panel(w[0], w[1])?;
        // Neumaier summation
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
        out.push(sum + comp);
    }
    Ok(out)
}

/// Riemann zeta function for real `s != 1`, `s >= -8`, by Euler–Maclaurin
/// summation (which also gives the analytic continuation to `s < 1`).
pub fn riemann_zeta(s: f64) -> Result<f64> {
    if !(s.is_finite() && s >= -8.0) || s == 1.0 {
        return Err(Error::param("s", format!("zeta({s}) not supported")));
    }
    const N: f64 = 12.0;
    // B_2, B_4, ..., B_16 over (2j)!
    const B_OVER_FACT: [f64; 8] = [
        1.0 / 6.0 / 2.0,
        -1.0 / 30.0 / 24.0,
        1.0 / 42.0 / 720.0,
        -1.0 / 30.0 / 40_320.0,
        5.0 / 66.0 / 3_628_800.0,
        -691.0 / 2730.0 / 479_001_600.0,
        7.0 / 6.0 / 87_178_291_200.0,
        -3617.0 / 510.0 / 20_922_789_888_000.0,
    ];
    let head: f64 = (1..N as usize).map(|k| (k as f64).powf(-s)).sum();
    let mut total = head + N.powf(1.0 - s) / (s - 1.0) + 0.5 * N.powf(-s);
    // rising factorial s (s+1) ... (s + 2j - 2)
    let mut rising = s;
    for (j, b) in B_OVER_FACT.iter().enumerate() {
        let order = 2 * j as i32 + 1;
        total += b * rising * N.powf(-s - order as f64);
        rising *= (s + order as f64) * (s + order as f64 + 1.0);
    }
    Ok(total)
}
