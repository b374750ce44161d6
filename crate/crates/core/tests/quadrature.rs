use gdnls_core::integration::*;
use gdnls_core::soliton::{beta_integral, c_sigma, i_integral, SolitonParams};
use gdnls_core::GridSpec;

/// Composite Simpson on [0, 40] with 10^6 panels; the tail beyond 40 is below 1e-8.
fn simpson_sech_sqrt() -> f64 {
    let (a, b, m) = (0.0, 40.0, 1_000_000usize);
    let h = (b - a) / m as f64;
    let f = |x: f64| (1.0 / x.cosh()).sqrt();
    let mut sum = f(a) + f(b);
    for i in 1..m {
        sum += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0 + 2.0 * 2f64.sqrt() * (-20.0f64).exp()
}

#[test]
fn i_of_zero_against_simpson() {
    let value = i_integral(2.0, 0.0).unwrap();
    assert!((value - simpson_sech_sqrt()).abs() < 1e-8, "{value}");
}

#[test]
fn halfline_closed_forms() {
    let r = integrate_halfline(|x| (-x).exp(), DEFAULT_TOL).unwrap();
    assert!((r.value - 1.0).abs() < 1e-10);
    let r = integrate_halfline(|x| 1.0 / (x.cosh() + 1.0), DEFAULT_TOL).unwrap();
    assert!((r.value - 1.0).abs() < 1e-10);
}

#[test]
fn cosh_integral_closed_form() {
    // int_0^inf dx / (cosh x - z) = theta / sin theta with z = -cos theta
    for z in [-0.99, -0.5, 0.0, 0.3, 0.9, 0.999] {
        let theta: f64 = (-z as f64).acos();
        let exact = theta / theta.sin();
        let v = beta_integral(1.0 - z).unwrap();
        assert!((v / exact - 1.0).abs() < 1e-10, "z = {z}");
    }
}

#[test]
fn error_estimates_are_honest() {
    let pi = std::f64::consts::PI;
    let cases: Vec<(Box<dyn Fn(f64) -> f64>, f64, f64, f64)> = vec![
        (Box::new(|x: f64| x.sin()), 0.0, pi, 2.0),
        (Box::new(|x: f64| x.exp()), 0.0, 1.0, 1f64.exp() - 1.0),
        (Box::new(|x: f64| 1.0 / (1.0 + x * x)), -1.0, 1.0, pi / 2.0),
        (Box::new(|x: f64| x.sqrt()), 0.0, 1.0, 2.0 / 3.0),
        (Box::new(|x: f64| x.ln()), 0.0, 1.0, -1.0),
        (
            Box::new(|x: f64| (x * x).cos()),
            0.0,
            2.0,
            0.461_461_462_433_216,
        ),
        (Box::new(|x: f64| x.powi(7)), -1.0, 2.0, (256.0 - 1.0) / 8.0),
        (Box::new(|x: f64| 1.0 / x.sqrt()), 0.0, 1.0, 2.0),
        (
            Box::new(|x: f64| (10.0 * x).sin().powi(2)),
            0.0,
            pi,
            pi / 2.0,
        ),
        (
            Box::new(|x: f64| (-x * x).exp()),
            -5.0,
            5.0,
            pi.sqrt() * libm_erf(5.0),
        ),
    ];
    for (f, a, b, exact) in cases {
        let r = integrate_interval(&f, a, b, 1e-10).unwrap();
        let err = (r.value - exact).abs();
        assert!(
            err <= 10.0 * r.error_estimate.max(1e-15),
            "{a}..{b}: err {err:e} est {:e}",
            r.error_estimate
        );
        assert!(err <= 1e-9);
        assert!(r.evaluations > 0 && r.error_estimate >= 0.0);
    }
}

fn libm_erf(x: f64) -> f64 {
    // erf(5) to double precision
    assert_eq!(x, 5.0);
    0.999_999_999_998_462_5
}

#[test]
fn linearity_and_monotonicity() {
    let f = |x: f64| (-x).exp() * (1.0 + x.sin().powi(2));
    let g = |x: f64| 1.0 / (x.cosh() + 2.0);
    let (a, b) = (2.5, -0.7);
    let rf = integrate_halfline(f, DEFAULT_TOL).unwrap();
    let rg = integrate_halfline(g, DEFAULT_TOL).unwrap();
    let rc = integrate_halfline(|x| a * f(x) + b * g(x), DEFAULT_TOL).unwrap();
    let tol = a.abs() * rf.error_estimate
        + b.abs() * rg.error_estimate
        + rc.error_estimate
        + 3.0 * DEFAULT_TOL;
    assert!((rc.value - (a * rf.value + b * rg.value)).abs() <= tol);
    // (-x).exp() <= f pointwise
    let lower = integrate_halfline(|x| (-x).exp(), DEFAULT_TOL).unwrap();
    assert!(rf.value >= lower.value - 2.0 * DEFAULT_TOL);
}

#[test]
fn cumulative_phase_closed_form() {
    // int du / (A cosh u - c) = 2/sqrt(A^2 - c^2) atan( sqrt((A+c)/(A-c)) tanh(u/2) )
    let (big_a, c): (f64, f64) = (2.0, 0.5);
    let anti = |u: f64| {
        let k = (big_a * big_a - c * c).sqrt();
        2.0 / k * (((big_a + c) / (big_a - c)).sqrt() * (0.5 * u).tanh()).atan()
    };
    let xs: Vec<f64> = (0..=400).map(|i| -20.0 + 0.1 * i as f64).collect();
    let f = cumulative_integral(|u| 1.0 / (big_a * u.cosh() - c), &xs).unwrap();
    let base = anti(f64::NEG_INFINITY.max(-1e3));
    for (x, v) in xs.iter().zip(&f) {
        assert!((v - (anti(*x) - base)).abs() < 1e-10, "x = {x}");
    }
    assert!(f.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn cutoff_not_found() {
    let xs = [0.0, 1.0];
    assert!(matches!(
        cumulative_integral(|_| 1.0, &xs),
        Err(gdnls_core::Error::CutoffNotFound { .. })
    ));
}

#[test]
fn i_bound_chain() {
    // c_sigma <= I(c) <= I(0) for c in (-2 sqrt(omega), 0], on a 50-point grid
    for sigma in [1.0, 2.0, 3.0] {
        let lower = c_sigma(sigma).unwrap();
        let upper = i_integral(sigma, 0.0).unwrap();
        let mut prev = lower;
        for j in 0..50 {
            let z = -1.0 + (j as f64 + 1.0) / 50.0; // c / (2 sqrt(omega)) in (-1, 0]
            let v = i_integral(sigma, z).unwrap();
            assert!(v >= lower - 1e-10 && v <= upper + 1e-10);
            assert!(v >= prev - 1e-10, "I not increasing at z = {z}");
            prev = v;
        }
    }
    // c_1 = int dx / (cosh x + 1) = 1
    assert!((c_sigma(1.0).unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn beta_lower_bound_holds_only_above_crossover() {
    // each side independently: quadrature versus 1/beta
    let betas = [1e-3, 1e-2, 0.1, 0.2, 0.25, 0.5, 1.0];
    let holds: Vec<bool> = betas
        .iter()
        .map(|&b| beta_integral(b).unwrap() >= 1.0 / b)
        .collect();
    assert_eq!(holds, vec![false, false, false, false, false, true, true]);
    // crossover near beta = 0.3108
    assert!(beta_integral(0.30).unwrap() < 1.0 / 0.30 && beta_integral(0.32).unwrap() > 1.0 / 0.32);
    // near 0 the integral behaves like pi / sqrt(2 beta)
    let b = 1e-6;
    let v = beta_integral(b).unwrap();
    assert!((v / (std::f64::consts::PI / (2.0 * b).sqrt()) - 1.0).abs() < 1e-2);
}

#[test]
fn i_rejects_right_endpoint() {
    assert!(i_integral(2.0, 1.0 - 1e-7).is_err());
    assert!(i_integral(2.0, -1.1).is_err());
    assert!(i_integral(0.0, 0.0).is_err());
}

#[test]
fn total_phase_matches_pc_mass() {
    use gdnls_core::soliton::{pc_mass_closed, phase_integral};
    for (w, c, s) in [(1.0, 0.5, 2.0), (2.0, -1.0, 1.0), (0.5, 0.9, 3.0)] {
        let p = SolitonParams::new(w, c, s).unwrap();
        let grid = gdnls_core::soliton::resolved_grid(&p);
        let phase = phase_integral(&p, &grid).unwrap();
        let total = *phase.last().unwrap();
        let closed = pc_mass_closed(&p).unwrap();
        assert!((total / closed - 1.0).abs() < 1e-8, "{total} vs {closed}");
        let _ = GridSpec::new(16, 1.0).unwrap();
    }
}
