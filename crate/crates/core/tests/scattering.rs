use gdnls_core::evolution::{evolve, nonlinearity, EquationKind, EvolutionConfig};
use gdnls_core::scattering::*;
use gdnls_core::soliton::{full_wave, resolved_grid, traveling_wave, SolitonParams};
use gdnls_core::spectral::{free_propagate, sobolev_norm};
use gdnls_core::{Complex64, ComplexField, GridSpec, Trajectory};

const GDNLS2: EquationKind = EquationKind::Gdnls { sigma: 2.0 };

fn small_run(delta: f64, dt: f64, stride: usize, t_end: f64) -> Trajectory {
    let grid = GridSpec::new(2048, 160.0).unwrap();
    let u0 = ComplexField::from_real_fn(grid, |x| delta * (-x * x).exp()).unwrap();
    let cfg = EvolutionConfig::new(GDNLS2, grid, dt, t_end)
        .unwrap()
        .with_stride(stride)
        .unwrap();
    let (traj, report) = evolve(&u0, &cfg).unwrap();
    assert!(report.mass_drift() < 1e-9);
    traj
}

#[test]
fn free_pullback_is_constant() {
    let grid = GridSpec::new(1024, 160.0).unwrap();
    let u0 =
        ComplexField::from_fn(grid, |x| Complex64::from_polar((-x * x).exp(), 0.7 * x)).unwrap();
    let cfg = EvolutionConfig::new(EquationKind::Linear, grid, 0.01, 4.0)
        .unwrap()
        .with_stride(2)
        .unwrap();
    let (traj, _) = evolve(&u0, &cfg).unwrap();
    let w = pullback(&traj).unwrap();
    for s in w.snapshots() {
        assert!(s.l2_distance(&u0) < 1e-12);
    }
    // no nonlinearity: u_+ is the datum itself
    assert_eq!(uplus_truncated(&traj, EquationKind::Linear).unwrap(), u0);
    // free Gaussian decays like t^{-1/2}
    let slope = decay_exponent(&decay_tracker(&traj), 2.0, 4.0).unwrap();
    assert!((slope + 0.5).abs() < 0.05, "{slope}");
}

#[test]
fn free_decay_over_long_window() {
    let grid = GridSpec::new(2048, 160.0).unwrap();
    let u0 = ComplexField::from_real_fn(grid, |x| (-x * x).exp()).unwrap();
    let traj = Trajectory::sample(Trajectory::uniform_times(8.0, 80), |t| {
        free_propagate(&u0, t)
    })
    .unwrap();
    let slope = decay_exponent(&decay_tracker(&traj), 2.0, 8.0).unwrap();
    assert!((slope + 0.5).abs() < 0.05, "{slope}");
    let zero = Trajectory::sample(vec![0.0, 1.0], |_| Ok(ComplexField::zeros(grid))).unwrap();
    assert!(decay_tracker(&zero).iter().all(|p| p.1 == 0.0));
    assert!(xt_accumulate(&zero, 0.5)
        .unwrap()
        .iter()
        .all(|p| p.1 == 0.0));
}

#[test]
fn soliton_does_not_decay() {
    let p = SolitonParams::new(1.0, 0.5, 2.0).unwrap();
    let grid = GridSpec::new(2048, 80.0).unwrap();
    let traj = Trajectory::sample(Trajectory::uniform_times(8.0, 40), |t| {
        traveling_wave(&p, &grid, t)
    })
    .unwrap();
    let slope = decay_exponent(&decay_tracker(&traj), 2.0, 8.0).unwrap();
    assert!(slope.abs() < 0.02, "{slope}");
}

#[test]
fn small_data_contracts_and_uplus() {
    let traj = small_run(0.05, 2e-3, 10, 8.0);
    let c = pullback_cauchy(&traj, &dyadic_windows(2.0, 8.0), DEFAULT_S_PRIME).unwrap();
    assert_eq!(c.len(), 2);
    assert!(c[1].2 < c[0].2, "{c:?}");

    // u_+ from the prefix on [0, 4] misses exactly the pull-back increment on [4, 8]
    let half = traj.prefix(traj.nearest_index(4.0) + 1).unwrap();
    assert!((half.final_time() - 4.0).abs() < 1e-12);
    let up4 = uplus_truncated(&half, GDNLS2).unwrap();
    let up8 = uplus_truncated(&traj, GDNLS2).unwrap();
    let r4 = uplus_residual(&traj, &up4, 8.0).unwrap();
    let r8 = uplus_residual(&traj, &up8, 8.0).unwrap();
    let tail = pullback_cauchy(&traj, &[(4.0, 8.0)], 0.0).unwrap()[0].2;
    eprintln!(
        "u+ residual at t = 8: from [0,4] {r4:e}, from [0,8] {r8:e}; pull-back tail {tail:e}"
    );
    assert!(r8 < r4);
    assert!((r4 / tail - 1.0).abs() < 1e-2);

    // denser snapshots barely move u_+
    let dense = small_run(0.05, 2e-3, 5, 8.0);
    let diff = uplus_truncated(&dense, GDNLS2).unwrap().l2_distance(&up8);
    assert!(diff < 1e-6, "{diff:e}");
}

#[test]
fn duhamel_is_linear_in_its_input_stream() {
    let traj = small_run(0.2, 2e-3, 10, 1.0);
    let n: Vec<ComplexField> = traj
        .snapshots()
        .iter()
        .map(|u| nonlinearity(u, 2.0).unwrap())
        .collect();
    let m: Vec<ComplexField> = traj
        .snapshots()
        .iter()
        .map(|u| u.scaled(Complex64::new(0.0, 0.3)))
        .collect();
    let (a, b) = (Complex64::new(1.5, 0.0), Complex64::new(-0.25, 0.5));
    let mixed: Vec<ComplexField> = n
        .iter()
        .zip(&m)
        .map(|(x, y)| x.scaled(a).add(&y.scaled(b)))
        .collect();
    let lhs = duhamel_integral(traj.times(), &mixed).unwrap();
    let rhs = duhamel_integral(traj.times(), &n)
        .unwrap()
        .scaled(a)
        .add(&duhamel_integral(traj.times(), &m).unwrap().scaled(b));
    assert!(lhs.l2_distance(&rhs) < 1e-13 * lhs.l2_norm().max(1.0));
}

#[test]
fn sparse_trajectory_rejected() {
    let traj = small_run(0.05, 1e-2, 5, 1.0);
    assert!(matches!(
        uplus_truncated(&traj, GDNLS2),
        Err(gdnls_core::Error::TooSparse { .. })
    ));
}

#[test]
fn delta_sweep_scattering_signature() {
    let mut finals = Vec::new();
    for delta in [0.02, 0.04, 0.08] {
        let traj = small_run(delta, 2e-3, 10, 8.0);
        let report = scatter_report(&traj, GDNLS2, 0.5, DEFAULT_S_PRIME).unwrap();
        let d: Vec<f64> = report.pullback_cauchy.iter().map(|c| c.2).collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "delta {delta}: {d:?}");
        assert!(report.xt_norm_curve.windows(2).all(|w| w[1].1 >= w[0].1));
        let e = report.decay_exponent.unwrap();
        assert!((e + 0.5).abs() < 0.05, "delta {delta}: {e}");
        finals.push(report.xt_norm_curve.last().unwrap().1);
    }
    let (r1, r2) = (finals[1] / finals[0], finals[2] / finals[1]);
    eprintln!("final X_T: {finals:?}");
    assert!((r2 / r1 - 1.0).abs() < 0.2);
}

/// Small sigma = 1 soliton near the left endpoint.
fn small_soliton() -> (SolitonParams, GridSpec, ComplexField) {
    let p = SolitonParams::from_alpha(1.0, 2f64.powi(-8), 1.0).unwrap();
    let grid = resolved_grid(&p);
    let phi = full_wave(&p, &grid).unwrap();
    (p, grid, phi)
}

#[test]
fn small_soliton_does_not_scatter() {
    let (p, grid, phi) = small_soliton();
    let h1 = sobolev_norm(&phi, 1.0, false).unwrap();
    assert!((0.05..0.2).contains(&h1), "{h1}");

    // evolution control on [1, 8]: pull-back differences do not shrink
    let cfg = EvolutionConfig::new(EquationKind::Gdnls { sigma: 1.0 }, grid, 0.02, 8.0)
        .unwrap()
        .with_stride(5)
        .unwrap();
    let (traj, report) = evolve(&phi, &cfg).unwrap();
    assert!(report.mass_drift() < 1e-9);
    let exact = traveling_wave(&p, &grid, 8.0).unwrap();
    assert!(traj.snapshots().last().unwrap().l2_distance(&exact) < 1e-8 * h1);
    let c = pullback_cauchy(&traj, &dyadic_windows(1.0, 8.0), DEFAULT_S_PRIME).unwrap();
    assert!(c.windows(2).all(|w| w[1].2 >= w[0].2), "{c:?}");
    let e = decay_exponent(&decay_tracker(&traj), 2.0, 8.0).unwrap();
    assert!(e.abs() < 0.02);

    // witness on the rotation time scale of the pull-back, from the exact solution
    let t2 = 4.0 * std::f64::consts::PI / p.alpha().powi(2);
    let w0 = phi.clone();
    let w2 = free_propagate(&traveling_wave(&p, &grid, t2).unwrap(), -t2).unwrap();
    let gap = sobolev_norm(&w2.sub(&w0), 1.0, false).unwrap();
    eprintln!("pull-back gap at t = {t2:.0}: {gap:.4} vs ||phi||_H1 = {h1:.4}");
    assert!(gap > 0.5 * h1);
}
