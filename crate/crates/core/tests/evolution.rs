use gdnls_core::evolution::*;
use gdnls_core::soliton::{full_wave, traveling_wave, SolitonParams};
use gdnls_core::spectral::derivative;
use gdnls_core::{Complex64, ComplexField, GridSpec};

fn soliton_setup() -> (SolitonParams, GridSpec, ComplexField) {
    let p = SolitonParams::new(1.0, 0.5, 2.0).unwrap();
    let grid = GridSpec::new(2048, 80.0).unwrap();
    let phi = full_wave(&p, &grid).unwrap();
    (p, grid, phi)
}

fn soliton_error(dt: f64) -> (f64, ConservedReport) {
    let (p, grid, phi) = soliton_setup();
    let cfg = EvolutionConfig::new(EquationKind::Gdnls { sigma: 2.0 }, grid, dt, 1.0)
        .unwrap()
        .with_stride(usize::MAX)
        .unwrap();
    let (traj, report) = evolve(&phi, &cfg).unwrap();
    let exact = traveling_wave(&p, &grid, 1.0).unwrap();
    let last = traj.snapshots().last().unwrap();
    (last.l2_distance(&exact) / exact.l2_norm(), report)
}

fn gaussian(grid: GridSpec, amp: f64, k: f64) -> ComplexField {
    ComplexField::from_fn(grid, |x| Complex64::from_polar(amp * (-x * x).exp(), k * x)).unwrap()
}

#[test]
fn soliton_propagation_and_order() {
    let (e_fine, r_fine) = soliton_error(1e-4);
    assert!(e_fine < 1e-6, "{e_fine:e}");
    assert!(r_fine.mass_drift() < 1e-9);
    let (e1, r1) = soliton_error(5e-4);
    let (e2, r2) = soliton_error(2.5e-4);
    let ratio = e1 / e2;
    eprintln!("soliton error dt=5e-4 {e1:e}, 2.5e-4 {e2:e}, 1e-4 {e_fine:e}; ratio {ratio:.2}");
    assert!((12.0..24.0).contains(&ratio), "{ratio}");

    // candidate energy: drift refines at fourth order as well
    let (_, _, phi) = soliton_setup();
    let kinetic = 0.5 * derivative(&phi).unwrap().l2_norm().powi(2);
    let d1 = r1.energy_drift(kinetic).unwrap();
    let d2 = r2.energy_drift(kinetic).unwrap();
    eprintln!("energy drift {d1:e} -> {d2:e} (ratio {:.2})", d1 / d2);
    assert!((12.0..24.0).contains(&(d1 / d2)));
    for r in [&r1, &r2] {
        assert!(r.mass_drift() < 1e-9);
        assert!(!r.linf_growth_flagged);
    }
}

#[test]
fn soliton_linf_does_not_decay() {
    let (_, r) = soliton_error(2.5e-4);
    let first = r.linf[0];
    assert!(r.linf.iter().all(|v| (v / first - 1.0).abs() < 1e-3));
}

#[test]
fn small_gaussian_mass_drift() {
    let grid = GridSpec::new(2048, 160.0).unwrap();
    let u0 = gaussian(grid, 0.05, 0.0);
    let cfg = EvolutionConfig::new(EquationKind::Gdnls { sigma: 2.0 }, grid, 2e-3, 8.0).unwrap();
    let (_, r) = evolve(&u0, &cfg).unwrap();
    assert!(r.mass_drift() < 1e-10, "{:e}", r.mass_drift());
    assert!(!r.linf_growth_flagged);
}

#[test]
fn unit_size_data_mass_drift() {
    let grid = GridSpec::new(2048, 160.0).unwrap();
    let u0 = gaussian(grid, 0.5, 0.5);
    let h1 = gdnls_core::spectral::sobolev_norm(&u0, 1.0, false).unwrap();
    assert!(h1 <= 1.0);
    for eq in [
        EquationKind::Gdnls { sigma: 2.0 },
        EquationKind::Gdnls { sigma: 1.0 },
        EquationKind::Dnls,
    ] {
        let cfg = EvolutionConfig::new(eq, grid, 2e-3, 8.0)
            .unwrap()
            .with_stride(50)
            .unwrap();
        let (_, r) = evolve(&u0, &cfg).unwrap();
        assert!(r.mass_drift() < 1e-9, "{eq:?}: {:e}", r.mass_drift());
        assert_eq!(r.energy.is_some(), !matches!(eq, EquationKind::Dnls));
    }
}

#[test]
fn dnls_small_datum_mass() {
    let grid = GridSpec::new(2048, 160.0).unwrap();
    let u0 = gaussian(grid, 0.05, 0.3);
    let cfg = EvolutionConfig::new(EquationKind::Dnls, grid, 2e-3, 8.0).unwrap();
    let (_, r) = evolve(&u0, &cfg).unwrap();
    assert!(r.mass_drift() < 1e-10, "{:e}", r.mass_drift());
}

#[test]
fn time_reversal() {
    let grid = GridSpec::new(2048, 160.0).unwrap();
    let u0 = gaussian(grid, 0.5, 0.5);
    let cfg = EvolutionConfig::new(EquationKind::Gdnls { sigma: 2.0 }, grid, 2e-3, 2.0)
        .unwrap()
        .with_stride(usize::MAX)
        .unwrap();
    let (fwd, _) = evolve(&u0, &cfg).unwrap();
    let (back, _) = evolve_backward(fwd.snapshots().last().unwrap(), &cfg).unwrap();
    let err = back.snapshots().last().unwrap().l2_distance(&u0);
    assert!(err < 1e-6, "{err:e}");
}

#[test]
fn dnls_adjointness() {
    let grid = GridSpec::new(1024, 60.0).unwrap();
    let u = ComplexField::from_fn(grid, |x| {
        Complex64::new(0.7, 0.2)
            * (-(x - 1.0) * (x - 1.0)).exp()
            * Complex64::from_polar(1.0, 1.3 * x)
            + Complex64::new(-0.1, 0.4) * (-x * x / 3.0).exp()
    })
    .unwrap();
    let n = dnls_nonlinearity(&u).unwrap();
    let cubic = u.map(|_, v| v * v.norm_sqr()).unwrap();
    let du = derivative(&u).unwrap();
    let h = grid.spacing();
    let a: f64 = u
        .values()
        .iter()
        .zip(n.values())
        .map(|(v, w)| (v.conj() * w).re)
        .sum::<f64>()
        * h;
    let b: f64 = cubic
        .values()
        .iter()
        .zip(du.values())
        .map(|(c, d)| (c * d.conj()).re)
        .sum::<f64>()
        * h;
    assert!((a + b).abs() < 1e-12, "{a} + {b}");
}

#[test]
fn nonlinearity_of_constant_vanishes() {
    let grid = GridSpec::new(64, 10.0).unwrap();
    let u = ComplexField::from_real_fn(grid, |_| 0.8).unwrap();
    for sigma in [0.5, 1.0, 2.5] {
        assert!(nonlinearity(&u, sigma).unwrap().max_abs() < 1e-14);
    }
    assert!(nonlinearity(&u, 0.25).is_err());
}

#[test]
fn soliton_nonlinearity_balances_profile_equation() {
    // i N(phi) + phi'' = omega phi + c i phi'
    let (p, grid, phi) = soliton_setup();
    let n = nonlinearity_with(&phi, 2.0, false).unwrap();
    let d1 = derivative(&phi).unwrap();
    let d2 = derivative(&d1).unwrap();
    let mut worst = 0.0f64;
    for j in 0..grid.n_points() {
        let lhs = Complex64::i() * n.values()[j] + d2.values()[j];
        let rhs = phi.values()[j] * p.omega() + Complex64::i() * p.c() * d1.values()[j];
        worst = worst.max((lhs - rhs).norm());
    }
    assert!(worst < 1e-6, "{worst:e}");
}
