use gdnls_core::evolution::{evolve, EquationKind, EvolutionConfig};
use gdnls_core::gauge::{gauge_transform, GaugeDirection};
use gdnls_core::{Complex64, ComplexField, GridSpec};

fn datum(grid: GridSpec) -> ComplexField {
    ComplexField::from_fn(grid, |x| {
        Complex64::from_polar(0.5 * (-x * x).exp(), 0.3 * x)
    })
    .unwrap()
}

fn final_state(u0: &ComplexField, eq: EquationKind, dt: f64) -> ComplexField {
    let cfg = EvolutionConfig::new(eq, *u0.grid(), dt, 0.5)
        .unwrap()
        .with_stride(usize::MAX)
        .unwrap();
    evolve(u0, &cfg)
        .unwrap()
        .0
        .snapshots()
        .last()
        .unwrap()
        .clone()
}

fn equivalence_error(dt: f64) -> f64 {
    let grid = GridSpec::new(2048, 80.0).unwrap();
    let u0 = datum(grid);
    let direct = final_state(&u0, EquationKind::Gdnls { sigma: 1.0 }, dt);
    let v0 = gauge_transform(&u0, GaugeDirection::Forward).unwrap();
    let v = final_state(&v0, EquationKind::Dnls, dt);
    let back = gauge_transform(&v, GaugeDirection::Inverse).unwrap();
    back.l2_distance(&direct)
}

#[test]
fn modulus_mass_and_round_trip() {
    let grid = GridSpec::new(2048, 80.0).unwrap();
    let u = datum(grid);
    let v = gauge_transform(&u, GaugeDirection::Forward).unwrap();
    for (a, b) in u.values().iter().zip(v.values()) {
        assert!((a.norm() - b.norm()).abs() < 1e-15);
    }
    assert!((u.l2_norm() - v.l2_norm()).abs() < 1e-14);
    let back = gauge_transform(&v, GaugeDirection::Inverse).unwrap();
    assert!(back.l2_distance(&u) < 1e-12);
    // past the bump the accumulated phase is -||u||^2 / 2
    let last = ((4.0 - grid.x_min()) / grid.spacing()).round() as usize;
    let twist = (v.values()[last] / u.values()[last]).arg();
    let expected = -0.5 * u.l2_norm().powi(2);
    assert!((twist - expected).abs() < 1e-10, "{twist} vs {expected}");
}

#[test]
fn edge_violation_rejected() {
    let grid = GridSpec::new(256, 10.0).unwrap();
    let u = ComplexField::from_real_fn(grid, |x| (-x * x / 8.0).exp()).unwrap();
    assert!(gauge_transform(&u, GaugeDirection::Forward).is_err());
}

#[test]
fn gauge_equivalence() {
    let fine = equivalence_error(1e-4);
    let coarse = equivalence_error(1e-3);
    eprintln!("gauge equivalence error: dt=1e-3 {coarse:e}, dt=1e-4 {fine:e}");
    assert!(fine < 1e-5);
    assert!(coarse < 1e-5);
}

#[test]
fn equivalence_error_refines_at_fourth_order() {
    // coarse steps keep the error above the rounding floor
    let e: Vec<f64> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&dt| equivalence_error(dt))
        .collect();
    for w in e.windows(2) {
        let ratio = w[0] / w[1];
        assert!((12.0..24.0).contains(&ratio), "{e:?}");
    }
}
