use nalgebra::Matrix4;
use num_complex::Complex64;
use plasmon_cascade::cascade::*;
use plasmon_cascade::config::{parse_config, WindowMode};
use plasmon_cascade::entanglement::*;
use plasmon_cascade::units::from_mev;
use proptest::prelude::*;

fn reference() -> CascadeParams {
    parse_config("").unwrap().model().unwrap().params
}

fn symmetric() -> CascadeParams {
    let mut p = reference();
    p.fss = 0.0;
    p.y = p.x;
    p
}

#[test]
fn identical_channels_give_one_half() {
    let p = symmetric();
    let w = SpectralWindow::for_params(&p, from_mev(1.0), WindowMode::Product).unwrap();
    let grid = FrequencyGrid::for_params(&p, 401, None).unwrap();
    let f = filtered_integrals(&amplitude_grid(&p, &grid).unwrap(), &w).unwrap();
    assert!((f.gamma_prime_abs() - 0.5).abs() < 1e-14);
    assert!((f.concurrence - 1.0).abs() < 1e-13);
    let (g, _) = filtered_entanglement(&p, &w, &Quadrature::default()).unwrap();
    assert!((g.concurrence - 1.0).abs() < 1e-6);
}

#[test]
fn closed_y_channel_has_no_coherence() {
    let mut p = reference();
    p.y.g_bx = 0.0;
    let w = SpectralWindow::for_params(&p, from_mev(1.0), WindowMode::Product).unwrap();
    let (f, _) = filtered_entanglement(&p, &w, &Quadrature::default()).unwrap();
    assert_eq!(f.p, Complex64::new(0.0, 0.0));
    assert_eq!(f.concurrence, 0.0);
    assert_eq!(f.beta_sq, 0.0);
}

#[test]
fn vanishing_splitting_restores_full_entanglement() {
    let mut p = symmetric();
    p.fss = from_mev(1e-7);
    let w = SpectralWindow::for_params(&p, from_mev(1.0), WindowMode::Product).unwrap();
    let (f, _) = filtered_entanglement(&p, &w, &Quadrature::default()).unwrap();
    assert!((f.concurrence - 1.0).abs() < 1e-6, "{}", f.concurrence);
}

#[test]
fn dense_grid_agrees_with_band_aligned_quadrature() {
    let p = reference();
    let w = SpectralWindow::for_params(&p, from_mev(1.0), WindowMode::Product).unwrap();
    let (aligned, _) = filtered_entanglement(&p, &w, &Quadrature::default()).unwrap();
    let grid = FrequencyGrid::for_params(&p, 1601, Some(from_mev(3.0))).unwrap();
    let dense = filtered_integrals(&amplitude_grid(&p, &grid).unwrap(), &w).unwrap();
    assert!((aligned.gamma_prime_abs() - dense.gamma_prime_abs()).abs() < 2e-3);
    assert!((aligned.t - dense.t).abs() < 2e-2 * aligned.t);
}

#[test]
fn window_outside_the_lines_is_empty() {
    let p = reference();
    let w = SpectralWindow::new(
        from_mev(0.1),
        p.omega0 + from_mev(500.0),
        p.binding,
        WindowMode::Product,
    )
    .unwrap();
    let grid = FrequencyGrid::for_params(&p, 201, None).unwrap();
    let r = filtered_integrals(&amplitude_grid(&p, &grid).unwrap(), &w);
    assert!(matches!(r, Err(plasmon_cascade::Error::EmptyWindow)));
}

#[test]
fn window_centres_and_edges() {
    let p = reference();
    let w = SpectralWindow::for_params(&p, from_mev(0.5), WindowMode::Product).unwrap();
    assert!(window_value(p.omega0, &w));
    assert!(window_value(p.omega0 - p.binding, &w));
    assert!(!window_value(p.omega0 + p.binding + from_mev(1.0), &w));
}

#[test]
fn density_matrix_validation() {
    let mut m = Matrix4::<Complex64>::zeros();
    m[(0, 0)] = Complex64::new(0.5, 0.0);
    m[(3, 3)] = Complex64::new(0.5, 0.0);
    m[(0, 3)] = Complex64::new(0.2, 0.1);
    assert!(PolarizationDensityMatrix::new(m).is_err());
    m[(3, 0)] = Complex64::new(0.2, -0.1);
    assert!(PolarizationDensityMatrix::new(m).is_ok());
    m[(0, 0)] = Complex64::new(0.6, 0.0);
    assert!(PolarizationDensityMatrix::new(m).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn wootters_equals_twice_coherence(a in 0.0f64..=1.0, r in 0.0f64..=1.0, phi in -3.2f64..3.2) {
        let b = 1.0 - a;
        let g = Complex64::from_polar(r * (a * b).sqrt(), phi);
        let rho = PolarizationDensityMatrix::from_weights(a, b, g).unwrap();
        let c = concurrence_of_matrix(&rho);
        prop_assert!((c - 2.0 * g.norm()).abs() < 1e-10, "{} vs {}", c, 2.0 * g.norm());
    }
}
