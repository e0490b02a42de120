mod common;

use common::{rel_diff, simpson};
use effshock::homogenize::{
    density_at_angle, effective_density, effective_parameters, homogenized_system,
    period_average, periodic_mean,
};
use effshock::{ConstitutiveLaw, MediumSpec};

#[test]
fn sinusoidal_means_match_quadrature() {
    let spec = MediumSpec::sinusoidal(1.0, 0.5, 5.0, 3.0);
    let med = effective_parameters(&spec).unwrap();
    let at = |p: f64| spec.material_at_phase(p);
    let inv_k = simpson(&|p| 1.0 / at(p).stiffness, 0.0, 1.0, 1e-14);
    let rho = simpson(&|p| at(p).density, 0.0, 1.0, 1e-14);
    let inv_rho = simpson(&|p| 1.0 / at(p).density, 0.0, 1.0, 1e-14);
    assert!(rel_diff(med.k_bar, 1.0 / inv_k) < 1e-10);
    assert!(rel_diff(med.rho_m, rho) < 1e-10);
    assert!(rel_diff(med.rho_h, 1.0 / inv_rho) < 1e-10);
}

#[test]
fn sinusoidal_harmonic_mean_closed_form() {
    // mean m, amplitude a: <1 / (m + a sin)>^-1 = sqrt(m^2 - a^2)
    let med = effective_parameters(&MediumSpec::sinusoidal(1.0, 1.0, 5.0, 1.0)).unwrap();
    assert!(rel_diff(med.k_bar, 5f64.sqrt()) < 1e-10);
}

#[test]
fn periodic_mean_of_trig_polynomial() {
    let m = periodic_mean(|p| 2.0 + (std::f64::consts::TAU * p).cos().powi(2), 1e-13).unwrap();
    assert!((m - 2.5).abs() < 1e-13);
}

#[test]
fn layered_averages() {
    let spec = MediumSpec::layered(1.0, 1.0, 4.0, 0.25);
    let med = effective_parameters(&spec).unwrap();
    assert!(rel_diff(med.k_bar, 1.6) < 1e-15);
    assert!(rel_diff(med.rho_m, 0.625) < 1e-15);
    assert!(rel_diff(med.rho_h, 0.4) < 1e-15);
    let avg_speed = period_average(&spec, |m| m.linear_speed()).unwrap();
    assert!(rel_diff(avg_speed, 2.5) < 1e-15);
}

#[test]
fn density_interpolates_with_angle() {
    let (rh, rm) = (0.4, 0.625);
    assert_eq!(density_at_angle(rh, rm, 0.0), rh);
    assert_eq!(density_at_angle(rh, rm, 90.0), rm);
    let mid = density_at_angle(rh, rm, 45.0);
    assert!(rel_diff(mid, 1.0 / (0.5 / rh + 0.5 / rm)) < 1e-15);
    let mut prev = rh;
    for k in 1..=90 {
        let d = density_at_angle(rh, rm, k as f64);
        assert!(d >= prev);
        prev = d;
    }
    let spec = MediumSpec::layered(1.0, 1.0, 4.0, 0.25);
    assert!(effective_density(&spec, 95.0).is_err());
    assert_eq!(effective_density(&spec, 90.0).unwrap(), rm);
}

#[test]
fn homogeneous_medium_is_its_own_average() {
    let spec = MediumSpec::homogeneous(2.0, 3.0).with_theta(37.0);
    let med = effective_parameters(&spec).unwrap();
    assert_eq!((med.k_bar, med.rho_m, med.rho_h), (2.0, 3.0, 3.0));
    assert!(rel_diff(med.rho_bar, 3.0) < 1e-15);
    let sys = homogenized_system(&med, &ConstitutiveLaw::Exponential);
    assert_eq!(sys.material().stiffness, 2.0);
    assert!(rel_diff(sys.stress(0.3), (0.6f64).exp_m1()) < 1e-15);
    assert!(rel_diff(sys.inverse_stress(sys.stress(0.3)).unwrap(), 0.3) < 1e-13);
}
