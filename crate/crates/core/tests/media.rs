mod common;

use common::{bisect, derivative, rel_diff, simpson};
use effshock::{ConstitutiveLaw, Error, Material, MediumSpec, Profile};

fn laws() -> Vec<ConstitutiveLaw> {
    vec![
        ConstitutiveLaw::Exponential,
        ConstitutiveLaw::paper_cubic(),
        ConstitutiveLaw::cubic(1.0, 0.5, 0.3).unwrap(),
        ConstitutiveLaw::linear(),
    ]
}

#[test]
fn slope_matches_finite_differences() {
    for law in laws() {
        for w in [-1.3, -0.2, 0.0, 0.4, 1.7] {
            let fd = derivative(|x| law.stress_hat(x), w, 1e-3);
            assert!(
                rel_diff(law.stress_hat_prime(w), fd) < 1e-9,
                "{law:?} at {w}"
            );
            let (s, p) = law.stress_and_slope(w);
            assert_eq!(s, law.stress_hat(w));
            assert!(rel_diff(p, law.stress_hat_prime(w)) < 1e-15);
        }
    }
}

#[test]
fn inverse_matches_bisection() {
    for law in laws() {
        for sigma in [-0.6, -0.1, 0.0, 0.3, 2.0, 9.0] {
            let want = bisect(|w| law.stress_hat(w) - sigma, -20.0, 20.0);
            let got = law.stress_hat_inverse(sigma).unwrap();
            assert!((got - want).abs() <= 1e-11 * want.abs().max(1.0), "{law:?} {sigma}");
        }
    }
}

#[test]
fn exponential_inverse_is_log1p() {
    let law = ConstitutiveLaw::Exponential;
    for sigma in [-0.999, -0.5, 1e-9, 3.0, 1e6] {
        let got = law.stress_hat_inverse(sigma).unwrap();
        assert!(rel_diff(got, sigma.ln_1p()) < 1e-13);
    }
    assert!(matches!(
        law.stress_hat_inverse(-1.0),
        Err(Error::StressOutOfRange { .. })
    ));
}

#[test]
fn stress_potential_matches_quadrature() {
    for law in laws() {
        for (k, eps) in [(1.0, 0.4), (4.0, -0.1), (0.3, 2.0)] {
            let q = simpson(&|z| law.stress(k, z), 0.0, eps, 1e-14);
            assert!(
                (law.stress_potential(k, eps) - q).abs() < 1e-12 * q.abs().max(1.0),
                "{law:?} k={k} eps={eps}"
            );
        }
    }
}

#[test]
fn sound_speed_definition() {
    let law = ConstitutiveLaw::Exponential;
    let (k, rho, eps) = (3.0, 0.5, 0.2);
    let c = law.sound_speed(k, rho, eps).unwrap();
    let want = (k * (k * eps).exp() / rho).sqrt();
    assert!(rel_diff(c, want) < 1e-15);
    let m = Material::new(4.0, 0.25);
    assert!(rel_diff(m.linear_speed(), 4.0) < 1e-15);
    assert!(rel_diff(m.linear_impedance(), 1.0) < 1e-15);
}

#[test]
fn layered_materials_by_phase() {
    let spec = MediumSpec::layered(1.0, 2.0, 3.0, 4.0).with_fraction(0.25);
    assert_eq!(spec.material_at_phase(0.1), Material::new(1.0, 2.0));
    assert_eq!(spec.material_at_phase(0.3), Material::new(3.0, 4.0));
    // xi = x sin(theta) + y cos(theta)
    let oblique = spec.with_theta(30.0);
    assert_eq!(oblique.material_at(0.4, 0.0), Material::new(1.0, 2.0));
    assert_eq!(oblique.material_at(0.6, 0.0), Material::new(3.0, 4.0));
    let parallel = spec.with_theta(0.0);
    assert_eq!(parallel.material_at(0.9, 0.1), Material::new(1.0, 2.0));
    assert_eq!(parallel.material_at(0.1, 0.9), Material::new(3.0, 4.0));
}

#[test]
fn sinusoidal_profile_spans_both_materials() {
    let spec = MediumSpec::sinusoidal(1.0, 1.0, 5.0, 2.0);
    assert_eq!(spec.profile, Profile::Sinusoidal);
    let ks: Vec<f64> = (0..1000)
        .map(|i| spec.material_at_phase(i as f64 / 1000.0).stiffness)
        .collect();
    let (lo, hi) = ks.iter().fold((f64::MAX, f64::MIN), |(a, b), &k| (a.min(k), b.max(k)));
    assert!((lo - 1.0).abs() < 1e-4 && (hi - 5.0).abs() < 1e-4);
}

#[test]
fn invalid_media_are_rejected() {
    assert!(MediumSpec::layered(-1.0, 1.0, 1.0, 1.0).validate().is_err());
    assert!(MediumSpec::layered(1.0, 1.0, 1.0, 0.0).validate().is_err());
    assert!(MediumSpec::layered(1.0, 1.0, 2.0, 1.0)
        .with_theta(91.0)
        .validate()
        .is_err());
    assert!(MediumSpec::layered(1.0, 1.0, 2.0, 1.0)
        .with_fraction(1.0)
        .validate()
        .is_err());
    assert!(MediumSpec::layered(1.0, 1.0, 2.0, 1.0)
        .with_period(0.0)
        .validate()
        .is_err());
    assert!(ConstitutiveLaw::cubic(0.1, 1.0, 0.1).is_err());
    assert!(ConstitutiveLaw::cubic_on_range(0.1, 1.0, 0.1, 0.0, 1.0).is_ok());
}

#[test]
fn normalization_scales() {
    let spec = MediumSpec::layered(2.0, 8.0, 6.0, 4.0);
    let (n, sc) = spec.normalize();
    assert_eq!((n.k_a, n.rho_a, n.k_b, n.rho_b), (1.0, 1.0, 3.0, 0.5));
    assert!(rel_diff(sc.speed_scale(), 0.5) < 1e-15);
    assert!(rel_diff(sc.velocity_scale(), 4.0) < 1e-15);
    assert_eq!(sc.strain_scale, 2.0);
}

#[test]
fn laws_round_trip_through_toml() {
    #[derive(serde::Serialize, serde::Deserialize, PartialEq, Debug)]
    struct Wrap {
        law: ConstitutiveLaw,
    }
    for law in laws() {
        let w = Wrap { law };
        let text = toml::to_string(&w).unwrap();
        assert_eq!(toml::from_str::<Wrap>(&text).unwrap(), w);
    }
}
