mod common;

use common::{bisect, rel_diff};
use effshock::homogenize::effective_parameters;
use effshock::rh::{
    connect_right_going, effective_shock_speed, left_stress_for_speed, legacy_transverse_speed,
    predict, threshold_ch, threshold_cm, threshold_cm_variant, MeanThreshold,
};
use effshock::{ConstitutiveLaw, Direction, Error, MediumSpec};

/// Speed from strains found by bisection on the effective stress law.
fn speed_oracle(sl: f64, sr: f64, law: &ConstitutiveLaw, spec: &MediumSpec) -> f64 {
    let med = effective_parameters(spec).unwrap();
    let eps = |s: f64| bisect(|e| law.stress(med.k_bar, e) - s, -10.0, 10.0);
    ((sl - sr) / (med.rho_bar * (eps(sl) - eps(sr)))).sqrt()
}

#[test]
fn speed_matches_oracle() {
    for law in [ConstitutiveLaw::Exponential, ConstitutiveLaw::paper_cubic()] {
        for theta in [0.0, 22.5, 45.0, 67.5, 90.0] {
            let spec = MediumSpec::layered(1.0, 1.0, 4.0, 2.0).with_theta(theta);
            let med = effective_parameters(&spec).unwrap();
            for (sl, sr) in [(2.0, 0.0), (8.0, 1.0), (0.5, 0.4)] {
                let s = effective_shock_speed(sl, sr, &law, &med, Direction::Right).unwrap();
                assert!(rel_diff(s, speed_oracle(sl, sr, &law, &spec)) < 1e-9);
                let left = effective_shock_speed(sl, sr, &law, &med, Direction::Left).unwrap();
                assert_eq!(left, -s);
            }
        }
    }
}

#[test]
fn linear_law_speed_is_effective_sound_speed() {
    let spec = MediumSpec::layered(1.0, 1.0, 4.0, 4.0).with_theta(90.0);
    let med = effective_parameters(&spec).unwrap();
    let s = effective_shock_speed(1.0, 0.0, &ConstitutiveLaw::linear(), &med, Direction::Right)
        .unwrap();
    assert!(rel_diff(s, med.c_eff) < 1e-14);
    assert!(rel_diff(s, 0.8) < 1e-14);
}

#[test]
fn connected_states_satisfy_jump_conditions() {
    let law = ConstitutiveLaw::Exponential;
    let spec = MediumSpec::layered(1.0, 1.0, 3.5, 2.0).with_theta(45.0);
    let med = effective_parameters(&spec).unwrap();
    let setup = connect_right_going(4.0, 0.5, 0.3, &law, &med).unwrap();
    let [r1, r2] = setup.rh_residuals();
    assert!(r1.abs() < 1e-13 && r2.abs() < 1e-12);
    assert!(setup.u_l < setup.u_r);
    assert!(setup.speed > 0.0);
}

#[test]
fn transverse_speed_reduces_to_legacy_formula() {
    let spec = MediumSpec::layered(1.3, 0.6, 4.2, 2.5)
        .with_fraction(0.3)
        .with_theta(90.0);
    let med = effective_parameters(&spec).unwrap();
    for law in [ConstitutiveLaw::Exponential, ConstitutiveLaw::paper_cubic()] {
        let s = effective_shock_speed(3.0, 0.2, &law, &med, Direction::Right).unwrap();
        let legacy = legacy_transverse_speed(&spec, &law, 3.0, 0.2).unwrap();
        assert!(rel_diff(s, legacy) < 1e-12);
    }
}

#[test]
fn degenerate_and_bad_jumps() {
    let law = ConstitutiveLaw::Exponential;
    let med = effective_parameters(&MediumSpec::layered(1.0, 1.0, 2.0, 1.0)).unwrap();
    assert!(matches!(
        effective_shock_speed(1.0, 1.0, &law, &med, Direction::Right),
        Err(Error::DegenerateShock)
    ));
    assert!(effective_shock_speed(1.0, -1.5, &law, &med, Direction::Right).is_err());
}

#[test]
fn thresholds() {
    let law = ConstitutiveLaw::Exponential;
    // equal sound speeds: every mean is that speed
    let z = MediumSpec::layered(1.0, 1.0, 4.0, 4.0);
    assert!(rel_diff(threshold_ch(&z, &law, 0.0).unwrap(), 1.0) < 1e-15);
    assert!(rel_diff(threshold_cm(&z, &law, 0.0).unwrap(), 1.0) < 1e-15);
    // speeds 1 and 4
    let c = MediumSpec::layered(1.0, 1.0, 4.0, 0.25);
    assert!(rel_diff(threshold_ch(&c, &law, 0.0).unwrap(), 1.6) < 1e-15);
    assert!(rel_diff(threshold_cm(&c, &law, 0.0).unwrap(), 2.5) < 1e-15);
    let sq = threshold_cm_variant(&c, &law, 0.0, MeanThreshold::MeanSquaredSpeed).unwrap();
    assert!(rel_diff(sq, 8.5) < 1e-15);
    // pre-stress stiffens an exponential medium
    assert!(threshold_ch(&c, &law, 1.0).unwrap() > 1.6);
}

#[test]
fn left_stress_inverts_the_speed() {
    let law = ConstitutiveLaw::Exponential;
    let spec = MediumSpec::layered(1.0, 1.0, 4.0, 0.25).with_theta(0.0);
    let med = effective_parameters(&spec).unwrap();
    for target in [2.1, 2.5, 3.5] {
        let sl = left_stress_for_speed(target, 0.0, &law, &med).unwrap();
        let s = effective_shock_speed(sl, 0.0, &law, &med, Direction::Right).unwrap();
        assert!(rel_diff(s, target) < 1e-12, "{target}: {s}");
    }
}

#[test]
fn prediction_bundle() {
    let spec = MediumSpec::layered(1.0, 1.0, 4.0, 4.0).with_theta(90.0);
    let p = predict(&spec, &ConstitutiveLaw::Exponential, 1.0, 0.0, 0.0).unwrap();
    assert!(rel_diff(p.c_eff, 0.8) < 1e-14);
    assert_eq!(p.eps_r, 0.0);
    assert!(p.s_eff > p.c_eff);
    assert!(p.u_l < 0.0);
}
