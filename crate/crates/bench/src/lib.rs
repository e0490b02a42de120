//! Fixtures shared by the kernel benchmarks.

use effshock::homogenize::effective_parameters;
use effshock::rh::connect_right_going;
use effshock::{ConstitutiveLaw, Grid2D, MediumSpec, StateField};

/// Layered medium with a right-going shock at a quarter of the domain.
pub fn shock_state(theta: f64, resolution: f64, length_x: f64) -> (StateField, ConstitutiveLaw) {
    let spec = MediumSpec::layered(1.0, 1.0, 4.0, 4.0).with_theta(theta);
    let law = ConstitutiveLaw::Exponential;
    let med = effective_parameters(&spec).expect("valid medium");
    let setup = connect_right_going(2.0, 0.0, 0.0, &law, &med).expect("valid jump");
    let grid = Grid2D::for_medium(&spec, resolution, length_x).expect("valid grid");
    let mut state = StateField::from_medium(grid, &spec);
    state
        .set_shock(&setup, &law, 0.25 * length_x)
        .expect("shock state");
    (state, law)
}
