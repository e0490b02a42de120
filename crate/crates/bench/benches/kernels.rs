use criterion::{black_box, criterion_group, criterion_main, Criterion};

use effshock::solver::{max_courant, riemann_sweep, step, Axis};
use effshock::{ConstitutiveLaw, Material, SolverConfig};
use effshock_bench::shock_state;

fn inverse_stress(c: &mut Criterion) {
    let exp = ConstitutiveLaw::Exponential;
    let cubic = ConstitutiveLaw::paper_cubic();
    c.bench_function("inverse_stress/exponential", |b| {
        b.iter(|| exp.stress_hat_inverse(black_box(3.7)).unwrap())
    });
    c.bench_function("inverse_stress/cubic", |b| {
        b.iter(|| cubic.stress_hat_inverse(black_box(3.7)).unwrap())
    });
}

fn riemann(c: &mut Criterion) {
    let law = ConstitutiveLaw::Exponential;
    let (ml, mr) = (Material::new(1.0, 1.0), Material::new(4.0, 4.0));
    c.bench_function("riemann_sweep", |b| {
        b.iter(|| {
            riemann_sweep(
                black_box([0.4, -0.3, 0.0]),
                black_box([0.1, 0.0, 0.0]),
                ml,
                mr,
                &law,
                Axis::X,
            )
            .unwrap()
        })
    });
}

fn steps(c: &mut Criterion) {
    let cfg = SolverConfig::default();
    for (name, theta) in [("step/transverse", 90.0), ("step/oblique", 45.0), ("step/parallel", 0.0)] {
        let (state, law) = shock_state(theta, 32.0, 10.0);
        let dt = 0.5 * 0.9 / max_courant(&state, &law, 1.0).unwrap();
        c.bench_function(name, |b| b.iter(|| step(black_box(&state), &law, &cfg, dt).unwrap()));
    }
}

criterion_group!(benches, inverse_stress, riemann, steps);
criterion_main!(benches);
