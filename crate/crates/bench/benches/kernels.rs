use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use logevo_core::quadrature::script_i;
use logevo_core::{
    mode_evaluate, Complex64, DataPair, Evolver, Field, GridSpec, InitialDatum, ModeClosedForm,
    Space, SymbolPoint, Tolerance,
};
use std::hint::black_box;

fn profile_integral(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut g = c.benchmark_group("script_i");
    for (n, t) in [(1, 1e5), (2, 1e5), (3, 1e4)] {
        g.bench_with_input(BenchmarkId::new(format!("n{n}"), t), &t, |b, &t| {
            b.iter(|| script_i(black_box(n), black_box(t), &tol).unwrap())
        });
    }
    g.finish();
}

fn modes(c: &mut Criterion) {
    let mut g = c.benchmark_group("mode_evaluate");
    for sigma in [1.0, 4.0, 20.0] {
        let m = ModeClosedForm::new(
            SymbolPoint::from_sigma(sigma).unwrap(),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.5, -0.5),
        );
        g.bench_with_input(BenchmarkId::from_parameter(sigma), &m, |b, m| {
            b.iter(|| mode_evaluate(m, black_box(7.5)).unwrap())
        });
    }
    g.finish();
}

fn solver(c: &mut Criterion) {
    let mut g = c.benchmark_group("evolve");
    g.sample_size(20);
    for (n, points) in [(1u32, 4096usize), (2, 256), (3, 64)] {
        let pair = DataPair::new(None, InitialDatum::gaussian(1.0, 1.0, n).unwrap()).unwrap();
        let grid = GridSpec::new(n, 40.0, points).unwrap();
        let u0 = Field::zeros(grid, Space::Physical);
        let u1 = Field::radial(grid, &pair.u1).unwrap();
        let ev = Evolver::new(&u0, &u1).unwrap();
        g.bench_function(BenchmarkId::new(format!("n{n}"), points), |b| {
            b.iter(|| ev.snapshot(black_box(20.0)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, profile_integral, modes, solver);
criterion_main!(benches);
