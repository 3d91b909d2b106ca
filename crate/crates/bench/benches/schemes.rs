use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use w1lab_core::shock::compute_profile;
use w1lab_core::solver::{prepare, step_eno_rk3, step_monotone};
use w1lab_core::{
    project, w1, w1_discrete, ConvexFlux, Grid, NumericalFlux, Order, Scheme, SchemeConfig,
    StepFunction,
};

fn initial_data() -> StepFunction {
    StepFunction::new(vec![0.25, 0.5], vec![2.0, 1.0, 0.0]).unwrap()
}

fn steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    let u0 = initial_data();
    for n in [1024, 8192] {
        let g = Grid::over(-0.5, 1.5, n).unwrap();
        let u = project(&u0, &g).unwrap();
        for scheme in Scheme::ALL {
            let cfg = SchemeConfig::new(
                NumericalFlux::new(scheme, ConvexFlux::burgers()),
                Order::Monotone1,
                0.3,
            );
            let (dt, cfg) = prepare(&u, &cfg).unwrap();
            group.bench_with_input(BenchmarkId::new(scheme.short_name(), n), &u, |b, u| {
                b.iter(|| step_monotone(black_box(u), &cfg, dt).unwrap())
            });
        }
        for order in [Order::Eno2, Order::Eno3] {
            let cfg = SchemeConfig::new(
                NumericalFlux::new(Scheme::Godunov, ConvexFlux::burgers()),
                order,
                0.3,
            );
            let (dt, cfg) = prepare(&u, &cfg).unwrap();
            group.bench_with_input(
                BenchmarkId::new(format!("godunov-{order}"), n),
                &u,
                |b, u| b.iter(|| step_eno_rk3(black_box(u), &cfg, dt).unwrap()),
            );
        }
    }
    group.finish();
}

fn metrics(c: &mut Criterion) {
    let u0 = initial_data();
    let v0 = StepFunction::new(vec![0.3, 0.45], vec![2.0, 1.0, 0.0]).unwrap();
    let g = Grid::over(-0.5, 1.5, 8192).unwrap();
    let (u, v) = (project(&u0, &g).unwrap(), project(&v0, &g).unwrap());
    c.bench_function("w1/exact/8192", |b| {
        b.iter(|| w1(black_box(&u), black_box(&v)).unwrap())
    });
    c.bench_function("w1/discrete/8192", |b| {
        b.iter(|| w1_discrete(black_box(&u), black_box(&v)).unwrap())
    });
}

fn profiles(c: &mut Criterion) {
    let mut group = c.benchmark_group("profile");
    group.sample_size(10);
    for scheme in [Scheme::LaxFriedrichs, Scheme::EngquistOsher] {
        let nf = NumericalFlux::new(scheme, ConvexFlux::burgers()).with_lambda(0.25);
        group.bench_function(scheme.short_name(), |b| {
            b.iter(|| compute_profile(&nf, 2.0, 0.0, 0.25, 40, 1e-10).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, steps, metrics, profiles);
criterion_main!(benches);
