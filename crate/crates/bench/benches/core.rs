use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ulam_core::quasiball::{strategy_to_covering, validate_collection};
use ulam_core::strategy::{one_lie_full_policy, verify_policy, VerifyOptions};
use ulam_core::{weight, GameSpec, GameVariant, Solver, SolverConfig, StateVector};

fn weights(c: &mut Criterion) {
    let x = StateVector::new([1234, 56789, 1_000_000, 7]).unwrap();
    c.bench_function("weight k=3 q=30", |b| b.iter(|| weight(black_box(30), black_box(&x)).unwrap()));
}

fn solver(c: &mut Criterion) {
    let mut g = c.benchmark_group("solver");
    g.sample_size(10);
    for (n, q) in [(90u64, 13u32), (89, 13)] {
        let x = StateVector::initial(n, 2);
        g.bench_function(format!("fresh ({n},0,0) q={q}"), |b| {
            b.iter(|| {
                Solver::new(GameVariant::Pathological, 2, SolverConfig::default())
                    .winner(&x, q)
                    .unwrap()
            })
        });
    }
    g.bench_function("f_star k=1 q=12", |b| {
        b.iter(|| Solver::new(GameVariant::Pathological, 1, SolverConfig::default()).f_star(12).unwrap())
    });
    g.finish();
}

fn verify(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    let (n, q) = (ulam_core::closed_forms::f_star_1(18).unwrap(), 18);
    let spec = GameSpec::new(GameVariant::Pathological, StateVector::initial(n, 1), q, 1).unwrap();
    let policy = one_lie_full_policy(n, q).unwrap();
    g.bench_function("one-lie policy q=18", |b| {
        b.iter(|| verify_policy(&spec, &policy, VerifyOptions::default()).unwrap())
    });
    g.finish();
}

fn covering(c: &mut Criterion) {
    let mut g = c.benchmark_group("covering");
    g.sample_size(10);
    let x = StateVector::initial(30, 1);
    let spec = GameSpec::new(GameVariant::Pathological, x.clone(), 8, 1).unwrap();
    let tree = Solver::new(GameVariant::Pathological, 1, SolverConfig::default())
        .extract_tree(&x, 8)
        .unwrap();
    let coll = strategy_to_covering(&tree, &spec).unwrap();
    g.bench_function("extract (30,0) q=8", |b| b.iter(|| strategy_to_covering(&tree, &spec).unwrap()));
    g.bench_function("validate (30,0) q=8", |b| b.iter(|| validate_collection(&coll).unwrap()));
    g.finish();
}

criterion_group!(benches, weights, solver, verify, covering);
criterion_main!(benches);
