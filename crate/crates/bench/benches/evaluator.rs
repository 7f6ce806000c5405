use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use teamsem::{AtomRegistry, EvalOptions, Evaluator};
use teamsem_bench::{formula, model, teams, FORMULAS};

fn strategies(c: &mut Criterion) {
    let m = model();
    let teams = teams(&m, 3);
    let mut group = c.benchmark_group("evaluator");
    for (name, src) in FORMULAS {
        let phi = formula(src);
        for (label, options) in [("accelerated", EvalOptions::default()), ("oracle", EvalOptions::oracle())] {
            group.bench_with_input(BenchmarkId::new(label, name), &phi, |b, phi| {
                b.iter(|| {
                    // fresh evaluator per iteration so the memo starts empty
                    let mut ev = Evaluator::new(&m, AtomRegistry::builtin_ref(), phi, options).unwrap();
                    teams.iter().filter(|t| ev.eval(t).unwrap()).count()
                })
            });
        }
    }
    group.finish();
}

fn single_team(c: &mut Criterion) {
    let m = model();
    let team = teams(&m, 4).pop().unwrap();
    let phi = formula("E y. (nondep(x;y) /\\ const(y)) \\/ A y. inconst(y)");
    c.bench_function("evaluator/four_rows", |b| {
        b.iter(|| Evaluator::new(&m, AtomRegistry::builtin_ref(), &phi, EvalOptions::default()).unwrap().eval(black_box(&team)).unwrap())
    });
}

criterion_group!(benches, strategies, single_team);
criterion_main!(benches);
