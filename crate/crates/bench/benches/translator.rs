use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use teamsem::harness::corpus;
use teamsem::{translate, AtomRegistry, TranslateOptions};
use teamsem_bench::{formula, FORMULAS};

fn pinned(c: &mut Criterion) {
    let mut group = c.benchmark_group("translator");
    for (name, src) in FORMULAS {
        let phi = formula(src);
        for simplify in [false, true] {
            let opts = TranslateOptions { vars: None, simplify };
            let label = if simplify { "simplified" } else { "plain" };
            group.bench_with_input(BenchmarkId::new(label, name), &phi, |b, phi| b.iter(|| translate(black_box(phi), AtomRegistry::builtin_ref(), &opts).unwrap()));
        }
    }
    group.finish();
}

fn whole_corpus(c: &mut Criterion) {
    let formulas = corpus::translation(3, 100);
    let opts = TranslateOptions::default();
    c.bench_function("translator/corpus", |b| {
        b.iter(|| formulas.iter().map(|f| translate(f, AtomRegistry::builtin_ref(), &opts).unwrap().stats.output_size).sum::<usize>())
    });
}

criterion_group!(benches, pinned, whole_corpus);
criterion_main!(benches);
