use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use tanglefloer::chain::{quotient_boundary, Analysis, SignKind, Variant};
use tanglefloer::homology::homology_of;
use tanglefloer::snf::{smith_normal_form, to_big};
use tanglefloer::tracer::{builtin_map, trace, TraceParams};
use tanglefloer_bench::{dense, tangle, CHAOS, FIGURE8, TILTED};

fn snf(c: &mut Criterion) {
    let mut g = c.benchmark_group("snf");
    for n in [8, 16, 32] {
        let m = to_big(&dense(n));
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| smith_normal_form(black_box(m))));
    }
    g.finish();
}

fn homology(c: &mut Criterion) {
    let mut g = c.benchmark_group("homology");
    for (name, text, v, k) in [
        ("figure8", FIGURE8, Variant::Primary, SignKind::M),
        ("tilted", TILTED, Variant::Primary, SignKind::M),
        ("chaos", CHAOS, Variant::Chaotic, SignKind::Nu),
    ] {
        let t = tangle(text);
        g.bench_function(name, |b| {
            b.iter(|| {
                let a = Analysis::new(black_box(t.clone())).unwrap();
                homology_of(&quotient_boundary(&a, v, k).unwrap()).unwrap()
            })
        });
    }
    g.finish();
}

fn tracer(c: &mut Criterion) {
    let mut g = c.benchmark_group("trace");
    g.sample_size(10);
    for tau in [0.0, 1.0] {
        let m = builtin_map("henon", &[tau, 0.3]).unwrap();
        let mut p = TraceParams::default();
        p.growth.budget = 8.0;
        g.bench_with_input(BenchmarkId::new("henon", tau), &p, |b, p| b.iter(|| trace(m.as_ref(), (0.0, 0.0), p).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, snf, homology, tracer);
criterion_main!(benches);
