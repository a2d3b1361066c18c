use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pgroup_bench::{entry, enumeration_inputs};
use pgroup_core::enumerate;
use pgroup_core::enumerator::DEFAULT_MAX_COSETS;
use pgroup_core::goursat::goursat_census;
use pgroup_core::resistance::{commutator_identity_check, theorem_witness};
use pgroup_core::structure::{all_subgroups, are_isomorphic};

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    for (name, pres) in enumeration_inputs() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &pres, |b, pres| {
            b.iter(|| enumerate(black_box(pres), DEFAULT_MAX_COSETS).unwrap())
        });
    }
    group.finish();
}

fn lattice(c: &mut Criterion) {
    let mut group = c.benchmark_group("lattice");
    for (p, name) in [(2, "D8"), (2, "N64c3"), (3, "C3wrC3")] {
        let g = entry(p, name).group;
        group.bench_function(name, |b| b.iter(|| all_subgroups(black_box(&g)).unwrap()));
    }
    group.finish();
}

fn census(c: &mut Criterion) {
    let mut group = c.benchmark_group("goursat_census");
    group.sample_size(10);
    for (p, l, r) in [(2, "D4", "Q8"), (2, "C4xC4", "C2xC4"), (3, "Heis3", "C3xC3")] {
        let (a, b) = (entry(p, l).group, entry(p, r).group);
        group.bench_function(format!("{l},{r}"), |bench| {
            bench.iter(|| goursat_census(black_box(&a), black_box(&b)).unwrap())
        });
    }
    group.finish();
}

fn isomorphism(c: &mut Criterion) {
    let a = entry(2, "N64c2").group;
    let b = entry(2, "N64c3").group;
    c.bench_function("are_isomorphic/N64c2", |bench| bench.iter(|| are_isomorphic(&a, &a)));
    c.bench_function("are_isomorphic/N64c2-N64c3", |bench| {
        bench.iter(|| are_isomorphic(&a, &b))
    });
}

fn scenarios(c: &mut Criterion) {
    let r2 = entry(2, "R2");
    let pair = r2.generating_pair().unwrap();
    c.bench_function("theorem_witness/R2", |b| {
        b.iter(|| theorem_witness(&r2.group, pair, &r2.group, pair).unwrap())
    });
    let wr = entry(3, "C3wrC3").group;
    c.bench_function("identities/C3wrC3", |b| {
        b.iter(|| commutator_identity_check(&wr).unwrap())
    });
}

criterion_group!(benches, enumeration, lattice, census, isomorphism, scenarios);
criterion_main!(benches);
