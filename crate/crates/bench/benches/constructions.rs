use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use macc_core::construct::{cyclic, general, lift};
use macc_core::delivery::{numeric_simulate, schedule};
use macc_core::verify::{brute_force_min_fill, check_delivery_array};
use macc_core::{DemandVector, NetworkParams};

fn general_construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("general");
    for (k, r, t, l) in [(9, 2, 2, 2), (12, 2, 2, 2), (14, 2, 3, 2)] {
        let p = NetworkParams::new(k, r, t, l).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(format!("{k}-{r}-{t}-{l}")), &p, |b, p| {
            b.iter(|| {
                let c = general::build_caching_array_i(p).unwrap();
                general::build_delivery_array_i(&c, p).unwrap()
            })
        });
    }
    group.finish();
}

fn cyclic_construction(c: &mut Criterion) {
    let p = NetworkParams::new(29, 2, 3, 23).unwrap();
    c.bench_function("cyclic/case-a-29", |b| b.iter(|| cyclic::build_delivery_array_case_a(&p).unwrap()));
    let q = NetworkParams::new(27, 2, 1, 3).unwrap();
    c.bench_function("cyclic/case-b-27", |b| b.iter(|| cyclic::build_delivery_array_case_b(&q).unwrap()));
}

fn lift_construction(c: &mut Criterion) {
    let a = lift::epda_source(6, 2, 2).unwrap();
    c.bench_function("lift/6-2-2-r3", |b| {
        b.iter(|| {
            let caching = lift::lift_caching(&a, 3).unwrap();
            lift::lift_delivery(&a, &caching, 3).unwrap()
        })
    });
}

fn checking(c: &mut Criterion) {
    let p = NetworkParams::new(12, 2, 2, 2).unwrap();
    let caching = general::build_caching_array_i(&p).unwrap();
    let d = general::build_delivery_array_i(&caching, &p).unwrap();
    c.bench_function("verify/general-12", |b| b.iter(|| check_delivery_array(&caching, &d, 2).unwrap()));
}

fn simulation(c: &mut Criterion) {
    let p = NetworkParams::new(7, 2, 2, 3).unwrap();
    let d = cyclic::build_delivery_array_case_a(&p).unwrap();
    let plan = schedule(&d, &DemandVector::distinct(7, 7).unwrap()).unwrap();
    c.bench_function("simulate/7-2-2-3", |b| b.iter(|| numeric_simulate(&plan, &d, 1, 1e-6).unwrap()));
}

fn brute_force(c: &mut Criterion) {
    let p = NetworkParams::new(5, 1, 3, 2).unwrap();
    let caching = cyclic::build_caching_array_cyclic(&p).unwrap();
    c.bench_function("brute-force/5-1-3-2", |b| b.iter(|| brute_force_min_fill(&caching, &p, 1_000_000).unwrap()));
}

criterion_group!(benches, general_construction, cyclic_construction, lift_construction, checking, simulation, brute_force);
criterion_main!(benches);
