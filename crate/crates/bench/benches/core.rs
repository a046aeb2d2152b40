use criterion::{black_box, criterion_group, criterion_main, Criterion};
use twogroups_bench::{sl3_4_exterior, sp4_4_permutations};
use twogroups_core::automorphisms::{aut_group_order, brute_force_aut, fusion_classes, known_aut_generators};
use twogroups_core::constructions::{build_a2, build_p_epsilon, A2Params, PepsParams};
use twogroups_core::{FieldContext, FieldElement, StabChain};

fn field(c: &mut Criterion) {
    let f = FieldContext::new(12, None).unwrap();
    let x = f.primitive_element();
    c.bench_function("gf4096_mul_chain", |b| {
        b.iter(|| (0..1000).fold(FieldElement::ONE, |acc, _| f.mul(acc, black_box(x))))
    });
    c.bench_function("gf4096_inverse", |b| b.iter(|| f.inv(black_box(x)).unwrap()));
}

fn groups(c: &mut Criterion) {
    c.bench_function("build_a2_5_1", |b| b.iter(|| build_a2(A2Params::new(5, 1)).unwrap()));
    c.bench_function("build_p_epsilon", |b| b.iter(|| build_p_epsilon(PepsParams::standard()).unwrap()));
    let p = build_p_epsilon(PepsParams::standard()).unwrap();
    let auts = known_aut_generators(&p).unwrap();
    c.bench_function("p_epsilon_fusion", |b| b.iter(|| fusion_classes(&p, &auts)));
    c.bench_function("p_epsilon_aut_order", |b| b.iter(|| aut_group_order(&p, &auts)));
    let a = build_a2(A2Params::new(3, 1)).unwrap();
    let mut slow = c.benchmark_group("slow");
    slow.sample_size(10);
    slow.bench_function("brute_force_aut_a2_3_1", |b| b.iter(|| brute_force_aut(&a).unwrap()));
    slow.finish();
}

fn chains_and_modules(c: &mut Criterion) {
    let (degree, perms) = sp4_4_permutations();
    c.bench_function("schreier_sims_sp4_4", |b| b.iter(|| StabChain::new(degree, &perms).order()));
    let lam = sl3_4_exterior();
    let mut slow = c.benchmark_group("slow");
    slow.sample_size(10);
    slow.bench_function("lattice_exterior_sl3_4", |b| b.iter(|| lam.submodule_lattice().unwrap().len()));
    slow.finish();
}

criterion_group!(benches, field, groups, chains_and_modules);
criterion_main!(benches);
