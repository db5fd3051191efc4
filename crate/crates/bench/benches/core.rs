use criterion::{criterion_group, criterion_main, Criterion};
use hexctx_bench::hexctx_core::atlas::{classify_planes, enumerate_plane_spreads};
use hexctx_bench::hexctx_core::cabello::{estimate_chi, InitialState, SimulationMode};
use hexctx_bench::hexctx_core::contextuality::{degree_exact, solve_achievability, DEFAULT_RANK_LIMIT};
use hexctx_bench::hexctx_core::hexagon::build_classical_hexagon;
use hexctx_bench::hexctx_core::PolarSpace;
use hexctx_bench::target;

fn gray_walk(c: &mut Criterion) {
    let resolved = target("elliptic:YYY");
    c.bench_function("degree_exact elliptic quadric", |b| {
        b.iter(|| degree_exact(&resolved.configuration, DEFAULT_RANK_LIMIT).unwrap())
    });
}

fn achievability(c: &mut Criterion) {
    let resolved = target("w52");
    let (_, candidate) = &resolved.options.candidates[0];
    c.bench_function("achievability of a hexagon in W(5,2)", |b| {
        b.iter(|| solve_achievability(&resolved.configuration, candidate).unwrap())
    });
}

fn spreads(c: &mut Criterion) {
    let w = PolarSpace::three_qubit();
    let h = build_classical_hexagon(w).unwrap();
    let tax = classify_planes(w, &h).unwrap();
    c.bench_function("plane spreads of a classical hexagon", |b| {
        b.iter(|| enumerate_plane_spreads(&tax).unwrap())
    });
}

fn doilies(c: &mut Criterion) {
    let w = PolarSpace::three_qubit();
    c.bench_function("linear doilies", |b| b.iter(|| w.enumerate_linear_doilies().unwrap()));
    c.bench_function("quadratic doilies", |b| b.iter(|| w.enumerate_quadratic_doilies().unwrap()));
}

fn simulation(c: &mut Criterion) {
    let resolved = target("elliptic:YYY");
    c.bench_function("exact chi of an elliptic quadric", |b| {
        b.iter(|| estimate_chi(&resolved.configuration, SimulationMode::Exact, &InitialState::default(), Some(9)).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = gray_walk, achievability, spreads, doilies, simulation
}
criterion_main!(benches);
