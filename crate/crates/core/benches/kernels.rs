use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use clifford_malliavin::applications::{concentration_tail, ConcentrationOptions};
use clifford_malliavin::grid::TimeGrid;
use clifford_malliavin::oracle::MatrixOracle;
use clifford_malliavin::par::Execution;
use clifford_malliavin::random::{random_element, random_self_adjoint_element, rng_for};
use clifford_malliavin::suite::{self, Suite, SuiteConfig};

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn multiply(c: &mut Criterion) {
    let mut group = c.benchmark_group("multiply");
    for d in [6, 8] {
        let grid = TimeGrid::unit(d).unwrap();
        let mut rng = rng_for(1, d as u64);
        let f = random_element(&mut rng, grid, d);
        let g = random_element(&mut rng, grid, d);
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, d), &d, |b, _| {
                b.iter(|| f.multiply_with(&g, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn to_matrix(c: &mut Criterion) {
    let mut group = c.benchmark_group("to_matrix");
    for d in [6, 8] {
        let grid = TimeGrid::unit(d).unwrap();
        let oracle = MatrixOracle::new(grid).unwrap();
        let f = random_element(&mut rng_for(2, d as u64), grid, d);
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, d), &d, |b, _| {
                b.iter(|| oracle.to_matrix_with(&f, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn matrix_product(c: &mut Criterion) {
    let mut group = c.benchmark_group("matrix_product");
    for d in [8, 10] {
        let grid = TimeGrid::unit(d).unwrap();
        let oracle = MatrixOracle::new(grid).unwrap();
        let mut rng = rng_for(3, d as u64);
        let a = oracle.to_matrix(&random_element(&mut rng, grid, 2)).unwrap();
        let b_ = oracle.to_matrix(&random_element(&mut rng, grid, 2)).unwrap();
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, d), &d, |b, _| b.iter(|| a.multiply_with(&b_, exec).unwrap()));
        }
    }
    group.finish();
}

fn concentration(c: &mut Criterion) {
    let mut group = c.benchmark_group("concentration_tail");
    group.sample_size(10);
    let grid = TimeGrid::unit(5).unwrap();
    let oracle = MatrixOracle::new(grid).unwrap();
    let f = random_self_adjoint_element(&mut rng_for(4, 0), grid, 3);
    for (name, exec) in POLICIES {
        let opts = ConcentrationOptions { s_steps: 100, execution: exec, ..Default::default() };
        group.bench_function(name, |b| b.iter(|| concentration_tail(&f, &oracle, &opts).unwrap()));
    }
    group.finish();
}

fn suite_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("malliavin_suite");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        let cfg = SuiteConfig { suites: vec![Suite::Malliavin], cases: Some(20), execution: exec, ..Default::default() };
        group.bench_function(name, |b| b.iter(|| suite::run_suite(&cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, multiply, to_matrix, matrix_product, concentration, suite_sweep);
criterion_main!(benches);
