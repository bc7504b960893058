use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use mrga_core::blockstore::{generate_population, generate_population_file, read_block, split_into_blocks};
use mrga_core::ga::{crossover_haupt, evaluate, run_generations, GaParams};
use mrga_core::objective::{sphere, ObjectiveSpec, Sphere};
use mrga_core::rng::RngStream;

fn objective(c: &mut Criterion) {
    let genes: Vec<f64> = (0..300).map(|i| i as f64 * 0.5 - 75.0).collect();
    c.bench_function("sphere_d300", |b| b.iter(|| sphere(black_box(&genes)).unwrap()));
}

fn operators(c: &mut Criterion) {
    let spec = ObjectiveSpec::sphere(300);
    let sphere = Sphere::new(300).unwrap();
    let params = GaParams {
        iterations: 1,
        ..GaParams::default()
    };
    let mut pop = generate_population(1500, &spec, 1).unwrap();
    evaluate(&mut pop, &sphere, &params).unwrap();

    c.bench_function("generation_1500x300", |b| {
        b.iter_batched(
            || pop.clone(),
            |p| run_generations(p, &params, &sphere, &mut RngStream::new(2)).unwrap(),
            BatchSize::LargeInput,
        )
    });

    let (m, f) = (&pop.members()[0], &pop.members()[1]);
    let mut rng = RngStream::new(3);
    c.bench_function("crossover_haupt_d300", |b| {
        b.iter(|| crossover_haupt(m, f, &mut rng).unwrap())
    });
}

fn block_io(c: &mut Criterion) {
    let dir = tempfile_dir();
    let path = dir.join("bench.bin");
    let header = generate_population_file(&path, 4 * 1500, &ObjectiveSpec::sphere(300), 4).unwrap();
    let manifest = split_into_blocks(&header, 1500 * header.record_size()).unwrap();
    c.bench_function("read_block_1500x300", |b| {
        b.iter(|| read_block(&path, &manifest, 2).unwrap())
    });
    std::fs::remove_file(&path).ok();
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("mrga-bench-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

criterion_group!(benches, objective, operators, block_io);
criterion_main!(benches);
