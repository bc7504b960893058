use std::path::Path;

use mrga_core::baseline::{run_baseline, BaselineConfig};
use mrga_core::blockstore::*;
use mrga_core::engine::*;
use mrga_core::ga::{evaluate, Chromosome, GaParams, Population};
use mrga_core::objective::{ObjectiveSpec, Sphere};
use mrga_core::Error;

fn config(path: &Path, spec: &ObjectiveSpec, capacity: u64, mode: Mode, ga: GaParams, parallelism: usize) -> JobConfig {
    let header = read_header(path).unwrap();
    JobConfig {
        mode,
        ga,
        reduce_ga: None,
        objective: spec.clone(),
        population_path: path.to_path_buf(),
        manifest: split_into_blocks(&header, capacity * header.record_size()).unwrap(),
        parallelism,
    }
}

fn ga(dim: usize, iterations: usize, seed: u64) -> GaParams {
    GaParams {
        dimension: dim,
        iterations,
        elite_rate: 0.05,
        master_seed: seed,
        ..GaParams::default()
    }
}

#[test]
fn job_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.bin");
    let spec = ObjectiveSpec::sphere(8);
    generate_population_file(&path, 600, &spec, 1).unwrap();
    for mode in [Mode::Basic, Mode::EliteReduce] {
        let one = run_job(&config(&path, &spec, 100, mode, ga(8, 20, 3), 1)).unwrap();
        let many = run_job(&config(&path, &spec, 100, mode, ga(8, 20, 3), 8)).unwrap();
        assert!(one.best_chromosome.bit_eq(&many.best_chromosome));
        assert_eq!(one.mer.to_bits(), many.mer.to_bits());
        assert_eq!(one.map_count, 6);
        let strip = |r: &JobResult| {
            r.map_reports
                .iter()
                .map(|m| {
                    (
                        m.block_index,
                        m.input_count,
                        m.emitted_count,
                        m.best_fitness_final.to_bits(),
                    )
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&one), strip(&many));
    }
}

#[test]
fn elite_reduce_never_worse_than_basic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.bin");
    let spec = ObjectiveSpec::sphere(6);
    generate_population_file(&path, 400, &spec, 2).unwrap();
    let basic = run_job(&config(&path, &spec, 100, Mode::Basic, ga(6, 15, 4), 2)).unwrap();
    let elite = run_job(&config(&path, &spec, 100, Mode::EliteReduce, ga(6, 15, 4), 2)).unwrap();
    assert!(elite.mer <= basic.mer);
    assert_eq!(basic.emitted_count, 4 * 5);
    assert_eq!(elite.reduce_generations, 15);
    assert_eq!(basic.mer, basic.best_chromosome.fitness().unwrap());
}

#[test]
fn emission_count_matches_rule_on_uneven_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.bin");
    let spec = ObjectiveSpec::sphere(3);
    generate_population_file(&path, 250, &spec, 5).unwrap();
    let cfg = config(
        &path,
        &spec,
        110,
        Mode::Basic,
        GaParams {
            elite_rate: 0.03,
            ..ga(3, 3, 0)
        },
        2,
    );
    let outputs = run_map_phase(&cfg).unwrap();
    let sizes: Vec<usize> = outputs.iter().map(|o| o.report.input_count).collect();
    assert_eq!(sizes, vec![110, 110, 30]);
    let emitted: Vec<usize> = outputs.iter().map(|o| o.records.len()).collect();
    assert_eq!(emitted, vec![4, 4, 1]);
}

#[test]
fn emitted_elites_are_the_smallest_final_fitnesses() {
    let spec = ObjectiveSpec::sphere(5);
    let sphere = Sphere::new(5).unwrap();
    let p = GaParams {
        elite_rate: 0.01,
        ..ga(5, 10, 0)
    };
    let block = generate_population(1000, &spec, 6).unwrap();
    let out = run_map_task(0, block.clone(), &p, &sphere, 77).unwrap();
    assert_eq!(out.records.len(), 10);

    // Oracle: replay the same evolution and fully sort the final fitnesses.
    let mut replay = block;
    evaluate(&mut replay, &sphere, &p).unwrap();
    let evo = mrga_core::ga::run_generations(replay, &p, &sphere, &mut mrga_core::rng::RngStream::new(77)).unwrap();
    let mut all: Vec<f64> = evo.population.members().iter().map(|c| c.fitness().unwrap()).collect();
    all.sort_by(f64::total_cmp);
    let emitted: Vec<f64> = out.records.iter().map(|r| r.value.fitness().unwrap()).collect();
    assert_eq!(emitted, all[..10].to_vec());
}

#[test]
fn degenerate_last_block_names_the_block() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.bin");
    let spec = ObjectiveSpec::sphere(3);
    generate_population_file(&path, 102, &spec, 5).unwrap();
    let err = run_job(&config(&path, &spec, 50, Mode::Basic, ga(3, 2, 0), 2)).unwrap_err();
    match err {
        Error::MapTask { block, source } => {
            assert_eq!(block, 2);
            assert!(matches!(*source, Error::Degenerate(_)));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn elite_reduce_with_too_few_elites_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.bin");
    let spec = ObjectiveSpec::sphere(3);
    generate_population_file(&path, 200, &spec, 5).unwrap();
    let err = run_job(&config(
        &path,
        &spec,
        100,
        Mode::EliteReduce,
        GaParams {
            elite_rate: 0.01,
            ..ga(3, 2, 0)
        },
        1,
    ))
    .unwrap_err();
    assert!(matches!(err, Error::Reduce(_)), "{err:?}");
}

#[test]
fn basic_mode_finds_planted_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("planted.bin");
    let spec = ObjectiveSpec::sphere(4);
    let mut members = generate_population(200, &spec, 9).unwrap().into_members();
    let planted = Chromosome::new(vec![0.5, -0.25, 0.0, 0.125]);
    members[150] = planted.clone();
    write_population(&path, &Population::new(members).unwrap(), &spec, 9).unwrap();

    let result = run_job(&config(&path, &spec, 100, Mode::Basic, ga(4, 5, 1), 2)).unwrap();
    let expected = 0.25 + 0.0625 + 0.015625;
    assert_eq!(result.mer, expected);
    assert_eq!(result.best_chromosome.genes(), planted.genes());
}

#[test]
fn elite_reduce_is_repeatable_at_paper_block_shape() {
    // 7 blocks of 1500, D = 300, S = 1 %, I = 100.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.bin");
    let spec = ObjectiveSpec::sphere(300);
    generate_population_file(&path, 7 * 1500, &spec, 11).unwrap();
    let p = GaParams {
        iterations: 100,
        master_seed: 11,
        ..GaParams::default()
    };
    let a = run_job(&config(&path, &spec, 1500, Mode::EliteReduce, p.clone(), 1)).unwrap();
    let b = run_job(&config(&path, &spec, 1500, Mode::EliteReduce, p, 3)).unwrap();
    assert_eq!(a.map_count, 7);
    assert_eq!(a.emitted_count, 7 * 15);
    assert_eq!(a.mer.to_bits(), b.mer.to_bits());
}

#[test]
fn baseline_matches_single_block_map_task() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.bin");
    let spec = ObjectiveSpec::sphere(300);
    let p = GaParams {
        iterations: 30,
        master_seed: 21,
        ..GaParams::default()
    };
    generate_population_file(&path, 1500, &spec, 21).unwrap();
    let job = run_job(&config(&path, &spec, 1500, Mode::Basic, p.clone(), 1)).unwrap();
    let base = run_baseline(&BaselineConfig {
        count: 1500,
        params: p,
        objective: spec,
        mem_limit_bytes: None,
    })
    .unwrap();
    assert_eq!(job.map_count, 1);
    assert_eq!(base.mer.to_bits(), job.mer.to_bits());
}

#[test]
fn config_mismatch_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.bin");
    let spec = ObjectiveSpec::sphere(3);
    generate_population_file(&path, 20, &spec, 1).unwrap();
    let mut cfg = config(&path, &spec, 10, Mode::Basic, ga(3, 1, 0), 1);
    cfg.ga.dimension = 4;
    assert!(matches!(run_job(&cfg), Err(Error::Config(_))));
    let mut cfg = config(&path, &spec, 10, Mode::Basic, ga(3, 1, 0), 0);
    cfg.parallelism = 0;
    assert!(matches!(run_job(&cfg), Err(Error::Config(_))));
}
