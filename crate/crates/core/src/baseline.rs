//! Single-process GA over one in-memory population, the reference point the
//! block-partitioned engine is compared against.

use std::time::{Duration, Instant};

use crate::blockstore::{generate_population, record_size};
use crate::engine::task_seed;
use crate::error::{Error, Result};
use crate::ga::{best_of, evaluate, run_generations, Chromosome, GaParams};
use crate::objective::{lookup_objective, ObjectiveSpec};
use crate::rng::RngStream;

#[derive(Debug, Clone)]
pub struct BaselineConfig {
    pub count: usize,
    /// `master_seed` seeds both the initial population and the evolution
    /// stream, mirroring block 0 of a job with the same seed.
    pub params: GaParams,
    pub objective: ObjectiveSpec,
    pub mem_limit_bytes: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct BaselineResult {
    pub best: Chromosome,
    pub mer: f64,
    pub estimated_bytes: u64,
    pub generations_run: usize,
    pub wall_time: Duration,
}

/// Serialized size of `count` chromosomes of dimension `dimension`, used as
/// the memory footprint estimate: `count * 8 * (D + 1)` bytes.
pub fn estimated_footprint(count: u64, dimension: usize) -> u64 {
    count.saturating_mul(record_size(dimension))
}

pub fn run_baseline(config: &BaselineConfig) -> Result<BaselineResult> {
    let started = Instant::now();
    let params = &config.params;
    params.validate()?;
    let estimated_bytes = estimated_footprint(config.count as u64, params.dimension);
    if let Some(limit) = config.mem_limit_bytes {
        if estimated_bytes > limit {
            return Err(Error::ResourceLimit {
                estimated_bytes,
                limit_bytes: limit,
            });
        }
    }
    if params.dimension != config.objective.dimension {
        return Err(Error::config(format!(
            "GA dimension {} differs from objective dimension {}",
            params.dimension, config.objective.dimension
        )));
    }
    let objective = lookup_objective(&config.objective)?;
    let mut population = generate_population(config.count, &config.objective, params.master_seed)?;
    evaluate(&mut population, objective.as_ref(), params)?;
    let mut rng = RngStream::new(task_seed(params.master_seed, 0));
    let evolution = run_generations(population, params, objective.as_ref(), &mut rng)?;
    let best = best_of(&evolution.population)?.clone();
    Ok(BaselineResult {
        mer: best.fitness().unwrap(),
        best,
        estimated_bytes,
        generations_run: evolution.generations_run(),
        wall_time: started.elapsed(),
    })
}
