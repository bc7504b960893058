//! MapReduce-shaped driver.
//!
//! Each block of the population file is one map task: it evaluates and
//! evolves its chromosomes, then emits the top `max(1, ceil(S * n))` as
//! [`EliteRecord`]s under a single shuffle key. The shuffle concatenates the
//! emissions in `(origin_block, rank)` order. The reducer either picks the
//! best elite ([`Mode::Basic`]) or runs the GA again on the mixed-elite
//! population ([`Mode::EliteReduce`]).
//!
//! Task seeds are `mix_seed(master_seed, block_index)` and the reducer uses
//! `mix_seed(master_seed, REDUCE_STREAM)`, so a job's result does not depend
//! on the worker count or on the order in which tasks finish.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blockstore::{read_block, read_header, BlockManifest};
use crate::error::{Error, Result};
use crate::ga::{best_of, evaluate, rank, run_generations, Chromosome, GaParams, GenerationStats, Population};
use crate::objective::{lookup_objective, Objective, ObjectiveSpec};
use crate::rng::{mix_seed, RngStream, REDUCE_STREAM};

/// Every elite goes to the one reducer.
pub const SHUFFLE_KEY: u32 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Reduce selects the best emitted elite.
    Basic,
    /// Reduce evolves the union of all emitted elites.
    #[serde(rename = "elite")]
    EliteReduce,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Basic => "basic",
            Mode::EliteReduce => "elite",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(Mode::Basic),
            "elite" | "elite-reduce" | "elite_reduce" => Ok(Mode::EliteReduce),
            other => Err(Error::config(format!(
                "unknown mode `{other}` (expected basic or elite)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct JobConfig {
    pub mode: Mode,
    pub ga: GaParams,
    /// Reduce-phase parameters; `None` reuses `ga`.
    pub reduce_ga: Option<GaParams>,
    pub objective: ObjectiveSpec,
    pub population_path: PathBuf,
    pub manifest: BlockManifest,
    /// Upper bound on concurrently running map tasks.
    pub parallelism: usize,
}

impl JobConfig {
    pub fn reduce_params(&self) -> &GaParams {
        self.reduce_ga.as_ref().unwrap_or(&self.ga)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EliteRecord {
    pub key: u32,
    pub value: Chromosome,
    pub origin_block: usize,
    /// Position within the emitting map's final ranking (0 = best).
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapTaskReport {
    pub block_index: usize,
    pub input_count: usize,
    pub emitted_count: usize,
    pub best_fitness_initial: f64,
    pub best_fitness_final: f64,
    pub generations_run: usize,
    pub wall_time: Duration,
}

#[derive(Debug, Clone)]
pub struct MapOutput {
    pub records: Vec<EliteRecord>,
    pub report: MapTaskReport,
}

#[derive(Debug, Clone)]
pub struct ReduceOutput {
    pub best: Chromosome,
    pub history: Vec<GenerationStats>,
}

#[derive(Debug, Clone)]
pub struct JobResult {
    pub best_chromosome: Chromosome,
    /// Fitness of `best_chromosome`.
    pub mer: f64,
    pub mode: Mode,
    pub map_count: usize,
    pub emitted_count: usize,
    pub reduce_generations: usize,
    pub total_wall_time: Duration,
    pub map_phase_time: Duration,
    pub shuffle_time: Duration,
    pub reduce_phase_time: Duration,
    pub map_reports: Vec<MapTaskReport>,
}

pub fn task_seed(master_seed: u64, block_index: usize) -> u64 {
    mix_seed(master_seed, block_index as u64)
}

pub fn reduce_seed(master_seed: u64) -> u64 {
    mix_seed(master_seed, REDUCE_STREAM)
}

/// Evaluates and evolves one block, then emits its elites in rank order.
pub fn run_map_task(
    block_index: usize,
    block: Population,
    params: &GaParams,
    objective: &dyn Objective,
    task_seed: u64,
) -> Result<MapOutput> {
    let wrap = |e: Error| Error::MapTask {
        block: block_index,
        source: Box::new(e),
    };
    let started = Instant::now();
    let input_count = block.len();
    if input_count < 4 {
        return Err(wrap(Error::degenerate(format!(
            "block holds {input_count} chromosome(s); a map task needs at least 4"
        ))));
    }
    let mut block = block;
    evaluate(&mut block, objective, params).map_err(wrap)?;
    let mut rng = RngStream::new(task_seed);
    let evolution = run_generations(block, params, objective, &mut rng).map_err(wrap)?;

    let emit = params.elite_count(input_count);
    let records: Vec<EliteRecord> = evolution
        .population
        .members()
        .iter()
        .take(emit)
        .enumerate()
        .map(|(rank, c)| EliteRecord {
            key: SHUFFLE_KEY,
            value: c.clone(),
            origin_block: block_index,
            rank,
        })
        .collect();

    let report = MapTaskReport {
        block_index,
        input_count,
        emitted_count: records.len(),
        best_fitness_initial: evolution.initial_best,
        best_fitness_final: evolution.best_fitness(),
        generations_run: evolution.generations_run(),
        wall_time: started.elapsed(),
    };
    Ok(MapOutput { records, report })
}

/// Gathers all emitted elites into the reducer's population, ordered by
/// `(origin_block, rank)` regardless of the order maps finished in.
pub fn shuffle<I>(emissions: I) -> Result<Population>
where
    I: IntoIterator<Item = Vec<EliteRecord>>,
{
    let mut records: Vec<EliteRecord> = emissions.into_iter().flatten().collect();
    if records.is_empty() {
        return Err(Error::Reduce("no elite records reached the shuffle".into()));
    }
    records.sort_by_key(|r| (r.origin_block, r.rank));
    Population::new(records.into_iter().map(|r| r.value).collect())
}

/// The best elite, without further evolution.
pub fn reduce_basic(elites: &Population) -> Result<Chromosome> {
    best_of(elites).cloned()
}

/// Evolves the mixed-elite population and returns its best member.
pub fn reduce_elite(
    elites: Population,
    params: &GaParams,
    objective: &dyn Objective,
    reduce_seed: u64,
) -> Result<ReduceOutput> {
    if elites.len() < 4 {
        return Err(Error::Reduce(format!(
            "elite reduce needs at least 4 elites but the maps emitted {}; \
             raise the elite rate or use more blocks",
            elites.len()
        )));
    }
    let mut elites = elites;
    evaluate(&mut elites, objective, params)?;
    rank(&mut elites)?;
    let mut rng = RngStream::new(reduce_seed);
    let evolution = run_generations(elites, params, objective, &mut rng)?;
    Ok(ReduceOutput {
        best: best_of(&evolution.population)?.clone(),
        history: evolution.history,
    })
}

fn check_config(config: &JobConfig) -> Result<()> {
    config.ga.validate()?;
    config.reduce_params().validate()?;
    if config.parallelism == 0 {
        return Err(Error::config("parallelism must be at least 1"));
    }
    if config.ga.dimension != config.objective.dimension {
        return Err(Error::config(format!(
            "GA dimension {} differs from objective dimension {}",
            config.ga.dimension, config.objective.dimension
        )));
    }
    let header = read_header(&config.population_path)?;
    if header.dimension as usize != config.objective.dimension {
        return Err(Error::config(format!(
            "population file has D={} but the objective expects D={}",
            header.dimension, config.objective.dimension
        )));
    }
    if config.manifest.record_size != header.record_size() {
        return Err(Error::config("manifest record size does not match the population file"));
    }
    config.manifest.validate(header.chromosome_count)?;
    Ok(())
}

/// Runs every map task on a pool of at most `config.parallelism` workers and
/// returns their outputs in block order. The first failing block (by index)
/// aborts the phase.
pub fn run_map_phase(config: &JobConfig) -> Result<Vec<MapOutput>> {
    check_config(config)?;
    let objective = lookup_objective(&config.objective)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<MapOutput>> = pool.install(|| {
        (0..config.manifest.len())
            .into_par_iter()
            .map(|index| {
                let block =
                    read_block(&config.population_path, &config.manifest, index).map_err(|e| Error::MapTask {
                        block: index,
                        source: Box::new(e),
                    })?;
                run_map_task(
                    index,
                    block,
                    &config.ga,
                    objective.as_ref(),
                    task_seed(config.ga.master_seed, index),
                )
            })
            .collect()
    });
    results.into_iter().collect()
}

pub fn run_job(config: &JobConfig) -> Result<JobResult> {
    let started = Instant::now();
    let outputs = run_map_phase(config)?;
    let map_phase_time = started.elapsed();

    let shuffle_started = Instant::now();
    let mut map_reports = Vec::with_capacity(outputs.len());
    let mut emissions = Vec::with_capacity(outputs.len());
    for out in outputs {
        map_reports.push(out.report);
        emissions.push(out.records);
    }
    let elites = shuffle(emissions)?;
    let emitted_count = elites.len();
    let shuffle_time = shuffle_started.elapsed();

    let reduce_started = Instant::now();
    let (best, reduce_generations) = match config.mode {
        Mode::Basic => (reduce_basic(&elites)?, 0),
        Mode::EliteReduce => {
            let params = config.reduce_params();
            let objective = lookup_objective(&config.objective)?;
            let out = reduce_elite(elites, params, objective.as_ref(), reduce_seed(params.master_seed))?;
            let generations = out.history.len();
            (out.best, generations)
        }
    };
    let reduce_phase_time = reduce_started.elapsed();

    let mer = best
        .fitness()
        .ok_or_else(|| Error::contract("reduce produced an unevaluated chromosome"))?;
    Ok(JobResult {
        best_chromosome: best,
        mer,
        mode: config.mode,
        map_count: config.manifest.len(),
        emitted_count,
        reduce_generations,
        total_wall_time: started.elapsed(),
        map_phase_time,
        shuffle_time,
        reduce_phase_time,
        map_reports,
    })
}
