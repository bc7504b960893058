//! Experiment rows, population sweeps and plot-ready summaries.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::blockstore::{generate_population_file, manifest_path_for, split_into_blocks, write_manifest};
use crate::engine::{run_job, JobConfig, JobResult, Mode};
use crate::error::{Error, Result};
use crate::ga::GaParams;
use crate::objective::ObjectiveSpec;

/// One job's outcome. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub population: u64,
    pub bytes: u64,
    pub blocks: usize,
    pub mode: Mode,
    pub mer: f64,
    pub wall_time_s: f64,
    pub seed: u64,
}

pub const CSV_COLUMNS: [&str; 7] = ["population", "bytes", "blocks", "mode", "mer", "wall_time_s", "seed"];

impl ExperimentRow {
    pub fn from_job(population: u64, bytes: u64, seed: u64, result: &JobResult) -> Self {
        Self {
            population,
            bytes,
            blocks: result.map_count,
            mode: result.mode,
            mer: result.mer,
            wall_time_s: result.total_wall_time.as_secs_f64(),
            seed,
        }
    }
}

/// Orders rows by `(mode, population, seed)`.
pub fn sort_rows(rows: &mut [ExperimentRow]) {
    rows.sort_by_key(|r| (r.mode, r.population, r.seed));
}

pub fn write_csv<W: Write>(writer: W, rows: &[ExperimentRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses rows; errors carry the offending line number.
pub fn read_csv<R: Read>(reader: R) -> Result<Vec<ExperimentRow>> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    if headers.iter().ne(CSV_COLUMNS) {
        return Err(Error::config(format!(
            "line 1: expected header `{}`, found `{}`",
            CSV_COLUMNS.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for record in r.deserialize() {
        rows.push(record?);
    }
    Ok(rows)
}

/// Median of `values`; the mean of the two middle values for even counts.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryPoint {
    pub mode: Mode,
    pub population: u64,
    pub runs: usize,
    pub median_mer: f64,
    pub median_time_s: f64,
}

/// Per-(mode, population) medians, ordered by mode then population.
pub fn summarize(rows: &[ExperimentRow]) -> Vec<SummaryPoint> {
    let mut groups: BTreeMap<(Mode, u64), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in rows {
        let g = groups.entry((r.mode, r.population)).or_default();
        g.0.push(r.mer);
        g.1.push(r.wall_time_s);
    }
    groups
        .into_iter()
        .map(|((mode, population), (mers, times))| SummaryPoint {
            mode,
            population,
            runs: mers.len(),
            median_mer: median(&mers).unwrap(),
            median_time_s: median(&times).unwrap(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub sizes: Vec<u64>,
    pub modes: Vec<Mode>,
    pub seeds: Vec<u64>,
    /// `master_seed` is overridden per run by each entry of `seeds`.
    pub ga: GaParams,
    pub objective: ObjectiveSpec,
    pub block_size_bytes: u64,
    pub parallelism: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.modes.is_empty() || self.seeds.is_empty() {
            return Err(Error::config("sweep needs at least one size, mode and seed"));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("sweep sizes must be strictly increasing"));
        }
        if self.sizes[0] == 0 {
            return Err(Error::config("sweep sizes must be positive"));
        }
        self.ga.validate()?;
        self.objective.validate()
    }

    pub fn run_count(&self) -> usize {
        self.sizes.len() * self.modes.len() * self.seeds.len()
    }
}

/// Runs every `(size, seed, mode)` combination. Population files are written
/// to `workdir` once per `(size, seed)` and shared by all modes. Each row is
/// passed to `on_row` as soon as it exists; the returned rows are sorted.
/// On failure, rows completed so far are handed back with the error.
pub fn run_sweep<F>(
    spec: &SweepSpec,
    workdir: &Path,
    mut on_row: F,
) -> std::result::Result<Vec<ExperimentRow>, (Vec<ExperimentRow>, Error)>
where
    F: FnMut(&ExperimentRow),
{
    let mut rows = Vec::with_capacity(spec.run_count());
    if let Err(e) = spec.validate() {
        return Err((rows, e));
    }
    for &size in &spec.sizes {
        for &seed in &spec.seeds {
            let step = || -> Result<Vec<ExperimentRow>> {
                let path = workdir.join(format!("pop-{size}-{seed}.bin"));
                let header = generate_population_file(&path, size, &spec.objective, seed)?;
                let manifest = split_into_blocks(&header, spec.block_size_bytes)?;
                write_manifest(manifest_path_for(&path), &manifest)?;
                let mut out = Vec::with_capacity(spec.modes.len());
                for &mode in &spec.modes {
                    let config = JobConfig {
                        mode,
                        ga: GaParams {
                            master_seed: seed,
                            ..spec.ga.clone()
                        },
                        reduce_ga: None,
                        objective: spec.objective.clone(),
                        population_path: path.clone(),
                        manifest: manifest.clone(),
                        parallelism: spec.parallelism,
                    };
                    let result = run_job(&config)?;
                    out.push(ExperimentRow::from_job(size, header.payload_bytes(), seed, &result));
                }
                std::fs::remove_file(&path).ok();
                std::fs::remove_file(manifest_path_for(&path)).ok();
                Ok(out)
            };
            match step() {
                Ok(new_rows) => {
                    for row in new_rows {
                        on_row(&row);
                        rows.push(row);
                    }
                }
                Err(e) => {
                    sort_rows(&mut rows);
                    return Err((rows, e));
                }
            }
        }
    }
    sort_rows(&mut rows);
    Ok(rows)
}
