//! Block-partitioned genetic algorithm in the MapReduce style.
//!
//! A large real-coded population is stored as a fixed-width binary file and
//! split into byte-sized blocks. Every block evolves independently in a map
//! task; each map emits its best few chromosomes, and a single reducer
//! either keeps the best of them or evolves them together.
//!
//! ```no_run
//! use mrga_core::prelude::*;
//!
//! let spec = ObjectiveSpec::sphere(300);
//! let header = generate_population_file("pop.bin", 15_000, &spec, 7)?;
//! let manifest = split_into_blocks(&header, 1500 * header.record_size())?;
//! let config = JobConfig {
//!     mode: Mode::EliteReduce,
//!     ga: GaParams { iterations: 200, master_seed: 7, ..GaParams::default() },
//!     reduce_ga: None,
//!     objective: spec,
//!     population_path: "pop.bin".into(),
//!     manifest,
//!     parallelism: 4,
//! };
//! let result = run_job(&config)?;
//! println!("MER {}", result.mer);
//! # Ok::<(), mrga_core::Error>(())
//! ```

pub mod baseline;
pub mod blockstore;
pub mod engine;
mod error;
pub mod experiment;
pub mod ga;
pub mod objective;
pub mod rng;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::baseline::{run_baseline, BaselineConfig, BaselineResult};
    pub use crate::blockstore::{
        generate_population_file, read_block, read_header, split_into_blocks, BlockManifest, PopulationFileHeader,
        DEFAULT_BLOCK_SIZE,
    };
    pub use crate::engine::{run_job, EliteRecord, JobConfig, JobResult, MapTaskReport, Mode};
    pub use crate::experiment::{ExperimentRow, SweepSpec};
    pub use crate::ga::{Chromosome, GaParams, Population};
    pub use crate::objective::{lookup_objective, Objective, ObjectiveFn, ObjectiveSpec};
    pub use crate::rng::RngStream;
    pub use crate::{Error, Result};
}
