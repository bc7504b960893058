//! Real-coded genetic algorithm shared by map tasks, the reducer and the
//! single-process baseline.

mod evolve;
mod operators;
mod params;
mod population;

pub use evolve::{run_generations, Evolution, GenerationStats};
pub use operators::{
    best_of, blend_crossover, crossover_haupt, evaluate, mutate, rank, rank_weights, select_parent_pairs,
};
pub use params::{ceil_fraction, GaParams};
pub use population::{Chromosome, Population};

use crate::rng::RngStream;

/// `count` chromosomes with genes uniform in `[lower, upper]`, fitness unset.
/// Genes are drawn chromosome by chromosome, gene by gene, from one stream.
pub fn random_chromosomes(
    count: usize,
    dimension: usize,
    lower: f64,
    upper: f64,
    rng: &mut RngStream,
) -> impl Iterator<Item = Chromosome> + '_ {
    (0..count).map(move |_| Chromosome::new((0..dimension).map(|_| rng.uniform(lower, upper)).collect()))
}
