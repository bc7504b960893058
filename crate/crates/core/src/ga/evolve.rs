use crate::error::{Error, Result};
use crate::ga::operators::{crossover_haupt, evaluate, mutate_all_but_first, rank, select_parent_pairs};
use crate::ga::params::GaParams;
use crate::ga::population::Population;
use crate::objective::Objective;
use crate::rng::RngStream;

/// Snapshot taken after each generation's evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub mutated_genes: usize,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    /// Final population, ranked.
    pub population: Population,
    pub initial_best: f64,
    pub history: Vec<GenerationStats>,
}

impl Evolution {
    pub fn generations_run(&self) -> usize {
        self.history.len()
    }

    pub fn best_fitness(&self) -> f64 {
        self.population.members()[0].fitness().unwrap()
    }
}

/// Runs exactly `params.iterations` generations of
/// rank → replace the bottom by offspring → mutate → evaluate.
///
/// The population must already be evaluated. The best member is never
/// replaced or mutated, so the best fitness is non-increasing.
pub fn run_generations(
    mut population: Population,
    params: &GaParams,
    objective: &dyn Objective,
    rng: &mut RngStream,
) -> Result<Evolution> {
    params.validate()?;
    let size = population.len();
    if size < 4 {
        return Err(Error::degenerate(format!(
            "population of {size} is too small to evolve (need at least 4)"
        )));
    }
    if !population.is_evaluated() {
        return Err(Error::contract("run_generations requires an evaluated population"));
    }
    evaluate(&mut population, objective, params)?;
    rank(&mut population)?;
    let initial_best = population.members()[0].fitness().unwrap();

    let n_keep = params.survivor_count(size);
    let replaced = size - n_keep;
    let mut history = Vec::with_capacity(params.iterations);

    for generation in 1..=params.iterations {
        rank(&mut population)?;
        let pairs = select_parent_pairs(&population, rng, params)?;

        let mut offspring = Vec::with_capacity(replaced + 1);
        {
            let members = population.members();
            for (m, f) in pairs {
                let (a, b) = if rng.chance(params.crossover_rate) {
                    crossover_haupt(&members[m], &members[f], rng)?
                } else {
                    (members[m].clone(), members[f].clone())
                };
                offspring.push(a);
                offspring.push(b);
            }
        }
        // An odd replacement count drops the last pair's second child.
        offspring.truncate(replaced);

        let members = population.members_mut();
        members.truncate(n_keep);
        members.extend(offspring);

        let mutated_genes = mutate_all_but_first(&mut population, rng, params);
        evaluate(&mut population, objective, params)?;

        let (best, sum) = population
            .members()
            .iter()
            .map(|c| c.fitness().unwrap())
            .fold((f64::INFINITY, 0.0), |(b, s), f| (b.min(f), s + f));
        history.push(GenerationStats {
            generation,
            best_fitness: best,
            mean_fitness: sum / size as f64,
            mutated_genes,
        });
    }
    rank(&mut population)?;

    Ok(Evolution {
        population,
        initial_best,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ga::population::Chromosome;
    use crate::objective::Sphere;

    fn random_pop(size: usize, dim: usize, seed: u64) -> Population {
        let mut rng = RngStream::new(seed);
        Population::new(
            (0..size)
                .map(|_| Chromosome::new((0..dim).map(|_| rng.uniform(-100.0, 100.0)).collect()))
                .collect(),
        )
        .unwrap()
    }

    fn params(dim: usize, iterations: usize) -> GaParams {
        GaParams {
            dimension: dim,
            iterations,
            ..GaParams::default()
        }
    }

    #[test]
    fn zero_optimum_is_absorbing() {
        let sphere = Sphere::new(4).unwrap();
        let p = params(4, 30);
        let mut pop = Population::new(vec![Chromosome::new(vec![0.0; 4]); 10]).unwrap();
        evaluate(&mut pop, &sphere, &p).unwrap();
        let evo = run_generations(pop, &p, &sphere, &mut RngStream::new(1)).unwrap();
        assert_eq!(evo.best_fitness(), 0.0);
        assert!(evo.history.iter().all(|s| s.best_fitness == 0.0));
    }

    #[test]
    fn one_iteration_runs_one_generation() {
        let sphere = Sphere::new(3).unwrap();
        let p = params(3, 1);
        let mut pop = random_pop(8, 3, 2);
        evaluate(&mut pop, &sphere, &p).unwrap();
        let evo = run_generations(pop, &p, &sphere, &mut RngStream::new(3)).unwrap();
        assert_eq!(evo.generations_run(), 1);
        assert_eq!(evo.history[0].generation, 1);
        assert_eq!(evo.population.len(), 8);
        assert!(evo.population.is_sorted());
    }

    #[test]
    fn zero_iterations_rejected() {
        let sphere = Sphere::new(3).unwrap();
        let p = params(3, 0);
        let mut pop = random_pop(8, 3, 2);
        evaluate(&mut pop, &sphere, &params(3, 1)).unwrap();
        assert!(matches!(
            run_generations(pop, &p, &sphere, &mut RngStream::new(3)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn tiny_population_rejected() {
        let sphere = Sphere::new(2).unwrap();
        let p = params(2, 5);
        let mut pop = random_pop(3, 2, 1);
        evaluate(&mut pop, &sphere, &p).unwrap();
        assert!(matches!(
            run_generations(pop, &p, &sphere, &mut RngStream::new(1)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn unevaluated_input_rejected() {
        let sphere = Sphere::new(2).unwrap();
        let pop = random_pop(6, 2, 1);
        assert!(matches!(
            run_generations(pop, &params(2, 5), &sphere, &mut RngStream::new(1)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn odd_replacement_preserves_size() {
        let sphere = Sphere::new(3).unwrap();
        let p = GaParams {
            keep_fraction: 0.4,
            ..params(3, 5)
        };
        // size 9: keep ceil(3.6) = 4, replace 5 (odd)
        let mut pop = random_pop(9, 3, 4);
        evaluate(&mut pop, &sphere, &p).unwrap();
        let evo = run_generations(pop, &p, &sphere, &mut RngStream::new(5)).unwrap();
        assert_eq!(evo.population.len(), 9);
    }

    #[test]
    fn monotone_best_and_improves() {
        let sphere = Sphere::new(10).unwrap();
        let p = params(10, 100);
        let mut pop = random_pop(100, 10, 7);
        evaluate(&mut pop, &sphere, &p).unwrap();
        let evo = run_generations(pop, &p, &sphere, &mut RngStream::new(8)).unwrap();
        let mut prev = evo.initial_best;
        for s in &evo.history {
            assert!(s.best_fitness <= prev);
            prev = s.best_fitness;
        }
        assert!(evo.best_fitness() < evo.initial_best / 10.0);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let sphere = Sphere::new(10).unwrap();
        let p = params(10, 50);
        let run = || {
            let mut pop = random_pop(100, 10, 42);
            evaluate(&mut pop, &sphere, &p).unwrap();
            run_generations(pop, &p, &sphere, &mut RngStream::new(42)).unwrap()
        };
        assert!(run().population.bit_eq(&run().population));
    }
}
