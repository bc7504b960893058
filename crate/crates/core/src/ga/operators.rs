//! Real-coded GA operators: evaluation with clamping, stable ranking,
//! rank-list parent selection, single-point blend crossover and uniform-reset
//! mutation. All randomness comes from an explicit [`RngStream`].

use crate::error::{Error, Result};
use crate::ga::params::GaParams;
use crate::ga::population::{Chromosome, Population};
use crate::objective::Objective;
use crate::rng::RngStream;

/// Clamps every gene into the search domain, then computes any missing
/// fitness. Chromosomes whose genes moved lose their cached fitness first.
pub fn evaluate(population: &mut Population, objective: &dyn Objective, params: &GaParams) -> Result<()> {
    let dim = objective.dimension();
    if params.dimension != dim {
        return Err(Error::config(format!(
            "parameters declare D={} but objective `{}` has D={dim}",
            params.dimension,
            objective.name()
        )));
    }
    if let Some((i, c)) = population
        .members()
        .iter()
        .enumerate()
        .find(|(_, c)| c.dimension() != dim)
    {
        return Err(Error::config(format!(
            "chromosome {i} has {} genes, objective expects {dim}",
            c.dimension()
        )));
    }

    let (lo, hi) = (params.lower_bound, params.upper_bound);
    let sorted = population.is_sorted();
    let mut changed = false;
    let members = population.members_mut();
    for (i, c) in members.iter_mut().enumerate() {
        if c.genes().iter().any(|g| *g < lo || *g > hi) {
            for g in c.genes_mut() {
                *g = g.clamp(lo, hi);
            }
        }
        if !c.is_evaluated() {
            let value = objective.value(c.genes());
            if value.is_nan() {
                return Err(Error::contract(format!("chromosome {i} evaluated to NaN")));
            }
            c.set_fitness(value);
            changed = true;
        }
    }
    if sorted && !changed {
        population.mark_sorted();
    }
    Ok(())
}

/// Stable ascending sort by fitness (minimization).
pub fn rank(population: &mut Population) -> Result<()> {
    if let Some(i) = population.members().iter().position(|c| !c.is_evaluated()) {
        return Err(Error::contract(format!("cannot rank: chromosome {i} has no fitness")));
    }
    if !population.is_sorted() {
        population
            .members_mut()
            .sort_by(|a, b| a.fitness().unwrap().total_cmp(&b.fitness().unwrap()));
        population.mark_sorted();
    }
    Ok(())
}

/// The evaluated member with minimal fitness; ties go to the lowest index.
pub fn best_of(population: &Population) -> Result<&Chromosome> {
    let mut best: Option<(&Chromosome, f64)> = None;
    for (i, c) in population.members().iter().enumerate() {
        let f = c
            .fitness()
            .ok_or_else(|| Error::contract(format!("best_of: chromosome {i} has no fitness")))?;
        if best.is_none_or(|(_, bf)| f < bf) {
            best = Some((c, f));
        }
    }
    best.map(|(c, _)| c)
        .ok_or_else(|| Error::degenerate("best_of on an empty population"))
}

/// Selection probability of each survivor rank (index 0 = best):
/// `(n_keep - n + 1) / (n_keep (n_keep + 1) / 2)` for rank `n = 1..=n_keep`.
pub fn rank_weights(n_keep: usize) -> Vec<f64> {
    let total = (n_keep * (n_keep + 1) / 2) as f64;
    (1..=n_keep).map(|n| (n_keep - n + 1) as f64 / total).collect()
}

/// Draws rank-weighted parent pairs from the top survivors of a ranked
/// population. Returns `ceil((size - n_keep) / 2)` pairs of distinct indices.
pub fn select_parent_pairs(
    population: &Population,
    rng: &mut RngStream,
    params: &GaParams,
) -> Result<Vec<(usize, usize)>> {
    if !population.is_sorted() {
        return Err(Error::contract("parent selection requires a ranked population"));
    }
    let size = population.len();
    let n_keep = params.survivor_count(size);
    if n_keep < 2 {
        return Err(Error::degenerate(format!(
            "only {n_keep} survivor(s) out of {size}; need at least 2 to form a pair"
        )));
    }
    let pairs = (size - n_keep).div_ceil(2);
    let picker = RankPicker::new(n_keep);
    Ok((0..pairs)
        .map(|_| {
            let mother = picker.pick(rng);
            let father = loop {
                let f = picker.pick(rng);
                if f != mother {
                    break f;
                }
            };
            (mother, father)
        })
        .collect())
}

/// Integer cumulative weights: rank n (0-based) has weight `n_keep - n`.
struct RankPicker {
    cumulative: Vec<u64>,
}

impl RankPicker {
    fn new(n_keep: usize) -> Self {
        let mut acc = 0u64;
        let cumulative = (0..n_keep)
            .map(|n| {
                acc += (n_keep - n) as u64;
                acc
            })
            .collect();
        Self { cumulative }
    }

    fn pick(&self, rng: &mut RngStream) -> usize {
        let total = *self.cumulative.last().unwrap();
        let ticket = rng.below(total);
        self.cumulative.partition_point(|&c| c <= ticket)
    }
}

/// Single-point blend crossover at gene `alpha` with factor `beta`.
///
/// The first child takes `mother[..alpha]`, the blended gene, then
/// `father[alpha+1..]`; the second child mirrors it. Blended values are
/// clamped to the parents' interval at `alpha` to absorb rounding.
pub fn blend_crossover(
    mother: &Chromosome,
    father: &Chromosome,
    alpha: usize,
    beta: f64,
) -> Result<(Chromosome, Chromosome)> {
    let dim = mother.dimension();
    if father.dimension() != dim {
        return Err(Error::config(format!(
            "crossover between D={dim} and D={} parents",
            father.dimension()
        )));
    }
    if alpha >= dim {
        return Err(Error::config(format!("crossover point {alpha} outside D={dim}")));
    }
    let (m, f) = (mother.genes(), father.genes());
    let (lo, hi) = if m[alpha] <= f[alpha] {
        (m[alpha], f[alpha])
    } else {
        (f[alpha], m[alpha])
    };
    let diff = m[alpha] - f[alpha];
    let first = (m[alpha] - beta * diff).clamp(lo, hi);
    let second = (f[alpha] + beta * diff).clamp(lo, hi);

    let mut a = Vec::with_capacity(dim);
    a.extend_from_slice(&m[..alpha]);
    a.push(first);
    a.extend_from_slice(&f[alpha + 1..]);

    let mut b = Vec::with_capacity(dim);
    b.extend_from_slice(&f[..alpha]);
    b.push(second);
    b.extend_from_slice(&m[alpha + 1..]);

    Ok((Chromosome::new(a), Chromosome::new(b)))
}

/// Haupt-style crossover: draws the point `alpha` uniformly from `0..D` and
/// `beta` uniformly from `[0, 1]`, then applies [`blend_crossover`].
pub fn crossover_haupt(
    mother: &Chromosome,
    father: &Chromosome,
    rng: &mut RngStream,
) -> Result<(Chromosome, Chromosome)> {
    if mother.dimension() != father.dimension() || mother.dimension() == 0 {
        return Err(Error::config(format!(
            "crossover between D={} and D={} parents",
            mother.dimension(),
            father.dimension()
        )));
    }
    let alpha = rng.index(mother.dimension());
    let beta = rng.uniform(0.0, 1.0);
    blend_crossover(mother, father, alpha, beta)
}

/// Uniform-reset mutation of every member except the best (index 0 of a
/// ranked population). Returns the number of genes resampled.
pub fn mutate(population: &mut Population, rng: &mut RngStream, params: &GaParams) -> Result<usize> {
    if !population.is_sorted() {
        return Err(Error::contract("mutation requires a ranked population"));
    }
    Ok(mutate_all_but_first(population, rng, params))
}

/// Each gene of members `1..` is independently reset with probability
/// `mutation_rate`. Bernoulli trials are realized by geometric gap sampling
/// over the flattened gene sequence, which yields the same binomial law with
/// one draw per mutation instead of one per gene.
pub(crate) fn mutate_all_but_first(population: &mut Population, rng: &mut RngStream, params: &GaParams) -> usize {
    let p = params.mutation_rate;
    let (lo, hi) = (params.lower_bound, params.upper_bound);
    if p <= 0.0 || population.len() < 2 {
        return 0;
    }
    let dim = population.dimension();
    let total = (population.len() - 1) * dim;
    let members = &mut population.members_mut()[1..];

    if p >= 1.0 {
        for c in members.iter_mut() {
            for g in c.genes_mut() {
                *g = rng.uniform(lo, hi);
            }
        }
        return total;
    }

    let log_q = (1.0 - p).ln();
    let mut pos = 0usize;
    let mut count = 0usize;
    loop {
        // Failures before the next success of a Bernoulli(p) sequence.
        let u = rng.unit();
        let gap = ((1.0 - u).ln() / log_q).floor();
        if gap >= (total - pos) as f64 {
            break;
        }
        pos += gap as usize;
        members[pos / dim].genes_mut()[pos % dim] = rng.uniform(lo, hi);
        count += 1;
        pos += 1;
        if pos >= total {
            break;
        }
    }
    count
}
