use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evolution knobs shared by the map phase, the reduce phase and the
/// single-process baseline. Defaults follow the continuous-GA configuration
/// used for the sphere experiments (1 % mutation, 80 % crossover, 1000
/// iterations, D = 300).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    pub dimension: usize,
    /// Per-gene probability of a uniform reset.
    pub mutation_rate: f64,
    /// Per-pair probability of blend crossover (otherwise parents are copied).
    pub crossover_rate: f64,
    pub iterations: usize,
    /// Fraction of a map's final population sent to the reducer.
    pub elite_rate: f64,
    /// Fraction of the ranked population that survives each generation.
    pub keep_fraction: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub master_seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            dimension: 300,
            mutation_rate: 0.01,
            crossover_rate: 0.8,
            iterations: 1000,
            elite_rate: 0.01,
            keep_fraction: 0.5,
            lower_bound: -100.0,
            upper_bound: 100.0,
            master_seed: 0,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        if self.dimension == 0 {
            return Err(Error::config("dimension must be at least 1"));
        }
        if self.iterations == 0 {
            return Err(Error::config("iterations must be at least 1"));
        }
        unit("mutation_rate", self.mutation_rate)?;
        unit("crossover_rate", self.crossover_rate)?;
        if !(self.elite_rate > 0.0 && self.elite_rate <= 1.0) {
            return Err(Error::config(format!(
                "elite_rate must lie in (0, 1], got {}",
                self.elite_rate
            )));
        }
        if !(self.keep_fraction > 0.0 && self.keep_fraction < 1.0) {
            return Err(Error::config(format!(
                "keep_fraction must lie in (0, 1), got {}",
                self.keep_fraction
            )));
        }
        if !self.lower_bound.is_finite() || !self.upper_bound.is_finite() || self.lower_bound >= self.upper_bound {
            return Err(Error::config(format!(
                "bounds must be finite with lower < upper, got [{}, {}]",
                self.lower_bound, self.upper_bound
            )));
        }
        Ok(())
    }

    /// Number of ranked members that survive a generation.
    pub fn survivor_count(&self, size: usize) -> usize {
        ceil_fraction(self.keep_fraction, size)
    }

    /// Number of elites a map task emits from a block of `size` chromosomes.
    pub fn elite_count(&self, size: usize) -> usize {
        ceil_fraction(self.elite_rate, size).max(1)
    }
}

/// `ceil(rate * n)` capped at `n`, treating products within floating-point
/// noise of an integer as that integer (so `0.01 * 1500` is 15, not 16).
pub fn ceil_fraction(rate: f64, n: usize) -> usize {
    let raw = rate * n as f64;
    let nearest = raw.round();
    let k = if (raw - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        raw.ceil()
    };
    (k.max(0.0) as usize).min(n)
}
