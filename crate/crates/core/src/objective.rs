//! Fitness functions behind a small pluggable abstraction.
//!
//! Only the sphere benchmark is registered. All objectives are minimized.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Names accepted by [`lookup_objective`].
pub const REGISTERED_OBJECTIVES: &[&str] = &["sphere"];

/// Which objective to optimize, its dimension, and the search domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub name: String,
    pub dimension: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

impl ObjectiveSpec {
    pub fn sphere(dimension: usize) -> Self {
        Self {
            name: "sphere".to_owned(),
            dimension,
            lower_bound: -100.0,
            upper_bound: 100.0,
        }
    }

    pub fn with_bounds(mut self, lower: f64, upper: f64) -> Self {
        self.lower_bound = lower;
        self.upper_bound = upper;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::config("objective dimension must be at least 1"));
        }
        if !self.lower_bound.is_finite() || !self.upper_bound.is_finite() || self.lower_bound >= self.upper_bound {
            return Err(Error::config(format!(
                "bounds must be finite with lower < upper, got [{}, {}]",
                self.lower_bound, self.upper_bound
            )));
        }
        Ok(())
    }
}

/// A deterministic, side-effect free fitness function of fixed dimension.
pub trait Objective: Send + Sync {
    fn name(&self) -> &str;

    fn dimension(&self) -> usize;

    /// Fitness of `genes`. Callers guarantee `genes.len() == self.dimension()`.
    fn value(&self, genes: &[f64]) -> f64;
}

/// Shared handle to an objective; cheap to clone into map tasks.
pub type ObjectiveFn = Arc<dyn Objective>;

impl fmt::Debug for dyn Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(D={})", self.name(), self.dimension())
    }
}

/// Sum of squares, accumulated in index order with no compensation so the
/// result is bit-reproducible.
pub fn sphere(genes: &[f64]) -> Result<f64> {
    if genes.is_empty() {
        return Err(Error::config("sphere of an empty gene sequence"));
    }
    Ok(sphere_unchecked(genes))
}

#[inline]
fn sphere_unchecked(genes: &[f64]) -> f64 {
    let mut acc = 0.0f64;
    for &g in genes {
        acc += g * g;
    }
    acc
}

#[derive(Debug, Clone, Copy)]
pub struct Sphere {
    dimension: usize,
}

impl Sphere {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::config("sphere dimension must be at least 1"));
        }
        Ok(Self { dimension })
    }
}

impl Objective for Sphere {
    fn name(&self) -> &str {
        "sphere"
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn value(&self, genes: &[f64]) -> f64 {
        sphere_unchecked(genes)
    }
}

pub fn lookup_objective(spec: &ObjectiveSpec) -> Result<ObjectiveFn> {
    spec.validate()?;
    match spec.name.as_str() {
        "sphere" => Ok(Arc::new(Sphere::new(spec.dimension)?)),
        other => Err(Error::UnknownObjective {
            name: other.to_owned(),
            registered: REGISTERED_OBJECTIVES.to_vec(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sphere_examples() {
        assert_eq!(sphere(&[0.0; 300]).unwrap(), 0.0);
        assert_eq!(sphere(&[3.0, 4.0]).unwrap(), 25.0);
        assert_eq!(sphere(&[1.0, 2.0, 3.0]).unwrap(), 14.0);
        assert!(matches!(sphere(&[]), Err(Error::Config(_))));
    }

    #[test]
    fn lookup_sphere_300() {
        let f = lookup_objective(&ObjectiveSpec::sphere(300)).unwrap();
        assert_eq!(f.name(), "sphere");
        assert_eq!(f.dimension(), 300);
        assert_eq!(f.value(&[1.0; 300]), 300.0);
    }

    #[test]
    fn lookup_sphere_1_is_square() {
        let f = lookup_objective(&ObjectiveSpec::sphere(1)).unwrap();
        assert_eq!(f.value(&[-7.0]), 49.0);
    }

    #[test]
    fn lookup_unknown_lists_registered() {
        let mut spec = ObjectiveSpec::sphere(3);
        spec.name = "does-not-exist".into();
        let err = lookup_objective(&spec).unwrap_err();
        assert!(matches!(err, Error::UnknownObjective { .. }));
        assert!(err.to_string().contains("sphere"));
    }

    #[test]
    fn lookup_rejects_bad_spec() {
        assert!(lookup_objective(&ObjectiveSpec::sphere(0)).is_err());
        assert!(lookup_objective(&ObjectiveSpec::sphere(2).with_bounds(1.0, 1.0)).is_err());
    }

    proptest! {
        #[test]
        fn sphere_is_even_and_nonnegative(x in prop::collection::vec(-1e3f64..1e3, 1..64)) {
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            let s = sphere(&x).unwrap();
            prop_assert!(s >= 0.0);
            prop_assert_eq!(s, sphere(&neg).unwrap());
        }

        #[test]
        fn sphere_scales_quadratically(
            x in prop::collection::vec(-1e3f64..1e3, 1..64),
            c in prop_oneof![1.0001f64..50.0, -50.0f64..-1.0001],
        ) {
            let scaled: Vec<f64> = x.iter().map(|v| c * v).collect();
            let lhs = sphere(&scaled).unwrap();
            let rhs = c * c * sphere(&x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn sphere_zero_only_at_origin(x in prop::collection::vec(-1.0f64..1.0, 1..16)) {
            let s = sphere(&x).unwrap();
            prop_assert_eq!(s == 0.0, x.iter().all(|v| *v == 0.0));
        }
    }
}
