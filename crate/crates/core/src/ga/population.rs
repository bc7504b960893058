use crate::error::{Error, Result};

/// A real-valued candidate solution with its cached fitness.
///
/// `fitness` is `None` until evaluated; any gene edit through
/// [`Chromosome::genes_mut`] invalidates it.
#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome {
    genes: Vec<f64>,
    fitness: Option<f64>,
}

impl Chromosome {
    pub fn new(genes: Vec<f64>) -> Self {
        Self { genes, fitness: None }
    }

    /// Rebuilds a chromosome whose fitness was computed elsewhere (e.g. read
    /// back from a population file). The caller vouches for consistency.
    pub fn from_parts(genes: Vec<f64>, fitness: Option<f64>) -> Self {
        Self { genes, fitness }
    }

    pub fn genes(&self) -> &[f64] {
        &self.genes
    }

    pub fn genes_mut(&mut self) -> &mut [f64] {
        self.fitness = None;
        &mut self.genes
    }

    pub fn into_genes(self) -> Vec<f64> {
        self.genes
    }

    pub fn dimension(&self) -> usize {
        self.genes.len()
    }

    pub fn fitness(&self) -> Option<f64> {
        self.fitness
    }

    pub fn is_evaluated(&self) -> bool {
        self.fitness.is_some()
    }

    pub(crate) fn set_fitness(&mut self, value: f64) {
        self.fitness = Some(value);
    }

    /// Bit-level equality of genes and fitness, treating unset == unset.
    pub fn bit_eq(&self, other: &Self) -> bool {
        self.genes.len() == other.genes.len()
            && self
                .genes
                .iter()
                .zip(&other.genes)
                .all(|(a, b)| a.to_bits() == b.to_bits())
            && self.fitness.map(f64::to_bits) == other.fitness.map(f64::to_bits)
    }
}

/// An ordered, non-empty collection of chromosomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    members: Vec<Chromosome>,
    sorted: bool,
}

impl Population {
    pub fn new(members: Vec<Chromosome>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::degenerate("population must have at least one member"));
        }
        Ok(Self { members, sorted: false })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Chromosome] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Chromosome> {
        self.members
    }

    pub fn get(&self, index: usize) -> Option<&Chromosome> {
        self.members.get(index)
    }

    /// True when members are known to ascend by fitness.
    pub fn is_sorted(&self) -> bool {
        self.sorted
    }

    pub fn dimension(&self) -> usize {
        self.members[0].dimension()
    }

    pub fn is_evaluated(&self) -> bool {
        self.members.iter().all(Chromosome::is_evaluated)
    }

    pub fn fitnesses(&self) -> Vec<Option<f64>> {
        self.members.iter().map(Chromosome::fitness).collect()
    }

    /// Mutable access; clears the sorted flag.
    pub(crate) fn members_mut(&mut self) -> &mut Vec<Chromosome> {
        self.sorted = false;
        &mut self.members
    }

    pub(crate) fn mark_sorted(&mut self) {
        self.sorted = true;
    }

    pub fn bit_eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.members.iter().zip(&other.members).all(|(a, b)| a.bit_eq(b))
    }
}

impl TryFrom<Vec<Chromosome>> for Population {
    type Error = Error;

    fn try_from(members: Vec<Chromosome>) -> Result<Self> {
        Population::new(members)
    }
}
