use rayon::prelude::*;
use std::cmp::Ordering;

use super::Genome;
use crate::{Error, Result};

/// Deterministic map from a genome to a score; lower is better.
///
/// Implementations must be pure: members of a population are scored in
/// parallel and results are written back by index.
pub trait FitnessFunction: Sync {
    /// Genome length this function is defined on, if it cares.
    fn dimension(&self) -> Option<usize> {
        None
    }

    fn fitness(&self, genome: &Genome) -> f64;
}

impl<F> FitnessFunction for F
where
    F: Fn(&Genome) -> f64 + Sync,
{
    fn fitness(&self, genome: &Genome) -> f64 {
        self(genome)
    }
}

/// Number of set bits. Its global minimum is the all-zero genome.
#[derive(Clone, Copy, Debug, Default)]
pub struct Popcount;

impl FitnessFunction for Popcount {
    fn fitness(&self, genome: &Genome) -> f64 {
        genome.count_ones() as f64
    }
}

/// Attaches an expected genome length to any fitness function.
#[derive(Clone, Copy, Debug)]
pub struct WithDimension<F> {
    pub dimension: usize,
    pub inner: F,
}

impl<F: FitnessFunction> FitnessFunction for WithDimension<F> {
    fn dimension(&self) -> Option<usize> {
        Some(self.dimension)
    }

    fn fitness(&self, genome: &Genome) -> f64 {
        self.inner.fitness(genome)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub genome: Genome,
    fitness: Option<f64>,
}

impl Individual {
    pub fn new(genome: Genome) -> Self {
        Individual {
            genome,
            fitness: None,
        }
    }

    pub fn evaluated(genome: Genome, fitness: f64) -> Self {
        Individual {
            genome,
            fitness: Some(fitness),
        }
    }

    /// `None` until the individual has been scored.
    pub fn fitness(&self) -> Option<f64> {
        self.fitness
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    members: Vec<Individual>,
    generation: u64,
}

impl Population {
    /// Unevaluated generation-0 population. Needs at least two genomes of a
    /// common length.
    pub fn new(genomes: Vec<Genome>) -> Result<Self> {
        Population::from_members(genomes.into_iter().map(Individual::new).collect(), 0)
    }

    pub fn from_members(members: Vec<Individual>, generation: u64) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::Argument(format!(
                "population needs at least 2 members, got {}",
                members.len()
            )));
        }
        let len = members[0].genome.len();
        if let Some(bad) = members.iter().find(|m| m.genome.len() != len) {
            return Err(Error::Dimension {
                expected: len,
                found: bad.genome.len(),
            });
        }
        Ok(Population {
            members,
            generation,
        })
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn genome_len(&self) -> usize {
        self.members[0].genome.len()
    }

    pub fn is_evaluated(&self) -> bool {
        self.members.iter().all(|m| m.fitness.is_some())
    }

    /// Index and value of the best member (lowest fitness, then lowest index).
    pub fn best(&self) -> Option<(usize, &Individual)> {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, m)| m.fitness.is_some())
            .min_by(|(i, a), (j, b)| compare(a, *i, b, *j))
    }

    /// Member indices sorted best first.
    pub(crate) fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.members.len()).collect();
        order.sort_by(|&i, &j| compare(&self.members[i], i, &self.members[j], j));
        order
    }
}

/// Fitness ordering with ties broken by member index.
pub(crate) fn compare(a: &Individual, ia: usize, b: &Individual, ib: usize) -> Ordering {
    let fa = a.fitness.unwrap_or(f64::INFINITY);
    let fb = b.fitness.unwrap_or(f64::INFINITY);
    fa.total_cmp(&fb).then(ia.cmp(&ib))
}

/// Scores every member with `f`. Genomes and their order are left untouched.
pub fn evaluate<F: FitnessFunction + ?Sized>(population: &Population, f: &F) -> Result<Population> {
    let mut next = population.clone();
    for m in &mut next.members {
        m.fitness = None;
    }
    evaluate_pending(&mut next, f)?;
    Ok(next)
}

/// Scores members that have no fitness yet.
pub(crate) fn evaluate_pending<F: FitnessFunction + ?Sized>(
    population: &mut Population,
    f: &F,
) -> Result<()> {
    if let Some(dim) = f.dimension() {
        let found = population.genome_len();
        if found != dim {
            return Err(Error::Dimension {
                expected: dim,
                found,
            });
        }
    }
    population
        .members
        .par_iter_mut()
        .filter(|m| m.fitness.is_none())
        .for_each(|m| m.fitness = Some(f.fitness(&m.genome)));
    if let Some((i, m)) = population
        .members
        .iter()
        .enumerate()
        .find(|(_, m)| !m.fitness.is_some_and(f64::is_finite))
    {
        return Err(Error::State(format!(
            "member {i} has non-finite fitness {:?}",
            m.fitness
        )));
    }
    Ok(())
}
