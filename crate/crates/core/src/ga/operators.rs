use rand::Rng;

use super::population::compare;
use super::{GaConfig, Genome, Population};
use crate::{Error, Result};

/// Output of [`select_parents`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    /// The `elite_count` best members, best first; they survive unmodified.
    pub elites: Vec<usize>,
    /// One pair per non-elite slot of the next generation.
    pub pairs: Vec<(usize, usize)>,
}

/// Size-2 tournament: two uniform draws, lower fitness wins, ties to the
/// lower index.
fn tournament<R: Rng + ?Sized>(population: &Population, rng: &mut R) -> usize {
    let n = population.len();
    let i = rng.gen_range(0..n);
    let j = rng.gen_range(0..n);
    better(population, i, j)
}

pub(crate) fn better(population: &Population, i: usize, j: usize) -> usize {
    let m = population.members();
    if compare(&m[i], i, &m[j], j).is_le() {
        i
    } else {
        j
    }
}

/// Picks the elites and `N - elite_count` tournament parent pairs.
pub fn select_parents<R: Rng + ?Sized>(
    population: &Population,
    config: &GaConfig,
    rng: &mut R,
) -> Result<Selection> {
    if !population.is_evaluated() {
        return Err(Error::State(
            "selection needs an evaluated population".into(),
        ));
    }
    if config.elite_count >= population.len() {
        return Err(Error::config(
            "elite_count",
            format!("must be below the population size ({})", population.len()),
        ));
    }
    let elites = population.ranking()[..config.elite_count].to_vec();
    let pairs = (config.elite_count..population.len())
        .map(|_| (tournament(population, rng), tournament(population, rng)))
        .collect();
    Ok(Selection { elites, pairs })
}

/// Agreement-preserving uniform crossover.
///
/// Wherever the parents agree the child copies that bit; at each disagreement
/// it takes `a`'s or `b`'s bit with probability ½.
pub fn crossover<R: Rng + ?Sized>(a: &Genome, b: &Genome, rng: &mut R) -> Result<Genome> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            found: b.len(),
        });
    }
    let bits = a
        .bits()
        .iter()
        .zip(b.bits())
        .map(|(&x, &y)| if x == y || rng.gen::<bool>() { x } else { y })
        .collect();
    Ok(Genome::from_vec_unchecked(bits))
}

/// Resampling mutation: each position is selected with probability `rate`
/// and a selected position receives a fresh uniform bit, so it keeps its old
/// value half the time.
pub fn mutate<R: Rng + ?Sized>(genome: &Genome, rate: f64, rng: &mut R) -> Result<Genome> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::Argument(format!(
            "mutation rate {rate} outside [0, 1]"
        )));
    }
    let bits = genome
        .bits()
        .iter()
        .map(|&bit| {
            if rng.gen::<f64>() < rate {
                rng.gen()
            } else {
                bit
            }
        })
        .collect();
    Ok(Genome::from_vec_unchecked(bits))
}
