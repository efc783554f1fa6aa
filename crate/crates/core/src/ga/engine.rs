use rand::Rng;

use super::operators::better;
use super::population::evaluate_pending;
use super::{
    crossover, has_converged, mutate, select_parents, FitnessFunction, GaConfig, Genome,
    Individual, Population,
};
use crate::rng::{self, streams, GaRng};
use crate::{Error, Result};

/// Produces the next generation from an evaluated population.
///
/// Elites are copied unchanged; every other slot is filled from one selected
/// pair, by crossover with probability `crossover_rate` or otherwise a copy
/// of the better parent, then mutated at `mutation_rate`. The returned
/// population is evaluated.
pub fn step_generation<F, R>(
    population: &Population,
    f: &F,
    config: &GaConfig,
    rng: &mut R,
) -> Result<Population>
where
    F: FitnessFunction + ?Sized,
    R: Rng + ?Sized,
{
    config.validate()?;
    if population.len() != config.population_size {
        return Err(Error::State(format!(
            "population has {} members, config expects {}",
            population.len(),
            config.population_size
        )));
    }
    let selection = select_parents(population, config, rng)?;
    let members = population.members();

    let mut next: Vec<Individual> = selection
        .elites
        .iter()
        .map(|&i| members[i].clone())
        .collect();
    for &(a, b) in &selection.pairs {
        let child = if rng.gen::<f64>() < config.crossover_rate {
            crossover(&members[a].genome, &members[b].genome, rng)?
        } else {
            members[better(population, a, b)].genome.clone()
        };
        next.push(Individual::new(mutate(&child, config.mutation_rate, rng)?));
    }

    let mut next = Population::from_members(next, population.generation() + 1)?;
    evaluate_pending(&mut next, f)?;
    Ok(next)
}

/// Result of [`run`].
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    /// Best individual seen in any generation.
    pub best: Individual,
    /// Best fitness of each evaluated generation, starting with the initial
    /// population.
    pub history: Vec<f64>,
}

/// Runs the engine until [`has_converged`] holds.
///
/// `initializer` is called `population_size` times. Everything is derived
/// from `config.rng_seed`, so equal inputs give equal outputs.
pub fn run<I, F>(mut initializer: I, f: &F, config: &GaConfig) -> Result<RunOutcome>
where
    I: FnMut(&mut GaRng) -> Genome,
    F: FitnessFunction + ?Sized,
{
    config.validate()?;
    let mut init_rng = rng::stream(config.rng_seed, streams::INIT);
    let mut evolve_rng = rng::stream(config.rng_seed, streams::EVOLVE);

    let genomes = (0..config.population_size)
        .map(|_| initializer(&mut init_rng))
        .collect();
    let mut population = Population::new(genomes)?;
    evaluate_pending(&mut population, f)?;

    let (_, first) = population
        .best()
        .expect("evaluated population has a best member");
    let mut best = first.clone();
    let mut history = vec![first.fitness().unwrap()];

    while !has_converged(&history, config) {
        population = step_generation(&population, f, config, &mut evolve_rng)?;
        let (_, current) = population
            .best()
            .expect("evaluated population has a best member");
        let value = current.fitness().unwrap();
        if value < best.fitness().unwrap() {
            best = current.clone();
        }
        history.push(value);
    }
    Ok(RunOutcome { best, history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ga::{evaluate, Popcount};

    fn popcount_config(n: usize, g: usize, seed: u64) -> GaConfig {
        GaConfig {
            population_size: n,
            max_generations: g,
            stagnation_window: g,
            rng_seed: seed,
            ..GaConfig::default()
        }
    }

    #[test]
    fn full_elite_is_rejected() {
        let mut r = rng::seeded(0);
        let p = Population::new((0..3).map(|_| Genome::random(4, &mut r)).collect()).unwrap();
        let p = evaluate(&p, &Popcount).unwrap();
        let cfg = GaConfig {
            population_size: 3,
            elite_count: 3,
            ..GaConfig::default()
        };
        assert!(matches!(
            step_generation(&p, &Popcount, &cfg, &mut r),
            Err(Error::Config {
                key: "elite_count",
                ..
            })
        ));
    }

    #[test]
    fn cloning_only_generation_copies_tournament_winners() {
        let mut r = rng::seeded(8);
        let p = Population::new((0..10).map(|_| Genome::random(8, &mut r)).collect()).unwrap();
        let p = evaluate(&p, &Popcount).unwrap();
        let cfg = GaConfig {
            population_size: 10,
            elite_count: 0,
            crossover_rate: 0.0,
            mutation_rate: 0.0,
            ..GaConfig::default()
        };
        let next = step_generation(&p, &Popcount, &cfg, &mut rng::seeded(9)).unwrap();
        assert_eq!(next.generation(), 1);
        for child in next.members() {
            assert!(p.members().iter().any(|m| m.genome == child.genome));
        }
        let best = |p: &Population| p.best().unwrap().1.fitness().unwrap();
        assert!(best(&next) <= best(&p));
    }

    #[test]
    fn popcount_reaches_zero_in_fifty_generations() {
        let cfg = popcount_config(30, 50, 1);
        let mut r = rng::seeded(2);
        let mut p = evaluate(
            &Population::new((0..30).map(|_| Genome::random(16, &mut r)).collect()).unwrap(),
            &Popcount,
        )
        .unwrap();
        for _ in 0..50 {
            p = step_generation(&p, &Popcount, &cfg, &mut r).unwrap();
        }
        assert_eq!(p.best().unwrap().1.fitness(), Some(0.0));
    }

    #[test]
    fn single_generation_budget() {
        let out = run(
            |r| Genome::random(6, r),
            &Popcount,
            &popcount_config(4, 1, 0),
        )
        .unwrap();
        assert_eq!(out.history.len(), 1);
    }

    #[test]
    fn runs_are_deterministic() {
        let cfg = popcount_config(12, 30, 77);
        let a = run(|r| Genome::random(20, r), &Popcount, &cfg).unwrap();
        let b = run(|r| Genome::random(20, r), &Popcount, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn popcount_run_finds_optimum() {
        let out = run(
            |r| Genome::random(12, r),
            &Popcount,
            &popcount_config(20, 100, 3),
        )
        .unwrap();
        assert_eq!(out.best.fitness(), Some(0.0));
        assert!(out.history.len() <= 100);
    }

    #[test]
    fn best_ever_survives_without_elitism() {
        let cfg = GaConfig {
            elite_count: 0,
            mutation_rate: 0.3,
            ..popcount_config(6, 40, 4)
        };
        let out = run(|r| Genome::random(10, r), &Popcount, &cfg).unwrap();
        let min = out.history.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(out.best.fitness(), Some(min));
    }
}
