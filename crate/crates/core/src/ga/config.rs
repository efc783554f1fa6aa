use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Parameters of one engine run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    /// Hard cap on the number of evaluated generations (the initial
    /// population counts as the first).
    pub max_generations: usize,
    pub crossover_rate: f64,
    /// Per-bit probability that a position is resampled.
    pub mutation_rate: f64,
    pub elite_count: usize,
    /// Number of consecutive best-fitness changes inspected by the
    /// stagnation rule.
    pub stagnation_window: usize,
    pub stagnation_tol: f64,
    pub rng_seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 40,
            max_generations: 200,
            crossover_rate: 0.9,
            mutation_rate: 0.05,
            elite_count: 2,
            stagnation_window: 10,
            stagnation_tol: 0.0,
            rng_seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::config("population_size", "must be at least 2"));
        }
        if self.max_generations < 1 {
            return Err(Error::config("max_generations", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::config("crossover_rate", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::config("mutation_rate", "must lie in [0, 1]"));
        }
        if self.elite_count >= self.population_size {
            return Err(Error::config(
                "elite_count",
                format!("must be below population_size ({})", self.population_size),
            ));
        }
        if self.stagnation_window < 1 {
            return Err(Error::config("stagnation_window", "must be at least 1"));
        }
        if !(self.stagnation_tol >= 0.0 && self.stagnation_tol.is_finite()) {
            return Err(Error::config(
                "stagnation_tol",
                "must be finite and non-negative",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        GaConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_full_elite_and_bad_rates() {
        let c = GaConfig {
            population_size: 4,
            elite_count: 4,
            ..GaConfig::default()
        };
        assert!(matches!(
            c.validate(),
            Err(Error::Config {
                key: "elite_count",
                ..
            })
        ));
        let c = GaConfig {
            mutation_rate: 1.5,
            ..GaConfig::default()
        };
        assert!(matches!(
            c.validate(),
            Err(Error::Config {
                key: "mutation_rate",
                ..
            })
        ));
        let c = GaConfig {
            crossover_rate: f64::NAN,
            ..GaConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
