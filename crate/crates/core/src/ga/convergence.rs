use std::collections::BTreeSet;

use super::GaConfig;
use crate::{Error, Result};

/// Stopping rule over the per-generation best fitness.
///
/// True once `history` holds `max_generations` entries, or when it holds at
/// least `stagnation_window + 1` entries and none of the last
/// `stagnation_window` consecutive changes exceeds `stagnation_tol`.
pub fn has_converged(history: &[f64], config: &GaConfig) -> bool {
    if history.is_empty() {
        return false;
    }
    if history.len() >= config.max_generations {
        return true;
    }
    let window = config.stagnation_window;
    if window == 0 || history.len() < window + 1 {
        return false;
    }
    history[history.len() - window - 1..]
        .windows(2)
        .all(|w| (w[1] - w[0]).abs() <= config.stagnation_tol)
}

/// Indices whose value lies within `epsilon` of any known minimum.
///
/// Only meaningful where the true minima are known, i.e. oracle problems in
/// tests and benchmarks.
pub fn epsilon_good_set(values: &[f64], minima: &[f64], epsilon: f64) -> Result<BTreeSet<usize>> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Argument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if minima.is_empty() {
        return Err(Error::Argument("at least one minimum is required".into()));
    }
    Ok(values
        .iter()
        .enumerate()
        .filter(|(_, &v)| minima.iter().any(|&m| (v - m).abs() <= epsilon))
        .map(|(i, _)| i)
        .collect())
}
