use rand::Rng;
use std::fmt;

use crate::{Error, Result};

/// A fixed-length string of bits; the unit the engine evolves.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Genome {
    bits: Vec<bool>,
}

impl Genome {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Argument("genome must have at least one bit".into()));
        }
        Ok(Genome { bits })
    }

    /// Builds a genome from `0`/`1` values; anything else is rejected.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let bits = bits
            .iter()
            .enumerate()
            .map(|(i, &b)| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::Argument(format!(
                    "bit {i} is {other}, expected 0 or 1"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Genome::new(bits)
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Genome::new(vec![false; len])
    }

    /// Uniformly random genome of length `len` (`len` must be positive).
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        assert!(len > 0, "genome length must be positive");
        Genome {
            bits: (0..len).map(|_| rng.gen()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn to_u8(&self) -> Vec<u8> {
        self.bits.iter().map(|&b| b as u8).collect()
    }

    pub fn hamming(&self, other: &Genome) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }

    pub(crate) fn from_vec_unchecked(bits: Vec<bool>) -> Self {
        debug_assert!(!bits.is_empty());
        Genome { bits }
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_binary_and_empty() {
        assert!(Genome::from_bits(&[0, 1, 2]).is_err());
        assert!(Genome::from_bits(&[]).is_err());
        let g = Genome::from_bits(&[1, 0, 1]).unwrap();
        assert_eq!(g.to_string(), "101");
        assert_eq!(g.count_ones(), 2);
    }
}
