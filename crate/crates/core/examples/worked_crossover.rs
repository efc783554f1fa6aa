//! Agreement-preserving crossover and resampling mutation on the two
//! ten-bit parents of the worked example.
//!
//! `cargo run --example worked_crossover`

use gasched::ga::{crossover, mutate, Genome};
use gasched::rng;

fn main() -> gasched::Result<()> {
    let person1 = Genome::from_bits(&[0, 0, 1, 0, 1, 0, 1, 0, 1, 0])?;
    let person2 = Genome::from_bits(&[1, 0, 1, 0, 0, 0, 0, 0, 1, 1])?;
    let agree: Vec<usize> = (0..person1.len())
        .filter(|&i| person1.get(i) == person2.get(i))
        .map(|i| i + 1)
        .collect();
    println!("person1 {person1}");
    println!("person2 {person2}");
    println!("agreement positions (1-based): {agree:?}");

    for seed in 0..4 {
        let mut r = rng::seeded(seed);
        let child = crossover(&person1, &person2, &mut r)?;
        let mutant = mutate(&child, 0.3, &mut r)?;
        println!("seed {seed}: child {child}  mutated {mutant}");
    }

    let reference = Genome::from_bits(&[0, 0, 1, 0, 1, 0, 0, 0, 1, 0])?;
    let seed = (0..256).find(|&s| {
        crossover(&person1, &person2, &mut rng::seeded(s)).is_ok_and(|c| c == reference)
    });
    println!("child {reference} first appears at seed {seed:?}");
    Ok(())
}
