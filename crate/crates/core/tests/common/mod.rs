#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sadic_core::{Alphabet, Letter, Morphism, WeightTable, Word};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

pub fn alphabet(letters: &str) -> Arc<Alphabet> {
    Arc::new(Alphabet::from_chars(letters).unwrap())
}

pub fn random_word(rng: &mut ChaCha8Rng, size: usize, min_len: usize, max_len: usize) -> Word {
    let len = rng.gen_range(min_len..=max_len);
    Word((0..len).map(|_| rng.gen_range(0..size) as Letter).collect())
}

pub fn random_morphism(
    rng: &mut ChaCha8Rng,
    source: Arc<Alphabet>,
    target: Arc<Alphabet>,
    max_image: usize,
) -> Morphism {
    let images = (0..source.len())
        .map(|_| random_word(rng, target.len(), 1, max_image))
        .collect();
    Morphism::new(source, target, images).unwrap()
}

/// Alphabet of random size in `1..=max` drawn from the prefix of `letters`.
pub fn random_alphabet(rng: &mut ChaCha8Rng, letters: &str, max: usize) -> Arc<Alphabet> {
    let k = rng.gen_range(1..=max);
    alphabet(&letters[..k])
}

/// Cyclic occurrence counts of every word of length `<= max_len` in `w^∞`,
/// by direct expansion; independent of the library's counting code.
pub fn brute_characteristic(w: &[Letter], max_len: usize) -> BTreeMap<Vec<Letter>, u64> {
    let n = w.len();
    let mut out = BTreeMap::new();
    for start in 0..n {
        for len in 1..=max_len {
            let factor: Vec<Letter> = (0..len).map(|i| w[(start + i) % n]).collect();
            *out.entry(factor).or_insert(0) += 1;
        }
    }
    out
}

pub fn table_matches_counts(table: &WeightTable, counts: &BTreeMap<Vec<Letter>, u64>) -> bool {
    let expected: BTreeMap<Vec<Letter>, BigRational> = counts
        .iter()
        .map(|(w, &c)| (w.clone(), BigRational::from_integer(c.into())))
        .collect();
    let got: BTreeMap<Vec<Letter>, BigRational> = table
        .support()
        .map(|(w, x)| (w.0.clone(), x.clone()))
        .collect();
    expected == got
}

pub fn expand(sigma: &Morphism, w: &[Letter]) -> Vec<Letter> {
    w.iter()
        .flat_map(|&a| sigma.image(a).as_slice().iter().copied())
        .collect()
}
