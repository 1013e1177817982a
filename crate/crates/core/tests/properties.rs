mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use num_rational::BigRational;
use proptest::prelude::*;
use sadic_core::language::required_input_len;
use sadic_core::{
    characteristic_measure, check_kirchhoff, cone_at_level, evaluate_tower, generate_language,
    image_language, levelwise_measures, recognizability_scan, transfer_measure, Alphabet,
    DirectiveSequence, LanguageTable, Letter, Morphism, VectorTower, Word,
};

use common::*;

fn alphabet_of(size: usize, letters: &str) -> Arc<Alphabet> {
    alphabet(&letters[..size])
}

/// A morphism over `size`-letter alphabets given by raw image letters.
fn morphism_strategy(src: usize, tgt: usize, max_image: usize) -> impl Strategy<Value = Morphism> {
    prop::collection::vec(prop::collection::vec(0..tgt as Letter, 1..=max_image), src).prop_map(
        move |images| {
            Morphism::new(
                alphabet_of(src, "abcd"),
                alphabet_of(tgt, "wxyz"),
                images.into_iter().map(Word).collect(),
            )
            .unwrap()
        },
    )
}

fn endo_strategy(size: usize, max_image: usize) -> impl Strategy<Value = Morphism> {
    prop::collection::vec(
        prop::collection::vec(0..size as Letter, 1..=max_image),
        size,
    )
    .prop_map(move |images| {
        let a = alphabet_of(size, "abcd");
        Morphism::new(a.clone(), a, images.into_iter().map(Word).collect()).unwrap()
    })
}

fn word_strategy(size: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..size as Letter, 1..=max_len).prop_map(Word)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn powers_scale_characteristic_measures(w in word_strategy(3, 5), m in 1usize..4) {
        let a = alphabet_of(3, "abcd");
        let base = characteristic_measure(a.clone(), &w, 5).unwrap();
        let power = characteristic_measure(a, &w.repeat(m), 5).unwrap();
        prop_assert_eq!(power, base.scale(&q(m as i64, 1)).unwrap());
    }

    #[test]
    fn characteristic_matches_brute_force(w in word_strategy(4, 7)) {
        let a = alphabet_of(4, "abcd");
        let table = characteristic_measure(a, &w, 6).unwrap();
        prop_assert!(table_matches_counts(&table, &brute_characteristic(w.as_slice(), 6)));
        prop_assert!(check_kirchhoff(&table).is_consistent());
    }

    #[test]
    fn transfer_of_mixtures_is_linear_and_consistent(
        sigma in (1usize..=3, 1usize..=3).prop_flat_map(|(s, t)| morphism_strategy(s, t, 4)),
        seeds in prop::collection::vec(any::<u64>(), 2),
    ) {
        let a = sigma.source().clone();
        let mut rng = rng(seeds[0]);
        let w1 = random_word(&mut rng, a.len(), 1, 5);
        let w2 = random_word(&mut rng, a.len(), 1, 5);
        let need = required_input_len(6, &sigma).max(6);
        let m1 = characteristic_measure(a.clone(), &w1, need).unwrap();
        let m2 = characteristic_measure(a.clone(), &w2, need).unwrap();
        let c = q((seeds[1] % 7) as i64 + 1, 5);
        let mix = m1.scale(&c).unwrap().add(&m2).unwrap();
        let lhs = transfer_measure(&sigma, &mix, 6).unwrap();
        let rhs = transfer_measure(&sigma, &m1, 6).unwrap().scale(&c).unwrap()
            .add(&transfer_measure(&sigma, &m2, 6).unwrap()).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        prop_assert!(check_kirchhoff(&lhs).is_consistent());
    }

    #[test]
    fn image_language_is_factor_set_of_images(
        sigma in (1usize..=3, 1usize..=3).prop_flat_map(|(s, t)| morphism_strategy(s, t, 3)),
    ) {
        let src = LanguageTable::full_shift(sigma.source().clone(), 5).unwrap();
        let len = 4;
        let img = image_language(&sigma, &src, len).unwrap();
        let mut expected = BTreeSet::new();
        for w in src.words_of_len(required_input_len(len, &sigma).min(5)) {
            let e = expand(&sigma, w.as_slice());
            for l in 1..=len {
                for start in 0..e.len().saturating_sub(l - 1) {
                    expected.insert(Word(e[start..start + l].to_vec()));
                }
            }
        }
        let got: BTreeSet<Word> = img.iter().cloned().collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn tower_partial_sums_increase(sigma in endo_strategy(2, 3), top in prop::collection::vec(1i64..5, 2)) {
        let seq = DirectiveSequence::stationary(sigma, 8).unwrap();
        let tower = VectorTower::from_top(&seq, 6, top.iter().map(|&x| q(x, 1)).collect()).unwrap();
        for w in [Word(vec![0]), Word(vec![0, 1]), Word(vec![1, 1, 0])] {
            let s: Vec<BigRational> = (0..=6).map(|n| evaluate_tower(&seq, &tower, &w, n).unwrap().value).collect();
            prop_assert!(s.windows(2).all(|p| p[0] <= p[1]));
            // the cyclic level-wise table dominates the linear sum and stays within the bound
            let mt = levelwise_measures(&seq, &tower, 3).unwrap();
            let cyclic = mt.table(0).unwrap().get(&w);
            prop_assert!(cyclic >= s[6]);
            prop_assert!(&cyclic - &s[6] <= mt.error_bound(w.len()));
        }
    }

    #[test]
    fn cone_rank_nonincreasing_and_nested(sigma in endo_strategy(3, 3)) {
        let seq = DirectiveSequence::stationary(sigma, 8).unwrap();
        let mut last = usize::MAX;
        for m in 1..=6 {
            let r = cone_at_level(&seq, 0, m).unwrap();
            prop_assert!(r.rank <= last);
            prop_assert!(r.nested_in_previous.unwrap_or(true));
            let rows: Vec<Vec<u64>> = r.generators.clone();
            prop_assert_eq!(r.rank, brute_rank(&rows));
            last = r.rank;
        }
    }

    #[test]
    fn clear_is_monotone_in_radius(sigma in (2usize..=3, 2usize..=3).prop_flat_map(|(s, t)| morphism_strategy(s, t, 3))) {
        let table = LanguageTable::full_shift(sigma.source().clone(), 8).unwrap();
        let mut cleared = false;
        for r in 0..=2 {
            let v = recognizability_scan(&sigma, &table, r, false).unwrap();
            if cleared {
                prop_assert!(v.is_clear());
            }
            cleared |= v.is_clear();
        }
    }

    #[test]
    fn generated_languages_are_factorial(sigma in endo_strategy(2, 3)) {
        let seq = DirectiveSequence::stationary(sigma, 6).unwrap();
        let Ok(table) = generate_language(&seq, 0, 5, 5) else { return Ok(()); };
        for w in table.iter() {
            if w.len() > 1 {
                prop_assert!(table.contains(&w.slice(1, w.len())));
                prop_assert!(table.contains(&w.slice(0, w.len() - 1)));
            }
        }
    }
}

/// Rank over the rationals by fraction-free elimination on i128, written
/// independently of the library's elimination.
fn brute_rank(cols: &[Vec<u64>]) -> usize {
    let mut m: Vec<Vec<i128>> = cols
        .iter()
        .map(|c| c.iter().map(|&x| x as i128).collect())
        .collect();
    let width = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let (a, b) = (m[rank][col], m[r][col]);
                for c in 0..width {
                    m[r][c] = m[r][c] * a - m[rank][c] * b;
                }
                let g = m[r].iter().fold(0i128, |g, &x| gcd(g, x.abs()));
                if g > 1 {
                    m[r].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
