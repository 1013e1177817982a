//! Finite-depth factor languages of generated subshifts, complexity and
//! entropy bounds.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::directive::DirectiveSequence;
use crate::error::{Error, Result};
use crate::symbols::{Alphabet, Letter, Morphism, Word};

/// Length of source words needed so that every factor of length `len` of
/// an image `σ(w)` lies inside `σ(u)` for some factor `u` of `w`:
/// `⌈(len - 2) / <σ>⌉ + 2`.
pub fn required_input_len(len: usize, sigma: &Morphism) -> usize {
    if len <= 1 {
        return len;
    }
    let min = sigma.min_image_len();
    (len - 2).div_ceil(min) + 2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableOrigin {
    Generated,
    Image,
    FullShift,
}

/// Admitted factors up to a length bound.
#[derive(Clone, Debug)]
pub struct LanguageTable {
    alphabet: Arc<Alphabet>,
    level: Option<usize>,
    max_len: usize,
    /// `words[k]` holds the admitted words of length `k + 1`.
    words: Vec<BTreeSet<Word>>,
    depth: usize,
    stabilized: bool,
    origin: TableOrigin,
}

impl LanguageTable {
    fn from_sets(
        alphabet: Arc<Alphabet>,
        level: Option<usize>,
        max_len: usize,
        mut words: Vec<BTreeSet<Word>>,
        depth: usize,
        stabilized: bool,
        origin: TableOrigin,
    ) -> Self {
        words.truncate(max_len);
        words.resize(max_len, BTreeSet::new());
        Self {
            alphabet,
            level,
            max_len,
            words,
            depth,
            stabilized,
            origin,
        }
    }

    /// Every word over the alphabet up to `max_len` (the full shift).
    pub fn full_shift(alphabet: Arc<Alphabet>, max_len: usize) -> Result<Self> {
        let d = alphabet.len();
        let total: f64 = (1..=max_len).map(|k| (d as f64).powi(k as i32)).sum();
        if total > 5e6 {
            return Err(Error::InvalidParameter(format!(
                "full shift table over {d} letters up to length {max_len} is too large"
            )));
        }
        let mut words = vec![BTreeSet::new(); max_len];
        let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
        for k in 0..max_len {
            let mut next = Vec::with_capacity(layer.len() * d);
            for w in &layer {
                for a in alphabet.letters() {
                    let mut x = w.clone();
                    x.push(a);
                    next.push(x);
                }
            }
            words[k] = next.iter().cloned().map(Word).collect();
            layer = next;
        }
        Ok(Self::from_sets(
            alphabet,
            None,
            max_len,
            words,
            0,
            true,
            TableOrigin::FullShift,
        ))
    }

    /// Factor-closed table of all factors (up to `max_len`) of the given words.
    pub fn from_words(alphabet: Arc<Alphabet>, max_len: usize, words: &[Word]) -> Result<Self> {
        let mut sets = vec![BTreeSet::new(); max_len];
        for w in words {
            alphabet.check_word(w)?;
            insert_factors(&mut sets, w.as_slice(), max_len);
        }
        Ok(Self::from_sets(
            alphabet,
            None,
            max_len,
            sets,
            0,
            false,
            TableOrigin::Generated,
        ))
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn level(&self) -> Option<usize> {
        self.level
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn stabilized(&self) -> bool {
        self.stabilized
    }

    pub fn origin(&self) -> &TableOrigin {
        &self.origin
    }

    pub fn words_of_len(&self, len: usize) -> &BTreeSet<Word> {
        &self.words[len - 1]
    }

    /// All admitted words, shortest first.
    pub fn iter(&self) -> impl Iterator<Item = &Word> {
        self.words.iter().flat_map(|s| s.iter())
    }

    pub fn contains(&self, w: &Word) -> bool {
        !w.is_empty() && w.len() <= self.max_len && self.words[w.len() - 1].contains(w)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same admitted words (ignores metadata).
    pub fn same_words(&self, other: &LanguageTable) -> bool {
        self.alphabet == other.alphabet && self.words == other.words
    }

    /// Plain-text export: one word per line, by length then index order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for w in self.iter() {
            out.push_str(&self.alphabet.format_word(w));
            out.push('\n');
        }
        out
    }
}

fn insert_factors(sets: &mut [BTreeSet<Word>], w: &[Letter], max_len: usize) {
    for start in 0..w.len() {
        for len in 1..=max_len.min(w.len() - start) {
            let f = &w[start..start + len];
            let set = &mut sets[len - 1];
            if !set.contains(f) {
                set.insert(Word(f.to_vec()));
            }
        }
    }
}

/// Factors of length `<= max_len` of `σ(u)` for the given source words.
fn image_factors<'a>(
    sigma: &Morphism,
    sources: impl Iterator<Item = &'a Word>,
    max_len: usize,
) -> Vec<BTreeSet<Word>> {
    let mut sets = vec![BTreeSet::new(); max_len];
    for u in sources {
        let img = sigma.apply_slice(u.as_slice());
        insert_factors(&mut sets, &img, max_len);
    }
    sets
}

/// Factors of `σ_[n,m)(a)` for `n < m <= top`, built level by level from
/// the top so that no telescoped image is ever expanded.
fn factors_to_depth(
    seq: &DirectiveSequence,
    n: usize,
    max_len: usize,
    top: usize,
) -> Result<Vec<BTreeSet<Word>>> {
    let mut need = vec![max_len; top - n + 1];
    for k in n..top {
        let sigma = seq.level(k)?;
        need[k - n + 1] = required_input_len(need[k - n], &sigma).max(1);
    }
    let mut sets: Vec<BTreeSet<Word>> = Vec::new();
    for k in (n..top).rev() {
        let sigma = seq.level(k)?;
        let len = need[k - n];
        let letters: Vec<Word> = sigma.source().letters().map(Word::letter).collect();
        let mut next = image_factors(&sigma, letters.iter(), len);
        let deeper = image_factors(&sigma, sets.iter().flat_map(|s| s.iter()), len);
        for (a, b) in next.iter_mut().zip(deeper) {
            a.extend(b);
        }
        sets = next;
    }
    Ok(sets)
}

/// Admitted factors of length `<= max_len` at level `n`, generated from all
/// letters up to depth `depth`. The stabilization flag compares depths
/// `depth - 1` and `depth`.
pub fn generate_language(
    seq: &DirectiveSequence,
    n: usize,
    max_len: usize,
    depth: usize,
) -> Result<LanguageTable> {
    if max_len == 0 {
        return Err(Error::InvalidParameter(
            "length bound must be at least 1".into(),
        ));
    }
    if depth <= n {
        return Err(Error::InvalidParameter(format!(
            "generation depth {depth} must exceed level {n}"
        )));
    }
    if depth > seq.depth() {
        return Err(Error::LevelOutOfRange {
            level: depth,
            depth: seq.depth(),
        });
    }
    let sets = factors_to_depth(seq, n, max_len, depth)?;
    if sets[max_len - 1].is_empty() {
        return Err(Error::DepthExhausted(format!(
            "no factor of length {max_len} appears at level {n} by depth {depth}"
        )));
    }
    let stabilized = if depth > n + 1 {
        factors_to_depth(seq, n, max_len, depth - 1)? == sets
    } else {
        false
    };
    Ok(LanguageTable::from_sets(
        seq.alphabet(n)?,
        Some(n),
        max_len,
        sets,
        depth,
        stabilized,
        TableOrigin::Generated,
    ))
}

/// The language of the image subshift `σ(X)` up to length `max_len`.
pub fn image_language(
    sigma: &Morphism,
    table: &LanguageTable,
    max_len: usize,
) -> Result<LanguageTable> {
    if table.alphabet.as_ref() != sigma.source().as_ref() {
        return Err(Error::AlphabetMismatch {
            expected: sigma.source().names().join(","),
            found: table.alphabet.names().join(","),
        });
    }
    if max_len == 0 {
        return Err(Error::InvalidParameter(
            "length bound must be at least 1".into(),
        ));
    }
    let need = required_input_len(max_len, sigma).max(1);
    if table.max_len < need {
        return Err(Error::Coverage {
            need,
            have: table.max_len,
        });
    }
    let sources = table.words.iter().take(need).flat_map(|s| s.iter());
    let sets = image_factors(sigma, sources, max_len);
    Ok(LanguageTable::from_sets(
        sigma.target().clone(),
        table.level.and_then(|l| l.checked_sub(1)),
        max_len,
        sets,
        table.depth,
        table.stabilized,
        TableOrigin::Image,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Complexity {
    pub length: usize,
    pub count: usize,
    /// `ln p(n) / n`.
    pub entropy_estimate: f64,
}

pub fn complexity(table: &LanguageTable, n: usize) -> Result<Complexity> {
    if n == 0 || n > table.max_len {
        return Err(Error::InvalidParameter(format!(
            "length {n} outside 1..={}",
            table.max_len
        )));
    }
    let count = table.words[n - 1].len();
    let entropy_estimate = if count == 0 {
        0.0
    } else {
        (count as f64).ln() / n as f64
    };
    Ok(Complexity {
        length: n,
        count,
        entropy_estimate,
    })
}

/// `min_{1<=n<=N} ln(card A_n) / β_-(n)`, natural logarithm.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyBound {
    pub value: f64,
    /// Level attaining the minimum.
    pub level: usize,
    pub alphabet_size: usize,
    pub beta_minus: u64,
    pub depth: usize,
    pub log_base: &'static str,
}

pub fn entropy_upper_bound(seq: &DirectiveSequence, depth: usize) -> Result<EntropyBound> {
    if depth == 0 || depth > seq.depth() {
        return Err(Error::LevelOutOfRange {
            level: depth,
            depth: seq.depth(),
        });
    }
    let mut best: Option<EntropyBound> = None;
    for n in 1..=depth {
        let card = seq.alphabet(n)?.len();
        let beta = seq.beta_minus(n)?;
        let value = (card as f64).ln() / beta as f64;
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(EntropyBound {
                value,
                level: n,
                alphabet_size: card,
                beta_minus: beta,
                depth,
                log_base: "e",
            });
        }
    }
    Ok(best.expect("depth >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build_critical_level_example;

    fn fib_seq() -> DirectiveSequence {
        DirectiveSequence::stationary(Morphism::from_chars("ab", "ab", &["ab", "a"]).unwrap(), 24)
            .unwrap()
    }

    fn tm_seq() -> DirectiveSequence {
        DirectiveSequence::stationary(Morphism::from_chars("ab", "ab", &["ab", "ba"]).unwrap(), 24)
            .unwrap()
    }

    /// Brute force: expand every telescoped image and collect factors.
    fn oracle(
        seq: &DirectiveSequence,
        n: usize,
        max_len: usize,
        depth: usize,
    ) -> Vec<BTreeSet<Word>> {
        let mut sets = vec![BTreeSet::new(); max_len];
        for m in n + 1..=depth {
            let t = seq.telescope(n, m).unwrap();
            for img in t.images() {
                insert_factors(&mut sets, img.as_slice(), max_len);
            }
        }
        sets
    }

    fn strings(t: &LanguageTable, len: usize) -> Vec<String> {
        t.words_of_len(len)
            .iter()
            .map(|w| t.alphabet().format_word(w))
            .collect()
    }

    #[test]
    fn fibonacci_language() {
        let t = generate_language(&fib_seq(), 0, 3, 8).unwrap();
        assert_eq!(strings(&t, 2), vec!["aa", "ab", "ba"]);
        assert_eq!(strings(&t, 3), vec!["aab", "aba", "baa", "bab"]);
        assert!(t.stabilized());
        for n in 1..=3 {
            assert_eq!(complexity(&t, n).unwrap().count, n + 1);
        }
    }

    #[test]
    fn matches_brute_force_expansion() {
        for seq in [fib_seq(), tm_seq(), build_critical_level_example().sequence] {
            for (n, len, depth) in [(0, 5, 7), (1, 4, 6), (0, 8, 9)] {
                let t = generate_language(&seq, n, len, depth).unwrap();
                assert_eq!(
                    t.words,
                    oracle(&seq, n, len, depth),
                    "n={n} len={len} depth={depth}"
                );
            }
        }
    }

    #[test]
    fn sturmian_complexity() {
        let t = generate_language(&fib_seq(), 0, 8, 14).unwrap();
        for n in 1..=8 {
            assert_eq!(complexity(&t, n).unwrap().count, n + 1);
        }
    }

    #[test]
    fn critical_level_example_language() {
        let seq = build_critical_level_example().sequence;
        let top = generate_language(&seq, 2, 1, 5).unwrap();
        assert_eq!(strings(&top, 1), vec!["x", "y"]);
        let base = generate_language(&seq, 0, 6, 6).unwrap();
        let mut two = strings(&base, 2);
        two.sort();
        assert_eq!(two, vec!["cc", "cd", "dc", "dd"]);
        assert_eq!(complexity(&base, 6).unwrap().count, 12);
    }

    #[test]
    fn image_language_examples() {
        let seq = build_critical_level_example().sequence;
        let level1 = generate_language(&seq, 1, 6, 8).unwrap();
        let sigma0 = seq.level(0).unwrap();
        let img = image_language(&sigma0, &level1, 8).unwrap();
        let base = generate_language(&seq, 0, 8, 8).unwrap();
        assert!(img.same_words(&base));

        let fib = fib_seq();
        let t = generate_language(&fib, 0, 6, 10).unwrap();
        let id = Morphism::identity(t.alphabet().clone());
        assert!(image_language(&id, &t, 6).unwrap().same_words(&t));

        let collapse = Morphism::from_chars("ab", "c", &["c", "c"]).unwrap();
        let c = image_language(&collapse, &t, 5).unwrap();
        for n in 1..=5 {
            assert_eq!(strings(&c, n), vec!["c".repeat(n)]);
        }
        assert!(matches!(
            image_language(&id, &t, 9),
            Err(Error::Coverage { need: 9, have: 6 })
        ));
    }

    #[test]
    fn depth_exhaustion() {
        let sq = Morphism::from_chars("xy", "xy", &["xx", "yy"]).unwrap();
        let seq = DirectiveSequence::stationary(sq, 4).unwrap();
        assert!(matches!(
            generate_language(&seq, 0, 9, 3),
            Err(Error::DepthExhausted(_))
        ));
        assert!(generate_language(&seq, 0, 8, 3).is_ok());
    }

    #[test]
    fn entropy_bounds() {
        let b = entropy_upper_bound(&tm_seq(), 10).unwrap();
        assert_eq!(b.level, 10);
        assert!((b.value - 2f64.ln() / 1024.0).abs() < 1e-15);
        let one = Morphism::from_chars("a", "a", &["aa"]).unwrap();
        let seq = DirectiveSequence::stationary(one, 5).unwrap();
        assert_eq!(entropy_upper_bound(&seq, 5).unwrap().value, 0.0);
        let fib = fib_seq();
        let mut prev = f64::INFINITY;
        for n in 1..=12 {
            let v = entropy_upper_bound(&fib, n).unwrap().value;
            assert!(v <= prev);
            prev = v;
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(40))]
            #[test]
            fn factor_closed_monotone_submultiplicative(
                images in proptest::collection::vec("[ab]{1,3}", 2),
                len in 2usize..7,
            ) {
                let imgs: Vec<&str> = images.iter().map(String::as_str).collect();
                let sigma = Morphism::from_chars("ab", "ab", &imgs).unwrap();
                prop_assume!(sigma.max_image_len() > 1);
                let seq = DirectiveSequence::stationary(sigma, 12).unwrap();
                let Ok(t) = generate_language(&seq, 0, len, 10) else { return Ok(()); };
                for w in t.iter() {
                    for i in 0..w.len() {
                        for j in i + 1..=w.len() {
                            prop_assert!(t.contains(&w.slice(i, j)));
                        }
                    }
                }
                let shallow = generate_language(&seq, 0, len, 9);
                if let Ok(s) = shallow {
                    for w in s.iter() {
                        prop_assert!(t.contains(w));
                    }
                }
                for m in 1..len {
                    for n in 1..=len - m {
                        let p = |k| complexity(&t, k).unwrap().count;
                        prop_assert!(p(m + n) <= p(m) * p(n));
                    }
                }
                prop_assert!(complexity(&t, len).unwrap().entropy_estimate >= 0.0);
            }
        }
    }
}
