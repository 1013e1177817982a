//! Cylinder weight tables for invariant measures and the measure transfer
//! `σ^M` induced by a non-erasing morphism.
//!
//! A [`WeightTable`] stores exact weights `μ([w])` for every word with
//! `1 <= |w| <= L`; words that are absent have weight 0. It stands in for any
//! invariant measure that agrees with it up to length `L`. Nothing here uses
//! floating point.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::language::required_input_len;
use crate::linalg::to_rational;
use crate::symbols::{Alphabet, Letter, Morphism, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightTable {
    alphabet: Arc<Alphabet>,
    max_len: usize,
    mass: BigRational,
    weights: BTreeMap<Word, BigRational>,
}

impl WeightTable {
    pub fn zero(alphabet: Arc<Alphabet>, max_len: usize) -> Self {
        Self {
            alphabet,
            max_len,
            mass: BigRational::zero(),
            weights: BTreeMap::new(),
        }
    }

    /// Builds a table from explicit weights; the total mass is the sum of the
    /// letter weights. Kirchhoff consistency is not enforced here, see
    /// [`check_kirchhoff`].
    pub fn from_weights(
        alphabet: Arc<Alphabet>,
        max_len: usize,
        weights: impl IntoIterator<Item = (Word, BigRational)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (w, x) in weights {
            if w.is_empty() || w.len() > max_len {
                return Err(Error::InvalidWord(format!(
                    "word length {} outside 1..={max_len}",
                    w.len()
                )));
            }
            alphabet.check_word(&w)?;
            if x.is_negative() {
                return Err(Error::InvalidParameter("negative cylinder weight".into()));
            }
            if !x.is_zero() {
                map.insert(w, x);
            }
        }
        let mass = alphabet
            .letters()
            .filter_map(|a| map.get(&Word::letter(a)))
            .fold(BigRational::zero(), |acc, x| acc + x);
        Ok(Self {
            alphabet,
            max_len,
            mass,
            weights: map,
        })
    }

    /// Overrides the stored total mass (used when reading serialized tables
    /// whose mass field may disagree with the letter weights).
    pub fn with_mass(mut self, mass: BigRational) -> Self {
        self.mass = mass;
        self
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn mass(&self) -> &BigRational {
        &self.mass
    }

    pub fn get(&self, w: &Word) -> BigRational {
        self.weights
            .get(w)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Non-zero entries in word order.
    pub fn support(&self) -> impl Iterator<Item = (&Word, &BigRational)> {
        self.weights.iter()
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    /// Entries with length `<= len`.
    pub fn truncated(&self, len: usize) -> WeightTable {
        let weights = self
            .weights
            .iter()
            .filter(|(w, _)| w.len() <= len)
            .map(|(w, x)| (w.clone(), x.clone()))
            .collect();
        Self {
            alphabet: self.alphabet.clone(),
            max_len: len.min(self.max_len),
            mass: self.mass.clone(),
            weights,
        }
    }

    pub fn scale(&self, factor: &BigRational) -> Result<WeightTable> {
        if factor.is_negative() {
            return Err(Error::InvalidParameter("negative scale factor".into()));
        }
        let weights = if factor.is_zero() {
            BTreeMap::new()
        } else {
            self.weights
                .iter()
                .map(|(w, x)| (w.clone(), x * factor))
                .collect()
        };
        Ok(Self {
            alphabet: self.alphabet.clone(),
            max_len: self.max_len,
            mass: &self.mass * factor,
            weights,
        })
    }

    /// Sum of two tables over the same alphabet, truncated to the shorter bound.
    pub fn add(&self, other: &WeightTable) -> Result<WeightTable> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch {
                expected: self.alphabet.names().join(","),
                found: other.alphabet.names().join(","),
            });
        }
        let len = self.max_len.min(other.max_len);
        let mut weights = self.truncated(len).weights;
        for (w, x) in other.weights.iter().filter(|(w, _)| w.len() <= len) {
            *weights.entry(w.clone()).or_insert_with(BigRational::zero) += x;
        }
        Ok(Self {
            alphabet: self.alphabet.clone(),
            max_len: len,
            mass: &self.mass + &other.mass,
            weights,
        })
    }

    /// Probability view: every weight divided by the total mass.
    pub fn normalized(&self) -> Result<WeightTable> {
        if self.mass.is_zero() {
            return Err(Error::InvalidParameter(
                "cannot normalize a table of mass 0".into(),
            ));
        }
        self.scale(&(BigRational::one() / &self.mass))
    }

    /// CSV lines `word,weight`, sorted by word.
    pub fn to_csv(&self) -> String {
        let mut rows: Vec<(String, String)> = self
            .weights
            .iter()
            .map(|(w, x)| (self.alphabet.format_word(w), crate::io::format_rational(x)))
            .collect();
        rows.sort();
        let mut out = String::from("word,weight\n");
        for (w, x) in rows {
            out.push_str(&format!("{w},{x}\n"));
        }
        out
    }
}

/// `μ_w([u])` for `|u| <= max_len`: the number of start positions in
/// `0..|w|` where `u` occurs in the periodic word `w^∞`.
pub fn characteristic_measure(
    alphabet: Arc<Alphabet>,
    w: &Word,
    max_len: usize,
) -> Result<WeightTable> {
    if w.is_empty() {
        return Err(Error::InvalidWord(
            "characteristic measure of the empty word".into(),
        ));
    }
    alphabet.check_word(w)?;
    let n = w.len();
    let reps = max_len.div_ceil(n) + 1;
    let periodic = w.as_slice().repeat(reps);
    let mut counts: HashMap<&[Letter], u64> = HashMap::new();
    for start in 0..n {
        for len in 1..=max_len {
            *counts.entry(&periodic[start..start + len]).or_insert(0) += 1;
        }
    }
    let weights: Vec<(Word, BigRational)> = counts
        .into_iter()
        .map(|(u, c)| (Word(u.to_vec()), to_rational(c)))
        .collect();
    WeightTable::from_weights(alphabet, max_len, weights)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KirchhoffViolation {
    pub word: Word,
    pub value: BigRational,
    pub left_sum: BigRational,
    pub right_sum: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KirchhoffReport {
    pub checked: usize,
    pub violations: Vec<KirchhoffViolation>,
}

impl KirchhoffReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `μ(w) = Σ_a μ(aw) = Σ_a μ(wa)` for every `|w| <= L - 1`,
/// including the empty word (whose weight is the total mass).
pub fn check_kirchhoff(table: &WeightTable) -> KirchhoffReport {
    let mut candidates: std::collections::BTreeSet<Word> = std::collections::BTreeSet::new();
    candidates.insert(Word::empty());
    for w in table.weights.keys() {
        if w.len() < table.max_len {
            candidates.insert(w.clone());
        }
        if w.len() >= 2 {
            candidates.insert(w.slice(1, w.len()));
            candidates.insert(w.slice(0, w.len() - 1));
        }
    }
    let mut violations = Vec::new();
    for w in &candidates {
        let value = if w.is_empty() {
            table.mass.clone()
        } else {
            table.get(w)
        };
        let mut left = BigRational::zero();
        let mut right = BigRational::zero();
        for a in table.alphabet.letters() {
            left += table.get(&Word::letter(a).concat(w));
            right += table.get(&w.concat(&Word::letter(a)));
        }
        if left != value || right != value {
            violations.push(KirchhoffViolation {
                word: w.clone(),
                value,
                left_sum: left,
                right_sum: right,
            });
        }
    }
    KirchhoffReport {
        checked: candidates.len(),
        violations,
    }
}

/// Letter frequency vector `ζ(μ) = (μ([a]))_a`.
pub fn letter_frequency(table: &WeightTable) -> Vec<BigRational> {
    table
        .alphabet
        .letters()
        .map(|a| table.get(&Word::letter(a)))
        .collect()
}

/// The transferred table `μ^σ` up to length `target_len`.
///
/// Single letters use `μ^σ([b]) = Σ_a |σ(a)|_b μ([a])`; longer words sum
/// `⌊σ(w)⌋_{w'} μ([w])` over source words `w`, accumulated by enumerating the
/// essential occurrences inside `σ(w)` for every word in the support.
pub fn transfer_measure(
    sigma: &Morphism,
    table: &WeightTable,
    target_len: usize,
) -> Result<WeightTable> {
    if **sigma.source() != *table.alphabet {
        return Err(Error::AlphabetMismatch {
            expected: sigma.source().names().join(","),
            found: table.alphabet.names().join(","),
        });
    }
    if target_len == 0 {
        return Err(Error::InvalidParameter(
            "target length must be at least 1".into(),
        ));
    }
    let need = required_input_len(target_len, sigma).max(1);
    if table.max_len < need {
        return Err(Error::Coverage {
            need,
            have: table.max_len,
        });
    }
    let mut out: HashMap<Vec<Letter>, BigRational> = HashMap::new();

    let freq = letter_frequency(table);
    let m = sigma.incidence_matrix();
    for (b, x) in m.mul_vec(&freq)?.into_iter().enumerate() {
        if !x.is_zero() {
            out.insert(vec![b as Letter], x);
        }
    }

    if target_len >= 2 {
        for (w, weight) in table.weights.iter().filter(|(w, _)| w.len() <= need) {
            let image = sigma.apply_slice(w.as_slice());
            let first = sigma.image(w.0[0]).len();
            let last_start = image.len() - sigma.image(*w.0.last().unwrap()).len();
            for start in 0..first {
                // the occurrence must end in the last letter image and have length >= 2
                let lo = last_start.max(start + 1);
                let hi = image.len().min(start + target_len);
                for end in lo..hi {
                    *out.entry(image[start..=end].to_vec())
                        .or_insert_with(BigRational::zero) += weight;
                }
            }
        }
    }
    WeightTable::from_weights(
        sigma.target().clone(),
        target_len,
        out.into_iter().map(|(w, x)| (Word(w), x)),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransferReport {
    pub target_len: usize,
    /// (a) total mass equals `Σ_a Σ_b |σ(a)|_b μ(a)`.
    pub mass_ok: bool,
    /// (b) `ζ(μ^σ) = M(σ) ζ(μ)`.
    pub frequency_ok: bool,
    /// (c) number of words `w` with `|σ(w)| <= L'` checked for `μ^σ([σ(w)]) >= μ([w])`.
    pub cylinder_checked: usize,
    pub cylinder_failures: Vec<String>,
    /// (d) agreement with the characteristic measure of `σ(w)`, when the
    /// input was declared to be `μ_w`.
    pub characteristic_ok: Option<bool>,
    pub kirchhoff_ok: bool,
}

impl TransferReport {
    pub fn all_ok(&self) -> bool {
        self.mass_ok
            && self.frequency_ok
            && self.cylinder_failures.is_empty()
            && self.characteristic_ok.unwrap_or(true)
            && self.kirchhoff_ok
    }
}

pub fn transfer_property_report(
    sigma: &Morphism,
    table: &WeightTable,
    target_len: usize,
    characteristic_of: Option<&Word>,
) -> Result<TransferReport> {
    let out = transfer_measure(sigma, table, target_len)?;
    let m = sigma.incidence_matrix();
    let freq = letter_frequency(table);

    let mut expected_mass = BigRational::zero();
    for a in table.alphabet.letters() {
        let len = BigRational::from_integer(BigInt::from(sigma.image(a).len()));
        expected_mass += len * &freq[a as usize];
    }
    let mass_ok = *out.mass() == expected_mass;
    let frequency_ok = letter_frequency(&out) == m.mul_vec(&freq)?;

    let mut cylinder_checked = 0;
    let mut cylinder_failures = Vec::new();
    for (w, x) in table.support() {
        let img = Word(sigma.apply_slice(w.as_slice()));
        if img.len() > target_len {
            continue;
        }
        cylinder_checked += 1;
        if out.get(&img) < *x {
            cylinder_failures.push(table.alphabet.format_word(w));
        }
    }

    let characteristic_ok = match characteristic_of {
        Some(w) => {
            let img = sigma.apply(w)?;
            Some(characteristic_measure(sigma.target().clone(), &img, target_len)? == out)
        }
        None => None,
    };
    let kirchhoff_ok = check_kirchhoff(&out).is_consistent();
    Ok(TransferReport {
        target_len,
        mass_ok,
        frequency_ok,
        cylinder_checked,
        cylinder_failures,
        characteristic_ok,
        kirchhoff_ok,
    })
}
