//! Vector towers over a directive sequence, their evaluation into cylinder
//! weights, level-wise measure tables and prolongation.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::directive::DirectiveSequence;
use crate::error::{Error, Result};
use crate::io::rational_serde;
use crate::language::required_input_len;
use crate::measures::{check_kirchhoff, letter_frequency, transfer_measure, WeightTable};
use crate::symbols::{count_in_slice, Alphabet, Morphism, Word};

/// Nonnegative vectors `v_0, ..., v_N`, `v_n` indexed by the letters of `A_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorTower {
    levels: Vec<Vec<BigRational>>,
}

impl VectorTower {
    pub fn new(levels: Vec<Vec<BigRational>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidParameter(
                "a tower needs at least one level".into(),
            ));
        }
        if levels.iter().flatten().any(Signed::is_negative) {
            return Err(Error::InvalidParameter(
                "tower entries must be nonnegative".into(),
            ));
        }
        Ok(Self { levels })
    }

    /// The tower of depth `depth` determined by its top vector:
    /// `v_n = M(σ_n) v_{n+1}`.
    pub fn from_top(seq: &DirectiveSequence, depth: usize, top: Vec<BigRational>) -> Result<Self> {
        let top_len = seq.alphabet(depth)?.len();
        if top.len() != top_len {
            return Err(Error::DimensionMismatch(format!(
                "top vector has {} entries, A_{depth} has {top_len} letters",
                top.len()
            )));
        }
        let mut levels = vec![top];
        for n in (0..depth).rev() {
            let below = seq
                .level(n)?
                .incidence_matrix()
                .mul_vec(levels.last().unwrap())?;
            levels.push(below);
        }
        levels.reverse();
        Self::new(levels)
    }

    /// The characteristic-style tower with `v_N = e_a`.
    pub fn characteristic(seq: &DirectiveSequence, depth: usize, letter: &str) -> Result<Self> {
        let top = seq.alphabet(depth)?;
        let a = top.index_of(letter).ok_or_else(|| {
            Error::InvalidWord(format!("`{letter}` is not a letter of A_{depth}"))
        })?;
        let v = top
            .letters()
            .map(|b| {
                if b == a {
                    BigRational::from_integer(1.into())
                } else {
                    BigRational::zero()
                }
            })
            .collect();
        Self::from_top(seq, depth, v)
    }

    pub fn zero(seq: &DirectiveSequence, depth: usize) -> Result<Self> {
        let levels = (0..=depth)
            .map(|n| Ok(vec![BigRational::zero(); seq.alphabet(n)?.len()]))
            .collect::<Result<_>>()?;
        Self::new(levels)
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> Result<&[BigRational]> {
        self.levels
            .get(n)
            .map(Vec::as_slice)
            .ok_or(Error::LevelOutOfRange {
                level: n,
                depth: self.depth(),
            })
    }

    pub fn levels(&self) -> &[Vec<BigRational>] {
        &self.levels
    }

    /// Levels `n..=N`, re-indexed from 0 (the tower over `seq.truncate(n)`).
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n > self.depth() {
            return Err(Error::LevelOutOfRange {
                level: n,
                depth: self.depth(),
            });
        }
        Ok(Self {
            levels: self.levels[n..].to_vec(),
        })
    }

    /// `Σ_a v_n(a)`.
    pub fn mass(&self, n: usize) -> Result<BigRational> {
        Ok(self
            .level(n)?
            .iter()
            .fold(BigRational::zero(), |acc, x| acc + x))
    }
}

fn check_dimensions(seq: &DirectiveSequence, tower: &VectorTower) -> Result<()> {
    if tower.depth() > seq.depth() {
        return Err(Error::LevelOutOfRange {
            level: tower.depth(),
            depth: seq.depth(),
        });
    }
    for (n, v) in tower.levels.iter().enumerate() {
        let size = seq.alphabet(n)?.len();
        if v.len() != size {
            return Err(Error::DimensionMismatch(format!(
                "tower level {n} has {} entries, A_{n} has {size} letters",
                v.len()
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerValidation {
    pub depth: usize,
    /// Levels `n < N` where `v_n != M(σ_n) v_{n+1}`.
    pub violations: Vec<usize>,
    /// `Σ_a v_n(a)` for `n = 0..=N`.
    #[serde(serialize_with = "rational_serde::vec")]
    pub masses: Vec<BigRational>,
}

impl TowerValidation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_tower(seq: &DirectiveSequence, tower: &VectorTower) -> Result<TowerValidation> {
    check_dimensions(seq, tower)?;
    let mut violations = Vec::new();
    for n in 0..tower.depth() {
        let pushed = seq
            .level(n)?
            .incidence_matrix()
            .mul_vec(&tower.levels[n + 1])?;
        if pushed != tower.levels[n] {
            violations.push(n);
        }
    }
    let masses = (0..=tower.depth())
        .map(|n| tower.mass(n))
        .collect::<Result<_>>()?;
    Ok(TowerValidation {
        depth: tower.depth(),
        violations,
        masses,
    })
}

/// `S_n(w) = Σ_a v_n(a) |σ_[0,n)(a)|_w` with the bound
/// `μ([w]) - S_n(w) <= (|w| - 1) Σ_a v_n(a)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerEvaluation {
    pub level: usize,
    pub word_len: usize,
    #[serde(serialize_with = "rational_serde::one")]
    pub value: BigRational,
    #[serde(serialize_with = "rational_serde::one")]
    pub error_bound: BigRational,
}

pub fn evaluate_tower(
    seq: &DirectiveSequence,
    tower: &VectorTower,
    w: &Word,
    n: usize,
) -> Result<TowerEvaluation> {
    if n > tower.depth() {
        return Err(Error::LevelOutOfRange {
            level: n,
            depth: tower.depth(),
        });
    }
    check_dimensions(seq, tower)?;
    if w.is_empty() {
        return Err(Error::EmptyPattern);
    }
    seq.alphabet(0)?.check_word(w)?;
    let v = &tower.levels[n];
    let mut value = BigRational::zero();
    let telescoped = if n == 0 {
        None
    } else {
        Some(seq.telescope(0, n)?)
    };
    for (a, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let count = match &telescoped {
            Some(t) => count_in_slice(t.image(a as u16).as_slice(), w.as_slice()),
            None => usize::from(w.as_slice() == [a as u16]),
        };
        value += x * BigRational::from_integer(BigInt::from(count));
    }
    let error_bound = tower.mass(n)? * BigRational::from_integer(BigInt::from(w.len() - 1));
    Ok(TowerEvaluation {
        level: n,
        word_len: w.len(),
        value,
        error_bound,
    })
}

/// One weight table per level `k = 0..=N`, each the cyclic evaluation
/// `Σ_a v_N(a) μ_{σ_[k,N)(a)}` of the tower at its deepest level.
///
/// The tables are chained by measure transfer from the top, so
/// `tables[k] = transfer(σ_k, tables[k+1])` holds exactly and every level
/// satisfies Kirchhoff. Their letter frequencies reproduce the tower exactly;
/// on longer cylinders they sit within `(|w| - 1) Σ_a v_N(a)` of the limit
/// measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureTower {
    tables: Vec<WeightTable>,
    junction_mass: BigRational,
    round_trip_exact: bool,
}

impl MeasureTower {
    pub fn depth(&self) -> usize {
        self.tables.len() - 1
    }

    pub fn table(&self, k: usize) -> Result<&WeightTable> {
        self.tables.get(k).ok_or(Error::LevelOutOfRange {
            level: k,
            depth: self.depth(),
        })
    }

    pub fn tables(&self) -> &[WeightTable] {
        &self.tables
    }

    /// `Σ_a v_N(a)`.
    pub fn junction_mass(&self) -> &BigRational {
        &self.junction_mass
    }

    /// Bound on `μ([w]) - table([w])` for words of length `len`.
    pub fn error_bound(&self, len: usize) -> BigRational {
        &self.junction_mass * BigRational::from_integer(BigInt::from(len.saturating_sub(1)))
    }

    /// Whether `letter_frequency(tables[k]) == v_k` for every level.
    pub fn round_trip_exact(&self) -> bool {
        self.round_trip_exact
    }

    /// The vector tower read back from the letter frequencies.
    pub fn frequency_tower(&self) -> VectorTower {
        VectorTower {
            levels: self.tables.iter().map(letter_frequency).collect(),
        }
    }
}

/// Table of `Σ_a v(a) μ_a` where `μ_a([a^j]) = 1`.
fn letter_weights(
    alphabet: Arc<Alphabet>,
    v: &[BigRational],
    max_len: usize,
) -> Result<WeightTable> {
    let mut entries = Vec::new();
    for (a, x) in v.iter().enumerate() {
        if !x.is_zero() {
            for j in 1..=max_len {
                entries.push((Word(vec![a as u16; j]), x.clone()));
            }
        }
    }
    WeightTable::from_weights(alphabet, max_len, entries)
}

pub fn levelwise_measures(
    seq: &DirectiveSequence,
    tower: &VectorTower,
    max_len: usize,
) -> Result<MeasureTower> {
    if max_len == 0 {
        return Err(Error::InvalidParameter(
            "length bound must be at least 1".into(),
        ));
    }
    let validation = validate_tower(seq, tower)?;
    if let Some(&n) = validation.violations.first() {
        return Err(Error::InvalidParameter(format!(
            "tower violates compatibility at level {n}"
        )));
    }
    let depth = tower.depth();
    let mut need = vec![max_len; depth + 1];
    for k in 0..depth {
        need[k + 1] = max_len.max(required_input_len(need[k], &*seq.level(k)?));
    }
    let mut tables = vec![letter_weights(
        seq.alphabet(depth)?,
        &tower.levels[depth],
        need[depth],
    )?];
    for k in (0..depth).rev() {
        let below = transfer_measure(&*seq.level(k)?, tables.last().unwrap(), need[k])?;
        tables.push(below);
    }
    tables.reverse();
    let tables: Vec<WeightTable> = tables.into_iter().map(|t| t.truncated(max_len)).collect();
    debug_assert!(tables.iter().all(|t| check_kirchhoff(t).is_consistent()));
    let round_trip_exact = tables
        .iter()
        .zip(&tower.levels)
        .all(|(t, v)| letter_frequency(t) == *v);
    Ok(MeasureTower {
        tables,
        junction_mass: validation.masses[depth].clone(),
        round_trip_exact,
    })
}

/// The sequence `τ ∘ σ_0 ∘ ...` with the tower `(M(τ) v_0, v_0, v_1, ...)`.
pub fn prolong_tower(
    tau: &Morphism,
    seq: &DirectiveSequence,
    tower: &VectorTower,
) -> Result<(DirectiveSequence, VectorTower)> {
    check_dimensions(seq, tower)?;
    let prolonged = seq.prepend(tau.clone())?;
    let mut levels = Vec::with_capacity(tower.levels.len() + 1);
    levels.push(tau.incidence_matrix().mul_vec(&tower.levels[0])?);
    levels.extend(tower.levels.iter().cloned());
    Ok((prolonged, VectorTower::new(levels)?))
}
