//! Built-in families: the block maps `τ_d` and `σ_{ℓ,d}`, the alternating
//! diagonal sequence with its tower family, and a small worked example with
//! a non-thin critical level.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cones::{cone_at_level, critical_level_estimate};
use crate::directive::DirectiveSequence;
use crate::error::{Error, Result};
use crate::io::rational_serde;
use crate::language::entropy_upper_bound;
use crate::linalg::rank;
use crate::measures::{characteristic_measure, letter_frequency, transfer_measure, WeightTable};
use crate::recognizability::orbit_collision_on_periodic;
use crate::symbols::{Alphabet, Letter, Morphism, Word};
use crate::towers::{levelwise_measures, validate_tower, VectorTower};

/// The alphabet `a1, ..., ad`.
pub fn diagonal_alphabet(d: usize) -> Result<Arc<Alphabet>> {
    Ok(Arc::new(Alphabet::indexed("a", d)?))
}

/// `τ_d: A(d+1) -> A(d)`, `a_i ↦ a_i a_i` for `i <= d`, `a_{d+1} ↦ a_1 ... a_d`.
pub fn build_tau_d(d: usize) -> Result<Morphism> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "τ_d needs d >= 2, got {d}"
        )));
    }
    let source = diagonal_alphabet(d + 1)?;
    let target = diagonal_alphabet(d)?;
    let mut images: Vec<Word> = (0..d as Letter).map(|i| Word(vec![i, i])).collect();
    images.push(Word((0..d as Letter).collect()));
    Morphism::new(source, target, images)
}

/// `σ(a_i) = a_1 ... a_{i-1} a_i^{ℓ+1} a_{i+1} ... a_d`, incidence `ℓI + J`.
pub fn build_sigma_ld(ell: u64, d: usize) -> Result<Morphism> {
    if ell < 2 || d < 2 {
        return Err(Error::InvalidParameter(format!(
            "σ_(ℓ,d) needs ℓ >= 2 and d >= 2, got ℓ = {ell}, d = {d}"
        )));
    }
    let a = diagonal_alphabet(d)?;
    let images = (0..d as Letter)
        .map(|i| {
            let mut w = Vec::with_capacity(d + ell as usize);
            for j in 0..d as Letter {
                let reps = if j == i { ell as usize + 1 } else { 1 };
                w.extend(std::iter::repeat_n(j, reps));
            }
            Word(w)
        })
        .collect();
    Morphism::new(a.clone(), a, images)
}

/// `blocks` alternating blocks `σ_{ℓ_k, k+2} ∘ τ_{k+2}`, `k = 0..blocks`.
///
/// With 0-based levels, level `2k` is `σ_{ℓ_k, k+2}` on `A(k+2)` and level
/// `2k+1` is `τ_{k+2}`, so the alphabet sizes read `2, 2, 3, 3, 4, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalFamilySpec {
    pub ell: Vec<u64>,
    pub blocks: usize,
}

impl DiagonalFamilySpec {
    pub fn new(ell: Vec<u64>) -> Self {
        let blocks = ell.len();
        Self { ell, blocks }
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks == 0 {
            return Err(Error::InvalidParameter(
                "the diagonal family needs at least one block".into(),
            ));
        }
        if self.ell.len() < self.blocks {
            return Err(Error::InvalidParameter(format!(
                "ℓ-schedule has {} entries for {} blocks",
                self.ell.len(),
                self.blocks
            )));
        }
        if let Some(l) = self.ell.iter().find(|&&l| l < 2) {
            return Err(Error::InvalidParameter(format!(
                "ℓ-schedule entries must be >= 2, got {l}"
            )));
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        2 * self.blocks
    }

    /// Level where the alphabet `A(d)` first appears as a `σ` block.
    pub fn level_of_block(d: usize) -> usize {
        2 * d - 4
    }
}

pub fn build_diagonal_sequence(spec: &DiagonalFamilySpec) -> Result<DirectiveSequence> {
    spec.validate()?;
    let ell = spec.ell.clone();
    DirectiveSequence::parameterized("diagonal", spec.depth(), move |n| {
        let k = n / 2;
        if n % 2 == 0 {
            build_sigma_ld(ell[k], k + 2)
        } else {
            build_tau_d(k + 2)
        }
    })
}

/// The `d` towers `v^i` with top vectors `λ1 e_i + λ2 c` (`c` all ones),
/// pushed down exactly through the whole sequence.
#[derive(Clone, Debug)]
pub struct DiagonalTowers {
    pub d: usize,
    pub n0: usize,
    pub sequence: DirectiveSequence,
    /// Full towers over levels `0..=N`.
    pub towers: Vec<VectorTower>,
    /// `(λ1_n, λ2_n)` with `v^i_n = λ1_n e_i + λ2_n c_n`, for `n = n0..=N`.
    pub coefficients: Vec<(BigRational, BigRational)>,
    pub degenerate: bool,
}

impl DiagonalTowers {
    /// Towers over the truncated sequence starting at `n0`.
    pub fn truncated(&self) -> Result<Vec<VectorTower>> {
        self.towers.iter().map(|t| t.truncate(self.n0)).collect()
    }

    pub fn rank_at_n0(&self) -> Result<usize> {
        let rows = self
            .towers
            .iter()
            .map(|t| Ok(t.level(self.n0)?.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Ok(rank(&rows))
    }

    /// Rank of the pushed-forward letter frequency vectors at level 0
    /// (at most the base alphabet size).
    pub fn base_frequency_rank(&self) -> Result<usize> {
        let rows = self
            .towers
            .iter()
            .map(|t| Ok(t.level(0)?.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Ok(rank(&rows))
    }

    /// The `d` level-0 weight tables over cylinders of length `<= len`.
    pub fn base_tables(&self, len: usize) -> Result<Vec<WeightTable>> {
        self.towers
            .iter()
            .map(|t| {
                Ok(levelwise_measures(&self.sequence, t, len)?
                    .table(0)?
                    .clone())
            })
            .collect()
    }

    pub fn base_measure_rank(&self, len: usize) -> Result<usize> {
        Ok(table_rank(&self.base_tables(len)?))
    }

    /// Least cylinder length `<= max_len` at which the level-0 tables reach
    /// rank `d`, with the rank attained there (or at `max_len`).
    pub fn base_measure_rank_search(&self, max_len: usize) -> Result<(usize, usize)> {
        let tables = self.base_tables(max_len)?;
        let mut last = (0, 0);
        for len in 1..=max_len {
            let r = table_rank(&tables.iter().map(|t| t.truncated(len)).collect::<Vec<_>>());
            last = (len, r);
            if r == self.d {
                break;
            }
        }
        Ok(last)
    }
}

/// Rank of weight tables viewed as vectors indexed by words.
pub fn table_rank(tables: &[WeightTable]) -> usize {
    let mut words: Vec<&Word> = tables
        .iter()
        .flat_map(|t| t.support().map(|(w, _)| w))
        .collect();
    words.sort();
    words.dedup();
    let rows: Vec<Vec<BigRational>> = tables
        .iter()
        .map(|t| words.iter().map(|w| t.get(w)).collect())
        .collect();
    rank(&rows)
}

pub fn build_diagonal_towers(
    spec: &DiagonalFamilySpec,
    d: usize,
    lambda1: BigRational,
    lambda2: BigRational,
) -> Result<DiagonalTowers> {
    let seq = build_diagonal_sequence(spec)?;
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "block alphabet size must be >= 2, got {d}"
        )));
    }
    let n0 = DiagonalFamilySpec::level_of_block(d);
    let depth = seq.depth();
    if n0 >= depth {
        return Err(Error::DepthExhausted(format!(
            "level n0 = {n0} for d = {d} is not below depth {depth}"
        )));
    }
    if lambda1.is_negative() || lambda2.is_negative() {
        return Err(Error::Infeasible {
            level: depth,
            reason: "λ coefficients must be nonnegative".into(),
        });
    }
    if lambda1.is_zero() && lambda2.is_zero() {
        return Err(Error::Infeasible {
            level: depth,
            reason: "λ coefficients are both zero".into(),
        });
    }
    let top_size = seq.alphabet(depth)?.len();
    let mut towers = Vec::with_capacity(d);
    let mut coefficients = Vec::new();
    for i in 0..d {
        let top = (0..top_size)
            .map(|j| {
                if j == i {
                    &lambda1 + &lambda2
                } else {
                    lambda2.clone()
                }
            })
            .collect();
        let tower = VectorTower::from_top(&seq, depth, top)?;
        let mut coeffs = Vec::with_capacity(depth - n0 + 1);
        for n in n0..=depth {
            let v = tower.level(n)?;
            let other = if i == 0 { 1 } else { 0 };
            let l2 = v[other].clone();
            let l1 = &v[i] - &l2;
            let fits = v
                .iter()
                .enumerate()
                .all(|(j, x)| if j == i { *x == &l1 + &l2 } else { *x == l2 });
            if !fits || l1.is_negative() || !l2.is_positive() {
                return Err(Error::Infeasible {
                    level: n,
                    reason: format!("tower {} leaves the λ1 e_i + λ2 c form", i + 1),
                });
            }
            coeffs.push((l1, l2));
        }
        if !validate_tower(&seq, &tower)?.is_valid() {
            return Err(Error::Infeasible {
                level: depth,
                reason: "tower failed compatibility".into(),
            });
        }
        if coefficients.is_empty() {
            coefficients = coeffs;
        } else if coefficients != coeffs {
            return Err(Error::Infeasible {
                level: n0,
                reason: "towers disagree on λ coefficients".into(),
            });
        }
        towers.push(tower);
    }
    Ok(DiagonalTowers {
        d,
        n0,
        sequence: seq,
        towers,
        coefficients,
        degenerate: lambda1.is_zero(),
    })
}

/// The diagonal-family certificate at one block size.
#[derive(Clone, Debug, Serialize)]
pub struct DiagonalReport {
    pub d: usize,
    pub ell: Vec<u64>,
    pub blocks: usize,
    pub n0: usize,
    pub alphabet_sizes: Vec<usize>,
    #[serde(serialize_with = "rational_serde::one")]
    pub lambda1: BigRational,
    #[serde(serialize_with = "rational_serde::one")]
    pub lambda2: BigRational,
    pub degenerate: bool,
    pub towers_valid: bool,
    pub masses_strictly_decreasing: bool,
    pub rank_at_n0: usize,
    pub base_frequency_rank: usize,
    pub base_measure_len: usize,
    pub base_measure_rank: usize,
    pub entropy_bound: f64,
    /// Level-`n0` vectors, one per tower.
    #[serde(serialize_with = "rational_serde::vecs")]
    pub level_n0_vectors: Vec<Vec<BigRational>>,
}

pub fn diagonal_report(
    spec: &DiagonalFamilySpec,
    d: usize,
    max_base_len: usize,
) -> Result<DiagonalReport> {
    let one = BigRational::one();
    let family = build_diagonal_towers(spec, d, one.clone(), one.clone())?;
    let seq = &family.sequence;
    let alphabet_sizes = (0..=seq.depth())
        .map(|n| Ok(seq.alphabet(n)?.len()))
        .collect::<Result<_>>()?;
    let mut towers_valid = true;
    let mut masses_strictly_decreasing = true;
    for t in &family.towers {
        let v = validate_tower(seq, t)?;
        towers_valid &= v.is_valid();
        masses_strictly_decreasing &= v.masses.windows(2).all(|p| p[0] > p[1]);
    }
    let (base_measure_len, base_measure_rank) = family.base_measure_rank_search(max_base_len)?;
    Ok(DiagonalReport {
        d,
        ell: spec.ell[..spec.blocks].to_vec(),
        blocks: spec.blocks,
        n0: family.n0,
        alphabet_sizes,
        lambda1: one.clone(),
        lambda2: one,
        degenerate: family.degenerate,
        towers_valid,
        masses_strictly_decreasing,
        rank_at_n0: family.rank_at_n0()?,
        base_frequency_rank: family.base_frequency_rank()?,
        base_measure_len,
        base_measure_rank,
        entropy_bound: entropy_upper_bound(seq, seq.depth())?.value,
        level_n0_vectors: family
            .towers
            .iter()
            .map(|t| Ok(t.level(family.n0)?.to_vec()))
            .collect::<Result<_>>()?,
    })
}

/// Levels `σ_0: a ↦ cd, b ↦ dc`, `σ_1: x ↦ aab, y ↦ bba`, then `x ↦ xx,
/// y ↦ yy` forever: frequency cone of dimension 1 at level 0 and 2 above,
/// so the critical level is 1.
#[derive(Clone, Debug)]
pub struct CriticalLevelExample {
    pub sequence: DirectiveSequence,
    pub source_words: [&'static str; 2],
    pub periodic_words: [&'static str; 2],
    pub cone_ranks: [usize; 2],
    pub critical_level: usize,
}

pub const CRITICAL_LEVEL_EXAMPLE_DEPTH: usize = 32;

pub fn build_critical_level_example() -> CriticalLevelExample {
    let build = || -> Result<DirectiveSequence> {
        let s0 = Morphism::from_chars("ab", "cd", &["cd", "dc"])?;
        let s1 = Morphism::from_chars("xy", "ab", &["aab", "bba"])?;
        let tail = Morphism::from_chars("xy", "xy", &["xx", "yy"])?;
        DirectiveSequence::prefix_stationary(vec![s0, s1], tail, CRITICAL_LEVEL_EXAMPLE_DEPTH)
    };
    CriticalLevelExample {
        sequence: build().expect("example sequence is well formed"),
        source_words: ["aab", "bba"],
        periodic_words: ["cdcddc", "dcdccd"],
        cone_ranks: [1, 2],
        critical_level: 1,
    }
}

/// Every quoted number of the example, recomputed.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalLevelExampleReport {
    pub telescope_x: String,
    pub telescope_y: String,
    pub sigma1_matrix: Vec<Vec<u64>>,
    #[serde(serialize_with = "rational_serde::vecs")]
    pub source_frequencies: Vec<Vec<BigRational>>,
    pub transferred: Vec<String>,
    /// `[cd]` and `[dc]` weights of each transferred table.
    #[serde(serialize_with = "rational_serde::vecs")]
    pub cd_dc_weights: Vec<Vec<BigRational>>,
    /// Weight of `cdcddc` in each transferred table.
    #[serde(serialize_with = "rational_serde::vec")]
    pub cdcddc_weights: Vec<BigRational>,
    pub tables_differ_at_len_6: bool,
    pub orbit_collision: bool,
    pub cone_ranks: Vec<usize>,
    pub critical_level: usize,
    pub thin: bool,
    pub matches_expected: bool,
}

pub fn critical_level_example_report() -> Result<CriticalLevelExampleReport> {
    let ex = build_critical_level_example();
    let seq = &ex.sequence;
    let t02 = seq.telescope(0, 2)?;
    let sigma0 = seq.level(0)?;
    let sigma1 = seq.level(1)?;
    let a1 = seq.alphabet(1)?;
    let a0 = seq.alphabet(0)?;
    let mut source_frequencies = Vec::new();
    let mut transferred = Vec::new();
    let mut tables = Vec::new();
    for w in ex.source_words {
        let mu = characteristic_measure(a1.clone(), &a1.parse_word(w)?, 6)?;
        source_frequencies.push(letter_frequency(&mu));
        let t = transfer_measure(&sigma0, &mu, 6)?;
        let root = sigma0.apply(&a1.parse_word(w)?)?.primitive_root();
        transferred.push(a0.format_word(&root));
        tables.push(t);
    }
    let cd = a0.parse_word("cd")?;
    let dc = a0.parse_word("dc")?;
    let cdcddc = a0.parse_word("cdcddc")?;
    let cd_dc_weights = tables
        .iter()
        .map(|t| vec![t.get(&cd), t.get(&dc)])
        .collect();
    let cdcddc_weights: Vec<BigRational> = tables.iter().map(|t| t.get(&cdcddc)).collect();
    let differ = tables[0] != tables[1];
    let orbit =
        orbit_collision_on_periodic(&sigma0, &a1.parse_word("aab")?, &a1.parse_word("bba")?)?;
    let probe = 4;
    let cone_ranks = vec![
        cone_at_level(seq, 0, probe)?.rank,
        cone_at_level(seq, 1, probe + 1)?.rank,
    ];
    let critical = critical_level_estimate(seq, 8, probe)?;
    let source_frequencies: Vec<Vec<BigRational>> = source_frequencies;
    let int = |x: i64| BigRational::from_integer(x.into());
    let matches_expected = a0.format_word(t02.image(0)) == ex.periodic_words[0]
        && a0.format_word(t02.image(1)) == ex.periodic_words[1]
        && source_frequencies == vec![vec![int(2), int(1)], vec![int(1), int(2)]]
        && transferred == ex.periodic_words
        && tables
            .iter()
            .all(|t| t.get(&cd) == int(2) && t.get(&dc) == int(2))
        && cdcddc_weights == vec![int(1), int(0)]
        && differ
        && !orbit.collision
        && cone_ranks == ex.cone_ranks
        && critical.apparent_critical_level == ex.critical_level;
    Ok(CriticalLevelExampleReport {
        telescope_x: a0.format_word(t02.image(0)),
        telescope_y: a0.format_word(t02.image(1)),
        sigma1_matrix: sigma1.incidence_matrix().to_rows(),
        source_frequencies,
        transferred,
        cd_dc_weights,
        cdcddc_weights,
        tables_differ_at_len_6: differ,
        orbit_collision: orbit.collision,
        cone_ranks,
        critical_level: critical.apparent_critical_level,
        thin: critical.thin,
        matches_expected,
    })
}
