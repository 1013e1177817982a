//! Bounded-radius recognizability scans and shift-orbit / shift-period
//! checks on periodic points.
//!
//! A marker `(a, k)` names position `k` inside the image block `σ(a)`. The
//! scan looks at every radius-`R` window of `σ(w)` centered at a position
//! whose full window fits inside the image, for source words `w` taken from
//! a language table. Two different markers under one window are a collision.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::language::{LanguageTable, TableOrigin};
use crate::symbols::{Letter, Morphism, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarkerConfig {
    pub letter: String,
    /// Position inside `σ(letter)`, `0 <= offset < |σ(letter)|`.
    pub offset: usize,
    pub left: String,
    pub right: String,
    /// Source word from the table whose image contains the window.
    pub source: String,
    /// Index in `source` of the letter carrying the marker.
    pub source_position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub radius: usize,
    pub window: String,
    pub center: String,
    pub first: MarkerConfig,
    pub second: MarkerConfig,
}

impl Witness {
    pub fn to_text(&self) -> String {
        let marker = |m: &MarkerConfig| {
            format!(
                "  marker ({}, {}) context {}[{}]{} from source {} at letter {}\n",
                m.letter, m.offset, m.left, self.center, m.right, m.source, m.source_position
            )
        };
        format!(
            "WITNESS radius {}\n  window {}\n{}{}",
            self.radius,
            self.window,
            marker(&self.first),
            marker(&self.second)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "UPPERCASE")]
pub enum RecognizabilityVerdict {
    Witness(Witness),
    /// No two markers share a window of this radius in the scanned table,
    /// and the table is certified (stabilized or the full shift).
    Clear {
        radius: usize,
        source_len: usize,
    },
    /// No usable collision, but nothing is certified either.
    Unknown {
        radius: usize,
        source_len: usize,
        reason: String,
    },
}

impl RecognizabilityVerdict {
    pub fn is_witness(&self) -> bool {
        matches!(self, Self::Witness(_))
    }

    pub fn is_clear(&self) -> bool {
        matches!(self, Self::Clear { .. })
    }

    pub fn to_text(&self) -> String {
        match self {
            Self::Witness(w) => w.to_text(),
            Self::Clear { radius, source_len } => {
                format!("CLEAR radius {radius} (source words of length {source_len})\n")
            }
            Self::Unknown {
                radius,
                source_len,
                reason,
            } => {
                format!("UNKNOWN radius {radius} (source words of length {source_len}): {reason}\n")
            }
        }
    }
}

/// Source word length needed so every radius-`R` window appears fully
/// inside the image of some source word.
pub fn scan_source_len(sigma: &Morphism, radius: usize) -> usize {
    2 * radius.div_ceil(sigma.min_image_len()) + 2
}

/// Smallest period of `w`.
fn smallest_period(w: &[Letter]) -> usize {
    (1..=w.len())
        .find(|&p| (p..w.len()).all(|i| w[i] == w[i - p]))
        .unwrap_or(w.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Marker {
    letter: Letter,
    offset: usize,
}

#[derive(Clone, Debug)]
struct Sighting {
    source: Word,
    letter_index: usize,
    center: usize,
}

pub fn recognizability_scan(
    sigma: &Morphism,
    table: &LanguageTable,
    radius: usize,
    aperiodic_only: bool,
) -> Result<RecognizabilityVerdict> {
    if **sigma.source() != **table.alphabet() {
        return Err(Error::AlphabetMismatch {
            expected: sigma.source().names().join(","),
            found: table.alphabet().names().join(","),
        });
    }
    let source_len = scan_source_len(sigma, radius);
    if table.max_len() < source_len {
        return Err(Error::Coverage {
            need: source_len,
            have: table.max_len(),
        });
    }
    let width = 2 * radius + 1;
    let mut windows: BTreeMap<Vec<Letter>, BTreeMap<Marker, Sighting>> = BTreeMap::new();
    for w in table.words_of_len(source_len) {
        let image = sigma.apply_slice(w.as_slice());
        let mut pos = 0;
        for (i, &a) in w.as_slice().iter().enumerate() {
            for k in 0..sigma.image(a).len() {
                let p = pos + k;
                if p >= radius && p + radius < image.len() {
                    windows
                        .entry(image[p - radius..p - radius + width].to_vec())
                        .or_default()
                        .entry(Marker {
                            letter: a,
                            offset: k,
                        })
                        .or_insert_with(|| Sighting {
                            source: w.clone(),
                            letter_index: i,
                            center: p,
                        });
                }
            }
            pos += sigma.image(a).len();
        }
    }

    let mut discarded = 0usize;
    for (window, markers) in &windows {
        if markers.len() < 2 {
            continue;
        }
        if aperiodic_only && 2 * smallest_period(window) <= window.len() {
            discarded += 1;
            continue;
        }
        let mut it = markers.iter();
        let (m1, s1) = it.next().unwrap();
        let (m2, s2) = it.next().unwrap();
        let first = verified_config(sigma, window, radius, *m1, s1)?;
        let second = verified_config(sigma, window, radius, *m2, s2)?;
        return Ok(RecognizabilityVerdict::Witness(Witness {
            radius,
            window: sigma.target().format_letters(window),
            center: sigma.target().name(window[radius]).to_string(),
            first,
            second,
        }));
    }

    let certified = table.stabilized() || *table.origin() == TableOrigin::FullShift;
    Ok(if discarded > 0 {
        RecognizabilityVerdict::Unknown {
            radius,
            source_len,
            reason: format!("{discarded} colliding windows are periodic and were discarded"),
        }
    } else if certified {
        RecognizabilityVerdict::Clear { radius, source_len }
    } else {
        RecognizabilityVerdict::Unknown {
            radius,
            source_len,
            reason: "no collision, but the language table is not stabilized".into(),
        }
    })
}

/// Re-expands the source word and checks that the window sits at the
/// recorded center with the recorded marker.
fn verified_config(
    sigma: &Morphism,
    window: &[Letter],
    radius: usize,
    marker: Marker,
    s: &Sighting,
) -> Result<MarkerConfig> {
    let image = sigma.apply(&s.source)?;
    let start: usize = s.source.as_slice()[..s.letter_index]
        .iter()
        .map(|&b| sigma.image(b).len())
        .sum();
    let ok = s.source.as_slice()[s.letter_index] == marker.letter
        && start + marker.offset == s.center
        && image.as_slice()[s.center - radius..=s.center + radius] == *window;
    if !ok {
        return Err(Error::InvalidParameter(
            "internal: collision failed re-expansion".into(),
        ));
    }
    let t = sigma.target();
    Ok(MarkerConfig {
        letter: sigma.source().name(marker.letter).to_string(),
        offset: marker.offset,
        left: t.format_letters(&window[..radius]),
        right: t.format_letters(&window[radius + 1..]),
        source: sigma.source().format_word(&s.source),
        source_position: s.letter_index,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftPeriodReport {
    pub word: String,
    pub image: String,
    pub word_proper_power: bool,
    pub image_proper_power: bool,
    /// False when exactly one of the two is a proper power.
    pub preserved: bool,
}

pub fn shift_period_check(sigma: &Morphism, w: &Word) -> Result<ShiftPeriodReport> {
    if w.is_empty() {
        return Err(Error::InvalidWord("empty word".into()));
    }
    let image = sigma.apply(w)?;
    let word_proper_power = w.is_proper_power();
    let image_proper_power = image.is_proper_power();
    Ok(ShiftPeriodReport {
        word: sigma.source().format_word(w),
        image: sigma.target().format_word(&image),
        word_proper_power,
        image_proper_power,
        preserved: word_proper_power == image_proper_power,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitCollisionReport {
    pub first_root: String,
    pub second_root: String,
    /// `σ(w)^∞` and `σ(w')^∞` lie in the same shift orbit.
    pub collision: bool,
}

pub fn orbit_collision_on_periodic(
    sigma: &Morphism,
    w: &Word,
    w2: &Word,
) -> Result<OrbitCollisionReport> {
    if w.is_empty() || w2.is_empty() {
        return Err(Error::InvalidWord("empty word".into()));
    }
    if w.primitive_root().is_rotation_of(&w2.primitive_root()) {
        return Err(Error::InvalidParameter(
            "the two periodic points already share an orbit".into(),
        ));
    }
    let r1 = sigma.apply(w)?.primitive_root();
    let r2 = sigma.apply(w2)?.primitive_root();
    Ok(OrbitCollisionReport {
        first_root: sigma.target().format_word(&r1),
        second_root: sigma.target().format_word(&r2),
        collision: r1.is_rotation_of(&r2),
    })
}
