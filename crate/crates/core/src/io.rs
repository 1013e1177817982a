//! JSON and text formats: morphisms, sequence descriptors, weight tables,
//! vector towers and language tables. Rationals are always written as
//! `"p/q"` strings.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::constructions::{build_diagonal_sequence, DiagonalFamilySpec};
use crate::directive::{DirectiveSequence, DEFAULT_MAX_DEPTH};
use crate::error::{Error, Result};
use crate::language::LanguageTable;
use crate::measures::WeightTable;
use crate::symbols::{Alphabet, Morphism};
use crate::towers::VectorTower;

pub fn format_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// `serialize_with` helpers writing rationals as `"p/q"` strings.
pub mod rational_serde {
    use num_rational::BigRational;
    use serde::Serializer;

    use super::format_rational;

    pub fn one<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn vec<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn vecs<S: Serializer>(v: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            v.iter()
                .map(|row| row.iter().map(format_rational).collect::<Vec<_>>()),
        )
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub images: BTreeMap<String, String>,
}

impl MorphismSpec {
    pub fn build(&self) -> Result<Morphism> {
        let source = Arc::new(Alphabet::new(&self.source)?);
        let target = if self.target == self.source {
            source.clone()
        } else {
            Arc::new(Alphabet::new(&self.target)?)
        };
        self.build_over(source, target)
    }

    fn build_over(&self, source: Arc<Alphabet>, target: Arc<Alphabet>) -> Result<Morphism> {
        if let Some(extra) = self.images.keys().find(|k| source.index_of(k).is_none()) {
            return Err(Error::Parse(format!(
                "image given for unknown letter `{extra}`"
            )));
        }
        let mut images = Vec::with_capacity(source.len());
        for name in source.names() {
            let img = self
                .images
                .get(name)
                .ok_or_else(|| Error::Parse(format!("missing image for letter `{name}`")))?;
            images.push(target.parse_word(img)?);
        }
        Morphism::new(source, target, images)
    }

    pub fn from_morphism(sigma: &Morphism) -> Self {
        let images = sigma
            .source()
            .letters()
            .map(|a| {
                (
                    sigma.source().name(a).to_string(),
                    sigma.target().format_word(sigma.image(a)),
                )
            })
            .collect();
        Self {
            source: sigma.source().names().to_vec(),
            target: sigma.target().names().to_vec(),
            images,
        }
    }
}

pub fn morphism_from_json(text: &str) -> Result<Morphism> {
    serde_json::from_str::<MorphismSpec>(text)
        .map_err(json_error)?
        .build()
}

pub fn morphism_to_json(sigma: &Morphism) -> Value {
    serde_json::to_value(MorphismSpec::from_morphism(sigma)).expect("morphism spec serializes")
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceParams {
    #[serde(default)]
    pub ell: Vec<u64>,
}

/// `{"kind": ..., "prefix": [...], "tail": {...}, "params": {"ell": [...]}}`.
///
/// Kinds: `stationary` (tail only), `prefix+stationary`, `periodic`
/// (prefix plus a `period` list), `finite` (prefix only) and
/// `parameterized` (the alternating diagonal family driven by `params.ell`,
/// one entry per block).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceDescriptor {
    pub kind: String,
    #[serde(default)]
    pub prefix: Vec<MorphismSpec>,
    #[serde(default)]
    pub tail: Option<MorphismSpec>,
    #[serde(default)]
    pub period: Vec<MorphismSpec>,
    #[serde(default)]
    pub params: Option<SequenceParams>,
    #[serde(default)]
    pub max_depth: Option<usize>,
}

impl SequenceDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(json_error)
    }

    /// Builds the sequence, capping the materializable depth at `cap`.
    pub fn build(&self, cap: Option<usize>) -> Result<DirectiveSequence> {
        let depth = self.max_depth.unwrap_or(DEFAULT_MAX_DEPTH);
        let depth = cap.map_or(depth, |c| depth.min(c));
        let prefix = self.build_chain(&self.prefix)?;
        let tail = || -> Result<Morphism> {
            self.tail
                .as_ref()
                .ok_or_else(|| {
                    Error::Parse(format!("kind `{}` needs a `tail` morphism", self.kind))
                })?
                .build()
        };
        match self.kind.as_str() {
            "stationary" => {
                if !self.prefix.is_empty() {
                    return Err(Error::Parse("kind `stationary` takes no prefix".into()));
                }
                DirectiveSequence::stationary(tail()?, depth)
            }
            "prefix+stationary" => DirectiveSequence::prefix_stationary(prefix, tail()?, depth),
            "periodic" => {
                let period = self.build_chain(&self.period)?;
                DirectiveSequence::periodic(prefix, period, depth)
            }
            "finite" => DirectiveSequence::finite(prefix),
            "parameterized" => {
                let ell = self
                    .params
                    .as_ref()
                    .map(|p| p.ell.clone())
                    .unwrap_or_default();
                let blocks = ell.len();
                let spec = DiagonalFamilySpec { ell, blocks };
                let seq = build_diagonal_sequence(&spec)?;
                match cap {
                    Some(c) if c < seq.depth() => Err(Error::DepthExhausted(format!(
                        "diagonal sequence depth {} exceeds the cap {c}",
                        seq.depth()
                    ))),
                    _ => Ok(seq),
                }
            }
            other => Err(Error::Parse(format!("unknown sequence kind `{other}`"))),
        }
    }

    /// Morphisms sharing alphabets by name so that chained levels compare equal.
    fn build_chain(&self, specs: &[MorphismSpec]) -> Result<Vec<Morphism>> {
        specs.iter().map(MorphismSpec::build).collect()
    }
}

pub fn sequence_from_json(text: &str, cap: Option<usize>) -> Result<DirectiveSequence> {
    SequenceDescriptor::from_json(text)?.build(cap)
}

pub fn weight_table_to_json(table: &WeightTable) -> Value {
    let weights: BTreeMap<String, String> = table
        .support()
        .map(|(w, x)| (table.alphabet().format_word(w), format_rational(x)))
        .collect();
    json!({
        "L": table.max_len(),
        "alphabet": table.alphabet().names(),
        "mass": format_rational(table.mass()),
        "weights": weights,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightTableJson {
    #[serde(rename = "L")]
    max_len: usize,
    alphabet: Vec<String>,
    mass: String,
    weights: BTreeMap<String, String>,
}

pub fn weight_table_from_json(text: &str) -> Result<WeightTable> {
    let raw: WeightTableJson = serde_json::from_str(text).map_err(json_error)?;
    let alphabet = Arc::new(Alphabet::new(&raw.alphabet)?);
    let mut entries = Vec::with_capacity(raw.weights.len());
    for (w, x) in &raw.weights {
        entries.push((alphabet.parse_word(w)?, parse_rational(x)?));
    }
    Ok(WeightTable::from_weights(alphabet, raw.max_len, entries)?
        .with_mass(parse_rational(&raw.mass)?))
}

pub fn tower_to_json(tower: &VectorTower) -> Value {
    Value::Array(
        tower
            .levels()
            .iter()
            .map(|v| {
                Value::Array(
                    v.iter()
                        .map(|x| Value::String(format_rational(x)))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn tower_from_json(text: &str) -> Result<VectorTower> {
    let raw: Vec<Vec<String>> = serde_json::from_str(text).map_err(json_error)?;
    let levels = raw
        .iter()
        .map(|v| {
            v.iter()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    VectorTower::new(levels)
}

/// `{length: [words]}` plus generation metadata.
pub fn language_to_json(table: &LanguageTable) -> Value {
    let mut by_len = serde_json::Map::new();
    for len in 1..=table.max_len() {
        let words: Vec<String> = table
            .words_of_len(len)
            .iter()
            .map(|w| table.alphabet().format_word(w))
            .collect();
        by_len.insert(len.to_string(), json!(words));
    }
    json!({
        "alphabet": table.alphabet().names(),
        "level": table.level(),
        "L": table.max_len(),
        "depth": table.depth(),
        "stabilized": table.stabilized(),
        "origin": table.origin(),
        "words": by_len,
    })
}
