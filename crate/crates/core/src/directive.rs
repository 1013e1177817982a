//! Directive sequences `σ_0 ∘ σ_1 ∘ ...` with level maps `σ_n: A_{n+1}* -> A_n*`.
//!
//! Infinite sequences are described by a finite rule plus a materializable
//! depth. Telescoped morphisms and matrices are memoized per `(n, m)`; the
//! cache is shared between a sequence and its truncations.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::symbols::{Alphabet, IncidenceMatrix, Morphism};

/// Depth used for stationary and periodic tails when none is given.
pub const DEFAULT_MAX_DEPTH: usize = 64;

/// Produces the level morphisms of a directive sequence.
pub trait LevelRule: Send + Sync + fmt::Debug {
    fn level(&self, n: usize) -> Result<Morphism>;
    /// Number of materializable level morphisms.
    fn depth(&self) -> usize;
    fn kind(&self) -> &str;
}

#[derive(Debug)]
struct FiniteRule {
    levels: Vec<Morphism>,
}

impl LevelRule for FiniteRule {
    fn level(&self, n: usize) -> Result<Morphism> {
        self.levels.get(n).cloned().ok_or(Error::LevelOutOfRange {
            level: n,
            depth: self.levels.len(),
        })
    }
    fn depth(&self) -> usize {
        self.levels.len()
    }
    fn kind(&self) -> &str {
        "finite"
    }
}

#[derive(Debug)]
struct TailRule {
    prefix: Vec<Morphism>,
    period: Vec<Morphism>,
    depth: usize,
}

impl LevelRule for TailRule {
    fn level(&self, n: usize) -> Result<Morphism> {
        if n >= self.depth {
            return Err(Error::LevelOutOfRange {
                level: n,
                depth: self.depth,
            });
        }
        Ok(match self.prefix.get(n) {
            Some(m) => m.clone(),
            None => self.period[(n - self.prefix.len()) % self.period.len()].clone(),
        })
    }
    fn depth(&self) -> usize {
        self.depth
    }
    fn kind(&self) -> &str {
        match (self.prefix.is_empty(), self.period.len()) {
            (true, 1) => "stationary",
            (false, 1) => "prefix+stationary",
            _ => "periodic",
        }
    }
}

type LevelBuilder = dyn Fn(usize) -> Result<Morphism> + Send + Sync;

struct ParameterizedRule {
    name: String,
    depth: usize,
    build: Box<LevelBuilder>,
}

impl fmt::Debug for ParameterizedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Parameterized({}, depth {})", self.name, self.depth)
    }
}

impl LevelRule for ParameterizedRule {
    fn level(&self, n: usize) -> Result<Morphism> {
        if n >= self.depth {
            return Err(Error::LevelOutOfRange {
                level: n,
                depth: self.depth,
            });
        }
        (self.build)(n)
    }
    fn depth(&self) -> usize {
        self.depth
    }
    fn kind(&self) -> &str {
        "parameterized"
    }
}

#[derive(Debug)]
struct PrependRule {
    head: Morphism,
    rest: DirectiveSequence,
}

impl LevelRule for PrependRule {
    fn level(&self, n: usize) -> Result<Morphism> {
        if n == 0 {
            Ok(self.head.clone())
        } else {
            self.rest.level(n - 1).map(|m| (*m).clone())
        }
    }
    fn depth(&self) -> usize {
        self.rest.depth() + 1
    }
    fn kind(&self) -> &str {
        "prolonged"
    }
}

#[derive(Default)]
struct TelescopeCache {
    levels: RwLock<HashMap<usize, Arc<Morphism>>>,
    morphisms: RwLock<HashMap<(usize, usize), Arc<Morphism>>>,
    matrices: RwLock<HashMap<(usize, usize), Arc<IncidenceMatrix>>>,
}

fn cached<K: std::hash::Hash + Eq + Copy, V>(
    map: &RwLock<HashMap<K, Arc<V>>>,
    key: K,
) -> Option<Arc<V>> {
    map.read().expect("cache lock poisoned").get(&key).cloned()
}

fn store<K: std::hash::Hash + Eq, V>(
    map: &RwLock<HashMap<K, Arc<V>>>,
    key: K,
    value: Arc<V>,
) -> Arc<V> {
    // concurrent inserts of the same key compute identical values; keep the first
    map.write()
        .expect("cache lock poisoned")
        .entry(key)
        .or_insert(value)
        .clone()
}

#[derive(Clone)]
pub struct DirectiveSequence {
    rule: Arc<dyn LevelRule>,
    offset: usize,
    cache: Arc<TelescopeCache>,
}

impl fmt::Debug for DirectiveSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirectiveSequence")
            .field("rule", &self.rule)
            .field("offset", &self.offset)
            .finish()
    }
}

impl DirectiveSequence {
    fn from_rule(rule: Arc<dyn LevelRule>) -> Result<Self> {
        let seq = Self {
            rule,
            offset: 0,
            cache: Arc::default(),
        };
        seq.validate_chain()?;
        Ok(seq)
    }

    /// A finite list of level maps, `levels[n] = σ_n`.
    pub fn finite(levels: Vec<Morphism>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidParameter(
                "directive sequence needs at least one level".into(),
            ));
        }
        Self::from_rule(Arc::new(FiniteRule { levels }))
    }

    pub fn stationary(sigma: Morphism, depth: usize) -> Result<Self> {
        Self::periodic(Vec::new(), vec![sigma], depth)
    }

    pub fn prefix_stationary(prefix: Vec<Morphism>, tail: Morphism, depth: usize) -> Result<Self> {
        Self::periodic(prefix, vec![tail], depth)
    }

    /// `prefix` followed by `period` repeated forever (materialized to `depth`).
    pub fn periodic(prefix: Vec<Morphism>, period: Vec<Morphism>, depth: usize) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidParameter(
                "periodic tail must be non-empty".into(),
            ));
        }
        if depth == 0 {
            return Err(Error::InvalidParameter("depth must be positive".into()));
        }
        // the tail has to chain back onto itself
        let first = &period[0];
        let last = &period[period.len() - 1];
        if last.source() != first.target() {
            return Err(Error::AlphabetMismatch {
                expected: first.target().names().join(","),
                found: last.source().names().join(","),
            });
        }
        Self::from_rule(Arc::new(TailRule {
            prefix,
            period,
            depth,
        }))
    }

    pub fn parameterized<F>(name: &str, depth: usize, build: F) -> Result<Self>
    where
        F: Fn(usize) -> Result<Morphism> + Send + Sync + 'static,
    {
        if depth == 0 {
            return Err(Error::InvalidParameter("depth must be positive".into()));
        }
        Self::from_rule(Arc::new(ParameterizedRule {
            name: name.to_string(),
            depth,
            build: Box::new(build),
        }))
    }

    /// The sequence `tau ∘ σ_0 ∘ σ_1 ∘ ...` (new base level).
    pub fn prepend(&self, tau: Morphism) -> Result<Self> {
        let base = self.alphabet(0)?;
        if **tau.source() != *base {
            return Err(Error::AlphabetMismatch {
                expected: base.names().join(","),
                found: tau.source().names().join(","),
            });
        }
        Ok(Self {
            rule: Arc::new(PrependRule {
                head: tau,
                rest: self.clone(),
            }),
            offset: 0,
            cache: Arc::default(),
        })
    }

    fn validate_chain(&self) -> Result<()> {
        let depth = self.depth();
        let mut below = self.level(0)?;
        for n in 1..depth {
            let above = self.level(n)?;
            if above.target() != below.source() {
                return Err(Error::AlphabetMismatch {
                    expected: below.source().names().join(","),
                    found: above.target().names().join(","),
                });
            }
            below = above;
        }
        Ok(())
    }

    pub fn kind(&self) -> &str {
        self.rule.kind()
    }

    /// Number of materializable level maps; levels `0..depth()` exist and
    /// alphabets `A_0..=A_depth()`.
    pub fn depth(&self) -> usize {
        self.rule.depth().saturating_sub(self.offset)
    }

    /// Absolute level of this sequence's base within the original rule.
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn level(&self, n: usize) -> Result<Arc<Morphism>> {
        if n >= self.depth() {
            return Err(Error::LevelOutOfRange {
                level: n,
                depth: self.depth(),
            });
        }
        let abs = self.offset + n;
        if let Some(m) = cached(&self.cache.levels, abs) {
            return Ok(m);
        }
        let m = Arc::new(self.rule.level(abs)?);
        Ok(store(&self.cache.levels, abs, m))
    }

    pub fn alphabet(&self, n: usize) -> Result<Arc<Alphabet>> {
        let depth = self.depth();
        if n > depth || depth == 0 {
            return Err(Error::LevelOutOfRange { level: n, depth });
        }
        if n < depth {
            Ok(self.level(n)?.target().clone())
        } else {
            Ok(self.level(n - 1)?.source().clone())
        }
    }

    fn check_range(&self, n: usize, m: usize) -> Result<()> {
        if m > self.depth() {
            return Err(Error::LevelOutOfRange {
                level: m,
                depth: self.depth(),
            });
        }
        if n >= m {
            return Err(Error::InvalidParameter(format!(
                "telescoping needs n < m, got [{n}, {m})"
            )));
        }
        Ok(())
    }

    /// `σ_[n,m) = σ_n ∘ ... ∘ σ_{m-1}`.
    pub fn telescope(&self, n: usize, m: usize) -> Result<Arc<Morphism>> {
        self.check_range(n, m)?;
        if m == n + 1 {
            return self.level(n);
        }
        let (an, am) = (self.offset + n, self.offset + m);
        if let Some(t) = cached(&self.cache.morphisms, (an, am)) {
            return Ok(t);
        }
        // longest cached prefix [n, k)
        let mut k = m - 1;
        let mut cur = loop {
            if k == n + 1 {
                break self.level(n)?;
            }
            if let Some(t) = cached(&self.cache.morphisms, (an, self.offset + k)) {
                break t;
            }
            k -= 1;
        };
        while k < m {
            let next = Morphism::compose(&cur, &*self.level(k)?)?;
            k += 1;
            cur = store(&self.cache.morphisms, (an, self.offset + k), Arc::new(next));
        }
        Ok(cur)
    }

    /// `M(σ_[n,m))`, the identity for `n == m`.
    pub fn telescoped_matrix(&self, n: usize, m: usize) -> Result<Arc<IncidenceMatrix>> {
        if n == m {
            return Ok(Arc::new(IncidenceMatrix::identity(self.alphabet(n)?.len())));
        }
        self.check_range(n, m)?;
        let key = (self.offset + n, self.offset + m);
        if let Some(t) = cached(&self.cache.matrices, key) {
            return Ok(t);
        }
        let mut acc = self.level(n)?.incidence_matrix();
        for k in n + 1..m {
            let step = (self.offset + n, self.offset + k + 1);
            acc = match cached(&self.cache.matrices, step) {
                Some(t) => (*t).clone(),
                None => {
                    let next = acc.mul(&self.level(k)?.incidence_matrix())?;
                    (*store(&self.cache.matrices, step, Arc::new(next))).clone()
                }
            };
        }
        Ok(store(&self.cache.matrices, key, Arc::new(acc)))
    }

    /// `(σ_k)_{k >= n}` re-indexed from 0.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n > self.depth() {
            return Err(Error::LevelOutOfRange {
                level: n,
                depth: self.depth(),
            });
        }
        if n == self.depth() {
            return Err(Error::DepthExhausted(format!(
                "truncating at {n} leaves no level maps"
            )));
        }
        Ok(Self {
            rule: self.rule.clone(),
            offset: self.offset + n,
            cache: self.cache.clone(),
        })
    }

    /// `β_-(n) = min_a |σ_[0,n)(a)|` over `a ∈ A_n`, computed from column
    /// sums of the telescoped incidence matrix.
    pub fn beta_minus(&self, n: usize) -> Result<u64> {
        if n == 0 {
            return Err(Error::InvalidParameter("β_- is defined for n >= 1".into()));
        }
        let m = self.telescoped_matrix(0, n)?;
        Ok(m.column_sums()?.into_iter().min().unwrap_or(0))
    }

    pub fn growth_report(&self, depth: usize, positivity_bound: usize) -> Result<GrowthReport> {
        let max = self.depth();
        let depth = depth.min(max);
        let mut beta_minus = Vec::with_capacity(depth);
        for n in 1..=depth {
            beta_minus.push(self.beta_minus(n)?);
        }
        let nondecreasing = beta_minus.windows(2).map(|w| w[1] >= w[0]).collect();
        let mut positive_at = Vec::with_capacity(depth);
        for n in 0..depth {
            let mut found = None;
            for m in n + 1..=(n + positivity_bound).min(max) {
                if self.telescoped_matrix(n, m)?.is_positive() {
                    found = Some(m);
                    break;
                }
            }
            positive_at.push(found);
        }
        let verdict = if depth > 0 && positive_at.iter().all(Option::is_some) {
            GrowthVerdict::PositiveTelescopingUpToDepth
        } else if beta_minus.len() >= 2 && beta_minus.last() > beta_minus.first() {
            GrowthVerdict::GrowingUpToDepth
        } else {
            GrowthVerdict::NotGrowingAtDepth
        };
        Ok(GrowthReport {
            depth,
            positivity_bound,
            beta_minus,
            nondecreasing,
            positive_at,
            verdict,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthVerdict {
    /// Every scanned level has a positive telescoped matrix within the bound.
    PositiveTelescopingUpToDepth,
    /// β_- increased over the scanned range without a positivity certificate.
    GrowingUpToDepth,
    NotGrowingAtDepth,
}

/// Finite-depth growth diagnostics; never a proof of everywhere growing.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub depth: usize,
    pub positivity_bound: usize,
    /// `beta_minus[n - 1] = β_-(n)` for `1 <= n <= depth`.
    pub beta_minus: Vec<u64>,
    pub nondecreasing: Vec<bool>,
    /// For each level `n < depth`, the least `m` with `M(σ_[n,m))` positive.
    pub positive_at: Vec<Option<usize>>,
    pub verdict: GrowthVerdict,
}
