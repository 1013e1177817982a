//! Alphabets, words, non-erasing morphisms and their incidence matrices.
//!
//! Letters are dense `u16` indices into an [`Alphabet`]; the declaration
//! order of the letter names is the basis order of `R^A` everywhere in the
//! crate. Words do not carry their alphabet, the morphism (or table) that
//! owns them does.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type Letter = u16;

#[derive(Clone)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, Letter>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet must be non-empty".into()));
        }
        if names.len() > Letter::MAX as usize {
            return Err(Error::InvalidAlphabet("too many letters".into()));
        }
        let mut index = HashMap::with_capacity(names.len());
        let mut owned = Vec::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            let n = n.as_ref();
            if n.is_empty() || n.contains('.') || n.chars().any(char::is_whitespace) {
                return Err(Error::InvalidAlphabet(format!("bad letter name `{n}`")));
            }
            if index.insert(n.to_string(), i as Letter).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate letter `{n}`")));
            }
            owned.push(n.to_string());
        }
        Ok(Self {
            names: owned,
            index,
        })
    }

    /// One letter per character, e.g. `Alphabet::from_chars("ab")`.
    pub fn from_chars(letters: &str) -> Result<Self> {
        let names: Vec<String> = letters.chars().map(String::from).collect();
        Self::new(&names)
    }

    /// The alphabet `a1, ..., ad`.
    pub fn indexed(prefix: &str, d: usize) -> Result<Self> {
        let names: Vec<String> = (1..=d).map(|i| format!("{prefix}{i}")).collect();
        Self::new(&names)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, letter: Letter) -> &str {
        &self.names[letter as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<Letter> {
        self.index.get(name).copied()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.names.len()).map(|i| i as Letter)
    }

    fn single_char(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    pub fn contains_word(&self, w: &Word) -> bool {
        w.0.iter().all(|&l| (l as usize) < self.names.len())
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        if self.contains_word(w) {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch {
                expected: self.names.join(","),
                found: format!(
                    "word with letter index out of range ({} letters)",
                    self.len()
                ),
            })
        }
    }

    /// Parses a word. Single-character alphabets accept plain strings
    /// (`"aab"`); otherwise letters are separated by `.` (`"a1.a2"`).
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Word::empty());
        }
        let mut out = Vec::new();
        if self.single_char() && !s.contains('.') {
            for c in s.chars() {
                let mut buf = [0u8; 4];
                let name = c.encode_utf8(&mut buf);
                out.push(self.lookup(name)?);
            }
        } else {
            for part in s.split('.') {
                out.push(self.lookup(part)?);
            }
        }
        Ok(Word(out))
    }

    fn lookup(&self, name: &str) -> Result<Letter> {
        self.index_of(name).ok_or_else(|| {
            Error::InvalidWord(format!(
                "unknown letter `{name}` (alphabet {{{}}})",
                self.names.join(",")
            ))
        })
    }

    pub fn format_word(&self, w: &Word) -> String {
        self.format_letters(w.as_slice())
    }

    pub fn format_letters(&self, letters: &[Letter]) -> String {
        let sep = if self.single_char() { "" } else { "." };
        letters
            .iter()
            .map(|&l| self.names[l as usize].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names.join(","))
    }
}

fn mismatch(expected: &Alphabet, found: &Alphabet) -> Error {
    Error::AlphabetMismatch {
        expected: expected.names.join(","),
        found: found.names.join(","),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self(letters)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Self(vec![l])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Letter] {
        &self.0
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn repeat(&self, times: usize) -> Word {
        Word(self.0.repeat(times))
    }

    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    /// Letter-count vector of length `d`.
    pub fn parikh(&self, d: usize) -> Vec<u64> {
        let mut v = vec![0u64; d];
        for &l in &self.0 {
            v[l as usize] += 1;
        }
        v
    }

    /// Shortest `u` with `self = u^k`.
    pub fn primitive_root(&self) -> Word {
        let n = self.len();
        for p in 1..=n {
            if n % p == 0 && (p..n).all(|i| self.0[i] == self.0[i - p]) {
                return self.slice(0, p);
            }
        }
        self.clone()
    }

    /// `w = u^m` with `m >= 2`.
    pub fn is_proper_power(&self) -> bool {
        !self.is_empty() && self.primitive_root().len() < self.len()
    }

    /// Whether `other` is a cyclic rotation of `self`.
    pub fn is_rotation_of(&self, other: &Word) -> bool {
        if self.len() != other.len() {
            return false;
        }
        if self.is_empty() {
            return true;
        }
        let doubled = self.repeat(2);
        doubled
            .0
            .windows(other.len())
            .any(|win| win == other.as_slice())
    }
}

impl std::borrow::Borrow<[Letter]> for Word {
    fn borrow(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

/// Number of (possibly overlapping) occurrences of `u` in `w`.
pub fn count_occurrences(w: &Word, u: &Word) -> Result<usize> {
    if u.is_empty() {
        return Err(Error::EmptyPattern);
    }
    Ok(count_in_slice(w.as_slice(), u.as_slice()))
}

pub(crate) fn count_in_slice(w: &[Letter], u: &[Letter]) -> usize {
    if u.len() > w.len() {
        return 0;
    }
    w.windows(u.len()).filter(|win| *win == u).count()
}

/// Exact non-negative integer matrix, row-major. Rows index target letters,
/// columns index source letters.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IncidenceMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl IncidenceMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn column_sums(&self) -> Result<Vec<u64>> {
        (0..self.cols)
            .map(|j| {
                (0..self.rows).try_fold(0u64, |acc, i| {
                    acc.checked_add(self.get(i, j))
                        .ok_or(Error::Overflow("column sum"))
                })
            })
            .collect()
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|&x| x > 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// `self * rhs`, failing on u64 overflow.
    pub fn mul(&self, rhs: &IncidenceMatrix) -> Result<IncidenceMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a
                        .checked_mul(rhs.get(k, j))
                        .ok_or(Error::Overflow("matrix product"))?;
                    let cell = &mut out.data[i * rhs.cols + j];
                    *cell = cell
                        .checked_add(prod)
                        .ok_or(Error::Overflow("matrix product"))?;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, vector has {} entries",
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(BigRational::zero(), |acc, (&m, x)| {
                        if m == 0 {
                            acc
                        } else {
                            acc + x * BigRational::from_integer(BigInt::from(m))
                        }
                    })
            })
            .collect())
    }

    pub fn rank(&self) -> usize {
        crate::linalg::rank_u64(&self.to_rows())
    }
}

impl fmt::Debug for IncidenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

/// A non-erasing free monoid morphism `source* -> target*`.
#[derive(Clone, PartialEq, Eq)]
pub struct Morphism {
    source: Arc<Alphabet>,
    target: Arc<Alphabet>,
    images: Vec<Word>,
}

impl Morphism {
    pub fn new(source: Arc<Alphabet>, target: Arc<Alphabet>, images: Vec<Word>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} images for {} source letters",
                images.len(),
                source.len()
            )));
        }
        for (a, img) in images.iter().enumerate() {
            if img.is_empty() {
                return Err(Error::Erasing(source.name(a as Letter).to_string()));
            }
            target.check_word(img)?;
        }
        Ok(Self {
            source,
            target,
            images,
        })
    }

    /// Builds a morphism from image strings listed in source-letter order.
    pub fn from_strs(
        source: Arc<Alphabet>,
        target: Arc<Alphabet>,
        images: &[&str],
    ) -> Result<Self> {
        let words = images
            .iter()
            .map(|s| target.parse_word(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(source, target, words)
    }

    /// Shorthand for single-character alphabets:
    /// `Morphism::from_chars("ab", "ab", &["ab", "a"])`.
    pub fn from_chars(source: &str, target: &str, images: &[&str]) -> Result<Self> {
        let src = Arc::new(Alphabet::from_chars(source)?);
        let tgt = if source == target {
            src.clone()
        } else {
            Arc::new(Alphabet::from_chars(target)?)
        };
        Self::from_strs(src, tgt, images)
    }

    pub fn identity(alphabet: Arc<Alphabet>) -> Self {
        let images = alphabet.letters().map(Word::letter).collect();
        Self {
            source: alphabet.clone(),
            target: alphabet,
            images,
        }
    }

    pub fn source(&self) -> &Arc<Alphabet> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Alphabet> {
        &self.target
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, a: Letter) -> &Word {
        &self.images[a as usize]
    }

    /// `<sigma>`: the shortest letter image length.
    pub fn min_image_len(&self) -> usize {
        self.images.iter().map(Word::len).min().unwrap_or(0)
    }

    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn is_letter_to_letter(&self) -> bool {
        self.images.iter().all(|w| w.len() == 1)
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        self.source.check_word(w)?;
        Ok(Word(self.apply_slice(w.as_slice())))
    }

    pub(crate) fn apply_slice(&self, w: &[Letter]) -> Vec<Letter> {
        let len = w.iter().map(|&a| self.images[a as usize].len()).sum();
        let mut out = Vec::with_capacity(len);
        for &a in w {
            out.extend_from_slice(self.images[a as usize].as_slice());
        }
        out
    }

    /// `outer ∘ inner`, i.e. first `inner`, then `outer`.
    pub fn compose(outer: &Morphism, inner: &Morphism) -> Result<Morphism> {
        if *inner.target != *outer.source {
            return Err(mismatch(&outer.source, &inner.target));
        }
        let images = inner
            .images
            .iter()
            .map(|w| Word(outer.apply_slice(w.as_slice())))
            .collect();
        Ok(Morphism {
            source: inner.source.clone(),
            target: outer.target.clone(),
            images,
        })
    }

    pub fn incidence_matrix(&self) -> IncidenceMatrix {
        let mut m = IncidenceMatrix::zeros(self.target.len(), self.source.len());
        for (j, img) in self.images.iter().enumerate() {
            for &b in img.as_slice() {
                m.data[b as usize * m.cols + j] += 1;
            }
        }
        m
    }

    /// Number of essential occurrences of `u` in `sigma(w)`: occurrences that
    /// start inside the image of the first letter of `w` and end inside the
    /// image of its last letter.
    pub fn essential_occurrences(&self, w: &Word, u: &Word) -> Result<usize> {
        if w.is_empty() {
            return Err(Error::InvalidWord(
                "essential occurrences need a non-empty source word".into(),
            ));
        }
        if u.is_empty() {
            return Err(Error::EmptyPattern);
        }
        self.source.check_word(w)?;
        self.target.check_word(u)?;
        let image = self.apply_slice(w.as_slice());
        let first_len = self.images[w.0[0] as usize].len();
        let last_len = self.images[*w.0.last().unwrap() as usize].len();
        let total = image.len();
        let ul = u.len();
        let mut count = 0;
        for start in 0..first_len {
            let end = start + ul;
            if end > total {
                break;
            }
            if end - 1 < total - last_len {
                continue;
            }
            if image[start..end] == *u.as_slice() {
                count += 1;
            }
        }
        Ok(count)
    }

    pub fn subdivision(&self) -> SubdivisionDecomposition {
        SubdivisionDecomposition::new(self)
    }

    pub fn format(&self) -> String {
        let parts: Vec<String> = self
            .source
            .letters()
            .map(|a| {
                format!(
                    "{}↦{}",
                    self.source.name(a),
                    self.target.format_word(self.image(a))
                )
            })
            .collect();
        parts.join(", ")
    }
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Morphism({})", self.format())
    }
}

/// `sigma = alpha ∘ pi` with `pi` the subdivision morphism into the
/// alphabet of pairs `a(k)` and `alpha` letter-to-letter.
#[derive(Clone, Debug)]
pub struct SubdivisionDecomposition {
    /// Subdivision letter index of `a(1)` for every source letter `a`.
    offsets: Vec<usize>,
    /// For every subdivision letter: (source letter, 1-based position).
    markers: Vec<(Letter, usize)>,
    pi: Morphism,
    alpha: Morphism,
}

impl SubdivisionDecomposition {
    fn new(sigma: &Morphism) -> Self {
        let src = sigma.source();
        let mut offsets = Vec::with_capacity(src.len());
        let mut markers = Vec::new();
        let mut names = Vec::new();
        for a in src.letters() {
            offsets.push(markers.len());
            for k in 1..=sigma.image(a).len() {
                markers.push((a, k));
                names.push(format!("{}({k})", src.name(a)));
            }
        }
        let sub = Arc::new(Alphabet::new(&names).expect("subdivision names are unique"));
        let pi_images = src
            .letters()
            .map(|a| {
                let start = offsets[a as usize];
                Word(
                    (start..start + sigma.image(a).len())
                        .map(|x| x as Letter)
                        .collect(),
                )
            })
            .collect();
        let alpha_images = markers
            .iter()
            .map(|&(a, k)| Word::letter(sigma.image(a).0[k - 1]))
            .collect();
        let pi = Morphism {
            source: src.clone(),
            target: sub.clone(),
            images: pi_images,
        };
        let alpha = Morphism {
            source: sub,
            target: sigma.target().clone(),
            images: alpha_images,
        };
        Self {
            offsets,
            markers,
            pi,
            alpha,
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        self.pi.target()
    }

    pub fn pi(&self) -> &Morphism {
        &self.pi
    }

    pub fn alpha(&self) -> &Morphism {
        &self.alpha
    }

    /// Source letter and 1-based position of a subdivision letter.
    pub fn marker(&self, x: Letter) -> (Letter, usize) {
        self.markers[x as usize]
    }

    pub fn subdivision_letter(&self, a: Letter, k: usize) -> Letter {
        (self.offsets[a as usize] + k - 1) as Letter
    }

    /// The shortest source word whose subdivision image contains `w`, or
    /// `None` when no such word exists.
    pub fn hat_word(&self, w: &Word) -> Result<Option<Word>> {
        if w.is_empty() {
            return Err(Error::InvalidWord("hat word of the empty word".into()));
        }
        self.alphabet().check_word(w)?;
        let block_len = |a: Letter| self.pi.image(a).len();
        let mut out = Vec::new();
        let mut prev: Option<(Letter, usize)> = None;
        for &x in w.as_slice() {
            let (a, k) = self.marker(x);
            match prev {
                None => out.push(a),
                Some((pa, pk)) => {
                    if pk < block_len(pa) {
                        // inside a block: must continue the same letter image
                        if a != pa || k != pk + 1 {
                            return Ok(None);
                        }
                    } else {
                        if k != 1 {
                            return Ok(None);
                        }
                        out.push(a);
                    }
                }
            }
            prev = Some((a, k));
        }
        Ok(Some(Word(out)))
    }
}
