//! Alphabets, words and substitutions: parsing, incidence matrices,
//! primitivity, bounded aperiodicity and factor languages.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::matrix::IntMatrix;

/// Input alphabets larger than this are rejected by the parser.
pub const MAX_ALPHABET: usize = 64;

/// Index of a letter in its alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub usize);

pub type Word = Vec<Letter>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubstitutionError {
    #[error("empty alphabet")]
    EmptyAlphabet,
    #[error("duplicate letter `{0}` in alphabet")]
    DuplicateLetter(String),
    #[error("rule count {rules} does not match alphabet size {letters}")]
    RuleCount { letters: usize, rules: usize },
    #[error("empty image for letter `{0}`")]
    EmptyImage(String),
    #[error("image of `{0}` uses a letter outside the alphabet")]
    LetterOutOfRange(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected `letter -> word`")]
    Malformed { line: usize },
    #[error("line {line}: duplicate rule for `{letter}`")]
    DuplicateRule { line: usize, letter: String },
    #[error("line {line}: image uses undeclared letter(s) in `{image}`")]
    UndeclaredLetter { line: usize, image: String },
    #[error("line {line}: image `{image}` splits into letters in more than one way")]
    AmbiguousImage { line: usize, image: String },
    #[error("line {line}: empty image")]
    EmptyImage { line: usize },
    #[error("no rules in input")]
    EmptyInput,
    #[error("alphabet has {0} letters; at most {MAX_ALPHABET} are supported")]
    AlphabetTooLarge(usize),
}

/// Ordered finite set of distinct symbols. The order fixes all vector indexing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self, SubstitutionError> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(SubstitutionError::EmptyAlphabet);
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(SubstitutionError::DuplicateLetter(s.clone()));
            }
        }
        Ok(Self { symbols, index })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.symbols.len()).map(Letter)
    }

    pub fn symbol(&self, l: Letter) -> &str {
        &self.symbols[l.0]
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn letter(&self, symbol: &str) -> Option<Letter> {
        self.index.get(symbol).copied().map(Letter)
    }

    /// Whether words can be written without separators.
    fn concatenable(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1 && s != ".")
    }

    /// Renders a word: plain concatenation for single-character alphabets,
    /// space-separated otherwise.
    pub fn render(&self, w: &[Letter]) -> String {
        let parts = w.iter().map(|&l| self.symbol(l));
        if self.concatenable() {
            parts.collect()
        } else {
            parts.collect::<Vec<_>>().join(" ")
        }
    }

    /// Parses a word in the same syntax `render` produces.
    pub fn parse_word(&self, text: &str) -> Option<Word> {
        segment(self, text).ok()
    }
}

enum SegmentError {
    Undeclared,
    Ambiguous,
}

/// Splits `text` into declared letters, allowing an optional single `.`
/// between consecutive letters. Whitespace-separated tokens are letters
/// on their own.
fn segment(alphabet: &Alphabet, text: &str) -> Result<Word, SegmentError> {
    if text.split_whitespace().count() > 1 {
        return text.split_whitespace().map(|tok| alphabet.letter(tok).ok_or(SegmentError::Undeclared)).collect();
    }
    let bytes = text.as_bytes();
    let n = bytes.len();
    // ways[i] = number of segmentations of text[i..] (capped at 2), with the
    // first letter starting at i
    let mut ways = vec![0u8; n + 1];
    let mut choice: Vec<Option<(usize, usize)>> = vec![None; n + 1];
    ways[n] = 1;
    for i in (0..n).rev() {
        if !text.is_char_boundary(i) {
            continue;
        }
        for (li, sym) in alphabet.symbols.iter().enumerate() {
            if !text[i..].starts_with(sym.as_str()) {
                continue;
            }
            let end = i + sym.len();
            let mut add = |next: usize| {
                if ways[next] > 0 {
                    if ways[i] == 0 {
                        choice[i] = Some((li, next));
                    }
                    ways[i] = (ways[i] + ways[next]).min(2);
                }
            };
            add(end);
            if end < n && bytes[end] == b'.' && end + 1 < n {
                add(end + 1);
            }
        }
    }
    match ways[0] {
        0 => Err(SegmentError::Undeclared),
        1 => {
            let mut out = Vec::new();
            let mut i = 0;
            while i < n {
                let (li, next) = choice[i].expect("segmentation exists");
                out.push(Letter(li));
                i = next;
            }
            Ok(out)
        }
        _ => Err(SegmentError::Ambiguous),
    }
}

/// Total rule map `letter -> non-empty word`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    alphabet: Alphabet,
    rules: Vec<Word>,
}

/// Square matrix with entry `(a, b)` = number of occurrences of `a` in `σ(b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrix(pub IntMatrix);

impl IncidenceMatrix {
    pub fn entry(&self, a: Letter, b: Letter) -> u64 {
        u64::try_from(self.0.get(a.0, b.0)).expect("incidence entries are small non-negative")
    }

    /// The map `Z^A -> Z^A` between consecutive diagram levels: coordinate
    /// `b` of the image sums the input over the letters of `σ(b)`. This is
    /// the transpose of the incidence matrix.
    pub fn level_map(&self) -> IntMatrix {
        self.0.transpose()
    }
}

/// Outcome of the bounded aperiodicity test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Periodicity {
    Aperiodic,
    Periodic(usize),
    Unknown,
}

impl Substitution {
    pub fn new(alphabet: Alphabet, rules: Vec<Word>) -> Result<Self, SubstitutionError> {
        if rules.len() != alphabet.len() {
            return Err(SubstitutionError::RuleCount { letters: alphabet.len(), rules: rules.len() });
        }
        for (i, r) in rules.iter().enumerate() {
            let name = alphabet.symbols[i].clone();
            if r.is_empty() {
                return Err(SubstitutionError::EmptyImage(name));
            }
            if r.iter().any(|l| l.0 >= alphabet.len()) {
                return Err(SubstitutionError::LetterOutOfRange(name));
            }
        }
        Ok(Self { alphabet, rules })
    }

    /// Convenience constructor for single-character alphabets, e.g.
    /// `from_pairs(&[("a", "ab"), ("b", "ba")])`.
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self, ParseError> {
        let text: String = pairs.iter().map(|(l, r)| format!("{l} -> {r}\n")).collect();
        parse_substitution(&text)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn image(&self, a: Letter) -> &[Letter] {
        &self.rules[a.0]
    }

    pub fn first_letter(&self, a: Letter) -> Letter {
        self.rules[a.0][0]
    }

    pub fn last_letter(&self, a: Letter) -> Letter {
        *self.rules[a.0].last().expect("images are non-empty")
    }

    pub fn apply(&self, w: &[Letter]) -> Word {
        w.iter().flat_map(|&l| self.rules[l.0].iter().copied()).collect()
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        assert_eq!(self.alphabet, other.alphabet, "composition needs a shared alphabet");
        let rules = other.rules.iter().map(|r| self.apply(r)).collect();
        Substitution { alphabet: self.alphabet.clone(), rules }
    }

    pub fn power(&self, k: usize) -> Substitution {
        assert!(k >= 1);
        (1..k).fold(self.clone(), |acc, _| self.compose(&acc))
    }

    pub fn max_image_len(&self) -> usize {
        self.rules.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_image_len(&self) -> usize {
        self.rules.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn incidence_matrix(&self) -> IncidenceMatrix {
        let n = self.size();
        let mut counts = vec![vec![0i64; n]; n];
        for (b, image) in self.rules.iter().enumerate() {
            for a in image {
                counts[a.0][b] += 1;
            }
        }
        IncidenceMatrix(IntMatrix::from_rows(&counts))
    }

    /// Some power `M^k`, `1 <= k <= |A|^2`, is entrywise positive.
    pub fn is_primitive(&self) -> bool {
        let n = self.size();
        let base: Vec<Vec<bool>> =
            (0..n).map(|a| (0..n).map(|b| self.rules[b].contains(&Letter(a))).collect()).collect();
        let mut power = base.clone();
        for _ in 0..n * n {
            if power.iter().all(|row| row.iter().all(|&x| x)) {
                return true;
            }
            power = (0..n).map(|i| (0..n).map(|j| (0..n).any(|k| power[i][k] && base[k][j])).collect()).collect();
        }
        false
    }

    /// All images start with one common letter and end with one common letter.
    pub fn is_proper(&self) -> bool {
        let first = self.first_letter(Letter(0));
        let last = self.last_letter(Letter(0));
        self.alphabet.letters().all(|a| self.first_letter(a) == first && self.last_letter(a) == last)
    }

    /// Length-`n` factors of the language, sorted.
    ///
    /// Seeds with the length-`n` factors of `σ^j(a)` for the least `j >= 1`
    /// making the word long enough (or the word stops growing), then closes under "substitute and take
    /// length-`n` factors". Any length-`n` factor of `σ^k(a)` lies inside
    /// `σ(v)` for a length-`n` factor `v` of `σ^(k-1)(a)` once that word is
    /// long enough, so the closure is the whole language.
    pub fn language_blocks(&self, n: usize) -> Vec<Word> {
        assert!(n >= 1, "block length must be positive");
        let mut seen: HashSet<Word> = HashSet::new();
        let mut frontier: Vec<Word> = Vec::new();
        for a in self.alphabet.letters() {
            let mut w = self.apply(&[a]);
            // growth can stall for fewer than |A| steps and still resume
            let mut stalled = 0;
            while w.len() < n && stalled < self.size() {
                let next = self.apply(&w);
                stalled = if next.len() == w.len() { stalled + 1 } else { 0 };
                w = next;
            }
            for f in factors(&w, n) {
                if seen.insert(f.clone()) {
                    frontier.push(f);
                }
            }
        }
        while let Some(w) = frontier.pop() {
            for f in factors(&self.apply(&w), n) {
                if seen.insert(f.clone()) {
                    frontier.push(f);
                }
            }
        }
        let sorted: BTreeSet<Word> = seen.into_iter().collect();
        sorted.into_iter().collect()
    }

    /// Factor complexity `p(n) = |language_blocks(n)|`.
    pub fn complexity(&self, n: usize) -> usize {
        self.language_blocks(n).len()
    }

    /// `p(1), ..., p(max_len)`. For primitive input on two or more letters
    /// every factor of length at most `m + 1`, with `m` the shortest image
    /// length of `σ^k`, occurs in some `σ^k(xy)` with `xy` a 2-block, so the
    /// windows of those words suffice.
    pub fn complexity_profile(&self, max_len: usize) -> Vec<usize> {
        if self.size() < 2 || !self.is_primitive() {
            return (1..=max_len).map(|n| self.complexity(n)).collect();
        }
        let mut power = self.clone();
        while power.min_image_len() + 1 < max_len {
            power = power.compose(self);
        }
        let words: Vec<Word> = self.language_blocks(2).iter().map(|xy| power.apply(xy)).collect();
        (1..=max_len).map(|n| words.iter().flat_map(|w| w.windows(n)).collect::<HashSet<&[Letter]>>().len()).collect()
    }

    /// Bounded periodicity test on the factor complexity.
    ///
    /// `Periodic(p)` as soon as `p(n) <= n` or `p(n+1) = p(n)` for some
    /// `n <= max_len` (then the subshift is periodic with least period
    /// `p(n)`); `Aperiodic` when the complexity stays above `n` and keeps
    /// growing up to `max_len`, so any period would exceed `max_len`;
    /// `Unknown` when `max_len < 2` leaves nothing to compare.
    pub fn periodicity(&self, max_len: usize) -> Periodicity {
        if max_len < 2 {
            return Periodicity::Unknown;
        }
        let profile = self.complexity_profile(max_len);
        let mut prev = profile[0];
        if prev <= 1 {
            return Periodicity::Periodic(prev.max(1));
        }
        for n in 2..=max_len {
            let p = profile[n - 1];
            if p <= n || p == prev {
                return Periodicity::Periodic(p.max(1));
            }
            prev = p;
        }
        Periodicity::Aperiodic
    }

    /// Writes the rules in the substitution file format.
    pub fn to_file_format(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in self.alphabet.letters() {
            writeln!(f, "{} -> {}", self.alphabet.symbol(a), self.alphabet.render(self.image(a)))?;
        }
        Ok(())
    }
}

fn factors(w: &[Letter], n: usize) -> impl Iterator<Item = Word> + '_ {
    w.windows(n).map(<[Letter]>::to_vec)
}

/// Parses the substitution file format: one `letter -> word` rule per line,
/// `#` comment lines and blank lines ignored. The alphabet is ordered by
/// first appearance of rule left-hand sides.
pub fn parse_substitution(text: &str) -> Result<Substitution, ParseError> {
    let mut heads: Vec<(usize, String, String)> = Vec::new();
    let mut declared: HashSet<String> = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((lhs, rhs)) = line.split_once("->") else {
            return Err(ParseError::Malformed { line: line_no });
        };
        let lhs = lhs.trim();
        if lhs.is_empty() || lhs.contains(char::is_whitespace) {
            return Err(ParseError::Malformed { line: line_no });
        }
        if !declared.insert(lhs.to_string()) {
            return Err(ParseError::DuplicateRule { line: line_no, letter: lhs.to_string() });
        }
        heads.push((line_no, lhs.to_string(), rhs.trim().to_string()));
    }
    if heads.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    if heads.len() > MAX_ALPHABET {
        return Err(ParseError::AlphabetTooLarge(heads.len()));
    }
    let alphabet = Alphabet::new(heads.iter().map(|(_, l, _)| l.clone())).expect("letters are distinct");
    let mut rules = Vec::with_capacity(heads.len());
    for (line, _, rhs) in &heads {
        if rhs.is_empty() {
            return Err(ParseError::EmptyImage { line: *line });
        }
        let word = segment(&alphabet, rhs).map_err(|e| match e {
            SegmentError::Undeclared => ParseError::UndeclaredLetter { line: *line, image: rhs.clone() },
            SegmentError::Ambiguous => ParseError::AmbiguousImage { line: *line, image: rhs.clone() },
        })?;
        rules.push(word);
    }
    Ok(Substitution::new(alphabet, rules).expect("validated while parsing"))
}

/// Well-known substitutions used throughout tests and examples.
pub mod named {
    use super::Substitution;

    pub fn thue_morse() -> Substitution {
        Substitution::from_pairs(&[("a", "ab"), ("b", "ba")]).unwrap()
    }

    pub fn fibonacci() -> Substitution {
        Substitution::from_pairs(&[("a", "ab"), ("b", "a")]).unwrap()
    }

    /// `a -> aab, b -> abb`: primitive and proper.
    pub fn proper_aab_abb() -> Substitution {
        Substitution::from_pairs(&[("a", "aab"), ("b", "abb")]).unwrap()
    }

    /// `a -> aabab, b -> abb`: primitive and proper.
    pub fn proper_aabab_abb() -> Substitution {
        Substitution::from_pairs(&[("a", "aabab"), ("b", "abb")]).unwrap()
    }

    /// `a -> aa`: the 2-adic odometer, periodic as a subshift.
    pub fn doubling() -> Substitution {
        Substitution::from_pairs(&[("a", "aa")]).unwrap()
    }
}
