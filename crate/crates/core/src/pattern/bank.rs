use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::algebra::Semiring;
use crate::error::{Error, Result};

/// Index of a letter in the alphabet.
pub type Symbol = u32;

/// A finite word over the alphabet.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_suffix_of(&self, other: &Word) -> bool {
        other.0.ends_with(&self.0)
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

/// A word pinned to the interval `[start, end]` of the sequence (1-based,
/// inclusive). The empty pattern at position `s` has `start = s + 1, end = s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placement {
    pub start: usize,
    pub end: usize,
    pub word: Word,
}

impl Placement {
    pub fn ending_at(end: usize, word: Word) -> Self {
        Placement { start: end + 1 - word.len(), end, word }
    }
}

/// The label alphabet; symbols are arbitrary non-empty UTF-8 strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::Invalid { path: "alphabet".into(), message: "empty alphabet".into() });
        }
        let mut index = HashMap::new();
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.contains(['.', '#']) || s.chars().any(char::is_whitespace) {
                return Err(Error::Invalid {
                    path: format!("alphabet[{i}]"),
                    message: format!("invalid symbol {s:?}"),
                });
            }
            if index.insert(s.clone(), i as Symbol).is_some() {
                return Err(Error::Invalid {
                    path: format!("alphabet[{i}]"),
                    message: format!("duplicate symbol {s:?}"),
                });
            }
        }
        Ok(Alphabet { symbols, index })
    }

    /// One single-character symbol per `char` of `letters`.
    pub fn from_chars(letters: &str) -> Result<Self> {
        Self::new(letters.chars().map(String::from))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, s: Symbol) -> &str {
        &self.symbols[s as usize]
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    /// Whether every symbol is a single character, in which case words are
    /// written as plain concatenations; otherwise symbols are `.`-separated.
    pub fn is_compact(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        if text.is_empty() {
            return Err(Error::EmptyWord);
        }
        let lookup = |piece: &str| {
            self.index
                .get(piece)
                .copied()
                .ok_or_else(|| Error::UnknownSymbol { word: text.to_string() })
        };
        let symbols = if self.is_compact() && !text.contains('.') {
            let mut buf = [0u8; 4];
            text.chars().map(|c| lookup(c.encode_utf8(&mut buf))).collect::<Result<Vec<_>>>()?
        } else {
            text.split('.').map(lookup).collect::<Result<Vec<_>>>()?
        };
        Ok(Word(symbols))
    }

    pub fn format_word(&self, word: &Word) -> String {
        let sep = if self.is_compact() { "" } else { "." };
        word.0.iter().map(|&s| self.symbol(s)).collect::<Vec<_>>().join(sep)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedWord {
    pub word: Word,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Override {
    pub word: Word,
    pub start: usize,
    pub energy: f64,
}

/// Alphabet, sequence length, and weighted words of a pattern-based model.
///
/// Each word carries a base energy applied at every placement; overrides add
/// a position-specific energy at one start position. Repeated entries for the
/// same placement combine under `⊗`.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternBank {
    alphabet: Alphabet,
    n: usize,
    patterns: Vec<WeightedWord>,
    overrides: Vec<Override>,
    neutral: Vec<Word>,
}

impl PatternBank {
    pub fn new(alphabet: Alphabet, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::EmptySequence);
        }
        Ok(PatternBank { alphabet, n, patterns: Vec::new(), overrides: Vec::new(), neutral: Vec::new() })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn patterns(&self) -> &[WeightedWord] {
        &self.patterns
    }

    pub fn overrides(&self) -> &[Override] {
        &self.overrides
    }

    /// Letters added by [`PatternBank::close_alphabet`]; they carry cost `𝟙`.
    pub fn neutral_words(&self) -> &[Word] {
        &self.neutral
    }

    fn check_word(&self, word: &Word) -> Result<()> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        if word.0.iter().any(|&s| s as usize >= self.alphabet.len()) {
            return Err(Error::UnknownSymbol { word: format!("{:?}", word.0) });
        }
        Ok(())
    }

    pub fn add_pattern(&mut self, word: Word, energy: f64) -> Result<()> {
        self.check_word(&word)?;
        self.patterns.push(WeightedWord { word, energy });
        Ok(())
    }

    /// Adds the pattern given as text, e.g. `"ab"`.
    pub fn add(&mut self, word: &str, energy: f64) -> Result<()> {
        let w = self.alphabet.parse_word(word)?;
        self.add_pattern(w, energy)
    }

    pub fn add_override(&mut self, word: Word, start: usize, energy: f64) -> Result<()> {
        self.check_word(&word)?;
        if start < 1 || start + word.len() - 1 > self.n {
            return Err(Error::OverrideOutOfRange {
                word: self.alphabet.format_word(&word),
                start,
                n: self.n,
            });
        }
        self.overrides.push(Override { word, start, energy });
        Ok(())
    }

    /// Changes the sequence length, dropping nothing; overrides must still fit.
    pub fn with_length(&self, n: usize) -> Result<Self> {
        let mut out = PatternBank::new(self.alphabet.clone(), n)?;
        out.patterns = self.patterns.clone();
        out.neutral = self.neutral.clone();
        for o in &self.overrides {
            out.add_override(o.word.clone(), o.start, o.energy)?;
        }
        Ok(out)
    }

    /// The distinct words of Γ, ordered by length then lexicographically.
    pub fn gamma(&self) -> Vec<Word> {
        let set: BTreeSet<(usize, &Word)> = self
            .patterns
            .iter()
            .map(|p| &p.word)
            .chain(self.overrides.iter().map(|o| &o.word))
            .chain(self.neutral.iter())
            .map(|w| (w.len(), w))
            .collect();
        set.into_iter().map(|(_, w)| w.clone()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma().is_empty() {
            return Err(Error::NoPatterns);
        }
        Ok(())
    }

    /// Letters of the alphabet that are not words of Γ.
    pub fn missing_letters(&self) -> Vec<Symbol> {
        let gamma: BTreeSet<Word> = self.gamma().into_iter().collect();
        (0..self.alphabet.len() as Symbol).filter(|&c| !gamma.contains(&Word(vec![c]))).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.missing_letters().is_empty()
    }

    /// Adds every missing single letter with cost `𝟙`; returns the letters added.
    pub fn close_alphabet(&mut self) -> Vec<Symbol> {
        let missing = self.missing_letters();
        self.neutral.extend(missing.iter().map(|&c| Word(vec![c])));
        missing
    }

    pub fn closed(&self) -> Self {
        let mut b = self.clone();
        b.close_alphabet();
        b
    }

    /// The mirrored model: every word reversed and every start position
    /// reflected, so that right-to-left passes become left-to-right ones.
    pub fn reversed(&self) -> Self {
        let n = self.n;
        PatternBank {
            alphabet: self.alphabet.clone(),
            n,
            patterns: self
                .patterns
                .iter()
                .map(|p| WeightedWord { word: p.word.reversed(), energy: p.energy })
                .collect(),
            overrides: self
                .overrides
                .iter()
                .map(|o| Override {
                    word: o.word.reversed(),
                    start: n + 2 - o.start - o.word.len(),
                    energy: o.energy,
                })
                .collect(),
            neutral: self.neutral.iter().map(Word::reversed).collect(),
        }
    }

    /// Per-placement costs under semiring `S`.
    pub fn costs<S: Semiring>(&self) -> BankCosts<S> {
        let mut base: HashMap<Word, S> = HashMap::new();
        for p in &self.patterns {
            let c = S::from_energy(p.energy);
            base.entry(p.word.clone()).and_modify(|v| *v = v.times(&c)).or_insert(c);
        }
        for w in &self.neutral {
            base.entry(w.clone()).or_insert_with(S::one);
        }
        let mut overrides: HashMap<(Word, usize), S> = HashMap::new();
        for o in &self.overrides {
            let c = S::from_energy(o.energy);
            overrides
                .entry((o.word.clone(), o.start))
                .and_modify(|v| *v = v.times(&c))
                .or_insert(c);
        }
        BankCosts { base, overrides }
    }

    /// Largest pattern length.
    pub fn ell_max(&self) -> usize {
        self.gamma().iter().map(Word::len).max().unwrap_or(0)
    }
}

/// Costs `c_α` keyed by word and start position.
#[derive(Clone, Debug)]
pub struct BankCosts<S> {
    base: HashMap<Word, S>,
    overrides: HashMap<(Word, usize), S>,
}

impl<S: Semiring> BankCosts<S> {
    /// Cost of the placement of `word` starting at `start`; `𝟙` for words
    /// outside Γ.
    pub fn get(&self, word: &Word, start: usize) -> S {
        let base = self.base.get(word).cloned().unwrap_or_else(S::one);
        match self.overrides.get(&(word.clone(), start)) {
            Some(o) => base.times(o),
            None => base,
        }
    }

    pub fn base(&self) -> &HashMap<Word, S> {
        &self.base
    }

    pub fn overrides(&self) -> &HashMap<(Word, usize), S> {
        &self.overrides
    }

    /// `base ⊗ override` for every overridden placement.
    pub fn combined_overrides(&self) -> impl Iterator<Item = ((&Word, usize), S)> + '_ {
        self.overrides.iter().map(|((w, s), o)| {
            let base = self.base.get(w).cloned().unwrap_or_else(S::one);
            ((w, *s), base.times(o))
        })
    }
}

impl fmt::Display for PatternBank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self.gamma().iter().map(|w| self.alphabet.format_word(w)).collect();
        write!(f, "n={} |D|={} Γ={{{}}}", self.n, self.alphabet.len(), words.join(","))
    }
}

/// Size statistics of a word set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BankStats {
    /// Total length `L` of all words.
    pub l: usize,
    pub ell_max: usize,
    /// Distinct non-empty prefixes `P`.
    pub p: usize,
    /// Distinct proper prefixes `P′`, the empty word included.
    pub p_prime: usize,
    /// `|I(Γ)|`: non-empty words that are a prefix and a suffix of words of Γ.
    pub i_size: usize,
}

pub fn compute_bank_stats(bank: &PatternBank) -> Result<BankStats> {
    let gamma = bank.gamma();
    if gamma.is_empty() {
        return Err(Error::NoPatterns);
    }
    let prefixes = prefix_set(&gamma);
    let suffixes = suffix_set(&gamma);
    let proper: BTreeSet<&[Symbol]> =
        gamma.iter().flat_map(|w| (0..w.len()).map(move |k| &w.0[..k])).collect();
    Ok(BankStats {
        l: gamma.iter().map(Word::len).sum(),
        ell_max: gamma.iter().map(Word::len).max().unwrap_or(0),
        p: prefixes.len(),
        p_prime: proper.len(),
        i_size: prefixes.intersection(&suffixes).count(),
    })
}

/// Non-empty prefixes of the given words.
pub fn prefix_set(words: &[Word]) -> BTreeSet<Word> {
    words.iter().flat_map(|w| (1..=w.len()).map(move |k| Word(w.0[..k].to_vec()))).collect()
}

/// Non-empty suffixes of the given words.
pub fn suffix_set(words: &[Word]) -> BTreeSet<Word> {
    words.iter().flat_map(|w| (0..w.len()).map(move |k| Word(w.0[k..].to_vec()))).collect()
}

/// The set I(Γ) of non-empty words that are a prefix and a suffix of words of Γ.
pub fn prefix_suffix_words(words: &[Word]) -> BTreeSet<Word> {
    let p = prefix_set(words);
    let s = suffix_set(words);
    p.intersection(&s).cloned().collect()
}
