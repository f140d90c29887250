#![allow(dead_code)]

use std::collections::BTreeSet;

use pattern_crf::pattern::Symbol;
use pattern_crf::{Alphabet, PatternBank, Word};
use rand::Rng;

/// Size limits of a random model family.
#[derive(Clone, Copy, Debug)]
pub struct Family {
    pub max_letters: usize,
    pub max_words: usize,
    pub max_total: usize,
    pub max_n: usize,
    pub max_word: usize,
    /// Chance that a random placement override is added.
    pub overrides: f64,
}

impl Default for Family {
    fn default() -> Self {
        Family { max_letters: 3, max_words: 6, max_total: 14, max_n: 8, max_word: 5, overrides: 0.3 }
    }
}

pub fn random_word<R: Rng>(rng: &mut R, k: usize, len: usize) -> Word {
    Word((0..len).map(|_| rng.gen_range(0..k) as Symbol).collect())
}

/// A closed bank inside the family, energies drawn by `energy`.
pub fn random_bank<R: Rng>(rng: &mut R, fam: Family, mut energy: impl FnMut(&mut R) -> f64) -> PatternBank {
    loop {
        let k = rng.gen_range(1..=fam.max_letters);
        let n = rng.gen_range(1..=fam.max_n);
        let letters: String = "abcdefgh"[..k].to_string();
        let mut words: BTreeSet<Word> = BTreeSet::new();
        for c in 0..k {
            if rng.gen_bool(0.7) {
                words.insert(Word(vec![c as Symbol]));
            }
        }
        let extra = rng.gen_range(0..=fam.max_words.saturating_sub(k));
        for _ in 0..extra {
            let len = rng.gen_range(2..=fam.max_word);
            words.insert(random_word(rng, k, len));
        }
        let mut bank = PatternBank::new(Alphabet::from_chars(&letters).unwrap(), n).unwrap();
        for w in &words {
            let e = energy(rng);
            bank.add_pattern(w.clone(), e).unwrap();
        }
        if words.is_empty() {
            continue;
        }
        if rng.gen_bool(fam.overrides) {
            let w = words.iter().nth(rng.gen_range(0..words.len())).unwrap().clone();
            if w.len() <= n {
                let start = rng.gen_range(1..=n + 1 - w.len());
                let e = energy(rng);
                bank.add_override(w, start, e).unwrap();
            }
        }
        let bank = bank.closed();
        let gamma = bank.gamma();
        if gamma.len() <= fam.max_words && gamma.iter().map(Word::len).sum::<usize>() <= fam.max_total {
            return bank;
        }
    }
}

pub fn uniform(lo: f64, hi: f64) -> impl FnMut(&mut rand_chacha::ChaCha8Rng) -> f64 {
    move |r| r.gen_range(lo..=hi)
}

pub fn integers(lo: i64, hi: i64) -> impl FnMut(&mut rand_chacha::ChaCha8Rng) -> f64 {
    move |r| r.gen_range(lo..=hi) as f64
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// `f(x)` under min-plus: the plain sum of energies of placements inside `x`,
/// counted by scanning every interval.
pub fn prefix_energy(bank: &PatternBank, x: &[Symbol]) -> f64 {
    let mut e = 0.0;
    for p in bank.patterns() {
        let w = &p.word.0;
        for a in 0..(x.len() + 1).saturating_sub(w.len()) {
            if x[a..a + w.len()] == w[..] {
                e += p.energy;
            }
        }
    }
    for o in bank.overrides() {
        let a = o.start - 1;
        if a + o.word.len() <= x.len() && x[a..a + o.word.len()] == o.word.0[..] {
            e += o.energy;
        }
    }
    e
}

pub fn all_labelings(k: usize, len: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|x| {
                (0..k as Symbol).map(move |c| {
                    let mut y = x.clone();
                    y.push(c);
                    y
                })
            })
            .collect();
    }
    out
}
