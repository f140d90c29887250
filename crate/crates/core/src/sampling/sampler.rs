use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::alias::{pick_direct, AliasTable};
use super::delta::{build_delta_index, DeltaLayer};
use crate::algebra::SumProduct;
use crate::error::{Error, Result};
use crate::pattern::{build_pattern_system, PatternBank, PatternSystem, Symbol, Variant};
use crate::ring::{partition_function, MessageTable};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SamplerMode {
    /// Scan the candidate set on every draw.
    #[default]
    Direct,
    /// Draw through alias tables, built on first use.
    Alias,
}

/// Exact sampler for `p(x) = f(x)/Z` over the prefix system of a closed
/// bank. Shared state is immutable apart from lazily built alias tables;
/// callers pass their own generator.
#[derive(Debug)]
pub struct Sampler {
    system: PatternSystem,
    table: MessageTable<SumProduct<f64>>,
    delta: Vec<DeltaLayer>,
    mode: SamplerMode,
    /// `tables[s][a]`: alias table over `Δ_s(α_a)`; entry `n` covers `Π_n`.
    tables: Vec<Vec<OnceLock<Option<AliasTable>>>>,
}

impl Sampler {
    /// Closes the bank, runs the forward pass and indexes the Δ sets.
    pub fn new(bank: &PatternBank, mode: SamplerMode) -> Result<Self> {
        let bank = bank.closed();
        let system = build_pattern_system(&bank, Variant::Prefixes)?;
        let costs = system.costs::<SumProduct<f64>>(&bank);
        let (_, table) = partition_function(&system, &costs)?;
        let delta = build_delta_index(&system)?;
        let n = system.n();
        let tables = (0..=n)
            .map(|s| {
                let len = if s < n { system.layer(s + 1).len() } else { 1 };
                (0..len).map(|_| OnceLock::new()).collect()
            })
            .collect();
        Ok(Sampler { system, table, delta, mode, tables })
    }

    /// Builds every alias table up front.
    pub fn preprocess(&self) {
        for s in 0..self.tables.len() {
            for a in 0..self.tables[s].len() {
                self.alias(s, a);
            }
        }
    }

    pub fn mode(&self) -> SamplerMode {
        self.mode
    }

    pub fn system(&self) -> &PatternSystem {
        &self.system
    }

    pub fn delta(&self, s: usize) -> &DeltaLayer {
        &self.delta[s]
    }

    fn candidates(&self, s: usize, a: usize) -> &[usize] {
        &self.delta[s].sets[a]
    }

    fn alias(&self, s: usize, a: usize) -> Option<&AliasTable> {
        self.tables[s][a]
            .get_or_init(|| {
                let m = &self.table.m[s];
                let weights: Vec<f64> = if s == self.system.n() {
                    m.iter().map(|v| v.0).collect()
                } else {
                    self.candidates(s, a).iter().map(|&i| m[i].0).collect()
                };
                AliasTable::new(&weights).ok()
            })
            .as_ref()
    }

    fn draw<R: Rng + ?Sized>(&self, s: usize, a: usize, rng: &mut R) -> Result<usize> {
        let n = self.system.n();
        let m = &self.table.m[s];
        let u = rng.gen::<f64>();
        let pos = match self.mode {
            SamplerMode::Alias => self.alias(s, a).map(|t| t.pick(u)),
            SamplerMode::Direct if s == n => pick_direct(m.iter().map(|v| v.0), u),
            SamplerMode::Direct => pick_direct(self.candidates(s, a).iter().map(|&i| m[i].0), u),
        };
        let pos = pos.ok_or(Error::InvalidSamplingStep { step: s })?;
        Ok(if s == n { pos } else { self.candidates(s, a)[pos] })
    }

    /// One labeling `x ∈ D^{1:n}`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<Symbol>> {
        let n = self.system.n();
        let mut x = vec![0; n];
        let mut cur = self.draw(n, 0, rng)?;
        for s in (1..=n).rev() {
            let w = self.system.word(s, cur);
            x[s - 1] = *w.0.last().ok_or(Error::InvalidSamplingStep { step: s })?;
            if s > 1 {
                cur = self.draw(s - 1, cur, rng)?;
            }
        }
        Ok(x)
    }

    /// `count` labelings from a generator seeded with `seed`.
    pub fn sample_many(&self, count: usize, seed: u64) -> Result<Vec<Vec<Symbol>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample(&mut rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{labeling_energy, labelings};
    use crate::pattern::Alphabet;

    fn bank(alpha: &str, n: usize, words: &[(&str, f64)]) -> PatternBank {
        let mut b = PatternBank::new(Alphabet::from_chars(alpha).unwrap(), n).unwrap();
        for (w, e) in words {
            b.add(w, *e).unwrap();
        }
        b
    }

    fn code(x: &[Symbol], k: usize) -> usize {
        x.iter().fold(0, |acc, &c| acc * k + c as usize)
    }

    #[test]
    fn uniform_total_variation() {
        let b = bank("ab", 3, &[("a", 0.0), ("b", 0.0)]);
        for mode in [SamplerMode::Direct, SamplerMode::Alias] {
            let sampler = Sampler::new(&b, mode).unwrap();
            let draws = sampler.sample_many(100_000, 3).unwrap();
            let mut freq = [0.0; 8];
            for x in &draws {
                freq[code(x, 2)] += 1.0 / draws.len() as f64;
            }
            let tv: f64 = freq.iter().map(|f| (f - 0.125).abs()).sum::<f64>() / 2.0;
            assert!(tv < 0.02, "{mode:?}: {tv}");
        }
    }

    #[test]
    fn dominant_labeling() {
        let b = bank("ab", 4, &[("a", 0.0), ("b", 0.0), ("abba", -12.0)]);
        let total: f64 = labelings(2, 4).map(|x| (-labeling_energy(&b, &x)).exp()).sum();
        let p = (12.0f64).exp() / total;
        assert!(p >= 0.99);
        let s = Sampler::new(&b, SamplerMode::Alias).unwrap();
        let hits = s.sample_many(10_000, 11).unwrap().iter().filter(|x| **x == [0, 1, 1, 0]).count();
        assert!(hits as f64 >= 0.98 * 10_000.0);
    }

    #[test]
    fn seeds_are_reproducible() {
        let b = bank("abc", 6, &[("ab", 0.3), ("ca", -0.4)]);
        let s = Sampler::new(&b, SamplerMode::Direct).unwrap();
        assert_eq!(s.sample_many(50, 9).unwrap(), s.sample_many(50, 9).unwrap());
        assert_ne!(s.sample_many(50, 9).unwrap(), s.sample_many(50, 10).unwrap());
    }
}
