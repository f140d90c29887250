//! Reference answers by exhaustive enumeration of all `|D|^n` labelings.
//!
//! Nothing here is clever on purpose. Costs are evaluated by scanning every
//! interval of a labeling against every word, sums of floating sum-product
//! values use compensated summation, and counts are exact integers.

use std::collections::BTreeMap;

use crate::algebra::{MinPlus, Semiring};
use crate::error::{Error, Result};
use crate::pattern::{build_pattern_system, BankCosts, PatternBank, Placement, Symbol, Variant, Word};

/// Largest number of labelings any oracle will enumerate.
pub const ENUMERATION_LIMIT: f64 = (1u64 << 20) as f64;

pub fn check_size(alphabet: usize, len: usize) -> Result<()> {
    let size = (alphabet as f64).powi(len as i32);
    if size > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { size, limit: ENUMERATION_LIMIT });
    }
    Ok(())
}

/// All words of length `len` over `k` letters, in lexicographic order.
pub fn labelings(k: usize, len: usize) -> impl Iterator<Item = Vec<Symbol>> {
    let total = (k as u64).pow(len as u32);
    (0..total).map(move |mut code| {
        let mut x = vec![0; len];
        for slot in x.iter_mut().rev() {
            *slot = (code % k as u64) as Symbol;
            code /= k as u64;
        }
        x
    })
}

/// `f` of the text `x` placed at positions `offset + 1 ..`, over the Γ
/// placements that lie entirely inside it.
pub fn placed_cost<S: Semiring>(costs: &BankCosts<S>, gamma: &[Word], x: &[Symbol], offset: usize) -> S {
    let mut acc = S::one();
    for w in gamma {
        if w.len() > x.len() {
            continue;
        }
        for a in 0..=x.len() - w.len() {
            if x[a..a + w.len()] == w.0[..] {
                acc = acc.times(&costs.get(w, offset + a + 1));
            }
        }
    }
    acc
}

/// `f(x)` for a full labeling.
pub fn labeling_cost<S: Semiring>(bank: &PatternBank, x: &[Symbol]) -> S {
    placed_cost(&bank.costs::<S>(), &bank.gamma(), x, 0)
}

/// Sum of energies of every Γ placement in `x`.
pub fn labeling_energy(bank: &PatternBank, x: &[Symbol]) -> f64 {
    let mut e = 0.0;
    for p in bank.patterns() {
        e += p.energy * occurrences(&p.word, x).count() as f64;
    }
    for o in bank.overrides() {
        let a = o.start - 1;
        if a + o.word.len() <= x.len() && x[a..a + o.word.len()] == o.word.0[..] {
            e += o.energy;
        }
    }
    e
}

fn occurrences<'a>(w: &'a Word, x: &'a [Symbol]) -> impl Iterator<Item = usize> + 'a {
    (0..(x.len() + 1).saturating_sub(w.len())).filter(move |&a| x[a..a + w.len()] == w.0[..])
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `⊕` of `f(x)` over all labelings.
pub fn brute_force_z<S: Semiring>(bank: &PatternBank) -> Result<S> {
    let k = bank.alphabet().len();
    check_size(k, bank.n())?;
    let costs = bank.costs::<S>();
    let gamma = bank.gamma();
    Ok(labelings(k, bank.n()).fold(S::zero(), |acc, x| acc.plus(&placed_cost(&costs, &gamma, &x, 0))))
}

/// Sum of `exp(−energy)` over all labelings.
pub fn brute_force_partition(bank: &PatternBank) -> Result<f64> {
    check_size(bank.alphabet().len(), bank.n())?;
    let mut acc = CompensatedSum::default();
    for x in labelings(bank.alphabet().len(), bank.n()) {
        acc.add((-labeling_energy(bank, &x)).exp());
    }
    Ok(acc.value())
}

/// Minimum energy and the lexicographically smallest labeling attaining it.
pub fn brute_force_map(bank: &PatternBank) -> Result<(f64, Vec<Symbol>)> {
    check_size(bank.alphabet().len(), bank.n())?;
    let costs = bank.costs::<MinPlus<f64>>();
    let gamma = bank.gamma();
    let mut best: Option<(f64, Vec<Symbol>)> = None;
    for x in labelings(bank.alphabet().len(), bank.n()) {
        let e = placed_cost(&costs, &gamma, &x, 0).0;
        if best.as_ref().is_none_or(|(b, _)| e < *b) {
            best = Some((e, x));
        }
    }
    Ok(best.expect("at least one labeling"))
}

/// `Z(α)` for every placement of the prefix-suffix system of the closed bank.
pub fn brute_force_marginals(bank: &PatternBank) -> Result<BTreeMap<Placement, f64>> {
    let closed = bank.closed();
    let placements = prefix_suffix_placements(&closed)?;
    check_size(bank.alphabet().len(), bank.n())?;
    let mut acc = vec![CompensatedSum::default(); placements.len()];
    for x in labelings(bank.alphabet().len(), bank.n()) {
        let fx = (-labeling_energy(bank, &x)).exp();
        for (k, p) in placements.iter().enumerate() {
            if x[p.start - 1..p.end] == p.word.0[..] {
                acc[k].add(fx);
            }
        }
    }
    Ok(placements.into_iter().zip(acc).map(|(p, a)| (p, a.value())).collect())
}

/// `Z(α)` under an arbitrary semiring, e.g. exact counts.
pub fn brute_force_marginals_in<S: Semiring>(bank: &PatternBank) -> Result<BTreeMap<Placement, S>> {
    let closed = bank.closed();
    let placements = prefix_suffix_placements(&closed)?;
    check_size(bank.alphabet().len(), bank.n())?;
    let costs = closed.costs::<S>();
    let gamma = closed.gamma();
    let mut acc = vec![S::zero(); placements.len()];
    for x in labelings(bank.alphabet().len(), bank.n()) {
        let fx = placed_cost(&costs, &gamma, &x, 0);
        for (k, p) in placements.iter().enumerate() {
            if x[p.start - 1..p.end] == p.word.0[..] {
                acc[k] = acc[k].plus(&fx);
            }
        }
    }
    Ok(placements.into_iter().zip(acc).collect())
}

fn prefix_suffix_placements(bank: &PatternBank) -> Result<Vec<Placement>> {
    let ps = build_pattern_system(bank, Variant::PrefixSuffix)?;
    let mut out = Vec::new();
    for s in 0..=bank.n() {
        for i in 0..ps.layer(s).len() {
            out.push(Placement::ending_at(s, ps.word(s, i).clone()));
        }
    }
    Ok(out)
}

/// `⊕` of the partial cost `f(x)` over `x ∈ D^{1:s}` accepted by `keep`;
/// only placements inside `[1, s]` contribute.
pub fn prefix_sum<S: Semiring>(bank: &PatternBank, s: usize, keep: impl Fn(&[Symbol]) -> bool) -> Result<S> {
    let k = bank.alphabet().len();
    check_size(k, s)?;
    let costs = bank.costs::<S>();
    let gamma = bank.gamma();
    Ok(labelings(k, s).filter(|x| keep(x)).fold(S::zero(), |acc, x| acc.plus(&placed_cost(&costs, &gamma, &x, 0))))
}

/// `⊕` of `f(y)` over `y ∈ D^{i:n}` accepted by `keep`; only placements
/// inside `[i, n]` contribute.
pub fn suffix_sum<S: Semiring>(bank: &PatternBank, i: usize, keep: impl Fn(&[Symbol]) -> bool) -> Result<S> {
    let k = bank.alphabet().len();
    let len = bank.n() + 1 - i;
    check_size(k, len)?;
    let costs = bank.costs::<S>();
    let gamma = bank.gamma();
    Ok(labelings(k, len)
        .filter(|y| keep(y))
        .fold(S::zero(), |acc, y| acc.plus(&placed_cost(&costs, &gamma, &y, i - 1))))
}
