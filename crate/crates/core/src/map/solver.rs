use std::collections::HashMap;
use std::fmt::Debug;

use num_traits::{Float, FromPrimitive};

use super::fft::assemble_f_via_fft;
use crate::algebra::MinPlus;
use crate::error::{Error, Result};
use crate::oracle::labeling_cost;
use crate::pattern::{
    build_pattern_system, compute_f, compute_phi, NodeId, NodeTable, PatternBank, PatternSystem, Symbol, Variant,
    Word,
};

/// Scalars the MAP solver runs on.
pub trait Energy: Float + FromPrimitive + Debug + Send + Sync + 'static {}
impl<T: Float + FromPrimitive + Debug + Send + Sync + 'static> Energy for T {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MapOptions {
    /// Use the context-exact working set instead of the simple one.
    pub exact: bool,
    /// Assemble `f` from convolutions rather than the prefix tables.
    pub fft: bool,
    /// Γ words up to this length go through the convolution path.
    pub delta: usize,
}

impl Default for MapOptions {
    fn default() -> Self {
        MapOptions { exact: false, fft: false, delta: 1 }
    }
}

/// Which branch attained `M_s(α)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Choice {
    /// `M_p(α^←) + ψ(α)`.
    Extend,
    /// The message of the given child.
    Child(usize),
    /// Neither branch exists.
    Unreachable,
}

/// A working set together with `α^←` links and `ψ` increments.
#[derive(Clone, Debug)]
pub struct MapModel<T> {
    bank: PatternBank,
    system: PatternSystem,
    /// `(p, index of α^← in Π_p)`.
    back: NodeTable<Option<(usize, usize)>>,
    psi: NodeTable<T>,
    f: NodeTable<T>,
}

#[derive(Clone, Debug)]
pub struct MapMessages<T> {
    pub m: NodeTable<T>,
    pub choice: NodeTable<Choice>,
    /// Minimum comparisons made against children, per layer.
    pub comparisons: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapSolution<T> {
    pub energy: T,
    pub labeling: Vec<Symbol>,
    /// Energy of `labeling`, recomputed from scratch.
    pub labeling_energy: T,
}

/// Rejects banks the solver cannot take: no word of length one, or some
/// effective placement cost above zero.
pub fn check_nonpositive(bank: &PatternBank) -> Result<()> {
    if bank.gamma().iter().all(|w| w.len() != 1) {
        return Err(Error::NoUnitWord);
    }
    let costs = bank.costs::<MinPlus<f64>>();
    for (w, c) in costs.base() {
        if c.0 > 0.0 {
            return Err(Error::PositiveCost(bank.alphabet().format_word(w)));
        }
    }
    for ((w, start), c) in costs.combined_overrides() {
        if c.0 > 0.0 {
            return Err(Error::PositiveCost(format!("{} at {}", bank.alphabet().format_word(w), start)));
        }
    }
    Ok(())
}

fn link_of(sys: &PatternSystem, s: usize, i: usize) -> Option<(usize, usize)> {
    let word = sys.word(s, i);
    let start = s + 1 - word.len();
    (0..word.len()).rev().find_map(|q| {
        let p = start - 1 + q;
        sys.find(p, &word.0[..q]).map(|j| (p, j))
    })
}

impl<T: Energy> MapModel<T> {
    pub fn new(bank: &PatternBank, opts: MapOptions) -> Result<Self> {
        check_nonpositive(bank)?;
        let system = build_pattern_system(bank, Variant::MapTilde { exact: opts.exact })?;
        let n = system.n();
        let f = if opts.fft { fft_f(bank, &system, opts.delta)? } else { prefix_f(bank, &system)? };

        // links depend on the layers the prefixes end at
        let mut cache: HashMap<(NodeId, Vec<usize>), Option<(usize, usize)>> = HashMap::new();
        let mut back = Vec::with_capacity(n + 1);
        let mut psi = Vec::with_capacity(n + 1);
        for s in 0..=n {
            let layer = system.layer(s);
            let mut bl = Vec::with_capacity(layer.len());
            let mut pl = Vec::with_capacity(layer.len());
            for i in 0..layer.len() {
                let len = layer.word_len(i);
                let link = if s == 0 || len == 0 {
                    None
                } else {
                    let window: Vec<usize> = (s - len..s).map(|t| system.shape_id(t)).collect();
                    let back_len = *cache.entry((layer.node(i), window)).or_insert_with(|| {
                        link_of(&system, s, i).map(|(p, j)| (s - p, system.layer(p).node(j) as usize))
                    });
                    back_len.map(|(d, node)| {
                        let p = s - d;
                        (p, system.layer(p).index_of(node as NodeId).expect("cached link node in layer"))
                    })
                };
                let base = link.map_or(T::zero(), |(p, j)| f[p][j]);
                pl.push(f[s][i] - base);
                bl.push(link);
            }
            back.push(bl);
            psi.push(pl);
        }
        Ok(MapModel { bank: bank.clone(), system, back, psi, f })
    }

    pub fn system(&self) -> &PatternSystem {
        &self.system
    }

    pub fn link(&self, s: usize, i: usize) -> Option<(usize, usize)> {
        self.back[s][i]
    }

    pub fn psi(&self, s: usize, i: usize) -> T {
        self.psi[s][i]
    }

    /// `f` of the placement of node `i` ending at `s`.
    pub fn f(&self, s: usize, i: usize) -> T {
        self.f[s][i]
    }

    pub fn messages(&self) -> MapMessages<T> {
        let n = self.system.n();
        let inf = T::infinity();
        let mut m: NodeTable<T> = Vec::with_capacity(n + 1);
        let mut choice = Vec::with_capacity(n + 1);
        let mut comparisons = Vec::with_capacity(n + 1);
        for s in 0..=n {
            let layer = self.system.layer(s);
            let mut ms = vec![inf; layer.len()];
            let mut cs = vec![Choice::Unreachable; layer.len()];
            let mut count = 0;
            for i in (0..layer.len()).rev() {
                let (mut best, mut how) = if s == 0 && layer.word_len(i) == 0 {
                    (T::zero(), Choice::Extend)
                } else {
                    match self.back[s][i] {
                        Some((p, j)) => (m[p][j] + self.psi[s][i], Choice::Extend),
                        None => (inf, Choice::Unreachable),
                    }
                };
                for &b in layer.children(i) {
                    count += 1;
                    if ms[b] < best {
                        best = ms[b];
                        how = Choice::Child(b);
                    }
                }
                ms[i] = best;
                cs[i] = how;
            }
            m.push(ms);
            choice.push(cs);
            comparisons.push(count);
        }
        MapMessages { m, choice, comparisons }
    }

    pub fn solve(&self) -> Result<MapSolution<T>> {
        let msg = self.messages();
        let n = self.system.n();
        let last = &msg.m[n];
        let mut best: Option<usize> = None;
        for (i, v) in last.iter().enumerate() {
            if best.is_none_or(|b| *v < last[b]) {
                best = Some(i);
            }
        }
        let mut i = best.ok_or_else(|| Error::Invariant("empty final layer".into()))?;
        let energy = last[i];
        if !energy.is_finite() {
            return Err(Error::Invariant("no labeling reaches the final layer".into()));
        }
        let mut labeling: Vec<Option<Symbol>> = vec![None; n];
        let mut s = n;
        while s > 0 {
            match msg.choice[s][i] {
                Choice::Child(b) => i = b,
                Choice::Extend => {
                    let (p, j) = self.back[s][i].ok_or_else(|| Error::Invariant("extend without a link".into()))?;
                    let word = self.system.word(s, i);
                    let tail = &word.0[word.len() - (s - p)..];
                    for (k, &c) in tail.iter().enumerate() {
                        labeling[p + k] = Some(c);
                    }
                    s = p;
                    i = j;
                }
                Choice::Unreachable => return Err(Error::Invariant(format!("unreachable node on the path at {s}"))),
            }
        }
        let filler = self.cheapest_letter();
        let labeling: Vec<Symbol> = labeling.into_iter().map(|c| c.unwrap_or(filler)).collect();
        let labeling_energy = labeling_cost::<MinPlus<T>>(&self.bank, &labeling).0;
        Ok(MapSolution { energy, labeling, labeling_energy })
    }

    fn cheapest_letter(&self) -> Symbol {
        let costs = self.bank.costs::<MinPlus<f64>>();
        (0..self.bank.alphabet().len() as Symbol)
            .min_by(|&a, &b| {
                let ca = costs.get(&Word(vec![a]), 1).0;
                let cb = costs.get(&Word(vec![b]), 1).0;
                ca.partial_cmp(&cb).unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(0)
    }
}

fn prefix_f<T: Energy>(bank: &PatternBank, sys: &PatternSystem) -> Result<NodeTable<T>> {
    let pre = build_pattern_system(bank, Variant::Prefixes)?;
    let phi = compute_phi(&pre, &pre.costs::<MinPlus<T>>(bank))?;
    let f = compute_f(&pre, &phi)?;
    (0..=sys.n())
        .map(|s| {
            (0..sys.layer(s).len())
                .map(|i| {
                    pre.find(s, &sys.word(s, i).0)
                        .map(|k| f[s][k].0)
                        .ok_or_else(|| Error::Invariant("working-set node missing from prefix tables".into()))
                })
                .collect()
        })
        .collect()
}

fn fft_f<T: Energy>(bank: &PatternBank, sys: &PatternSystem, delta: usize) -> Result<NodeTable<T>> {
    let mut words: Vec<Word> = (0..=sys.n())
        .flat_map(|s| (0..sys.layer(s).len()).map(move |i| (s, i)))
        .map(|(s, i)| sys.word(s, i).clone())
        .filter(|w| w.len() > 0)
        .collect();
    words.sort();
    words.dedup();
    let tables = assemble_f_via_fft(bank, &words, delta);
    let cast = |x: f64| T::from_f64(x).ok_or_else(|| Error::Invariant("energy not representable".into()));
    (0..=sys.n())
        .map(|s| {
            (0..sys.layer(s).len())
                .map(|i| {
                    let w = sys.word(s, i);
                    if w.len() == 0 {
                        return Ok(T::zero());
                    }
                    cast(tables[w].at(s).ok_or_else(|| Error::Invariant("placement outside its table".into()))?)
                })
                .collect()
        })
        .collect()
}

/// Minimum-energy labeling of a bank whose costs are all non-positive.
pub fn map_nonpositive<T: Energy>(bank: &PatternBank, opts: MapOptions) -> Result<MapSolution<T>> {
    MapModel::<T>::new(bank, opts)?.solve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force_map;
    use crate::pattern::Alphabet;

    fn bank(alpha: &str, n: usize, words: &[(&str, f64)]) -> PatternBank {
        let mut b = PatternBank::new(Alphabet::from_chars(alpha).unwrap(), n).unwrap();
        for (w, e) in words {
            b.add(w, *e).unwrap();
        }
        b
    }

    fn all_options() -> Vec<MapOptions> {
        let mut out = Vec::new();
        for exact in [false, true] {
            for fft in [false, true] {
                out.push(MapOptions { exact, fft, delta: 1 });
            }
        }
        out
    }

    #[test]
    fn ab_examples() {
        for opts in all_options() {
            let b3 = bank("ab", 3, &[("a", 0.0), ("b", 0.0), ("ab", -1.0)]);
            let s = map_nonpositive::<f64>(&b3, opts).unwrap();
            assert_eq!(s.energy, -1.0);
            assert_eq!(s.labeling_energy, -1.0);
            let b4 = bank("ab", 4, &[("a", 0.0), ("b", 0.0), ("ab", -1.0)]);
            let s = map_nonpositive::<f64>(&b4, opts).unwrap();
            assert_eq!((s.energy, s.labeling.clone()), (-2.0, vec![0, 1, 0, 1]), "{opts:?}");
        }
    }

    #[test]
    fn zero_energies_give_smallest_labeling() {
        let b = bank("abc", 4, &[("a", 0.0), ("b", 0.0), ("c", 0.0), ("bc", 0.0)]);
        let s = map_nonpositive::<f64>(&b, MapOptions::default()).unwrap();
        assert_eq!((s.energy, s.labeling), (0.0, vec![0, 0, 0, 0]));
    }

    #[test]
    fn rejects_bad_banks() {
        let b = bank("ab", 3, &[("a", 0.0), ("ab", 1.0)]);
        assert!(matches!(map_nonpositive::<f64>(&b, MapOptions::default()), Err(Error::PositiveCost(_))));
        let b = bank("ab", 3, &[("ab", -1.0)]);
        assert!(matches!(map_nonpositive::<f64>(&b, MapOptions::default()), Err(Error::NoUnitWord)));
        let mut b = bank("ab", 3, &[("a", 0.0), ("ab", -1.0)]);
        b.add_override(Word(vec![0, 1]), 2, 1.5).unwrap();
        assert!(matches!(map_nonpositive::<f64>(&b, MapOptions::default()), Err(Error::PositiveCost(_))));
    }

    #[test]
    fn agrees_with_enumeration() {
        let b = bank(
            "abc",
            7,
            &[("a", -0.2), ("b", 0.0), ("c", -0.1), ("abca", -1.3), ("bcb", -0.7), ("cab", -0.4), ("aa", -0.15)],
        )
        .closed();
        let (want, _) = brute_force_map(&b).unwrap();
        for opts in all_options() {
            let s = map_nonpositive::<f64>(&b, opts).unwrap();
            assert!((s.energy - want).abs() < 1e-12, "{opts:?}: {} vs {}", s.energy, want);
            assert!((s.labeling_energy - s.energy).abs() < 1e-12);
        }
    }

    #[test]
    fn comparisons_bounded_by_layer_size() {
        let b = bank("ab", 9, &[("a", -0.5), ("b", 0.0), ("abab", -1.0), ("bba", -0.3)]);
        let model = MapModel::<f64>::new(&b, MapOptions::default()).unwrap();
        let msg = model.messages();
        for s in 0..=9 {
            assert!(msg.comparisons[s] <= model.system().layer(s).len());
        }
    }
}
