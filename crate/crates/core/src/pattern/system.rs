use std::collections::HashMap;
use std::fmt;

use super::bank::{PatternBank, Symbol, Word};
use super::ilimit::TildeIndex;
use super::trie::{NodeId, WordTrie};
use crate::algebra::Semiring;
use crate::error::{Error, Result};

/// Which working set `Π` a system is built for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// All prefixes of Γ-placements, plus every `ε_s`.
    Prefixes,
    /// Proper prefixes of Γ-placements, `ε_s` included.
    ProperPrefixes,
    /// Non-empty words that are a prefix and a suffix of Γ-placements.
    PrefixSuffix,
    /// The minimization set: prefix-suffix words plus the fitting `ε_s`, or,
    /// with `exact`, only the words that some context leaves uncovered.
    MapTilde { exact: bool },
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Prefixes => "prefixes",
            Variant::ProperPrefixes => "proper-prefixes",
            Variant::PrefixSuffix => "prefix-suffix",
            Variant::MapTilde { exact: false } => "map-simple",
            Variant::MapTilde { exact: true } => "map-exact",
        }
    }

    /// Every non-empty node's prefix `α⁻` is a node of the previous layer.
    pub fn is_prefix_closed(self) -> bool {
        matches!(self, Variant::Prefixes | Variant::ProperPrefixes)
    }

    /// Every Γ-placement ending at `s` is a node of `Π_s`.
    pub fn contains_gamma(self) -> bool {
        matches!(self, Variant::Prefixes | Variant::PrefixSuffix | Variant::MapTilde { exact: false })
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One layer `Π_s` with its suffix-order Hasse forest.
///
/// Nodes are sorted by length and then by word, so a parent always precedes
/// its children and iterating indices backwards visits leaves first. When
/// `ε_s` is present it is node 0 and the only root.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    nodes: Vec<NodeId>,
    lens: Vec<usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    in_gamma: Vec<bool>,
    gamma_ends: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
}

impl Layer {
    fn build(trie: &WordTrie, mut nodes: Vec<NodeId>, is_gamma: &[bool], gamma_ends: Vec<NodeId>) -> Self {
        nodes.sort_by(|&a, &b| {
            let (wa, wb) = (trie.word(a), trie.word(b));
            wa.len().cmp(&wb.len()).then_with(|| wa.cmp(wb))
        });
        nodes.dedup();
        let index: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut parent = vec![None; nodes.len()];
        let mut children = vec![Vec::new(); nodes.len()];
        for (i, &node) in nodes.iter().enumerate() {
            let mut cur = trie.suffix_parent(node);
            while let Some(c) = cur {
                if let Some(&p) = index.get(&c) {
                    parent[i] = Some(p);
                    children[p].push(i);
                    break;
                }
                cur = trie.suffix_parent(c);
            }
        }
        Layer {
            lens: nodes.iter().map(|&n| trie.depth(n)).collect(),
            in_gamma: nodes.iter().map(|&n| is_gamma[n as usize]).collect(),
            nodes,
            parent,
            children,
            gamma_ends,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> NodeId {
        self.nodes[i]
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn word_len(&self, i: usize) -> usize {
        self.lens[i]
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    /// Children in word order.
    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    /// Whether node `i` is a Γ-placement.
    pub fn in_gamma(&self, i: usize) -> bool {
        self.in_gamma[i]
    }

    /// Γ words whose placement ends at this position, whether or not they are
    /// nodes of the layer.
    pub fn gamma_ends(&self) -> &[NodeId] {
        &self.gamma_ends
    }

    pub fn has_root(&self) -> bool {
        self.lens.first() == Some(&0)
    }

    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.parent[i].is_none())
    }

    pub fn index_of(&self, node: NodeId) -> Option<usize> {
        self.index.get(&node).copied()
    }

    /// Number of forest edges.
    pub fn edge_count(&self) -> usize {
        self.parent.iter().filter(|p| p.is_some()).count()
    }
}

/// Links from one layer to the previous one.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    /// For each node of `Π_s`, the index of `α⁻` in `Π_{s−1}`.
    prefix: Vec<Option<usize>>,
    /// For each entry of `gamma_ends` of `Π_s`, the index of `w⁻` in `Π_{s−1}`.
    gamma_prefix: Vec<Option<usize>>,
}

impl Transition {
    pub fn prefix(&self) -> &[Option<usize>] {
        &self.prefix
    }

    pub fn gamma_prefix(&self) -> &[Option<usize>] {
        &self.gamma_prefix
    }
}

/// Per-position layers `Π_0, …, Π_n` over a shared word trie.
///
/// Layers far enough from both ends have the same word set; they share one
/// stored [`Layer`] and consecutive shared pairs share one [`Transition`].
#[derive(Clone, Debug)]
pub struct PatternSystem {
    variant: Variant,
    n: usize,
    alphabet_size: usize,
    ell_max: usize,
    closed: bool,
    trie: WordTrie,
    is_gamma: Vec<bool>,
    gamma: Vec<NodeId>,
    shapes: Vec<Layer>,
    shape_of: Vec<usize>,
    transitions: Vec<Transition>,
    transition_of: Vec<usize>,
}

/// Shortest extension of each word to a Γ word on the right (`ext`) or on the
/// left (`pre`), over all Γ words having it as prefix or suffix.
struct Witnesses {
    ext: HashMap<NodeId, usize>,
    proper_ext: HashMap<NodeId, usize>,
    pre: HashMap<NodeId, usize>,
}

impl Witnesses {
    fn new(trie: &WordTrie, gamma: &[Word]) -> Self {
        let mut w = Witnesses { ext: HashMap::new(), proper_ext: HashMap::new(), pre: HashMap::new() };
        let keep_min = |m: &mut HashMap<NodeId, usize>, k: NodeId, v: usize| {
            m.entry(k).and_modify(|x| *x = (*x).min(v)).or_insert(v);
        };
        for word in gamma {
            let l = word.len();
            for k in 0..=l {
                let p = trie.find(&word.0[..k]).expect("prefix in trie");
                keep_min(&mut w.ext, p, l - k);
                if k < l {
                    keep_min(&mut w.proper_ext, p, l - k);
                }
                let s = trie.find(&word.0[l - k..]).expect("suffix in trie");
                keep_min(&mut w.pre, s, l - k);
            }
        }
        w
    }
}

pub fn build_pattern_system(bank: &PatternBank, variant: Variant) -> Result<PatternSystem> {
    bank.validate()?;
    let n = bank.n();
    let gamma_words = bank.gamma();
    let mut trie = WordTrie::new();
    for w in &gamma_words {
        for k in 1..=w.len() {
            trie.insert(&w.0[..k]);
        }
    }
    let mut is_gamma = vec![false; trie.len()];
    let gamma: Vec<NodeId> = gamma_words
        .iter()
        .map(|w| {
            let id = trie.find(&w.0).expect("inserted");
            is_gamma[id as usize] = true;
            id
        })
        .collect();
    let ell_max = gamma_words.iter().map(Word::len).max().unwrap_or(0);
    let min_len = gamma_words.iter().map(Word::len).min().unwrap_or(0);
    let wit = Witnesses::new(&trie, &gamma_words);
    let tilde = matches!(variant, Variant::MapTilde { exact: true })
        .then(|| TildeIndex::new(&gamma_words, bank.alphabet().len()));

    let margin = if tilde.is_some() { 2 * ell_max } else { ell_max };
    let interior = |s: usize| s >= margin && s + margin <= n;

    let layer_nodes = |s: usize| -> Vec<NodeId> {
        let fits_right = |m: &HashMap<NodeId, usize>, node: NodeId| m.get(&node).is_some_and(|&e| s + e <= n);
        let fits_left = |node: NodeId| {
            let len = trie.depth(node);
            len <= s && wit.pre.get(&node).is_some_and(|&p| s + 1 >= len + p + 1)
        };
        let mut out = Vec::new();
        match variant {
            Variant::Prefixes | Variant::ProperPrefixes => {
                let m = if variant == Variant::Prefixes { &wit.ext } else { &wit.proper_ext };
                out.push(WordTrie::ROOT);
                out.extend(
                    m.keys().copied().filter(|&p| p != WordTrie::ROOT && trie.depth(p) <= s && fits_right(m, p)),
                );
            }
            Variant::PrefixSuffix | Variant::MapTilde { exact: false } => {
                out.extend(
                    wit.ext.keys().copied().filter(|&p| p != WordTrie::ROOT && fits_right(&wit.ext, p) && fits_left(p)),
                );
                if variant != Variant::PrefixSuffix && (s == 0 || (s >= min_len && s + min_len <= n)) {
                    out.push(WordTrie::ROOT);
                }
            }
            Variant::MapTilde { exact: true } => {
                let index = tilde.as_ref().expect("built for exact variant");
                for cand in &index.candidates {
                    let b = cand.beta.len();
                    let ok = b <= s
                        && index.admits(cand, &gamma_words, |a, g| {
                            (a + b <= s && s + g <= n).then(|| (s - a - b, n - s - g))
                        });
                    if ok {
                        out.push(trie.find(&cand.beta.0).expect("prefix-suffix word in trie"));
                    }
                }
                if s == 0 && !out.contains(&WordTrie::ROOT) {
                    out.push(WordTrie::ROOT);
                }
                if s == 0 {
                    out.retain(|&x| x == WordTrie::ROOT);
                }
            }
        }
        out
    };
    let gamma_ends = |s: usize| -> Vec<NodeId> {
        let mut g: Vec<NodeId> = gamma.iter().copied().filter(|&w| trie.depth(w) <= s).collect();
        g.sort_by(|&a, &b| trie.word(a).len().cmp(&trie.word(b).len()).then_with(|| trie.word(a).cmp(trie.word(b))));
        g
    };

    let mut shapes: Vec<Layer> = Vec::new();
    let mut shape_of = Vec::with_capacity(n + 1);
    let mut interior_shape = None;
    for s in 0..=n {
        let id = if interior(s) {
            *interior_shape.get_or_insert_with(|| {
                shapes.push(Layer::build(&trie, layer_nodes(s), &is_gamma, gamma_ends(s)));
                shapes.len() - 1
            })
        } else {
            shapes.push(Layer::build(&trie, layer_nodes(s), &is_gamma, gamma_ends(s)));
            shapes.len() - 1
        };
        shape_of.push(id);
    }

    let mut transitions = Vec::new();
    let mut transition_of = vec![usize::MAX; n + 1];
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for s in 1..=n {
        let key = (shape_of[s - 1], shape_of[s]);
        let id = *seen.entry(key).or_insert_with(|| {
            let (prev, cur) = (&shapes[key.0], &shapes[key.1]);
            let link = |node: NodeId| {
                let w = trie.word(node);
                if w.is_empty() {
                    return None;
                }
                trie.find(&w.0[..w.len() - 1]).and_then(|p| prev.index_of(p))
            };
            transitions.push(Transition {
                prefix: cur.nodes.iter().map(|&x| link(x)).collect(),
                gamma_prefix: cur.gamma_ends.iter().map(|&x| link(x)).collect(),
            });
            transitions.len() - 1
        });
        transition_of[s] = id;
    }

    Ok(PatternSystem {
        variant,
        n,
        alphabet_size: bank.alphabet().len(),
        ell_max,
        closed: bank.is_closed(),
        trie,
        is_gamma,
        gamma,
        shapes,
        shape_of,
        transitions,
        transition_of,
    })
}

impl PatternSystem {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn ell_max(&self) -> usize {
        self.ell_max
    }

    /// Whether every letter is a word of Γ.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn trie(&self) -> &WordTrie {
        &self.trie
    }

    pub fn is_gamma(&self, node: NodeId) -> bool {
        self.is_gamma[node as usize]
    }

    /// Trie nodes of the words of Γ.
    pub fn gamma(&self) -> &[NodeId] {
        &self.gamma
    }

    pub fn layer(&self, s: usize) -> &Layer {
        &self.shapes[self.shape_of[s]]
    }

    /// Index of the stored layer shape used at position `s`.
    pub fn shape_id(&self, s: usize) -> usize {
        self.shape_of[s]
    }

    pub fn num_shapes(&self) -> usize {
        self.shapes.len()
    }

    /// Links from `Π_s` back to `Π_{s−1}`; `s ≥ 1`.
    pub fn transition(&self, s: usize) -> &Transition {
        &self.transitions[self.transition_of[s]]
    }

    pub fn transition_id(&self, s: usize) -> usize {
        self.transition_of[s]
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    /// Index of `α⁻` in layer `s − 1`.
    pub fn prefix_link(&self, s: usize, i: usize) -> Option<usize> {
        self.transition(s).prefix[i]
    }

    pub fn word(&self, s: usize, i: usize) -> &Word {
        self.trie.word(self.layer(s).node(i))
    }

    /// Start position of node `i` of layer `s`.
    pub fn start(&self, s: usize, i: usize) -> usize {
        s + 1 - self.layer(s).word_len(i)
    }

    pub fn find(&self, s: usize, word: &[Symbol]) -> Option<usize> {
        self.trie.find(word).and_then(|node| self.layer(s).index_of(node))
    }

    /// Total number of nodes over all positions.
    pub fn total_nodes(&self) -> usize {
        (0..=self.n).map(|s| self.layer(s).len()).sum()
    }

    /// Cost lookup for this system's trie, built from the bank it came from.
    pub fn costs<S: Semiring>(&self, bank: &PatternBank) -> SystemCosts<S> {
        let bc = bank.costs::<S>();
        let mut base = vec![S::one(); self.trie.len()];
        for (word, c) in bc.base() {
            if let Some(id) = self.trie.find(&word.0) {
                base[id as usize] = c.clone();
            }
        }
        let overrides = bc
            .combined_overrides()
            .filter_map(|((w, start), c)| self.trie.find(&w.0).map(|id| ((id, start), c)))
            .collect();
        SystemCosts { base, overrides }
    }

    pub(crate) fn require(&self, operation: &'static str, variant: Variant) -> Result<()> {
        if self.variant != variant {
            return Err(Error::WrongVariant { operation, required: variant.name(), actual: self.variant.to_string() });
        }
        Ok(())
    }

    pub(crate) fn require_closed(&self, operation: &'static str) -> Result<()> {
        if !self.closed {
            return Err(Error::AlphabetNotClosed { operation });
        }
        Ok(())
    }
}

/// Costs `c_α` keyed by trie node and start position.
#[derive(Clone, Debug)]
pub struct SystemCosts<S> {
    base: Vec<S>,
    overrides: HashMap<(NodeId, usize), S>,
}

impl<S: Semiring> SystemCosts<S> {
    pub fn get(&self, node: NodeId, start: usize) -> S {
        if !self.overrides.is_empty() {
            if let Some(c) = self.overrides.get(&(node, start)) {
                return c.clone();
            }
        }
        self.base[node as usize].clone()
    }

    pub fn has_overrides(&self) -> bool {
        !self.overrides.is_empty()
    }

    /// Every distinct cost value in use, base and overridden.
    pub fn values(&self) -> impl Iterator<Item = &S> {
        self.base.iter().chain(self.overrides.values())
    }
}

/// `φ_s(α)`: product of the costs of Γ-placements that are suffixes of `α`.
pub(crate) fn layer_phi<S: Semiring>(sys: &PatternSystem, costs: &SystemCosts<S>, s: usize) -> Vec<S> {
    let layer = sys.layer(s);
    let mut phi: Vec<S> = Vec::with_capacity(layer.len());
    for i in 0..layer.len() {
        let up = layer.parent(i).map_or_else(S::one, |p| phi[p].clone());
        phi.push(if layer.in_gamma(i) { up.times(&costs.get(layer.node(i), s + 1 - layer.word_len(i))) } else { up });
    }
    phi
}

/// Per-position node values.
pub type NodeTable<S> = Vec<Vec<S>>;

pub fn compute_phi<S: Semiring>(sys: &PatternSystem, costs: &SystemCosts<S>) -> Result<NodeTable<S>> {
    if !sys.variant.contains_gamma() {
        return Err(Error::WrongVariant {
            operation: "compute_phi",
            required: "a variant containing every Γ-placement",
            actual: sys.variant.to_string(),
        });
    }
    Ok((0..=sys.n).map(|s| layer_phi(sys, costs, s)).collect())
}

/// `f(α)`: product of the costs of all Γ-placements inside `α`.
pub fn compute_f<S: Semiring>(sys: &PatternSystem, phi: &NodeTable<S>) -> Result<NodeTable<S>> {
    sys.require("compute_f", Variant::Prefixes)?;
    let mut f: NodeTable<S> = vec![vec![S::one()]];
    for s in 1..=sys.n {
        let tr = sys.transition(s);
        let row = (0..sys.layer(s).len())
            .map(|i| match tr.prefix[i] {
                Some(p) => f[s - 1][p].times(&phi[s][i]),
                None => S::one(),
            })
            .collect();
        f.push(row);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{MinPlus, SumProduct};
    use crate::pattern::bank::{compute_bank_stats, Alphabet};

    fn bank(alpha: &str, n: usize, words: &[(&str, f64)]) -> PatternBank {
        let mut b = PatternBank::new(Alphabet::from_chars(alpha).unwrap(), n).unwrap();
        for (w, e) in words {
            b.add(w, *e).unwrap();
        }
        b
    }

    fn binary_bank(n: usize) -> PatternBank {
        bank("01", n, &[("0", 0.0), ("1", 0.0), ("1000", 0.0), ("1010", 0.0)])
    }

    fn edges(sys: &PatternSystem, s: usize) -> Vec<(String, String)> {
        let l = sys.layer(s);
        let f = |i| sys.word(s, i).0.iter().map(|c| char::from(b'0' + *c as u8)).collect::<String>();
        (0..l.len()).filter_map(|i| l.parent(i).map(|p| (f(p), f(i)))).collect()
    }

    #[test]
    fn binary_interior_tree() {
        let sys = build_pattern_system(&binary_bank(10), Variant::Prefixes).unwrap();
        let s = 5;
        assert_eq!(sys.layer(s).len(), 8);
        let mut e = edges(&sys, s);
        e.sort();
        let want: Vec<(String, String)> = [("", "0"), ("", "1"), ("0", "10"), ("0", "100"), ("0", "1000"), ("1", "101"), ("10", "1010")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert_eq!(e, want);
        assert_eq!(sys.layer(s).roots().count(), 1);
    }

    #[test]
    fn single_letters_interior() {
        let sys = build_pattern_system(&bank("ab", 4, &[("a", 0.0), ("b", 0.0)]), Variant::Prefixes).unwrap();
        let l = sys.layer(2);
        assert_eq!(l.len(), 3);
        assert_eq!(l.children(0), &[1, 2]);
    }

    #[test]
    fn proper_prefix_layer_size() {
        let b = binary_bank(12);
        let st = compute_bank_stats(&b).unwrap();
        let sys = build_pattern_system(&b, Variant::ProperPrefixes).unwrap();
        // P′ already counts ε
        assert_eq!(sys.layer(6).len(), st.p_prime);
        assert_eq!(sys.layer(12).len(), 1);
    }

    #[test]
    fn interior_layers_are_shared() {
        let sys = build_pattern_system(&binary_bank(40), Variant::Prefixes).unwrap();
        assert_eq!(sys.shape_id(4), sys.shape_id(36));
        assert!(sys.num_shapes() <= 2 * 4 + 1);
        assert!(sys.num_transitions() <= 2 * 4 + 2);
    }

    #[test]
    fn boundary_layers_fit() {
        let sys = build_pattern_system(&binary_bank(6), Variant::Prefixes).unwrap();
        for s in 0..=6 {
            for i in 0..sys.layer(s).len() {
                assert!(sys.word(s, i).len() <= s);
            }
        }
        // at s = 5 only patterns that can still finish by n = 6 remain
        assert!(sys.find(5, &[1, 0]).is_none());
        assert!(sys.find(5, &[1, 0, 1]).is_some());
    }

    #[test]
    fn phi_and_f() {
        let b = bank("01", 6, &[("0", 1.0), ("1", 2.0), ("1000", 3.0), ("1010", 4.0)]);
        let sys = build_pattern_system(&b, Variant::Prefixes).unwrap();
        let costs = sys.costs::<MinPlus<f64>>(&b);
        let phi = compute_phi(&sys, &costs).unwrap();
        let f = compute_f(&sys, &phi).unwrap();
        let i = sys.find(4, &[1, 0, 1, 0]).unwrap();
        assert_eq!(phi[4][i], MinPlus(5.0));
        assert_eq!(f[4][i], MinPlus(1.0 + 2.0 + 1.0 + 2.0 + 4.0));
        assert_eq!(phi[3][0], MinPlus(0.0));
    }

    #[test]
    fn f_of_ab() {
        let b = bank("ab", 3, &[("a", 0.5), ("ab", 0.25)]);
        let sys = build_pattern_system(&b, Variant::Prefixes).unwrap();
        let costs = sys.costs::<SumProduct<f64>>(&b);
        let f = compute_f(&sys, &compute_phi(&sys, &costs).unwrap()).unwrap();
        let i = sys.find(2, &[0, 1]).unwrap();
        assert!((f[2][i].0 - (-0.75f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn variant_checks() {
        let b = binary_bank(6);
        let sys = build_pattern_system(&b, Variant::ProperPrefixes).unwrap();
        let costs = sys.costs::<MinPlus<f64>>(&b);
        assert!(compute_phi(&sys, &costs).is_err());
        let ps = build_pattern_system(&b, Variant::PrefixSuffix).unwrap();
        let phi = compute_phi(&ps, &ps.costs::<MinPlus<f64>>(&b)).unwrap();
        assert!(compute_f(&ps, &phi).is_err());
    }

    #[test]
    fn prefix_suffix_layers() {
        let sys = build_pattern_system(&binary_bank(10), Variant::PrefixSuffix).unwrap();
        let words: Vec<Vec<u32>> = (0..sys.layer(5).len()).map(|i| sys.word(5, i).0.clone()).collect();
        assert_eq!(words, vec![vec![0], vec![1], vec![1, 0], vec![1, 0, 0, 0], vec![1, 0, 1, 0]]);
        assert!(!sys.layer(5).has_root());
        // "10" needs a suffix witness starting at 1 or later: 1010 ending at 3 does not fit
        assert!(sys.find(2, &[1, 0]).is_none());
        assert!(sys.find(4, &[1, 0]).is_some());
    }

    #[test]
    fn map_simple_has_root_where_fitting() {
        let b = bank("ab", 5, &[("ab", -1.0)]);
        let sys = build_pattern_system(&b, Variant::MapTilde { exact: false }).unwrap();
        let roots: Vec<bool> = (0..=5).map(|s| sys.layer(s).has_root()).collect();
        assert_eq!(roots, vec![true, false, true, true, false, false]);
    }
}
