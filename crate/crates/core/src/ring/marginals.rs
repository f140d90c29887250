use std::collections::HashMap;

use super::partition::{backward_messages, partition_function, Backward, MessageTable};
use crate::algebra::{Field, Scaled, Semiring, SumProduct};
use crate::error::{Error, Result};
use crate::pattern::{
    build_pattern_system, compute_f, NodeId, NodeTable, PatternBank, PatternSystem, Placement, SystemCosts, Variant,
    Word,
};

/// For every placement `α` of the prefix-suffix system, the minimal
/// placements `β ⊐ α` that contain it strictly on both sides.
#[derive(Clone, Debug)]
pub struct PhiIndex {
    offsets: Vec<usize>,
    /// `phi[k]`: global indices of `Φ(α_k)`.
    phi: Vec<Vec<usize>>,
    /// How many `α` list each `β`.
    fan_in: Vec<usize>,
}

impl PhiIndex {
    pub fn global(&self, s: usize, i: usize) -> usize {
        self.offsets[s] + i
    }

    pub fn phi(&self, k: usize) -> &[usize] {
        &self.phi[k]
    }

    pub fn fan_in(&self, k: usize) -> usize {
        self.fan_in[k]
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }
}

/// Relation entries of one `β`: `(end offset from β's end, node of α)`.
type Relation = Vec<(usize, NodeId)>;

fn contained_minimal(ps: &PatternSystem, s: usize, i: usize) -> Relation {
    let word = ps.word(s, i).clone();
    let len = word.len();
    if len < 3 {
        return Vec::new();
    }
    // member[a][b]: word[a..b] placed inside β is a node of its layer
    let end_of = |b: usize| s + b - len;
    let member = |a: usize, b: usize| ps.find(end_of(b), &word.0[a..b]).is_some();
    let mut inside = vec![vec![false; len + 1]; len + 1];
    for a in 0..len {
        for b in a + 1..=len {
            inside[a][b] = (a, b) != (0, len) && member(a, b);
        }
    }
    // dominated[a][b]: some node [g0, g1) ≠ β with g0 < a and g1 > b
    let mut dominated = vec![vec![false; len + 2]; len + 1];
    for a in 1..len {
        for b in (a + 1..len).rev() {
            dominated[a][b] = inside[a - 1][b + 1] || dominated[a - 1][b] || dominated[a][b + 1];
        }
    }
    let mut out = Vec::new();
    for a in 1..len {
        for b in a + 1..len {
            if inside[a][b] && !dominated[a][b] {
                let node = ps.trie().find(&word.0[a..b]).expect("member word in trie");
                out.push((len - b, node));
            }
        }
    }
    out
}

/// Builds `Φ` for a prefix-suffix system, checking that no `β` is listed by
/// more than `2|β|` placements.
pub fn build_phi_index(ps: &PatternSystem) -> Result<PhiIndex> {
    ps.require("build_phi_index", Variant::PrefixSuffix)?;
    let n = ps.n();
    let mut offsets = Vec::with_capacity(n + 2);
    let mut total = 0;
    for s in 0..=n {
        offsets.push(total);
        total += ps.layer(s).len();
    }
    offsets.push(total);
    let mut phi = vec![Vec::new(); total];
    let mut fan_in = vec![0; total];
    // the relation of β depends only on the layers its sub-placements end at
    let mut cache: HashMap<(NodeId, Vec<usize>), Relation> = HashMap::new();
    for s in 1..=n {
        let layer = ps.layer(s);
        for i in 0..layer.len() {
            let len = layer.word_len(i);
            let window: Vec<usize> = (s + 1 - len..=s).map(|t| ps.shape_id(t)).collect();
            let rel = cache.entry((layer.node(i), window)).or_insert_with(|| contained_minimal(ps, s, i));
            let beta = offsets[s] + i;
            for &(back, node) in rel.iter() {
                let t = s - back;
                let a = ps.layer(t).index_of(node).ok_or_else(|| Error::Invariant("Φ member left its layer".into()))?;
                phi[offsets[t] + a].push(beta);
            }
            fan_in[beta] = rel.len();
            if rel.len() > 2 * len {
                return Err(Error::Invariant(format!("Φ fan-in {} exceeds 2|β| = {}", rel.len(), 2 * len)));
            }
        }
    }
    Ok(PhiIndex { offsets, phi, fan_in })
}

#[derive(Clone, Debug)]
pub struct MarginalEntry<S> {
    pub placement: Placement,
    pub in_gamma: bool,
    /// `Z(α)`: sum of `f(x)` over labelings that contain `α`.
    pub z: Scaled<S>,
    pub w: Scaled<S>,
    pub w_minus: Option<Scaled<S>>,
}

/// `Z(α)` for every placement of the prefix-suffix system.
#[derive(Clone, Debug)]
pub struct MarginalTable<S> {
    pub z: Scaled<S>,
    pub entries: Vec<MarginalEntry<S>>,
    index: HashMap<(usize, Word), usize>,
}

impl<S: Semiring> MarginalTable<S> {
    pub fn get(&self, start: usize, word: &Word) -> Option<&MarginalEntry<S>> {
        self.index.get(&(start, word.clone())).map(|&k| &self.entries[k])
    }

    /// Entries whose word is in Γ.
    pub fn gamma_entries(&self) -> impl Iterator<Item = &MarginalEntry<S>> {
        self.entries.iter().filter(|e| e.in_gamma)
    }
}

impl MarginalTable<SumProduct<f64>> {
    /// `Z(α)/Z`.
    pub fn probability(&self, entry: &MarginalEntry<SumProduct<f64>>) -> f64 {
        entry.z.divide(&self.z).map_or(f64::NAN, |q| q.to_float())
    }
}

struct Side<'a, S> {
    sys: &'a PatternSystem,
    table: &'a MessageTable<S>,
}

/// Marginals from precomputed passes: `fwd` must be the prefix system of the
/// bank with its messages, `bwd` the mirrored pass.
pub fn compute_marginals<S: Field>(
    ps: &PatternSystem,
    fwd_sys: &PatternSystem,
    fwd: &MessageTable<S>,
    bwd: &Backward<S>,
    costs: &SystemCosts<S>,
) -> Result<MarginalTable<S>> {
    let n = ps.n();
    let index = build_phi_index(ps)?;
    let f: NodeTable<S> = compute_f(fwd_sys, &fwd.phi)?;
    let fw = Side { sys: fwd_sys, table: fwd };
    let bw = Side { sys: &bwd.system, table: &bwd.table };
    let missing = || Error::Invariant("placement missing from a message pass".into());
    let fwd_at = |j: usize, word: &[u32]| -> Result<(usize, usize)> {
        fw.sys.find(j, word).map(|i| (j, i)).ok_or_else(missing)
    };
    let invert = |num: Scaled<S>, den: &Scaled<S>| {
        num.divide(den).ok_or_else(|| Error::NonInvertibleCost(format!("{:?}", den.value)))
    };

    let mut entries: Vec<MarginalEntry<S>> = Vec::with_capacity(index.len());
    let mut lookup = HashMap::with_capacity(index.len());
    for s in 0..=n {
        let layer = ps.layer(s);
        for i in 0..layer.len() {
            let word = ps.word(s, i).clone();
            let len = word.len();
            let start = s + 1 - len;
            let (j, fi) = fwd_at(s, &word.0)?;
            let w_fwd = fw.table.w_scaled(j, fi);
            let f_alpha = Scaled::new(f[j][fi].clone(), 0);
            let (bs, bi) = bwd.locate(start, &word.0).ok_or_else(missing)?;
            let w_bwd = bw.table.w_scaled(bs, bi);
            let w = invert(w_fwd.times(&w_bwd), &f_alpha)?;
            let w_minus = if len >= 2 {
                let (pj, pi) = fwd_at(s - 1, &word.0[..len - 1])?;
                let left = fw.table.w_scaled(pj, pi);
                let right = bwd.w_at(start + 1, &word.0[1..]).ok_or_else(missing)?;
                let c_tilde = if layer.in_gamma(i) { costs.get(layer.node(i), start) } else { S::one() };
                let phis = Scaled::new(fw.table.phi[j][fi].times(&bw.table.phi[bs][bi]), 0);
                let inner = if len == 2 {
                    Scaled::new(S::one(), 0)
                } else {
                    invert(f_alpha.times(&Scaled::new(c_tilde, 0)), &phis)?
                };
                Some(invert(left.times(&right), &inner)?)
            } else {
                None
            };
            lookup.insert((start, word.clone()), entries.len());
            entries.push(MarginalEntry {
                placement: Placement { start, end: s, word },
                in_gamma: layer.in_gamma(i),
                z: Scaled::new(S::zero(), 0),
                w,
                w_minus,
            });
        }
    }

    // longer placements first; Φ(α) only holds strictly longer ones
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by_key(|&k| std::cmp::Reverse(entries[k].placement.word.len()));
    for k in order {
        let mut z = entries[k].w.clone();
        for &b in index.phi(k) {
            let wm = entries[b].w_minus.as_ref().ok_or_else(|| Error::Invariant("Φ member shorter than 3".into()))?;
            z = z.plus(&entries[b].z.minus(wm));
        }
        entries[k].z = z;
    }
    let z = fw.table.w_scaled(n, 0);
    Ok(MarginalTable { z, entries, index: lookup })
}

/// Runs both passes and returns `Z(α)` for every prefix-suffix placement.
/// The bank is closed over its alphabet first.
pub fn marginals<S: Field>(bank: &PatternBank) -> Result<MarginalTable<S>> {
    let bank = bank.closed();
    let fwd_sys = build_pattern_system(&bank, Variant::Prefixes)?;
    let (_, fwd) = partition_function(&fwd_sys, &fwd_sys.costs::<S>(&bank))?;
    let (_, bwd) = backward_messages::<S>(&bank)?;
    let ps = build_pattern_system(&bank, Variant::PrefixSuffix)?;
    let costs = ps.costs::<S>(&bank);
    compute_marginals(&ps, &fwd_sys, &fwd, &bwd, &costs)
}
