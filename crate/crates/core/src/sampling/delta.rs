use std::collections::HashSet;

use crate::error::Result;
use crate::pattern::{PatternSystem, Symbol, Variant};

/// `Δ_s(α)` for every `α ∈ Π_{s+1} \ {ε_{s+1}}`, as indices into `Π_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaLayer {
    pub sets: Vec<Vec<usize>>,
}

impl DeltaLayer {
    pub fn total(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }
}

/// Subtree of `α⁻` in `G[Π_s]`, cut below the prefixes of `α`'s children.
pub fn delta_by_subtraction(sys: &PatternSystem, s: usize) -> DeltaLayer {
    let upper = sys.layer(s + 1);
    let lower = sys.layer(s);
    let prefix = sys.transition(s + 1).prefix();
    let mut sets = vec![Vec::new(); upper.len()];
    for (a, set) in sets.iter_mut().enumerate() {
        let Some(root) = prefix[a] else { continue };
        let blocked: HashSet<usize> = upper.children(a).iter().filter_map(|&b| prefix[b]).collect();
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            set.push(v);
            stack.extend(lower.children(v).iter().copied().filter(|c| !blocked.contains(c)));
        }
        set.sort_unstable();
    }
    DeltaLayer { sets }
}

/// Each `β ∈ Π_s` lands in `Δ_s(β^a)` for every letter `a`, where `β^a` is
/// the longest suffix of `βa` in `Π_{s+1}`.
pub fn delta_by_extension(sys: &PatternSystem, s: usize) -> DeltaLayer {
    let upper = sys.layer(s + 1);
    let lower = sys.layer(s);
    let mut sets = vec![Vec::new(); upper.len()];
    for b in 0..lower.len() {
        for a in 0..sys.alphabet_size() as Symbol {
            let mut cur = Some(b);
            while let Some(g) = cur {
                let mut w = sys.word(s, g).0.clone();
                w.push(a);
                if let Some(t) = sys.find(s + 1, &w) {
                    sets[t].push(b);
                    break;
                }
                cur = lower.parent(g);
            }
        }
    }
    for set in &mut sets {
        set.sort_unstable();
        set.dedup();
    }
    DeltaLayer { sets }
}

/// Δ sets for `s = 0..n`, entry `s` describing the step from `s + 1` to `s`.
/// Interior layers with equal transitions share one set.
pub fn build_delta_index(sys: &PatternSystem) -> Result<Vec<DeltaLayer>> {
    sys.require("build_delta_index", Variant::Prefixes)?;
    let mut by_transition: Vec<Option<DeltaLayer>> = vec![None; sys.num_transitions()];
    let mut out = Vec::with_capacity(sys.n());
    for s in 0..sys.n() {
        let t = sys.transition_id(s + 1);
        let layer = by_transition[t].get_or_insert_with(|| delta_by_subtraction(sys, s)).clone();
        out.push(layer);
    }
    Ok(out)
}
