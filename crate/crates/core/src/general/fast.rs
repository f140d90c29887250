use super::basic::{finish, push_layer, SemiringMessages};
use super::extended::{LayerPlan, SpecialLayer};
use super::interval::IntervalSumIndex;
use super::lift::LiftTables;
use crate::algebra::{Scaled, Semiring};
use crate::error::Result;
use crate::pattern::{Layer, NodeTable, PatternSystem, SystemCosts, Variant};

/// `W_t(α) = M_t(α) ⊕ ⊕_children W_t(β)`.
pub fn subtree_sums<S: Semiring>(layer: &Layer, m: &[S]) -> Vec<S> {
    let mut w = m.to_vec();
    for a in (0..layer.len()).rev() {
        for &b in layer.children(a) {
            let wb = w[b].clone();
            w[a] = w[a].plus(&wb);
        }
    }
    w
}

fn special_step<S: Semiring>(
    sl: &SpecialLayer,
    prev: &Layer,
    before: &[S],
    costs: &SystemCosts<S>,
    s: usize,
    out: &mut [S],
) -> Result<()> {
    let w = subtree_sums(prev, before);
    let index = IntervalSumIndex::from_layer(prev, &w);
    let lift = LiftTables::build(prev, before, &w);

    let mut phi = vec![S::one(); sl.len()];
    for i in 0..sl.len() {
        let mut v = sl.parent[i].map_or_else(S::one, |p| phi[p].clone());
        if let (Some(node), Some(g)) = (sl.gamma[i], sl.prefix[i]) {
            v = v.times(&costs.get(node, s - prev.word_len(g)));
        }
        phi[i] = v;
    }

    let mut msg = vec![S::zero(); sl.len()];
    for i in (0..sl.len()).rev() {
        let mut inner = match sl.prefix[i] {
            Some(g) => {
                let mut acc = before[g].clone();
                for &(lo, hi) in &sl.a_runs[i] {
                    acc = acc.plus(&index.sum(g, lo, hi));
                }
                acc
            }
            // children of ε_s all continue from ε_{s−1}
            None => {
                let count: usize = sl.a_runs[i].iter().map(|&(lo, hi)| hi + 1 - lo).sum();
                (0..count).fold(S::zero(), |acc, _| acc.plus(&w[0]))
            }
        };
        for &(b, d) in &sl.b_paths[i] {
            inner = inner.plus(&lift.query(b, d)?);
        }
        let mut v = phi[i].times(&inner);
        for &c in &sl.children[i] {
            if sl.in_pi[c].is_none() {
                v = v.plus(&msg[c]);
            }
        }
        msg[i] = v;
    }
    for (i, v) in msg.into_iter().enumerate() {
        if let Some(k) = sl.in_pi[i] {
            out[k] = v;
        }
    }
    Ok(())
}

/// Runs the special-pattern recursion and keeps the messages over `Π_s`.
pub fn fast_messages<S: Semiring>(sys: &PatternSystem, costs: &SystemCosts<S>) -> Result<SemiringMessages<S>> {
    sys.require("infer_fast", Variant::ProperPrefixes)?;
    let plan = LayerPlan::build(sys, true);
    let mut m: NodeTable<S> = vec![vec![S::one()]];
    let mut exp2 = vec![0];
    for s in 1..=sys.n() {
        let sl = plan.special[sys.transition_id(s)].as_ref().expect("built with special layers");
        let mut layer = vec![S::zero(); sys.layer(s).len()];
        special_step(sl, sys.layer(s - 1), &m[s - 1], costs, s, &mut layer)?;
        push_layer(&mut m, &mut exp2, layer);
    }
    let z = finish(sys, &m, &exp2);
    Ok(SemiringMessages { z, m, exp2, extended: None })
}

/// `⊕` of `f(x)` over all labelings, touching only the special nodes of each
/// extended layer.
pub fn infer_fast<S: Semiring>(sys: &PatternSystem, costs: &SystemCosts<S>) -> Result<Scaled<S>> {
    fast_messages(sys, costs).map(|r| r.z)
}
