use super::extended::{ExtendedLayer, LayerPlan};
use crate::algebra::{Scaled, Semiring};
use crate::error::Result;
use crate::pattern::{Layer, NodeTable, PatternSystem, SystemCosts, Variant};

/// Messages `M_s` over `Π_s` for every position, with the shared per-layer
/// power-of-two scale `exp2[s]`.
#[derive(Clone, Debug)]
pub struct SemiringMessages<S> {
    pub z: Scaled<S>,
    pub m: NodeTable<S>,
    pub exp2: Vec<i64>,
    /// Messages over all of `Π̂_s`, at scale `exp2[s − 1]`, when requested.
    pub extended: Option<Vec<Vec<S>>>,
}

/// `φ` over the extended layer: the product of the costs of every
/// Γ-placement that is a suffix of the node.
pub(crate) fn extended_phi<S: Semiring>(
    ext: &ExtendedLayer,
    prev: &Layer,
    costs: &SystemCosts<S>,
    s: usize,
) -> Vec<S> {
    let mut phi = vec![S::one(); ext.len()];
    for id in 1..ext.len() {
        let p = ext.parent(id, prev).expect("non-root");
        let mut v = phi[p].clone();
        if let Some(node) = ext.gamma(id) {
            let len = prev.word_len(ext.prefix(id).expect("non-root")) + 1;
            v = v.times(&costs.get(node, s + 1 - len));
        }
        phi[id] = v;
    }
    phi
}

/// Rescales a freshly computed layer and records its exponent.
pub(crate) fn push_layer<S: Semiring>(m: &mut NodeTable<S>, exp2: &mut Vec<i64>, mut layer: Vec<S>) {
    let k = S::rescale_exponent(&layer);
    if k != 0 {
        layer.iter_mut().for_each(|x| *x = x.unscale(k));
    }
    exp2.push(exp2.last().copied().unwrap_or(0) + k as i64);
    m.push(layer);
}

pub(crate) fn finish<S: Semiring>(sys: &PatternSystem, m: &NodeTable<S>, exp2: &[i64]) -> Scaled<S> {
    let n = sys.n();
    Scaled::new(S::sum(m[n].iter()), exp2[n])
}

/// Runs the extended-layer recursion and keeps every message.
pub fn basic_messages<S: Semiring>(
    sys: &PatternSystem,
    costs: &SystemCosts<S>,
    keep_extended: bool,
) -> Result<SemiringMessages<S>> {
    sys.require("infer_basic", Variant::ProperPrefixes)?;
    let n = sys.n();
    let plan = LayerPlan::build(sys, false);
    let mut m: NodeTable<S> = vec![vec![S::one()]];
    let mut exp2 = vec![0];
    let mut extended = keep_extended.then(Vec::new);
    for s in 1..=n {
        let ext = &plan.ext[sys.transition_id(s)];
        let prev = sys.layer(s - 1);
        let phi = extended_phi(ext, prev, costs, s);
        let before = &m[s - 1];
        let mut hat = vec![S::zero(); ext.len()];
        for id in (0..ext.len()).rev() {
            let mut v = match ext.prefix(id) {
                Some(g) => phi[id].times(&before[g]),
                None => S::zero(),
            };
            for b in ext.children(id, prev) {
                if ext.in_pi(b).is_none() {
                    v = v.plus(&hat[b]);
                }
            }
            hat[id] = v;
        }
        let mut layer = vec![S::zero(); sys.layer(s).len()];
        for (id, v) in hat.iter().enumerate() {
            if let Some(i) = ext.in_pi(id) {
                layer[i] = v.clone();
            }
        }
        if let Some(e) = extended.as_mut() {
            e.push(hat);
        }
        push_layer(&mut m, &mut exp2, layer);
    }
    let z = finish(sys, &m, &exp2);
    Ok(SemiringMessages { z, m, exp2, extended })
}

/// `⊕` of `f(x)` over all labelings, in any commutative semiring.
pub fn infer_basic<S: Semiring>(sys: &PatternSystem, costs: &SystemCosts<S>) -> Result<Scaled<S>> {
    basic_messages(sys, costs, false).map(|r| r.z)
}
