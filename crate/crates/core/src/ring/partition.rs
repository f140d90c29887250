use crate::algebra::{Ring, Scaled, Semiring};
use crate::error::{Error, Result};
use crate::pattern::{build_pattern_system, layer_phi, NodeTable, PatternBank, PatternSystem, SystemCosts, Variant};

/// Messages `M_s(α)` and `W_s(α)` of one pass, stored per position.
///
/// Each layer shares a power-of-two scale: the represented quantities are
/// `m[s][i] · 2^exp2[s]` and `w[s][i] · 2^exp2[s]`.
#[derive(Clone, Debug)]
pub struct MessageTable<S> {
    pub m: NodeTable<S>,
    pub w: NodeTable<S>,
    pub phi: NodeTable<S>,
    pub exp2: Vec<i64>,
}

impl<S: Semiring> MessageTable<S> {
    pub fn w_scaled(&self, s: usize, i: usize) -> Scaled<S> {
        Scaled::new(self.w[s][i].clone(), self.exp2[s])
    }

    pub fn m_scaled(&self, s: usize, i: usize) -> Scaled<S> {
        Scaled::new(self.m[s][i].clone(), self.exp2[s])
    }
}

/// Partition function over a ring, processing each layer from the leaves.
pub fn partition_function<S: Ring>(sys: &PatternSystem, costs: &SystemCosts<S>) -> Result<(Scaled<S>, MessageTable<S>)> {
    sys.require("partition_function", Variant::Prefixes)?;
    sys.require_closed("partition_function")?;
    let n = sys.n();
    let mut table = MessageTable {
        m: Vec::with_capacity(n + 1),
        w: Vec::with_capacity(n + 1),
        phi: Vec::with_capacity(n + 1),
        exp2: Vec::with_capacity(n + 1),
    };
    // the empty labeling has cost 𝟙
    table.m.push(vec![S::one()]);
    table.w.push(vec![S::one()]);
    table.phi.push(vec![S::one()]);
    table.exp2.push(0);
    for s in 1..=n {
        let layer = sys.layer(s);
        let prefix = sys.transition(s).prefix();
        let phi = layer_phi(sys, costs, s);
        let prev = &table.w[s - 1];
        let up = |i: usize| -> Result<&S> {
            prefix[i].map(|p| &prev[p]).ok_or_else(|| Error::Invariant(format!("missing prefix link at {s}:{i}")))
        };
        let mut m = vec![S::zero(); layer.len()];
        let mut w = vec![S::zero(); layer.len()];
        for i in (0..layer.len()).rev() {
            let kids = layer.children(i);
            if i != 0 {
                let mut sub = S::zero();
                for &b in kids {
                    sub = sub.plus(up(b)?);
                }
                m[i] = phi[i].times(&up(i)?.minus(&sub));
            }
            let mut acc = m[i].clone();
            for &b in kids {
                acc = acc.plus(&w[b]);
            }
            w[i] = acc;
        }
        let k = S::rescale_exponent(&w);
        if k != 0 {
            m.iter_mut().for_each(|x| *x = x.unscale(k));
            w.iter_mut().for_each(|x| *x = x.unscale(k));
        }
        table.exp2.push(table.exp2[s - 1] + k as i64);
        table.m.push(m);
        table.w.push(w);
        table.phi.push(phi);
    }
    let z = table.w_scaled(n, 0);
    Ok((z, table))
}

/// Right-to-left messages, obtained by running the forward pass on the
/// mirrored bank.
#[derive(Clone, Debug)]
pub struct Backward<S> {
    pub system: PatternSystem,
    pub table: MessageTable<S>,
}

impl<S: Semiring> Backward<S> {
    /// Mirrored layer and node index of the placement of `word` starting at
    /// `start`.
    pub fn locate(&self, start: usize, word: &[crate::pattern::Symbol]) -> Option<(usize, usize)> {
        let s = self.system.n() + 1 - start;
        let rev: Vec<_> = word.iter().rev().copied().collect();
        self.system.find(s, &rev).map(|i| (s, i))
    }

    /// `W⃖_start(word)`: sum of `f(y)` over suffix labelings `y ∈ D^{start:n}`
    /// that begin with `word`.
    pub fn w_at(&self, start: usize, word: &[crate::pattern::Symbol]) -> Option<Scaled<S>> {
        self.locate(start, word).map(|(s, i)| self.table.w_scaled(s, i))
    }
}

pub fn backward_messages<S: Ring>(bank: &PatternBank) -> Result<(Scaled<S>, Backward<S>)> {
    let rev = bank.reversed();
    let system = build_pattern_system(&rev, Variant::Prefixes)?;
    let costs = system.costs::<S>(&rev);
    let (z, table) = partition_function(&system, &costs)?;
    Ok((z, Backward { system, table }))
}
