use crate::algebra::Semiring;
use crate::error::{Error, Result};
use crate::pattern::Layer;

const NONE: u32 = u32::MAX;

/// Path sums `V_t(α, β)` of one layer: `⊕` of `f(x)` over labelings whose
/// deepest node lies below `α` but not below `β`.
///
/// Stores jumps `α ↦ α^{↑2^r}` with the matching values, so a query folds
/// one value per set bit of the depth difference.
#[derive(Clone, Debug)]
pub struct LiftTables<S> {
    depth: Vec<u32>,
    up: Vec<Vec<u32>>,
    val: Vec<Vec<S>>,
}

impl<S: Semiring> LiftTables<S> {
    /// `m` and `w` are `M_t` and `W_t` over the nodes of `layer`.
    pub fn build(layer: &Layer, m: &[S], w: &[S]) -> Self {
        let len = layer.len();
        let mut depth = vec![0u32; len];
        let mut up0 = vec![NONE; len];
        let mut val0 = vec![S::zero(); len];
        let mut tallest = 0;
        for a in 0..len {
            let kids = layer.children(a);
            // S⃗ and S⃖ over the siblings, skipping the child itself
            let mut suffix = vec![S::zero(); kids.len() + 1];
            for (i, &b) in kids.iter().enumerate().rev() {
                suffix[i] = suffix[i + 1].plus(&w[b]);
            }
            let mut prefix = m[a].clone();
            for (i, &b) in kids.iter().enumerate() {
                depth[b] = depth[a] + 1;
                tallest = tallest.max(depth[b]);
                up0[b] = a as u32;
                val0[b] = prefix.plus(&suffix[i + 1]);
                prefix = prefix.plus(&w[b]);
            }
        }
        let mut up = vec![up0];
        let mut val = vec![val0];
        let mut step = 1u32;
        while 2 * step <= tallest {
            let (pu, pv) = (up.last().expect("level"), val.last().expect("level"));
            let mut nu = vec![NONE; len];
            let mut nv = vec![S::zero(); len];
            for v in 0..len {
                if depth[v] >= 2 * step {
                    let mid = pu[v] as usize;
                    nu[v] = pu[mid];
                    nv[v] = pv[mid].plus(&pv[v]);
                }
            }
            up.push(nu);
            val.push(nv);
            step *= 2;
        }
        LiftTables { depth, up, val }
    }

    pub fn depth(&self, node: usize) -> usize {
        self.depth[node] as usize
    }

    /// `V_t(ancestor, descendant)`; the second node must lie strictly below
    /// the first.
    pub fn query(&self, ancestor: usize, descendant: usize) -> Result<S> {
        let bad = || Error::NotDescendant { ancestor, descendant };
        if ancestor >= self.depth.len() || descendant >= self.depth.len() {
            return Err(bad());
        }
        let (da, dd) = (self.depth[ancestor], self.depth[descendant]);
        if dd <= da {
            return Err(bad());
        }
        let mut diff = dd - da;
        let mut cur = descendant;
        let mut acc = S::zero();
        while diff > 0 {
            let r = (u32::BITS - 1 - diff.leading_zeros()) as usize;
            acc = acc.plus(&self.val[r][cur]);
            cur = self.up[r][cur] as usize;
            diff -= 1 << r;
        }
        if cur != ancestor {
            return Err(bad());
        }
        Ok(acc)
    }
}
