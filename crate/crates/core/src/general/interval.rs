use crate::algebra::Semiring;
use crate::error::{Error, Result};
use crate::pattern::Layer;

/// `⊕` over contiguous runs of a node's children.
///
/// The children of every node are laid out back to back and summed over
/// blocks of length `2^r`. With an idempotent `⊕` a query reads two
/// overlapping blocks, otherwise it splits the run into disjoint blocks.
#[derive(Clone, Debug)]
pub struct IntervalSumIndex<S> {
    offsets: Vec<usize>,
    levels: Vec<Vec<S>>,
}

impl<S: Semiring> IntervalSumIndex<S> {
    /// One group of values per node, in child order.
    pub fn from_groups<G: AsRef<[S]>>(groups: &[G]) -> Self {
        let mut offsets = Vec::with_capacity(groups.len() + 1);
        let mut flat = Vec::new();
        let mut widest = 0;
        for g in groups {
            offsets.push(flat.len());
            flat.extend_from_slice(g.as_ref());
            widest = widest.max(g.as_ref().len());
        }
        offsets.push(flat.len());
        Self::from_flat(offsets, flat, widest)
    }

    /// Child values `w[β]` of every node of `layer`.
    pub fn from_layer(layer: &Layer, w: &[S]) -> Self {
        let mut offsets = Vec::with_capacity(layer.len() + 1);
        let mut flat = Vec::with_capacity(layer.len());
        let mut widest = 0;
        for i in 0..layer.len() {
            offsets.push(flat.len());
            let kids = layer.children(i);
            flat.extend(kids.iter().map(|&b| w[b].clone()));
            widest = widest.max(kids.len());
        }
        offsets.push(flat.len());
        Self::from_flat(offsets, flat, widest)
    }

    fn from_flat(offsets: Vec<usize>, flat: Vec<S>, widest: usize) -> Self {
        let mut levels = vec![flat];
        let mut width = 1;
        while 2 * width <= widest {
            let prev = levels.last().expect("level 0");
            let next: Vec<S> = (0..prev.len() - width).map(|k| prev[k].plus(&prev[k + width])).collect();
            levels.push(next);
            width *= 2;
        }
        IntervalSumIndex { offsets, levels }
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    /// `⊕_{i ∈ [lo, hi]}` of the children of `node`, 1-based and inclusive.
    pub fn query(&self, node: usize, lo: usize, hi: usize) -> Result<S> {
        let d = self.degree(node);
        if lo == 0 || lo > hi || hi > d {
            return Err(Error::IntervalOutOfRange { lo, hi, len: d });
        }
        Ok(self.sum(node, lo - 1, hi - 1))
    }

    /// Unchecked 0-based variant of [`query`](Self::query).
    pub(crate) fn sum(&self, node: usize, lo: usize, hi: usize) -> S {
        let base = self.offsets[node];
        let (mut a, b) = (base + lo, base + hi + 1);
        if S::RANGE_MIN {
            let r = (usize::BITS - 1 - (b - a).leading_zeros()) as usize;
            let level = &self.levels[r];
            return level[a].plus(&level[b - (1 << r)]);
        }
        let mut acc = S::zero();
        while a < b {
            let r = ((usize::BITS - 1 - (b - a).leading_zeros()) as usize).min(self.levels.len() - 1);
            acc = acc.plus(&self.levels[r][a]);
            a += 1 << r;
        }
        acc
    }
}
