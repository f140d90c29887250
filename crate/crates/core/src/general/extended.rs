use crate::pattern::{Layer, NodeId, PatternSystem, Symbol, Transition, Word};

/// The extended layer `Π̂_s = {γc : γ ∈ Π_{s−1}, c ∈ D} ∪ {ε_s}`.
///
/// Nodes are numbered `0` for `ε_s` and `1 + γ·|D| + c` for `γc`. The tree
/// below each letter `c` mirrors `G[Π_{s−1}]`, so parents and children are
/// read off the previous layer and never stored.
#[derive(Clone, Debug)]
pub struct ExtendedLayer {
    k: usize,
    prev_len: usize,
    in_pi: Vec<Option<usize>>,
    gamma: Vec<Option<NodeId>>,
}

impl ExtendedLayer {
    pub fn build(layer: &Layer, prev: &Layer, tr: &Transition, sys: &PatternSystem) -> Self {
        let k = sys.alphabet_size();
        let size = 1 + prev.len() * k;
        let mut in_pi = vec![None; size];
        let mut gamma = vec![None; size];
        let last = |node: NodeId| *sys.trie().word(node).0.last().expect("non-empty");
        for i in 0..layer.len() {
            match tr.prefix()[i] {
                Some(g) => in_pi[1 + g * k + last(layer.node(i)) as usize] = Some(i),
                None if layer.word_len(i) == 0 => in_pi[0] = Some(i),
                None => {}
            }
        }
        for (j, &node) in layer.gamma_ends().iter().enumerate() {
            if let Some(g) = tr.gamma_prefix()[j] {
                gamma[1 + g * k + last(node) as usize] = Some(node);
            }
        }
        ExtendedLayer { k, prev_len: prev.len(), in_pi, gamma }
    }

    pub fn len(&self) -> usize {
        self.in_pi.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn id(&self, gamma: usize, c: Symbol) -> usize {
        1 + gamma * self.k + c as usize
    }

    /// `(γ, c)` of a non-root node.
    pub fn split(&self, id: usize) -> Option<(usize, Symbol)> {
        (id > 0).then(|| ((id - 1) / self.k, ((id - 1) % self.k) as Symbol))
    }

    /// Index in `Π_{s−1}` of `α⁻`.
    pub fn prefix(&self, id: usize) -> Option<usize> {
        self.split(id).map(|(g, _)| g)
    }

    pub fn parent(&self, id: usize, prev: &Layer) -> Option<usize> {
        let (g, c) = self.split(id)?;
        Some(match prev.parent(g) {
            Some(p) => self.id(p, c),
            None => 0,
        })
    }

    pub fn children<'a>(&'a self, id: usize, prev: &'a Layer) -> Box<dyn Iterator<Item = usize> + 'a> {
        match self.split(id) {
            None => Box::new((0..self.k as Symbol).map(move |c| self.id(0, c))),
            Some((g, c)) => Box::new(prev.children(g).iter().map(move |&d| self.id(d, c))),
        }
    }

    /// Index in `Π_s`, when the node belongs to it.
    pub fn in_pi(&self, id: usize) -> Option<usize> {
        self.in_pi[id]
    }

    /// Trie node of the Γ word, when the node is a Γ-placement.
    pub fn gamma(&self, id: usize) -> Option<NodeId> {
        self.gamma[id]
    }

    pub fn word(&self, id: usize, prev: &Layer, sys: &PatternSystem) -> Word {
        match self.split(id) {
            None => Word::empty(),
            Some((g, c)) => {
                let mut w = sys.trie().word(prev.node(g)).clone();
                w.0.push(c);
                w
            }
        }
    }

    pub fn prev_len(&self) -> usize {
        self.prev_len
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeClass {
    Special,
    /// No member of `Σ°_s` below.
    A,
    /// Exactly one child leads down to `Σ°_s`.
    B,
}

/// The special nodes `Σ_s` of an extended layer, the tree `G[Σ_s]`, and what
/// each special node needs from the previous layer.
#[derive(Clone, Debug)]
pub struct SpecialLayer {
    /// Extended ids of the special nodes, ancestors first.
    pub nodes: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    /// `α⁻` in `Π_{s−1}`.
    pub prefix: Vec<Option<usize>>,
    pub in_pi: Vec<Option<usize>>,
    pub gamma: Vec<Option<NodeId>>,
    /// Maximal runs `[lo, hi]` (0-based, inclusive) of `α⁻`'s child list
    /// whose extended counterparts lie in `A_s`.
    pub a_runs: Vec<Vec<(usize, usize)>>,
    /// `(β⁻, β↓⁻)` in `Π_{s−1}` for each child `β ∈ B_s`.
    pub b_paths: Vec<Vec<(usize, usize)>>,
    /// Class of every extended node.
    pub class: Vec<NodeClass>,
    /// `β↓` (extended id) for every node of `B_s`.
    pub down: Vec<Option<usize>>,
    pub sigma_circ: usize,
}

impl SpecialLayer {
    pub fn build(ext: &ExtendedLayer, prev: &Layer) -> Self {
        let size = ext.len();
        let circ: Vec<bool> = (0..size).map(|id| ext.in_pi(id).is_some() || ext.gamma(id).is_some()).collect();
        // a parent's id is always smaller than its children's
        let mut marked = circ.clone();
        let mut marked_kids = vec![0usize; size];
        let mut marked_child = vec![usize::MAX; size];
        for id in (1..size).rev() {
            if marked[id] {
                let p = ext.parent(id, prev).expect("non-root");
                marked[p] = true;
                marked_kids[p] += 1;
                marked_child[p] = id;
            }
        }
        let class: Vec<NodeClass> = (0..size)
            .map(|id| {
                if circ[id] || marked_kids[id] >= 2 {
                    NodeClass::Special
                } else if !marked[id] {
                    NodeClass::A
                } else {
                    NodeClass::B
                }
            })
            .collect();
        let mut down = vec![None; size];
        for id in (0..size).rev() {
            if class[id] == NodeClass::B {
                let c = marked_child[id];
                down[id] = Some(if class[c] == NodeClass::Special { c } else { down[c].expect("set below") });
            }
        }

        let nodes: Vec<usize> = (0..size).filter(|&id| class[id] == NodeClass::Special).collect();
        let mut slot = vec![usize::MAX; size];
        for (i, &id) in nodes.iter().enumerate() {
            slot[id] = i;
        }
        let mut parent = vec![None; nodes.len()];
        let mut children = vec![Vec::new(); nodes.len()];
        let mut a_runs = vec![Vec::new(); nodes.len()];
        let mut b_paths = vec![Vec::new(); nodes.len()];
        for (i, &id) in nodes.iter().enumerate() {
            let mut cur = ext.parent(id, prev);
            while let Some(p) = cur {
                if class[p] == NodeClass::Special {
                    parent[i] = Some(slot[p]);
                    children[slot[p]].push(i);
                    break;
                }
                cur = ext.parent(p, prev);
            }
            let mut run: Option<(usize, usize)> = None;
            for (pos, b) in ext.children(id, prev).enumerate() {
                match class[b] {
                    NodeClass::A => {
                        run = Some(run.map_or((pos, pos), |(lo, _)| (lo, pos)));
                        continue;
                    }
                    NodeClass::B => {
                        let d = down[b].expect("B has a descent");
                        b_paths[i].push((ext.prefix(b).expect("non-root"), ext.prefix(d).expect("non-root")));
                    }
                    NodeClass::Special => {}
                }
                a_runs[i].extend(run.take());
            }
            a_runs[i].extend(run);
        }
        SpecialLayer {
            prefix: nodes.iter().map(|&id| ext.prefix(id)).collect(),
            in_pi: nodes.iter().map(|&id| ext.in_pi(id)).collect(),
            gamma: nodes.iter().map(|&id| ext.gamma(id)).collect(),
            sigma_circ: circ.iter().filter(|&&c| c).count(),
            nodes,
            parent,
            children,
            a_runs,
            b_paths,
            class,
            down,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Extended and special structure for every distinct transition of a system.
#[derive(Clone, Debug)]
pub struct LayerPlan {
    pub ext: Vec<ExtendedLayer>,
    pub special: Vec<Option<SpecialLayer>>,
}

impl LayerPlan {
    pub fn build(sys: &PatternSystem, with_special: bool) -> Self {
        let mut ext: Vec<Option<ExtendedLayer>> = vec![None; sys.num_transitions()];
        let mut special: Vec<Option<SpecialLayer>> = vec![None; sys.num_transitions()];
        for s in 1..=sys.n() {
            let t = sys.transition_id(s);
            if ext[t].is_none() {
                let e = ExtendedLayer::build(sys.layer(s), sys.layer(s - 1), sys.transition(s), sys);
                if with_special {
                    special[t] = Some(SpecialLayer::build(&e, sys.layer(s - 1)));
                }
                ext[t] = Some(e);
            }
        }
        LayerPlan { ext: ext.into_iter().map(|e| e.expect("every transition is used")).collect(), special }
    }
}

/// Special layers of every position, in order `s = 1..=n`.
pub fn build_special_layers(sys: &PatternSystem) -> Vec<SpecialLayer> {
    let plan = LayerPlan::build(sys, true);
    (1..=sys.n()).map(|s| plan.special[sys.transition_id(s)].clone().expect("built")).collect()
}
