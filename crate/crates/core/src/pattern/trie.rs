use std::collections::BTreeMap;

use super::bank::{Symbol, Word};

pub type NodeId = u32;

/// Trie over reversed words.
///
/// Node 0 is the empty word. The parent of a node drops the word's first
/// symbol, so walking towards the root visits ever shorter suffixes and the
/// suffix order on words becomes the ancestor order of the trie.
#[derive(Clone, Debug)]
pub struct WordTrie {
    words: Vec<Word>,
    parent: Vec<Option<NodeId>>,
    children: Vec<BTreeMap<Symbol, NodeId>>,
}

impl Default for WordTrie {
    fn default() -> Self {
        Self::new()
    }
}

impl WordTrie {
    pub fn new() -> Self {
        WordTrie { words: vec![Word::empty()], parent: vec![None], children: vec![BTreeMap::new()] }
    }

    pub const ROOT: NodeId = 0;

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Inserts `word` and all of its suffixes; returns the node of `word`.
    pub fn insert(&mut self, word: &[Symbol]) -> NodeId {
        let mut cur = Self::ROOT;
        for (k, &c) in word.iter().enumerate().rev() {
            cur = match self.children[cur as usize].get(&c) {
                Some(&next) => next,
                None => {
                    let id = self.words.len() as NodeId;
                    self.words.push(Word(word[k..].to_vec()));
                    self.parent.push(Some(cur));
                    self.children.push(BTreeMap::new());
                    self.children[cur as usize].insert(c, id);
                    id
                }
            };
        }
        cur
    }

    pub fn find(&self, word: &[Symbol]) -> Option<NodeId> {
        let mut cur = Self::ROOT;
        for &c in word.iter().rev() {
            cur = *self.children[cur as usize].get(&c)?;
        }
        Some(cur)
    }

    pub fn word(&self, id: NodeId) -> &Word {
        &self.words[id as usize]
    }

    pub fn depth(&self, id: NodeId) -> usize {
        self.words[id as usize].len()
    }

    /// The node of the word without its first symbol.
    pub fn suffix_parent(&self, id: NodeId) -> Option<NodeId> {
        self.parent[id as usize]
    }

    /// Nodes reached by prepending one symbol, in symbol order.
    pub fn extensions(&self, id: NodeId) -> impl Iterator<Item = (Symbol, NodeId)> + '_ {
        self.children[id as usize].iter().map(|(&c, &n)| (c, n))
    }

    /// Longest suffix of `word` present in the trie.
    pub fn longest_suffix(&self, word: &[Symbol]) -> NodeId {
        let mut cur = Self::ROOT;
        for &c in word.iter().rev() {
            match self.children[cur as usize].get(&c) {
                Some(&next) => cur = next,
                None => break,
            }
        }
        cur
    }
}
