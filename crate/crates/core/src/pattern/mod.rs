//! Words, pattern banks, and the layered pattern sets the algorithms run on.

mod bank;
mod ilimit;
mod system;
mod trie;

pub use bank::{
    compute_bank_stats, prefix_set, prefix_suffix_words, suffix_set, Alphabet, BankCosts, BankStats, Override,
    PatternBank, Placement, Symbol, WeightedWord, Word,
};
pub use ilimit::{compute_i_delta, compute_i_limit};
pub use system::{
    build_pattern_system, compute_f, compute_phi, Layer, NodeTable, PatternSystem, SystemCosts, Transition, Variant,
};
pub use trie::{NodeId, WordTrie};

pub(crate) use system::layer_phi;
