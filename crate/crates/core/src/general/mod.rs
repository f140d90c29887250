//! Inference in any commutative semiring, without subtraction.

mod basic;
mod extended;
mod fast;
mod interval;
mod lift;

pub use basic::{basic_messages, infer_basic, SemiringMessages};
pub use extended::{build_special_layers, ExtendedLayer, LayerPlan, NodeClass, SpecialLayer};
pub use fast::{fast_messages, infer_fast, subtree_sums};
pub use interval::IntervalSumIndex;
pub use lift::LiftTables;
