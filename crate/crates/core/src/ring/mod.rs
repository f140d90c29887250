//! Inference that relies on subtraction: the partition function, the
//! mirrored backward pass, and marginals of every prefix-suffix placement.

mod marginals;
mod partition;

pub use marginals::{build_phi_index, compute_marginals, marginals, MarginalEntry, MarginalTable, PhiIndex};
pub use partition::{backward_messages, partition_function, Backward, MessageTable};
