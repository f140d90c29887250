//! Exact sampling of labelings with probability proportional to `f(x)`.

mod alias;
mod delta;
mod sampler;

pub use alias::{pick_direct, AliasTable};
pub use delta::{build_delta_index, delta_by_extension, delta_by_subtraction, DeltaLayer};
pub use sampler::{Sampler, SamplerMode};
