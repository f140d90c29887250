//! Exact inference for pattern-based conditional random fields on chains.
//!
//! A model is a [`PatternBank`]: an alphabet, a sequence length `n`, and a
//! set Γ of weighted words. The energy of a labeling sums the energies of
//! every placement of a Γ word inside it. Inference runs over layered
//! suffix forests ([`PatternSystem`]) and is generic over the [`Semiring`]:
//!
//! * [`partition_function`] and [`marginals`] need subtraction ([`Ring`]);
//! * [`infer_basic`] and [`infer_fast`] work in any commutative semiring;
//! * [`map_nonpositive`] finds a minimum-energy labeling when no energy is
//!   positive;
//! * [`Sampler`] draws exact samples from `p(x) ∝ f(x)`.
//!
//! ```
//! use pattern_crf::{Alphabet, PatternBank, SumProduct64, Variant};
//!
//! let mut bank = PatternBank::new(Alphabet::from_chars("ab").unwrap(), 3).unwrap();
//! bank.add("a", 0.0).unwrap();
//! bank.add("b", 0.0).unwrap();
//! let sys = pattern_crf::build_pattern_system(&bank, Variant::Prefixes).unwrap();
//! let costs = sys.costs::<SumProduct64>(&bank);
//! let (z, _) = pattern_crf::partition_function(&sys, &costs).unwrap();
//! assert_eq!(z.to_float(), 8.0);
//! ```

pub mod algebra;
pub mod error;
pub mod general;
pub mod io;
pub mod map;
pub mod oracle;
pub mod pattern;
pub mod ring;
pub mod sampling;

pub use algebra::{BoolOrAnd, Count, Field, MinPlus, Ring, Scaled, Semiring, SemiringKind, SumProduct};
pub use error::{Error, Result};
pub use general::{infer_basic, infer_fast};
pub use map::{map_nonpositive, MapOptions, MapSolution};
pub use pattern::{build_pattern_system, compute_bank_stats, Alphabet, PatternBank, PatternSystem, Variant, Word};
pub use ring::{backward_messages, marginals, partition_function, MarginalTable, MessageTable};
pub use sampling::{Sampler, SamplerMode};

pub type SumProduct64 = SumProduct<f64>;
pub type SumProduct32 = SumProduct<f32>;
pub type MinPlus64 = MinPlus<f64>;
pub type MinPlus32 = MinPlus<f32>;
pub type Count64 = Count<i64>;
pub type CountBig = Count<i128>;
