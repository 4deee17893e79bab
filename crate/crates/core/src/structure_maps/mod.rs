//! Constructions connecting algebra derivations and TRO derivations.

mod fiber;
mod jordan;
mod linking;
mod restriction;
mod spatial;

pub use fiber::{fiber_restrict, FiberReport};
pub use jordan::{innerness_witness_vn, jordan_split, JordanSplit, VnWitness};
pub use linking::{extend_to_linking, LinkingExtension};
pub use restriction::{restriction_delta, RestrictionReport};
pub use spatial::{inner_triple_to_tro, inner_tro_to_triple, spatial_decompose, SpatialPair, SpatialWitness};
