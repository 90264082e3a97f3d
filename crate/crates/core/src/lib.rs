//! Bin packing with splittable items and at most `k` parts per bin.
//!
//! Sizes are exact rationals and bins have capacity one. The crate provides
//! online NEXT FIT for any `k`, the 7/5-approximation for `k = 2` with its
//! repair passes, an exhaustive exact solver used as an oracle, structural
//! normalizations of `k = 2` packings, lower bounds and instance generators.

pub mod algo75;
pub mod bounds;
pub mod error;
pub mod exact;
pub mod generators;
pub mod graph;
pub mod instance;
pub mod nextfit;
pub mod normalize;
pub mod packing;
pub mod rational;

pub use algo75::{pack_75, split_2b, A75Report, Fallback};
pub use bounds::{lower_bounds, BoundsReport};
pub use error::{Error, Result};
pub use exact::{exact_opt, feasible_in, Budget, ExactOptions, ExactSolution, StructureClass};
pub use generators::{
    gen_a75_worst, gen_from_3partition, gen_nf_worst, gen_random, gen_random_k2_packing, three_partition_brute,
    SizeDistribution,
};
pub use graph::{graph_of, packing_of_graph, PackingGraph};
pub use instance::{item_weight, Instance, ItemClass, ItemId};
pub use nextfit::{check_block_inequality, next_fit, CloseReason, NfTrace};
pub use normalize::{bound_degrees, normal_form_violations, normalize, remove_cycles, smalls_to_leaves};
pub use packing::{is_valid, validate_packing, Bin, Label, Packing, Violation};
pub use rational::Rational;
