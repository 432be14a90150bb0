//! Construction and certification of deleted-disc ("Swiss cheese") plane
//! sets at desk scale, together with the combinatorial machinery around
//! them: compact target sets with certified distances, exact rational
//! function calculus with derivative bounds, slit-chain propagation models,
//! and linear feasibility search for representing and Jensen measures.

pub mod calculus;
pub mod cheese;
pub mod geometry;
pub mod measures;
pub mod persist;
pub mod simplex;
pub mod poly;
pub mod slits;
pub mod targets;

pub use cheese::{Membership, SwissCheese};
pub use geometry::{BoundPair, Disc, DiscKind, QPoint, Q};
pub use targets::{D0Bound, SVCSet, TargetSet};
