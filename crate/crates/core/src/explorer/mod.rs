//! Families of triples: scaling rays, pinched base surfaces and distances
//! toward the compactification.

mod distance;
mod pinch;
mod ray;

pub use distance::{compact_distance, identity_correspondence, CompactificationDistance, DEFAULT_TERMS};
pub use pinch::{pinch_family, PINCHED_CURVE};
pub use ray::{find_threshold, find_threshold_with, RayResult, ThresholdOptions};
