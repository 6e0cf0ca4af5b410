//! Exact certification of submaximal-curve thresholds for uniform line bundles on
//! blow-ups of the projective plane at very general points.

pub mod error;
pub mod exact;
pub mod region;
pub mod search;
pub mod surface;
pub mod thresholds;

pub use error::{Error, Result};
