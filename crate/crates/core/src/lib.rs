//! Bounds on stable sets in orthogonality graphs and binary codes.

pub mod bounds;
pub mod error;
pub mod report;
pub mod scheme;
pub mod sdp;
pub mod sdpa;
pub mod terwilliger;

pub use error::{Error, Result};

/// Numeric types re-exported for downstream crates (FFI bindings).
pub mod exports {
    pub use num::{BigInt, BigRational, BigUint, ToPrimitive};
}
