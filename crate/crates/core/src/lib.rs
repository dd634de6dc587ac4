//! Weighted logarithmic and identric means, refined Hermite–Hadamard bounds
//! for convex functions, and the matching operator means on SPD matrices.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod chain;
pub mod convex;
pub mod error;
pub mod harness;
pub mod hh;
pub mod means;
pub mod operator;
pub mod quad;

pub use chain::{ChainReport, GapBoundReport};
pub use convex::{Builtin, ConvexFn, DerivBounds};
pub use error::{Error, Result};
pub use means::{PositivePair, Weight};
pub use quad::QuadConfig;
