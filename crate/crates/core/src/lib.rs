//! Achievable finite-length error bounds for random (multiple) access
//! channel coding over discrete memoryless channels.
//!
//! Users pick a communication rate from a finite menu without telling the
//! receiver. The receiver either decodes the message (and the rate) or
//! declares a collision. This crate computes the achievable exponents of the
//! random coding ensemble, assembles the system error probability bound at a
//! given codeword length, and simulates the ensemble with the maximum
//! likelihood plus typicality threshold decoder that achieves the bound.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front end and multi-threaded trial execution live in the `raxcode`
//! crate.
#![no_std]
// `!(a < b)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod channel;
pub mod error;
pub mod exponents;
pub mod math;
pub mod optimize;
pub mod simulator;

pub use bounds::{BoundResult, BoundTerm, Branch};
pub use channel::{Channel, InputDistribution, OperationRegion, RatePoint, RateProfile, Subset};
pub use error::{Error, Result};
pub use exponents::{ExponentKind, ExponentResult, GridProfile, OptimizerConfig, UserGrid};
