//! Secrecy rate regions for decode-and-forward relay beamforming towards two
//! receivers, `D` and `E`, each of which must not learn the other's message.
//!
//! The crate evaluates four strategies over a relay power split `alpha`:
//!
//! * single null-space beamforming (one stream is steered into the null space
//!   of the other receiver's channel, the other stream solves a
//!   generalized-eigenvalue problem),
//! * double null-space beamforming (both streams are zero-forced),
//! * TDMA (time sharing between two MISO wiretap links),
//! * the outer bound obtained by dropping the cross-stream interference.
//!
//! Everything reduces to identity-plus-rank-one matrix pencils, solved in
//! closed form by [`pencil`].

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod channel;
pub mod cli;
pub mod cx;
mod error;
pub mod format;
pub mod montecarlo;
pub mod pencil;
pub mod schemes;
mod units;
pub mod validation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use units::RateUnit;
