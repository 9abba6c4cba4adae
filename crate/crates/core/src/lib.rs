//! Convolutionally coded noncoherent on-off keying (ASK) over AWGN.
//!
//! The crate covers the whole link: a rate 1/n convolutional encoder and its
//! trellis, an envelope-level channel with uniformly random carrier phase,
//! exact maximum-likelihood branch metrics for the Rayleigh/Rician envelope
//! statistics, soft and hard Viterbi decoding, closed-form error-rate bounds
//! and a reproducible Monte Carlo engine that checks them.
//!
//! ```text
//! info bits -> encode -> transmit (eta_i) -> metric_table -> viterbi_decode
//! ```

pub mod analysis;
pub mod channel;
pub mod codec;
mod error;
pub mod likelihood;
pub mod sim;

pub use error::{Error, Result};

/// A single binary symbol, always `0` or `1`.
pub type Bit = u8;
