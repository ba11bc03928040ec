//! Fermionic Gaussian channel model for wave-packet entanglement observed by
//! uniformly accelerated detectors.

#![forbid(unsafe_code)]

pub mod channel;
pub mod config;
pub mod entanglement;
pub mod error;
pub mod gaussian;
pub mod modes;
pub mod oracle;
pub mod special;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
