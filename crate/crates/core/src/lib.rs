//! Non-binary LDPC codes over F_q^m with GL(m, F_q) coefficients, for channels
//! whose additive noise is uniform on a random subspace known to the receiver.

pub mod channel;
pub mod cli;
pub mod code;
pub mod de;
pub mod decoder;
pub mod error;
pub mod field;
pub mod mc;
pub mod sim;
pub mod subspace;

pub use error::{Error, Result};
